# coding=utf-8
# Copyright 2026 The NFST Overlay authors.
# SPDX-License-Identifier: Apache-2.0
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""
Cycle-level model of the PE array.

Per window of n symbols the engine spends n cycles flushing the sub-sequence in and 2 cycles per
symbol transition. A matched window then costs 1 cycle to flush the activation vector into the
FIFO, m cycles in the transduction RAM and n cycles to flush the output out (4n + m + 1 in total);
a discarded window costs one extra cycle (3n + 1).
"""

from collections import deque
from dataclasses import dataclass, field
from typing import Deque, List, Optional, Sequence, Tuple

import numpy as np
from einops import rearrange
from transformers.utils import logging

from ..errors import ActivationOverflow, FifoOverflow, NoAcceptingPath, UnusedTramEntry
from ..fst.oracle_fst import Outcome
from ..overlay.modeling_overlay import OverlayImage, TransductionRam

logger = logging.get_logger(__name__)

ActivationVector = List[Tuple[int, int]]  # (position, pe_id)
Path = Tuple[int, ...]

CYCLES_PER_TRANSITION = 2


def cycle_model(n: int, m: int, matched: bool) -> int:
    """
    Cycles spent on one window of length `n` on an array of `m` PEs.

    matched:   flush-in n + transitions 2n + vector flush 1 + transduction m + output flush n
    unmatched: flush-in n + transitions 2n + discard 1
    """
    if n < 1 or m < 1:
        raise ValueError(f"cycle_model needs n >= 1 and m >= 1, got n={n}, m={m}")
    if matched:
        return n + CYCLES_PER_TRANSITION * n + 1 + m + n
    return n + CYCLES_PER_TRANSITION * n + 1


@dataclass
class EngineState:
    image: OverlayImage
    enabled: np.ndarray
    active: np.ndarray
    position: int = 0
    activation_vector: ActivationVector = field(default_factory=list)
    cycles: int = 0


class Fifo:
    """Bounded queue of activation vectors between the engine and the transduction RAM."""

    def __init__(self, capacity: int = 4):
        if capacity < 1:
            raise ValueError(f"FIFO capacity must be positive, got {capacity}")
        self.capacity = capacity
        self.contents: Deque[ActivationVector] = deque()

    def push(self, vector: ActivationVector) -> None:
        if len(self.contents) >= self.capacity:
            raise FifoOverflow(f"FIFO full ({self.capacity} vectors); engine stalled")
        self.contents.append(vector)

    def pop(self) -> ActivationVector:
        return self.contents.popleft()

    def __len__(self) -> int:
        return len(self.contents)


@dataclass(frozen=True)
class SubSequenceResult:
    window_index: int
    outcome: Outcome
    cycles: int
    window_length: int
    # sorted by output bytes; both empty when discarded
    outputs: Tuple[bytes, ...] = ()
    paths: Tuple[Path, ...] = ()

    @property
    def matched(self) -> bool:
        return self.outcome is Outcome.MATCHED

    def first(self) -> "SubSequenceResult":
        """Keep only the lexicographically smallest output (and the path producing it)."""
        if not self.matched:
            return self
        return SubSequenceResult(
            self.window_index, self.outcome, self.cycles, self.window_length, self.outputs[:1], self.paths[:1]
        )


def transduce(path: Sequence[int], tram: TransductionRam) -> bytes:
    """Look up one output byte per PE of `path`."""
    out = bytearray()
    for pe in path:
        entry = tram.entries[pe]
        if entry is None:
            raise UnusedTramEntry(f"PE {pe} has no transduction RAM entry")
        out.append(entry)
    return bytes(out)


def reconstruct_paths(vector: ActivationVector, image: OverlayImage, window_len: int) -> List[Path]:
    """
    Recover every accepting PE path from an activation vector.

    A path p0..p(n-1) ends in a report PE logged at position n-1, every p(i) was logged at position
    i, and p(i) is switched into p(i+1). Paths come back ordered by their transduced output, then by
    PE ids.

    Raises:
        NoAcceptingPath: no such path exists.
    """
    if window_len < 1:
        raise ValueError(f"window length must be >= 1, got {window_len}")
    by_position: List[set] = [set() for _ in range(window_len)]
    for position, pe in vector:
        by_position[position].add(pe)

    partial: List[Path] = [(pe,) for pe in sorted(by_position[-1]) if image.pes[pe].is_report]
    for position in range(window_len - 2, -1, -1):
        logged = by_position[position]
        partial = [(q,) + suffix for suffix in partial for q in image.predecessors(suffix[0]) if q in logged]

    if not partial:
        raise NoAcceptingPath("window flagged as matched but no accepting path is in the activation vector")
    return sorted(set(partial), key=lambda p: (transduce(p, image.tram), p))


class OverlayEngine:
    """
    Simulator of one compiled image.

    The match table (`256 x m`), the switch matrix (`m x m`, `succ[p, q]` iff `p` may enable `q`)
    and the start/report masks are computed once and never change; each window runs on its own
    `EngineState` and FIFO, so several states over the same engine may be driven from different threads.
    """

    def __init__(self, image: OverlayImage, fifo_capacity: int = 4):
        self.image = image
        self.m = image.m
        if fifo_capacity < 1:
            raise ValueError(f"FIFO capacity must be positive, got {fifo_capacity}")
        self.fifo_capacity = fifo_capacity

        masks = np.stack([pe.match.to_mask() for pe in image.pes])
        self.match_table = rearrange(masks, "pe sym -> sym pe")
        self.successors = np.zeros((self.m, self.m), dtype=bool)
        for pe in range(self.m):
            for q in image.predecessors(pe):
                self.successors[q, pe] = True
        self.start_mask = np.array([pe.is_start for pe in image.pes], dtype=bool)
        self.report_mask = np.array([pe.is_report for pe in image.pes], dtype=bool)
        self.activation_capacity = self.m * self.m

    def reset(self) -> EngineState:
        return EngineState(
            image=self.image,
            enabled=self.start_mask.copy(),
            active=np.zeros(self.m, dtype=bool),
        )

    def step(self, state: EngineState, symbol: int, trace: Optional[List[str]] = None) -> EngineState:
        """
        Consume one symbol: enabled PEs whose match RAM holds `symbol` become active, get logged in
        the activation vector, and enable their switch successors for the next position.

        Raises:
            ActivationOverflow: logging would exceed the m^2 entries of the activation vector.
        """
        active = state.enabled & self.match_table[symbol]
        for pe in np.flatnonzero(active).tolist():
            if len(state.activation_vector) >= self.activation_capacity:
                raise ActivationOverflow(
                    f"activation vector full ({self.activation_capacity} entries) at position {state.position}"
                )
            state.activation_vector.append((state.position, pe))
        enabled = self.successors[active].any(axis=0)

        if trace is not None:
            trace.append(
                f"cyc={state.cycles} pos={state.position} sym=0x{symbol:02x} "
                f"active=[{','.join(map(str, np.flatnonzero(active).tolist()))}] "
                f"enabled=[{','.join(map(str, np.flatnonzero(enabled).tolist()))}]"
            )

        state.active = active
        state.enabled = enabled
        state.position += 1
        state.cycles += CYCLES_PER_TRANSITION
        return state

    def run_subsequence(
        self,
        state: EngineState,
        window: bytes,
        window_index: int = 0,
        fifo: Optional[Fifo] = None,
        trace: Optional[List[str]] = None,
    ) -> Tuple[SubSequenceResult, EngineState]:
        """
        Stream one window through the array and either transduce or discard its activation vector.

        Without `fifo` the call gets a private FIFO, so concurrent calls never share one. A window
        pushes its vector and the transduction RAM drains it before the next window starts, so the
        FIFO holds at most one vector here and `FifoOverflow` only comes from a caller-supplied FIFO
        that is already full.

        Returns:
            (SubSequenceResult, EngineState): the window outcome and a freshly reset state.
        """
        n = len(window)
        if n < 1:
            raise ValueError("run_subsequence needs a non-empty window")
        fifo = Fifo(self.fifo_capacity) if fifo is None else fifo

        state.cycles += n  # flush the sub-sequence in
        for symbol in window:
            self.step(state, symbol, trace)

        if bool((state.active & self.report_mask).any()):
            fifo.push(state.activation_vector)
            state.cycles += 1
            vector = fifo.pop()
            paths = reconstruct_paths(vector, self.image, n)
            state.cycles += self.m
            outputs = tuple(sorted({transduce(p, self.image.tram) for p in paths}))
            state.cycles += n  # flush the output out
            result = SubSequenceResult(window_index, Outcome.MATCHED, state.cycles, n, outputs, tuple(paths))
        else:
            state.cycles += 1  # discard
            result = SubSequenceResult(window_index, Outcome.DISCARDED, state.cycles, n)
        return result, self.reset()


def reset(image: OverlayImage) -> EngineState:
    return OverlayEngine(image).reset()


__all__ = [
    "ActivationVector",
    "EngineState",
    "Fifo",
    "SubSequenceResult",
    "OverlayEngine",
    "cycle_model",
    "transduce",
    "reconstruct_paths",
    "reset",
]
