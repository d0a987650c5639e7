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
Randomized equivalence check of compiled overlays against the reference interpreter.

Each case draws an input stream and a window length, runs it through the simulated PE array
(policy "all") and through `oracle_stream`, and compares outcome and output set per window.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from transformers.utils import logging

from ..core.engine.modeling_engine import OverlayEngine
from ..core.engine.stream import run_stream
from ..core.errors import AdjacencyUnsatisfiable, CapacityExceeded, EngineError
from ..core.fst.modeling_fst import Fst, SymbolClass, Transition, eliminate_epsilon, machine_symbols, reachable_states
from ..core.fst.oracle_fst import oracle_stream
from ..core.fst.parsing_fst import format_ruleset
from ..core.overlay.grid import GridSpec
from ..core.overlay.modeling_overlay import OverlayImage, compile_fst

logger = logging.get_logger(__name__)

DEFAULT_ALPHABET = b"abc"
DEFAULT_OUTPUTS = b"xyz"
MAX_REDRAWS = 1000

WindowView = Tuple[str, Tuple[bytes, ...]]


def escape_bytes(data: bytes) -> str:
    """Printable ASCII as-is, everything else (and backslash) as \\xNN."""
    return "".join(chr(b) if 0x21 <= b <= 0x7E and b != 0x5C else f"\\x{b:02x}" for b in data)


def random_fst(
    rng: np.random.Generator,
    min_states: int = 2,
    max_states: int = 10,
    max_edges: int = 16,
    alphabet: bytes = DEFAULT_ALPHABET,
    outputs: bytes = DEFAULT_OUTPUTS,
) -> Fst:
    """
    Draw a length-preserving machine. The first edge leaves the start state 0; every later edge
    leaves a state some earlier edge reached, so all edges are reachable. At least one reachable
    state is accepting.
    """
    n_states = int(rng.integers(min_states, max_states + 1))
    n_edges = int(rng.integers(1, max_edges + 1))
    reached = [0]
    transitions: List[Transition] = []
    for _ in range(n_edges):
        src = reached[int(rng.integers(len(reached)))]
        dst = int(rng.integers(n_states))
        if rng.random() < 0.7:
            label = SymbolClass.single(alphabet[int(rng.integers(len(alphabet)))])
        else:
            size = int(rng.integers(2, len(alphabet) + 1))
            label = SymbolClass.from_symbols(rng.choice(list(alphabet), size=size, replace=False).tolist())
        transitions.append(Transition(src, dst, label, outputs[int(rng.integers(len(outputs)))]))
        if dst not in reached:
            reached.append(dst)

    fst = Fst(n_states, tuple(transitions), 0)
    live = sorted(reachable_states(fst))
    k = int(rng.integers(1, len(live) + 1))
    accepting = frozenset(int(q) for q in rng.choice(live, size=k, replace=False))
    return Fst(n_states, tuple(transitions), 0, accepting)


def random_input(rng: np.random.Generator, fst: Fst, window_length: int, max_input: int = 64) -> bytes:
    """
    Draw a stream of at most `max_input` bytes. Each window is either uniform noise over the machine's
    symbols plus one foreign byte, or a random walk from the start state, so matched windows occur.
    """
    symbols = machine_symbols(fst) or [0x61]
    noise = symbols + [0x00]
    out_edges = fst.out_edges()
    length = int(rng.integers(0, max_input + 1))
    data = bytearray()
    while len(data) < length:
        n = min(window_length, length - len(data))
        walk = rng.random() < 0.5
        state = fst.start
        for _ in range(n):
            edges = out_edges.get(state, []) if walk else []
            if edges:
                t = fst.transitions[edges[int(rng.integers(len(edges)))]]
                members = t.input.symbols() if t.input is not None else noise
                data.append(members[int(rng.integers(len(members)))])
                state = t.dst
            else:
                walk = False
                data.append(noise[int(rng.integers(len(noise)))])
    return bytes(data)


@dataclass(frozen=True)
class Counterexample:
    case: int
    fst: Fst
    data: bytes
    window_length: int
    window_index: Optional[int]
    expected: Optional[WindowView]
    got: Optional[WindowView]
    error: Optional[str] = None

    def __str__(self) -> str:
        lines = [
            f"counterexample in case {self.case}: n={self.window_length} input={escape_bytes(self.data) or '(empty)'}",
        ]
        if self.error is not None:
            lines.append(f"  engine error: {self.error}")
        else:
            lines.append(f"  window {self.window_index}: expected {_show(self.expected)}, got {_show(self.got)}")
        lines.append("  machine:")
        lines.extend("    " + line for line in format_ruleset(self.fst).splitlines())
        return "\n".join(lines)


def _show(view: Optional[WindowView]) -> str:
    if view is None:
        return "(none)"
    outcome, outputs = view
    return f"{outcome} [{', '.join(escape_bytes(o) for o in outputs)}]"


@dataclass
class VerificationReport:
    seed: int
    cases: int = 0
    passed: int = 0
    rejected: int = 0
    counterexamples: List[Counterexample] = field(default_factory=list)

    @property
    def failed(self) -> int:
        return self.cases - self.passed

    @property
    def ok(self) -> bool:
        return self.failed == 0

    @property
    def first_counterexample(self) -> Optional[Counterexample]:
        return self.counterexamples[0] if self.counterexamples else None

    def __str__(self) -> str:
        return f"{self.passed}/{self.cases} pass"


def check_case(
    case: int,
    fst: Fst,
    image: OverlayImage,
    data: bytes,
    window_length: int,
    engine: Optional[OverlayEngine] = None,
    max_workers: int = 1,
) -> Optional[Counterexample]:
    """Compare overlay and oracle on one stream; None when every window agrees."""
    try:
        got = run_stream(image, data, window_length, max_workers=max_workers, engine=engine).results
    except EngineError as e:
        return Counterexample(case, fst, data, window_length, e.window_index, None, None, error=str(e))
    expected = oracle_stream(fst, data, window_length)

    for i in range(max(len(got), len(expected))):
        e_view = (expected[i].outcome.value, expected[i].outputs) if i < len(expected) else None
        g_view = (got[i].outcome.value, got[i].outputs) if i < len(got) else None
        if e_view != g_view:
            return Counterexample(case, fst, data, window_length, i, e_view, g_view)
    return None


def _compile_random(rng: np.random.Generator, grid: GridSpec, replication_budget: int, report: VerificationReport):
    for _ in range(MAX_REDRAWS):
        fst = random_fst(rng)
        try:
            return fst, compile_fst(fst, grid, replication_budget)
        except (CapacityExceeded, AdjacencyUnsatisfiable) as e:
            report.rejected += 1
            logger.debug(f"Redrawing machine rejected by the compiler: {e}")
    raise RuntimeError(f"no random machine compiled onto {grid} in {MAX_REDRAWS} draws")


def verify(
    fst: Optional[Fst] = None,
    image: Optional[OverlayImage] = None,
    cases: int = 100,
    seed: int = 0,
    grid: GridSpec = GridSpec(8, 8),
    max_window: int = 8,
    max_input: int = 64,
    replication_budget: int = 4,
    max_workers: int = 1,
    stop_at_first: bool = False,
) -> VerificationReport:
    """
    Run the overlay/oracle equivalence check.

    Args:
        fst (`Fst`, *optional*):
            Machine under test. When omitted, every case draws a fresh random machine and redraws the
            ones the compiler rejects for capacity or adjacency.
        image (`OverlayImage`, *optional*):
            Image to check against `fst` instead of compiling it.
        cases (`int`, *optional*, defaults to 100):
            Number of random streams.
        seed (`int`, *optional*, defaults to 0):
            Seed of the numpy generator; identical seeds give identical reports.
        max_window (`int`, *optional*, defaults to 8):
            Window lengths are drawn from `1..max_window`.
        max_input (`int`, *optional*, defaults to 64):
            Stream lengths are drawn from `0..max_input`.

    Returns:
        VerificationReport:
            Pass/fail counts and every counterexample, in case order.
    """
    if cases < 0:
        raise ValueError(f"cases must be >= 0, got {cases}")
    if max_window < 1:
        raise ValueError(f"max_window must be >= 1, got {max_window}")
    if image is not None and fst is None:
        raise ValueError("checking an image needs the machine it was compiled from")

    rng = np.random.default_rng(seed)
    report = VerificationReport(seed=seed)
    if cases == 0:
        logger.warning("verify ran with cases=0: vacuous pass")
        return report

    engine = None
    if fst is not None:
        if image is None:
            image = compile_fst(eliminate_epsilon(fst), grid, replication_budget)
        engine = OverlayEngine(image)

    for case in range(cases):
        if fst is None:
            case_fst, case_image = _compile_random(rng, grid, replication_budget, report)
            case_engine = None
        else:
            case_fst, case_image, case_engine = fst, image, engine
        n = int(rng.integers(1, max_window + 1))
        data = random_input(rng, case_fst, n, max_input)
        failure = check_case(case, case_fst, case_image, data, n, case_engine, max_workers)
        report.cases += 1
        if failure is None:
            report.passed += 1
            continue
        report.counterexamples.append(failure)
        logger.warning(f"Case {case} failed at window {failure.window_index}.")
        if stop_at_first:
            break

    logger.info(f"Verification seed={seed}: {report}, {report.rejected} machines redrawn.")
    return report


__all__ = [
    "Counterexample",
    "VerificationReport",
    "escape_bytes",
    "random_fst",
    "random_input",
    "check_case",
    "verify",
]
