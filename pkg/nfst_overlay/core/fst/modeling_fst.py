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
Data model of a non-deterministic finite state transducer over the byte alphabet.

An `Fst` is the tuple (states, transitions, start, accepting). Each `Transition` reads either
epsilon (`input is None`) or one byte out of a `SymbolClass`, and writes either epsilon
(`output is None`) or exactly one byte.
"""

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

import numpy as np
from transformers.utils import logging

from ..errors import UnsupportedEpsilonOutput

logger = logging.get_logger(__name__)

ALPHABET_SIZE = 256
BITMAP_BYTES = ALPHABET_SIZE // 8

# `None` stands for epsilon on either tape.
EPSILON = None
OutputLabel = Optional[int]


@dataclass(frozen=True)
class SymbolClass:
    """
    Membership bitmap over the 256 byte symbols.

    `bits` is the 32-byte image of the PE match RAM: symbol `s` is a member iff bit `s % 8`
    of byte `s // 8` is set (little bit order).
    """

    bits: bytes = bytes(BITMAP_BYTES)

    def __post_init__(self):
        if len(self.bits) != BITMAP_BYTES:
            raise ValueError(f"SymbolClass bitmap must be {BITMAP_BYTES} bytes, got {len(self.bits)}")

    @classmethod
    def from_mask(cls, mask: np.ndarray) -> "SymbolClass":
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (ALPHABET_SIZE,):
            raise ValueError(f"Expected a ({ALPHABET_SIZE},) boolean mask, got shape {mask.shape}")
        return cls(np.packbits(mask, bitorder="little").tobytes())

    @classmethod
    def from_symbols(cls, symbols: Iterable[int]) -> "SymbolClass":
        mask = np.zeros(ALPHABET_SIZE, dtype=bool)
        for s in symbols:
            if not 0 <= int(s) < ALPHABET_SIZE:
                raise ValueError(f"Symbol out of range: {s}")
            mask[int(s)] = True
        return cls.from_mask(mask)

    @classmethod
    def from_ranges(cls, ranges: Iterable[Tuple[int, int]]) -> "SymbolClass":
        mask = np.zeros(ALPHABET_SIZE, dtype=bool)
        for lo, hi in ranges:
            mask[lo : hi + 1] = True
        return cls.from_mask(mask)

    @classmethod
    def single(cls, symbol: int) -> "SymbolClass":
        return cls.from_symbols([symbol])

    @classmethod
    def full(cls) -> "SymbolClass":
        return cls(b"\xff" * BITMAP_BYTES)

    def to_mask(self) -> np.ndarray:
        return np.unpackbits(np.frombuffer(self.bits, dtype=np.uint8), bitorder="little").astype(bool)

    def __contains__(self, symbol: int) -> bool:
        return bool((self.bits[symbol >> 3] >> (symbol & 7)) & 1)

    def symbols(self) -> List[int]:
        return np.flatnonzero(self.to_mask()).tolist()

    def is_empty(self) -> bool:
        return not any(self.bits)

    def __len__(self) -> int:
        return int(self.to_mask().sum())

    def ranges(self) -> List[Tuple[int, int]]:
        """Maximal runs of member symbols as inclusive (lo, hi) pairs."""
        out: List[Tuple[int, int]] = []
        for s in self.symbols():
            if out and out[-1][1] == s - 1:
                out[-1] = (out[-1][0], s)
            else:
                out.append((s, s))
        return out


@dataclass(frozen=True)
class Transition:
    src: int
    dst: int
    input: Optional[SymbolClass]
    output: OutputLabel

    @property
    def is_epsilon_input(self) -> bool:
        return self.input is None

    @property
    def is_epsilon_output(self) -> bool:
        return self.output is None

    def output_bytes(self) -> bytes:
        return b"" if self.output is None else bytes([self.output])


@dataclass(frozen=True)
class Fst:
    state_count: int
    transitions: Tuple[Transition, ...] = ()
    start: int = 0
    accepting: FrozenSet[int] = field(default_factory=frozenset)

    def __post_init__(self):
        # normalize so that equality does not depend on the container passed in
        object.__setattr__(self, "transitions", tuple(self.transitions))
        object.__setattr__(self, "accepting", frozenset(self.accepting))

    def out_edges(self) -> Dict[int, List[int]]:
        """State id -> indices of the transitions leaving it, in declaration order."""
        table: Dict[int, List[int]] = {}
        for i, t in enumerate(self.transitions):
            table.setdefault(t.src, []).append(i)
        return table

    def has_epsilon_input(self) -> bool:
        return any(t.input is None for t in self.transitions)


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str
    line: Optional[int] = None
    column: Optional[int] = None

    @property
    def is_error(self) -> bool:
        return self.severity == "error"

    def __str__(self) -> str:
        where = ""
        if self.line is not None:
            where = f"line {self.line}: " if self.column is None else f"line {self.line}, column {self.column}: "
        return f"{self.severity}: {where}{self.message}"


def reachable_states(fst: Fst) -> Set[int]:
    """States reachable from the start state over every transition, epsilon included."""
    if not 0 <= fst.start < fst.state_count:
        return set()
    adjacency: Dict[int, List[int]] = {}
    for t in fst.transitions:
        adjacency.setdefault(t.src, []).append(t.dst)
    seen = {fst.start}
    queue = deque([fst.start])
    while queue:
        q = queue.popleft()
        for nxt in adjacency.get(q, ()):
            if nxt not in seen and 0 <= nxt < fst.state_count:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def validate(fst: Fst) -> List[Diagnostic]:
    """
    Check the structural invariants of `fst`.

    Returns:
        List[Diagnostic]:
            Empty iff the machine is well formed and every state is reachable. Invariant
            violations are reported as errors, unreachable states as warnings.
    """
    diags: List[Diagnostic] = []
    n = fst.state_count
    if n < 1:
        diags.append(Diagnostic("error", f"state_count must be positive, got {n}"))
    if not 0 <= fst.start < max(n, 0):
        diags.append(Diagnostic("error", f"start state {fst.start} out of range [0, {n})"))
    for q in sorted(fst.accepting):
        if not 0 <= q < n:
            diags.append(Diagnostic("error", f"accepting state {q} out of range [0, {n})"))
    for i, t in enumerate(fst.transitions):
        if not 0 <= t.src < n:
            diags.append(Diagnostic("error", f"transition {i}: src {t.src} out of range [0, {n})"))
        if not 0 <= t.dst < n:
            diags.append(Diagnostic("error", f"transition {i}: dst {t.dst} out of range [0, {n})"))
        if t.input is not None and t.input.is_empty():
            diags.append(Diagnostic("error", f"transition {i}: empty symbol class"))
        if t.input is None and t.output is not None:
            diags.append(Diagnostic("error", f"transition {i}: epsilon input with byte output 0x{t.output:02x}"))
        if t.output is not None and not 0 <= t.output < ALPHABET_SIZE:
            diags.append(Diagnostic("error", f"transition {i}: output {t.output} is not a byte"))

    if n >= 1 and 0 <= fst.start < n:
        seen = reachable_states(fst)
        for q in range(n):
            if q not in seen:
                kind = "accepting state" if q in fst.accepting else "state"
                diags.append(Diagnostic("warning", f"{kind} {q} is unreachable from start {fst.start}"))
    return diags


def reachable(fst: Fst) -> Fst:
    """
    Restrict `fst` to the states reachable from its start state.

    Surviving states are renumbered densely in increasing order of their old ids and the
    surviving transitions keep their declaration order.
    """
    keep = sorted(reachable_states(fst))
    renumber = {old: new for new, old in enumerate(keep)}
    transitions = tuple(
        Transition(renumber[t.src], renumber[t.dst], t.input, t.output)
        for t in fst.transitions
        if t.src in renumber and t.dst in renumber
    )
    return Fst(
        state_count=len(keep),
        transitions=transitions,
        start=renumber[fst.start],
        accepting=frozenset(renumber[q] for q in fst.accepting if q in renumber),
    )


def epsilon_closures(fst: Fst) -> List[FrozenSet[int]]:
    """closure[q] = states reachable from q by epsilon-input transitions only (q included)."""
    eps: Dict[int, List[int]] = {}
    for t in fst.transitions:
        if t.input is None:
            if t.output is not None:
                raise UnsupportedEpsilonOutput(
                    f"transition {t.src}->{t.dst} reads epsilon but writes byte 0x{t.output:02x}"
                )
            eps.setdefault(t.src, []).append(t.dst)

    closures: List[FrozenSet[int]] = []
    for q in range(fst.state_count):
        seen = {q}
        stack = [q]
        while stack:
            p = stack.pop()
            for r in eps.get(p, ()):
                if r not in seen:
                    seen.add(r)
                    stack.append(r)
        closures.append(frozenset(seen))
    return closures


def eliminate_epsilon(fst: Fst) -> Fst:
    """
    Remove epsilon-input transitions without changing the transduction relation.

    For every state `q` and every `p` in the epsilon closure of `q`, each non-epsilon
    transition `p -> r` is copied as `q -> r`; `q` becomes accepting when its closure touches
    an accepting state.

    Raises:
        UnsupportedEpsilonOutput: an epsilon-input transition carries a byte output.
    """
    if not fst.has_epsilon_input():
        return fst

    closures = epsilon_closures(fst)
    out_edges = fst.out_edges()

    transitions: List[Transition] = []
    seen: Set[Transition] = set()
    for q in range(fst.state_count):
        for p in sorted(closures[q]):
            for i in out_edges.get(p, ()):
                t = fst.transitions[i]
                if t.input is None:
                    continue
                moved = Transition(q, t.dst, t.input, t.output)
                if moved not in seen:
                    seen.add(moved)
                    transitions.append(moved)

    accepting = frozenset(q for q in range(fst.state_count) if closures[q] & fst.accepting)
    removed = sum(1 for t in fst.transitions if t.input is None)
    logger.info(f"Removed {removed} epsilon transitions, {len(transitions)} transitions remain.")
    return Fst(fst.state_count, tuple(transitions), fst.start, accepting)


def is_length_preserving(fst: Fst) -> bool:
    """True iff every transition reads one byte and writes one byte."""
    return all(t.input is not None and t.output is not None for t in fst.transitions)


def machine_symbols(fst: Fst) -> List[int]:
    """Sorted union of every symbol any transition can read."""
    mask = np.zeros(ALPHABET_SIZE, dtype=bool)
    for t in fst.transitions:
        if t.input is not None:
            mask |= t.input.to_mask()
    return np.flatnonzero(mask).tolist()


def split_windows(data: bytes, window_length: int) -> List[bytes]:
    """Consecutive windows of `window_length`; a shorter trailing remainder is kept as its own window."""
    if window_length < 1:
        raise ValueError(f"window length must be >= 1, got {window_length}")
    return [bytes(data[i : i + window_length]) for i in range(0, len(data), window_length)]


__all__ = [
    "ALPHABET_SIZE",
    "EPSILON",
    "SymbolClass",
    "Transition",
    "Fst",
    "Diagnostic",
    "validate",
    "reachable",
    "reachable_states",
    "epsilon_closures",
    "eliminate_epsilon",
    "is_length_preserving",
    "machine_symbols",
    "split_windows",
]
