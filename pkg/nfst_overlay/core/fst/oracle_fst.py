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
Reference interpreter: the behaviour every compiled overlay is checked against.
"""

from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Set, Tuple

from .modeling_fst import Fst, epsilon_closures, split_windows


class Outcome(str, Enum):
    MATCHED = "matched"
    DISCARDED = "discarded"


@dataclass(frozen=True)
class OracleResult:
    window_index: int
    outcome: Outcome
    # sorted, duplicate-free; empty when discarded
    outputs: Tuple[bytes, ...] = ()

    @property
    def matched(self) -> bool:
        return self.outcome is Outcome.MATCHED


def oracle_window(fst: Fst, window: bytes, window_index: int = 0) -> OracleResult:
    """
    Run every non-deterministic path of exactly `len(window)` symbol steps from the start state.

    Epsilon transitions are followed through closures and contribute no output. The window
    matches iff some path ends in an accepting state; `outputs` collects the concatenated
    output labels of all accepting paths in lexicographic byte order.
    """
    closures = epsilon_closures(fst)
    out_edges = fst.out_edges()

    # state -> output strings of the paths currently ending there
    current: Dict[int, Set[bytes]] = {q: {b""} for q in closures[fst.start]}
    for symbol in window:
        nxt: Dict[int, Set[bytes]] = defaultdict(set)
        for q, prefixes in current.items():
            for i in out_edges.get(q, ()):
                t = fst.transitions[i]
                if t.input is None or symbol not in t.input:
                    continue
                emitted = t.output_bytes()
                extended = {p + emitted for p in prefixes}
                for r in closures[t.dst]:
                    nxt[r] |= extended
        current = nxt
        if not current:
            break

    outputs: Set[bytes] = set()
    for q in fst.accepting:
        outputs |= current.get(q, set())
    if not any(q in current for q in fst.accepting):
        return OracleResult(window_index, Outcome.DISCARDED)
    return OracleResult(window_index, Outcome.MATCHED, tuple(sorted(outputs)))


def oracle_stream(fst: Fst, data: bytes, window_length: int) -> List[OracleResult]:
    """Evaluate each window of `data` independently from the start state, in stream order."""
    return [oracle_window(fst, w, i) for i, w in enumerate(split_windows(data, window_length))]


__all__ = ["Outcome", "OracleResult", "oracle_window", "oracle_stream"]
