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
Edge placement onto the PE grid.

PEs only talk to their immediate neighbors, so every instance of an edge `a -> b` must sit next
to some instance of every edge leaving `b`. Placement walks the machine breadth-first from each
start edge in turn; when a successor edge has no instance next to the current one, a new instance
(a replica) is put on a free neighbor cell.
"""

from collections import deque
from typing import Deque, Dict, List, Optional, Tuple

from transformers.utils import logging

from ..errors import AdjacencyUnsatisfiable, CapacityExceeded, EpsilonPresent, NotLengthPreserving
from ..fst.modeling_fst import Fst, is_length_preserving, reachable_states
from .grid import GridSpec

logger = logging.get_logger(__name__)

EdgeInstance = Tuple[int, int]  # (edge index, replica number)


def check_compilable(fst: Fst) -> None:
    if fst.has_epsilon_input():
        raise EpsilonPresent("epsilon-input transitions must be eliminated before compiling")
    if not is_length_preserving(fst):
        bad = [i for i, t in enumerate(fst.transitions) if t.output is None]
        raise NotLengthPreserving(f"transitions {bad} emit epsilon; the overlay needs one output byte per input byte")


class _Placer:
    def __init__(self, fst: Fst, grid: GridSpec, replication_budget: int):
        self.fst = fst
        self.grid = grid
        self.budget = replication_budget

        reach = reachable_states(fst)
        self.edges = [i for i, t in enumerate(fst.transitions) if t.src in reach]
        by_src: Dict[int, List[int]] = {}
        for i in self.edges:
            by_src.setdefault(fst.transitions[i].src, []).append(i)
        self.successors = {i: by_src.get(fst.transitions[i].dst, []) for i in self.edges}
        self.predecessors: Dict[int, List[int]] = {i: [] for i in self.edges}
        for i in self.edges:
            for j in self.successors[i]:
                self.predecessors[j].append(i)

        self.rank = {pe: k for k, pe in enumerate(grid.snake_order())}
        self.occupant: Dict[int, int] = {}
        self.instances: Dict[int, List[int]] = {i: [] for i in self.edges}
        self.edge_map: Dict[EdgeInstance, int] = {}
        self.queue: Deque[Tuple[int, int]] = deque()
        self.failures: List[Tuple[int, int]] = []

    def _has_adjacent_instance(self, edge: int, pe: int) -> bool:
        return any(self.grid.is_adjacent(pe, q) for q in self.instances[edge])

    def _score(self, edge: int, cell: int) -> int:
        # predecessor instances this cell would serve + successor edges already reachable from it
        score = 0
        for p in self.predecessors[edge]:
            for q in self.instances[p]:
                if self.grid.is_adjacent(cell, q) and not self._has_adjacent_instance(edge, q):
                    score += 1
        for s in self.successors[edge]:
            if self._has_adjacent_instance(s, cell):
                score += 1
        return score

    def _choose(self, edge: int, candidates: List[int]) -> Optional[int]:
        if not candidates:
            return None
        return min(candidates, key=lambda cell: (-self._score(edge, cell), self.rank[cell]))

    def _add(self, edge: int, cell: int) -> None:
        replica = len(self.instances[edge])
        self.instances[edge].append(cell)
        self.occupant[cell] = edge
        self.edge_map[(edge, replica)] = cell
        self.queue.append((edge, cell))
        if replica:
            logger.info(f"Replicated edge {edge} onto PE {cell} (instance {replica + 1}).")

    def _require_capacity(self) -> None:
        if len(self.occupant) >= self.grid.m:
            raise CapacityExceeded(len(self.occupant) + 1, self.grid.m)

    def _seed(self, edge: int) -> None:
        self._require_capacity()
        free = [pe for pe in self.rank if pe not in self.occupant]
        self._add(edge, self._choose(edge, free))

    def _expand(self, edge: int, cell: int) -> None:
        for succ in self.successors[edge]:
            if self._has_adjacent_instance(succ, cell):
                continue
            if len(self.instances[succ]) >= self.budget:
                self.failures.append((edge, succ))
                continue
            self._require_capacity()
            free = [q for _, q in self.grid.neighbors(cell) if q not in self.occupant]
            target = self._choose(succ, free)
            if target is None:
                self.failures.append((edge, succ))
                continue
            self._add(succ, target)

    def run(self) -> Dict[EdgeInstance, int]:
        if len(self.edges) > self.grid.m:
            raise CapacityExceeded(len(self.edges), self.grid.m)
        seeds = sorted((i for i in self.edges if self.fst.transitions[i].src == self.fst.start),
                       key=lambda i: (self.fst.transitions[i].src, i))
        for seed in seeds:
            if not self.instances[seed]:
                self._seed(seed)
            while self.queue:
                self._expand(*self.queue.popleft())
        if self.failures:
            raise AdjacencyUnsatisfiable(self.failures)
        return dict(sorted(self.edge_map.items()))


def place(fst: Fst, grid: GridSpec, replication_budget: int = 4) -> Dict[EdgeInstance, int]:
    """
    Assign every reachable edge of `fst` to one or more PEs of `grid`.

    Args:
        fst (`Fst`):
            Validated, epsilon-free, length-preserving machine.
        grid (`GridSpec`):
            Target PE array.
        replication_budget (`int`, *optional*, defaults to 4):
            Maximum number of instances per edge.

    Returns:
        Dict[Tuple[int, int], int]:
            `(edge index, replica) -> pe_id`. Identical inputs always give the identical map.

    Raises:
        EpsilonPresent, NotLengthPreserving, CapacityExceeded, AdjacencyUnsatisfiable
    """
    check_compilable(fst)
    return _Placer(fst, grid, replication_budget).run()


__all__ = ["EdgeInstance", "place", "check_compilable"]
