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
Compiled overlay images: one PE per edge instance, each with a 256x1-bit match RAM, start/report
flags, an incoming switch mask, and a slot in the transduction RAM.
"""

import zlib
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Tuple

from transformers.utils import logging

from ..errors import MalformedImage
from ..fst.modeling_fst import Fst, SymbolClass, Transition
from ..fst.parsing_fst import format_ruleset
from .grid import Direction, GridSpec
from .placement import EdgeInstance, place

logger = logging.get_logger(__name__)


@dataclass(frozen=True)
class PeConfig:
    pe_id: int
    match: SymbolClass = field(default_factory=SymbolClass)
    is_start: bool = False
    is_report: bool = False
    # directions of the neighbors allowed to enable this PE
    in_switch: FrozenSet[Direction] = frozenset()
    occupied: bool = False

    @property
    def switch_mask(self) -> int:
        mask = 0
        for d in self.in_switch:
            mask |= 1 << int(d)
        return mask

    @staticmethod
    def directions_from_mask(mask: int) -> FrozenSet[Direction]:
        return frozenset(d for d in Direction if mask & (1 << int(d)))


@dataclass(frozen=True)
class TransductionRam:
    # one output byte per PE, None where unused
    entries: Tuple[Optional[int], ...]

    def __len__(self) -> int:
        return len(self.entries)

    def is_used(self, pe_id: int) -> bool:
        return self.entries[pe_id] is not None


@dataclass(frozen=True)
class EdgePlacement:
    pe_id: int
    edge_index: int
    replica: int
    src: int
    dst: int


@dataclass(frozen=True)
class CompileSummary:
    m: int
    occupied: int
    edges: int

    @property
    def replications(self) -> int:
        return self.occupied - self.edges

    def __str__(self) -> str:
        return f"{self.occupied} PEs occupied, {self.replications} replications"


@dataclass(frozen=True)
class OverlayImage:
    grid: GridSpec
    pes: Tuple[PeConfig, ...]
    tram: TransductionRam
    placements: Tuple[EdgePlacement, ...] = ()
    start_state: int = 0
    start_accepting: bool = False
    source_fst_digest: int = 0

    @property
    def m(self) -> int:
        return self.grid.m

    @property
    def edge_map(self) -> Dict[EdgeInstance, int]:
        return {(p.edge_index, p.replica): p.pe_id for p in self.placements}

    @property
    def occupied(self) -> List[int]:
        return [pe.pe_id for pe in self.pes if pe.occupied]

    def summary(self) -> CompileSummary:
        return CompileSummary(
            m=self.m,
            occupied=len(self.occupied),
            edges=len({p.edge_index for p in self.placements}),
        )

    def predecessors(self, pe_id: int) -> List[int]:
        """PEs that may enable `pe_id`, in switch-direction order."""
        out = []
        for d in sorted(self.pes[pe_id].in_switch):
            q = self.grid.neighbor(pe_id, d)
            if q is not None:
                out.append(q)
        return out

    @classmethod
    def empty(cls, grid: GridSpec) -> "OverlayImage":
        return cls(
            grid=grid,
            pes=tuple(PeConfig(pe_id=i) for i in range(grid.m)),
            tram=TransductionRam((None,) * grid.m),
        )


def fst_digest(fst: Fst) -> int:
    """CRC-32 of the canonical ruleset text of `fst`."""
    return zlib.crc32(format_ruleset(fst).encode("utf-8")) & 0xFFFFFFFF


def compile_fst(fst: Fst, grid: GridSpec, replication_budget: int = 4) -> OverlayImage:
    """
    Compile `fst` onto a PE array.

    Each edge instance from `place` becomes one occupied PE. A PE's incoming switch enables every
    grid neighbor that hosts an edge ending in the state this PE's edge starts from.

    Args:
        fst (`Fst`):
            Validated, epsilon-free, length-preserving machine.
        grid (`GridSpec`):
            Target PE array.
        replication_budget (`int`, *optional*, defaults to 4):
            Maximum number of instances per edge.

    Returns:
        OverlayImage:
            Deterministic for identical inputs.

    Raises:
        EpsilonPresent, NotLengthPreserving, CapacityExceeded, AdjacencyUnsatisfiable
    """
    edge_map = place(fst, grid, replication_budget)
    hosted: Dict[int, Tuple[int, int]] = {pe: inst for inst, pe in edge_map.items()}

    pes: List[PeConfig] = []
    tram: List[Optional[int]] = []
    for pe_id in range(grid.m):
        if pe_id not in hosted:
            pes.append(PeConfig(pe_id=pe_id))
            tram.append(None)
            continue
        t = fst.transitions[hosted[pe_id][0]]
        in_switch = frozenset(
            d for d, q in grid.neighbors(pe_id) if q in hosted and fst.transitions[hosted[q][0]].dst == t.src
        )
        pes.append(
            PeConfig(
                pe_id=pe_id,
                match=t.input,
                is_start=t.src == fst.start,
                is_report=t.dst in fst.accepting,
                in_switch=in_switch,
                occupied=True,
            )
        )
        tram.append(t.output)

    placements = tuple(
        EdgePlacement(pe, edge, replica, fst.transitions[edge].src, fst.transitions[edge].dst)
        for pe, (edge, replica) in sorted(hosted.items())
    )
    image = OverlayImage(
        grid=grid,
        pes=tuple(pes),
        tram=TransductionRam(tuple(tram)),
        placements=placements,
        start_state=fst.start,
        start_accepting=fst.start in fst.accepting,
        source_fst_digest=fst_digest(fst),
    )
    logger.info(f"Compiled onto {grid}: {image.summary()}.")
    return image


def _edge_of(image: OverlayImage) -> Dict[int, EdgePlacement]:
    by_pe: Dict[int, EdgePlacement] = {}
    for p in image.placements:
        if p.pe_id in by_pe:
            raise MalformedImage(f"PE {p.pe_id} hosts more than one edge instance")
        if not 0 <= p.pe_id < image.m:
            raise MalformedImage(f"placement references PE {p.pe_id} outside the grid")
        by_pe[p.pe_id] = p
    occupied = set(image.occupied)
    if occupied != set(by_pe):
        raise MalformedImage(
            f"occupied PEs {sorted(occupied ^ set(by_pe))} do not match the edge map one-to-one"
        )
    return by_pe


def check_image(image: OverlayImage) -> None:
    """
    Raise `MalformedImage` unless `image` satisfies the OverlayImage invariants.
    """
    grid = image.grid
    if len(image.pes) != grid.m or len(image.tram) != grid.m:
        raise MalformedImage(f"expected {grid.m} PE records and tram entries")
    for i, pe in enumerate(image.pes):
        if pe.pe_id != i:
            raise MalformedImage(f"PE record {i} carries id {pe.pe_id}")
    by_pe = _edge_of(image)
    accepting = {p.dst for p in image.placements if image.pes[p.pe_id].is_report}
    if image.start_accepting:
        accepting.add(image.start_state)

    for pe_id, p in by_pe.items():
        pe = image.pes[pe_id]
        if not image.tram.is_used(pe_id):
            raise MalformedImage(f"PE {pe_id} is occupied but its tram entry is unused")
        if pe.match.is_empty():
            raise MalformedImage(f"PE {pe_id} is occupied but matches no symbol")
        if pe.is_start != (p.src == image.start_state):
            raise MalformedImage(f"PE {pe_id}: start flag disagrees with edge {p.edge_index}")
        if pe.is_report != (p.dst in accepting):
            raise MalformedImage(f"PE {pe_id}: report flag disagrees with edge {p.edge_index}")
        for d in pe.in_switch:
            if d not in grid.directions:
                raise MalformedImage(f"PE {pe_id}: switch direction {d.name} not in {grid.neighborhood.value}")
            q = grid.neighbor(pe_id, d)
            if q is None:
                raise MalformedImage(f"PE {pe_id}: switch direction {d.name} points off the grid")
            if q not in by_pe:
                raise MalformedImage(f"PE {pe_id}: switch {d.name} names unoccupied PE {q}")
            if by_pe[q].dst != p.src:
                raise MalformedImage(f"PE {pe_id}: switch {d.name} joins non-consecutive edges")

    for pe_id, pe in enumerate(image.pes):
        if pe_id in by_pe:
            continue
        if pe.is_start or pe.is_report or pe.in_switch or not pe.match.is_empty() or image.tram.is_used(pe_id):
            raise MalformedImage(f"PE {pe_id} is unoccupied but configured")

    # every instance must reach an instance of every edge leaving its destination
    edges_from: Dict[int, set] = {}
    for p in image.placements:
        edges_from.setdefault(p.src, set()).add(p.edge_index)
    enabled_by: Dict[int, set] = {}
    for pe_id, p in by_pe.items():
        for q in image.predecessors(pe_id):
            enabled_by.setdefault(q, set()).add(p.edge_index)
    for pe_id, p in by_pe.items():
        missing = edges_from.get(p.dst, set()) - enabled_by.get(pe_id, set())
        if missing:
            raise MalformedImage(f"PE {pe_id} (edge {p.edge_index}) is not switched to edges {sorted(missing)}")


def decompile(image: OverlayImage) -> Fst:
    """
    Rebuild the machine an image was compiled from, merging replicated edges.

    States are renumbered densely in increasing order of their original ids, which makes
    `decompile(compile_fst(f, g)) == reachable(f)`.

    Raises:
        MalformedImage: an image invariant does not hold.
    """
    check_image(image)

    edges: Dict[int, Transition] = {}
    reports = set()
    for p in image.placements:
        pe = image.pes[p.pe_id]
        t = Transition(p.src, p.dst, pe.match, image.tram.entries[p.pe_id])
        if edges.setdefault(p.edge_index, t) != t:
            raise MalformedImage(f"replicas of edge {p.edge_index} disagree")
        if pe.is_report:
            reports.add(p.dst)

    states = sorted({image.start_state} | {t.src for t in edges.values()} | {t.dst for t in edges.values()})
    renumber = {old: new for new, old in enumerate(states)}
    accepting = {renumber[q] for q in reports}
    if image.start_accepting:
        accepting.add(renumber[image.start_state])

    transitions = tuple(
        Transition(renumber[t.src], renumber[t.dst], t.input, t.output) for _, t in sorted(edges.items())
    )
    return Fst(len(states), transitions, renumber[image.start_state], frozenset(accepting))


__all__ = [
    "PeConfig",
    "TransductionRam",
    "EdgePlacement",
    "CompileSummary",
    "OverlayImage",
    "fst_digest",
    "compile_fst",
    "check_image",
    "decompile",
]
