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
"""Geometry of the PE array: grid sizes, neighborhoods and switch directions."""

from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Dict, List, Optional, Tuple

import numpy as np
from einops import rearrange


class Neighborhood(str, Enum):
    MOORE8 = "moore8"
    VON_NEUMANN4 = "von_neumann4"

    @property
    def code(self) -> int:
        return 0 if self is Neighborhood.MOORE8 else 1

    @classmethod
    def from_code(cls, code: int) -> "Neighborhood":
        if code == 0:
            return cls.MOORE8
        if code == 1:
            return cls.VON_NEUMANN4
        raise ValueError(f"Unknown neighborhood code: {code}")


class Direction(IntEnum):
    """Switch-mask bit order."""

    N = 0
    NE = 1
    E = 2
    SE = 3
    S = 4
    SW = 5
    W = 6
    NW = 7

    @property
    def offset(self) -> Tuple[int, int]:
        return _OFFSETS[self]

    @property
    def opposite(self) -> "Direction":
        return Direction((self.value + 4) % 8)


_OFFSETS: Dict[Direction, Tuple[int, int]] = {
    Direction.N: (-1, 0),
    Direction.NE: (-1, 1),
    Direction.E: (0, 1),
    Direction.SE: (1, 1),
    Direction.S: (1, 0),
    Direction.SW: (1, -1),
    Direction.W: (0, -1),
    Direction.NW: (-1, -1),
}

_DIRECTIONS = {
    Neighborhood.MOORE8: tuple(Direction),
    Neighborhood.VON_NEUMANN4: (Direction.N, Direction.E, Direction.S, Direction.W),
}


@dataclass(frozen=True)
class GridSpec:
    rows: int
    cols: int
    neighborhood: Neighborhood = Neighborhood.MOORE8

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"Grid dimensions must be positive, got {self.rows}x{self.cols}")
        object.__setattr__(self, "neighborhood", Neighborhood(self.neighborhood))

    @property
    def m(self) -> int:
        return self.rows * self.cols

    @property
    def directions(self) -> Tuple[Direction, ...]:
        return _DIRECTIONS[self.neighborhood]

    def coords(self, pe_id: int) -> Tuple[int, int]:
        return divmod(pe_id, self.cols)

    def pe_at(self, row: int, col: int) -> Optional[int]:
        if 0 <= row < self.rows and 0 <= col < self.cols:
            return row * self.cols + col
        return None

    def neighbor(self, pe_id: int, direction: Direction) -> Optional[int]:
        """PE one step away in `direction`, or None off the edge of the grid."""
        r, c = self.coords(pe_id)
        dr, dc = direction.offset
        return self.pe_at(r + dr, c + dc)

    def neighbors(self, pe_id: int) -> List[Tuple[Direction, int]]:
        out = []
        for d in self.directions:
            q = self.neighbor(pe_id, d)
            if q is not None:
                out.append((d, q))
        return out

    def direction_to(self, pe_id: int, other: int) -> Optional[Direction]:
        """Direction in which `other` lies when it is a neighbor of `pe_id`."""
        r0, c0 = self.coords(pe_id)
        r1, c1 = self.coords(other)
        for d in self.directions:
            if d.offset == (r1 - r0, c1 - c0):
                return d
        return None

    def is_adjacent(self, a: int, b: int) -> bool:
        return self.direction_to(a, b) is not None

    def snake_order(self) -> List[int]:
        """Boustrophedon traversal: even rows left to right, odd rows right to left."""
        cells = rearrange(np.arange(self.m), "(r c) -> r c", r=self.rows).copy()
        cells[1::2] = cells[1::2, ::-1]
        return rearrange(cells, "r c -> (r c)").tolist()

    def __str__(self) -> str:
        return f"{self.rows}x{self.cols} {self.neighborhood.value}"


def parse_grid(text: str, neighborhood: Neighborhood = Neighborhood.MOORE8) -> GridSpec:
    """Parse `RxC` (e.g. `4x4`)."""
    parts = text.strip().lower().split("x")
    if len(parts) != 2 or not all(p.isdigit() for p in parts):
        raise ValueError(f"Expected a grid size like 4x4, got {text!r}")
    return GridSpec(int(parts[0]), int(parts[1]), neighborhood)


__all__ = ["Neighborhood", "Direction", "GridSpec", "parse_grid"]
