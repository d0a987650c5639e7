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
Bit-count proxies for the memories of a PE array.

Per PE: a 256x1-bit match RAM and one output byte of transduction RAM. Per array: an activation
vector of m^2 entries, each wide enough to hold a PE id, and a FIFO of `fifo_capacity` such vectors.
"""

import csv
import io
from dataclasses import asdict, dataclass, fields
from typing import Iterable, List, Sequence

from ..overlay.grid import GridSpec
from ..overlay.modeling_overlay import OverlayImage

MATCH_RAM_BITS_PER_PE = 256
TRAM_BITS_PER_PE = 8


def pe_id_width(m: int) -> int:
    """ceil(log2(max(m, 2))), computed on integers."""
    return (max(m, 2) - 1).bit_length()


@dataclass(frozen=True)
class ResourceReport:
    m: int
    occupied: int
    match_ram_bits: int
    tram_bits: int
    vector_bits: int
    fifo_bits: int
    total_bits: int


def estimate_grid(grid: GridSpec, fifo_capacity: int = 4, occupied: int = 0) -> ResourceReport:
    if fifo_capacity < 1:
        raise ValueError(f"fifo_capacity must be positive, got {fifo_capacity}")
    m = grid.m
    match_ram_bits = MATCH_RAM_BITS_PER_PE * m
    tram_bits = TRAM_BITS_PER_PE * m
    vector_bits = m * m * pe_id_width(m)
    fifo_bits = fifo_capacity * vector_bits
    return ResourceReport(
        m=m,
        occupied=occupied,
        match_ram_bits=match_ram_bits,
        tram_bits=tram_bits,
        vector_bits=vector_bits,
        fifo_bits=fifo_bits,
        total_bits=match_ram_bits + tram_bits + vector_bits + fifo_bits,
    )


def estimate(image: OverlayImage, fifo_capacity: int = 4) -> ResourceReport:
    """
    Memory bits an image needs on its grid. Every PE is provisioned whether occupied or not, so
    only `occupied` depends on the compiled machine.
    """
    return estimate_grid(image.grid, fifo_capacity, occupied=len(image.occupied))


def scaling_sweep(sizes: Sequence[GridSpec], fifo_capacity: int = 4) -> List[ResourceReport]:
    """One report per grid size, in the order given."""
    if not sizes:
        raise ValueError("scaling_sweep needs at least one grid size")
    return [estimate_grid(grid, fifo_capacity) for grid in sizes]


CSV_COLUMNS = [f.name for f in fields(ResourceReport)]


def to_csv(reports: Iterable[ResourceReport]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for report in reports:
        writer.writerow(asdict(report))
    return buffer.getvalue()


__all__ = ["ResourceReport", "CSV_COLUMNS", "pe_id_width", "estimate", "estimate_grid", "scaling_sweep", "to_csv"]
