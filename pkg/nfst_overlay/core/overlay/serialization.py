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
Binary and JSON codecs for `OverlayImage`.

Binary layout (all integers little-endian):

    magic "NFSTOVLY" | u16 version | u16 rows | u16 cols | u8 neighborhood
    m x PE record:     32-byte match bitmap | u8 flags (bit0 start, bit1 report, bit2 occupied)
                       | u8 switch mask (N,NE,E,SE,S,SW,W,NW) | u8 tram byte | u8 tram used
    trailer:           u32 source digest | u32 start state | u8 start accepting | u32 placement count
                       placement count x (u32 pe_id | u32 edge index | u32 replica | u32 src | u32 dst)
    u32 CRC-32 of every preceding byte
"""

import json
import struct
import zlib
from typing import Any, Dict, List

from ..errors import ChecksumMismatch, MalformedImage, TruncatedInput, VersionMismatch
from ..fst.modeling_fst import SymbolClass
from .grid import Direction, GridSpec, Neighborhood
from .modeling_overlay import EdgePlacement, OverlayImage, PeConfig, TransductionRam, check_image

MAGIC = b"NFSTOVLY"
FORMAT_VERSION = 1
MAX_GRID_SIDE = 0xFFFF

_PREAMBLE = struct.Struct("<8sH")
_HEADER = struct.Struct("<8sHHHB")
_PE = struct.Struct("<32sBBBB")
_TRAILER = struct.Struct("<IIBI")
_PLACEMENT = struct.Struct("<IIIII")
_CRC = struct.Struct("<I")

FLAG_START = 0x01
FLAG_REPORT = 0x02
FLAG_OCCUPIED = 0x04


def save_image(image: OverlayImage) -> bytes:
    """
    Serialize `image` into the versioned, checksummed binary format.

    Raises:
        MalformedImage: the grid does not fit the u16 header fields.
    """
    grid = image.grid
    if grid.rows > MAX_GRID_SIDE or grid.cols > MAX_GRID_SIDE:
        raise MalformedImage(f"grid {grid} exceeds the {MAX_GRID_SIDE} rows/cols the header can hold")
    out = bytearray(_HEADER.pack(MAGIC, FORMAT_VERSION, grid.rows, grid.cols, grid.neighborhood.code))
    for pe in image.pes:
        flags = (FLAG_START if pe.is_start else 0) | (FLAG_REPORT if pe.is_report else 0)
        flags |= FLAG_OCCUPIED if pe.occupied else 0
        entry = image.tram.entries[pe.pe_id]
        out += _PE.pack(pe.match.bits, flags, pe.switch_mask, entry or 0, 0 if entry is None else 1)
    out += _TRAILER.pack(
        image.source_fst_digest, image.start_state, int(image.start_accepting), len(image.placements)
    )
    for p in image.placements:
        out += _PLACEMENT.pack(p.pe_id, p.edge_index, p.replica, p.src, p.dst)
    out += _CRC.pack(zlib.crc32(bytes(out)) & 0xFFFFFFFF)
    return bytes(out)


def load_image(payload: bytes) -> OverlayImage:
    """
    Parse a payload written by `save_image`.

    Raises:
        TruncatedInput: the payload ends early.
        VersionMismatch: the format version is not 1.
        ChecksumMismatch: the trailing CRC-32 does not match.
        MalformedImage: bad magic, trailing bytes, or an image invariant does not hold.
    """
    payload = bytes(payload)
    if len(payload) < _PREAMBLE.size:
        raise TruncatedInput(f"payload has {len(payload)} bytes, header needs {_PREAMBLE.size}")
    magic, version = _PREAMBLE.unpack_from(payload, 0)
    if magic != MAGIC:
        raise MalformedImage(f"bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise VersionMismatch(version, FORMAT_VERSION)
    if len(payload) < _HEADER.size:
        raise TruncatedInput(f"payload has {len(payload)} bytes, header needs {_HEADER.size}")
    _, _, rows, cols, code = _HEADER.unpack_from(payload, 0)
    try:
        grid = GridSpec(rows, cols, Neighborhood.from_code(code))
    except ValueError as e:
        raise MalformedImage(str(e)) from e

    trailer_at = _HEADER.size + grid.m * _PE.size
    if len(payload) < trailer_at + _TRAILER.size:
        raise TruncatedInput(f"payload ends inside the PE records of a {rows}x{cols} grid")
    digest, start_state, start_accepting, count = _TRAILER.unpack_from(payload, trailer_at)
    end = trailer_at + _TRAILER.size + count * _PLACEMENT.size
    if len(payload) < end + _CRC.size:
        raise TruncatedInput("payload ends before the checksum")
    if len(payload) > end + _CRC.size:
        raise MalformedImage(f"{len(payload) - end - _CRC.size} trailing bytes after the checksum")
    (stored,) = _CRC.unpack_from(payload, end)
    computed = zlib.crc32(payload[:end]) & 0xFFFFFFFF
    if stored != computed:
        raise ChecksumMismatch(stored, computed)

    pes: List[PeConfig] = []
    entries = []
    for pe_id in range(grid.m):
        bits, flags, mask, tram_byte, used = _PE.unpack_from(payload, _HEADER.size + pe_id * _PE.size)
        if flags & ~(FLAG_START | FLAG_REPORT | FLAG_OCCUPIED) or used > 1:
            raise MalformedImage(f"PE {pe_id}: unknown flag bits")
        pes.append(
            PeConfig(
                pe_id=pe_id,
                match=SymbolClass(bits),
                is_start=bool(flags & FLAG_START),
                is_report=bool(flags & FLAG_REPORT),
                in_switch=PeConfig.directions_from_mask(mask),
                occupied=bool(flags & FLAG_OCCUPIED),
            )
        )
        entries.append(tram_byte if used else None)

    placements = tuple(
        EdgePlacement(*_PLACEMENT.unpack_from(payload, trailer_at + _TRAILER.size + k * _PLACEMENT.size))
        for k in range(count)
    )
    image = OverlayImage(
        grid=grid,
        pes=tuple(pes),
        tram=TransductionRam(tuple(entries)),
        placements=placements,
        start_state=start_state,
        start_accepting=bool(start_accepting),
        source_fst_digest=digest,
    )
    check_image(image)
    return image


# ------------------------------------------------------------------ JSON debug dump


def image_to_dict(image: OverlayImage) -> Dict[str, Any]:
    return {
        "format": MAGIC.decode("ascii"),
        "version": FORMAT_VERSION,
        "grid": {"rows": image.grid.rows, "cols": image.grid.cols, "neighborhood": image.grid.neighborhood.value},
        "start_state": image.start_state,
        "start_accepting": image.start_accepting,
        "source_fst_digest": f"{image.source_fst_digest:08x}",
        "pes": [
            {
                "pe_id": pe.pe_id,
                "occupied": pe.occupied,
                "is_start": pe.is_start,
                "is_report": pe.is_report,
                "in_switch": [d.name for d in sorted(pe.in_switch)],
                "match": [[lo, hi] for lo, hi in pe.match.ranges()],
                "tram": image.tram.entries[pe.pe_id],
            }
            for pe in image.pes
        ],
        "placements": [
            {"pe_id": p.pe_id, "edge_index": p.edge_index, "replica": p.replica, "src": p.src, "dst": p.dst}
            for p in image.placements
        ],
    }


def image_to_json(image: OverlayImage) -> str:
    return json.dumps(image_to_dict(image), indent=2)


def image_from_json(text: str) -> OverlayImage:
    d = json.loads(text)
    if d.get("version") != FORMAT_VERSION:
        raise VersionMismatch(int(d.get("version", -1)), FORMAT_VERSION)
    g = d["grid"]
    grid = GridSpec(int(g["rows"]), int(g["cols"]), Neighborhood(g["neighborhood"]))
    pes = tuple(
        PeConfig(
            pe_id=int(p["pe_id"]),
            match=SymbolClass.from_ranges((lo, hi) for lo, hi in p["match"]),
            is_start=bool(p["is_start"]),
            is_report=bool(p["is_report"]),
            in_switch=frozenset(Direction[name] for name in p["in_switch"]),
            occupied=bool(p["occupied"]),
        )
        for p in d["pes"]
    )
    image = OverlayImage(
        grid=grid,
        pes=pes,
        tram=TransductionRam(tuple(p["tram"] for p in d["pes"])),
        placements=tuple(EdgePlacement(**p) for p in d["placements"]),
        start_state=int(d["start_state"]),
        start_accepting=bool(d["start_accepting"]),
        source_fst_digest=int(d["source_fst_digest"], 16),
    )
    check_image(image)
    return image


__all__ = ["MAGIC", "FORMAT_VERSION", "save_image", "load_image", "image_to_dict", "image_to_json", "image_from_json"]
