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
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Tuple

from transformers.utils import logging

from ..errors import EngineError
from ..fst.modeling_fst import split_windows
from ..overlay.configuration_overlay import POLICIES
from ..overlay.modeling_overlay import OverlayImage
from .modeling_engine import Fifo, OverlayEngine, SubSequenceResult

logger = logging.get_logger(__name__)


@dataclass(frozen=True)
class StreamResult:
    results: Tuple[SubSequenceResult, ...]
    total_cycles: int
    window_length: int
    m: int

    @property
    def matched(self) -> List[SubSequenceResult]:
        return [r for r in self.results if r.matched]


def run_stream(
    image: OverlayImage,
    data: bytes,
    window_length: int,
    policy: str = "all",
    max_workers: int = 1,
    fifo_capacity: int = 4,
    trace: Optional[List[str]] = None,
    engine: Optional[OverlayEngine] = None,
) -> StreamResult:
    """
    Split `data` into windows of `window_length` (a shorter remainder becomes the last window) and
    simulate each one independently from a freshly reset engine state.

    Args:
        image (`OverlayImage`):
            Compiled overlay.
        data (`bytes`):
            Raw input stream.
        window_length (`int`):
            Sub-sequence length `n`, at least 1.
        policy (`str`, *optional*, defaults to `"all"`):
            `"all"` keeps every output of a matched window, `"first"` only the smallest.
        max_workers (`int`, *optional*, defaults to 1):
            Windows simulated concurrently, each on its own `EngineState` and FIFO.
        trace (`List[str]`, *optional*):
            When given, receives one line per transition step, in window order.
        engine (`OverlayEngine`, *optional*):
            Prebuilt engine for `image`; its FIFO capacity then replaces `fifo_capacity`.

    Returns:
        StreamResult:
            Per-window results in stream order and the summed cycle count.
    """
    if policy not in POLICIES:
        raise ValueError(f"Unsupported policy: {policy}. Use one of {list(POLICIES)}.")
    if engine is not None and engine.image is not image:
        raise ValueError("engine was built from a different image")
    windows = split_windows(data, window_length)
    engine = engine or OverlayEngine(image, fifo_capacity)

    def simulate(item: Tuple[int, bytes]) -> Tuple[SubSequenceResult, List[str]]:
        index, window = item
        lines: List[str] = []
        try:
            result, _ = engine.run_subsequence(
                engine.reset(), window, index, fifo=Fifo(engine.fifo_capacity), trace=lines if trace is not None else None
            )
        except EngineError as e:
            raise e.at_window(index) from e
        return (result.first() if policy == "first" else result), lines

    if max_workers > 1 and len(windows) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            simulated = list(pool.map(simulate, enumerate(windows)))
    else:
        simulated = [simulate(item) for item in enumerate(windows)]

    results = tuple(r for r, _ in simulated)
    if trace is not None:
        for _, lines in simulated:
            trace.extend(lines)
    total = sum(r.cycles for r in results)
    logger.info(
        f"Streamed {len(data)} bytes in {len(windows)} windows of {window_length}: "
        f"{sum(r.matched for r in results)} matched, {total} cycles."
    )
    return StreamResult(results, total, window_length, image.m)


__all__ = ["StreamResult", "run_stream"]
