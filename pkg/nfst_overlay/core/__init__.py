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
from .engine.modeling_engine import EngineState, Fifo, OverlayEngine, SubSequenceResult, cycle_model
from .engine.stream import StreamResult, run_stream
from .fst.modeling_fst import Fst, SymbolClass, Transition, eliminate_epsilon, reachable, validate
from .fst.oracle_fst import OracleResult, Outcome, oracle_stream, oracle_window
from .fst.parsing_fst import format_ruleset, parse_ruleset
from .overlay.configuration_overlay import EngineConfig, OverlayConfig
from .overlay.grid import GridSpec, Neighborhood
from .overlay.modeling_overlay import OverlayImage, compile_fst, decompile
from .overlay.serialization import load_image, save_image
from .resources.modeling_resources import ResourceReport, estimate, scaling_sweep

__all__ = [
    "EngineState",
    "Fifo",
    "OverlayEngine",
    "SubSequenceResult",
    "cycle_model",
    "StreamResult",
    "run_stream",
    "Fst",
    "SymbolClass",
    "Transition",
    "eliminate_epsilon",
    "reachable",
    "validate",
    "OracleResult",
    "Outcome",
    "oracle_stream",
    "oracle_window",
    "format_ruleset",
    "parse_ruleset",
    "EngineConfig",
    "OverlayConfig",
    "GridSpec",
    "Neighborhood",
    "OverlayImage",
    "compile_fst",
    "decompile",
    "load_image",
    "save_image",
    "ResourceReport",
    "estimate",
    "scaling_sweep",
]
