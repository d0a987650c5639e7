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
from transformers.configuration_utils import PretrainedConfig
from transformers.utils import logging

from .grid import GridSpec, Neighborhood

logger = logging.get_logger(__name__)

POLICIES = ("all", "first")


class EngineConfig(PretrainedConfig):
    r"""
    This is the configuration class to store the simulator settings used by [`OverlayEngine`] and
    [`run_stream`].

    Args:
        fifo_capacity (`int`, *optional*, defaults to 4):
            Number of activation vectors the FIFO between the engine and the transduction RAM can hold.
        window_length (`int`, *optional*, defaults to 8):
            Sub-sequence length `n` the input stream is split into.
        policy (`str`, *optional*, defaults to `"all"`):
            `"all"` keeps every output of a matched window, `"first"` keeps only the lexicographically
            smallest one.
        max_workers (`int`, *optional*, defaults to 1):
            Number of windows simulated in parallel. Results are always re-sequenced into stream order.
    """

    model_type = "nfst_overlay_engine"

    def __init__(
        self,
        fifo_capacity=4,
        window_length=8,
        policy="all",
        max_workers=1,
        **kwargs,
    ):
        super().__init__(**kwargs)
        if int(fifo_capacity) < 1:
            raise ValueError(f"fifo_capacity must be positive, got {fifo_capacity}")
        if int(window_length) < 1:
            raise ValueError(f"window_length must be >= 1, got {window_length}")
        if policy not in POLICIES:
            raise ValueError(f"Unsupported policy: {policy}. Use one of {list(POLICIES)}.")
        if int(max_workers) < 1:
            raise ValueError(f"max_workers must be positive, got {max_workers}")

        self.fifo_capacity = int(fifo_capacity)
        self.window_length = int(window_length)
        self.policy = policy
        self.max_workers = int(max_workers)


class OverlayConfig(PretrainedConfig):
    r"""
    This is the configuration class to store the configuration of an [`OverlayTransducer`]: the PE grid the
    compiler places edges onto and the simulator settings it runs with.

    Args:
        rows (`int`, *optional*, defaults to 4):
            Number of PE rows.
        cols (`int`, *optional*, defaults to 4):
            Number of PE columns. `rows * cols` is the PE count `m`.
        neighborhood (`str`, *optional*, defaults to `"moore8"`):
            Which grid neighbors a PE can be switched to: `"moore8"` or `"von_neumann4"`.
        replication_budget (`int`, *optional*, defaults to 4):
            Maximum number of PE instances a single edge may be replicated onto before placement gives up
            with `AdjacencyUnsatisfiable`.
        engine_config (`dict` or [`EngineConfig`], *optional*):
            Simulator settings.
    """

    model_type = "nfst_overlay"
    sub_configs = {"engine_config": EngineConfig}

    def __init__(
        self,
        rows=4,
        cols=4,
        neighborhood="moore8",
        replication_budget=4,
        engine_config=None,
        **kwargs,
    ):
        super().__init__(**kwargs)
        if int(rows) < 1 or int(cols) < 1:
            raise ValueError(f"Grid dimensions must be positive, got {rows}x{cols}")
        if neighborhood not in {n.value for n in Neighborhood}:
            raise ValueError(f"Unsupported neighborhood: {neighborhood}. Use moore8/von_neumann4.")
        if int(replication_budget) < 1:
            raise ValueError(f"replication_budget must be positive, got {replication_budget}")

        self.rows = int(rows)
        self.cols = int(cols)
        self.neighborhood = neighborhood
        self.replication_budget = int(replication_budget)

        if engine_config is None:
            engine_config = {}
            logger.info("engine_config is None. Initializing the engine with default values")
        if isinstance(engine_config, EngineConfig):
            self.engine_config = engine_config
        else:
            self.engine_config = EngineConfig(**engine_config)

    @property
    def grid(self) -> GridSpec:
        return GridSpec(self.rows, self.cols, Neighborhood(self.neighborhood))


__all__ = ["OverlayConfig", "EngineConfig", "POLICIES"]
