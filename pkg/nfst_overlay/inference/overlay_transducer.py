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
import os
from typing import Any, Dict, List, Optional, Union

from transformers.utils import logging

from ..core.engine.modeling_engine import OverlayEngine
from ..core.engine.stream import StreamResult, run_stream
from ..core.errors import MalformedImage, ValidationError
from ..core.fst.modeling_fst import Fst, eliminate_epsilon, validate
from ..core.fst.parsing_fst import parse_ruleset
from ..core.overlay.configuration_overlay import EngineConfig, OverlayConfig
from ..core.overlay.modeling_overlay import OverlayImage, compile_fst, decompile
from ..core.overlay.serialization import load_image, save_image
from ..core.resources.modeling_resources import ResourceReport, estimate

logger = logging.get_logger(__name__)

IMAGE_NAME = "overlay.bin"


def _engine_fields(config: EngineConfig) -> Dict[str, Any]:
    return {
        "fifo_capacity": config.fifo_capacity,
        "window_length": config.window_length,
        "policy": config.policy,
        "max_workers": config.max_workers,
    }


class OverlayTransducer:
    """
    A compiled transducer together with the settings it is run with, loadable and savable in
    HuggingFace `from_pretrained` / `save_pretrained` style.

    - from_ruleset(): parse, validate, remove epsilon transitions and compile a ruleset.
    - from_pretrained(): load `config.json` and `overlay.bin` from a directory.
    - run(): stream bytes through the simulated PE array.

    Notes:
    - The engine is built lazily and shared by every `run` call; each window gets its own state.
    """

    def __init__(self, image: OverlayImage, config: Optional[OverlayConfig] = None, fst: Optional[Fst] = None):
        if config is None:
            config = OverlayConfig(
                rows=image.grid.rows, cols=image.grid.cols, neighborhood=image.grid.neighborhood.value
            )
        self.config = config
        if self.config.grid != image.grid:
            raise MalformedImage(f"image grid {image.grid} does not match the configured grid {self.config.grid}")
        self.image = image
        self.fst = fst
        self._engine: Optional[OverlayEngine] = None

    @classmethod
    def from_fst(cls, fst: Fst, config: Optional[OverlayConfig] = None) -> "OverlayTransducer":
        config = config if config is not None else OverlayConfig()
        diagnostics = validate(fst)
        errors = [d for d in diagnostics if d.is_error]
        if errors:
            raise ValidationError(errors)
        for d in diagnostics:
            logger.warning(str(d))
        if fst.has_epsilon_input():
            fst = eliminate_epsilon(fst)
            logger.info(f"Removed epsilon-input transitions: {len(fst.transitions)} transitions remain.")
        image = compile_fst(fst, config.grid, config.replication_budget)
        return cls(image, config, fst)

    @classmethod
    def from_ruleset(cls, ruleset: str, config: Optional[OverlayConfig] = None) -> "OverlayTransducer":
        """
        Compile ruleset text.

        Args:
            ruleset (str):
                Ruleset text.
            config (OverlayConfig, *optional*):
                Grid and engine settings; defaults to a 4x4 Moore grid.

        Returns:
            OverlayTransducer:
                Compiled instance; `fst` holds the epsilon-free machine that was placed.
        """
        return cls.from_fst(parse_ruleset(ruleset), config)

    @classmethod
    def from_ruleset_file(cls, path: str, config: Optional[OverlayConfig] = None) -> "OverlayTransducer":
        with open(path, "r", encoding="utf-8") as f:
            return cls.from_ruleset(f.read(), config)

    @classmethod
    def from_pretrained(cls, pretrained_path: str, **kwargs) -> "OverlayTransducer":
        """
        Load a directory written by `save_pretrained`.

        Args:
            pretrained_path (str):
                Local directory holding `config.json` and `overlay.bin`.
            **kwargs (Any):
                Forwarded to `OverlayConfig.from_pretrained(...)`, e.g. to override engine settings.
        """
        config = OverlayConfig.from_pretrained(pretrained_path, **kwargs)
        with open(os.path.join(pretrained_path, IMAGE_NAME), "rb") as f:
            image = load_image(f.read())
        return cls(image, config)

    @classmethod
    def from_image_file(cls, path: str, config: Optional[OverlayConfig] = None) -> "OverlayTransducer":
        with open(path, "rb") as f:
            image = load_image(f.read())
        if config is not None and config.grid != image.grid:
            config = OverlayConfig(
                rows=image.grid.rows,
                cols=image.grid.cols,
                neighborhood=image.grid.neighborhood.value,
                replication_budget=config.replication_budget,
                engine_config=config.engine_config,
            )
        return cls(image, config)

    @classmethod
    def load(cls, path: str, config: Optional[OverlayConfig] = None, **engine_overrides) -> "OverlayTransducer":
        """
        Load either a `save_pretrained` directory or a bare image file.

        Args:
            path (str):
                Directory written by `save_pretrained`, or an image file.
            config (OverlayConfig, *optional*):
                Settings for a bare image file. A directory brings its own `config.json`.
            **engine_overrides (Any):
                `EngineConfig` fields (e.g. `fifo_capacity`, `max_workers`) replacing the loaded ones.
        """
        if os.path.isdir(path):
            transducer = cls.from_pretrained(path)
        else:
            transducer = cls.from_image_file(path, config)
        if engine_overrides:
            transducer.config.engine_config = EngineConfig(
                **{**_engine_fields(transducer.config.engine_config), **engine_overrides}
            )
            transducer._engine = None
        return transducer

    def save_pretrained(self, save_directory: str) -> None:
        os.makedirs(save_directory, exist_ok=True)
        self.config.save_pretrained(save_directory)
        with open(os.path.join(save_directory, IMAGE_NAME), "wb") as f:
            f.write(save_image(self.image))
        logger.info(f"Saved overlay ({self.image.summary()}) to {save_directory}")

    @property
    def engine(self) -> OverlayEngine:
        if self._engine is None:
            self._engine = OverlayEngine(self.image, self.config.engine_config.fifo_capacity)
        return self._engine

    def run(
        self,
        data: Union[bytes, bytearray, str],
        window_length: Optional[int] = None,
        policy: Optional[str] = None,
        max_workers: Optional[int] = None,
        trace: Optional[List[str]] = None,
    ) -> StreamResult:
        """
        Transduce a byte stream window by window. Unset arguments fall back to `config.engine_config`.
        A `str` is encoded as UTF-8.
        """
        if isinstance(data, str):
            data = data.encode("utf-8")
        ec = self.config.engine_config
        return run_stream(
            self.image,
            bytes(data),
            window_length if window_length is not None else ec.window_length,
            policy=policy if policy is not None else ec.policy,
            max_workers=max_workers if max_workers is not None else ec.max_workers,
            fifo_capacity=ec.fifo_capacity,
            trace=trace,
            engine=self.engine,
        )

    def estimate_resources(self) -> ResourceReport:
        return estimate(self.image, self.config.engine_config.fifo_capacity)

    def decompile(self) -> Fst:
        return decompile(self.image)


__all__ = ["OverlayTransducer", "IMAGE_NAME"]
