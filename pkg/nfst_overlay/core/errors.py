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
Exception hierarchy shared by the ruleset parser, the overlay compiler, the image codec and the engine.

Every class derives from `ValueError` through `NfstError`, so callers that only care about
"bad input" can keep catching `ValueError`.
"""

from typing import List, Optional, Sequence, Tuple


class NfstError(ValueError):
    """Base class of every domain error raised by nfst_overlay."""


# ---------------------------------------------------------------- ruleset


class RulesetError(NfstError):
    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        self.reason = message
        if line is not None:
            where = f"line {line}" if column is None else f"line {line}, column {column}"
            message = f"{where}: {message}"
        super().__init__(message)


class RulesetSyntaxError(RulesetError):
    pass


class RulesetSemanticError(RulesetError):
    pass


# ---------------------------------------------------------------- fst


class UnsupportedEpsilonOutput(NfstError):
    """An epsilon-input transition carries a byte output."""


class ValidationError(NfstError):
    def __init__(self, diagnostics: Sequence[object]):
        self.diagnostics = list(diagnostics)
        lines = "; ".join(str(d) for d in self.diagnostics)
        super().__init__(f"FST failed validation: {lines}")


# ---------------------------------------------------------------- compiler


class CompileError(NfstError):
    pass


class NotLengthPreserving(CompileError):
    pass


class EpsilonPresent(CompileError):
    pass


class CapacityExceeded(CompileError):
    def __init__(self, required: int, available: int):
        self.required = required
        self.available = available
        super().__init__(f"placement needs at least {required} PEs but the grid has {available}")


class AdjacencyUnsatisfiable(CompileError):
    def __init__(self, pairs: List[Tuple[int, int]]):
        # (predecessor edge index, successor edge index)
        self.pairs = sorted(set(pairs))
        shown = ", ".join(f"{a}->{b}" for a, b in self.pairs)
        super().__init__(f"cannot make consecutive edges grid-adjacent: {shown}")


# ---------------------------------------------------------------- image codec


class ImageFormatError(NfstError):
    pass


class VersionMismatch(ImageFormatError):
    def __init__(self, found: int, expected: int):
        self.found = found
        self.expected = expected
        super().__init__(f"unsupported image version {found} (expected {expected})")


class ChecksumMismatch(ImageFormatError):
    def __init__(self, stored: int, computed: int):
        self.stored = stored
        self.computed = computed
        super().__init__(f"image checksum mismatch: stored 0x{stored:08x}, computed 0x{computed:08x}")


class TruncatedInput(ImageFormatError):
    pass


class MalformedImage(ImageFormatError):
    pass


# ---------------------------------------------------------------- engine


class EngineError(NfstError):
    def __init__(self, message: str, window_index: Optional[int] = None):
        self.window_index = window_index
        self.reason = message
        if window_index is not None:
            message = f"window {window_index}: {message}"
        super().__init__(message)

    def at_window(self, window_index: int) -> "EngineError":
        """Return a copy of this error tagged with the failing window."""
        return type(self)(self.reason, window_index=window_index)


class ActivationOverflow(EngineError):
    pass


class FifoOverflow(EngineError):
    pass


class NoAcceptingPath(EngineError):
    pass


class UnusedTramEntry(EngineError):
    pass


__all__ = [
    "NfstError",
    "RulesetError",
    "RulesetSyntaxError",
    "RulesetSemanticError",
    "UnsupportedEpsilonOutput",
    "ValidationError",
    "CompileError",
    "NotLengthPreserving",
    "EpsilonPresent",
    "CapacityExceeded",
    "AdjacencyUnsatisfiable",
    "ImageFormatError",
    "VersionMismatch",
    "ChecksumMismatch",
    "TruncatedInput",
    "MalformedImage",
    "EngineError",
    "ActivationOverflow",
    "FifoOverflow",
    "NoAcceptingPath",
    "UnusedTramEntry",
]
