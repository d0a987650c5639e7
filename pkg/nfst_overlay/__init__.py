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
nfst_overlay: byte-level transducers on a simulated PE-array overlay.
"""

from .core import *  # noqa: F401,F403
from .core import __all__ as _core_all
from .core.errors import NfstError
from .inference.overlay_transducer import OverlayTransducer

__version__ = "0.1.0"

__all__ = ["__version__", "OverlayTransducer", "NfstError"] + list(_core_all)
