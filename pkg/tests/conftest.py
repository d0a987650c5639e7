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

import pytest

import nfst_overlay
from nfst_overlay.core.fst.modeling_fst import Fst, SymbolClass, Transition
from nfst_overlay.core.fst.parsing_fst import parse_ruleset
from nfst_overlay.core.overlay.grid import GridSpec
from nfst_overlay.core.overlay.modeling_overlay import compile_fst

RULESETS = os.path.join(os.path.dirname(nfst_overlay.__file__), "rulesets")
HELLO_RULES = os.path.join(RULESETS, "hello_hi.rules")
HELLO_LP_RULES = os.path.join(RULESETS, "hello_hi_lp.rules")


def read(path):
    with open(path, "r", encoding="utf-8") as f:
        return f.read()


def edge(src, dst, symbols, output):
    """Transition helper: `symbols` is a bytes string, `None` for epsilon; `output` a 1-byte string or None."""
    label = None if symbols is None else SymbolClass.from_symbols(symbols)
    return Transition(src, dst, label, None if output is None else output[0])


def pingpong_fst():
    # two edges enabling each other forever; every byte matches
    return Fst(
        2,
        (
            Transition(0, 1, SymbolClass.full(), ord("a")),
            Transition(1, 0, SymbolClass.full(), ord("b")),
        ),
        0,
        frozenset({0, 1}),
    )


@pytest.fixture(scope="session")
def hello_fst():
    return parse_ruleset(read(HELLO_RULES))


@pytest.fixture(scope="session")
def hello_lp_fst():
    return parse_ruleset(read(HELLO_LP_RULES))


@pytest.fixture(scope="session")
def golden_image(hello_lp_fst):
    return compile_fst(hello_lp_fst, GridSpec(4, 4))


@pytest.fixture
def two_path_fst():
    return Fst(
        4,
        (
            edge(0, 1, b"a", b"x"),
            edge(1, 2, b"b", b"y"),
            edge(0, 3, b"a", b"p"),
            edge(3, 2, b"b", b"q"),
        ),
        0,
        frozenset({2}),
    )
