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
import itertools

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given, settings

from conftest import edge
from nfst_overlay.core.errors import RulesetSemanticError, RulesetSyntaxError, UnsupportedEpsilonOutput
from nfst_overlay.core.fst.modeling_fst import (
    Fst,
    SymbolClass,
    Transition,
    eliminate_epsilon,
    is_length_preserving,
    machine_symbols,
    reachable,
    split_windows,
    validate,
)
from nfst_overlay.core.fst.oracle_fst import Outcome, oracle_stream, oracle_window
from nfst_overlay.core.fst.parsing_fst import format_ruleset, parse_ruleset


# ------------------------------------------------------------------ SymbolClass


def test_symbol_class_bit_order():
    cls = SymbolClass.single(0x09)
    assert cls.bits[1] == 0x02
    assert 0x09 in cls and 0x08 not in cls
    assert cls.symbols() == [9]


def test_symbol_class_ranges():
    cls = SymbolClass.from_ranges([(ord("a"), ord("c")), (ord("x"), ord("x"))])
    assert cls.ranges() == [(97, 99), (120, 120)]
    assert len(cls) == 4
    assert SymbolClass().is_empty()
    assert len(SymbolClass.full()) == 256


def test_symbol_class_rejects_wrong_width():
    with pytest.raises(ValueError):
        SymbolClass(b"\x00" * 31)


# ------------------------------------------------------------------ parse_ruleset


def test_parse_hello(hello_fst):
    assert hello_fst.state_count == 6
    assert len(hello_fst.transitions) == 5
    assert hello_fst.start == 0
    assert hello_fst.accepting == frozenset({5})
    assert [t.output for t in hello_fst.transitions] == [ord("h"), ord("i"), None, None, None]


def test_parse_empty_machine():
    fst = parse_ruleset("states: 1\nstart: 0\naccept: 0\n")
    assert fst == Fst(1, (), 0, frozenset({0}))


def test_parse_class():
    fst = parse_ruleset("states: 2\nstart: 0\naccept: 1\ntrans: 0 1 [a-c]:x\n")
    (t,) = fst.transitions
    assert t.input.symbols() == [ord("a"), ord("b"), ord("c")]
    assert t.output == ord("x")


def test_parse_escapes_and_comments():
    text = (
        "# header comment\n"
        "states: 3   # trailing comment\n"
        "start: 0\n"
        "accept: 1\n"
        "accept: 2\n"
        "trans: 0 1 \\x00:\\:\n"
        "trans: 0 2 [\\t\\n\\\\]:~\n"
        "trans: 1 2 ~:~\n"
    )
    fst = parse_ruleset(text)
    assert fst.accepting == frozenset({1, 2})
    assert fst.transitions[0].input.symbols() == [0]
    assert fst.transitions[0].output == ord(":")
    assert fst.transitions[1].input.symbols() == [0x09, 0x0A, 0x5C]
    assert fst.transitions[1].output is None
    assert fst.transitions[2].input is None


def test_parse_missing_accept_means_no_accepting_states():
    assert parse_ruleset("states: 1\nstart: 0\n").accepting == frozenset()


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("states: 2\nstart: 0\nbogus line\n", 3, 1),
        ("states: 2\nstart: 0\nfoo: 1\n", 3, 1),
        ("states: 2\nstart: 0\ntrans: 0 1 ab:x\n", 3, 13),
        ("states: 2\nstart: 0\ntrans: 0 1 a\n", 3, 12),
        ("states: 2\nstart: 0\ntrans: 0 1 a:\\q\n", 3, 14),
        ("states: x\n", 1, 9),
    ],
)
def test_parse_syntax_errors_carry_position(text, line, column):
    with pytest.raises(RulesetSyntaxError) as e:
        parse_ruleset(text)
    assert (e.value.line, e.value.column) == (line, column)


@pytest.mark.parametrize(
    "text",
    [
        "states: 2\nstart: 0\nstart: 1\n",
        "states: 2\nstates: 3\nstart: 0\n",
        "states: 2\nstart: 2\n",
        "states: 2\nstart: 0\naccept: 7\n",
        "states: 2\nstart: 0\ntrans: 0 5 a:a\n",
        "states: 2\nstart: 0\ntrans: 0 1 [z-a]:a\n",
        "start: 0\n",
        "states: 2\n",
        "states: 0\nstart: 0\n",
    ],
)
def test_parse_semantic_errors(text):
    with pytest.raises(RulesetSemanticError):
        parse_ruleset(text)


def test_format_ruleset_round_trip(hello_fst):
    assert parse_ruleset(format_ruleset(hello_fst)) == hello_fst
    weird = Fst(
        2,
        (
            Transition(0, 1, SymbolClass.from_symbols(b"-[]#~ \x7f"), 0x20),
            Transition(1, 0, SymbolClass.full(), None),
            Transition(1, 1, None, None),
        ),
        0,
        frozenset({1}),
    )
    assert parse_ruleset(format_ruleset(weird)) == weird


# ------------------------------------------------------------------ validate / reachable


def test_validate_hello_is_clean(hello_fst):
    assert validate(hello_fst) == []


def test_validate_out_of_range_dst():
    diags = validate(Fst(1, (edge(0, 1, b"a", b"a"),), 0))
    assert len(diags) == 1
    assert diags[0].is_error


def test_validate_unreachable_accepting_state():
    diags = validate(Fst(3, (edge(0, 1, b"a", b"x"),), 0, frozenset({2})))
    assert len(diags) == 1
    assert diags[0].severity == "warning"
    assert "2" in diags[0].message


def test_validate_epsilon_input_with_output():
    diags = validate(Fst(2, (edge(0, 1, None, b"x"),), 0, frozenset({1})))
    assert [d.is_error for d in diags] == [True]


def test_validate_empty_class():
    diags = validate(Fst(2, (Transition(0, 1, SymbolClass(), 1),), 0, frozenset({1})))
    assert any(d.is_error and "empty" in d.message for d in diags)


def test_reachable_renumbers_densely():
    fst = Fst(
        5,
        (edge(0, 3, b"a", b"x"), edge(1, 2, b"b", b"y"), edge(3, 4, b"c", b"z")),
        0,
        frozenset({1, 4}),
    )
    assert reachable(fst) == Fst(3, (edge(0, 1, b"a", b"x"), edge(1, 2, b"c", b"z")), 0, frozenset({2}))


# ------------------------------------------------------------------ epsilon elimination


def test_eliminate_epsilon_identity(hello_fst):
    assert eliminate_epsilon(hello_fst) is hello_fst


def test_eliminate_epsilon_copies_closure_edges():
    fst = Fst(3, (edge(0, 1, None, None), edge(1, 2, b"a", b"x")), 0, frozenset({2}))
    out = eliminate_epsilon(fst)
    assert not out.has_epsilon_input()
    assert edge(0, 2, b"a", b"x") in out.transitions
    assert edge(1, 2, b"a", b"x") in out.transitions
    assert out.accepting == frozenset({2})


def test_eliminate_epsilon_extends_accepting():
    out = eliminate_epsilon(Fst(2, (edge(0, 1, None, None),), 0, frozenset({1})))
    assert out.accepting == frozenset({0, 1})
    assert out.transitions == ()


def test_eliminate_epsilon_rejects_epsilon_with_output():
    with pytest.raises(UnsupportedEpsilonOutput):
        eliminate_epsilon(Fst(2, (edge(0, 1, None, b"x"),), 0, frozenset({1})))


ALPHABET = b"abc"
ALL_WINDOWS = [bytes(w) for k in range(1, 5) for w in itertools.product(ALPHABET, repeat=k)]


@st.composite
def epsilon_machines(draw):
    n = draw(st.integers(min_value=1, max_value=6))
    transitions = []
    for _ in range(draw(st.integers(min_value=0, max_value=10))):
        src = draw(st.integers(0, n - 1))
        dst = draw(st.integers(0, n - 1))
        if draw(st.booleans()):
            transitions.append(Transition(src, dst, None, None))
        else:
            symbols = draw(st.sets(st.sampled_from(list(ALPHABET)), min_size=1))
            output = draw(st.one_of(st.none(), st.sampled_from(list(b"xy"))))
            transitions.append(Transition(src, dst, SymbolClass.from_symbols(symbols), output))
    accepting = draw(st.frozensets(st.integers(0, n - 1)))
    return Fst(n, tuple(transitions), 0, accepting)


@settings(max_examples=500, deadline=None)
@given(epsilon_machines())
def test_eliminate_epsilon_preserves_transduction(fst):
    out = eliminate_epsilon(fst)
    assert not out.has_epsilon_input()
    for window in ALL_WINDOWS:
        assert oracle_window(out, window) == oracle_window(fst, window)


# ------------------------------------------------------------------ oracle


def test_oracle_hello(hello_fst):
    assert oracle_window(hello_fst, b"hello").outputs == (b"hi",)
    assert oracle_window(hello_fst, b"hello").outcome is Outcome.MATCHED
    assert oracle_window(hello_fst, b"hella").outcome is Outcome.DISCARDED
    assert oracle_window(hello_fst, b"hella").outputs == ()


def test_oracle_parallel_paths_sorted(two_path_fst):
    assert oracle_window(two_path_fst, b"ab").outputs == (b"pq", b"xy")


def test_oracle_stream(hello_fst):
    results = oracle_stream(hello_fst, b"hellohello", 5)
    assert [r.outputs for r in results] == [(b"hi",), (b"hi",)]
    results = oracle_stream(hello_fst, b"helloworld", 5)
    assert [r.matched for r in results] == [True, False]
    assert [r.window_index for r in results] == [0, 1]
    assert oracle_stream(hello_fst, b"", 4) == []


def test_oracle_stream_keeps_short_remainder(hello_fst):
    results = oracle_stream(hello_fst, b"hellohel", 5)
    assert len(results) == 2
    assert results[1].outcome is Outcome.DISCARDED


def test_oracle_window_independence(two_path_fst):
    rng = np.random.default_rng(3)
    data = bytes(rng.choice(list(b"abz"), size=40).tolist())
    stream = oracle_stream(two_path_fst, data, 3)
    assert stream == [oracle_window(two_path_fst, w, i) for i, w in enumerate(split_windows(data, 3))]


def test_oracle_length_preserving_outputs(hello_lp_fst):
    assert is_length_preserving(hello_lp_fst)
    assert oracle_window(hello_lp_fst, b"hello").outputs == (b"hi   ",)


def test_is_length_preserving(hello_fst):
    assert not is_length_preserving(hello_fst)
    assert not is_length_preserving(Fst(2, (edge(0, 1, None, None),), 0))


def test_machine_symbols(hello_fst):
    assert machine_symbols(hello_fst) == sorted(set(b"helo"))


def test_split_windows():
    assert split_windows(b"abcdefg", 3) == [b"abc", b"def", b"g"]
    with pytest.raises(ValueError):
        split_windows(b"abc", 0)
