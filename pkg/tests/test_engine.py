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
import dataclasses
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from conftest import edge, pingpong_fst
from nfst_overlay.core.engine.modeling_engine import (
    Fifo,
    OverlayEngine,
    cycle_model,
    reconstruct_paths,
    reset,
    transduce,
)
from nfst_overlay.core.engine.stream import run_stream
from nfst_overlay.core.errors import ActivationOverflow, FifoOverflow, NoAcceptingPath, UnusedTramEntry
from nfst_overlay.core.fst.modeling_fst import Fst, SymbolClass, Transition
from nfst_overlay.core.fst.oracle_fst import Outcome
from nfst_overlay.core.overlay.grid import GridSpec
from nfst_overlay.core.overlay.modeling_overlay import OverlayImage, compile_fst
from nfst_overlay.inference.verification import verify

HI = b"hi   "


def pe_of(image, edge_index):
    return image.edge_map[(edge_index, 0)]


# ------------------------------------------------------------------ cycle model


@pytest.mark.parametrize("n, m, matched, cycles", [(5, 16, True, 37), (8, 64, True, 97), (5, 16, False, 16)])
def test_cycle_model(n, m, matched, cycles):
    assert cycle_model(n, m, matched) == cycles


def test_cycle_model_rejects_empty_window():
    with pytest.raises(ValueError):
        cycle_model(0, 16, True)


# ------------------------------------------------------------------ reset / step


def test_reset_enables_start_pe(golden_image):
    state = reset(golden_image)
    assert np.flatnonzero(state.enabled).tolist() == [pe_of(golden_image, 0)]
    assert not state.active.any()
    assert state.position == 0 and state.cycles == 0
    assert state.activation_vector == []


def test_reset_empty_image():
    state = reset(OverlayImage.empty(GridSpec(2, 2)))
    assert not state.enabled.any() and not state.active.any()
    assert state.activation_vector == []


def test_step_match(golden_image):
    engine = OverlayEngine(golden_image)
    state = engine.step(engine.reset(), ord("h"))
    first = pe_of(golden_image, 0)
    assert np.flatnonzero(state.active).tolist() == [first]
    assert state.activation_vector == [(0, first)]
    assert np.flatnonzero(state.enabled).tolist() == [pe_of(golden_image, 1)]
    assert state.cycles == 2
    assert state.position == 1


def test_step_no_match_kills_window(golden_image):
    engine = OverlayEngine(golden_image)
    state = engine.step(engine.reset(), ord("x"))
    assert not state.active.any()
    assert not state.enabled.any()
    assert state.activation_vector == []


def test_activation_overflow_at_entry_five():
    image = compile_fst(pingpong_fst(), GridSpec(1, 2))
    engine = OverlayEngine(image)
    assert engine.activation_capacity == 4
    state = engine.reset()
    for _ in range(4):
        state = engine.step(state, 0x00)
    assert len(state.activation_vector) == 4
    with pytest.raises(ActivationOverflow):
        engine.step(state, 0x00)

    result, _ = engine.run_subsequence(engine.reset(), b"\x00" * 4)
    assert result.outputs == (b"abab",)
    with pytest.raises(ActivationOverflow):
        engine.run_subsequence(engine.reset(), b"\x00" * 5)


def test_stream_errors_carry_window_index():
    fst = Fst(
        2,
        (Transition(0, 1, SymbolClass.single(ord("a")), ord("a")), Transition(1, 0, SymbolClass.full(), ord("b"))),
        0,
        frozenset({1}),
    )
    image = compile_fst(fst, GridSpec(1, 2))
    with pytest.raises(ActivationOverflow) as e:
        run_stream(image, b"bbbbbaaaaa", 5)
    assert e.value.window_index == 1
    assert str(e.value).startswith("window 1: ")


# ------------------------------------------------------------------ run_subsequence


def test_golden_hello(golden_image):
    engine = OverlayEngine(golden_image)
    result, state = engine.run_subsequence(engine.reset(), b"hello")
    assert result.outcome is Outcome.MATCHED
    assert result.outputs == (HI,)
    assert result.cycles == 37
    assert len(result.paths) == 1 and len(result.paths[0]) == 5
    assert state.cycles == 0 and state.position == 0


def test_golden_hella(golden_image):
    engine = OverlayEngine(golden_image)
    result, _ = engine.run_subsequence(engine.reset(), b"hella")
    assert result.outcome is Outcome.DISCARDED
    assert result.outputs == ()
    assert result.cycles == 16


def test_empty_image_discards():
    engine = OverlayEngine(OverlayImage.empty(GridSpec(2, 2)))
    result, _ = engine.run_subsequence(engine.reset(), b"anything")
    assert result.outcome is Outcome.DISCARDED
    assert result.cycles == cycle_model(8, 4, False)


def test_run_subsequence_rejects_empty_window(golden_image):
    engine = OverlayEngine(golden_image)
    with pytest.raises(ValueError):
        engine.run_subsequence(engine.reset(), b"")


@pytest.mark.parametrize("rows, cols", [(2, 2), (4, 4), (8, 8), (16, 16)])
def test_matched_cycles_are_exact(rows, cols):
    image = compile_fst(pingpong_fst(), GridSpec(rows, cols))
    engine = OverlayEngine(image)
    m = rows * cols
    for n in range(1, 17):
        result, _ = engine.run_subsequence(engine.reset(), b"\x7f" * n)
        assert result.matched
        assert result.cycles == 4 * n + m + 1 == cycle_model(n, m, True)
        assert result.outputs == ((b"ab" * 8)[:n],)


def test_matched_cycles_single_pe():
    image = compile_fst(Fst(2, (edge(0, 1, b"a", b"z"),), 0, frozenset({1})), GridSpec(1, 1))
    result, _ = OverlayEngine(image).run_subsequence(reset(image), b"a")
    assert result.cycles == 4 + 1 + 1
    assert result.paths == ((0,),)


def test_unmatched_cycles_are_exact(golden_image):
    engine = OverlayEngine(golden_image)
    for n in range(1, 17):
        result, _ = engine.run_subsequence(engine.reset(), b"z" * n)
        assert result.cycles == 3 * n + 1


# ------------------------------------------------------------------ paths / transduction


def test_reconstruct_two_parallel_paths(two_path_fst):
    image = compile_fst(two_path_fst, GridSpec(4, 4))
    engine = OverlayEngine(image)
    result, _ = engine.run_subsequence(engine.reset(), b"ab")
    assert result.outputs == (b"pq", b"xy")
    assert len(result.paths) == 2
    assert [transduce(p, image.tram) for p in result.paths] == [b"pq", b"xy"]
    for path in result.paths:
        assert image.pes[path[0]].is_start
        assert image.pes[path[-1]].is_report
        for a, b in zip(path, path[1:]):
            assert a in image.predecessors(b)
        for symbol, pe in zip(b"ab", path):
            assert symbol in image.pes[pe].match


def test_reconstruct_without_accepting_path(golden_image):
    with pytest.raises(NoAcceptingPath):
        reconstruct_paths([(0, pe_of(golden_image, 0))], golden_image, 5)


def test_transduce(golden_image):
    path = [pe_of(golden_image, i) for i in range(5)]
    assert transduce(path, golden_image.tram) == HI
    assert transduce([], golden_image.tram) == b""
    with pytest.raises(UnusedTramEntry):
        transduce([15], golden_image.tram)


def test_fifo_bounded():
    fifo = Fifo(2)
    fifo.push([(0, 1)])
    fifo.push([(0, 2)])
    with pytest.raises(FifoOverflow):
        fifo.push([(0, 3)])
    assert fifo.pop() == [(0, 1)]
    assert len(fifo) == 1


# ------------------------------------------------------------------ run_stream


def test_run_stream_first_policy(golden_image):
    stream = run_stream(golden_image, b"hellohello", 5, policy="first")
    assert [r.outputs for r in stream.results] == [(HI,), (HI,)]
    assert stream.total_cycles == 74


def test_run_stream_mixed(golden_image):
    stream = run_stream(golden_image, b"helloworld", 5, policy="first")
    assert [r.outcome for r in stream.results] == [Outcome.MATCHED, Outcome.DISCARDED]
    assert stream.total_cycles == 37 + 16


def test_run_stream_empty(golden_image):
    stream = run_stream(golden_image, b"", 3)
    assert stream.results == ()
    assert stream.total_cycles == 0


def test_run_stream_rejects_bad_arguments(golden_image):
    with pytest.raises(ValueError):
        run_stream(golden_image, b"hello", 0)
    with pytest.raises(ValueError):
        run_stream(golden_image, b"hello", 5, policy="best")


def test_first_is_minimum_of_all(two_path_fst):
    image = compile_fst(two_path_fst, GridSpec(4, 4))
    every = run_stream(image, b"abababzz", 2)
    first = run_stream(image, b"abababzz", 2, policy="first")
    for a, f in zip(every.results, first.results):
        if a.matched:
            assert f.outputs == (min(a.outputs),)
        else:
            assert f == a


def test_parallel_windows_match_sequential(two_path_fst):
    image = compile_fst(two_path_fst, GridSpec(4, 4))
    data = bytes(np.random.default_rng(5).choice(list(b"abz"), size=200).tolist())
    sequential = run_stream(image, data, 2)
    parallel = run_stream(image, data, 2, max_workers=4)
    assert parallel == sequential


def test_window_isolation(golden_image):
    engine = OverlayEngine(golden_image)
    windows = [b"hello", b"hella", b"xxxxx", b"hello"]
    forward = [engine.run_subsequence(engine.reset(), w, i)[0] for i, w in enumerate(windows)]
    backward = [engine.run_subsequence(engine.reset(), w, i)[0] for i, w in reversed(list(enumerate(windows)))]
    assert forward == backward[::-1]


def test_run_subsequence_from_many_threads():
    engine = OverlayEngine(compile_fst(pingpong_fst(), GridSpec(4, 4)))
    windows = [b"\x00" * n for n in range(1, 9)]
    expected = [engine.run_subsequence(engine.reset(), w)[0] for w in windows]

    def hammer(k):
        return all(engine.run_subsequence(engine.reset(), windows[k])[0] == expected[k] for _ in range(300))

    interval = sys.getswitchinterval()
    sys.setswitchinterval(1e-6)
    try:
        with ThreadPoolExecutor(max_workers=len(windows)) as pool:
            outcomes = list(pool.map(hammer, range(len(windows))))
    finally:
        sys.setswitchinterval(interval)
    assert all(outcomes)


def test_caller_fifo_overflow(golden_image):
    engine = OverlayEngine(golden_image, fifo_capacity=1)
    full = Fifo(1)
    full.push([])
    with pytest.raises(FifoOverflow):
        engine.run_subsequence(engine.reset(), b"hello", fifo=full)
    # the private FIFO is drained every window, so capacity 1 never overflows
    stream = run_stream(golden_image, b"hello" * 20, 5, fifo_capacity=1)
    assert all(r.matched for r in stream.results)


def test_engine_rejects_bad_fifo_capacity(golden_image):
    with pytest.raises(ValueError):
        OverlayEngine(golden_image, fifo_capacity=0)


def test_run_stream_rejects_foreign_engine(golden_image, two_path_fst):
    other = OverlayEngine(compile_fst(two_path_fst, GridSpec(4, 4)))
    with pytest.raises(ValueError):
        run_stream(golden_image, b"hello", 5, engine=other)
    engine = OverlayEngine(golden_image)
    assert run_stream(golden_image, b"hello", 5, engine=engine).total_cycles == 37


def test_trace_is_deterministic(golden_image):
    first, second = [], []
    run_stream(golden_image, b"hellohxllo", 5, trace=first)
    run_stream(golden_image, b"hellohxllo", 5, max_workers=2, trace=second)
    assert first == second
    assert len(first) == 10
    assert first[0] == f"cyc=5 pos=0 sym=0x68 active=[{pe_of(golden_image, 0)}] enabled=[{pe_of(golden_image, 1)}]"
    assert first[6] == "cyc=7 pos=1 sym=0x78 active=[] enabled=[]"


def test_cycles_follow_model_on_streams(golden_image):
    stream = run_stream(golden_image, b"hellohellxhel", 5)
    for r in stream.results:
        assert r.cycles == cycle_model(r.window_length, golden_image.m, r.matched)
    assert stream.total_cycles == sum(r.cycles for r in stream.results)


# ------------------------------------------------------------------ oracle equivalence


def test_oracle_equivalence_random_machines():
    report = verify(cases=1000, seed=20240601)
    assert report.cases == 1000
    assert report.ok, str(report.first_counterexample)


def test_oracle_equivalence_golden(hello_lp_fst):
    report = verify(fst=hello_lp_fst, cases=200, seed=1)
    assert str(report) == "200/200 pass"


def test_corrupted_tram_is_caught(hello_lp_fst, golden_image):
    entries = list(golden_image.tram.entries)
    entries[pe_of(golden_image, 1)] = ord("j")
    mutated = dataclasses.replace(golden_image, tram=dataclasses.replace(golden_image.tram, entries=tuple(entries)))
    report = verify(fst=hello_lp_fst, image=mutated, cases=100, seed=0, max_window=5)
    assert not report.ok
    assert report.first_counterexample.window_length == 5
