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
Reader and writer for the line-oriented ruleset format.

    # comment
    states: 6
    start: 0
    accept: 5
    trans: 0 1 h:h
    trans: 1 2 e:i
    trans: 2 3 [a-z0-9]:\\x20
    trans: 3 4 l:~

`<input>` is a printable byte, an escape (\\xNN, \\t, \\n, \\\\, \\:), a class `[...]` of singletons
and ranges, or `~` for epsilon. `<output>` is a printable byte, an escape, or `~`.
"""

import re
from dataclasses import dataclass
from typing import List, Optional, Tuple

from ..errors import RulesetSemanticError, RulesetSyntaxError
from .modeling_fst import Fst, SymbolClass, Transition

_DIRECTIVE = re.compile(r"\s*([A-Za-z_]+)\s*:")
_TOKEN = re.compile(r"\S+")
_SIMPLE_ESCAPES = {"t": 0x09, "n": 0x0A, "\\": 0x5C, ":": 0x3A}
_DIRECTIVES = ("states", "start", "accept", "trans")


@dataclass
class _Token:
    text: str
    line: int
    column: int


def _tokens_after(line: str, offset: int, lineno: int) -> List[_Token]:
    return [_Token(m.group(0), lineno, m.start() + 1) for m in _TOKEN.finditer(line) if m.start() >= offset]


def _parse_int(tok: _Token) -> int:
    if not tok.text.isdigit():
        raise RulesetSyntaxError(f"expected a non-negative integer, got {tok.text!r}", tok.line, tok.column)
    return int(tok.text)


def _parse_symbol(text: str, pos: int, tok: _Token) -> Tuple[int, int]:
    """Parse one symbol starting at `pos`; return (byte value, next position)."""
    col = tok.column + pos
    if pos >= len(text):
        raise RulesetSyntaxError("expected a symbol", tok.line, col)
    ch = text[pos]
    if ch == "\\":
        if pos + 1 >= len(text):
            raise RulesetSyntaxError("dangling escape", tok.line, col)
        esc = text[pos + 1]
        if esc == "x":
            digits = text[pos + 2 : pos + 4]
            if len(digits) != 2 or not re.fullmatch(r"[0-9A-Fa-f]{2}", digits):
                raise RulesetSyntaxError(f"malformed \\x escape {text[pos:pos + 4]!r}", tok.line, col)
            return int(digits, 16), pos + 4
        if esc in _SIMPLE_ESCAPES:
            return _SIMPLE_ESCAPES[esc], pos + 2
        raise RulesetSyntaxError(f"unknown escape \\{esc}", tok.line, col)
    code = ord(ch)
    if not 0x21 <= code <= 0x7E:
        raise RulesetSyntaxError(f"symbol {ch!r} must be written as an escape", tok.line, col)
    return code, pos + 1


def _split_label(tok: _Token) -> Tuple[str, str, int]:
    """Split `input:output` on the single top-level colon. Returns (input, output, output offset)."""
    text = tok.text
    pos = 0
    in_class = False
    split_at: Optional[int] = None
    while pos < len(text):
        ch = text[pos]
        if ch == "\\":
            pos += 2
            continue
        if ch == "[" and not in_class:
            in_class = True
        elif ch == "]" and in_class:
            in_class = False
        elif ch == ":" and not in_class:
            if split_at is not None:
                raise RulesetSyntaxError("more than one ':' in transition label", tok.line, tok.column + pos)
            split_at = pos
        pos += 1
    if in_class:
        raise RulesetSyntaxError("unterminated symbol class", tok.line, tok.column)
    if split_at is None:
        raise RulesetSyntaxError(f"expected <input>:<output>, got {text!r}", tok.line, tok.column)
    return text[:split_at], text[split_at + 1 :], split_at + 1


def _parse_class(body: str, tok: _Token) -> SymbolClass:
    # body excludes the surrounding brackets; positions are relative to tok.text
    ranges: List[Tuple[int, int]] = []
    pos = 1
    end = len(body) + 1
    text = tok.text
    while pos < end:
        lo, pos = _parse_symbol(text[:end], pos, tok)
        hi = lo
        if pos < end - 1 and text[pos] == "-":
            hi, pos = _parse_symbol(text[:end], pos + 1, tok)
            if hi < lo:
                raise RulesetSemanticError(f"empty range 0x{lo:02x}-0x{hi:02x}", tok.line, tok.column)
        ranges.append((lo, hi))
    cls = SymbolClass.from_ranges(ranges)
    if cls.is_empty():
        raise RulesetSemanticError("empty symbol class", tok.line, tok.column)
    return cls


def _parse_input(text: str, tok: _Token) -> Optional[SymbolClass]:
    if text == "~":
        return None
    if text.startswith("["):
        if not text.endswith("]") or len(text) < 2:
            raise RulesetSyntaxError("unterminated symbol class", tok.line, tok.column)
        inner_tok = _Token(text, tok.line, tok.column)
        return _parse_class(text[1:-1], inner_tok)
    value, pos = _parse_symbol(text, 0, tok)
    if pos != len(text):
        raise RulesetSyntaxError(f"trailing characters in input label {text!r}", tok.line, tok.column + pos)
    return SymbolClass.single(value)


def _parse_output(text: str, tok: _Token, offset: int) -> Optional[int]:
    if text == "~":
        return None
    sub = _Token(text, tok.line, tok.column + offset)
    value, pos = _parse_symbol(text, 0, sub)
    if pos != len(text):
        raise RulesetSyntaxError(f"output must be a single symbol, got {text!r}", sub.line, sub.column + pos)
    return value


def parse_ruleset(text: str) -> Fst:
    """
    Parse ruleset text into an `Fst`.

    Raises:
        RulesetSyntaxError: a line does not follow the grammar.
        RulesetSemanticError: a state id is out of range, a class is empty, or a directive is
            missing or repeated.
    """
    state_count: Optional[int] = None
    state_tok: Optional[_Token] = None
    start: Optional[Tuple[int, _Token]] = None
    accepting: List[Tuple[int, _Token]] = []
    raw_transitions: List[Tuple[int, _Token, int, _Token, Optional[SymbolClass], Optional[int]]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = _DIRECTIVE.match(line)
        if m is None:
            col = len(line) - len(line.lstrip()) + 1
            raise RulesetSyntaxError("expected '<directive>:'", lineno, col)
        key = m.group(1)
        if key not in _DIRECTIVES:
            raise RulesetSyntaxError(f"unknown directive {key!r}", lineno, m.start(1) + 1)
        toks = _tokens_after(line, m.end(), lineno)
        here = _Token(key, lineno, m.start(1) + 1)

        if key == "states":
            if len(toks) != 1:
                raise RulesetSyntaxError("states: takes exactly one integer", lineno, here.column)
            if state_count is not None:
                raise RulesetSemanticError("duplicate states: directive", lineno, here.column)
            state_count = _parse_int(toks[0])
            state_tok = toks[0]
            if state_count < 1:
                raise RulesetSemanticError("states: must be positive", lineno, toks[0].column)
        elif key == "start":
            if len(toks) != 1:
                raise RulesetSyntaxError("start: takes exactly one state id", lineno, here.column)
            if start is not None:
                raise RulesetSemanticError("duplicate start: directive", lineno, here.column)
            start = (_parse_int(toks[0]), toks[0])
        elif key == "accept":
            if not toks:
                raise RulesetSyntaxError("accept: needs at least one state id", lineno, here.column)
            accepting.extend((_parse_int(t), t) for t in toks)
        else:
            if len(toks) != 3:
                raise RulesetSyntaxError("trans: expects <src> <dst> <input>:<output>", lineno, here.column)
            src, dst = _parse_int(toks[0]), _parse_int(toks[1])
            in_text, out_text, out_offset = _split_label(toks[2])
            label_input = _parse_input(in_text, toks[2])
            label_output = _parse_output(out_text, toks[2], out_offset)
            raw_transitions.append((src, toks[0], dst, toks[1], label_input, label_output))

    if state_count is None or state_tok is None:
        raise RulesetSemanticError("missing states: directive")
    if start is None:
        raise RulesetSemanticError("missing start: directive")

    def check(q: int, tok: _Token, what: str) -> int:
        if q >= state_count:
            raise RulesetSemanticError(f"{what} {q} out of range [0, {state_count})", tok.line, tok.column)
        return q

    start_id = check(start[0], start[1], "start state")
    accept_ids = frozenset(check(q, t, "accepting state") for q, t in accepting)
    transitions = tuple(
        Transition(check(s, st, "source state"), check(d, dt, "destination state"), i, o)
        for s, st, d, dt, i, o in raw_transitions
    )
    return Fst(state_count, transitions, start_id, accept_ids)


# ------------------------------------------------------------------ writer

_SPECIAL = set(b"\\:[]~#-")


def _format_symbol(value: int) -> str:
    if value == 0x5C:
        return "\\\\"
    if value == 0x3A:
        return "\\:"
    if 0x21 <= value <= 0x7E and value not in _SPECIAL:
        return chr(value)
    return f"\\x{value:02x}"


def _format_input(cls: Optional[SymbolClass]) -> str:
    if cls is None:
        return "~"
    ranges = cls.ranges()
    if len(ranges) == 1 and ranges[0][0] == ranges[0][1]:
        return _format_symbol(ranges[0][0])
    parts = []
    for lo, hi in ranges:
        parts.append(_format_symbol(lo) if lo == hi else f"{_format_symbol(lo)}-{_format_symbol(hi)}")
    return "[" + "".join(parts) + "]"


def format_ruleset(fst: Fst) -> str:
    """Canonical ruleset text for `fst`; `parse_ruleset(format_ruleset(f)) == f`."""
    lines = [f"states: {fst.state_count}", f"start: {fst.start}"]
    if fst.accepting:
        lines.append("accept: " + " ".join(str(q) for q in sorted(fst.accepting)))
    for t in fst.transitions:
        out = "~" if t.output is None else _format_symbol(t.output)
        lines.append(f"trans: {t.src} {t.dst} {_format_input(t.input)}:{out}")
    return "\n".join(lines) + "\n"


__all__ = ["parse_ruleset", "format_ruleset"]
