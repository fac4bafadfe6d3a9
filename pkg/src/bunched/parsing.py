"""Recursive-descent parser for formulas, bunches and sequents.

Grammar (tightest first)::

    formula  box | * | /\\ | \\/ | -* | ->     all binaries right-associative
    bunch    "," binds tighter than ";", both read left-nested
    sequent  bunch |- formula

``top``, ``bot``, ``emp``, ``empm``, ``empa`` and ``box`` are reserved.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError
from .syntax import (
    BOT,
    EMP,
    EMPA,
    EMPM,
    TOP,
    And,
    Atom,
    Box,
    Bunch,
    Comma,
    Formula,
    Impl,
    Leaf,
    Or,
    Semi,
    Sep,
    Sequent,
    Wand,
)

RESERVED = frozenset({"top", "bot", "emp", "empm", "empa", "box"})

_TOKEN = re.compile(r"\s*(?:(?P<ident>[A-Za-z][A-Za-z0-9_]*)|(?P<sym>\|-|/\\|\\/|-\*|->|[*(),;]))")


@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # "ident", a symbol, or "EOF"
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while True:
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            # skip trailing whitespace, then either EOF or an illegal character
            while pos < len(text) and text[pos].isspace():
                if text[pos] == "\n":
                    line, line_start = line + 1, pos + 1
                pos += 1
            if pos >= len(text):
                tokens.append(Token("EOF", "", line, pos - line_start + 1))
                return tokens
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        start = m.start("ident") if m.group("ident") else m.start("sym")
        for i in range(pos, start):
            if text[i] == "\n":
                line, line_start = line + 1, i + 1
        kind = "ident" if m.group("ident") else m.group("sym")
        tokens.append(Token(kind, m.group(kind if kind == "ident" else "sym"), line, start - line_start + 1))
        pos = m.end()


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def fail(self, expected: set[str]):
        t = self.tok
        what = "end of input" if t.kind == "EOF" else repr(t.text)
        raise ParseError(f"unexpected {what}", t.line, t.column, frozenset(expected))

    def eat(self, kind: str) -> Token:
        if self.tok.kind != kind:
            self.fail({kind})
        t = self.tok
        self.i += 1
        return t

    # formulas -------------------------------------------------------------

    def formula(self) -> Formula:
        left = self.wand()
        if self.tok.kind == "->":
            self.i += 1
            return Impl(left, self.formula())
        return left

    def wand(self) -> Formula:
        left = self.disj()
        if self.tok.kind == "-*":
            self.i += 1
            return Wand(left, self.wand())
        return left

    def disj(self) -> Formula:
        left = self.conj()
        if self.tok.kind == "\\/":
            self.i += 1
            return Or(left, self.disj())
        return left

    def conj(self) -> Formula:
        left = self.sep()
        if self.tok.kind == "/\\":
            self.i += 1
            return And(left, self.conj())
        return left

    def sep(self) -> Formula:
        left = self.unary()
        if self.tok.kind == "*":
            self.i += 1
            return Sep(left, self.sep())
        return left

    def unary(self) -> Formula:
        t = self.tok
        if t.kind == "(":
            self.i += 1
            f = self.formula()
            self.eat(")")
            return f
        if t.kind == "ident":
            self.i += 1
            if t.text == "box":
                return Box(self.unary())
            if t.text == "top":
                return TOP
            if t.text == "bot":
                return BOT
            if t.text == "emp":
                return EMP
            if t.text in RESERVED:
                self.i -= 1
                self.fail({"atom", "(", "top", "bot", "emp", "box"})
            return Atom(t.text)
        self.fail({"atom", "(", "top", "bot", "emp", "box"})

    # bunches --------------------------------------------------------------

    def bunch(self) -> Bunch:
        b = self.comma_bunch()
        while self.tok.kind == ";":
            self.i += 1
            b = Semi(b, self.comma_bunch())
        return b

    def comma_bunch(self) -> Bunch:
        b = self.bunch_item()
        while self.tok.kind == ",":
            self.i += 1
            b = Comma(b, self.bunch_item())
        return b

    def bunch_item(self) -> Bunch:
        t = self.tok
        if t.kind == "ident" and t.text == "empm":
            self.i += 1
            return EMPM
        if t.kind == "ident" and t.text == "empa":
            self.i += 1
            return EMPA
        if t.kind == "(":
            # a parenthesised formula and a parenthesised bunch share a prefix
            start = self.i
            try:
                f = self.formula()
                if self.tok.kind in {",", ";", ")", "|-", "EOF"}:
                    return Leaf(f)
            except ParseError:
                pass
            self.i = start + 1
            b = self.bunch()
            self.eat(")")
            return b
        try:
            return Leaf(self.formula())
        except ParseError as e:
            raise ParseError(e.reason, e.line, e.column, e.expected | {"empm", "empa"}) from None

    def end(self):
        if self.tok.kind != "EOF":
            self.fail({"end of input"})


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    p.end()
    return f


def parse_bunch(text: str) -> Bunch:
    p = _Parser(text)
    b = p.bunch()
    p.end()
    return b


def parse_sequent(text: str) -> Sequent:
    p = _Parser(text)
    lhs = p.bunch()
    p.eat("|-")
    rhs = p.formula()
    p.end()
    return Sequent(lhs, rhs)
