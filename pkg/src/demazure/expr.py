"""A small expression grammar for command-line input.

    expr  := term (("+" | "-") term)*
    term  := unary ("*" unary)*
    unary := ("-" | "+") unary | power
    power := atom (("^" | "**") INT)?
    atom  := INT | NAME | NAME "(" ints ")" | NAME "[" ints "]" | "(" expr ")"

Values are combined with Python operators, so anything supporting ``+``,
``-``, ``*`` and integer mixing works (series, twisted-algebra elements).
Errors report a 1-based column.
"""

from __future__ import annotations

import re
from typing import Any, Callable

from .errors import ParseError

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>\*\*|[-+*^()\[\],]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    end = len(text.rstrip())
    while pos < end:
        mt = _TOKEN.match(text, pos)
        if not mt:
            col = pos + 1 + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character at column {col}", column=col)
        kind = mt.lastgroup
        out.append((kind, mt.group(kind), mt.start(kind) + 1))
        pos = mt.end()
    out.append(("end", "", len(text) + 1))
    return out


class _Parser:
    def __init__(self, text: str, names: dict, const: Callable[[int], Any],
                 calls: dict | None, indexers: dict | None):
        self.tokens = _tokenize(text)
        self.i = 0
        self.names = names
        self.const = const
        self.calls = calls or {}
        self.indexers = indexers or {}

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, tok, what: str):
        shown = tok[1] or "end of input"
        raise ParseError(f"expected {what}, found {shown!r} at column {tok[2]}", column=tok[2])

    def expect(self, op: str):
        tok = self.take()
        if tok[1] != op or tok[0] not in ("op",):
            self.fail(tok, repr(op))
        return tok

    def parse(self):
        value = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            self.fail(tok, "an operator")
        return value

    def expr(self):
        value = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.unary()
        while self.peek()[1] == "*" and self.peek()[0] == "op":
            self.take()
            value = value * self.unary()
        return value

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("-", "+"):
            self.take()
            inner = self.unary()
            return -inner if tok[1] == "-" else inner
        return self.power()

    def power(self):
        base = self.atom()
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("^", "**"):
            self.take()
            exp = self.take()
            if exp[0] != "int":
                self.fail(exp, "an integer exponent")
            n = int(exp[1])
            value = self.const(1)
            for _ in range(n):
                value = value * base
            return value
        return base

    def ints(self, close: str) -> list[int]:
        out: list[int] = []
        if self.peek()[1] == close:
            self.take()
            return out
        while True:
            sign = 1
            if self.peek()[1] == "-":
                self.take()
                sign = -1
            tok = self.take()
            if tok[0] != "int":
                self.fail(tok, "an integer")
            out.append(sign * int(tok[1]))
            tok = self.take()
            if tok[1] == close:
                return out
            if tok[1] != ",":
                self.fail(tok, f"',' or {close!r}")

    def atom(self):
        tok = self.take()
        if tok[0] == "int":
            return self.const(int(tok[1]))
        if tok[0] == "name":
            nxt = self.peek()
            if nxt[1] == "(" and tok[1] in self.calls:
                self.take()
                return self.calls[tok[1]](self.ints(")"))
            if nxt[1] == "[" and tok[1] in self.indexers:
                self.take()
                return self.indexers[tok[1]](self.ints("]"))
            if tok[1] in self.names:
                return self.names[tok[1]]
            raise ParseError(f"unknown name {tok[1]!r} at column {tok[2]}", column=tok[2])
        if tok[1] == "(":
            value = self.expr()
            self.expect(")")
            return value
        self.fail(tok, "a number, name or '('")


def evaluate_expression(text: str, names: dict[str, Any], const: Callable[[int], Any],
                        calls: dict[str, Callable] | None = None,
                        indexers: dict[str, Callable] | None = None) -> Any:
    return _Parser(text, names, const, calls, indexers).parse()
