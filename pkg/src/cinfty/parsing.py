"""Recursive-descent parser for the term grammar.

    expr  := sum
    sum   := prod (("+" | "-") prod)*
    prod  := unary ("*" unary)*
    unary := "-" unary | atom ("^" nat)?
    atom  := rational | var | prim "(" expr ")" | "(" expr ")"
    var   := "x" nat
    prim  := "exp" | "sin" | "cos" | "bump" | "bump_d" nat
    rational := int ("/" nat)?
"""

from __future__ import annotations

import re
from fractions import Fraction

from cinfty.terms import PRIMITIVES, Term

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")
_BUMP_DERIV = re.compile(r"bump_d([1-9]\d*)$")


class TermSyntaxError(ValueError):
    """Raised with the character offset and the tokens that would have been
    accepted there."""

    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        self.offset = offset
        self.expected = expected
        detail = f" (expected {', '.join(expected)})" if expected else ""
        super().__init__(f"{message} at offset {offset}{detail}")


class _Parser:
    def __init__(self, text: str, arity: int):
        self.text = text
        self.arity = arity
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while True:
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos and m.group(0) == "":
                break
            if m.group(1) is not None:
                self.tokens.append(("num", m.group(1), m.start(1)))
            elif m.group(2) is not None:
                self.tokens.append(("name", m.group(2), m.start(2)))
            elif m.group(3) is not None:
                self.tokens.append(("op", m.group(3), m.start(3)))
            else:
                break
            pos = m.end()
        self.tokens.append(("end", "", len(text)))
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, off = self.take()
        if kind != "op" or val != op:
            raise TermSyntaxError(f"unexpected {val or 'end of input'!r}", off, (repr(op),))

    def nat(self) -> int:
        kind, val, off = self.take()
        if kind != "num":
            raise TermSyntaxError(f"unexpected {val or 'end of input'!r}", off, ("natural number",))
        return int(val)

    def parse(self) -> Term:
        t = self.sum()
        kind, val, off = self.peek()
        if kind != "end":
            raise TermSyntaxError(f"unexpected {val!r}", off, ("'+'", "'-'", "'*'", "end of input"))
        return t

    def sum(self) -> Term:
        acc = self.prod()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.prod()
                acc = acc + rhs if val == "+" else acc - rhs
            else:
                return acc

    def prod(self) -> Term:
        acc = self.unary()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.take()
                acc = acc * self.unary()
            else:
                return acc

    def unary(self) -> Term:
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return -self.unary()
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            return base ** self.nat()
        return base

    def atom(self) -> Term:
        kind, val, off = self.take()
        if kind == "num":
            value = Fraction(int(val))
            nkind, nval, _ = self.peek()
            if nkind == "op" and nval == "/":
                self.take()
                den = self.nat()
                if den == 0:
                    raise TermSyntaxError("zero denominator", off)
                value /= den
            return Term.const(value)
        if kind == "op" and val == "(":
            inner = self.sum()
            self.expect_op(")")
            return inner
        if kind == "name":
            m = re.fullmatch(r"x(\d+)", val)
            if m:
                index = int(m.group(1))
                if index >= self.arity:
                    raise TermSyntaxError(f"variable {val} exceeds arity {self.arity}", off)
                return Term.var(index)
            order = 0
            name = val
            d = _BUMP_DERIV.match(val)
            if d:
                name, order = "bump", int(d.group(1))
            if name in PRIMITIVES:
                self.expect_op("(")
                arg = self.sum()
                self.expect_op(")")
                return Term.prim(name, arg, order)
            raise TermSyntaxError(f"unknown variable {val}", off,
                                  ("variable x<n>",) + tuple(PRIMITIVES))
        raise TermSyntaxError(f"unexpected {val or 'end of input'!r}", off,
                              ("number", "variable", "primitive", "'('", "'-'"))


def parse_term(text: str, arity: int) -> Term:
    """Parse ``text`` into a normalized term over ``arity`` variables."""
    return _Parser(text, arity).parse()
