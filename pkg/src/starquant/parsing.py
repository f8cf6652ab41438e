"""Small recursive-descent parser for human-readable polynomial expressions.

Grammar (whitespace-insensitive)::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := ('+'|'-') factor | power
    power  := atom ('^' ('-')? INT)?
    atom   := INT | NAME | '(' expr ')'

Names: ``z0``..``z{n-1}`` (variables), ``mu``, ``hbar``, ``tau``, ``i``.
Rational literals appear as divisions of integers ("3/2"); division and
negative powers are accepted exactly when the divisor/base is an invertible
scalar monomial (an integer, ``i``, or a power of ``mu``).
"""

from __future__ import annotations

import re

from .errors import SchemaError
from .poly import MultiPoly
from .scalars import GR_I, PARAM_INDEX, ParamScalar

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


def _tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            break
        pos = m.end()
        if m.group(1) is not None:
            tokens.append(("int", int(m.group(1))))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2)))
        else:
            ch = m.group(3)
            if ch.strip() == "":
                continue
            if ch not in "+-*/^()":
                raise SchemaError(f"unexpected character {ch!r} in expression")
            tokens.append((ch, ch))
    tokens.append(("end", None))
    return tokens


class _Parser:
    def __init__(self, text: str, n: int):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.n = n

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind):
        tok = self.next()
        if tok[0] != kind:
            raise SchemaError(f"expected {kind!r}, found {tok[1]!r}")
        return tok

    def parse(self) -> MultiPoly:
        value = self.expr()
        if self.peek()[0] != "end":
            raise SchemaError(f"trailing input at {self.peek()[1]!r}")
        return value

    def expr(self) -> MultiPoly:
        value = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.next()[0]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> MultiPoly:
        value = self.factor()
        while self.peek()[0] in ("*", "/"):
            op = self.next()[0]
            rhs = self.factor()
            if op == "*":
                value = value * rhs
            else:
                value = value.scale(_invertible_scalar(rhs).inverse())
        return value

    def factor(self) -> MultiPoly:
        kind = self.peek()[0]
        if kind in ("+", "-"):
            op = self.next()[0]
            value = self.factor()
            return value if op == "+" else -value
        return self.power()

    def power(self) -> MultiPoly:
        base = self.atom()
        if self.peek()[0] != "^":
            return base
        self.next()
        sign = 1
        if self.peek()[0] == "-":
            self.next()
            sign = -1
        exp = sign * self.expect("int")[1]
        if exp >= 0:
            return base ** exp
        return MultiPoly.const(
            self.n, _invertible_scalar(base).inverse() ** (-exp)
        )

    def atom(self) -> MultiPoly:
        tok = self.next()
        if tok[0] == "int":
            return MultiPoly.const(self.n, ParamScalar.from_rat(tok[1]))
        if tok[0] == "(":
            value = self.expr()
            self.expect(")")
            return value
        if tok[0] == "name":
            return self.name_value(tok[1])
        raise SchemaError(f"unexpected token {tok[1]!r}")

    def name_value(self, name: str) -> MultiPoly:
        if name == "i":
            return MultiPoly.const(self.n, ParamScalar.from_gaussian(GR_I))
        if name in PARAM_INDEX:
            return MultiPoly.const(self.n, ParamScalar.param(name))
        if name.startswith("z") and name[1:].isdigit():
            j = int(name[1:])
            if j >= self.n:
                raise SchemaError(
                    f"variable {name!r} out of range for {self.n} variables"
                )
            return MultiPoly.variable(self.n, j)
        raise SchemaError(f"unknown name {name!r}")


def _invertible_scalar(p: MultiPoly) -> ParamScalar:
    if not p.is_constant():
        raise SchemaError("division requires an invertible scalar divisor")
    return p.constant_coefficient()


def parse_poly(text: str, n: int) -> MultiPoly:
    """Parse a polynomial expression in variables z0..z{n-1}.

    Expressions that cannot be represented (division by zero, inverses of
    non-invertible parameters) are input errors, not math errors.
    """
    try:
        return _Parser(text, n).parse()
    except SchemaError:
        raise
    except (ZeroDivisionError, ValueError) as exc:
        raise SchemaError(f"cannot evaluate expression {text!r}: {exc}") from exc


def parse_scalar(text: str) -> ParamScalar:
    """Parse a scalar expression (no z variables)."""
    return parse_poly(text, 0).constant_coefficient()
