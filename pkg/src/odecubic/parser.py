"""Tokenizer and precedence-climbing parser for the expression grammar.

Grammar (documented in the README): identifiers ``x``, ``y``, ``p`` plus
declared parameter names; operators ``+ - * / ^`` with the usual precedence
(``^`` binds tightest and is right-associative, unary minus binds between
``*`` and ``^``); parentheses; the functions ``exp``, ``ln``, ``sqrt`` and
``root5``; integer, rational (``3/5``) and decimal (``0.25``) literals.
Exponents must fold to rational constants.

Equation mode additionally accepts ``y'`` (rewritten to ``p``), ``y''`` and
one ``=`` sign.  Apostrophes are rejected in plain expression mode.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional

from .expr import (Expr, _FUNCTIONS, add, const, div, mul, neg, param, pow_,
                   sub, var)


class ParseError(ValueError):
    """Syntax or identifier error; ``offset`` is the byte position."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.message = message
        self.offset = offset


_OPS = set("+-*/^()=")


def tokenize(text: str, equation: bool = False) -> list[tuple[str, object, int]]:
    """Return (kind, value, offset) triples; kinds: num, ident, op, prime."""
    tokens: list[tuple[str, object, int]] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            seen_dot = False
            while j < n and (text[j].isdigit() or (text[j] == "." and not seen_dot)):
                if text[j] == ".":
                    seen_dot = True
                j += 1
            lit = text[i:j]
            try:
                value = Fraction(lit)
            except ValueError:
                raise ParseError(f"bad numeric literal {lit!r}", i)
            tokens.append(("num", value, i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            name = text[i:j]
            i = j
            primes = 0
            while i < n and text[i] == "'":
                primes += 1
                i += 1
            if primes:
                if not equation:
                    raise ParseError("derivative marks are not allowed here", i - primes)
                if name != "y" or primes > 2:
                    raise ParseError(f"cannot take derivative of {name!r}", i - primes)
                tokens.append(("ident", "p" if primes == 1 else "q", j - len(name)))
            else:
                tokens.append(("ident", name, j - len(name)))
            continue
        if c == "'":
            raise ParseError("unexpected apostrophe", i)
        if c in _OPS:
            if c == "=" and not equation:
                raise ParseError("'=' is not allowed in an expression", i)
            tokens.append(("op", c, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {c!r}", i)
    return tokens


class _Parser:
    def __init__(self, tokens: list[tuple[str, object, int]], end_offset: int,
                 params: frozenset[str], allow_derivatives: bool):
        self.tokens = tokens
        self.pos = 0
        self.end_offset = end_offset
        self.params = params
        self.allow_derivatives = allow_derivatives

    def peek(self) -> Optional[tuple[str, object, int]]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> tuple[str, object, int]:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", self.end_offset)
        self.pos += 1
        return tok

    def expect_op(self, op: str) -> None:
        tok = self.next()
        if tok[0] != "op" or tok[1] != op:
            raise ParseError(f"expected {op!r}", tok[2])

    # precedence levels: + - -> 1, * / -> 2, unary minus -> between 2 and 3,
    # ^ -> 3 (right-associative)
    def parse(self, min_prec: int = 1) -> Expr:
        lhs = self.atom()
        while True:
            tok = self.peek()
            if tok is None or tok[0] != "op":
                return lhs
            op = tok[1]
            if op in "+-":
                prec, next_min = 1, 2
            elif op in "*/":
                prec, next_min = 2, 3
            elif op == "^":
                prec, next_min = 3, 3
            else:
                return lhs
            if prec < min_prec:
                return lhs
            self.pos += 1
            if op == "^":
                at = tok[2]
                rhs = self.parse(next_min)
                if rhs.kind != 0:  # K_CONST
                    raise ParseError("exponent must be a rational constant", at)
                lhs = pow_(lhs, rhs.payload)
                continue
            rhs = self.parse(next_min)
            if op == "+":
                lhs = add(lhs, rhs)
            elif op == "-":
                lhs = sub(lhs, rhs)
            elif op == "*":
                lhs = mul(lhs, rhs)
            else:
                lhs = div(lhs, rhs)

    def atom(self) -> Expr:
        kind, value, offset = self.next()
        if kind == "num":
            return const(value)
        if kind == "op":
            if value == "(":
                inner = self.parse(1)
                self.expect_op(")")
                return inner
            if value == "-":
                return neg(self.parse(3))
            if value == "+":
                return self.parse(3)
            raise ParseError(f"unexpected operator {value!r}", offset)
        # identifier
        name = value
        nxt = self.peek()
        if nxt is not None and nxt[0] == "op" and nxt[1] == "(":
            fn = _FUNCTIONS.get(name)
            if fn is None:
                raise ParseError(f"unknown function {name!r}", offset)
            self.pos += 1
            arg = self.parse(1)
            self.expect_op(")")
            return fn(arg)
        if name in ("x", "y"):
            return var(name)
        if name in ("p", "q"):
            if not self.allow_derivatives:
                raise ParseError(f"{name!r} is only allowed in equations", offset)
            return var(name)
        if name in self.params:
            return param(name)
        raise ParseError(f"unknown identifier {name!r}", offset)


def parse_expression(text: str, params: Iterable[str] = (),
                     allow_derivatives: bool = False) -> Expr:
    """Parse an expression in x, y (and declared parameters)."""
    tokens = tokenize(text, equation=allow_derivatives)
    p = _Parser(tokens, len(text), frozenset(params), allow_derivatives)
    result = p.parse(1)
    tok = p.peek()
    if tok is not None:
        raise ParseError("unexpected trailing input", tok[2])
    return result


def parse_equation(text: str, params: Iterable[str] = ()) -> tuple[Expr, Expr]:
    """Parse ``lhs = rhs`` with y', y'' allowed; returns (lhs, rhs)."""
    tokens = tokenize(text, equation=True)
    split = [i for i, t in enumerate(tokens) if t[0] == "op" and t[1] == "="]
    if not split:
        raise ParseError("equation must contain '='", len(text))
    if len(split) > 1:
        raise ParseError("more than one '='", tokens[split[1]][2])
    cut = split[0]
    names = frozenset(params)
    left = _Parser(tokens[:cut], tokens[cut][2], names, True)
    lhs = left.parse(1)
    tok = left.peek()
    if tok is not None:
        raise ParseError("unexpected trailing input", tok[2])
    right = _Parser(tokens[cut + 1:], len(text), names, True)
    rhs = right.parse(1)
    tok = right.peek()
    if tok is not None:
        raise ParseError("unexpected trailing input", tok[2])
    return lhs, rhs
