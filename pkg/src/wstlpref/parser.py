"""Recursive-descent parser for the formula grammar.

Grammar (EBNF, whitespace-insensitive)::

    formula   = implies ;
    implies   = or , [ "=>" , implies ] ;          (* right associative *)
    or        = and , { "|" , [pin2] , and } ;
    and       = until , { "&" , [pin2] , until } ;
    until     = unary , { "U" , [interval] , [pinU] , unary } ;
    unary     = "!" , unary
              | ("G" | "F") , [interval] , [pinN] , unary
              | atom ;
    atom      = "true" | "(" , formula , ")" | predicate | ident ;
    predicate = affine , (">=" | "<=") , "0" ;
    affine    = ["-"] , term , { ("+" | "-") , term } ;
    term      = number , ["*" , ident] | ident ;
    interval  = "[" , int , "," , (int | "inf") , "]" ;
    pin2      = "{" , number , "," , number , "}" ;
    pinN      = "{" , number , { "," , number } , "}" ;
    pinU      = "{" , numbers , ";" , numbers , "}" ;

`a => b` desugars to `!a | b` (the disjunction owns the weight slots).
`e <= 0` normalizes to `-e >= 0`.  A bare identifier is shorthand for
`ident >= 0`, the usual spelling for boolean channels.  An omitted
interval means unbounded.  Pinning fixes every weight of one operator to
positive constants; unbounded operators cannot be pinned because their
block length depends on the evaluation horizon.  `U`, `G`, `F` and
`true` are reserved words.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .formula import (
    UNBOUNDED,
    Always,
    And,
    Eventually,
    Formula,
    Interval,
    Not,
    Or,
    Pred,
    TrueNode,
    Until,
)
from .signals import PredicateFn


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>\d+\.\d*(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?|\d+(?:[eE][-+]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>=>|>=|<=|[!&|()\[\]{},;*+-])
    """,
    re.VERBOSE,
)

_RESERVED = {"true", "U", "G", "F"}


@dataclass(frozen=True)
class _Token:
    kind: str  # number | ident | op | end
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        chunk = m.group()
        if kind != "ws":
            tokens.append(_Token(kind, chunk, line, col))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    tokens.append(_Token("end", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    # -- token helpers ----------------------------------------------------

    @property
    def cur(self) -> _Token:
        return self.tokens[self.pos]

    def _fail(self, message: str):
        raise ParseError(message, self.cur.line, self.cur.col)

    def advance(self) -> _Token:
        tok = self.cur
        self.pos += 1
        return tok

    def at_op(self, text: str) -> bool:
        return self.cur.kind == "op" and self.cur.text == text

    def accept_op(self, text: str) -> bool:
        if self.at_op(text):
            self.pos += 1
            return True
        return False

    def expect_op(self, text: str) -> None:
        if not self.accept_op(text):
            self._fail(f"expected {text!r}, found {self.cur.text or 'end of input'!r}")

    def at_keyword(self, word: str) -> bool:
        return self.cur.kind == "ident" and self.cur.text == word

    # -- grammar ----------------------------------------------------------

    def parse(self) -> Formula:
        phi = self.implies()
        if self.cur.kind != "end":
            self._fail(f"trailing input starting at {self.cur.text!r}")
        return phi

    def implies(self) -> Formula:
        lhs = self.or_()
        if self.accept_op("=>"):
            rhs = self.implies()
            return Or(Not(lhs), rhs)
        return lhs

    def or_(self) -> Formula:
        node = self.and_()
        while self.at_op("|"):
            self.advance()
            pin = self.maybe_pin_pair()
            node = Or(node, self.and_(), pin)
        return node

    def and_(self) -> Formula:
        node = self.until()
        while self.at_op("&"):
            self.advance()
            pin = self.maybe_pin_pair()
            node = And(node, self.until(), pin)
        return node

    def until(self) -> Formula:
        node = self.unary()
        while self.at_keyword("U"):
            tok = self.advance()
            interval = self.maybe_interval()
            pin = None
            if self.at_op("{"):
                if not interval.bounded:
                    raise ParseError(
                        "cannot pin weights of an unbounded operator", tok.line, tok.col
                    )
                n = interval.b - interval.a + 1
                pin = self.pin_until(n)
            node = Until(node, self.unary(), interval, pin)
        return node

    def unary(self) -> Formula:
        if self.accept_op("!"):
            return Not(self.unary())
        if self.at_keyword("G") or self.at_keyword("F"):
            tok = self.advance()
            interval = self.maybe_interval()
            pin = None
            if self.at_op("{"):
                if not interval.bounded:
                    raise ParseError(
                        "cannot pin weights of an unbounded operator", tok.line, tok.col
                    )
                pin = self.pin_block(interval.b - interval.a + 1)
            child = self.unary()
            cls = Always if tok.text == "G" else Eventually
            return cls(child, interval, pin)
        return self.atom()

    def atom(self) -> Formula:
        if self.at_keyword("true"):
            self.advance()
            return TrueNode()
        if self.cur.kind == "ident" and self.cur.text in _RESERVED - {"true"}:
            self._fail(f"{self.cur.text!r} is a reserved word")
        if self.at_op("("):
            # Parenthesis opens a subformula; affine expressions carry no parens.
            self.advance()
            phi = self.implies()
            self.expect_op(")")
            return phi
        return self.predicate()

    def predicate(self) -> Formula:
        if self.cur.kind not in ("ident", "number") and not self.at_op("-"):
            self._fail(f"expected a formula, found {self.cur.text or 'end of input'!r}")
        fn = self.affine()
        if self.accept_op(">="):
            self.expect_zero()
            return Pred(fn)
        if self.accept_op("<="):
            self.expect_zero()
            return Pred(fn.negated())
        if len(fn.coeffs) == 1 and fn.coeffs[0][1] == 1.0 and fn.offset == 0.0:
            return Pred(fn)  # bare identifier: shorthand for `ident >= 0`
        self._fail("expected '>= 0' or '<= 0' after affine expression")

    def expect_zero(self) -> None:
        tok = self.cur
        if tok.kind != "number" or float(tok.text) != 0.0:
            self._fail("predicates compare against 0")
        self.advance()

    def affine(self) -> PredicateFn:
        coeffs: dict[str, float] = {}
        offset = 0.0
        sign = 1.0
        if self.accept_op("-"):
            sign = -1.0
        while True:
            coeff, ident = self.term()
            if ident is None:
                offset += sign * coeff
            else:
                coeffs[ident] = coeffs.get(ident, 0.0) + sign * coeff
            if self.accept_op("+"):
                sign = 1.0
            elif self.accept_op("-"):
                sign = -1.0
            else:
                break
        return PredicateFn(tuple(coeffs.items()), offset)

    def term(self) -> tuple[float, str | None]:
        if self.cur.kind == "number":
            value = float(self.advance().text)
            if self.accept_op("*"):
                return value, self.expect_ident()
            return value, None
        return 1.0, self.expect_ident()

    def expect_ident(self) -> str:
        if self.cur.kind != "ident":
            self._fail(f"expected a channel name, found {self.cur.text or 'end of input'!r}")
        if self.cur.text in _RESERVED:
            self._fail(f"{self.cur.text!r} is a reserved word")
        return self.advance().text

    def maybe_interval(self) -> Interval:
        if not self.at_op("["):
            return Interval(0, UNBOUNDED)
        tok = self.advance()
        a = self.expect_int()
        self.expect_op(",")
        if self.at_keyword("inf"):
            self.advance()
            self.expect_op("]")
            return Interval(a, UNBOUNDED)
        b = self.expect_int()
        self.expect_op("]")
        if b < a:
            raise ParseError(f"malformed interval [{a},{b}]", tok.line, tok.col)
        return Interval(a, b)

    def expect_int(self) -> int:
        if self.cur.kind != "number" or not self.cur.text.isdigit():
            self._fail("interval bounds must be non-negative integers")
        return int(self.advance().text)

    def number_list(self, stop_ops: tuple[str, ...]) -> list[float]:
        values = [self.expect_number()]
        while self.accept_op(","):
            values.append(self.expect_number())
        if not (self.cur.kind == "op" and self.cur.text in stop_ops):
            self._fail(f"expected one of {stop_ops} in weight block")
        return values

    def expect_number(self) -> float:
        neg = self.accept_op("-")
        if self.cur.kind != "number":
            self._fail("expected a number")
        v = float(self.advance().text)
        return -v if neg else v

    def pin_values(self, n: int, values: list[float], tok: _Token) -> tuple[float, ...]:
        if len(values) != n:
            raise ParseError(
                f"expected {n} pinned weights, got {len(values)}", tok.line, tok.col
            )
        if any(v <= 0 for v in values):
            raise ParseError("pinned weights must be positive", tok.line, tok.col)
        return tuple(values)

    def maybe_pin_pair(self):
        if not self.at_op("{"):
            return None
        return self.pin_block(2)

    def pin_block(self, n: int) -> tuple[float, ...]:
        tok = self.cur
        self.expect_op("{")
        values = self.number_list(("}",))
        self.expect_op("}")
        return self.pin_values(n, values, tok)

    def pin_until(self, n: int):
        tok = self.cur
        self.expect_op("{")
        w1 = self.number_list((";",))
        self.expect_op(";")
        w2 = self.number_list(("}",))
        self.expect_op("}")
        return (self.pin_values(n, w1, tok), self.pin_values(n, w2, tok))


def parse(text: str) -> Formula:
    """Parse formula text into a syntax tree."""
    return _Parser(text).parse()
