"""Scalar coefficient fields given as text expressions.

Space specs carry metric coefficients (g0 entries, one-form components,
conformal factors) as strings over the chart coordinates.  This module
parses them into immutable ASTs and evaluates them, either at a single
point or vectorized over numpy arrays of points.

Grammar (standard precedence, ``^`` binds tightest and is right
associative, unary minus sits between ``^`` and ``*``/``/``)::

    expr    := term (("+" | "-") term)*
    term    := factor (("*" | "/") factor)*
    factor  := "-" factor | power
    power   := atom ("^" factor)?
    atom    := NUMBER | NAME | NAME "(" expr ("," expr)* ")" | "(" expr ")"

Variables are limited to the four chart coordinates ``x, y, r, theta``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
import numpy as np

VARIABLES = ("x", "y", "r", "theta")

_FUNCTIONS = {
    "sqrt": 1,
    "exp": 1,
    "sin": 1,
    "cos": 1,
    "abs": 1,
    "min": 2,
    "max": 2,
}


class FieldParseError(ValueError):
    """Syntax or identifier error, with the byte offset of the problem."""

    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        self.offset = offset
        self.expected = expected
        detail = f"{message} at offset {offset}"
        if expected:
            detail += " (expected " + " | ".join(expected) + ")"
        super().__init__(detail)


class FieldDomainError(ArithmeticError):
    """Evaluation left the real domain (sqrt of a negative, division by zero)."""


# AST nodes are nested tuples:
#   ("num", float) | ("var", name) | ("neg", node)
#   | ("bin", op, left, right) | ("call", fname, args...)
Node = tuple


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            stripped = pos
            while stripped < len(text) and text[stripped].isspace():
                stripped += 1
            if stripped == len(text):
                break
            raise FieldParseError(f"unexpected character {text[stripped]!r}", stripped)
        start = _token_start(text, m)
        if m.group("num") is not None:
            tokens.append(("num", float(m.group(0).strip()), start))
        elif m.group("name") is not None:
            tokens.append(("name", m.group("name"), start))
        else:
            tokens.append(("op", m.group("op"), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


def _token_start(text: str, m) -> int:
    start = m.start()
    while start < m.end() and text[start].isspace():
        start += 1
    return start


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, off = self.peek()
        if kind != "op" or val != op:
            raise FieldParseError(f"got {val!r}" if kind != "end" else "unexpected end",
                                  off, expected=(op,))
        return self.next()

    def parse(self) -> Node:
        node = self.expr()
        kind, val, off = self.peek()
        if kind != "end":
            raise FieldParseError(f"trailing input {val!r}", off,
                                  expected=("+", "-", "*", "/", "^", "end"))
        return node

    def expr(self) -> Node:
        node = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.next()
                node = ("bin", val, node, self.term())
            else:
                return node

    def term(self) -> Node:
        node = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.next()
                node = ("bin", val, node, self.factor())
            else:
                return node

    def factor(self) -> Node:
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.next()
            return ("neg", self.factor())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.next()
            return ("bin", "^", base, self.factor())  # right associative
        return base

    def atom(self) -> Node:
        kind, val, off = self.next()
        if kind == "num":
            return ("num", val)
        if kind == "name":
            if val in _FUNCTIONS:
                self.expect_op("(")
                args = [self.expr()]
                while True:
                    k2, v2, o2 = self.peek()
                    if k2 == "op" and v2 == ",":
                        self.next()
                        args.append(self.expr())
                    else:
                        break
                self.expect_op(")")
                arity = _FUNCTIONS[val]
                if len(args) != arity:
                    raise FieldParseError(
                        f"{val} takes {arity} argument(s), got {len(args)}", off)
                return ("call", val, *args)
            if val in VARIABLES:
                return ("var", val)
            raise FieldParseError(f"unknown identifier {val!r}", off,
                                  expected=VARIABLES + tuple(_FUNCTIONS))
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise FieldParseError(f"got {val!r}" if kind != "end" else "unexpected end",
                              off, expected=("number", "name", "(", "-"))


_NP_FUNCS = {
    "sqrt": np.sqrt,
    "exp": np.exp,
    "sin": np.sin,
    "cos": np.cos,
    "abs": np.abs,
    "min": np.minimum,
    "max": np.maximum,
}


def _eval_node(node: Node, env: dict):
    tag = node[0]
    if tag == "num":
        return node[1]
    if tag == "var":
        try:
            return env[node[1]]
        except KeyError:
            raise FieldDomainError(f"coordinate {node[1]!r} not supplied") from None
    if tag == "neg":
        return -_eval_node(node[1], env)
    if tag == "bin":
        _, op, a, b = node
        va, vb = _eval_node(a, env), _eval_node(b, env)
        if op == "+":
            return va + vb
        if op == "-":
            return va - vb
        if op == "*":
            return va * vb
        if op == "/":
            return np.divide(va, vb)
        if op == "^":
            return np.power(va, vb)
    if tag == "call":
        fn = _NP_FUNCS[node[1]]
        return fn(*(_eval_node(a, env) for a in node[2:]))
    raise AssertionError(f"bad node {node!r}")


def _print_node(node: Node) -> str:
    tag = node[0]
    if tag == "num":
        v = node[1]
        return repr(v) if v != int(v) else str(int(v))
    if tag == "var":
        return node[1]
    if tag == "neg":
        return f"(-{_print_node(node[1])})"
    if tag == "bin":
        _, op, a, b = node
        return f"({_print_node(a)} {op} {_print_node(b)})"
    if tag == "call":
        return f"{node[1]}({', '.join(_print_node(a) for a in node[2:])})"
    raise AssertionError(f"bad node {node!r}")


@dataclass(frozen=True)
class FieldExpr:
    """Immutable parsed coefficient field."""

    ast: Node
    source: str

    def __call__(self, **coords):
        return self.evaluate(coords)

    def evaluate(self, coords: dict):
        """Evaluate at one point; raises FieldDomainError on a non-real result."""
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = _eval_node(self.ast, coords)
        val = float(out)
        if not math.isfinite(val):
            raise FieldDomainError(
                f"{self.source!r} is not finite at {coords}")
        return val

    def evaluate_array(self, coords: dict) -> np.ndarray:
        """Vectorized evaluation; non-finite entries are returned as-is.

        Builders validate finiteness over their whole sample in one shot.
        """
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = _eval_node(self.ast, coords)
        return np.asarray(out, dtype=float)

    def unparse(self) -> str:
        return _print_node(self.ast)


def parse_field(text: str) -> FieldExpr:
    """Parse an expression string into a FieldExpr.

    Raises FieldParseError (with byte offset and expected-token set) on
    malformed input or identifiers outside the coordinate/function sets.
    """
    if not text or not text.strip():
        raise FieldParseError("empty expression", 0, expected=("number", "name", "("))
    return FieldExpr(_Parser(text).parse(), text)


def eval_field(expr: FieldExpr, coords: dict) -> float:
    """Deterministic double-precision evaluation at one point."""
    return expr.evaluate(coords)


def constant_field(value: float) -> FieldExpr:
    return FieldExpr(("num", float(value)), repr(float(value)))
