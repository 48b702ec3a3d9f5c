"""Polynomials in ``x0 .. x{n-1}`` with a small text syntax.

Accepted syntax: real literals, variables ``x0``, ``x1``, ..., the operators
``+ - *``, integer powers written ``^`` or ``**``, and parentheses.  Fields
are written as comma-separated component polynomials, e.g. ``"1, x0^2 - x1"``.
"""

from __future__ import annotations

import ast
import re
from collections import defaultdict

import numpy as np

from .calculus import RealMap
from .errors import ContractError, LieGeomError


class ParseError(LieGeomError, ValueError):
    pass


_VAR = re.compile(r"x(\d+)\Z")


class Polynomial:
    """Sparse polynomial: ``{exponent tuple: coefficient}``."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict | None = None):
        self.nvars = nvars
        self.terms = {k: float(v) for k, v in (terms or {}).items() if v != 0}

    @classmethod
    def const(cls, nvars: int, c: float) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, i: int) -> "Polynomial":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1.0})

    def __add__(self, other: "Polynomial") -> "Polynomial":
        out = defaultdict(float, self.terms)
        for k, v in other.terms.items():
            out[k] += v
        return Polynomial(self.nvars, out)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.nvars, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        out = defaultdict(float)
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                out[tuple(a + b for a, b in zip(k1, k2))] += v1 * v2
        return Polynomial(self.nvars, out)

    def __pow__(self, n: int) -> "Polynomial":
        out = Polynomial.const(self.nvars, 1.0)
        for _ in range(n):
            out = out * self
        return out

    def __repr__(self):
        return f"Polynomial({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms, key=lambda e: (sum(e), [-t for t in e])):
            mono = "*".join(f"x{i}" + (f"^{p}" if p > 1 else "") for i, p in enumerate(k) if p)
            c = self.terms[k]
            parts.append(f"{c:g}" if not mono else (mono if c == 1 else f"{c:g}*{mono}"))
        return " + ".join(parts)

    @property
    def degree(self) -> int:
        return max((sum(k) for k in self.terms), default=0)

    def __call__(self, xs):
        """Evaluate on floats or on jets."""
        acc = 0.0
        for k, c in self.terms.items():
            t = c
            for x, p in zip(xs, k):
                if p:
                    t = t * (x if p == 1 else x ** p)
            acc = acc + t
        return acc

    @classmethod
    def random(cls, nvars: int, degree: int, rng: np.random.Generator, density: float = 0.6) -> "Polynomial":
        """Seeded random polynomial with coefficients in [-1, 1]."""
        terms = {}
        for e in np.ndindex(*(degree + 1,) * nvars):
            if sum(e) <= degree and rng.random() < density:
                terms[tuple(int(v) for v in e)] = round(float(rng.uniform(-1, 1)), 3)
        return cls(nvars, terms)


def _convert(node, nvars: int) -> Polynomial:
    if isinstance(node, ast.Expression):
        return _convert(node.body, nvars)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return Polynomial.const(nvars, float(node.value))
    if isinstance(node, ast.Name):
        m = _VAR.match(node.id)
        if not m:
            raise ParseError(f"unknown symbol {node.id!r}; variables are x0..x{nvars - 1}")
        i = int(m.group(1))
        if i >= nvars:
            raise ParseError(f"variable x{i} out of range; variables are x0..x{nvars - 1}")
        return Polynomial.var(nvars, i)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.UAdd, ast.USub)):
        p = _convert(node.operand, nvars)
        return -p if isinstance(node.op, ast.USub) else p
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            exp = node.right
            if isinstance(exp, ast.UnaryOp) and isinstance(exp.op, ast.UAdd):
                exp = exp.operand
            if not (isinstance(exp, ast.Constant) and type(exp.value) is int and exp.value >= 0):
                raise ParseError("exponents must be non-negative integer literals")
            return _convert(node.left, nvars) ** exp.value
        ops = {ast.Add: Polynomial.__add__, ast.Sub: Polynomial.__sub__, ast.Mult: Polynomial.__mul__}
        op = ops.get(type(node.op))
        if op is None:
            raise ParseError(f"operator {type(node.op).__name__} is not allowed")
        return op(_convert(node.left, nvars), _convert(node.right, nvars))
    raise ParseError(f"unsupported expression {ast.dump(node)[:60]}")


def parse_polynomial(text: str, nvars: int) -> Polynomial:
    # "^" would parse as xor, which binds looser than + and -
    try:
        tree = ast.parse(text.strip().replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse {text!r}: {exc.msg}") from None
    return _convert(tree, nvars)


def parse_field(text: str, nvars: int) -> list[Polynomial]:
    """Comma-separated component polynomials; exactly ``nvars`` of them."""
    parts = [s for s in text.split(",")]
    if len(parts) != nvars or any(not s.strip() for s in parts):
        raise ParseError(f"expected {nvars} comma-separated components, got {text!r}")
    return [parse_polynomial(s, nvars) for s in parts]


def polynomial_map(polys: list[Polynomial], name: str = "") -> RealMap:
    if not polys:
        raise ContractError("need at least one polynomial")
    n = polys[0].nvars
    if any(p.nvars != n for p in polys):
        raise ContractError("polynomials use different variable counts")
    return RealMap(n, len(polys), lambda xs: [p(xs) for p in polys], name or ", ".join(map(str, polys)))
