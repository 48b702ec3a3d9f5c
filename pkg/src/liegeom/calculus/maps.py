"""Maps between Euclidean spaces that can be evaluated on floats or on jets."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..errors import ContractError, UnsupportedOrderError
from . import jet as J
from .jet import MAX_ORDER, Jet, get_space


@dataclass(frozen=True, eq=False)
class RealMap:
    """A map ``R^in_dim -> R^out_dim`` given by a scalar-generic expression.

    ``fn`` receives a list of ``in_dim`` scalars (floats or jets of one
    space) and returns ``out_dim`` scalars built with ordinary arithmetic and
    the elementary functions of :mod:`liegeom.calculus.jet`.
    """

    in_dim: int
    out_dim: int
    fn: Callable[[list], Sequence]
    name: str = ""

    def _check_point(self, p) -> list:
        p = np.asarray(p, dtype=float).reshape(-1)
        if p.size != self.in_dim:
            raise ContractError(f"{self.name or 'map'} expects {self.in_dim} inputs, got {p.size}")
        return [float(v) for v in p]

    def _check_out(self, out) -> list:
        out = list(out)
        if len(out) != self.out_dim:
            raise ContractError(f"{self.name or 'map'} produced {len(out)} outputs, declared {self.out_dim}")
        return out

    def __call__(self, p) -> np.ndarray:
        out = self._check_out(self.fn(self._check_point(p)))
        return np.array([float(v) for v in out])

    def jet(self, p, order: int, max_order: int = MAX_ORDER) -> list[Jet]:
        """Jets of every output coordinate at ``p`` up to ``order``."""
        if order < 0:
            raise ContractError(f"negative order {order}")
        if order > max_order:
            raise UnsupportedOrderError(f"order {order} exceeds the supported maximum {max_order}")
        xs = self._check_point(p)
        space = get_space(self.in_dim, order)
        seeds = [Jet.variable(v, i, space) for i, v in enumerate(xs)]
        out = self._check_out(self.fn(seeds))
        return [o if isinstance(o, Jet) else Jet.constant(o, space) for o in out]

    def jacobian(self, p) -> np.ndarray:
        return np.array([j.gradient() for j in self.jet(p, 1)])


def jet_eval(f: RealMap, p, order: int, max_order: int = MAX_ORDER) -> list[Jet]:
    return f.jet(p, order, max_order=max_order)


def fd_derivative(f: RealMap, p, direction, h: float = 1e-5):
    """Central difference ``(f(p + h d) - f(p - h d)) / 2h``; a float for scalar maps."""
    if h <= 0:
        raise ContractError("finite-difference step must be positive")
    p = np.asarray(p, dtype=float)
    d = np.asarray(direction, dtype=float)
    if d.shape != p.shape:
        raise ContractError(f"direction shape {d.shape} does not match point shape {p.shape}")
    out = (f(p + h * d) - f(p - h * d)) / (2 * h)
    return float(out[0]) if f.out_dim == 1 else out


def fd_jacobian(f: RealMap, p, h: float = 1e-5) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    cols = []
    for i in range(f.in_dim):
        e = np.zeros(f.in_dim)
        e[i] = 1.0
        cols.append((f(p + h * e) - f(p - h * e)) / (2 * h))
    return np.array(cols).T


def fd_hessians(f: RealMap, p, h: float = 1e-4) -> np.ndarray:
    """Second-derivative estimates, shape ``(out_dim, in_dim, in_dim)``."""
    p = np.asarray(p, dtype=float)
    n = f.in_dim
    eye = np.eye(n) * h
    f0 = f(p)
    out = np.zeros((f.out_dim, n, n))
    for i in range(n):
        out[:, i, i] = (f(p + eye[i]) - 2 * f0 + f(p - eye[i])) / h**2
        for j in range(i + 1, n):
            v = (
                f(p + eye[i] + eye[j])
                - f(p + eye[i] - eye[j])
                - f(p - eye[i] + eye[j])
                + f(p - eye[i] - eye[j])
            ) / (4 * h**2)
            out[:, i, j] = out[:, j, i] = v
    return out


# -- combinators ----------------------------------------------------------------


def map_compose(g: RealMap, f: RealMap) -> RealMap:
    """``g o f``."""
    if f.out_dim != g.in_dim:
        raise ContractError(f"cannot compose: inner map has {f.out_dim} outputs, outer takes {g.in_dim}")
    return RealMap(f.in_dim, g.out_dim, lambda xs: g.fn(list(f.fn(xs))), f"{g.name}∘{f.name}")


def _same_shape(f: RealMap, g: RealMap):
    if (f.in_dim, f.out_dim) != (g.in_dim, g.out_dim):
        raise ContractError(
            f"pointwise operation on maps of shape {f.in_dim}->{f.out_dim} and {g.in_dim}->{g.out_dim}"
        )


def map_add(f: RealMap, g: RealMap) -> RealMap:
    _same_shape(f, g)
    return RealMap(f.in_dim, f.out_dim, lambda xs: [a + b for a, b in zip(f.fn(xs), g.fn(xs))], f"({f.name}+{g.name})")


def map_sub(f: RealMap, g: RealMap) -> RealMap:
    _same_shape(f, g)
    return RealMap(f.in_dim, f.out_dim, lambda xs: [a - b for a, b in zip(f.fn(xs), g.fn(xs))], f"({f.name}-{g.name})")


def map_scale(a: float, f: RealMap) -> RealMap:
    a = float(a)
    return RealMap(f.in_dim, f.out_dim, lambda xs: [a * v for v in f.fn(xs)], f"{a:g}*{f.name}")


def map_mul(f: RealMap, g: RealMap) -> RealMap:
    """Pointwise (componentwise) product."""
    _same_shape(f, g)
    return RealMap(f.in_dim, f.out_dim, lambda xs: [a * b for a, b in zip(f.fn(xs), g.fn(xs))], f"({f.name}*{g.name})")


def map_product(f: RealMap, g: RealMap) -> RealMap:
    """``(x, y) -> (f(x), g(y))`` on the concatenated space."""
    n = f.in_dim
    return RealMap(
        f.in_dim + g.in_dim,
        f.out_dim + g.out_dim,
        lambda xs: list(f.fn(xs[:n])) + list(g.fn(xs[n:])),
        f"({f.name}×{g.name})",
    )


def identity_map(n: int) -> RealMap:
    return RealMap(n, n, lambda xs: list(xs), f"id{n}")


def constant_map(in_dim: int, value) -> RealMap:
    value = [float(v) for v in np.atleast_1d(value)]
    return RealMap(in_dim, len(value), lambda xs: list(value), "const")


def coordinate_map(n: int, i: int) -> RealMap:
    return RealMap(n, 1, lambda xs: [xs[i]], f"x{i}")


def affine_map(A, b=None) -> RealMap:
    """``x -> A x + b``."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    m, n = A.shape
    b = np.zeros(m) if b is None else np.asarray(b, dtype=float)
    rows = [[float(v) for v in row] for row in A]
    shift = [float(v) for v in b]

    def fn(xs):
        out = []
        for row, s in zip(rows, shift):
            acc = s
            for a, x in zip(row, xs):
                if a != 0.0:
                    acc = acc + a * x
            out.append(acc)
        return out

    return RealMap(n, m, fn, "affine")


def function_battery(dim: int) -> list[RealMap]:
    """Ten fixed scalar test functions on ``R^dim``: eight polynomials, two transcendental."""
    last = dim - 1
    nxt = 1 % dim

    def poly(name, expr):
        return RealMap(dim, 1, lambda xs: [expr(xs)], name)

    return [
        poly("x0", lambda x: x[0]),
        poly("2-3x_last", lambda x: 2.0 - 3.0 * x[last]),
        poly("x0^2", lambda x: x[0] * x[0]),
        poly("x0*x_last+x0", lambda x: x[0] * x[last] + x[0]),
        poly("x0^3-x_last", lambda x: x[0] ** 3 - x[last]),
        poly("x0^2*x_last-x_last^3/2", lambda x: x[0] ** 2 * x[last] - 0.5 * x[last] ** 3),
        poly("|x|^2", lambda x: sum(v * v for v in x)),
        poly("1+x0*x1*x_last", lambda x: 1.0 + x[0] * x[nxt] * x[last]),
        poly("sin(x0)cos(x_last)", lambda x: J.sin(x[0]) * J.cos(x[last])),
        poly("exp((x0-x_last^2)/2)", lambda x: J.exp(0.5 * (x[0] - x[last] * x[last]))),
    ]
