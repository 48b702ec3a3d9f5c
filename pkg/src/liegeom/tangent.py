"""Tangent vectors in chart coordinates, push-forwards and tangent-bundle charts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .calculus import (
    DEFAULT_ORDER,
    DEFAULT_TOL,
    RealMap,
    SmoothnessReport,
    directional_derivative,
    smooth_on_probe,
)
from .errors import ContractError, EvaluationError, LieGeomError, OutOfDomainError
from .geometry import Chart, Manifold, Region, image_region

DEFAULT_VECTOR_BOX = 1.0


def _as_point(p) -> np.ndarray:
    return np.asarray(p, dtype=float).reshape(-1)


def _floats(v) -> list:
    return [float(t) for t in np.asarray(v, dtype=float).reshape(-1)]


def _evaluate(fn, *args):
    try:
        return fn(*args)
    except LieGeomError:
        raise
    except (ArithmeticError, ValueError, OverflowError) as exc:
        raise EvaluationError(str(exc)) from exc


class TangentVector:
    """Vector at ``base`` with components ``comps`` in the frame of ``chart``."""

    __slots__ = ("base", "chart", "comps")

    def __init__(self, base, chart: Chart, comps):
        base = _as_point(base)
        comps = _as_point(comps)
        if base.size != chart.ambient_dim:
            raise ContractError(f"base point has {base.size} coordinates, chart ambient is {chart.ambient_dim}")
        if comps.size != chart.dim:
            raise ContractError(f"{comps.size} components given for a {chart.dim}-dimensional chart")
        if not chart.domain.contains(base):
            raise OutOfDomainError(f"{base.tolist()} is not in the domain of chart {chart.id!r}")
        self.base = base
        self.chart = chart
        self.comps = comps

    @property
    def chart_id(self) -> str:
        return self.chart.id

    def __repr__(self):
        return f"TangentVector(base={self.base.tolist()}, chart={self.chart.id!r}, comps={self.comps.tolist()})"

    def _same_frame(self, other: "TangentVector"):
        if other.chart is not self.chart or not np.array_equal(other.base, self.base):
            raise ContractError("tangent vectors live at different points or in different charts")

    def __add__(self, other: "TangentVector") -> "TangentVector":
        self._same_frame(other)
        return TangentVector(self.base, self.chart, self.comps + other.comps)

    def __sub__(self, other: "TangentVector") -> "TangentVector":
        self._same_frame(other)
        return TangentVector(self.base, self.chart, self.comps - other.comps)

    def __mul__(self, a: float) -> "TangentVector":
        return TangentVector(self.base, self.chart, float(a) * self.comps)

    __rmul__ = __mul__

    def __neg__(self) -> "TangentVector":
        return self * -1.0


@dataclass(frozen=True)
class TMPoint:
    """A point of the tangent bundle: base point plus a vector at it."""

    base: np.ndarray
    vec: TangentVector

    def __post_init__(self):
        if not np.array_equal(_as_point(self.base), self.vec.base):
            raise ContractError("bundle point and its vector have different base points")


# -- scalar-generic kernels (work on floats and on jets) -----------------------------


def chart_directional(chart: Chart, f_fn, p, comps):
    """``D(f o chart^-1)(chart(p))[comps]`` for a list-valued ``f_fn``."""
    u = list(chart.fwd.fn(list(p)))
    inv = chart.inv.fn
    return directional_derivative(lambda z: f_fn(inv(z)), u, list(comps))


def transition_directional(c1: Chart, c2: Chart, u, comps):
    """Jacobian of ``c2 o c1^-1`` at chart coordinates ``u`` applied to ``comps``."""
    inv, fwd = c1.inv.fn, c2.fwd.fn
    return directional_derivative(lambda z: fwd(inv(z)), list(u), list(comps))


# -- operations ------------------------------------------------------------------------


def tangent_apply(v: TangentVector, f: RealMap) -> float:
    """Action of ``v`` on a scalar function: directional derivative of ``f o chart^-1``."""
    if f.out_dim != 1 or f.in_dim != v.chart.ambient_dim:
        raise ContractError("tangent vectors act on scalar functions of the ambient space")
    return float(_evaluate(chart_directional, v.chart, f.fn, _floats(v.base), _floats(v.comps))[0])


def coordinate_vector(chart: Chart, p, b) -> TangentVector:
    """Tangent vector at ``p`` with components ``b`` (an index selects a basis vector)."""
    if isinstance(b, (int, np.integer)):
        if not 0 <= b < chart.dim:
            raise ContractError(f"basis index {b} out of range for dimension {chart.dim}")
        b = np.eye(chart.dim)[b]
    return TangentVector(p, chart, b)


def coord_fun(chart: Chart, p, i: int) -> RealMap:
    """``x -> (chart(x) - chart(p))_i``, the function whose derivative reads off component ``i``."""
    c0 = float(chart.fwd(p)[i])
    fwd = chart.fwd.fn
    return RealMap(chart.ambient_dim, 1, lambda xs: [fwd(xs)[i] - c0], f"{chart.id}_{i}")


def component_function(v: TangentVector, chart: Chart) -> np.ndarray:
    """Components of ``v`` in the frame of ``chart``."""
    if not chart.domain.contains(v.base):
        raise OutOfDomainError(f"{v.base.tolist()} is not in the domain of chart {chart.id!r}")
    if chart is v.chart:
        return v.comps.copy()
    u = v.chart.fwd(v.base)
    out = _evaluate(transition_directional, v.chart, chart, _floats(u), _floats(v.comps))
    return np.array([float(t) for t in out])


def change_chart(v: TangentVector, chart: Chart) -> TangentVector:
    return TangentVector(v.base, chart, component_function(v, chart))


def push_forward(F: RealMap, src: Manifold, dst: Manifold, v: TangentVector,
                 dst_chart: Chart | None = None) -> TangentVector:
    """Differential of ``F`` at ``v.base`` applied to ``v``.

    The result is expressed in ``dst_chart`` or else in the first chart of
    ``dst`` that covers ``F(v.base)``.
    """
    if F.in_dim != src.ambient_dim or F.out_dim != dst.ambient_dim:
        raise ContractError("map does not go between the ambient spaces of the manifolds")
    q = _evaluate(F, v.base)
    if dst_chart is None:
        try:
            dst_chart = dst.covering_chart(q)
        except OutOfDomainError:
            raise OutOfDomainError(f"F maps {v.base.tolist()} outside every chart of {dst.name!r}") from None
    elif not dst_chart.domain.contains(q):
        raise OutOfDomainError(f"chart {dst_chart.id!r} does not cover F(p) = {q.tolist()}")
    c1, c2 = v.chart, dst_chart
    Ffn, fwd = F.fn, c2.fwd.fn
    out = _evaluate(chart_directional, c1, lambda xs: fwd(Ffn(xs)), _floats(v.base), _floats(v.comps))
    return TangentVector(q, c2, [float(t) for t in out])


# -- tangent bundle charts ------------------------------------------------------------


def apply_chart_TM(chart: Chart, tm: TMPoint) -> tuple[np.ndarray, np.ndarray]:
    if not chart.domain.contains(tm.base):
        raise OutOfDomainError(f"{np.asarray(tm.base).tolist()} is not in the domain of chart {chart.id!r}")
    return chart.fwd(tm.base), component_function(tm.vec, chart)


def inv_chart_TM(chart: Chart, x, u) -> TMPoint:
    x = _as_point(x)
    if not chart.codomain.contains(x):
        raise OutOfDomainError(f"{x.tolist()} is not in the codomain of chart {chart.id!r}")
    p = chart.inv(x)
    # the coordinate-vector combination sum_i u_i * d/dx_i is the vector with components u
    return TMPoint(p, TangentVector(p, chart, u))


def domain_TM(chart: Chart):
    """Membership in the bundle-chart domain: the base point lies in the chart domain."""
    return lambda tm: chart.domain.contains(tm.base) and tm.vec.comps.size == chart.dim


def codomain_TM(chart: Chart):
    e = chart.dim
    return lambda xu: chart.codomain.contains(np.asarray(xu, dtype=float)[:e])


def tm_transition(c1: Chart, c2: Chart) -> RealMap:
    """``apply_chart_TM c2 o inv_chart_TM c1`` as a map on ``R^(2e)``."""
    e = c1.dim
    inv, fwd = c1.inv.fn, c2.fwd.fn

    def fn(z):
        x, u = list(z[:e]), list(z[e:])
        y = fwd(inv(x))
        return list(y) + list(directional_derivative(lambda w: fwd(inv(w)), x, u))

    return RealMap(2 * e, 2 * e, fn, f"TM({c1.id}->{c2.id})")


def vector_box(dim: int, n: int, seed: int, half_width: float = DEFAULT_VECTOR_BOX) -> Region:
    """Fibre samples: seeded vectors in ``[-half_width, half_width]^dim`` (the fibre is all of R^dim)."""
    rng = np.random.default_rng(seed)
    pts = np.vstack([np.zeros((1, dim)), rng.uniform(-half_width, half_width, (n - 1, dim))])
    return Region(dim, lambda u: True, pts, np.ones(len(pts)), name=f"R^{dim}", seed=seed)


def atlas_TM_check(c1: Chart, c2: Chart, order: int = DEFAULT_ORDER, tol: float = DEFAULT_TOL,
                   n_vectors: int = 4, seed: int = 0) -> SmoothnessReport:
    """Probe the bundle-chart transition on sampled ``(x, u)`` over the chart overlap."""
    if (c1.ambient_dim, c1.dim) != (c2.ambient_dim, c2.dim):
        raise ContractError("bundle charts must come from one manifold")
    overlap = c1.domain.intersect(c2.domain)
    if overlap.is_empty:
        return SmoothnessReport.vacuous(order, tol, seed)
    base = image_region(c1.fwd, c1.inv, overlap, c1.codomain, name=f"{c1.id}(overlap)")
    if base.is_empty:
        return SmoothnessReport.vacuous(order, tol, seed)
    region = base.product(vector_box(c1.dim, n_vectors, seed), seed=seed)
    return smooth_on_probe(region, tm_transition(c1, c2), order, tol=tol)
