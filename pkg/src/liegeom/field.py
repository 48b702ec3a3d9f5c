"""Vector fields, their action on functions, derivations and the Lie bracket."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .calculus import (
    DEFAULT_ORDER,
    DEFAULT_TOL,
    RealMap,
    SmoothnessReport,
    constant_map,
    directional_derivative,
    function_battery,
    map_add,
    map_mul,
    map_scale,
    merge_reports,
    smooth_on_probe,
    value_of,
)
from .errors import ContractError, LieGeomError
from .geometry import Chart, Manifold, Region, charts_submanifold
from .tangent import TangentVector, chart_directional, transition_directional

_EVAL_FAILURES = (ArithmeticError, ValueError, OverflowError, LieGeomError)


class VectorField:
    """Per-chart component maps ``chart codomain -> R^e`` on one manifold."""

    def __init__(self, manifold: Manifold, comps_in: dict, name: str = ""):
        missing = [c.id for c in manifold.charts if c.id not in comps_in]
        if missing:
            raise ContractError(f"no components given for charts {missing}")
        e = manifold.dim
        for cid, m in comps_in.items():
            if (m.in_dim, m.out_dim) != (e, e):
                raise ContractError(f"components in chart {cid!r} must map R^{e} -> R^{e}")
        self.manifold = manifold
        self.comps_in = {c.id: comps_in[c.id] for c in manifold.charts}
        self.name = name

    def __repr__(self):
        return f"VectorField({self.name!r} on {self.manifold.name!r})"

    @classmethod
    def from_chart(cls, M: Manifold, chart_id: str, comps: RealMap, name: str = "") -> "VectorField":
        """Field given in one chart, transported to the others by transition Jacobians.

        Only meaningful where the given chart covers the other chart's domain.
        """
        c0 = M.chart(chart_id)
        maps = {}
        for c in M.charts:
            if c is c0:
                maps[c.id] = comps
            else:
                maps[c.id] = _transported(c0, c, comps)
        return cls(M, maps, name)

    @classmethod
    def constant(cls, M: Manifold, vec, name: str = "") -> "VectorField":
        """Field with constant components ``vec`` in the first chart."""
        return cls.from_chart(M, M.charts[0].id, constant_map(M.dim, vec), name or f"const{list(vec)}")

    @classmethod
    def zero(cls, M: Manifold) -> "VectorField":
        return cls(M, {c.id: constant_map(M.dim, np.zeros(M.dim)) for c in M.charts}, "0")

    def _check_same(self, other: "VectorField"):
        if other.manifold is not self.manifold:
            raise ContractError("vector fields live on different manifolds")

    def __add__(self, other: "VectorField") -> "VectorField":
        self._check_same(other)
        return VectorField(self.manifold, {k: map_add(m, other.comps_in[k]) for k, m in self.comps_in.items()},
                           f"({self.name}+{other.name})")

    def scale(self, a: float) -> "VectorField":
        return VectorField(self.manifold, {k: map_scale(a, m) for k, m in self.comps_in.items()},
                           f"{float(a):g}{self.name}")

    def __mul__(self, a: float) -> "VectorField":
        return self.scale(a)

    __rmul__ = __mul__

    def __neg__(self) -> "VectorField":
        return self.scale(-1.0)

    def __sub__(self, other: "VectorField") -> "VectorField":
        return self + other.scale(-1.0)

    def comps_at(self, p) -> np.ndarray:
        return vf_apply(self, p).comps

    def rough_check(self) -> bool:
        """Every carrier sample gets a finite vector based at it in a covering chart."""
        for p in self.manifold.carrier.points:
            try:
                v = vf_apply(self, p)
            except _EVAL_FAILURES:
                return False
            if not np.all(np.isfinite(v.comps)) or not np.array_equal(v.base, p):
                return False
        return True


def _transported(c0: Chart, c: Chart, comps: RealMap) -> RealMap:
    inv, fwd0, cfn = c.inv.fn, c0.fwd.fn, comps.fn

    def fn(u):
        y0 = list(fwd0(inv(list(u))))
        return transition_directional(c0, c, y0, cfn(y0))

    return RealMap(comps.in_dim, comps.out_dim, fn, f"{comps.name}@{c.id}")


def _chart_at(M: Manifold, p) -> Chart:
    return M.covering_chart([value_of(t) for t in p])


def vf_apply(X: VectorField, p) -> TangentVector:
    """Vector of ``X`` at ``p`` in the first covering chart."""
    p = np.asarray(p, dtype=float).reshape(-1)
    c = X.manifold.covering_chart(p)
    return TangentVector(p, c, X.comps_in[c.id](c.fwd(p)))


def vf_sharp(X: VectorField, f: RealMap) -> RealMap:
    """The function ``p -> X_p(f)``; jet-evaluable, consuming one derivative order."""
    M = X.manifold
    if f.out_dim != 1 or f.in_dim != M.ambient_dim:
        raise ContractError("the ♯-action takes scalar functions of the ambient space")
    ffn = f.fn

    def fn(ps):
        c = _chart_at(M, ps)
        u = list(c.fwd.fn(list(ps)))
        return chart_directional(c, ffn, ps, X.comps_in[c.id].fn(u))

    return RealMap(M.ambient_dim, 1, fn, f"{X.name}♯{f.name}")


def vf_restrict(X: VectorField, U: Region) -> VectorField:
    sub = charts_submanifold(X.manifold, U)
    return VectorField(sub, {c.id: X.comps_in[c.id] for c in sub.charts}, f"{X.name}|{U.name}")


# -- smoothness ---------------------------------------------------------------------------


def _bundle_section(X: VectorField, c: Chart) -> RealMap:
    """``u -> apply_chart_TM c (p, X p)`` with ``p = c^-1(u)``."""
    M = X.manifold
    inv, fwd = c.inv.fn, c.fwd.fn

    def fn(u):
        p = list(inv(list(u)))
        c1 = _chart_at(M, p)
        u1 = list(c1.fwd.fn(p))
        w = X.comps_in[c1.id].fn(u1)
        comps = list(w) if c1 is c else transition_directional(c1, c, u1, w)
        return list(fwd(p)) + comps

    return RealMap(M.dim, 2 * M.dim, fn, f"TM∘{X.name}@{c.id}")


@dataclass(frozen=True)
class VFSmoothnessReport:
    """Both smoothness routes for a vector field and whether they agree."""

    bundle_passed: bool
    local_passed: bool
    bundle: dict = field(default_factory=dict)
    local: dict = field(default_factory=dict)
    uncovered: tuple = ()
    samples_checked: int = 0

    @property
    def consistent(self) -> bool:
        return self.bundle_passed == self.local_passed

    @property
    def passed(self) -> bool:
        return self.bundle_passed and self.local_passed

    @property
    def max_residual(self) -> float:
        reps = list(self.bundle.values()) + list(self.local.values())
        return max((r.max_fd_residual for r in reps if r is not None), default=0.0)

    def merged(self) -> SmoothnessReport:
        return merge_reports([r for r in list(self.bundle.values()) + list(self.local.values()) if r is not None])


def smooth_vf_check(X: VectorField, order: int = DEFAULT_ORDER, tol: float = DEFAULT_TOL) -> VFSmoothnessReport:
    M = X.manifold
    local = {c.id: smooth_on_probe(c.codomain, X.comps_in[c.id], order, tol=tol) for c in M.charts}
    local_passed = all(r.passed for r in local.values())

    bundle: dict = {}

    def probe(c: Chart):
        if c.id not in bundle:
            # the field must send the chart domain into the bundle chart's domain
            try:
                image_ok = all(
                    np.all(np.isfinite(X.comps_in[_chart_at(M, p).id](_chart_at(M, p).fwd(p))))
                    for p in c.domain.points
                )
            except _EVAL_FAILURES:
                image_ok = False
            bundle[c.id] = smooth_on_probe(c.codomain, _bundle_section(X, c), order, tol=tol) if image_ok else None
        return bundle[c.id]

    uncovered = []
    for p in M.carrier.points:
        if not any((r := probe(c)) is not None and r.passed for c in M.covering_charts(p)):
            uncovered.append(p)
    return VFSmoothnessReport(not uncovered, local_passed, bundle, local, tuple(uncovered), len(M.carrier.points))


# -- bracket --------------------------------------------------------------------------------


def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    """``[X, Y]`` by the coordinate formula ``DY[X] - DX[Y]`` in every chart."""
    X._check_same(Y)
    maps = {}
    for cid in X.comps_in:
        xfn, yfn = X.comps_in[cid].fn, Y.comps_in[cid].fn

        def fn(u, xfn=xfn, yfn=yfn):
            u = list(u)
            a, b = xfn(u), yfn(u)
            dya = directional_derivative(yfn, u, a)
            dxb = directional_derivative(xfn, u, b)
            return [s - t for s, t in zip(dya, dxb)]

        maps[cid] = RealMap(X.manifold.dim, X.manifold.dim, fn, f"[{X.name},{Y.name}]")
    return VectorField(X.manifold, maps, f"[{X.name},{Y.name}]")


def bracket_apply(X: VectorField, Y: VectorField, p, f: RealMap) -> float:
    """Derivation form ``(X♯(Y♯f) - Y♯(X♯f))(p)``."""
    X._check_same(Y)
    return float(vf_sharp(X, vf_sharp(Y, f))(p)[0] - vf_sharp(Y, vf_sharp(X, f))(p)[0])


# -- derivations ------------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Derivation:
    """An operator on scalar functions of the ambient space."""

    action: Callable[[RealMap], RealMap]
    name: str = "D"

    def __call__(self, f: RealMap) -> RealMap:
        return self.action(f)

    @classmethod
    def of_field(cls, X: VectorField) -> "Derivation":
        return cls(lambda f: vf_sharp(X, f), f"{X.name}♯")

    @classmethod
    def zero(cls, dim: int) -> "Derivation":
        return cls(lambda f: constant_map(dim, 0.0), "0")

    @classmethod
    def identity(cls) -> "Derivation":
        return cls(lambda f: f, "id")


@dataclass(frozen=True)
class DerivationReport:
    linearity_residual: float
    leibniz_residual: float
    smooth_passed: bool
    passed: bool
    tol: float
    counterexample: tuple | None = None


def _rel(a: float, b: float) -> float:
    r = abs(a - b) / (1.0 + abs(b))
    return r if np.isfinite(r) else float("inf")


def is_derivation_check(D: Derivation, M: Manifold, f_battery: Iterable[RealMap] | None = None,
                        g_battery: Iterable[RealMap] | None = None, tol: float = 1e-8,
                        order: int = DEFAULT_ORDER, probe_tol: float = DEFAULT_TOL,
                        scalars=(2.5, -0.75)) -> DerivationReport:
    """Linearity, Leibniz rule and smoothness of outputs, pointwise at carrier samples."""
    fs = list(f_battery) if f_battery is not None else function_battery(M.ambient_dim)
    gs = list(g_battery) if g_battery is not None else fs[::-1]
    if not fs or not gs:
        raise ContractError("derivation check needs non-empty batteries")
    points = M.carrier.points
    lin = leib = 0.0
    counter = None

    def at(fn, p):
        try:
            return float(fn(p)[0])
        except _EVAL_FAILURES:
            return float("inf")

    images = {id(f): D(f) for f in fs + gs}
    for f, g in zip(fs, gs):
        Df, Dg = images[id(f)], images[id(g)]
        Dsum, Dprod = D(map_add(f, g)), D(map_mul(f, g))
        Dscaled = [(a, D(map_scale(a, f))) for a in scalars]
        for p in points:
            df, dg = at(Df, p), at(Dg, p)
            r = _rel(at(Dsum, p), df + dg)
            for a, Da in Dscaled:
                r = max(r, _rel(at(Da, p), a * df))
            lin = max(lin, r)
            fp, gp = float(f(p)[0]), float(g(p)[0])
            r = _rel(at(Dprod, p), fp * dg + gp * df)
            if r > leib:
                leib = r
                if r > tol and counter is None:
                    counter = (f.name, g.name, p.copy())
    smooth = all(smooth_on_probe(M.carrier, images[id(f)], order, tol=probe_tol).passed for f in fs)
    return DerivationReport(lin, leib, smooth, lin <= tol and leib <= tol and smooth, tol, counter)


def vf_of_derivation(D: Derivation, M: Manifold) -> VectorField:
    """Recover components by applying ``D`` to each chart's coordinate functions."""
    maps = {}
    for c in M.charts:
        fwd = c.fwd.fn
        images = [D(RealMap(M.ambient_dim, 1, lambda xs, i=i, fwd=fwd: [fwd(xs)[i]], f"{c.id}_{i}")).fn
                  for i in range(M.dim)]
        inv = c.inv.fn

        def fn(u, images=images, inv=inv):
            p = list(inv(list(u)))
            return [img(p)[0] for img in images]

        maps[c.id] = RealMap(M.dim, M.dim, fn, f"comps({D.name})@{c.id}")
    return VectorField(M, maps, f"X[{D.name}]")
