"""Lie groups, left actions, left-invariant fields and Lie-algebra checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Callable, Sequence

import numpy as np

from .calculus import (
    DEFAULT_ORDER,
    DEFAULT_TOL,
    RealMap,
    directional_derivative,
    function_battery,
    is_jet,
    value_of,
)
from .errors import ContractError, InconclusiveSpanError, LieGeomError, NotALieGroupError, OutOfDomainError
from .field import VectorField, VFSmoothnessReport, lie_bracket, smooth_vf_check, vf_apply
from .geometry import DiffReport, Manifold, diff_check, prod_charts
from .groups import (
    AutomorphismReport,
    GroupAxiomsReport,
    GroupOn,
    PartialMap,
    automorphism_check,
    group_axioms_check,
    pmap_apply,
)
from .tangent import TangentVector, coordinate_vector, push_forward, tangent_apply

_EVAL_FAILURES = (ArithmeticError, ValueError, OverflowError, LieGeomError)
GROUP_TOL = 1e-9


@dataclass(eq=False)
class LieGroup:
    manifold: Manifold
    group: GroupOn
    times: RealMap
    inverse: RealMap
    unit: np.ndarray
    mult_certificate: DiffReport
    inv_certificate: DiffReport
    group_report: GroupAxiomsReport
    product_manifold: Manifold
    generators: tuple = ()
    name: str = ""

    @property
    def dim(self) -> int:
        return self.manifold.dim

    def mul(self, a, b) -> np.ndarray:
        return self.times(np.concatenate([np.ravel(a), np.ravel(b)]))

    def inv(self, a) -> np.ndarray:
        return self.inverse(a)


def _group_from_maps(M: Manifold, times: RealMap, one, inv: RealMap) -> GroupOn:
    def op(a, b):
        return times(np.concatenate([np.ravel(a), np.ravel(b)]))

    def contains(a):
        return M.contains(np.asarray(a, dtype=float))

    return GroupOn(contains, op, np.asarray(one, dtype=float), lambda a: inv(a), name=M.name)


def lie_group_new(M: Manifold, times: RealMap, one, inv: RealMap, order: int = DEFAULT_ORDER,
                  tol: float = DEFAULT_TOL, elements: Sequence | None = None, group_tol: float = GROUP_TOL,
                  generators: Sequence = (), name: str = "") -> LieGroup:
    """Check the group axioms on samples, then certify smooth multiplication and inversion."""
    a = M.ambient_dim
    if times.in_dim != 2 * a or times.out_dim != a or inv.in_dim != a or inv.out_dim != a:
        raise ContractError("multiplication must map R^(2a) -> R^a and inversion R^a -> R^a")
    one = np.asarray(one, dtype=float)
    G = _group_from_maps(M, times, one, inv)
    if elements is None:
        elements = [one, *generators, *M.carrier.points[:6]]
    group_report = group_axioms_check(G, elements, group_tol)
    if not group_report.passed:
        raise NotALieGroupError(f"group axioms fail on samples: {group_report.counterexample}", group_report)
    P = prod_charts(M, M)
    mult_cert = diff_check(P, M, times, order, tol)
    if not mult_cert.passed:
        raise NotALieGroupError("multiplication is not smooth on the product manifold", mult_cert)
    inv_cert = diff_check(M, M, inv, order, tol)
    if not inv_cert.passed:
        raise NotALieGroupError("inversion is not smooth", inv_cert)
    return LieGroup(M, G, times, inv, one, mult_cert, inv_cert, group_report, P,
                    tuple(np.asarray(g, dtype=float) for g in generators), name or M.name)


def _require_element(G: LieGroup, g):
    if not G.manifold.contains(np.array([value_of(t) for t in np.ravel(g)])):
        raise OutOfDomainError(f"{[value_of(t) for t in np.ravel(g)]} is not in the carrier of {G.name!r}")


def left_mult(G: LieGroup, g) -> RealMap:
    """``y -> g * y``.  ``g`` may hold jets (then evaluate the map on the same jet space)."""
    _require_element(G, g)
    gs = list(np.ravel(g)) if any(is_jet(t) for t in np.ravel(g)) else [float(t) for t in np.ravel(g)]
    tfn = G.times.fn
    return RealMap(G.manifold.ambient_dim, G.manifold.ambient_dim, lambda ys: tfn(gs + list(ys)), "L_g")


def certify_left_mult(G: LieGroup, g, order: int = DEFAULT_ORDER, tol: float = DEFAULT_TOL) -> DiffReport:
    return diff_check(G.manifold, G.manifold, left_mult(G, g), order, tol)


def left_action(G: LieGroup, g) -> PartialMap:
    """Left translation by ``g`` restricted to the carrier."""
    return PartialMap(left_mult(G, g), G.manifold.carrier)


def sample_group_elements(G: LieGroup, n_random: int = 8, seed: int = 0) -> list[np.ndarray]:
    """Unit, generators, pairwise products of generators and seeded carrier samples."""
    out = [G.unit, *G.generators]
    out += [G.mul(a, b) for a, b in product(G.generators, repeat=2)]
    pts = G.manifold.carrier.points
    if len(pts):
        rng = np.random.default_rng(seed)
        idx = rng.choice(len(pts), size=min(n_random, len(pts)), replace=False)
        out += [pts[i] for i in sorted(idx)]
    return out


@dataclass(frozen=True)
class ActionReport:
    automorphisms: tuple
    homomorphism_residual: float
    joint: DiffReport | None
    passed: bool
    tol: float

    @property
    def automorphisms_passed(self) -> bool:
        return all(r.passed for r in self.automorphisms)


def action_check(G: LieGroup, M2: Manifold, rho: Callable[..., PartialMap], sample_gs: Sequence,
                 order: int = DEFAULT_ORDER, tol: float = 1e-8, probe_tol: float = DEFAULT_TOL) -> ActionReport:
    """Each ``rho(g)`` is a diffeomorphism, ``rho`` is a homomorphism, and ``(g, m) -> rho(g)(m)`` is smooth."""
    autos: list[AutomorphismReport] = []
    for g in sample_gs:
        try:
            autos.append(automorphism_check(M2, rho(g), rho(G.inv(g)), order, probe_tol))
        except _EVAL_FAILURES:
            autos.append(AutomorphismReport(False, False, None))
    worst = 0.0
    for g, h in product(sample_gs, repeat=2):
        lhs_map, rg, rh = rho(G.mul(g, h)), rho(g), rho(h)
        for m in M2.carrier.points:
            lhs = pmap_apply(lhs_map, m)
            inner = pmap_apply(rh, m)
            rhs = None if inner is None else pmap_apply(rg, inner)
            if (lhs is None) != (rhs is None):
                worst = float("inf")
            elif lhs is not None:
                worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    a = G.manifold.ambient_dim

    def joint_fn(z):
        return rho(list(z[:a])).fn.fn(list(z[a:]))

    joint = diff_check(prod_charts(G.manifold, M2), M2, RealMap(a + M2.ambient_dim, M2.ambient_dim, joint_fn, "act"),
                       order, probe_tol)
    passed = all(r.passed for r in autos) and worst <= tol and joint.passed
    return ActionReport(tuple(autos), worst, joint, passed, tol)


# -- invariance ------------------------------------------------------------------------------


@dataclass(frozen=True)
class InvarianceReport:
    passed: bool
    max_residual: float
    samples: int
    tol: float

    def __bool__(self):
        return self.passed


def invariant_under_check(X: VectorField, F: RealMap, battery: Sequence[RealMap] | None = None,
                          tol: float = 1e-8, points=None) -> InvarianceReport:
    """Compare ``X_{F(p)} f`` with ``(dF X_p) f`` at carrier samples."""
    M = X.manifold
    battery = list(battery) if battery is not None else function_battery(M.ambient_dim)
    pts = M.carrier.points if points is None else np.asarray(points, dtype=float)
    worst, used = 0.0, 0
    for p in pts:
        try:
            q = F(p)
            if not M.contains(q):
                continue
            lhs_v = vf_apply(X, q)
            rhs_v = push_forward(F, M, M, vf_apply(X, p), dst_chart=lhs_v.chart)
            for f in battery:
                worst = max(worst, abs(tangent_apply(lhs_v, f) - tangent_apply(rhs_v, f)))
        except _EVAL_FAILURES:
            worst = float("inf")
        used += 1
    return InvarianceReport(worst <= tol, worst, used, tol)


def left_invariant_extend(G: LieGroup, v: TangentVector) -> VectorField:
    """Field ``g -> dL_g(v)`` for a vector ``v`` at the unit."""
    if not np.allclose(v.base, G.unit, rtol=0, atol=0):
        raise ContractError("left-invariant extension needs a vector based at the unit")
    M = G.manifold
    a = M.ambient_dim
    c0 = v.chart
    tfn, inv0 = G.times.fn, c0.inv.fn
    u0 = [float(t) for t in c0.fwd(G.unit)]
    comps0 = [float(t) for t in v.comps]
    maps = {}
    for c in M.charts:
        cinv, cfwd = c.inv.fn, c.fwd.fn

        def fn(u, cinv=cinv, cfwd=cfwd):
            g = list(cinv(list(u)))
            # g enters through the point with zero direction so jets never hide in a closure
            z0 = g + u0
            d = [0.0] * a + comps0
            return directional_derivative(lambda z: cfwd(tfn(list(z[:a]) + list(inv0(z[a:])))), z0, d)

        maps[c.id] = RealMap(M.dim, M.dim, fn, f"X[{comps0}]@{c.id}")
    return VectorField(M, maps, f"X{comps0}")


# -- Lie algebra checks ------------------------------------------------------------------------


@dataclass(frozen=True)
class LieAlgebraReport:
    bilinearity_residual: float
    alternating_residual: float
    jacobi_residual: float
    tol: float
    samples: int

    @property
    def bilinear_passed(self) -> bool:
        return self.bilinearity_residual <= self.tol

    @property
    def alternating_passed(self) -> bool:
        return self.alternating_residual <= self.tol

    @property
    def jacobi_passed(self) -> bool:
        return self.jacobi_residual <= self.tol

    @property
    def passed(self) -> bool:
        return self.bilinear_passed and self.alternating_passed and self.jacobi_passed


def _comps_matrix(X: VectorField, points) -> np.ndarray:
    return np.array([vf_apply(X, p).comps for p in points])


def _residual(A, B) -> float:
    try:
        r = float(np.max(np.abs(np.asarray(A) - np.asarray(B))))
    except _EVAL_FAILURES:
        return float("inf")
    return r if np.isfinite(r) else float("inf")


def _choose_points(M: Manifold, points, n_points):
    pts = M.carrier.points if points is None else np.asarray(points, dtype=float)
    return pts if n_points is None else pts[:n_points]


def lie_algebra_check(elements: Sequence[VectorField], bracket=lie_bracket, tol: float = 1e-5,
                      scalars=(2.0, -0.5), points=None, n_points: int | None = None) -> LieAlgebraReport:
    """Bilinearity, alternation and Jacobi componentwise at carrier samples."""
    elements = list(elements)
    if not elements:
        raise ContractError("no elements to check")
    M = elements[0].manifold
    pts = _choose_points(M, points, n_points)
    C = lambda X: _comps_matrix(X, pts)  # noqa: E731
    a, b = scalars
    bil = alt = jac = 0.0
    n = len(elements)
    for i in range(n):
        X = elements[i]
        alt = max(alt, _residual(C(bracket(X, X)), 0.0))
        Y, Z = elements[(i + 1) % n], elements[(i + 2) % n]
        left = C(bracket(X.scale(a) + Y.scale(b), Z))
        bil = max(bil, _residual(left, a * C(bracket(X, Z)) + b * C(bracket(Y, Z))))
        right = C(bracket(Z, X.scale(a) + Y.scale(b)))
        bil = max(bil, _residual(right, a * C(bracket(Z, X)) + b * C(bracket(Z, Y))))
    triples = list(combinations(range(n), 3)) or [tuple((i + k) % n for k in range(3)) for i in range(n)]
    for i, j, k in triples:
        X, Y, Z = elements[i], elements[j], elements[k]
        total = C(bracket(X, bracket(Y, Z))) + C(bracket(Y, bracket(Z, X))) + C(bracket(Z, bracket(X, Y)))
        jac = max(jac, _residual(total, 0.0))
    return LieAlgebraReport(bil, alt, jac, tol, len(pts))


@dataclass(frozen=True)
class SubalgebraReport:
    span_residual: float
    closure_residual: float
    coefficients: dict
    condition: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.span_residual <= self.tol and self.closure_residual <= self.tol


def lie_subalgebra_check(sub_elements: Sequence[VectorField], ambient_elements: Sequence[VectorField] | None = None,
                         bracket=lie_bracket, tol: float = 1e-6, points=None, n_points: int | None = None,
                         rcond: float = 1e-9, scalars=(1.5, -2.0)) -> SubalgebraReport:
    """Pairwise brackets lie in the sampled span of ``sub_elements`` (least squares with a rank guard)."""
    subs = list(sub_elements)
    if not subs:
        raise ContractError("no elements to check")
    M = subs[0].manifold
    for X in list(subs) + list(ambient_elements or []):
        if X.manifold is not M:
            raise ContractError("all fields must live on one manifold")
    pts = _choose_points(M, points, n_points)
    A = np.column_stack([_comps_matrix(X, pts).ravel() for X in subs])
    sv = np.linalg.svd(A, compute_uv=False)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else float("inf")
    if sv[-1] <= rcond * max(sv[0], 1.0):
        raise InconclusiveSpanError(f"sampled component matrix is rank deficient (singular values {sv})")

    def fit(b):
        coef, *_ = np.linalg.lstsq(A, b, rcond=None)
        return coef, _residual(A @ coef, b)

    span = 0.0
    coeffs = {}
    for i, j in combinations(range(len(subs)), 2):
        coef, r = fit(_comps_matrix(bracket(subs[i], subs[j]), pts).ravel())
        coeffs[(i, j)] = coef
        span = max(span, r)
    closure = 0.0
    for i, j in product(range(len(subs)), repeat=2):
        s, t = scalars
        closure = max(closure, fit(_comps_matrix(subs[i].scale(s) + subs[j].scale(t), pts).ravel())[1])
    return SubalgebraReport(span, closure, coeffs, cond, tol)


@dataclass
class LieAlgebraResult:
    basis: list
    smoothness: list
    invariance: list
    algebra: LieAlgebraReport
    subalgebra: SubalgebraReport
    structure_constants: np.ndarray
    tol: float = 1e-6

    @property
    def smooth_passed(self) -> bool:
        return all(r.passed for r in self.smoothness)

    @property
    def invariance_residual(self) -> float:
        return max((r.max_residual for r in self.invariance), default=0.0)

    @property
    def passed(self) -> bool:
        return (self.smooth_passed and all(r.passed for r in self.invariance)
                and self.algebra.passed and self.subalgebra.passed)


def structure_constants_from(coefficients: dict, n: int) -> np.ndarray:
    """``c[i, j, k]`` with ``[X_i, X_j] = sum_k c[i, j, k] X_k``."""
    c = np.zeros((n, n, n))
    for (i, j), coef in coefficients.items():
        c[i, j] = coef
        c[j, i] = -np.asarray(coef)
    return c


def lie_algebra_of(G: LieGroup, order: int = DEFAULT_ORDER, tol: float = 1e-6, probe_tol: float = DEFAULT_TOL,
                   jacobi_tol: float = 1e-5, n_points: int | None = 8, n_random: int = 8,
                   seed: int = 0) -> LieAlgebraResult:
    """Left-invariant extensions of the unit's coordinate basis, with every check run on them."""
    c0 = G.manifold.covering_chart(G.unit)
    basis = [left_invariant_extend(G, coordinate_vector(c0, G.unit, i)) for i in range(G.dim)]
    smooth: list[VFSmoothnessReport] = [smooth_vf_check(X, order, probe_tol) for X in basis]
    invariance = []
    battery = function_battery(G.manifold.ambient_dim)[:4]
    for g in sample_group_elements(G, n_random, seed):
        F = left_mult(G, g)
        for X in basis:
            invariance.append(invariant_under_check(X, F, battery, tol, points=_choose_points(G.manifold, None, n_points)))
    algebra = lie_algebra_check(basis, tol=jacobi_tol, n_points=n_points)
    sub = lie_subalgebra_check(basis, tol=tol, n_points=n_points)
    return LieAlgebraResult(basis, smooth, invariance, algebra, sub,
                            structure_constants_from(sub.coefficients, G.dim), tol)
