"""Regions, charts, atlases and smoothness of maps between embedded manifolds.

Every manifold here is embedded: its points live in an ambient ``R^a`` and
open sets are described by a membership predicate together with a finite set
of interior samples.  Each sample carries a clearance radius, and the
finite-difference stencil the probe uses around it stays inside the region.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .calculus import (
    DEFAULT_ORDER,
    DEFAULT_TOL,
    RealMap,
    SmoothnessReport,
    identity_map,
    map_compose,
    map_product,
    merge_reports,
    probe_stencil,
    smooth_on_probe,
)
from .errors import (
    ContractError,
    EmptySubmanifoldError,
    IncompatibleChartsError,
    LieGeomError,
    OutOfDomainError,
)

DERIVED_CLEARANCE = 2e-3
MIN_CLEARANCE = 1e-9
PRODUCT_SAMPLE_CAP = 32
ROUNDTRIP_TOL = 1e-8


def _safe(contains):
    def wrapped(x):
        try:
            return bool(contains(np.asarray(x, dtype=float)))
        except (ArithmeticError, ValueError, OverflowError, LieGeomError):
            return False

    return wrapped


def stencil_clearance(contains, p, start: float, floor: float = MIN_CLEARANCE) -> float:
    """Largest radius ``start / 4**k`` whose probe stencil around ``p`` stays inside; 0 if none."""
    r = start
    while r >= floor:
        if all(contains(q) for q in probe_stencil(p, r)):
            return r
        r /= 4
    return 0.0


class Region:
    """Open subset of ``R^ambient_dim``: a predicate plus clearance-annotated samples."""

    def __init__(self, ambient_dim: int, contains: Callable, points, radii, bounds=None,
                 name: str = "", seed: int | None = None):
        self.ambient_dim = int(ambient_dim)
        self.contains = _safe(contains)
        self.points = np.asarray(points, dtype=float).reshape(-1, self.ambient_dim)
        self.radii = np.asarray(radii, dtype=float).reshape(-1)
        if len(self.points) != len(self.radii):
            raise ContractError("every sample needs exactly one clearance radius")
        if np.any(self.radii <= 0):
            raise ContractError("clearance radii must be positive")
        self.bounds = None if bounds is None else np.asarray(bounds, dtype=float)
        self.name = name
        self.seed = seed

    def __repr__(self):
        return f"Region({self.name!r}, dim={self.ambient_dim}, samples={len(self.points)})"

    def __contains__(self, x) -> bool:
        return self.contains(x)

    @property
    def samples(self) -> list[tuple[np.ndarray, float]]:
        return [(p, float(r)) for p, r in zip(self.points, self.radii)]

    @property
    def is_empty(self) -> bool:
        return len(self.points) == 0

    def validate(self) -> bool:
        """Samples lie inside and so does the probe stencil of every sample."""
        return all(
            self.contains(p) and all(self.contains(q) for q in probe_stencil(p, r))
            for p, r in zip(self.points, self.radii)
        )

    # -- constructors ----------------------------------------------------------

    @classmethod
    def box(cls, lo, hi, n_samples: int = 16, seed: int = 0, name: str = "box",
            include_center: bool = True, extra_points=()) -> "Region":
        lo = np.atleast_1d(np.asarray(lo, dtype=float))
        hi = np.atleast_1d(np.asarray(hi, dtype=float))
        n = lo.size
        rng = np.random.default_rng(seed)
        pts = []
        if include_center:
            pts.append((lo + hi) / 2)
        pts.extend(np.asarray(extra_points, dtype=float).reshape(-1, n))
        # shrink towards the centre so no sample sits on the boundary
        pts.extend(lo + (hi - lo) * (0.05 + 0.9 * rng.random((n_samples, n))))
        pts = np.array(pts)
        radii = np.minimum(pts - lo, hi - pts).min(axis=1)
        return cls(n, lambda x: bool(np.all(x > lo) and np.all(x < hi)), pts, radii,
                   bounds=np.stack([lo, hi]), name=name, seed=seed)

    @classmethod
    def whole(cls, dim: int, half_width: float = 2.0, n_samples: int = 16, seed: int = 0,
              name: str = "", clearance: float = 1.0) -> "Region":
        """All of ``R^dim``, sampled inside ``[-half_width, half_width]^dim``."""
        rng = np.random.default_rng(seed)
        pts = np.vstack([np.zeros((1, dim)), rng.uniform(-half_width, half_width, (n_samples, dim))])
        return cls(dim, lambda x: True, pts, np.full(len(pts), clearance), name=name or f"R^{dim}", seed=seed)

    @classmethod
    def ball(cls, center, radius: float, n_samples: int = 16, seed: int = 0, name: str = "ball") -> "Region":
        center = np.atleast_1d(np.asarray(center, dtype=float))
        n = center.size
        rng = np.random.default_rng(seed)
        dirs = rng.normal(size=(n_samples, n))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        rad = radius * 0.9 * rng.random(n_samples) ** (1.0 / n)
        pts = np.vstack([center, center + dirs * rad[:, None]])
        radii = radius - np.linalg.norm(pts - center, axis=1)
        return cls(n, lambda x: float(np.linalg.norm(x - center)) < radius, pts, radii,
                   bounds=np.stack([center - radius, center + radius]), name=name, seed=seed)

    @classmethod
    def from_predicate(cls, dim: int, contains: Callable, candidates, name: str = "",
                       seed: int | None = None, start: float = DERIVED_CLEARANCE, start_radii=None) -> "Region":
        """Keep the candidates whose probe stencil fits inside ``contains``."""
        contains = _safe(contains)
        cand = np.asarray(candidates, dtype=float).reshape(-1, dim)
        starts = np.full(len(cand), start) if start_radii is None else np.minimum(start_radii, start)
        pts, radii, seen = [], [], set()
        for p, r0 in zip(cand, starts):
            key = p.tobytes()
            if key in seen or not contains(p):
                continue
            r = stencil_clearance(contains, p, float(r0))
            if r > 0:
                seen.add(key)
                pts.append(p)
                radii.append(r)
        return cls(dim, contains, np.array(pts).reshape(-1, dim), np.array(radii), name=name, seed=seed)

    # -- combinations ------------------------------------------------------------

    def intersect(self, other: "Region", name: str | None = None) -> "Region":
        if other.ambient_dim != self.ambient_dim:
            raise ContractError("cannot intersect regions of different ambient dimension")
        a, b = self.contains, other.contains
        both = lambda x: a(x) and b(x)  # noqa: E731
        cand = np.vstack([self.points, other.points])
        starts = np.concatenate([self.radii, other.radii])
        return Region.from_predicate(self.ambient_dim, both, cand, name=name or f"{self.name}∩{other.name}",
                                     seed=self.seed, start=np.inf, start_radii=starts)

    def filter(self, predicate: Callable, name: str | None = None) -> "Region":
        """Sub-region ``{x in self : predicate(x)}`` (predicate assumed open).

        A sample keeps its radius when the stencil at that radius satisfies
        ``predicate``; the stencil is already inside ``self`` by invariant.
        """
        pred = _safe(predicate)
        a = self.contains
        both = lambda x: a(x) and pred(x)  # noqa: E731
        pts, radii = [], []
        for p, r in zip(self.points, self.radii):
            if not pred(p):
                continue
            if not all(pred(q) for q in probe_stencil(p, r)):
                r = stencil_clearance(both, p, r / 4)
            if r > 0:
                pts.append(p)
                radii.append(r)
        return Region(self.ambient_dim, both, np.array(pts).reshape(-1, self.ambient_dim), np.array(radii),
                      name=name or self.name, seed=self.seed)

    def product(self, other: "Region", cap: int = PRODUCT_SAMPLE_CAP, seed: int = 0) -> "Region":
        n = self.ambient_dim
        a, b = self.contains, other.contains
        pairs = [(i, j) for i in range(len(self.points)) for j in range(len(other.points))]
        if len(pairs) > cap:
            rng = np.random.default_rng(seed)
            keep = np.sort(rng.choice(len(pairs), size=cap, replace=False))
            pairs = [pairs[k] for k in keep]
        pts = np.array([np.concatenate([self.points[i], other.points[j]]) for i, j in pairs])
        radii = np.array([min(self.radii[i], other.radii[j]) for i, j in pairs])
        return Region(n + other.ambient_dim, lambda z: a(z[:n]) and b(z[n:]),
                      pts.reshape(-1, n + other.ambient_dim), radii,
                      name=f"{self.name}×{other.name}", seed=seed)


def image_region(f: RealMap, f_inv: RealMap, source: Region, target: Region | None = None,
                 name: str = "") -> Region:
    """Image ``f(source)`` as a region: membership is tested through ``f_inv``."""
    dim = f.out_dim
    src = source.contains
    tgt = target.contains if target is not None else (lambda y: True)

    def contains(y):
        if not tgt(y):
            return False
        x = f_inv(y)
        return src(x) and float(np.max(np.abs(f(x) - y))) <= 1e-9 * (1 + float(np.max(np.abs(y))))

    cand = []
    for p in source.points:
        try:
            cand.append(f(p))
        except (ArithmeticError, ValueError, LieGeomError):
            continue
    return Region.from_predicate(dim, contains, np.array(cand).reshape(-1, dim),
                                 name=name or f"{f.name}({source.name})", seed=source.seed)


# -- charts -------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Chart:
    """Local homeomorphism ``fwd: domain -> codomain`` with inverse ``inv``."""

    id: str
    domain: Region
    codomain: Region
    fwd: RealMap
    inv: RealMap

    def __post_init__(self):
        if self.fwd.in_dim != self.domain.ambient_dim or self.inv.out_dim != self.domain.ambient_dim:
            raise ContractError(f"chart {self.id!r}: maps do not match the domain dimension")
        if self.fwd.out_dim != self.codomain.ambient_dim or self.inv.in_dim != self.codomain.ambient_dim:
            raise ContractError(f"chart {self.id!r}: maps do not match the codomain dimension")

    def __call__(self, x) -> np.ndarray:
        return self.fwd(x)

    def inverse(self, y) -> np.ndarray:
        return self.inv(y)

    @property
    def ambient_dim(self) -> int:
        return self.domain.ambient_dim

    @property
    def dim(self) -> int:
        return self.codomain.ambient_dim

    @classmethod
    def from_maps(cls, id: str, domain: Region, fwd: RealMap, inv: RealMap,
                  codomain: Region | None = None) -> "Chart":
        """Chart whose codomain is the sampled image of ``domain`` unless given."""
        if codomain is None:
            codomain = image_region(fwd, inv, domain, name=f"{id}(dom)")
        return cls(id, domain, codomain, fwd, inv)

    @classmethod
    def identity(cls, region: Region, id: str = "id") -> "Chart":
        n = region.ambient_dim
        return cls(id, region, region, identity_map(n), identity_map(n))

    def roundtrip_residual(self) -> float:
        worst = 0.0
        for x in self.domain.points:
            worst = max(worst, float(np.max(np.abs(self.inv(self.fwd(x)) - x))))
        for y in self.codomain.points:
            worst = max(worst, float(np.max(np.abs(self.fwd(self.inv(y)) - y))))
        return worst

    def validate(self, tol: float = ROUNDTRIP_TOL) -> None:
        res = self.roundtrip_residual()
        if res > tol:
            raise ContractError(f"chart {self.id!r} is not invertible on its samples (residual {res:.3g})")
        for x in self.domain.points:
            if not self.codomain.contains(self.fwd(x)):
                raise ContractError(f"chart {self.id!r} maps domain sample {x} outside its codomain")

    def restrict(self, region: Region) -> "Chart | None":
        """Restriction to ``domain ∩ region``, or ``None`` when no sample survives."""
        dom = self.domain.intersect(region, name=f"{self.domain.name}∩{region.name}")
        if dom.is_empty:
            return None
        cod = image_region(self.fwd, self.inv, dom, self.codomain, name=f"{self.id}({dom.name})")
        if cod.is_empty:
            return None
        return Chart(self.id, dom, cod, self.fwd, self.inv)


class Manifold:
    """An atlas of pairwise compatible charts sharing ambient and chart dimension.

    Build checked instances with :func:`manifold_new`; the constructor itself
    only validates shapes.
    """

    def __init__(self, charts, probe_order: int = DEFAULT_ORDER, name: str = ""):
        charts = tuple(charts)
        if not charts:
            raise ContractError("a manifold needs at least one chart")
        a, e = charts[0].ambient_dim, charts[0].dim
        if any(c.ambient_dim != a or c.dim != e for c in charts):
            raise ContractError("all charts must share ambient and chart dimensions")
        ids = [c.id for c in charts]
        if len(set(ids)) != len(ids):
            raise ContractError(f"duplicate chart ids in {ids}")
        self.charts = charts
        self.probe_order = probe_order
        self.name = name
        self._carrier = None

    def __repr__(self):
        return f"Manifold({self.name!r}, charts={[c.id for c in self.charts]})"

    @property
    def ambient_dim(self) -> int:
        return self.charts[0].ambient_dim

    @property
    def dim(self) -> int:
        return self.charts[0].dim

    def chart(self, chart_id: str) -> Chart:
        for c in self.charts:
            if c.id == chart_id:
                return c
        raise KeyError(chart_id)

    def contains(self, x) -> bool:
        return any(c.domain.contains(x) for c in self.charts)

    def covering_charts(self, x) -> list[Chart]:
        return [c for c in self.charts if c.domain.contains(x)]

    def covering_chart(self, x) -> Chart:
        """First chart (declaration order) whose domain contains ``x``."""
        for c in self.charts:
            if c.domain.contains(x):
                return c
        raise OutOfDomainError(f"point {np.asarray(x).tolist()} is outside the carrier of {self.name!r}")

    @property
    def carrier(self) -> Region:
        """Union of the chart domains, sampled by the union of their samples."""
        if self._carrier is None:
            pts, radii, seen = [], [], set()
            for c in self.charts:
                for p, r in zip(c.domain.points, c.domain.radii):
                    if p.tobytes() not in seen:
                        seen.add(p.tobytes())
                        pts.append(p)
                        radii.append(r)
            self._carrier = Region(self.ambient_dim, self.contains, np.array(pts), np.array(radii),
                                   name=f"carrier({self.name})", seed=self.charts[0].domain.seed)
        return self._carrier


# -- operations -------------------------------------------------------------------------


def _transition_probe(c1: Chart, c2: Chart, overlap: Region, order: int, tol: float) -> SmoothnessReport:
    region = image_region(c1.fwd, c1.inv, overlap, c1.codomain, name=f"{c1.id}(overlap)")
    if region.is_empty:
        return SmoothnessReport.vacuous(order, tol)
    return smooth_on_probe(region, map_compose(c2.fwd, c1.inv), order, tol=tol)


def smooth_compat(c1: Chart, c2: Chart, order: int = DEFAULT_ORDER, tol: float = DEFAULT_TOL) -> SmoothnessReport:
    """Probe both transition maps on the overlap; disjoint domains pass vacuously."""
    if (c1.ambient_dim, c1.dim) != (c2.ambient_dim, c2.dim):
        raise ContractError(f"charts {c1.id!r} and {c2.id!r} have different dimensions")
    overlap = c1.domain.intersect(c2.domain)
    if overlap.is_empty:
        return SmoothnessReport.vacuous(order, tol, overlap.seed)
    return merge_reports(
        [_transition_probe(c1, c2, overlap, order, tol), _transition_probe(c2, c1, overlap, order, tol)],
        order,
    )


def manifold_new(charts, order: int = DEFAULT_ORDER, tol: float = DEFAULT_TOL, name: str = "") -> Manifold:
    """Validated manifold: every chart round-trips and every chart pair is compatible."""
    m = Manifold(charts, probe_order=order, name=name)
    for c in m.charts:
        c.validate()
    for i, c1 in enumerate(m.charts):
        for c2 in m.charts[i + 1:]:
            report = smooth_compat(c1, c2, order, tol)
            if not report.passed:
                raise IncompatibleChartsError((c1.id, c2.id), report)
    return m


def charts_submanifold(M: Manifold, U: Region, name: str | None = None) -> Manifold:
    """Open submanifold ``M ∩ U``: charts restricted, empty restrictions dropped."""
    if U.ambient_dim != M.ambient_dim:
        raise ContractError("restricting region lives in a different ambient space")
    charts = [r for r in (c.restrict(U) for c in M.charts) if r is not None]
    if not charts:
        raise EmptySubmanifoldError(f"no chart of {M.name!r} meets {U.name!r} at any sample")
    return Manifold(charts, M.probe_order, name=name or f"{M.name}|{U.name}")


def prod_charts(M1: Manifold, M2: Manifold, seed: int = 0) -> Manifold:
    """Product manifold with one product chart per pair of charts."""
    charts = []
    for a in M1.charts:
        for b in M2.charts:
            charts.append(Chart(
                f"{a.id}*{b.id}",
                a.domain.product(b.domain, seed=seed),
                a.codomain.product(b.codomain, seed=seed),
                map_product(a.fwd, b.fwd),
                map_product(a.inv, b.inv),
            ))
    return Manifold(charts, min(M1.probe_order, M2.probe_order), name=f"{M1.name}×{M2.name}")


@dataclass(frozen=True)
class SampleWitness:
    point: np.ndarray
    src_chart: str | None
    dst_chart: str | None
    report: SmoothnessReport | None


@dataclass(frozen=True)
class DiffReport:
    """Per-sample chart witnesses for smoothness of a map between manifolds."""

    records: tuple
    passed: bool
    probes: dict = field(default_factory=dict)

    @property
    def max_residual(self) -> float:
        used = [r.max_fd_residual for r in self.probes.values() if r is not None]
        return max(used, default=0.0)

    @property
    def failing_points(self) -> list[np.ndarray]:
        return [w.point for w in self.records if w.src_chart is None]

    def witness(self, x) -> SampleWitness | None:
        x = np.asarray(x, dtype=float)
        for w in self.records:
            if np.array_equal(w.point, x):
                return w
        return None


def diff_check(src: Manifold, dst: Manifold, F: RealMap, order: int = DEFAULT_ORDER,
               tol: float = DEFAULT_TOL) -> DiffReport:
    """Smoothness of ``F: src -> dst`` in the chart-wise sense, sample by sample."""
    if F.in_dim != src.ambient_dim or F.out_dim != dst.ambient_dim:
        raise ContractError(
            f"map {F.in_dim}->{F.out_dim} does not go from R^{src.ambient_dim} to R^{dst.ambient_dim}"
        )
    probes: dict = {}

    def probe(c1: Chart, c2: Chart):
        key = (c1.id, c2.id)
        if key not in probes:
            try:
                inside = all(c2.domain.contains(F(x)) for x in c1.domain.points)
            except (ArithmeticError, ValueError, LieGeomError):
                inside = False
            probes[key] = (
                smooth_on_probe(c1.codomain, map_compose(c2.fwd, map_compose(F, c1.inv)), order, tol=tol)
                if inside else None
            )
        return probes[key]

    records = []
    for x in src.carrier.points:
        found = None
        for c1 in src.covering_charts(x):
            for c2 in dst.charts:
                rep = probe(c1, c2)
                if rep is not None and rep.passed:
                    found = SampleWitness(x, c1.id, c2.id, rep)
                    break
            if found:
                break
        records.append(found or SampleWitness(x, None, None, None))
    return DiffReport(tuple(records), all(w.src_chart is not None for w in records), probes)


@dataclass(frozen=True)
class DiffeomorphismReport:
    passed: bool
    forward: DiffReport
    inverse: DiffReport
    roundtrip_residual: float

    def __bool__(self):
        return self.passed


def _roundtrip(f: RealMap, g: RealMap, points) -> float:
    worst = 0.0
    for x in points:
        try:
            worst = max(worst, float(np.max(np.abs(g(f(x)) - x))))
        except (ArithmeticError, ValueError, LieGeomError):
            return float("inf")
    return worst


def diffeomorphism_check(M1: Manifold, M2: Manifold, f: RealMap, f_inv: RealMap,
                         order: int = DEFAULT_ORDER, tol: float = DEFAULT_TOL,
                         inverse_tol: float = ROUNDTRIP_TOL) -> DiffeomorphismReport:
    forward = diff_check(M1, M2, f, order, tol)
    inverse = diff_check(M2, M1, f_inv, order, tol)
    rt = max(_roundtrip(f, f_inv, M1.carrier.points), _roundtrip(f_inv, f, M2.carrier.points))
    return DiffeomorphismReport(forward.passed and inverse.passed and rt <= inverse_tol, forward, inverse, rt)
