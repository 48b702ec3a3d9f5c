"""Numerical surrogate for ``k``-smoothness on a sampled region.

Passing :func:`smooth_on_probe` means: at every sample the jets up to the
probe order are finite, and the first and second derivative entries agree
with central differences.  That finite-order check is what the rest of the
package calls "smooth".
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ContractError, DegenerateRegionError, LieGeomError
from .maps import RealMap, fd_hessians, fd_jacobian

FD_STEP_FIRST = 1e-5
FD_STEP_SECOND = 1e-4
DEFAULT_TOL = 1e-5
DEFAULT_ORDER = 3

_EVAL_FAILURES = (ArithmeticError, ValueError, OverflowError, LieGeomError)


def fd_steps(radius: float) -> tuple[float, float]:
    """Steps for first and second differences that keep the stencil inside ``radius``."""
    return min(FD_STEP_FIRST, radius / 2), min(FD_STEP_SECOND, radius / 2)


def probe_stencil(p, radius: float) -> np.ndarray:
    """Every point the probe evaluates around ``p`` (besides ``p`` itself)."""
    p = np.asarray(p, dtype=float)
    n = p.size
    h1, h2 = fd_steps(radius)
    eye = np.eye(n)
    pts = [p + s * h * eye[i] for h in (h1, h2) for i in range(n) for s in (1, -1)]
    for i in range(n):
        for j in range(i + 1, n):
            for si in (1, -1):
                for sj in (1, -1):
                    pts.append(p + h2 * (si * eye[i] + sj * eye[j]))
    return np.array(pts).reshape(-1, n)


@dataclass(frozen=True)
class SmoothnessReport:
    order_probed: int
    samples_checked: int
    max_fd_residual: float
    passed: bool
    failures: tuple = field(default=())
    tol: float = DEFAULT_TOL
    seed: int | None = None

    def __post_init__(self):
        if self.passed != (len(self.failures) == 0):
            raise ContractError("a smoothness report passes exactly when it lists no failures")

    @classmethod
    def vacuous(cls, order: int, tol: float = DEFAULT_TOL, seed=None) -> "SmoothnessReport":
        return cls(order, 0, 0.0, True, (), tol, seed)


def merge_reports(reports, order: int | None = None) -> SmoothnessReport:
    reports = list(reports)
    if not reports:
        return SmoothnessReport.vacuous(order or DEFAULT_ORDER)
    failures = tuple(f for r in reports for f in r.failures)
    return SmoothnessReport(
        order_probed=order if order is not None else max(r.order_probed for r in reports),
        samples_checked=sum(r.samples_checked for r in reports),
        max_fd_residual=max(r.max_fd_residual for r in reports),
        passed=not failures,
        failures=failures,
        tol=reports[0].tol,
        seed=reports[0].seed,
    )


def _scaled_residual(fd: np.ndarray, ad: np.ndarray) -> float:
    res = np.abs(fd - ad) / (1.0 + np.abs(ad))
    worst = float(np.max(res)) if res.size else 0.0
    return worst if np.isfinite(worst) else float("inf")


def smooth_on_probe(region, f: RealMap, order: int = DEFAULT_ORDER, n_samples: int | None = None,
                    tol: float = DEFAULT_TOL) -> SmoothnessReport:
    """Probe ``f`` for ``order``-smoothness at the samples of ``region``."""
    if region.ambient_dim != f.in_dim:
        raise ContractError(f"region lives in R^{region.ambient_dim}, map takes {f.in_dim} inputs")
    points, radii = region.points, region.radii
    if n_samples is not None:
        points, radii = points[:n_samples], radii[:n_samples]
    if len(points) == 0:
        raise DegenerateRegionError(f"region {region.name!r} has no samples to probe")

    failures = []
    worst = 0.0
    for p, r in zip(points, radii):
        try:
            jets = f.jet(p, order)
        except ContractError:
            raise
        except _EVAL_FAILURES:
            failures.append((p.copy(), order, float("inf")))
            worst = float("inf")
            continue
        if not all(j.is_finite() for j in jets):
            failures.append((p.copy(), order, float("inf")))
            worst = float("inf")
            continue
        h1, h2 = fd_steps(float(r))
        checks = []
        if order >= 1:
            ad = np.array([j.gradient() for j in jets])
            checks.append((1, ad, lambda: fd_jacobian(f, p, h1)))
        if order >= 2:
            ad2 = np.array([j.hessian() for j in jets])
            checks.append((2, ad2, lambda: fd_hessians(f, p, h2)))
        for k, ad, fd in checks:
            try:
                res = _scaled_residual(fd(), ad)
            except ContractError:
                raise
            except _EVAL_FAILURES:
                res = float("inf")
            worst = max(worst, res)
            if not res <= tol:
                failures.append((p.copy(), k, res))
    return SmoothnessReport(
        order_probed=order,
        samples_checked=len(points),
        max_fd_residual=worst,
        passed=not failures,
        failures=tuple(failures),
        tol=tol,
        seed=getattr(region, "seed", None),
    )
