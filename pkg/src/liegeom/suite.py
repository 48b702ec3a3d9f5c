"""Verification suites over built-in and file-defined models.

Every check yields a :class:`CheckResult`.  Check tolerances are the
per-property defaults below multiplied by ``config.tol / 1e-5``, so the
default probe tolerance reproduces them exactly and a tighter ``--tol``
tightens every check.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from itertools import combinations, product
from pathlib import Path

import numpy as np

from .calculus import DEFAULT_TOL, function_battery, map_mul, merge_reports
from .errors import LieGeomError
from .field import VectorField, bracket_apply, lie_bracket, smooth_vf_check, vf_apply, vf_sharp
from .geometry import Chart, Manifold, Region, diff_check, manifold_new, smooth_compat
from .groups import DiffGroupElement, diff_group, group_axioms_check
from .lie import (
    LieGroup,
    action_check,
    invariant_under_check,
    left_action,
    left_mult,
    lie_algebra_check,
    lie_algebra_of,
    sample_group_elements,
)
from .models import euclidean_lie_group, gl_group, random_polynomial_field, test_diffeos
from .polynomial import ParseError, parse_field, parse_polynomial, polynomial_map
from .tangent import tangent_apply

SCHEMA_VERSION = "1.0"
MAX_EUCLIDEAN_DIM = 4
CHECK_POINTS = 8

TOLERANCES = {
    "group": 1e-9,
    "diff_group": 1e-9,
    "action": 1e-9,
    "antisymmetry": 1e-10,
    "routes": 1e-6,
    "leibniz": 1e-7,
    "jacobi": 1e-5,
    "invariance": 1e-6,
    "algebra": 1e-6,
}


class ConfigError(LieGeomError, ValueError):
    """Invalid run configuration (reported as a usage error)."""


@dataclass(frozen=True)
class RunConfig:
    model: str
    order: int = 3
    samples: int = 12
    tol: float = DEFAULT_TOL
    seed: int = 0
    format: str = "text"
    output: str | None = None

    def __post_init__(self):
        if not 1 <= self.order <= 4:
            raise ConfigError(f"--order must lie in [1, 4], got {self.order}")
        if self.samples < 1:
            raise ConfigError(f"--samples must be at least 1, got {self.samples}")
        if not (self.tol > 0 and math.isfinite(self.tol)):
            raise ConfigError(f"--tol must be positive, got {self.tol}")
        if self.format not in ("text", "json"):
            raise ConfigError(f"unknown format {self.format!r}")

    def scaled(self, key: str) -> float:
        return TOLERANCES[key] * self.tol / DEFAULT_TOL

    def echo(self) -> dict:
        return {"model": self.model, "order": self.order, "samples": self.samples, "tol": self.tol,
                "seed": self.seed}


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    max_residual: float
    samples: int
    paper_anchor: str
    tol: float
    details: dict = field(default_factory=dict)


@dataclass
class Model:
    kind: str
    manifold: Manifold
    group: LieGroup | None = None
    fields: list = field(default_factory=list)


def parse_model(spec: str) -> tuple[str, object]:
    kind, sep, arg = spec.partition(":")
    if not sep or not arg:
        raise ConfigError(f"model must look like euclidean:N, gl:N or file:PATH, got {spec!r}")
    if kind == "file":
        return kind, arg
    if kind not in ("euclidean", "gl"):
        raise ConfigError(f"unknown model kind {kind!r}")
    try:
        n = int(arg)
    except ValueError:
        raise ConfigError(f"model size must be an integer, got {arg!r}") from None
    if kind == "euclidean" and not 1 <= n <= MAX_EUCLIDEAN_DIM:
        raise ConfigError(f"euclidean:N needs 1 <= N <= {MAX_EUCLIDEAN_DIM}")
    if kind == "gl" and n not in (1, 2, 3):
        raise ConfigError("gl:N needs N in {1, 2, 3}")
    return kind, n


def _box(spec: dict, dim: int, n: int, seed: int, name: str) -> Region:
    lo, hi = spec.get("lo"), spec.get("hi")
    if lo is None or hi is None or len(lo) != dim or len(hi) != dim:
        raise ConfigError(f"{name} needs 'lo' and 'hi' lists of length {dim}")
    if any(a >= b for a, b in zip(lo, hi)):
        raise ConfigError(f"{name} has an empty box")
    return Region.box(lo, hi, n, seed, name=name)


def load_file_model(path: str, config: RunConfig) -> Model:
    """Manifold with polynomial charts over boxes, plus optional polynomial fields.

    Format::

        {"name": "...", "dim": 2,
         "charts": [{"id": "a", "domain": {"lo": [..], "hi": [..]},
                     "codomain": {"lo": [..], "hi": [..]},
                     "fwd": ["x0", "x1"], "inv": ["x0", "x1"]}],
         "fields": ["1, x0", "x1, 0"]}
    """
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read model file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"model file is not valid JSON: {exc}") from None
    try:
        dim = int(data["dim"])
        charts = []
        for k, c in enumerate(data["charts"]):
            dom = _box(c["domain"], dim, config.samples, config.seed + k, f"{c['id']}.domain")
            cod = _box(c["codomain"], dim, config.samples, config.seed + k + 101, f"{c['id']}.codomain")
            fwd = polynomial_map([parse_polynomial(s, dim) for s in c["fwd"]], f"{c['id']}")
            inv = polynomial_map([parse_polynomial(s, dim) for s in c["inv"]], f"{c['id']}^-1")
            charts.append(Chart(str(c["id"]), dom, cod, fwd, inv))
        M = manifold_new(charts, config.order, name=str(data.get("name", path)))
        specs = data.get("fields") or [",".join("1" if i == j else "0" for j in range(dim)) for i in range(dim)]
        fields = [VectorField.from_chart(M, M.charts[0].id, polynomial_map(parse_field(s, dim)), s) for s in specs]
    except (KeyError, TypeError, ParseError) as exc:
        raise ConfigError(f"malformed model file: {exc}") from None
    return Model("file", M, None, fields)


def build_model(config: RunConfig) -> Model:
    kind, arg = parse_model(config.model)
    if kind == "file":
        return load_file_model(arg, config)
    if kind == "euclidean":
        G = euclidean_lie_group(arg, n_samples=config.samples, seed=config.seed)
        extra = [random_polynomial_field(G.manifold, config.seed + k) for k in range(2)]
    else:
        G = gl_group(arg, n_samples=config.samples, seed=config.seed)
        extra = []
    return Model(kind, G.manifold, G, extra)


# -- individual checks ------------------------------------------------------------------------


def _finite_max(values) -> float:
    out = 0.0
    for v in values:
        if not math.isfinite(v):
            return float("inf")
        out = max(out, v)
    return out


def check_compatibility(m: Model, cfg: RunConfig) -> CheckResult:
    charts = m.manifold.charts
    reps = [smooth_compat(a, b, cfg.order, cfg.tol) for i, a in enumerate(charts) for b in charts[i:]]
    rep = merge_reports(reps, cfg.order)
    return CheckResult("manifold.compatibility", rep.passed, rep.max_fd_residual, rep.samples_checked,
                       "smooth_compat", cfg.tol)


def check_group_axioms(m: Model, cfg: RunConfig, elements) -> CheckResult:
    tol = cfg.scaled("group")
    rep = group_axioms_check(m.group.group, elements, tol)
    return CheckResult("group.axioms", rep.passed, rep.max_residual, rep.samples, "grp_on", tol)


def check_certificates(m: Model, cfg: RunConfig) -> list[CheckResult]:
    G = m.group
    mult = diff_check(G.product_manifold, G.manifold, G.times, cfg.order, cfg.tol)
    inv = diff_check(G.manifold, G.manifold, G.inverse, cfg.order, cfg.tol)
    return [
        CheckResult("lie_group.smooth_mult", mult.passed, mult.max_residual, len(mult.records), "smooth_mult",
                    cfg.tol),
        CheckResult("lie_group.smooth_inv", inv.passed, inv.max_residual, len(inv.records), "smooth_inv", cfg.tol),
    ]


def check_diff_group(m: Model, cfg: RunConfig) -> CheckResult:
    M, G = m.manifold, m.group
    if m.kind == "euclidean":
        elements = [DiffGroupElement.from_maps(M, f, g) for f, g in test_diffeos(M.ambient_dim)[:4]]
    else:
        gens = [G.unit, *G.generators[:2]]
        elements = [DiffGroupElement(left_action(G, g), left_action(G, G.inv(g))) for g in gens]
    tol = cfg.scaled("diff_group")
    D = diff_group(M, cfg.order, cfg.tol)
    rep = group_axioms_check(D, elements, tol)
    return CheckResult("diff.group", rep.passed, rep.max_residual, rep.samples, "Diff_grp", tol)


def check_left_action(m: Model, cfg: RunConfig) -> CheckResult:
    G = m.group
    gs = [G.unit, *G.generators]
    tol = cfg.scaled("action")
    rep = action_check(G, G.manifold, lambda g: left_action(G, g), gs, cfg.order, tol, cfg.tol)
    details = {"automorphisms_passed": rep.automorphisms_passed,
               "joint_passed": rep.joint.passed, "joint_probe_residual": rep.joint.max_residual}
    return CheckResult("left_action.homomorphism", rep.passed, rep.homomorphism_residual, len(gs),
                       "lie_group_action", tol, details)


def check_field_smoothness(fields, cfg: RunConfig) -> CheckResult:
    reps = [smooth_vf_check(X, cfg.order, cfg.tol) for X in fields]
    ok = all(r.passed for r in reps)
    consistent = all(r.consistent for r in reps)
    return CheckResult("field.smoothness", ok and consistent, _finite_max(r.max_residual for r in reps),
                       sum(r.samples_checked for r in reps), "smooth_vector_field_iff_local", cfg.tol,
                       {"routes_agree": consistent})


def _points(M: Manifold) -> np.ndarray:
    return M.carrier.points[:CHECK_POINTS]


def _safe(fn, *args) -> float:
    try:
        return fn(*args)
    except (ArithmeticError, ValueError, LieGeomError):
        return float("inf")


def check_brackets(fields, cfg: RunConfig) -> list[CheckResult]:
    M = fields[0].manifold
    pts = _points(M)
    battery = function_battery(M.ambient_dim)
    fs = battery[:4]
    pairs = list(combinations(range(len(fields)), 2))
    brackets = {(i, j): lie_bracket(fields[i], fields[j]) for i, j in pairs}

    def comps(X, p):
        return vf_apply(X, p).comps

    anti = routes = leib = 0.0
    for (i, j), B in brackets.items():
        R = lie_bracket(fields[j], fields[i])
        for p in pts:
            anti = max(anti, _safe(lambda: float(np.max(np.abs(comps(B, p) + comps(R, p))))))
            for f in fs:
                routes = max(routes, _safe(lambda: abs(tangent_apply(vf_apply(B, p), f)
                                                       - bracket_apply(fields[i], fields[j], p, f))))
        f, g = battery[2], battery[5]
        Bfg, Bf, Bg = vf_sharp(B, map_mul(f, g)), vf_sharp(B, f), vf_sharp(B, g)
        for p in pts:
            lhs = _safe(lambda: float(Bfg(p)[0]))
            rhs = _safe(lambda: float(f(p)[0] * Bg(p)[0] + g(p)[0] * Bf(p)[0]))
            leib = max(leib, abs(lhs - rhs) if math.isfinite(lhs) and math.isfinite(rhs) else float("inf"))
    jac_tol = cfg.scaled("jacobi")
    jac = _safe(lambda: lie_algebra_check(fields, tol=jac_tol, points=pts).jacobi_residual)
    n = len(pts)
    return [
        CheckResult("bracket.antisymmetry", anti <= cfg.scaled("antisymmetry"), anti, n, "lie_bracket_def",
                    cfg.scaled("antisymmetry")),
        CheckResult("bracket.routes", routes <= cfg.scaled("routes"), routes, n, "lie_bracket_def",
                    cfg.scaled("routes")),
        CheckResult("bracket.leibniz", leib <= cfg.scaled("leibniz"), leib, n, "product_rule_lie_bracket",
                    cfg.scaled("leibniz")),
        CheckResult("bracket.jacobi", jac <= jac_tol, jac, n, "lie_bracket_jacobi", jac_tol),
    ]


def check_left_invariance(m: Model, cfg: RunConfig, basis, elements) -> CheckResult:
    G = m.group
    tol = cfg.scaled("invariance")
    pts = _points(G.manifold)
    battery = function_battery(G.manifold.ambient_dim)[:4]
    fields = list(basis) + [lie_bracket(X, Y) for X, Y in combinations(basis, 2)]
    worst = 0.0
    for g in elements:
        F = left_mult(G, g)
        for X in fields:
            worst = max(worst, invariant_under_check(X, F, battery, tol, points=pts).max_residual)
    return CheckResult("left_invariance", worst <= tol, worst, len(elements) * len(pts),
                       "vector_field_invariant_under", tol)


def check_lie_algebra(m: Model, cfg: RunConfig, result) -> CheckResult:
    tol = cfg.scaled("algebra")
    res = max(result.algebra.bilinearity_residual, result.algebra.alternating_residual,
              result.algebra.jacobi_residual, result.subalgebra.span_residual, result.subalgebra.closure_residual)
    c = np.where(np.abs(result.structure_constants) < 1e-12, 0.0, result.structure_constants)
    return CheckResult("lie_algebra", result.passed, res, result.algebra.samples,
                       "lie_algebra_of_left_invariant_svf", tol,
                       {"dimension": len(result.basis), "structure_constants": c.round(12).tolist()})


def run_suite(config: RunConfig, model: Model | None = None) -> list[CheckResult]:
    """All checks for the configured model, in fixed order."""
    m = model or build_model(config)
    results = [check_compatibility(m, config)]
    if m.group is None:
        results.append(check_field_smoothness(m.fields, config))
        results.extend(check_brackets(m.fields, config))
        return results
    G = m.group
    elements = sample_group_elements(G, n_random=CHECK_POINTS, seed=config.seed)
    results.append(check_group_axioms(m, config, elements))
    results.extend(check_certificates(m, config))
    results.append(check_diff_group(m, config))
    results.append(check_left_action(m, config))
    alg = lie_algebra_of(G, config.order, tol=config.scaled("algebra"), probe_tol=config.tol,
                         jacobi_tol=config.scaled("jacobi"), n_points=CHECK_POINTS, seed=config.seed)
    fields = alg.basis + m.fields
    results.append(check_field_smoothness(fields, config))
    results.extend(check_brackets(fields, config))
    results.append(check_left_invariance(m, config, alg.basis, elements[: 1 + len(G.generators)]))
    results.append(check_lie_algebra(m, config, alg))
    return results


# -- rendering ------------------------------------------------------------------------------------


def _jsonable(x):
    if isinstance(x, float):
        return x if math.isfinite(x) else None
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, np.integer)):
        return _jsonable(x.item())
    return x


def render_json(config: RunConfig, results: list[CheckResult]) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "config": config.echo(),
        "passed": all(r.passed for r in results),
        "checks": [asdict(r) for r in results],
    }
    return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"


def _fmt(x: float) -> str:
    return f"{x:.3e}" if math.isfinite(x) else "inf"


def render_text(config: RunConfig, results: list[CheckResult]) -> str:
    lines = [f"model {config.model}  order {config.order}  samples {config.samples}  "
             f"tol {config.tol:g}  seed {config.seed}"]
    width = max(len(r.name) for r in results)
    for r in results:
        lines.append(f"{r.name:<{width}}  {'PASS' if r.passed else 'FAIL'}  residual {_fmt(r.max_residual):>10}"
                     f"  tol {r.tol:<8.1e}  n {r.samples:>5}  [{r.paper_anchor}]")
        consts = r.details.get("structure_constants")
        if consts is not None:
            n = len(consts)
            for i, j in product(range(n), repeat=2):
                if i < j:
                    row = " ".join(f"{v:+.6f}" for v in consts[i][j])
                    lines.append(f"    [X{i}, X{j}] = ({row})")
    failed = [r.name for r in results if not r.passed]
    lines.append("all checks passed" if not failed else f"{len(failed)} failed: {', '.join(failed)}")
    return "\n".join(lines) + "\n"
