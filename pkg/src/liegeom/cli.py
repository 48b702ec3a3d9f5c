"""Command-line entry point: ``liegeom verify|bracket|report``.

Exit codes: 0 when every check passes, 1 when a check fails (or a point is
outside the carrier), 2 for usage and configuration errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .errors import LieGeomError, OutOfDomainError
from .field import bracket_apply, lie_bracket, vf_apply
from .models import polynomial_field
from .polynomial import ParseError, parse_field
from .suite import ConfigError, RunConfig, build_model, render_json, render_text, run_suite
from .tangent import coord_fun

SEED_ENV = "LIEGEOM_SEED"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="liegeom", description="Verify manifolds, vector fields and Lie groups.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, default_format):
        p.add_argument("--model", default="euclidean:2", help="euclidean:N, gl:N or file:PATH (default euclidean:2)")
        p.add_argument("--order", type=int, default=3, help="probe order, 1..4 (default 3)")
        p.add_argument("--samples", type=int, default=12, help="samples per region (default 12)")
        p.add_argument("--tol", type=float, default=1e-5, help="probe tolerance (default 1e-5)")
        p.add_argument("--seed", type=int, default=None, help=f"sampling seed (default ${SEED_ENV} or 0)")
        p.add_argument("--format", choices=("text", "json"), default=default_format)
        p.add_argument("--output", default=None, help="write the report here instead of stdout")

    common(sub.add_parser("verify", help="run the verification suite"), "text")
    common(sub.add_parser("report", help="run the suite and emit the JSON report"), "json")
    b = sub.add_parser("bracket", help="Lie bracket of two polynomial fields at a point")
    common(b, "text")
    b.add_argument("--field-x", required=True, help='components of X, e.g. "1,0"')
    b.add_argument("--field-y", required=True, help='components of Y, e.g. "0,x0"')
    b.add_argument("--point", required=True, help='comma-separated point, e.g. "0,0"')
    return parser


def _config(args) -> RunConfig:
    seed = args.seed if args.seed is not None else _default_seed()
    return RunConfig(args.model, args.order, args.samples, args.tol, seed, args.format, args.output)


def _emit(text: str, output: str | None):
    if output is None:
        sys.stdout.write(text)
        return
    try:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {output}: {exc}") from None


def cmd_verify(config: RunConfig) -> int:
    results = run_suite(config)
    render = render_json if config.format == "json" else render_text
    _emit(render(config, results), config.output)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def cmd_report(config: RunConfig) -> int:
    results = run_suite(config)
    _emit(render_json(config, results), config.output)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def bracket_at(config: RunConfig, field_x: str, field_y: str, point: str) -> dict:
    """Bracket components at a point by the coordinate and derivation routes."""
    model = build_model(config)
    M = model.manifold
    try:
        X = polynomial_field(M, parse_field(field_x, M.dim), field_x)
        Y = polynomial_field(M, parse_field(field_y, M.dim), field_y)
        p = np.array([float(s) for s in point.split(",")])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if p.size != M.ambient_dim:
        raise UsageError(f"point needs {M.ambient_dim} coordinates")
    v = vf_apply(lie_bracket(X, Y), p)
    deriv = np.array([bracket_apply(X, Y, p, coord_fun(v.chart, p, i)) for i in range(M.dim)])
    return {
        "point": p.tolist(),
        "chart": v.chart.id,
        "coordinate": v.comps.tolist(),
        "derivation": deriv.tolist(),
        "discrepancy": float(np.max(np.abs(v.comps - deriv))),
    }


def cmd_bracket(config: RunConfig, field_x: str, field_y: str, point: str) -> int:
    out = bracket_at(config, field_x, field_y, point)
    if config.format == "json":
        text = json.dumps(out, indent=2, sort_keys=True) + "\n"
    else:
        fmt = lambda xs: "(" + ", ".join(f"{x:.10g}" for x in xs) + ")"  # noqa: E731
        text = (f"[X,Y] at {fmt(out['point'])} in chart {out['chart']}\n"
                f"  coordinate  {fmt(out['coordinate'])}\n"
                f"  derivation  {fmt(out['derivation'])}\n"
                f"  discrepancy {out['discrepancy']:.3e}\n")
    _emit(text, config.output)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        config = _config(args)
        if args.command == "verify":
            return cmd_verify(config)
        if args.command == "report":
            return cmd_report(config)
        return cmd_bracket(config, args.field_x, args.field_y, args.point)
    except (UsageError, ConfigError, ParseError) as exc:
        print(f"liegeom: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OutOfDomainError as exc:
        print(f"liegeom: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except LieGeomError as exc:
        print(f"liegeom: check failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
