"""Command-line entry point: ``qspaceform <subcommand> [flags]``.

JSON and CSV output is byte-stable for a fixed set of flags (``--workers``
only changes scheduling and is not echoed). The exit code is 0 iff every
check passed, 2 for invalid flags.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from typing import Any, Sequence

import numpy as np

from . import sphere_model as sm
from .checks import Check, CheckReport, flag_check, max_abs, residual_check, value_check
from .curvature import (
    SpaceFormParams,
    check_symmetries,
    constant_curvature_reduction,
    curvature_term_operator,
    quaternion_sectional,
)
from .hessian_identity import pointwise_stability_check, proof_chain_check
from .quaternion_frame import (
    build_adapted_frame,
    build_standard_structure,
    conjugated_structure,
    random_orthogonal,
    verify_frame,
    verify_structure,
)
from .spectral_criterion import StabilityReport, full_report

DEFAULT_TOL = 1e-10
MC_REFERENCE_N = 10**6
LAMBDA1_RTOL = 0.01
WITNESS_RTOL = 0.02
KILLING_RATIO = 0.02

REPORT_COLUMNS = ("n", "c", "classification", "verdict", "lambda1", "einstein_constant", "margin")

NO_COMPACT_MODEL = (
    "no desk-scale compact model for c <= 0: compact quaternion space forms with c < 0 "
    "exist only as quotients of quaternion hyperbolic space by cocompact lattices"
)


# --- subcommands -------------------------------------------------------------


def run_identities(cfg: argparse.Namespace) -> tuple[CheckReport, dict[str, Any]]:
    params = SpaceFormParams(cfg.n, cfg.c)
    Q = build_standard_structure(cfg.n)
    tol = cfg.tol
    conj = conjugated_structure(Q, random_orthogonal(Q.dim, cfg.seed))
    conj_report = CheckReport.of(
        residual_check("conjugated_" + c.name, c.paper_ref, c.residual, tol)
        for c in verify_structure(conj, tol)
    )
    report = (
        verify_structure(Q, tol)
        + conj_report
        + verify_frame(Q, build_adapted_frame(Q, seed=cfg.seed), tol)
        + check_symmetries(params, Q, cfg.trials, cfg.seed, tol)
        + proof_chain_check(params, Q, cfg.trials, cfg.seed, tol)
        + pointwise_stability_check(params, cfg.trials, cfg.seed, Q)
    )
    if cfg.n == 1:
        report = report + constant_curvature_reduction(params, Q)
    return report, {}


def run_curvature(cfg: argparse.Namespace) -> tuple[CheckReport, dict[str, Any]]:
    params = SpaceFormParams(cfg.n, cfg.c)
    Q = build_standard_structure(cfg.n)
    c, tol = params.c, cfg.tol
    rng = np.random.default_rng(cfg.seed)
    X = rng.standard_normal((cfg.trials, params.dim))
    alphas = rng.integers(1, 4, size=cfg.trials)
    ks = np.array([quaternion_sectional(params, Q, x, int(a)) for x, a in zip(X, alphas)])
    ops = [curvature_term_operator(params, Q, build_adapted_frame(Q, seed=[cfg.seed, k])) for k in range(5)]
    expected = (cfg.n + 2) * c * np.eye(params.dim)
    checks = [
        residual_check("quaternion_sectional_equals_c", "6bis", max_abs(ks - c), tol * (1 + abs(c))),
        residual_check(
            "curvature_term_operator", "coconut",
            max(max_abs(op - expected) for op in ops), tol * (1 + abs(c)) * cfg.n,
        ),
        residual_check("operator_frame_independence", "coconut", max(max_abs(op - ops[0]) for op in ops), tol),
    ]
    report = CheckReport.of(checks) + check_symmetries(params, Q, cfg.trials, cfg.seed, tol)
    if cfg.n == 1:
        report = report + constant_curvature_reduction(params, Q)
    results = {"einstein_constant": (cfg.n + 2) * c, "operator_diagonal_mean": float(np.mean(np.diag(ops[0])))}
    return report, results


def mc_rtol(base: float, samples: int) -> float:
    """Relative tolerance at N samples, scaled from its value at N = 1e6."""
    return base * math.sqrt(max(1.0, MC_REFERENCE_N / samples))


def run_sphere(cfg: argparse.Namespace) -> tuple[CheckReport, dict[str, Any]]:
    spec = sm.SphereSpec(cfg.c)
    quad = sm.sample(spec, cfg.samples, cfg.seed)
    ref = sm.coordinate_gradient_reference(spec)
    a = (0.0, 0.0, 1.0, 0.0, 0.0)
    grad = sm.CoordinateGradient(a)
    killing = sm.Killing.rotation(0, 1)
    w = cfg.workers

    lam = sm.rayleigh_lambda1(quad, a, workers=w)
    witness = sm.hessian_identity_map(grad, quad, workers=w)
    null = sm.hessian_identity_map(killing, quad, workers=w)
    lam_tol = cfg.rtol if cfg.rtol is not None else mc_rtol(LAMBDA1_RTOL, cfg.samples)
    hess_tol = cfg.rtol if cfg.rtol is not None else mc_rtol(WITNESS_RTOL, cfg.samples)
    kill_tol = mc_rtol(KILLING_RATIO, cfg.samples)
    rough = (spec.lambda1 - 3 * spec.c) * witness.l2

    checks = [
        value_check("lambda1_rayleigh", "smith", lam, ref["lambda1"], lam_tol),
        value_check("coordinate_gradient_l2", "coconut", witness.l2, ref["l2"], lam_tol),
        value_check("coordinate_gradient_dirichlet", "Reh", witness.dirichlet, ref["dirichlet"], hess_tol),
        value_check("instability_witness_hessian", "coconut", witness.total, ref["total"], hess_tol),
        flag_check("instability_witness_negative", "smith", witness.total < 0, witness.total),
        Check(
            "killing_jacobi_null", "coconut", kill_tol,
            bool(abs(null.total) <= kill_tol * null.dirichlet),
            value=abs(null.total) / null.dirichlet if null.dirichlet > 0 else math.inf,
        ),
        value_check("rough_laplacian_integration_by_parts", "Reh", rough, witness.dirichlet, hess_tol),
    ]
    report = CheckReport.of(checks, verdict="unstable" if witness.total < 0 else "indeterminate")
    results = {
        "lambda1_estimate": lam,
        "coordinate_gradient": witness.to_dict(),
        "killing": null.to_dict(),
        "closed_form": ref,
    }
    return report, results


def _report_checks(rep: StabilityReport) -> list[Check]:
    return [flag_check(name, "coconut", ok) for name, ok in rep.identity_checks.items()]


def run_stability(cfg: argparse.Namespace) -> tuple[CheckReport, dict[str, Any]]:
    rep = full_report(
        cfg.n, cfg.c, attach_numerics=cfg.attach_numerics, trials=cfg.trials,
        seed=cfg.seed, samples=cfg.samples, workers=cfg.workers,
    )
    checks = _report_checks(rep)
    if rep.margin is not None:
        checks.append(flag_check("smith_margin_negative", "smith", rep.margin < 0, rep.margin))
    if rep.numerics is not None:
        num = rep.numerics
        checks += [
            value_check("lambda1_rayleigh", "smith", num["lambda1_estimate"], num["lambda1_reference"],
                        mc_rtol(LAMBDA1_RTOL, cfg.samples)),
            value_check("instability_witness_hessian", "coconut", num["witness_hessian"],
                        num["witness_hessian_reference"], mc_rtol(WITNESS_RTOL, cfg.samples)),
        ]
    return CheckReport.of(checks, verdict=rep.verdict.value), {"report": rep.to_dict()}


def parse_range(text: str) -> range:
    m = re.fullmatch(r"\s*(\d+)\s*\.\.\s*(\d+)\s*", text)
    if not m:
        raise ValueError(f"bad range {text!r}, expected A..B")
    lo, hi = int(m.group(1)), int(m.group(2))
    if lo < 1 or hi < lo:
        raise ValueError(f"empty or invalid range {text!r}")
    return range(lo, hi + 1)


def run_report(cfg: argparse.Namespace) -> list[StabilityReport]:
    return [full_report(n, cfg.c, trials=cfg.trials, seed=cfg.seed) for n in cfg.n_values]


# --- output ------------------------------------------------------------------


def _config_dict(cfg: argparse.Namespace) -> dict[str, Any]:
    out: dict[str, Any] = {"subcommand": cfg.subcommand}
    for key in ("n", "n_range", "c", "trials", "samples", "seed", "format", "tol", "rtol", "attach_numerics"):
        if hasattr(cfg, key):
            out[key] = getattr(cfg, key)
    return out


def _csv_value(v) -> str:
    return "" if v is None else str(v)


def render_checks(cfg, report: CheckReport, results: dict[str, Any]) -> str:
    if cfg.format == "json":
        doc = {"config": _config_dict(cfg), **report.to_dict()}
        if results:
            doc["results"] = results
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "paper_ref", "kind", "quantity", "reference", "tolerance", "pass"])
        for c in report:
            kind, qty = ("residual", c.residual) if c.residual is not None else ("value", c.value)
            w.writerow([c.name, c.paper_ref, kind, _csv_value(qty), _csv_value(c.reference),
                        c.tolerance, str(c.passed).lower()])
        return buf.getvalue()
    lines = [f"{cfg.subcommand}: {'PASS' if report.passed else 'FAIL'}"]
    for c in report:
        qty = f"residual={c.residual:.3e}" if c.residual is not None else f"value={c.value}"
        ref = f" reference={c.reference:.6g}" if c.reference is not None else ""
        lines.append(f"  [{'ok' if c.passed else 'FAIL'}] {c.name} ({c.paper_ref}) {qty}{ref} tol={c.tolerance:g}")
    if report.verdict:
        lines.append(f"verdict: {report.verdict}")
    return "\n".join(lines) + "\n"


def render_rows(cfg, reports: Sequence[StabilityReport]) -> str:
    rows = [r.to_row() for r in reports]
    if cfg.format == "json":
        return json.dumps(rows, indent=2, allow_nan=False) + "\n"
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        for row in rows:
            w.writerow([_csv_value(row[k]) for k in REPORT_COLUMNS])
        return buf.getvalue()
    return "".join(
        f"n={r['n']} c={r['c']:g} {r['classification']:<10} {r['verdict']:<17} "
        f"lambda1={r['lambda1']} C={r['einstein_constant']} margin={r['margin']}\n"
        for r in rows
    )


# --- argument parsing -------------------------------------------------------


def _finite(text: str) -> float:
    v = float(text)
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--c", type=_finite, default=4.0, help="quaternion sectional curvature")
    common.add_argument("--trials", type=int, default=1000)
    common.add_argument("--samples", type=int, default=10**6)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--workers", type=int, default=1, help="threads for quadrature (output-invariant)")

    parser = argparse.ArgumentParser(prog="qspaceform", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    for name, help_ in (
        ("identities", "structure, curvature and Hessian-density identities"),
        ("curvature", "curvature tensor checks"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("--n", type=int, default=1)
        p.add_argument("--tol", type=_finite, default=DEFAULT_TOL)

    p = sub.add_parser("sphere", parents=[common], help="Monte Carlo checks on S^4 = P^1(H)")
    p.add_argument("--rtol", type=_finite, default=None, help="override the relative MC tolerance")

    p = sub.add_parser("stability", parents=[common], help="stability verdict for one (n, c)")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--attach-numerics", action="store_true")

    p = sub.add_parser("report", parents=[common], help="one stability row per n")
    p.add_argument("--n-range", required=True, help="inclusive range A..B")
    return parser


def _validate(parser: argparse.ArgumentParser, cfg: argparse.Namespace):
    if getattr(cfg, "n", 1) < 1:
        parser.error(f"--n must be >= 1, got {cfg.n}")
    if cfg.trials < 1:
        parser.error("--trials must be >= 1")
    if cfg.samples < 1:
        parser.error("--samples must be >= 1")
    if cfg.workers < 1:
        parser.error("--workers must be >= 1")
    if cfg.subcommand == "sphere":
        if cfg.c <= 0:
            parser.error(NO_COMPACT_MODEL)
        cfg.n = 1
    if cfg.subcommand == "report":
        try:
            cfg.n_values = parse_range(cfg.n_range)
        except ValueError as exc:
            parser.error(str(exc))


RUNNERS = {
    "identities": run_identities,
    "curvature": run_curvature,
    "sphere": run_sphere,
    "stability": run_stability,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    cfg = parser.parse_args(argv)
    _validate(parser, cfg)
    if cfg.subcommand == "report":
        reports = run_report(cfg)
        sys.stdout.write(render_rows(cfg, reports))
        return 0 if all(r.checks_passed for r in reports) else 1
    report, results = RUNNERS[cfg.subcommand](cfg)
    sys.stdout.write(render_checks(cfg, report, results))
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
