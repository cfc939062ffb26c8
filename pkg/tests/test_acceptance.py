"""Acceptance criteria, one test each; every test records a PASS/FAIL line."""

import contextlib
import io
import itertools
import math
import subprocess
import sys
import time

import numpy as np

from qspaceform import sphere_model as sm
from qspaceform.cli import main
from qspaceform.curvature import (
    SpaceFormParams,
    check_symmetries,
    constant_curvature_reduction,
    curvature_term_operator,
    quaternion_sectional,
)
from qspaceform.hessian_identity import hessian_closed_form, pointwise_stability_check, proof_chain_check
from qspaceform.quaternion_frame import build_adapted_frame, build_standard_structure
from qspaceform.spectral_criterion import (
    SpectralData,
    Verdict,
    full_report,
    qps_constants,
    qps_margin,
    smith_verdict,
)

NS = (1, 2, 3)
CS = (-4.0, -1.0, 0.0, 1.0, 4.0)
GRID = list(itertools.product(NS, CS))
A3 = (0.0, 0.0, 1.0, 0.0, 0.0)


def test_curvature_contraction_constant(criterion):
    t0 = time.perf_counter()
    worst = 0.0
    ok = True
    for n, c in GRID:
        Q, params = build_standard_structure(n), SpaceFormParams(n, c)
        for seed in range(5):
            op = curvature_term_operator(params, Q, build_adapted_frame(Q, seed))
            dev = float(np.max(np.abs(op - (n + 2) * c * np.eye(4 * n))))
            ok &= dev <= 1e-10 * (1 + abs(c)) * n
            worst = max(worst, dev)
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 5
    assert criterion("1 contraction constant (n+2)c", ok, f"max dev {worst:.2e}, {elapsed:.2f}s")


def test_quaternion_sectional_curvature(criterion):
    t0 = time.perf_counter()
    worst_rel = 0.0
    ok = True
    for n, c in GRID:
        Q, params = build_standard_structure(n), SpaceFormParams(n, c)
        rng = np.random.default_rng(100 * n + int(c) + 10)
        X = rng.standard_normal((1000, 4 * n))
        alphas = rng.integers(1, 4, size=1000)
        for a in (1, 2, 3):
            vals = quaternion_sectional(params, Q, X[alphas == a], a)
            dev = float(np.max(np.abs(vals - c)))
            ok &= dev <= 1e-10 * (1 + abs(c))
            worst_rel = max(worst_rel, dev / (1 + abs(c)))
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 5
    assert criterion("2 quaternion sectional curvature = c", ok, f"max dev/(1+|c|) {worst_rel:.2e}, {elapsed:.2f}s")


def test_proof_chain_identities(criterion):
    t0 = time.perf_counter()
    failures = []
    worst = {}
    for n, c in GRID:
        rep = proof_chain_check(SpaceFormParams(n, c), build_standard_structure(n), trials=1000, seed=n * 31 + int(c))
        for chk in rep:
            worst[chk.name] = max(worst.get(chk.name, 0.0), chk.residual)
        if not rep.passed:
            failures.append((n, c))
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 10
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    assert criterion("3 proof-chain identities", ok, f"{detail}; failures {failures}; {elapsed:.2f}s")


def test_curvature_tensor_sanity(criterion):
    ok = True
    worst = 0.0
    for n, c in GRID:
        rep = check_symmetries(SpaceFormParams(n, c), build_standard_structure(n), trials=1000, seed=n)
        ok &= rep.passed
        worst = max([worst] + [chk.residual for chk in rep])
    red = 0.0
    for c in CS:
        rep = constant_curvature_reduction(SpaceFormParams(1, c), build_standard_structure(1))
        ok &= rep.passed
        red = max(red, rep.checks[0].residual)
    assert criterion("4 symmetries, Bianchi, n=1 reduction", ok, f"symmetry max {worst:.1e}, reduction max {red:.1e}")


def test_projective_constants(criterion):
    ok = True
    for n in range(1, 1001):
        sd = qps_constants(n)
        ok &= (sd.lambda1, sd.einstein_constant) == (8 * (n + 1), 4 * (n + 2))
        ok &= qps_margin(n) == -8
        ok &= smith_verdict(sd) is Verdict.UNSTABLE
    ok &= smith_verdict(SpectralData(24, 12)) is Verdict.STABLE
    assert criterion("5 lambda1=8(n+1), C=4(n+2), margin -8, n=1..1000", ok, "boundary lambda1=2C stable")


def test_spectral_confirmation(criterion):
    ests, times = [], []
    for seed in range(1, 6):
        t0 = time.perf_counter()
        quad = sm.sample(sm.SphereSpec(4.0), 10**6, seed)
        ests.append(sm.rayleigh_lambda1(quad, A3))
        times.append(time.perf_counter() - t0)
    ok = all(abs(e - 16) <= 0.01 * 16 for e in ests) and max(times) < 30
    detail = ", ".join(f"{e:.4f}" for e in ests) + f"; max {max(times):.2f}s/seed"
    assert criterion("6 Rayleigh lambda1 = 16 on S^4(4), 5 seeds", ok, detail)


def test_instability_witness(criterion, quad_1e6):
    fs = sm.CoordinateGradient(A3)
    ref = -16 * math.pi**2 / 15
    total = sm.hessian_identity_map(fs, quad_1e6).total
    ok = abs(total - ref) <= 0.02 * abs(ref)
    small = [sm.hessian_identity_map(fs, sm.sample(sm.SphereSpec(4.0), 10**5, s)).total for s in range(10)]
    ok &= max(small) < 0
    assert criterion(
        "7 instability witness Hess = -16pi^2/15",
        ok,
        f"N=1e6: {total:.4f} vs {ref:.4f}; N=1e5 seeds 0..9 max {max(small):.4f}",
    )


def test_killing_null_directions(criterion, quad_1e6):
    h = sm.hessian_identity_map(sm.Killing.rotation(0, 1), quad_1e6)
    ratio = abs(h.total) / h.dirichlet
    assert criterion("8 Killing field Jacobi-null", ratio <= 0.02, f"|total|/dirichlet {ratio:.2e}")


def test_negative_curvature_index_zero(criterion):
    ok = True
    min_contrib = math.inf
    for n, c in GRID:
        if c >= 0:
            continue
        params = SpaceFormParams(n, c)
        rep = pointwise_stability_check(params, trials=1000, seed=n)
        ok &= rep.passed and rep.verdict == "index-zero"
        min_contrib = min(min_contrib, rep["curvature_contribution_nonnegative"].value)
        grid = np.concatenate([[0.0], np.logspace(-12, 12, 25)])
        ok &= all(hessian_closed_form(params, d, l).total >= 0 for d in grid for l in grid)
        ok &= full_report(n, c, trials=100).verdict is Verdict.STABLE_INDEX_ZERO
    assert criterion("9 c<0 gives index zero", ok, f"min curvature contribution {min_contrib:.3e}")


def _cli(argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(argv)
    return code, buf.getvalue()


def test_cli_determinism(criterion):
    runs = [
        ["identities", "--n", "2", "--c", "-3", "--trials", "200", "--seed", "7"],
        ["curvature", "--n", "3", "--c", "1", "--trials", "200", "--seed", "3"],
        ["sphere", "--c", "4", "--samples", "200000", "--seed", "2"],
        ["stability", "--n", "1", "--c", "4", "--trials", "50", "--samples", "200000", "--attach-numerics"],
        ["report", "--n-range", "1..4", "--c", "-2", "--trials", "50"],
        ["report", "--n-range", "1..4", "--c", "4", "--trials", "50", "--format", "csv"],
    ]
    mismatches = []
    for argv in runs:
        outs = {_cli(argv + ["--workers", "1"]), _cli(argv + ["--workers", "1"]), _cli(argv + ["--workers", "4"])}
        if len(outs) != 1:
            mismatches.append(argv[0])
    argv = [sys.executable, "-m", "qspaceform", "sphere", "--samples", "100000", "--seed", "5"]
    procs = [subprocess.run(argv + extra, capture_output=True, check=False) for extra in ([], ["--workers", "3"])]
    if procs[0].stdout != procs[1].stdout or not procs[0].stdout:
        mismatches.append("subprocess sphere")
    ok = not mismatches
    assert criterion("10 byte-identical CLI output", ok, f"{len(runs)} configs + subprocess pair; mismatches {mismatches}")
