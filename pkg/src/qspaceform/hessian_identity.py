"""Pointwise algebra behind the identity-map Hessian of M^n(c).

The curvature part of the Hessian density splits over an adapted frame into
the terms g(R(E_i,V)E_i,V) and g(R(J_a E_i,V)J_a E_i,V). Their closed forms,
the two frame (Parseval-type) identities, and the collapsed constant
-(n+2)c|V|^2 are all evaluated here and checked against ``riemann``.
Integrals enter only as nonnegative numbers (see ``sphere_model``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .checks import CheckReport, flag_check, max_abs, residual_check
from .curvature import SpaceFormParams, curvature_term_operator, riemann
from .errors import QSFError
from .quaternion_frame import (
    AdaptedFrame,
    QuaternionStructure,
    build_adapted_frame,
    build_standard_structure,
)

PROOF_TOL = 1e-12
FRAME_TOL = 1e-10

VERDICT_INDEX_ZERO = "index-zero"
VERDICT_DIRICHLET_ONLY = "dirichlet-only"
VERDICT_DEFERRED = "deferred-to-spectral-criterion"


@dataclass(frozen=True)
class HessianBreakdown:
    """Hess(V,V) = dirichlet + curvature_coefficient * l2."""

    dirichlet: float
    curvature_coefficient: float
    l2: float
    total: float

    def to_dict(self) -> dict:
        return {
            "dirichlet": self.dirichlet,
            "curvature_coefficient": self.curvature_coefficient,
            "l2": self.l2,
            "total": self.total,
        }


def _index(i: int, n: int):
    if not 1 <= i <= n:
        raise IndexError(f"frame index must lie in 1..{n}, got {i}")


def _curvature_terms(c: float, Js: np.ndarray, W: np.ndarray, V: np.ndarray) -> np.ndarray:
    """g(R(W,V)W,V) = -(c/4){|V|^2 - <V,W>^2 + 3 sum_b <V,J_b W>^2} for unit W in a frame.

    ``W`` has shape (..., k, m) and ``V`` shape (..., m); returns (..., k).
    """
    V = V[..., None, :]
    vv = np.sum(V * V, axis=-1)
    vw = np.sum(V * W, axis=-1)
    JW = np.einsum("bij,...kj->...kbi", Js, W)
    jcomp = np.sum(np.sum(V[..., None, :] * JW, axis=-1) ** 2, axis=-1)
    return -0.25 * c * (vv - vw**2 + 3.0 * jcomp)


def cri1_density(params: SpaceFormParams, Q: QuaternionStructure, F: AdaptedFrame, V, i: int) -> float:
    """g(R(E_i,V)E_i,V) = -(c/4){|V|^2 - <V,E_i>^2 + 3 sum_b <V,J_b E_i>^2}."""
    _index(i, F.n)
    V = np.asarray(V, dtype=float)
    return float(_curvature_terms(params.c, Q.stacked, F.E(i)[None, :], V)[0])


def cri2_density(
    params: SpaceFormParams, Q: QuaternionStructure, F: AdaptedFrame, V, i: int, alpha: int
) -> float:
    """g(R(J_a E_i,V)J_a E_i,V) = -(c/4){|V|^2 - <V,J_a E_i>^2 + 3 sum_b <V,J_b J_a E_i>^2}."""
    _index(i, F.n)
    V = np.asarray(V, dtype=float)
    JaE = Q[alpha] @ F.E(i)
    return float(_curvature_terms(params.c, Q.stacked, JaE[None, :], V)[0])


def _co1(frames: np.ndarray, V: np.ndarray) -> np.ndarray:
    return np.sum(np.sum(frames * V[..., None, :], axis=-1) ** 2, axis=-1)


def _co2(Js: np.ndarray, frames: np.ndarray, V: np.ndarray) -> np.ndarray:
    # every frame vector is E_i or J_a E_i; sum_b <V, J_b f>^2 over all of them
    Jf = np.einsum("bij,...kj->...kbi", Js, frames)
    return np.sum(np.sum(Jf * V[..., None, None, :], axis=-1) ** 2, axis=(-1, -2))


def co1_identity(F: AdaptedFrame, V) -> tuple[float, float]:
    """Sum of squared frame components of V, and |V|^2."""
    V = np.asarray(V, dtype=float)
    return float(_co1(F.vectors, V)), float(V @ V)


def co2_identity(Q: QuaternionStructure, F: AdaptedFrame, V) -> tuple[float, float]:
    """sum_i [sum_b <V,J_b E_i>^2 + sum_a sum_b <V,J_b J_a E_i>^2], and 3|V|^2.

    Summation over a, b in {1,2,3} and i in 1..n throughout.
    """
    V = np.asarray(V, dtype=float)
    return float(_co2(Q.stacked, F.vectors, V)), 3.0 * float(V @ V)


def total_curvature_density(params: SpaceFormParams, Q: QuaternionStructure, F: AdaptedFrame, V) -> float:
    """Sum of all cri1 and cri2 terms over the frame."""
    V = np.asarray(V, dtype=float)
    return float(np.sum(_curvature_terms(params.c, Q.stacked, F.vectors, V)))


def hessian_closed_form(params: SpaceFormParams, dirichlet: float, l2: float) -> HessianBreakdown:
    """Hess(V,V) = int |nabla V|^2 - (n+2) c int |V|^2."""
    if dirichlet < 0 or l2 < 0:
        raise QSFError(
            f"dirichlet and l2 are integrals of squared norms and must be >= 0, got {dirichlet}, {l2}"
        )
    coef = -(params.n + 2) * params.c
    dirichlet, l2 = float(dirichlet), float(l2)
    return HessianBreakdown(dirichlet, coef, l2, dirichlet + coef * l2)


def _trial_rngs(seed, trials: int):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(trials)]


def proof_chain_check(
    params: SpaceFormParams,
    Q: QuaternionStructure,
    trials: int = 1000,
    seed=0,
    tol: float = FRAME_TOL,
) -> CheckReport:
    """Run every pointwise identity of the Hessian computation on random (frame, V).

    Each trial draws its own adapted frame and a Gaussian V from a child
    seed of ``seed``. Closed forms of the curvature terms are compared with
    ``riemann`` at ``PROOF_TOL * (1+|c|) * |V|^2``; the frame identities and
    the collapsed constant are compared at ``tol`` relative to |V|^2.
    """
    if trials < 1:
        raise QSFError("trials must be >= 1")
    scale = 1.0 + abs(params.c)
    n, c = params.n, params.c
    Js = Q.stacked
    rngs = _trial_rngs(seed, trials)
    frames = np.stack([build_adapted_frame(Q, seed=rng).vectors for rng in rngs])
    V = np.stack([rng.standard_normal(params.dim) for rng in rngs])
    vv = np.sum(V * V, axis=-1)

    closed = _curvature_terms(c, Js, frames, V).reshape(trials, 4, n)
    # independent route: literal tensor on (f, V, f, V) for every frame vector f
    direct = riemann(params, Q, frames, V[:, None, :], frames, V[:, None, :]).reshape(trials, 4, n)
    dev = np.abs(closed - direct) / (scale * vv)[:, None, None]
    total = closed.sum(axis=(1, 2))
    op_quad = np.array(
        [V[t] @ curvature_term_operator(params, Q, AdaptedFrame(n, frames[t])) @ V[t] for t in range(trials)]
    )
    worst = {
        "cri1": float(dev[:, 0].max()),
        "cri2": float(dev[:, 1:].max()),
        "co1": max_abs((_co1(frames, V) - vv) / vv),
        "co2": max_abs((_co2(Js, frames, V) - 3 * vv) / vv),
        "total": max_abs((total + (n + 2) * c * vv) / (scale * vv)),
        "operator": max_abs((total + op_quad) / (scale * vv)),
    }
    return CheckReport.of(
        [
            residual_check("cri1_vs_riemann", "cri1", worst["cri1"], PROOF_TOL),
            residual_check("cri2_vs_riemann", "cri2", worst["cri2"], PROOF_TOL),
            residual_check("co1_parseval", "co1", worst["co1"], tol),
            residual_check("co2_triple_parseval", "co2", worst["co2"], tol),
            residual_check("total_density_closed_form", "coconut", worst["total"], tol),
            residual_check("total_density_vs_operator", "coconut", worst["operator"], tol),
        ]
    )


def pointwise_stability_check(
    params: SpaceFormParams, trials: int = 1000, seed=0, Q: QuaternionStructure | None = None
) -> CheckReport:
    """Algebraic core of the negative-curvature stability argument.

    For each trial the collapsed identity -total = (n+2)c|V|^2 is asserted
    and the sign of the curvature contribution -(n+2)c|V|^2 recorded. With
    c < 0 every contribution is >= 0, so Hess >= Dirichlet >= 0 and the
    verdict is index zero; with c = 0 the Hessian is the Dirichlet term; with
    c > 0 the coefficient is strictly negative and the question is handed to
    the spectral criterion.
    """
    if trials < 1:
        raise QSFError("trials must be >= 1")
    if Q is None:
        Q = build_standard_structure(params.n)
    scale = 1.0 + abs(params.c)
    rngs = _trial_rngs(seed, trials)
    frames = np.stack([build_adapted_frame(Q, seed=rng).vectors for rng in rngs])
    V = np.stack([rng.standard_normal(params.dim) for rng in rngs])
    vv = np.sum(V * V, axis=-1)
    total = _curvature_terms(params.c, Q.stacked, frames, V).sum(axis=-1)
    expected = (params.n + 2) * params.c * vv
    worst = max_abs((-total - expected) / (scale * vv))
    contributions = -expected
    checks = [residual_check("collapsed_curvature_identity", "coconut", worst, FRAME_TOL)]
    c = params.c
    if c < 0:
        verdict = VERDICT_INDEX_ZERO
        checks.append(
            flag_check("curvature_contribution_nonnegative", "coconut",
                       bool(np.all(contributions >= 0)), float(contributions.min()))
        )
    elif c == 0:
        verdict = VERDICT_DIRICHLET_ONLY
        checks.append(
            flag_check("curvature_contribution_zero", "coconut",
                       max_abs(contributions) == 0.0, max_abs(contributions))
        )
    else:
        verdict = VERDICT_DEFERRED
        checks.append(
            flag_check("curvature_coefficient_negative", "coconut",
                       -(params.n + 2) * c < 0, -(params.n + 2) * c)
        )
    return CheckReport.of(checks, verdict=verdict)
