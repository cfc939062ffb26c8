"""Stability verdicts for compact quaternion space forms.

c < 0: the curvature part of the identity-map Hessian is -(n+2)c|V|^2 >= 0,
so the Hessian is nonnegative and the index is zero.
c = 0: the Hessian reduces to the Dirichlet term (stable).
c > 0: P^n(H) is Einstein, and Smith's criterion (stable iff lambda1 >= 2C)
decides; with lambda1 = 8(n+1) and C = 4(n+2) at c = 4 the margin is -8.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from . import sphere_model as sm
from .curvature import SpaceFormParams, riemann
from .errors import InvalidDimensionError, QSFError
from .hessian_identity import pointwise_stability_check
from .quaternion_frame import build_adapted_frame, build_standard_structure

# P^n(H) constants below are quoted in this normalization
QPS_REFERENCE_C = 4.0


class Classification(str, Enum):
    PROJECTIVE = "projective"
    EUCLIDEAN = "euclidean"
    HYPERBOLIC = "hyperbolic"


class Verdict(str, Enum):
    STABLE_INDEX_ZERO = "stable-index-zero"
    STABLE = "stable"
    UNSTABLE = "unstable"
    INDETERMINATE = "indeterminate"


CRITERION_NEGATIVE = "negative-curvature Hessian bound: Hess = Dirichlet - (n+2)c*L2 >= 0 for c < 0"
CRITERION_FLAT = "Dirichlet-only Hessian: Hess = Dirichlet >= 0 for c = 0"
CRITERION_SMITH = "Smith criterion for Einstein manifolds: stable iff lambda1 >= 2*C"

NOTE_QUOTIENTS = (
    "quaternion hyperbolic space is non-compact; compact examples are quotients "
    "by discrete cocompact torsion-free groups of isometries (not constructed here)"
)
NOTE_FLAT_DERIVED = "c = 0 verdict derived from the collapsed Hessian formula, not stated as a separate result"
NOTE_NORMALIZATION = (
    "P^n(H) constants lambda1 = 8(n+1), C = 4(n+2) hold for c = 4 and scale linearly with c"
)
NOTE_LITERATURE = "lambda1 taken as the literature value"
NOTE_NUMERICAL = "lambda1 confirmed numerically on the sphere model S^4(c)"


@dataclass(frozen=True)
class SpectralData:
    lambda1: float
    einstein_constant: float
    source: str = "literature"

    def __post_init__(self):
        if not self.lambda1 > 0:
            raise QSFError(f"lambda1 must be positive, got {self.lambda1}")
        if self.source not in ("literature", "numerical"):
            raise QSFError(f"unknown source {self.source!r}")


@dataclass(frozen=True)
class StabilityReport:
    n: int
    c: float
    classification: Classification
    verdict: Verdict
    criterion_used: str
    margin: float | None
    lambda1: float | None
    einstein_constant: float
    identity_checks: dict[str, bool] = field(default_factory=dict)
    notes: tuple[str, ...] = ()
    numerics: dict[str, Any] | None = None
    source: str | None = None

    @property
    def checks_passed(self) -> bool:
        return all(self.identity_checks.values())

    def to_row(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "c": self.c,
            "classification": self.classification.value,
            "verdict": self.verdict.value,
            "lambda1": self.lambda1,
            "einstein_constant": self.einstein_constant,
            "margin": self.margin,
        }

    def to_dict(self) -> dict[str, Any]:
        out = self.to_row()
        out["criterion_used"] = self.criterion_used
        out["lambda1_source"] = self.source
        out["identity_checks"] = dict(self.identity_checks)
        out["notes"] = list(self.notes)
        if self.numerics is not None:
            out["numerics"] = self.numerics
        return out


def classify(c: float) -> Classification:
    if not math.isfinite(c):
        raise QSFError(f"c must be finite, got {c!r}")
    if c > 0:
        return Classification.PROJECTIVE
    if c < 0:
        return Classification.HYPERBOLIC
    return Classification.EUCLIDEAN


def _check_n(n) -> int:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidDimensionError(f"n must be a positive integer, got {n!r}")
    return int(n)


def qps_constants(n: int) -> SpectralData:
    """lambda1 = 8(n+1) and Einstein constant 4(n+2) of P^n(H) at c = 4."""
    n = _check_n(n)
    return SpectralData(8 * (n + 1), 4 * (n + 2), "literature")


def smith_verdict(sd: SpectralData) -> Verdict:
    return Verdict.STABLE if sd.lambda1 >= 2 * sd.einstein_constant else Verdict.UNSTABLE


def qps_margin(n: int) -> int:
    """lambda1 - 2C for P^n(H); always -8."""
    sd = qps_constants(n)
    return sd.lambda1 - 2 * sd.einstein_constant


def _ricci_check(params: SpaceFormParams, trials: int, seed) -> tuple[bool, float]:
    # Ric(V,V)/|V|^2 = sum_f R(V,f,f,V)/|V|^2 must equal (n+2)c
    Q = build_standard_structure(params.n)
    rng = np.random.default_rng(seed)
    F = build_adapted_frame(Q, seed=rng)
    V = rng.standard_normal((max(1, min(trials, 64)), params.dim))
    ric = riemann(params, Q, V[:, None, :], F.vectors, F.vectors, V[:, None, :]).sum(axis=1)
    ratio = ric / np.sum(V * V, axis=1)
    dev = float(np.max(np.abs(ratio - (params.n + 2) * params.c)))
    return dev <= 1e-10 * (1 + abs(params.c)) * params.n, dev


def full_report(
    n: int,
    c: float,
    attach_numerics: bool = False,
    trials: int = 100,
    seed: int = 0,
    samples: int = 10**6,
    workers: int = 1,
) -> StabilityReport:
    """Verdict for M^n(c), driven by the sign of c.

    ``trials`` random vectors/frames feed the pointwise identity checks
    (0 skips them). ``attach_numerics`` adds sphere-model estimates of
    lambda1 and of the instability-witness Hessian when n = 1 and c > 0.
    """
    n = _check_n(n)
    params = SpaceFormParams(n, c)
    c = params.c
    cls = classify(c)
    einstein = (n + 2) * c

    checks: dict[str, bool] = {}
    if trials > 0:
        pw = pointwise_stability_check(params, trials=trials, seed=seed)
        checks.update({chk.name: chk.passed for chk in pw})
        checks["einstein_constant_matches_contraction"] = _ricci_check(params, trials, seed)[0]

    notes: list[str] = []
    numerics = None
    lambda1 = margin = source = None
    if cls is Classification.HYPERBOLIC:
        verdict, criterion = Verdict.STABLE_INDEX_ZERO, CRITERION_NEGATIVE
        notes.append(NOTE_QUOTIENTS)
    elif cls is Classification.EUCLIDEAN:
        verdict, criterion = Verdict.STABLE, CRITERION_FLAT
        notes.append(NOTE_FLAT_DERIVED)
    else:
        ref = qps_constants(n)
        scale = c / QPS_REFERENCE_C
        source = "literature"
        if attach_numerics and n == 1:
            numerics = sphere_numerics(c, samples, seed, workers)
            source = "numerical"
        sd = SpectralData(ref.lambda1 * scale, ref.einstein_constant * scale, source)
        lambda1, einstein = sd.lambda1, sd.einstein_constant
        margin = sd.lambda1 - 2 * sd.einstein_constant
        verdict, criterion = smith_verdict(sd), CRITERION_SMITH
        notes.append(NOTE_NORMALIZATION)
        notes.append(NOTE_NUMERICAL if source == "numerical" else NOTE_LITERATURE)
    return StabilityReport(
        n=n,
        c=c,
        classification=cls,
        verdict=verdict,
        criterion_used=criterion,
        margin=margin,
        lambda1=lambda1,
        einstein_constant=float(einstein),
        identity_checks=checks,
        notes=tuple(notes),
        numerics=numerics,
        source=source,
    )


def sphere_numerics(c: float, samples: int, seed: int, workers: int = 1) -> dict[str, Any]:
    """Monte Carlo lambda1 and witness Hessian on S^4(c), with closed-form references."""
    spec = sm.SphereSpec(c)
    quad = sm.sample(spec, samples, seed)
    a = (0.0, 0.0, 1.0, 0.0, 0.0)
    ref = sm.coordinate_gradient_reference(spec)
    witness = sm.hessian_identity_map(sm.CoordinateGradient(a), quad, workers=workers)
    return {
        "samples": samples,
        "seed": seed,
        "lambda1_estimate": sm.rayleigh_lambda1(quad, a, workers=workers),
        "lambda1_reference": ref["lambda1"],
        "witness_hessian": witness.total,
        "witness_hessian_reference": ref["total"],
    }
