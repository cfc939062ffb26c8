"""Curvature tensor of the quaternion space form M^n(c).

The tensor is evaluated functionally: ``riemann`` returns g(R(X,Y)Z,U) and
broadcasts over leading axes, so a batch of 4-tuples costs one call. No
rank-4 array is stored except in the n = 1 reduction check.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .checks import CheckReport, max_abs, residual_check
from .errors import (
    DegeneratePlaneError,
    DimensionMismatchError,
    InvalidDimensionError,
    NotApplicableError,
    QSFError,
)
from .quaternion_frame import AdaptedFrame, QuaternionStructure

TOL = 1e-10


@dataclass(frozen=True)
class SpaceFormParams:
    """Quaternion dimension ``n`` and constant quaternion sectional curvature ``c``."""

    n: int
    c: float

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise InvalidDimensionError(f"n must be a positive integer, got {self.n!r}")
        if not math.isfinite(self.c):
            raise QSFError(f"c must be finite, got {self.c!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "c", float(self.c))

    @property
    def dim(self) -> int:
        return 4 * self.n


def _dot(a, b):
    return (a * b).sum(axis=-1)


def _apply(Q: QuaternionStructure, v: np.ndarray) -> np.ndarray:
    # (..., m) -> (..., 3, m) with [..., alpha-1, :] = J_alpha v
    return np.einsum("aij,...j->...ai", Q.stacked, v)


def _vectors(params: SpaceFormParams, Q: QuaternionStructure, *vs):
    if Q.n != params.n:
        raise DimensionMismatchError(f"structure has n={Q.n}, params have n={params.n}")
    out = []
    for v in vs:
        v = np.asarray(v, dtype=float)
        if v.ndim == 0 or v.shape[-1] != params.dim:
            raise DimensionMismatchError(
                f"vectors must have last dimension {params.dim}, got shape {v.shape}"
            )
        out.append(v)
    return out


def riemann(params: SpaceFormParams, Q: QuaternionStructure, X, Y, Z, U):
    """g(R(X,Y)Z, U) for M^n(c).

    Direct evaluation of the space-form curvature formula::

        -(c/4) { <X,Z><Y,U> - <Z,Y><X,U>
                 + sum_a [ <X,J_a Z><Y,J_a U> - <U,J_a X><J_a Y,Z>
                           + 2 <X,J_a Y><J_a U,Z> ] }

    Inputs may carry leading batch axes; they broadcast.
    """
    X, Y, Z, U = _vectors(params, Q, X, Y, Z, U)
    s = _dot(X, Z) * _dot(Y, U) - _dot(Z, Y) * _dot(X, U)
    JX, JY, JZ, JU = (_apply(Q, v) for v in (X, Y, Z, U))
    X, Y, Z, U = (v[..., None, :] for v in (X, Y, Z, U))
    quat = _dot(X, JZ) * _dot(Y, JU) - _dot(U, JX) * _dot(JY, Z) + 2.0 * _dot(X, JY) * _dot(JU, Z)
    s = s + quat.sum(axis=-1)
    out = -0.25 * params.c * s
    return float(out) if np.ndim(out) == 0 else out


def sectional_curvature(params: SpaceFormParams, Q: QuaternionStructure, X, Y) -> float:
    X, Y = _vectors(params, Q, X, Y)
    xx, yy, xy = _dot(X, X), _dot(Y, Y), _dot(X, Y)
    area2 = xx * yy - xy * xy
    if np.any(area2 <= 1e-12 * xx * yy) or np.any(xx * yy == 0):
        raise DegeneratePlaneError("X and Y do not span a 2-plane")
    out = riemann(params, Q, X, Y, Y, X) / area2
    return float(out) if np.ndim(out) == 0 else out


def quaternion_sectional(params: SpaceFormParams, Q: QuaternionStructure, X, alpha: int):
    """Sectional curvature of the plane spanned by X and J_alpha X."""
    (X,) = _vectors(params, Q, X)
    if np.any(np.linalg.norm(X, axis=-1) == 0):
        raise QSFError("quaternion sectional curvature needs a nonzero vector")
    return sectional_curvature(params, Q, X, X @ Q[alpha].T)


def curvature_term_operator(
    params: SpaceFormParams, Q: QuaternionStructure, F: AdaptedFrame
) -> np.ndarray:
    """Matrix of V -> sum_f R(V, f) f over the frame F.

    Column k is the image of the k-th standard basis vector; entry (j, k)
    is sum_f g(R(e_k, f) f, e_j).
    """
    m = params.dim
    if F.n != params.n:
        raise DimensionMismatchError(f"frame has n={F.n}, params have n={params.n}")
    e = np.eye(m)
    # axes: (j, k, f)
    ek = e[None, :, None, :]
    ej = e[:, None, None, :]
    f = F.vectors[None, None, :, :]
    vals = riemann(params, Q, ek, f, f, ej)
    return vals.sum(axis=-1)


def check_symmetries(
    params: SpaceFormParams, Q: QuaternionStructure, trials: int = 1000, seed=0, tol: float = TOL
) -> CheckReport:
    """Classical symmetries and first Bianchi on seeded random 4-tuples."""
    if trials < 1:
        raise QSFError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    X, Y, Z, U = rng.standard_normal((4, trials, params.dim))
    r = riemann(params, Q, X, Y, Z, U)
    return CheckReport.of(
        [
            residual_check("antisymmetry_first_pair", "6bis", max_abs(r + riemann(params, Q, Y, X, Z, U)), tol),
            residual_check("antisymmetry_last_pair", "6bis", max_abs(r + riemann(params, Q, X, Y, U, Z)), tol),
            residual_check("pair_symmetry", "6bis", max_abs(r - riemann(params, Q, Z, U, X, Y)), tol),
            residual_check(
                "first_bianchi",
                "6bis",
                max_abs(r + riemann(params, Q, Y, Z, X, U) + riemann(params, Q, Z, X, Y, U)),
                tol,
            ),
        ]
    )


def constant_curvature_model(c: float, X, Y, Z, U):
    """c (<X,U><Y,Z> - <X,Z><Y,U>), the round-sphere tensor in the same convention."""
    return c * (_dot(X, U) * _dot(Y, Z) - _dot(X, Z) * _dot(Y, U))


def constant_curvature_reduction(params: SpaceFormParams, Q: QuaternionStructure) -> CheckReport:
    """Compare the n = 1 tensor with the constant-curvature model on all 256 basis tuples."""
    if params.n != 1:
        raise NotApplicableError(f"the reduction to constant curvature needs n = 1, got n = {params.n}")
    e = np.eye(4)
    idx = np.array(list(itertools.product(range(4), repeat=4)))
    X, Y, Z, U = (e[idx[:, k]] for k in range(4))
    dev = max_abs(riemann(params, Q, X, Y, Z, U) - constant_curvature_model(params.c, X, Y, Z, U))
    return CheckReport.of(
        [residual_check("constant_curvature_reduction", "6bis", dev, 1e-12 * (1 + abs(params.c)))]
    )
