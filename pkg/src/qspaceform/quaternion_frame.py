"""Quaternionic structures on R^{4n} and adapted orthonormal frames.

The standard structure is block diagonal: on each copy of H = R^4 (basis
order 1, i, j, k) the three endomorphisms act as left multiplication by the
units i, j, k. Cyclic indices wrap 1 -> 2 -> 3 -> 1, so J1 J2 = J3,
J2 J3 = J1 and J3 J1 = J2.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

import numpy as np

from .checks import CheckReport, max_abs, residual_check
from .errors import FrameConstructionError, InvalidDimensionError, PreconditionError

EXACT_TOL = 1e-14
CONSTRUCTION_TOL = 1e-10

_MAX_RETRIES = 100
_DEGENERATE_NORM = 1e-8


def _left_mult(a: float, b: float, c: float, d: float) -> np.ndarray:
    # matrix of x -> q x for q = a + b i + c j + d k
    return np.array(
        [
            [a, -b, -c, -d],
            [b, a, -d, c],
            [c, d, a, -b],
            [d, -c, b, a],
        ],
        dtype=float,
    )


_UNIT_BLOCKS = (_left_mult(0, 1, 0, 0), _left_mult(0, 0, 1, 0), _left_mult(0, 0, 0, 1))


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class QuaternionStructure:
    """Three orthogonal endomorphisms J1, J2, J3 of R^{4n}."""

    n: int
    J: tuple[np.ndarray, np.ndarray, np.ndarray]

    def __post_init__(self):
        if len(self.J) != 3:
            raise InvalidDimensionError("a quaternionic structure has exactly three endomorphisms")
        m = 4 * self.n
        mats = tuple(_frozen(j) for j in self.J)
        for j in mats:
            if j.shape != (m, m):
                raise InvalidDimensionError(f"expected {m}x{m} matrices, got {j.shape}")
        object.__setattr__(self, "J", mats)
        object.__setattr__(self, "_stacked", _frozen(np.stack(mats)))

    @property
    def dim(self) -> int:
        return 4 * self.n

    def __getitem__(self, alpha: int) -> np.ndarray:
        """J_alpha for alpha in 1..3."""
        if alpha not in (1, 2, 3):
            raise IndexError(f"alpha must be 1, 2 or 3, got {alpha}")
        return self.J[alpha - 1]

    @property
    def stacked(self) -> np.ndarray:
        """Array of shape (3, 4n, 4n)."""
        return self._stacked


@dataclass(frozen=True)
class AdaptedFrame:
    """Orthonormal basis {E_i, J1 E_i, J2 E_i, J3 E_i}, one vector per row.

    Row ``alpha * n + (i - 1)`` holds J_alpha E_i (alpha = 0 meaning E_i).
    """

    n: int
    vectors: np.ndarray

    def __post_init__(self):
        v = _frozen(self.vectors)
        if v.shape != (4 * self.n, 4 * self.n):
            raise InvalidDimensionError(f"frame must have shape {(4 * self.n,) * 2}, got {v.shape}")
        object.__setattr__(self, "vectors", v)

    def E(self, i: int) -> np.ndarray:
        return self.JE(0, i)

    def JE(self, alpha: int, i: int) -> np.ndarray:
        """J_alpha E_i with 1-based i; alpha = 0 returns E_i itself."""
        if not 1 <= i <= self.n:
            raise IndexError(f"i must lie in 1..{self.n}, got {i}")
        if alpha not in (0, 1, 2, 3):
            raise IndexError(f"alpha must be 0..3, got {alpha}")
        return self.vectors[alpha * self.n + i - 1]

    @property
    def blocks(self) -> np.ndarray:
        """Array of shape (4, n, 4n): blocks[alpha, i-1] = J_alpha E_i."""
        return self.vectors.reshape(4, self.n, 4 * self.n)


def _check_n(n) -> int:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise InvalidDimensionError(f"quaternion dimension must be an integer, got {n!r}")
    n = int(n)
    if n < 1:
        raise InvalidDimensionError(f"quaternion dimension must be >= 1, got {n}")
    # the real dimension 4n must stay addressable
    if 4 * n > sys.maxsize // (4 * n):
        raise InvalidDimensionError(f"quaternion dimension {n} overflows 4n x 4n storage")
    return n


def build_standard_structure(n: int) -> QuaternionStructure:
    n = _check_n(n)
    eye = np.eye(n)
    return QuaternionStructure(n, tuple(np.kron(eye, b) for b in _UNIT_BLOCKS))


def conjugated_structure(
    Q: QuaternionStructure, O: np.ndarray, tol: float = CONSTRUCTION_TOL
) -> QuaternionStructure:
    """Return (O^T J1 O, O^T J2 O, O^T J3 O) for an orthogonal O."""
    O = np.asarray(O, dtype=float)
    if O.shape != (Q.dim, Q.dim):
        raise InvalidDimensionError(f"expected a {Q.dim}x{Q.dim} matrix, got {O.shape}")
    dev = max_abs(O.T @ O - np.eye(Q.dim))
    if dev > tol:
        raise PreconditionError(f"matrix is not orthogonal: max |O^T O - I| = {dev:.3e}")
    return QuaternionStructure(Q.n, tuple(O.T @ j @ O for j in Q.J))


def random_orthogonal(dim: int, seed) -> np.ndarray:
    """Haar-distributed orthogonal matrix from a seeded QR of a Gaussian matrix."""
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


def verify_structure(Q: QuaternionStructure, tol: float = CONSTRUCTION_TOL) -> CheckReport:
    eye = np.eye(Q.dim)
    J = Q.J
    sq = max(max_abs(j @ j + eye) for j in J)
    cyc = max(max_abs(J[k] @ J[(k + 1) % 3] - J[(k + 2) % 3]) for k in range(3))
    anti = max(max_abs(J[(k + 1) % 3] @ J[k] + J[(k + 2) % 3]) for k in range(3))
    orth = max(max_abs(j.T @ j - eye) for j in J)
    skew = max(max_abs(j.T + j) for j in J)
    return CheckReport.of(
        [
            residual_check("square_is_minus_identity", "qi", sq, tol),
            residual_check("cyclic_product", "qi", cyc, tol),
            residual_check("anticommutation", "qi", anti, tol),
            residual_check("metric_compatibility", "cm", orth, tol),
            residual_check("skew_adjoint", "cm", skew, tol),
        ]
    )


def _block(Q: QuaternionStructure, e: np.ndarray) -> np.ndarray:
    return np.stack([e] + [j @ e for j in Q.J])


def build_adapted_frame(
    Q: QuaternionStructure, seed=0, first: np.ndarray | None = None
) -> AdaptedFrame:
    """Greedy seeded construction of an adapted orthonormal frame.

    Each new E_i is a Gaussian draw projected off the span of the quaternion
    4-blocks built so far (twice, for numerical orthogonality) and
    normalized. ``first`` forces E_1 (it is normalized).
    """
    rng = np.random.default_rng(seed)
    m = Q.dim
    blocks: list[np.ndarray] = []
    if first is not None:
        v = np.asarray(first, dtype=float)
        if v.shape != (m,):
            raise InvalidDimensionError(f"first vector must have length {m}, got {v.shape}")
        norm = np.linalg.norm(v)
        if norm < _DEGENERATE_NORM:
            raise FrameConstructionError("forced first vector is (numerically) zero")
        blocks.append(_block(Q, v / norm))
    while len(blocks) < Q.n:
        for _ in range(_MAX_RETRIES):
            v = rng.standard_normal(m)
            v /= np.linalg.norm(v)
            if blocks:
                B = np.concatenate(blocks)
                v = v - B.T @ (B @ v)
                if np.linalg.norm(v) < _DEGENERATE_NORM:
                    continue
                v = v - B.T @ (B @ v)
            norm = np.linalg.norm(v)
            if norm >= _DEGENERATE_NORM:
                blocks.append(_block(Q, v / norm))
                break
        else:
            raise FrameConstructionError(
                f"could not extend frame at vector {len(blocks) + 1} after {_MAX_RETRIES} draws"
            )
    # rows grouped by alpha: E_1..E_n, J1E_1..J1E_n, ...
    vectors = np.stack(blocks, axis=1).reshape(m, m)
    return AdaptedFrame(Q.n, vectors)


def verify_frame(
    Q: QuaternionStructure, F: AdaptedFrame, tol: float = CONSTRUCTION_TOL
) -> CheckReport:
    V = F.vectors
    gram = max_abs(V @ V.T - np.eye(Q.dim))
    b = F.blocks
    block = max(max_abs(b[a] - b[0] @ Q[a].T) for a in (1, 2, 3))
    return CheckReport.of(
        [
            residual_check("frame_orthonormal", "frame", gram, tol),
            residual_check("frame_block_structure", "frame", block, tol),
        ]
    )
