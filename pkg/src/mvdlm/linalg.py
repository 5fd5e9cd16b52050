"""Dense kernel for small symmetric positive definite matrices.

Everything is Cholesky based: solves go through the cached factor, log
determinants are twice the log of the factor diagonal, and inverses are never
formed explicitly. Diagonal matrices (degrees-of-freedom counts, observation
masks) are carried as 1-d arrays of their diagonal entries throughout the
package; only full symmetric matrices get a 2-d representation.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import cho_solve, solve_triangular

from .errors import DimensionMismatch, DomainError, NotPositiveDefinite

__all__ = [
    "SpdMatrix",
    "as_spd",
    "cholesky_lower",
    "log_det_spd",
    "spd_solve",
    "symmetrize",
]


def _require_square(a, what: str) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{what} requires a square matrix, got shape {a.shape}")
    return a


def symmetrize(a) -> np.ndarray:
    """Return (A + A') / 2.

    Exact fixed point for already-symmetric input; used after every composite
    product that is symmetric in exact arithmetic but not in floating point.
    """
    a = _require_square(a, "symmetrize")
    return 0.5 * (a + a.T)


class SpdMatrix:
    """Symmetric positive definite matrix with its lower Cholesky factor cached.

    Construction symmetrizes the input and factorizes eagerly, so definiteness
    is checked up front and the factor is computed exactly once per matrix.
    ``ridge`` adds a caller-chosen non-negative multiple of the identity to the
    diagonal before factorization (default 0: no regularization is ever applied
    silently).
    """

    __slots__ = ("mat", "chol")

    def __init__(self, a, ridge: float = 0.0):
        mat = symmetrize(a)
        if ridge < 0.0:
            raise DomainError(f"ridge must be non-negative, got {ridge}")
        if ridge > 0.0:
            mat = mat + ridge * np.eye(mat.shape[0])
        try:
            chol = np.linalg.cholesky(mat)
        except np.linalg.LinAlgError as exc:
            raise NotPositiveDefinite(
                f"matrix of shape {mat.shape} is not positive definite"
            ) from exc
        self.mat = mat
        self.chol = chol

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def log_det(self) -> float:
        return float(2.0 * np.sum(np.log(np.diag(self.chol))))

    def solve(self, b) -> np.ndarray:
        """Solve A x = b via the cached factor."""
        b = np.asarray(b, dtype=float)
        if b.shape[0] != self.dim:
            raise DimensionMismatch(
                f"cannot solve: matrix dim {self.dim}, right-hand side shape {b.shape}"
            )
        return cho_solve((self.chol, True), b)

    def solve_half(self, b) -> np.ndarray:
        """Solve L y = b for the lower factor L.

        For B with matching row dimension, (solve_half(B).T @ solve_half(B))
        equals B' A^{-1} B, which keeps quadratic forms symmetric and
        non-negative by construction.
        """
        b = np.asarray(b, dtype=float)
        if b.shape[0] != self.dim:
            raise DimensionMismatch(
                f"cannot half-solve: matrix dim {self.dim}, right-hand side shape {b.shape}"
            )
        return solve_triangular(self.chol, b, lower=True)

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.mat
        return self.mat.astype(dtype)

    def __repr__(self) -> str:
        return f"SpdMatrix(dim={self.dim})"


def as_spd(a, ridge: float = 0.0) -> SpdMatrix:
    """Wrap ``a`` as an SpdMatrix, reusing an existing wrapper when possible."""
    if isinstance(a, SpdMatrix) and ridge == 0.0:
        return a
    return SpdMatrix(a, ridge=ridge)


def cholesky_lower(a, ridge: float = 0.0) -> np.ndarray:
    """Lower-triangular L with L L' = A (plus the optional diagonal ridge)."""
    if isinstance(a, SpdMatrix) and ridge == 0.0:
        return a.chol
    return SpdMatrix(a, ridge=ridge).chol


def spd_solve(a, b) -> np.ndarray:
    """Solve A x = b for symmetric positive definite A."""
    return as_spd(a).solve(b)


def log_det_spd(a) -> float:
    """log |A| for symmetric positive definite A."""
    return as_spd(a).log_det
