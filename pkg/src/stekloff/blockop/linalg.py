"""Small dense linear-algebra helpers shared by the block-operator code."""

from __future__ import annotations

import numpy as np
from scipy import linalg as sla

from ..errors import DomainError

RANK_RTOL = 1e-10
SYMMETRY_RTOL = 1e-10
PSD_CLAMP = -1e-12


class SymmetricOperator:
    """A real symmetric matrix, stored read-only.

    Input must be symmetric up to rounding; the stored lower triangle is an
    exact mirror of the upper one.
    """

    __slots__ = ("_a",)

    def __init__(self, entries):
        a = np.array(entries, dtype=float, copy=True)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DomainError(f"expected a square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise DomainError("matrix has non-finite entries")
        if np.abs(a - a.T).max(initial=0) > SYMMETRY_RTOL * max(1.0, np.abs(a).max(initial=0)):
            raise DomainError("matrix is not symmetric")
        a = np.triu(a) + np.triu(a, 1).T
        a.setflags(write=False)
        self._a = a

    @property
    def entries(self) -> np.ndarray:
        return self._a

    @property
    def dimension(self) -> int:
        return self._a.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self._a if dtype is None else self._a.astype(dtype)

    def __repr__(self):
        return f"SymmetricOperator(dimension={self.dimension})"


def sym(a) -> np.ndarray:
    """Exactly symmetric part of ``a``."""
    a = np.asarray(a, dtype=float)
    return 0.5 * (a + a.T)


def null_basis(a, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis of the (numerical) kernel of ``a`` as columns."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    n = a.shape[1]
    if a.size == 0:
        return np.eye(n)
    return sla.null_space(a, rcond=rtol)


def range_basis(a, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis of the column space of ``a``."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.size == 0:
        return np.zeros((a.shape[0], 0))
    return sla.orth(a, rcond=rtol)


def complement_basis(q: np.ndarray, n: int) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of span(q) in R^n."""
    if q.shape[1] == 0:
        return np.eye(n)
    return null_basis(q.T)


def numerical_rank(a, rtol: float = RANK_RTOL) -> int:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    return int(np.sum(s > rtol * s[0])) if s[0] > 0 else 0


def condition(a) -> float:
    """2-norm condition number; 1 for an empty matrix, inf if singular."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.size == 0:
        return 1.0
    s = np.linalg.svd(a, compute_uv=False)
    return float(s[0] / s[-1]) if s[-1] > 0 else float("inf")


def psd_sqrt(a, clamp: float = PSD_CLAMP) -> np.ndarray:
    """Square root of a symmetric positive semi-definite matrix.

    Eigenvalues down to ``clamp * max(1, ||a||)`` are treated as rounding and
    set to zero; anything more negative raises.
    """
    a = sym(a)
    if a.size == 0:
        return a.copy()
    w, q = np.linalg.eigh(a)
    scale = max(1.0, float(np.max(np.abs(w))))
    if w[0] < clamp * scale:
        raise DomainError(f"matrix is not positive semi-definite (min eigenvalue {w[0]:.3e})")
    w = np.clip(w, 0.0, None)
    return sym((q * np.sqrt(w)) @ q.T)


def random_orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed orthogonal matrix."""
    if n == 0:
        return np.zeros((0, 0))
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))
