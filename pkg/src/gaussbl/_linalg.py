"""Small dense linear-algebra helpers used throughout the package.

All matrices are real, row-major numpy arrays.  Log-determinants of
positive-definite matrices are accumulated from Cholesky pivots so that
very large or very small determinants never overflow.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import DegeneratePushforwardError


def as_square(a, name: str = "matrix") -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be a square 2-d array, got shape {a.shape}")
    return a


def scaled_tol(*mats: np.ndarray, base: float = 1e-9) -> float:
    """Absolute tolerance `base` scaled by the largest matrix norm involved."""
    scale = 1.0
    for m in mats:
        if m.size:
            scale = max(scale, float(np.linalg.norm(m)))
    return base * scale


def is_symmetric(a: np.ndarray, tol: float | None = None) -> bool:
    a = as_square(a)
    if a.size == 0:
        return True
    if tol is None:
        tol = scaled_tol(a)
    return bool(np.linalg.norm(a - a.T) <= tol)


def symmetrize(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.T)


def check_symmetric(a: np.ndarray, name: str = "matrix", tol: float | None = None) -> np.ndarray:
    a = as_square(a, name)
    if not is_symmetric(a, tol):
        raise ValueError(f"{name} is not symmetric within tolerance")
    return symmetrize(a)


def cholesky_pd(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    """Lower Cholesky factor; raises ValueError if not positive definite."""
    if a.shape[0] == 0:
        return a.copy()
    try:
        return np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        raise ValueError(f"{name} is not positive definite") from None


def logdet_pd(a: np.ndarray, name: str = "matrix") -> float:
    """log det of a symmetric positive-definite matrix (0.0 for the 0x0 case)."""
    if a.shape[0] == 0:
        return 0.0
    chol = cholesky_pd(a, name)
    return 2.0 * float(np.sum(np.log(np.diag(chol))))


def inv_pd(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    """Inverse of a symmetric positive-definite matrix via Cholesky."""
    chol = cholesky_pd(a, name)
    eye = np.eye(a.shape[0])
    return symmetrize(scipy.linalg.cho_solve((chol, True), eye))


def pushforward_gram(b: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    """B alpha B^T, symmetrized; raises DegeneratePushforwardError if singular."""
    g = symmetrize(b @ alpha @ b.T)
    if g.shape[0]:
        try:
            np.linalg.cholesky(g)
        except np.linalg.LinAlgError:
            raise DegeneratePushforwardError(
                "pushforward covariance B @ alpha @ B.T is numerically singular"
            ) from None
    return g


def sqrtm_psd(a: np.ndarray) -> np.ndarray:
    """Symmetric square root of a PSD matrix via eigendecomposition."""
    if a.shape[0] == 0:
        return a.copy()
    w, v = np.linalg.eigh(symmetrize(a))
    w = np.clip(w, 0.0, None)
    return symmetrize((v * np.sqrt(w)) @ v.T)


def min_eigenvalue(a: np.ndarray) -> float:
    if a.shape[0] == 0:
        return np.inf
    return float(np.linalg.eigvalsh(symmetrize(a))[0])


def numerical_rank(a: np.ndarray, rel: float = 1e-12) -> int:
    """Rank via singular values with threshold max(shape) * smax * rel."""
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > max(a.shape) * s[0] * rel))
