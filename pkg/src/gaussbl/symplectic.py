"""Symplectic forms, symplectic spectra and map classification.

Conventions: a system with ``m`` modes has ``2m`` quadratures ordered
``(q_1, p_1, ..., q_m, p_m)``; the symplectic form is the direct sum of
``m`` blocks ``[[0, 1], [-1, 0]]``.  Covariance matrices are dimensionless,
with the vacuum at ``nu = 1/2``.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from ._linalg import as_square, check_symmetric, scaled_tol, sqrtm_psd
from .errors import RankError


class MapKind(Enum):
    """How a full-row-rank matrix acts on the quadrature algebra.

    QUANTUM maps preserve the symplectic form (B D B^T = D_out, even output
    dimension); CLASSICAL maps kill it (B D B^T = 0), so the image
    quadratures commute and can be jointly measured.
    """

    QUANTUM = "quantum"
    CLASSICAL = "classical"


def standard_form(m: int) -> np.ndarray:
    """The 2m x 2m standard symplectic form.

    Parameters
    ----------
    m : int
        Number of modes, at least 1.

    Returns
    -------
    np.ndarray
        Block-diagonal antisymmetric matrix with 2x2 blocks [[0, 1], [-1, 0]].
    """
    m = int(m)
    if m < 1:
        raise ValueError("mode count must be a positive integer")
    block = np.array([[0.0, 1.0], [-1.0, 0.0]])
    delta = np.zeros((2 * m, 2 * m))
    for i in range(m):
        delta[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = block
    return delta


def symplectic_eigenvalues(gamma: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Symplectic eigenvalues of a positive-definite covariance matrix.

    These are the absolute values of the (purely imaginary) eigenvalues of
    ``gamma @ inv(Delta)``; each value is reported once, with the doubled
    multiplicity collapsed.  Computed as the positive spectrum of the
    Hermitian matrix ``i * sqrt(gamma) inv(Delta) sqrt(gamma)``, which pairs
    the +/- eigenvalues exactly.

    Parameters
    ----------
    gamma : np.ndarray
        Symmetric positive-definite matrix of even dimension 2m.
    tol : float, optional
        Symmetry tolerance; defaults to 1e-9 scaled by the matrix norm.

    Returns
    -------
    np.ndarray
        The m symplectic eigenvalues in ascending order.
    """
    gamma = check_symmetric(gamma, "gamma", tol)
    n = gamma.shape[0]
    if n == 0 or n % 2:
        raise ValueError("covariance matrix must have even positive dimension")
    if np.linalg.eigvalsh(gamma)[0] <= 0.0:
        raise ValueError("covariance matrix must be positive definite")
    m = n // 2
    root = sqrtm_psd(gamma)
    delta_inv = -standard_form(m)  # inv(Delta) = -Delta
    w = root @ delta_inv @ root
    w = 0.5 * (w - w.T)  # exactly antisymmetric
    vals = np.linalg.eigvalsh(1j * w)
    return np.sort(vals)[m:]


def nu_min(gamma: np.ndarray) -> float:
    """Smallest symplectic eigenvalue of ``gamma``."""
    return float(symplectic_eigenvalues(gamma)[0])


def classify_map(b: np.ndarray, m: int, tol: float | None = None) -> MapKind | None:
    """Classify an ``n_i x 2m`` full-row-rank matrix as QUANTUM or CLASSICAL.

    Returns None when the matrix neither preserves nor kills the symplectic
    form within tolerance.  Raises RankError for rank-deficient input.
    """
    b = np.atleast_2d(np.asarray(b, dtype=float))
    n_out = b.shape[0]
    if b.shape[1] != 2 * m:
        raise ValueError(f"map has {b.shape[1]} columns, expected {2 * m}")
    if n_out > 2 * m:
        raise RankError("map has more rows than the ambient dimension")
    sv = np.linalg.svd(b, compute_uv=False)
    rank_tol = max(b.shape) * sv[0] * 1e-12 if sv[0] > 0 else 0.0
    if sv[-1] <= rank_tol:
        raise RankError("map matrix is rank deficient")

    delta = standard_form(m)
    comm = b @ delta @ b.T
    if tol is None:
        tol = scaled_tol(b @ b.T)
    if np.linalg.norm(comm) <= tol:
        return MapKind.CLASSICAL
    if n_out % 2 == 0:
        target = standard_form(n_out // 2)
        if np.linalg.norm(comm - target) <= tol:
            return MapKind.QUANTUM
    return None


def is_symplectic(s: np.ndarray, tol: float | None = None) -> bool:
    """True iff ``S Delta S^T = Delta`` within tolerance."""
    s = as_square(s, "S")
    n = s.shape[0]
    if n == 0 or n % 2:
        raise ValueError("symplectic matrices have even positive dimension")
    delta = standard_form(n // 2)
    if tol is None:
        tol = scaled_tol(s @ s.T)
    return bool(np.linalg.norm(s @ delta @ s.T - delta) <= tol)


def is_sp_generator(h: np.ndarray, tol: float | None = None) -> bool:
    """True iff ``exp(t h)`` is symplectic for all t, i.e. hD + Dh^T = 0."""
    h = as_square(h, "H")
    n = h.shape[0]
    if n % 2:
        return False
    delta = standard_form(n // 2)
    if tol is None:
        tol = scaled_tol(h)
    return bool(np.linalg.norm(h @ delta + delta @ h.T) <= tol)


def direct_sum(*blocks: np.ndarray) -> np.ndarray:
    """Block-diagonal direct sum of square matrices."""
    mats = [as_square(b) for b in blocks]
    n = sum(b.shape[0] for b in mats)
    out = np.zeros((n, n))
    k = 0
    for b in mats:
        out[k : k + b.shape[0], k : k + b.shape[0]] = b
        k += b.shape[0]
    return out


def embed_symplectic(s: np.ndarray, n_extra: int) -> np.ndarray:
    """Extend a symplectic matrix to act trivially on n_extra trailing rows."""
    return direct_sum(s, np.eye(n_extra)) if n_extra else as_square(s).copy()


__all__ = [
    "MapKind",
    "standard_form",
    "symplectic_eigenvalues",
    "nu_min",
    "classify_map",
    "is_symplectic",
    "is_sp_generator",
    "direct_sum",
    "embed_symplectic",
]
