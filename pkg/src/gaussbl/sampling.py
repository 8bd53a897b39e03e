"""Deterministic random generators for matrices with symplectic structure.

Every function takes a ``numpy.random.Generator`` so that callers control
seeding; the CLI and the test-suite derive all randomness from a single
seed this way.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from ._linalg import symmetrize
from .entropy import GaussianJoint
from .symplectic import MapKind, standard_form


def random_symmetric(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    a = rng.standard_normal((n, n))
    return scale * symmetrize(a)


def random_pd(rng: np.random.Generator, n: int, ridge: float = 0.1) -> np.ndarray:
    """Wishart-style positive-definite matrix with a small identity ridge."""
    a = rng.standard_normal((n, n))
    return symmetrize(a @ a.T / n + ridge * np.eye(n))


def random_psd(rng: np.random.Generator, n: int, rank: int | None = None) -> np.ndarray:
    r = n if rank is None else rank
    a = rng.standard_normal((n, r))
    return symmetrize(a @ a.T / n)


def random_sp_generator(rng: np.random.Generator, m: int, scale: float = 1.0) -> np.ndarray:
    """Generator of a symplectic one-parameter group: H = Delta G, G symmetric."""
    delta = standard_form(m)
    g = random_symmetric(rng, 2 * m, scale)
    return delta @ g


def random_symmetric_sp_generator(
    rng: np.random.Generator, m: int, scale: float = 1.0
) -> np.ndarray:
    """Symmetric generator (H = H^T, H Delta + Delta H^T = 0).

    Projection of a random symmetric matrix onto the anticommutant of the
    symplectic form: H = (M + Delta M Delta) / 2.
    """
    delta = standard_form(m)
    g = random_symmetric(rng, 2 * m, scale)
    return 0.5 * (g + delta @ g @ delta)


def random_symplectic(rng: np.random.Generator, m: int, scale: float = 0.5) -> np.ndarray:
    return scipy.linalg.expm(random_sp_generator(rng, m, scale / (2 * m)))


def random_symmetric_pd_symplectic(
    rng: np.random.Generator, m: int, scale: float = 0.5
) -> np.ndarray:
    """exp of a symmetric symplectic generator: symmetric, PD and symplectic."""
    h = random_symmetric_sp_generator(rng, m, scale / (2 * m))
    return symmetrize(scipy.linalg.expm(h))


def random_quantum_cov(
    rng: np.random.Generator,
    m: int,
    purity_margin: float = 0.1,
    noise: float = 0.5,
) -> np.ndarray:
    """Random quantum-valid covariance (nu_min >= 1/2 + purity_margin).

    Built as a symplectically rotated vacuum plus PSD noise plus a margin
    ridge; symplectic-eigenvalue monotonicity under the PSD order keeps the
    uncertainty bound satisfied with room to spare.
    """
    s = random_symplectic(rng, m)
    gamma = 0.5 * symmetrize(s @ s.T)
    gamma += noise * random_psd(rng, 2 * m)
    gamma += purity_margin * np.eye(2 * m)
    return gamma


def random_quantum_joint(
    rng: np.random.Generator,
    mx: int,
    mm: int,
    purity_margin: float = 0.1,
    noise: float = 0.5,
) -> GaussianJoint:
    """Random quantum-valid joint over X (mx modes) and memory M (mm modes)."""
    gamma = random_quantum_cov(rng, mx + mm, purity_margin, noise)
    return GaussianJoint(gamma, 2 * mx, MapKind.QUANTUM)


def random_pure_joint(rng: np.random.Generator, mx: int, mm: int) -> GaussianJoint:
    """Globally pure joint (nu = 1/2 throughout): rotated vacuum."""
    s = random_symplectic(rng, mx + mm)
    gamma = 0.5 * symmetrize(s @ s.T)
    return GaussianJoint(gamma, 2 * mx, MapKind.QUANTUM)


def random_quantum_map(rng: np.random.Generator, m: int, k: int) -> np.ndarray:
    """Quantum-kind map: the first 2k rows of a random symplectic matrix."""
    if not 1 <= k <= m:
        raise ValueError("output modes must satisfy 1 <= k <= m")
    return random_symplectic(rng, m)[: 2 * k, :]


def random_classical_map(rng: np.random.Generator, m: int, r: int) -> np.ndarray:
    """Classical-kind map: r commuting quadrature rows of a random symplectic."""
    if not 1 <= r <= m:
        raise ValueError("row count must satisfy 1 <= r <= m")
    s = random_symplectic(rng, m)
    return s[[2 * i for i in range(r)], :]


__all__ = [
    "random_symmetric",
    "random_pd",
    "random_psd",
    "random_sp_generator",
    "random_symmetric_sp_generator",
    "random_symplectic",
    "random_symmetric_pd_symplectic",
    "random_quantum_cov",
    "random_quantum_joint",
    "random_pure_joint",
    "random_quantum_map",
    "random_classical_map",
]
