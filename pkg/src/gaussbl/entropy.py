"""Gaussian entropies and conditional entropies of Gaussian joints.

Two entropy functionals act on covariance matrices: the differential
entropy ``S_G(gamma) = (1/2) ln det(e gamma)`` of a Gaussian random
variable and the von Neumann entropy ``S_Q(gamma) = sum_i g(nu_i)`` of a
Gaussian quantum state, where the ``nu_i`` are symplectic eigenvalues and
``g`` is the bosonic entropy function.  All values are in nats.

Joints over a subsystem X and a quantum memory M are covariance matrices
with the X block leading; conditioning a quantum memory on the measured
outcome of commuting quadratures leaves the outcome-independent Schur
complement ``gamma_M - gamma_MX inv(gamma_X) gamma_XM``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import xlogy

from ._linalg import check_symmetric, inv_pd, logdet_pd, symmetrize
from .errors import DomainError, StateInvalidError
from .symplectic import MapKind, symplectic_eigenvalues

#: slack allowed below the uncertainty bound nu >= 1/2 before rejecting
QUANTUM_TOL = 1e-9


def shannon_gaussian(gamma: np.ndarray) -> float:
    """Differential entropy (1/2) ln det(e gamma) of a Gaussian variable.

    Requires a positive-definite covariance; the empty matrix is rejected
    (an entropy of a zero-dimensional variable is not defined).
    """
    gamma = check_symmetric(gamma, "gamma")
    n = gamma.shape[0]
    if n == 0:
        raise ValueError("S_G is undefined for an empty covariance matrix")
    return 0.5 * (n + logdet_pd(gamma, "gamma"))


def bosonic_g(nu) -> np.ndarray | float:
    """Entropy g(nu) = (nu+1/2) ln(nu+1/2) - (nu-1/2) ln(nu-1/2) of a mode.

    Defined for nu >= 1/2 with g(1/2) = 0 (the 0 ln 0 = 0 convention).
    Accepts scalars or arrays.
    """
    arr = np.asarray(nu, dtype=float)
    if np.any(arr < 0.5 - QUANTUM_TOL):
        raise DomainError("bosonic g requires nu >= 1/2")
    lo = np.clip(arr - 0.5, 0.0, None)
    hi = arr + 0.5
    out = hi * np.log(hi) - xlogy(lo, lo)
    return float(out) if np.isscalar(nu) or arr.ndim == 0 else out


def bosonic_g_prime(nu) -> np.ndarray | float:
    """Derivative g'(nu) = ln((nu+1/2)/(nu-1/2)), for nu > 1/2."""
    arr = np.asarray(nu, dtype=float)
    if np.any(arr <= 0.5):
        raise DomainError("g' requires nu > 1/2")
    out = np.log((arr + 0.5) / (arr - 0.5))
    return float(out) if np.isscalar(nu) or arr.ndim == 0 else out


def von_neumann_gaussian(gamma: np.ndarray, tol: float = QUANTUM_TOL) -> float:
    """Von Neumann entropy of the Gaussian state with covariance ``gamma``.

    The empty matrix (trivial system) has entropy 0.  Raises
    StateInvalidError when the minimum symplectic eigenvalue falls below
    1/2 - tol.
    """
    gamma = check_symmetric(gamma, "gamma")
    if gamma.shape[0] == 0:
        return 0.0
    nus = symplectic_eigenvalues(gamma)
    if nus[0] < 0.5 - tol:
        raise StateInvalidError(
            f"nu_min = {nus[0]:.6g} violates the uncertainty bound 1/2"
        )
    return float(np.sum(bosonic_g(np.clip(nus, 0.5, None))))


@dataclass(frozen=True)
class GaussianJoint:
    """Covariance matrix over a subsystem X and an optional quantum memory M.

    ``gamma`` is the full symmetric covariance with the X block occupying
    the first ``nx`` indices and M the remainder.  ``kind_x`` records
    whether X is a quantum Gaussian system (nx even, joint satisfies the
    uncertainty bound) or a classical outcome variable (X block positive
    definite, no bound on it).
    """

    gamma: np.ndarray
    nx: int
    kind_x: MapKind = MapKind.QUANTUM
    tol: float = field(default=QUANTUM_TOL, compare=False)

    def __post_init__(self):
        gamma = check_symmetric(self.gamma, "gamma")
        object.__setattr__(self, "gamma", gamma)
        n = gamma.shape[0]
        if not 0 < self.nx <= n:
            raise ValueError("X block must be non-empty and inside the joint")
        if self.kind_x is MapKind.QUANTUM:
            if self.nx % 2:
                raise ValueError("quantum X requires an even block dimension")
            if self.nm % 2:
                raise ValueError("quantum memory requires an even dimension")
            nus = symplectic_eigenvalues(gamma)
            if nus[0] < 0.5 - self.tol:
                raise StateInvalidError(
                    f"joint nu_min = {nus[0]:.6g} violates the uncertainty bound"
                )
        else:
            if self.nm % 2:
                raise ValueError("quantum memory requires an even dimension")
            if np.linalg.eigvalsh(self.gamma_x)[0] <= 0.0:
                raise StateInvalidError("classical X block must be positive definite")

    @property
    def n(self) -> int:
        return self.gamma.shape[0]

    @property
    def nm(self) -> int:
        return self.n - self.nx

    @property
    def gamma_x(self) -> np.ndarray:
        return self.gamma[: self.nx, : self.nx]

    @property
    def gamma_m(self) -> np.ndarray:
        return self.gamma[self.nx :, self.nx :]

    @property
    def gamma_xm(self) -> np.ndarray:
        return self.gamma[: self.nx, self.nx :]

    @property
    def trivial_memory(self) -> bool:
        return self.nm == 0


def schur_complement(gamma: np.ndarray, k: int) -> np.ndarray:
    """Covariance of the trailing block conditioned on the leading k rows."""
    a = gamma[:k, :k]
    c = gamma[k:, :k]
    d = gamma[k:, k:]
    return symmetrize(d - c @ inv_pd(a, "conditioned block") @ c.T)


def conditional_entropy(joint: GaussianJoint) -> float:
    """S(X|M) of a Gaussian joint, in nats.

    Quantum X: ``S_Q(gamma_XM) - S_Q(gamma_M)``.  Classical X (outcome of
    commuting quadratures): ``S_G(gamma_X) + S_Q(gamma_{M|X}) - S_Q(gamma_M)``
    with the measured-out Schur complement as conditional memory covariance.
    """
    if joint.kind_x is MapKind.QUANTUM:
        return von_neumann_gaussian(joint.gamma, joint.tol) - von_neumann_gaussian(
            joint.gamma_m, joint.tol
        )
    s_x = shannon_gaussian(joint.gamma_x)
    if joint.trivial_memory:
        return s_x
    cond_m = schur_complement(joint.gamma, joint.nx)
    return (
        s_x
        + von_neumann_gaussian(cond_m, joint.tol)
        - von_neumann_gaussian(joint.gamma_m, joint.tol)
    )


def pushforward_joint(joint: GaussianJoint, b: np.ndarray, kind: MapKind) -> GaussianJoint:
    """Joint of (Y, M) with Y = B X; the memory block is untouched."""
    b = np.atleast_2d(np.asarray(b, dtype=float))
    if b.shape[1] != joint.nx:
        raise ValueError("map width does not match the X block")
    gy = symmetrize(b @ joint.gamma_x @ b.T)
    gym = b @ joint.gamma_xm
    out = np.block([[gy, gym], [gym.T, joint.gamma_m]])
    return GaussianJoint(out, b.shape[0], kind, tol=joint.tol)


def restrict_x(joint: GaussianJoint, indices) -> GaussianJoint:
    """Keep only the given X indices (memory untouched)."""
    idx_x = list(indices)
    idx = idx_x + list(range(joint.nx, joint.n))
    sub = joint.gamma[np.ix_(idx, idx)]
    return GaussianJoint(sub, len(idx_x), joint.kind_x, tol=joint.tol)


@dataclass(frozen=True)
class AsymptoticReport:
    """Residuals of S(gamma + t alpha) against (1/2) ln det(e t alpha)."""

    t_grid: np.ndarray
    residual_classical: np.ndarray
    residual_quantum: np.ndarray | None
    max_t_abs_residual: float
    tail_slope: float


def asymptotic_entropy_check(
    gamma: np.ndarray,
    alpha: np.ndarray,
    t_grid,
    quantum: bool | None = None,
) -> AsymptoticReport:
    """Evaluate r(t) = S(gamma + t alpha) - (1/2) ln det(e t alpha) on a grid.

    The classical branch always runs; the quantum branch runs when the
    dimension is even and the state is quantum-valid along the whole grid
    (or as forced by ``quantum``).  Reports max_t |t r(t)| and the
    least-squares slope of t|r(t)| against ln t over the last decade.
    """
    gamma = check_symmetric(gamma, "gamma")
    alpha = check_symmetric(alpha, "alpha")
    if gamma.shape != alpha.shape:
        raise ValueError("gamma and alpha must have matching shape")
    n = gamma.shape[0]
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid <= 0.0):
        raise ValueError("asymptotic grid requires strictly positive times")

    half_lndet_alpha = 0.5 * logdet_pd(alpha, "alpha")
    baseline = 0.5 * n * (1.0 + np.log(t_grid)) + half_lndet_alpha

    r_classical = np.array(
        [shannon_gaussian(gamma + t * alpha) for t in t_grid]
    ) - baseline

    if quantum is None:
        quantum = n % 2 == 0 and _quantum_valid_on_grid(gamma, alpha, t_grid)
    r_quantum = None
    if quantum:
        r_quantum = np.array(
            [von_neumann_gaussian(gamma + t * alpha) for t in t_grid]
        ) - baseline

    worst = r_classical if r_quantum is None else np.maximum(
        np.abs(r_classical), np.abs(r_quantum)
    )
    t_abs_r = t_grid * np.abs(worst)
    tail = t_grid >= t_grid[-1] / 10.0
    slope = 0.0
    if np.sum(tail) >= 2:
        slope = float(np.polyfit(np.log(t_grid[tail]), t_abs_r[tail], 1)[0])
    return AsymptoticReport(
        t_grid=t_grid,
        residual_classical=r_classical,
        residual_quantum=r_quantum,
        max_t_abs_residual=float(np.max(t_abs_r)),
        tail_slope=slope,
    )


def _quantum_valid_on_grid(gamma, alpha, t_grid) -> bool:
    try:
        for t in (t_grid[0], t_grid[-1]):
            von_neumann_gaussian(gamma + t * alpha)
    except (StateInvalidError, ValueError):
        return False
    return True


__all__ = [
    "QUANTUM_TOL",
    "shannon_gaussian",
    "bosonic_g",
    "bosonic_g_prime",
    "von_neumann_gaussian",
    "GaussianJoint",
    "schur_complement",
    "conditional_entropy",
    "pushforward_joint",
    "restrict_x",
    "AsymptoticReport",
    "asymptotic_entropy_check",
]
