"""Heat-semigroup flow at the covariance level and its entropy functionals.

The additive-noise (heat) semigroup acts on covariances as
``gamma -> gamma + t alpha`` and commutes with pushforwards:
``B (gamma + t alpha) B^T = B gamma B^T + t B alpha B^T``.  On top of it
sit the integral Fisher information (entropy gained under one application
of the semigroup), the Fisher information proper (its right derivative at
t = 0), the Stam inequality gap, and the flow functional

    phi(t) = S(X|M)(gamma + t alpha*) - sum_i p_i S(Y_i|M)(pushforward)

whose monotone increase towards F(alpha*) is what makes the extremal
covariance produce a sharp inequality.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import check_symmetric
from .datum import BLDatum, objective, scaling_condition, stationarity_residual
from .entropy import GaussianJoint, conditional_entropy, pushforward_joint
from .errors import NumericalError

DEFAULT_T_MIN = 1e-2
DEFAULT_T_MAX = 1e4
DEFAULT_GRID_POINTS = 40


def heat_apply(gamma: np.ndarray, alpha: np.ndarray, t: float) -> np.ndarray:
    """Covariance after time t of additive Gaussian noise: gamma + t alpha."""
    gamma = np.asarray(gamma, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    if gamma.shape != alpha.shape:
        raise ValueError("gamma and alpha must have matching shape")
    if t < 0:
        raise ValueError("heat time must be nonnegative")
    return gamma + t * alpha


def heat_joint(joint: GaussianJoint, alpha: np.ndarray, t: float) -> GaussianJoint:
    """Heat acting on the X block only: alpha is padded with zeros on M."""
    alpha = check_symmetric(alpha, "alpha")
    if alpha.shape[0] != joint.nx:
        raise ValueError("alpha must act on the X block")
    if t == 0.0:
        return joint
    padded = np.zeros_like(joint.gamma)
    padded[: joint.nx, : joint.nx] = alpha
    return GaussianJoint(joint.gamma + t * padded, joint.nx, joint.kind_x, tol=joint.tol)


def integral_fisher(joint: GaussianJoint, alpha: np.ndarray, t: float = 1.0) -> float:
    """S(X|M)(gamma + t alpha) - S(X|M)(gamma): the integral Fisher information.

    Nonnegative for PSD alpha (noise can only raise a conditional entropy).
    """
    return conditional_entropy(heat_joint(joint, alpha, t)) - conditional_entropy(joint)


def fisher_info(
    joint: GaussianJoint, alpha: np.ndarray, step: float | None = None
) -> float:
    """Fisher information: right derivative of t -> S(X|M)(gamma + t alpha) at 0.

    Computed from forward differences at steps h, h/2, h/4 with two levels
    of Richardson extrapolation; h defaults to 1e-4 relative to |gamma|
    with an absolute floor of 1e-7 against cancellation.
    """
    alpha = check_symmetric(alpha, "alpha")
    if step is None:
        step = max(1e-4 * float(np.linalg.norm(joint.gamma)), 1e-7)
    s0 = conditional_entropy(joint)

    def fwd(h: float) -> float:
        return (conditional_entropy(heat_joint(joint, alpha, h)) - s0) / h

    d1 = fwd(step)
    d2 = fwd(step / 2)
    d3 = fwd(step / 4)
    r1 = 2.0 * d2 - d1
    r2 = 2.0 * d3 - d2
    out = (4.0 * r2 - r1) / 3.0
    if not np.isfinite(out):
        raise NumericalError("Fisher-information extrapolation is not finite")
    return float(out)


def stam_check(
    joint: GaussianJoint, bmap, alpha: np.ndarray, step: float | None = None
) -> float:
    """Stam gap J_{X|M}(alpha) - J_{Y|M}(B alpha B^T) >= 0 for Y = B X."""
    from .datum import BLMap  # local import to keep module deps one-way

    if not isinstance(bmap, BLMap):
        bmap = BLMap.from_matrix(bmap)
    if bmap.kind is None:
        raise ValueError("Stam check needs a quantum- or classical-kind map")
    alpha = check_symmetric(alpha, "alpha")
    pushed = pushforward_joint(joint, bmap.matrix, bmap.kind)
    j_x = fisher_info(joint, alpha, step)
    j_y = fisher_info(pushed, bmap.matrix @ alpha @ bmap.matrix.T, step)
    return j_x - j_y


def default_t_grid(
    t_max: float = DEFAULT_T_MAX,
    points: int = DEFAULT_GRID_POINTS,
    t_min: float = DEFAULT_T_MIN,
    include_zero: bool = True,
) -> np.ndarray:
    """Geometric grid from t_min to t_max, optionally prefixed with t = 0."""
    if points < 2 or t_max <= t_min or t_min <= 0:
        raise ValueError("grid needs points >= 2 and 0 < t_min < t_max")
    geo = np.geomspace(t_min, t_max, points - 1 if include_zero else points)
    return np.concatenate([[0.0], geo]) if include_zero else geo


@dataclass(frozen=True)
class FlowTrace:
    """phi(t), its X part and per-map parts along the heat flow."""

    t_grid: np.ndarray
    phi: np.ndarray
    phi_x: np.ndarray
    phi_y: np.ndarray  # shape (K, len(t_grid))
    limit_estimate: float
    objective_at_alpha: float

    def is_nondecreasing(self, tol: float = 1e-7) -> bool:
        return bool(np.all(np.diff(self.phi) >= -tol))


def flow_trace(
    d: BLDatum,
    joint: GaussianJoint,
    alpha_star: np.ndarray,
    t_grid=None,
    residual_tol: float = 1e-6,
) -> FlowTrace:
    """Evaluate phi on a grid for an extremal alpha*.

    alpha* must be (numerically) stationary and the scaling condition must
    hold; then phi is nondecreasing and tends to F(alpha*).
    """
    if not scaling_condition(d):
        raise ValueError("flow analysis requires the scaling condition")
    if joint.nx != d.ambient:
        raise ValueError("X block of the joint must have 2m rows")
    alpha_star = check_symmetric(alpha_star, "alpha_star")
    res = stationarity_residual(d, alpha_star)
    if res > residual_tol:
        raise ValueError(
            f"alpha_star is not stationary (residual {res:.3g} > {residual_tol:.3g})"
        )
    if t_grid is None:
        t_grid = default_t_grid()
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid[0] < 0 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t grid must be strictly increasing and nonnegative")

    kinds = [bm.kind for bm in d.maps]
    if any(k is None for k in kinds):
        raise ValueError("flow analysis needs quantum/classical map kinds")

    phi_x = np.empty(t_grid.shape)
    phi_y = np.empty((d.k, t_grid.size))
    for col, t in enumerate(t_grid):
        heated = heat_joint(joint, alpha_star, t)
        phi_x[col] = conditional_entropy(heated)
        for row, bm in enumerate(d.maps):
            pushed = pushforward_joint(heated, bm.matrix, bm.kind)
            phi_y[row, col] = conditional_entropy(pushed)
    phi = phi_x - d.p @ phi_y
    return FlowTrace(
        t_grid=t_grid,
        phi=phi,
        phi_x=phi_x,
        phi_y=phi_y,
        limit_estimate=float(phi[-1]),
        objective_at_alpha=objective(d, alpha_star),
    )


@dataclass(frozen=True)
class ConcavityReport:
    """Minimal margins of the integral-Fisher structure inequalities."""

    matrix_concavity: float  # 2 D(a+b) - D(a) - D(a+2b) >= 0
    midpoint_concavity: float  # in t along t -> D(t a)
    monotonicity: float  # D(t2 a) - D(t1 a) >= 0 for t2 > t1
    presmoothing: float  # D(gamma)(a) - D(N_b gamma)(a) >= 0


def concavity_checks(
    joint: GaussianJoint, alpha: np.ndarray, beta: np.ndarray, t_grid=None
) -> ConcavityReport:
    """Evaluate the concavity/monotonicity family of the integral Fisher term."""
    alpha = check_symmetric(alpha, "alpha")
    beta = check_symmetric(beta, "beta")
    if t_grid is None:
        t_grid = np.geomspace(0.1, 10.0, 8)
    t_grid = np.asarray(t_grid, dtype=float)

    def delta(a) -> float:
        return integral_fisher(joint, a)

    m_conc = 2.0 * delta(alpha + beta) - delta(alpha) - delta(alpha + 2.0 * beta)

    vals = np.array([integral_fisher(joint, alpha, t) for t in t_grid])
    mono = float(np.min(np.diff(vals))) if vals.size > 1 else 0.0
    mid = np.inf
    for i in range(t_grid.size):
        for j in range(i + 1, t_grid.size):
            s, t = t_grid[i], t_grid[j]
            lhs = 2.0 * integral_fisher(joint, alpha, 0.5 * (s + t))
            mid = min(mid, lhs - vals[i] - vals[j])
    if not np.isfinite(mid):
        mid = 0.0

    smoothed = heat_joint(joint, beta, 1.0)
    presmooth = integral_fisher(joint, alpha) - integral_fisher(smoothed, alpha)
    return ConcavityReport(
        matrix_concavity=float(m_conc),
        midpoint_concavity=float(mid),
        monotonicity=mono,
        presmoothing=float(presmooth),
    )


__all__ = [
    "heat_apply",
    "heat_joint",
    "integral_fisher",
    "fisher_info",
    "stam_check",
    "default_t_grid",
    "FlowTrace",
    "flow_trace",
    "ConcavityReport",
    "concavity_checks",
]
