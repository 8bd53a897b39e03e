"""Fixed-point computation of Brascamp-Lieb constants and inequality checks.

The constant is the supremum of the scale-invariant log-det objective; a
positive-definite maximizer is a fixed point of alpha -> inv(M(alpha))
with M the stationarity map.  The solver iterates that map with optional
damping, renormalizing det(alpha) = 1 each step, and reports convergence
through the stationarity residual.  Non-achieved suprema show up as a
monotone log-det drift of the raw update and are reported as divergence.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ._linalg import inv_pd, logdet_pd, min_eigenvalue, symmetrize
from .datum import (
    BLDatum,
    objective,
    regularize,
    scaling_condition,
    stationarity_map,
    stationarity_residual,
    subcriticality_probe,
)
from .entropy import GaussianJoint, conditional_entropy, pushforward_joint
from .errors import DegeneratePushforwardError

logger = logging.getLogger(__name__)


class SolveStatus(Enum):
    CONVERGED = "converged"
    DIVERGING = "diverging"
    MAX_ITERATIONS = "max-iterations"


@dataclass(frozen=True)
class SolveResult:
    status: SolveStatus
    alpha: np.ndarray
    constant: float | None
    residual: float
    iterations: int
    objective_trace: tuple[tuple[int, float], ...]

    @property
    def converged(self) -> bool:
        return self.status is SolveStatus.CONVERGED


def _det_normalize(alpha: np.ndarray) -> np.ndarray:
    n = alpha.shape[0]
    return alpha * np.exp(-logdet_pd(alpha, "alpha") / n)


def fixed_point_solve(
    d: BLDatum,
    alpha0: np.ndarray | None = None,
    tol: float = 1e-10,
    max_iter: int = 2000,
    damping: float = 1.0,
    drift_window: int = 50,
) -> SolveResult:
    """Iterate alpha <- (1-theta) alpha + theta inv(M(alpha)) to a maximizer.

    Requires the scaling condition (otherwise the objective is unbounded or
    degenerate under scaling).  Each iterate is symmetrized and rescaled to
    det(alpha) = 1.  Damping falls back to 1/2 if a full step ever
    decreases the objective.  Divergence is declared when the log-det of
    the raw update drifts monotonically for ``drift_window`` consecutive
    iterations while the residual fails to decrease.
    """
    if not scaling_condition(d):
        raise ValueError("fixed-point solve requires the scaling condition 2m = p.n")
    if not 0.0 < damping <= 1.0:
        raise ValueError("damping must lie in (0, 1]")
    n = d.ambient
    alpha = np.eye(n) if alpha0 is None else _det_normalize(
        symmetrize(np.asarray(alpha0, dtype=float))
    )

    theta = damping
    trace: list[tuple[int, float]] = []
    f_prev = objective(d, alpha)
    trace.append((0, f_prev))
    residual = stationarity_residual(d, alpha)
    prev_residual = residual
    prev_drift_sign = 0
    prev_raw_logdet = None
    drift_run = 0

    for it in range(1, max_iter + 1):
        if residual <= tol:
            return SolveResult(
                SolveStatus.CONVERGED,
                alpha,
                objective(d, alpha),
                residual,
                it - 1,
                tuple(trace),
            )
        m = stationarity_map(d, alpha)
        if min_eigenvalue(m) <= 1e-14 * max(1.0, float(np.linalg.norm(m))):
            # objective unbounded along ker(M); boundary escape
            return SolveResult(
                SolveStatus.DIVERGING, alpha, None, residual, it - 1, tuple(trace)
            )
        raw = inv_pd(m, "stationarity map")
        raw_logdet = logdet_pd(raw, "update")

        candidate = _det_normalize(symmetrize((1.0 - theta) * alpha + theta * raw))
        f_new = objective(d, candidate)
        if f_new < f_prev - 1e-8 and theta > 0.5:
            logger.debug("objective decreased at iteration %d; damping to 1/2", it)
            theta = 0.5
            candidate = _det_normalize(symmetrize(0.5 * alpha + 0.5 * raw))
            f_new = objective(d, candidate)

        alpha = candidate
        f_prev = f_new
        trace.append((it, f_new))
        residual = stationarity_residual(d, alpha)

        # monotone log-det drift of the raw update with stagnant residual
        if prev_raw_logdet is not None:
            step = raw_logdet - prev_raw_logdet
            sign = int(np.sign(step)) if abs(step) > 1e-12 else 0
            if sign != 0 and sign == prev_drift_sign and residual >= prev_residual * (1 - 1e-6):
                drift_run += 1
            else:
                drift_run = 0
            prev_drift_sign = sign if sign != 0 else prev_drift_sign
        prev_raw_logdet = raw_logdet
        prev_residual = residual
        if drift_run >= drift_window:
            return SolveResult(
                SolveStatus.DIVERGING, alpha, None, residual, it, tuple(trace)
            )

    status = (
        SolveStatus.CONVERGED if residual <= tol else SolveStatus.MAX_ITERATIONS
    )
    constant = objective(d, alpha) if status is SolveStatus.CONVERGED else None
    return SolveResult(status, alpha, constant, residual, max_iter, tuple(trace))


# ---------------------------------------------------------------------------
# Full pipeline


@dataclass(frozen=True)
class BLConstant:
    """Verdict of the constant pipeline: finite (with value), infinite, or unknown."""

    status: str  # "finite" | "infinite" | "unknown"
    value: float | None = None
    reason: str = ""
    solve: SolveResult | None = field(default=None, compare=False)
    diagnostics: dict = field(default_factory=dict, compare=False)

    @property
    def finite(self) -> bool:
        return self.status == "finite"


def bl_constant(
    d: BLDatum,
    tol: float = 1e-10,
    max_iter: int = 2000,
    probe_trials: int = 200,
    restarts: int = 3,
    eps_ladder=(0.5, 0.3, 0.2, 0.1, 0.05, 0.03, 0.02, 0.01),
    rng: np.random.Generator | int | None = 0,
) -> BLConstant:
    """Decide and compute the Brascamp-Lieb constant of a datum.

    Pipeline: scaling-condition failure or a subcritical-violation witness
    give Infinite; a converged fixed point gives Finite; otherwise random
    restarts and the regularized-datum ladder are tried, extrapolating the
    constant to eps -> 0.  Anything unresolved is Unknown (the probe is a
    refuter, not a certifier).
    """
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    if not scaling_condition(d):
        return BLConstant("infinite", reason="scaling condition 2m = p.n fails")
    probe = subcriticality_probe(d, trials=probe_trials, rng=rng)
    if probe.violated:
        return BLConstant(
            "infinite",
            reason="supercritical subspace found",
            diagnostics={"witness": probe.witness, "dim": probe.dim},
        )

    try:
        res = fixed_point_solve(d, tol=tol, max_iter=max_iter)
    except DegeneratePushforwardError:
        res = None
    if res is not None and res.converged:
        return BLConstant("finite", value=res.constant, solve=res)

    attempts = {"default": res.status.value if res is not None else "degenerate"}
    n = d.ambient
    for trial in range(restarts):
        seed_alpha = np.eye(n) + symmetrize(
            rng.standard_normal((n, n)) @ rng.standard_normal((n, n)).T
        ) / n
        try:
            res_r = fixed_point_solve(d, alpha0=seed_alpha, tol=tol, max_iter=max_iter)
        except DegeneratePushforwardError:
            continue
        if res_r.converged:
            return BLConstant("finite", value=res_r.constant, solve=res_r)
        attempts[f"restart{trial}"] = res_r.status.value

    # regularized ladder, extrapolating eps -> 0
    ladder: list[tuple[float, float]] = []
    for eps in eps_ladder:
        try:
            res_e = fixed_point_solve(
                regularize(d, eps), tol=max(tol, 1e-9), max_iter=max(max_iter, 3000)
            )
        except DegeneratePushforwardError:
            continue
        if res_e.converged:
            ladder.append((eps, res_e.constant))
    if len(ladder) >= 3:
        extrapolated, uncertainty = _extrapolate_ladder(ladder)
        if uncertainty <= 0.01 * max(1.0, abs(extrapolated)):
            return BLConstant(
                "finite",
                value=extrapolated,
                reason=f"regularized-ladder extrapolation (+/- {uncertainty:.2g})",
                diagnostics={
                    "ladder": ladder,
                    "attempts": attempts,
                    "uncertainty": uncertainty,
                },
            )
    return BLConstant(
        "unknown",
        reason="no convergent solve; probe found no violation",
        diagnostics={"ladder": ladder, "attempts": attempts},
    )


def _extrapolate_ladder(ladder) -> tuple[float, float]:
    """eps -> 0 limit of the regularized constants.

    The blended weights enter entropy-like closed forms, so the ladder
    behaves like c0 + c1 eps + c2 eps ln(eps); fit that model when enough
    points converged, a straight line otherwise.  The uncertainty estimate
    compares against dropping the largest-eps point.
    """
    eps_arr = np.array([e for e, _ in ladder])
    f_arr = np.array([f for _, f in ladder])

    def fit(e, f):
        if e.size >= 4:
            basis = np.column_stack([np.ones_like(e), e, e * np.log(e)])
            coef, *_ = np.linalg.lstsq(basis, f, rcond=None)
            return float(coef[0])
        return float(np.polyval(np.polyfit(e, f, 1), 0.0))

    full = fit(eps_arr, f_arr)
    reduced = fit(eps_arr[1:], f_arr[1:]) if eps_arr.size >= 4 else full
    uncertainty = abs(full - reduced) + abs(f_arr[-1] - full) * 0.1
    return full, uncertainty


# ---------------------------------------------------------------------------
# Inequality checks at a Gaussian state


def verify_ssa_gaussian(d: BLDatum, joint: GaussianJoint, f_value: float) -> float:
    """Margin of the generalized strong subadditivity at a Gaussian joint.

    margin = sum_i p_i S(Y_i|M) + f - S(X|M) with Y_i = B_i X pushed
    forward through the joint; nonnegative means the inequality holds.
    """
    if joint.nx != d.ambient:
        raise ValueError("X block of the joint must have 2m rows")
    if not d.is_quantum_datum():
        raise ValueError("entropy verification needs quantum/classical map kinds")
    if not np.isfinite(f_value):
        raise ValueError("f must be finite")
    total = f_value - conditional_entropy(joint)
    for bm, w in zip(d.maps, d.p):
        if w == 0.0:
            continue
        pushed = pushforward_joint(joint, bm.matrix, bm.kind)
        total += w * conditional_entropy(pushed)
    return float(total)


def verify_bl_integral_gaussian(d: BLDatum, a_list, f_value: float) -> float:
    """Log-ratio gap of the integral Brascamp-Lieb inequality on Gaussians.

    With test functions f_i(y) = exp(-y^T A_i y / 2) the inequality reads
    LHS <= exp(f) prod_i (integral of f_i)^{p_i}; the returned value is
    ln(RHS) - ln(LHS), expected nonnegative, zero exactly at the extremal
    A_i = inv(B_i alpha* B_i^T).
    """
    if not scaling_condition(d):
        raise ValueError("the integral check requires the scaling condition")
    if len(a_list) != d.k:
        raise ValueError("need one test matrix per map")
    ln2pi = np.log(2.0 * np.pi)
    quad = np.zeros((d.ambient, d.ambient))
    ln_rhs = f_value
    for bm, w, a in zip(d.maps, d.p, a_list):
        a = symmetrize(np.asarray(a, dtype=float))
        if a.shape != (bm.n_out, bm.n_out):
            raise ValueError("test matrix shape must match the map output")
        lndet_a = logdet_pd(a, "test matrix")
        quad += w * bm.matrix.T @ a @ bm.matrix
        ln_rhs += w * (0.5 * bm.n_out * ln2pi - 0.5 * lndet_a)
    ln_lhs = 0.5 * d.ambient * ln2pi - 0.5 * logdet_pd(quad, "aggregate quadratic form")
    return float(ln_rhs - ln_lhs)


def extremal_test_matrices(d: BLDatum, alpha_star: np.ndarray) -> list[np.ndarray]:
    """The equality-achieving A_i = inv(B_i alpha* B_i^T) for the integral check."""
    return [
        inv_pd(symmetrize(bm.matrix @ alpha_star @ bm.matrix.T), "pushforward")
        for bm in d.maps
    ]


__all__ = [
    "SolveStatus",
    "SolveResult",
    "fixed_point_solve",
    "BLConstant",
    "bl_constant",
    "verify_ssa_gaussian",
    "verify_bl_integral_gaussian",
    "extremal_test_matrices",
]
