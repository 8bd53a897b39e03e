"""Applications: rank-one uncertainty relations, entropy-power bounds and
entanglement-rate estimation for quadratic Hamiltonians.

The three constructions share one engine (the log-det constant) but expose
closed forms: a polytope membership test decides finiteness for rank-one
data, the three-map standard datum has an explicit optimal-weight envelope
``phi``, and symmetric positive-definite symplectic matrices give the
constant ``-1/2 ln(det S11 det S22)`` whose growth along ``exp(t H)``
bounds entanglement production.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.optimize import linprog

from ._linalg import as_square, check_symmetric, logdet_pd, numerical_rank, scaled_tol
from .datum import BLDatum, correlation_datum
from .entropy import GaussianJoint, conditional_entropy, restrict_x
from .errors import CapacityError
from .solver import BLConstant, bl_constant
from .symplectic import embed_symplectic, is_symplectic, standard_form


# ---------------------------------------------------------------------------
# Quadratic Hamiltonians


@dataclass(frozen=True)
class QuadHamiltonian:
    """Generator H of the symplectic evolution S(t) = exp(t H).

    Validity requires H Delta + Delta H^T = 0 (the infinitesimal version of
    S Delta S^T = Delta, so that S(t) is symplectic at all times).  The
    linear-growth statement for the entanglement rate additionally needs a
    symmetric H, recorded in ``symmetric``.
    """

    h: np.ndarray
    m1: int
    m2: int
    tol: float = field(default=0.0, compare=False)

    def __post_init__(self):
        h = as_square(self.h, "H")
        object.__setattr__(self, "h", h)
        n = 2 * (self.m1 + self.m2)
        if self.m1 < 1 or self.m2 < 1:
            raise ValueError("both partitions need at least one mode")
        if h.shape[0] != n:
            raise ValueError(f"H must be {n} x {n} for partition ({self.m1},{self.m2})")
        tol = self.tol or scaled_tol(h)
        delta = standard_form(self.m1 + self.m2)
        if np.linalg.norm(h @ delta + delta @ h.T) > tol:
            raise ValueError(
                "H does not generate symplectic evolution (H Delta + Delta H^T != 0)"
            )

    @property
    def symmetric(self) -> bool:
        return bool(np.linalg.norm(self.h - self.h.T) <= scaled_tol(self.h))

    @property
    def h12(self) -> np.ndarray:
        return self.h[: 2 * self.m1, 2 * self.m1 :]


def two_mode_squeezer(r: float = 1.0) -> QuadHamiltonian:
    """Symmetric two-mode squeezing generator with coupling r (m1 = m2 = 1)."""
    h = np.array(
        [
            [0.0, 0.0, r, 0.0],
            [0.0, 0.0, 0.0, -r],
            [r, 0.0, 0.0, 0.0],
            [0.0, -r, 0.0, 0.0],
        ]
    )
    return QuadHamiltonian(h, 1, 1)


# ---------------------------------------------------------------------------
# Rank-one finiteness polytope


@dataclass(frozen=True)
class RankOneResult:
    """Membership verdict for the rank-one finiteness polytope.

    ``certificate`` maps index tuples (each a basis of the ambient space)
    to convex weights reproducing p when finite; ``reason`` explains the
    infinite case.
    """

    finite: bool
    certificate: dict[tuple[int, ...], float] | None = None
    reason: str = ""


def _basis_subsets(rows: np.ndarray, cap_subsets: int = 200000):
    k, n = rows.shape
    count = 0
    for idx in itertools.combinations(range(k), n):
        count += 1
        if count > cap_subsets:
            raise CapacityError("basis enumeration exceeded the subset cap")
        sub = rows[list(idx), :]
        if numerical_rank(sub) == n:
            yield idx


def _feasible_combination(vertices: dict, p: np.ndarray, k: int):
    """Solve p = sum_I lambda_I p^(I), lambda in the simplex; None if infeasible."""
    keys = list(vertices)
    if not keys:
        return None
    mat = np.column_stack([vertices[key] for key in keys])
    a_eq = np.vstack([mat, np.ones((1, len(keys)))])
    b_eq = np.concatenate([p, [1.0]])
    res = linprog(
        c=np.zeros(len(keys)),
        A_eq=a_eq,
        b_eq=b_eq,
        bounds=[(0.0, None)] * len(keys),
        method="highs",
    )
    if not res.success:
        return None
    lam = res.x
    # refuse solutions that only "work" because of solver slack
    if np.linalg.norm(mat @ lam - p) > 1e-7:
        return None
    return {key: float(w) for key, w in zip(keys, lam) if w > 1e-12}


def _max_weight_basis(rows: np.ndarray, weights: np.ndarray):
    """Greedy maximum-weight basis of the row vector matroid."""
    n = rows.shape[1]
    order = np.argsort(-weights)
    chosen: list[int] = []
    stacked = np.zeros((0, n))
    for i in order:
        trial = np.vstack([stacked, rows[i : i + 1, :]])
        if numerical_rank(trial) == trial.shape[0]:
            chosen.append(int(i))
            stacked = trial
            if len(chosen) == n:
                return tuple(sorted(chosen))
    return None


def rank_one_finiteness(d: BLDatum, enumeration_cap: int = 20) -> RankOneResult:
    """Decide finiteness of a rank-one datum's constant by polytope membership.

    The constant is finite iff p is a convex combination of indicator
    vectors of index sets whose rows form a basis of R^{2m} (together with
    the separately checked scaling condition sum p_i = 2m).  Up to
    ``enumeration_cap`` maps all bases are enumerated; beyond that a
    column-generation loop prices new bases greedily on the matroid.
    """
    if any(bm.n_out != 1 for bm in d.maps):
        raise ValueError("rank-one finiteness requires all maps to be single rows")
    n = d.ambient
    rows = np.vstack([bm.matrix for bm in d.maps])
    p = d.p

    if numerical_rank(rows) < n:
        return RankOneResult(False, reason="the rows do not span the ambient space")

    def vertex(idx):
        v = np.zeros(d.k)
        v[list(idx)] = 1.0
        return v

    if d.k <= enumeration_cap:
        vertices = {idx: vertex(idx) for idx in _basis_subsets(rows)}
        if not vertices:
            return RankOneResult(False, reason="no subset of rows forms a basis")
        cert = _feasible_combination(vertices, p, d.k)
        if cert is None:
            return RankOneResult(
                False, reason="p lies outside the basis-indicator polytope"
            )
        return RankOneResult(True, certificate=cert)

    # column generation with matroid-greedy pricing
    pool: dict[tuple[int, ...], np.ndarray] = {}
    seed = _max_weight_basis(rows, p)
    if seed is None:
        return RankOneResult(False, reason="no subset of rows forms a basis")
    pool[seed] = vertex(seed)
    for _ in range(200):
        cert = _feasible_combination(pool, p, d.k)
        if cert is not None:
            return RankOneResult(True, certificate=cert)
        sep = _separating_hyperplane(pool, p, d.k)
        if sep is None:
            raise CapacityError("failed to separate or certify; pool degenerate")
        best = _max_weight_basis(rows, sep)
        if best is None or best in pool:
            return RankOneResult(
                False, reason="separating hyperplane excludes every basis"
            )
        value = float(sep[list(best)].sum())
        if value <= float(sep @ p) - 1e-9:
            return RankOneResult(
                False, reason="separating hyperplane excludes every basis"
            )
        pool[best] = vertex(best)
    raise CapacityError("column generation did not converge")


def _separating_hyperplane(pool: dict, p: np.ndarray, k: int):
    """max_y y.p - max_I y.p^(I) over |y|_inf <= 1 for the pooled vertices."""
    keys = list(pool)
    # variables: y (k), s;  maximize y.p - s  s.t.  y.v <= s for pooled v
    c = np.concatenate([-p, [1.0]])
    a_ub = np.column_stack([np.vstack([pool[key] for key in keys]), -np.ones(len(keys))])
    b_ub = np.zeros(len(keys))
    bounds = [(-1.0, 1.0)] * k + [(None, None)]
    res = linprog(c=c, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if not res.success:
        return None
    y = res.x[:k]
    if -res.fun <= 1e-9:  # no separation: p is in the pooled hull
        return None
    return y


# ---------------------------------------------------------------------------
# Optimal-weight envelope of the standard three-map datum and the EPI


def b0_constant(p, n: int = 1) -> float:
    """Closed-form constant of the standard datum (I 0), (0 I), (I I).

    (n/2) sum_i [(1-p_i) ln(1-p_i) - p_i ln p_i] for p in [0,1]^3 with
    sum p = 2; infinite otherwise.
    """
    p = np.asarray(p, dtype=float)
    if abs(p.sum() - 2.0) > 1e-9 or np.any(p < -1e-12) or np.any(p > 1 + 1e-12):
        return np.inf
    p = np.clip(p, 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p < 1.0, (1 - p) * np.log(np.where(p < 1, 1 - p, 1.0)), 0.0)
        terms -= np.where(p > 0.0, p * np.log(np.where(p > 0, p, 1.0)), 0.0)
    return 0.5 * n * float(terms.sum())


def phi_b0(s, n: int = 1) -> float:
    """Optimal-weight entropy envelope of the standard three-map datum.

    Under the strict triangle condition on e^{2 s_i / n} this is the
    quadratic-form expression; otherwise the infimum sits at a vertex and
    equals min of the pairwise sums.  Evaluated in log-space so that large
    s never overflow.
    """
    s = np.asarray(s, dtype=float).reshape(3)
    a = 2.0 * s / n
    shift = float(np.max(a))
    e = np.exp(a - shift)  # scaled exponentials, max entry 1
    t1 = e[1] + e[2] - e[0]
    t2 = e[0] + e[2] - e[1]
    t3 = e[0] + e[1] - e[2]
    if t1 > 0.0 and t2 > 0.0 and t3 > 0.0:
        q = t1 * e[0] + t2 * e[1] + t3 * e[2]
        return 0.5 * n * (np.log(q / 4.0) + 2.0 * shift)
    return float(min(s[0] + s[1], s[0] + s[2], s[1] + s[2]))


def phi_from_equivalence(base, a: np.ndarray, a_list, s) -> float:
    """Evaluate an envelope through the change of variables B_i = inv(A_i) B0_i A.

    ``base`` is the envelope of the reference datum; the transformed datum
    has phi(s) = base(s_i + ln|det A_i|) - ln|det A|.
    """
    a = as_square(a, "A")
    s = np.asarray(s, dtype=float)
    sign, ln_det_a = np.linalg.slogdet(a)
    if sign == 0:
        raise ValueError("A must be invertible")
    shifted = np.array(s, dtype=float)
    for i, ai in enumerate(a_list):
        ai = as_square(ai, f"A_{i + 1}")
        sgn_i, ln_det_i = np.linalg.slogdet(ai)
        if sgn_i == 0:
            raise ValueError(f"A_{i + 1} must be invertible")
        shifted[i] = s[i] + ln_det_i
    return float(base(shifted) - ln_det_a)


@dataclass(frozen=True)
class EPIInput:
    """Inputs of the generalized entropy-power bound.

    lam1, lam2 are |det A_i|^{1/m} for the combination map (A1 A2); s1, s2
    and s_y are the conditional entropies of X1, X2 and Y in nats.
    """

    lam1: float
    lam2: float
    s1: float
    s2: float
    s_y: float
    m: int

    def __post_init__(self):
        if self.lam1 <= 0 or self.lam2 <= 0:
            raise ValueError("lambda coefficients must be positive")
        if self.m < 1:
            raise ValueError("mode count must be positive")


@dataclass(frozen=True)
class EPIBound:
    value: float  # upper bound on S(X1 X2 | M)
    triangle_branch: bool


def epi_bound(inp: EPIInput) -> EPIBound:
    """Upper bound on S(X1 X2 | M) from the generalized entropy-power result.

    When the three quantities lam1 e^{s1/m}, lam2 e^{s2/m}, e^{s_y/m}
    satisfy the strict triangle inequalities, the quadratic-form bound is
    solved for S; otherwise the bound is the minimum of the pairwise sums
    with determinant offsets.  All exponentials are evaluated in log-space.
    """
    m = inp.m
    a = np.array(
        [
            np.log(inp.lam1) + inp.s1 / m,
            np.log(inp.lam2) + inp.s2 / m,
            inp.s_y / m,
        ]
    )
    shift = float(np.max(a))
    u = np.exp(a - shift)
    t1 = u[1] + u[2] - u[0]
    t2 = u[0] + u[2] - u[1]
    t3 = u[0] + u[1] - u[2]
    if t1 > 0.0 and t2 > 0.0 and t3 > 0.0:
        q = t1 * u[0] + t2 * u[1] + t3 * u[2]
        value = m * (np.log(q / 4.0) + 2.0 * shift - np.log(inp.lam1 * inp.lam2))
        return EPIBound(float(value), True)
    value = min(
        inp.s1 + inp.s2,
        inp.s1 + inp.s_y - m * np.log(inp.lam2),
        inp.s2 + inp.s_y - m * np.log(inp.lam1),
    )
    return EPIBound(float(value), False)


# ---------------------------------------------------------------------------
# Entanglement production


@dataclass(frozen=True)
class EntanglementRate:
    """Linear growth rate of ln(det S(t)_11 det S(t)_22) under exp(t H)."""

    lam: float
    t_grid: np.ndarray
    ln_f: np.ndarray
    r_squared: float
    t_max_used: float
    truncated: bool
    asymptotic: bool


def ln_block_det_product(hmat: QuadHamiltonian, t: float) -> float:
    """ln(det S(t)_11 det S(t)_22) for S(t) = exp(t H)."""
    s = scipy.linalg.expm(t * hmat.h)
    k = 2 * hmat.m1
    sign1, ld1 = np.linalg.slogdet(s[:k, :k])
    sign2, ld2 = np.linalg.slogdet(s[k:, k:])
    if sign1 <= 0 or sign2 <= 0:
        raise ValueError("diagonal blocks of S(t) are not orientation-positive")
    return float(ld1 + ld2)


def entanglement_rate(
    hmat: QuadHamiltonian,
    t_max: float = 50.0,
    samples: int = 60,
    min_r_squared: float = 0.999,
) -> EntanglementRate:
    """Slope of ln f(t) = ln(det S(t)_11 det S(t)_22) over the last decade.

    Requires a symmetric generator (for non-symmetric H linear growth is
    not established; compute ln f directly instead).  t_max is reduced
    automatically when exp(t H) would overflow, and the result is flagged.
    """
    if not hmat.symmetric:
        raise ValueError(
            "entanglement-rate extraction needs a symmetric generator; "
            "for non-symmetric H use ln_block_det_product directly"
        )
    if t_max <= 0 or samples < 8:
        raise ValueError("need t_max > 0 and at least 8 samples")
    eigmax = float(np.max(np.abs(np.linalg.eigvalsh(hmat.h))))
    truncated = False
    if eigmax > 0:
        safe = 600.0 / eigmax  # keep exp(t |H|) below overflow
        if t_max > safe:
            t_max = safe
            truncated = True
    t_grid = np.geomspace(t_max * 1e-3, t_max, samples)
    ln_f = np.array([ln_block_det_product(hmat, t) for t in t_grid])

    tail = t_grid >= t_max / 10.0
    x = t_grid[tail]
    y = ln_f[tail]
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot < 1e-18 else 1.0 - ss_res / ss_tot
    return EntanglementRate(
        lam=float(slope),
        t_grid=t_grid,
        ln_f=ln_f,
        r_squared=float(r2),
        t_max_used=float(t_max),
        truncated=truncated,
        asymptotic=bool(r2 >= min_r_squared),
    )


# ---------------------------------------------------------------------------
# Correlation lower bound


@dataclass(frozen=True)
class CorrelationBound:
    lhs: float
    rhs: float
    margin: float
    constant: BLConstant
    pure_input: bool


def conditional_mutual_information(
    joint: GaussianJoint, m1: int, m2: int
) -> float:
    """I(X1; X2 | M) = S(X1|M) + S(X2|M) - S(X1 X2|M) for a split X block."""
    if joint.nx != 2 * (m1 + m2):
        raise ValueError("X block must have 2(m1+m2) rows")
    j1 = restrict_x(joint, range(2 * m1))
    j2 = restrict_x(joint, range(2 * m1, 2 * (m1 + m2)))
    return (
        conditional_entropy(j1) + conditional_entropy(j2) - conditional_entropy(joint)
    )


def correlation_lower_bound(
    s: np.ndarray,
    joint: GaussianJoint,
    m1: int,
    m2: int,
    f_value: float | None = None,
    **solver_kwargs,
) -> CorrelationBound:
    """Check the correlation bound for a symplectic redefinition of X1 X2.

    lhs is the average of I(X1;X2|M) before and after conjugating the X
    block by S; rhs is -f for the four-map datum built from S with weights
    1/2.  For pure global states with trivial M the mutual informations are
    twice the entanglement entropies; other inputs are flagged as bound
    ingredients only.
    """
    s = as_square(s, "S")
    if not is_symplectic(s):
        raise ValueError("S must be symplectic")
    if joint.nx != 2 * (m1 + m2):
        raise ValueError("X block must have 2(m1+m2) rows")

    if f_value is None:
        constant = bl_constant(correlation_datum(s, m1, m2), **solver_kwargs)
        if not constant.finite:
            raise ValueError(f"constant not resolved finite: {constant.status}")
        f_value = constant.value
    else:
        constant = BLConstant("finite", value=float(f_value), reason="caller-supplied")

    rotated = embed_symplectic(s, joint.nm)
    conjugated = GaussianJoint(
        rotated @ joint.gamma @ rotated.T, joint.nx, joint.kind_x, tol=joint.tol
    )
    lhs = 0.5 * conditional_mutual_information(joint, m1, m2)
    lhs += 0.5 * conditional_mutual_information(conjugated, m1, m2)
    rhs = -f_value

    pure = False
    if joint.trivial_memory:
        try:
            pure = conditional_entropy(joint) <= 1e-7
        except Exception:
            pure = False
    return CorrelationBound(
        lhs=float(lhs),
        rhs=float(rhs),
        margin=float(lhs - rhs),
        constant=constant,
        pure_input=pure,
    )


def symmetric_symplectic_constant(s: np.ndarray, m1: int, m2: int) -> float:
    """Closed form -1/2 ln(det S11 det S22) for symmetric PD symplectic S."""
    s = check_symmetric(s, "S")
    if not is_symplectic(s):
        raise ValueError("S must be symplectic")
    k = 2 * m1
    return -0.5 * (logdet_pd(s[:k, :k], "S11") + logdet_pd(s[k:, k:], "S22"))


__all__ = [
    "QuadHamiltonian",
    "two_mode_squeezer",
    "RankOneResult",
    "rank_one_finiteness",
    "b0_constant",
    "phi_b0",
    "phi_from_equivalence",
    "EPIInput",
    "EPIBound",
    "epi_bound",
    "EntanglementRate",
    "ln_block_det_product",
    "entanglement_rate",
    "CorrelationBound",
    "conditional_mutual_information",
    "correlation_lower_bound",
    "symmetric_symplectic_constant",
]
