"""Brascamp-Lieb data: validation, objective, stationarity, finiteness probes.

A datum is an ordered family of full-row-rank matrices ``B_i`` acting on
the ``2m`` quadratures of a bosonic system, together with nonnegative
weights ``p``.  The scale-invariant objective

    F(alpha) = (1/2) ln det(alpha) - sum_i (p_i/2) ln det(B_i alpha B_i^T)

is maximized over positive-definite ``alpha``; its supremum is the
Brascamp-Lieb constant, and maximizers are exactly the solutions of the
stationarity condition  sum_i p_i B_i^T (B_i alpha B_i^T)^{-1} B_i =
inv(alpha).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from ._linalg import (
    check_symmetric,
    inv_pd,
    logdet_pd,
    numerical_rank,
    pushforward_gram,
    symmetrize,
)
from .errors import KindMismatchError, RankError
from .symplectic import MapKind, classify_map


@dataclass(frozen=True)
class BLMap:
    """One map of a datum: an ``n_i x 2m`` full-row-rank matrix plus its kind.

    ``kind`` is QUANTUM or CLASSICAL for maps with symplectic structure and
    None for generic full-rank maps (the classical Brascamp-Lieb theory
    does not need a kind; entropy-inequality verification does).
    """

    matrix: np.ndarray
    kind: MapKind | None = None

    def __post_init__(self):
        b = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        object.__setattr__(self, "matrix", b)
        if b.shape[1] % 2:
            raise ValueError("ambient dimension must be even (2m quadratures)")
        derived = classify_map(b, b.shape[1] // 2)  # raises RankError if deficient
        if self.kind is not None and derived is not self.kind:
            raise KindMismatchError(
                f"declared kind {self.kind.value} but matrix structure is "
                f"{derived.value if derived else 'neither quantum nor classical'}"
            )

    @classmethod
    def from_matrix(cls, b: np.ndarray) -> "BLMap":
        """Build a map, deriving its kind from the matrix structure."""
        b = np.atleast_2d(np.asarray(b, dtype=float))
        return cls(b, classify_map(b, b.shape[1] // 2))

    @property
    def n_out(self) -> int:
        return self.matrix.shape[0]

    @property
    def ambient(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True)
class BLDatum:
    """Ordered maps B_1..B_K over 2m quadratures with weights p >= 0."""

    m: int
    maps: tuple[BLMap, ...]
    p: np.ndarray
    labels: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("mode count must be positive")
        if not self.maps:
            raise ValueError("a datum needs at least one map")
        maps = tuple(
            bm if isinstance(bm, BLMap) else BLMap.from_matrix(bm) for bm in self.maps
        )
        object.__setattr__(self, "maps", maps)
        for bm in maps:
            if bm.ambient != 2 * self.m:
                raise ValueError("all maps must share the ambient dimension 2m")
        p = np.asarray(self.p, dtype=float).reshape(-1)
        if p.shape[0] != len(maps):
            raise ValueError("weight vector length must match the number of maps")
        if np.any(p < 0):
            raise ValueError("weights must be nonnegative")
        object.__setattr__(self, "p", p)
        if self.labels is not None and len(self.labels) != len(maps):
            raise ValueError("labels length must match the number of maps")

    @property
    def k(self) -> int:
        return len(self.maps)

    @property
    def ambient(self) -> int:
        return 2 * self.m

    @property
    def output_dims(self) -> np.ndarray:
        return np.array([bm.n_out for bm in self.maps])

    def is_quantum_datum(self) -> bool:
        return all(bm.kind is not None for bm in self.maps)


def scaling_condition(d: BLDatum, tol: float = 1e-9) -> bool:
    """True iff 2m = sum_i p_i n_i (necessary for a finite constant)."""
    return abs(2 * d.m - float(d.p @ d.output_dims)) <= tol


def objective(d: BLDatum, alpha: np.ndarray) -> float:
    """F(alpha) in nats; raises DegeneratePushforwardError on singular B a B^T."""
    alpha = check_symmetric(alpha, "alpha")
    if alpha.shape[0] != d.ambient:
        raise ValueError("alpha dimension must equal 2m")
    val = 0.5 * logdet_pd(alpha, "alpha")
    for bm, w in zip(d.maps, d.p):
        g = pushforward_gram(bm.matrix, alpha)
        val -= 0.5 * w * logdet_pd(g, "pushforward")
    return val


def stationarity_map(d: BLDatum, alpha: np.ndarray) -> np.ndarray:
    """M(alpha) = sum_i p_i B_i^T (B_i alpha B_i^T)^{-1} B_i."""
    out = np.zeros((d.ambient, d.ambient))
    for bm, w in zip(d.maps, d.p):
        if w == 0.0:
            continue
        g = pushforward_gram(bm.matrix, alpha)
        out += w * bm.matrix.T @ inv_pd(g, "pushforward") @ bm.matrix
    return symmetrize(out)


def stationarity_residual(d: BLDatum, alpha: np.ndarray) -> float:
    """Frobenius norm of M(alpha) - inv(alpha); zero exactly at maximizers."""
    alpha = check_symmetric(alpha, "alpha")
    return float(np.linalg.norm(stationarity_map(d, alpha) - inv_pd(alpha, "alpha")))


# ---------------------------------------------------------------------------
# Subcriticality probe


@dataclass(frozen=True)
class ProbeResult:
    """Outcome of the randomized subcriticality search.

    ``violated`` means a subspace V with dim V > sum_i p_i dim(B_i V) was
    found and is reported through ``witness`` (an orthonormal frame whose
    columns span V).  "No violation found" is heuristic evidence only,
    never a finiteness certificate.
    """

    violated: bool
    witness: np.ndarray | None = None
    dim: int | None = None
    weighted_rank: float | None = None
    trials: int = 0


def _check_frame(d: BLDatum, frame: np.ndarray, slack: float = 1e-9):
    dim = frame.shape[1]
    weighted = 0.0
    for bm, w in zip(d.maps, d.p):
        weighted += w * numerical_rank(bm.matrix @ frame)
    return dim > weighted + slack, weighted


def _structured_frames(d: BLDatum):
    n = d.ambient
    # kernels of single maps and of stacked pairs / the full stack
    subsets = [(i,) for i in range(d.k)]
    subsets += list(itertools.combinations(range(d.k), 2))
    if d.k > 2:
        subsets.append(tuple(range(d.k)))
    for subset in subsets:
        stacked = np.vstack([d.maps[i].matrix for i in subset])
        kernel = scipy.linalg.null_space(stacked)
        if kernel.shape[1]:
            yield kernel
    # coordinate subspaces: all of them for small ambient dimension, else axes
    if n <= 10:
        eye = np.eye(n)
        for r in range(1, n):
            for idx in itertools.combinations(range(n), r):
                yield eye[:, list(idx)]
    else:
        eye = np.eye(n)
        for i in range(n):
            yield eye[:, [i]]


def subcriticality_probe(
    d: BLDatum, trials: int = 200, rng: np.random.Generator | int | None = 0
) -> ProbeResult:
    """Search for a subspace violating dim V <= sum_i p_i dim(B_i V).

    Structured candidates (map kernels and their intersections, coordinate
    subspaces) are checked first, then ``trials`` random frames with
    uniformly random dimension.  A refuter, not a certifier.
    """
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    n = d.ambient
    tried = 0
    for frame in _structured_frames(d):
        tried += 1
        bad, weighted = _check_frame(d, frame)
        if bad:
            return ProbeResult(True, frame, frame.shape[1], weighted, tried)
    for _ in range(trials):
        tried += 1
        dim = int(rng.integers(1, n)) if n > 1 else 1
        raw = rng.standard_normal((n, dim))
        frame, _ = np.linalg.qr(raw)
        bad, weighted = _check_frame(d, frame)
        if bad:
            return ProbeResult(True, frame, dim, weighted, tried)
    return ProbeResult(False, trials=tried)


# ---------------------------------------------------------------------------
# Regularization


def regularize(d: BLDatum, eps: float) -> BLDatum:
    """Blend the datum with the canonical auxiliary datum of weight eps.

    The auxiliary maps are the 2m coordinate rows plus the all-ones row,
    each with weight 2m/(2m+1); its only critical subspaces are the whole
    space and {0}, so for any eps in (0, 1] every proper subspace of the
    blended datum is strictly subcritical wherever the original one was
    subcritical.  Weights become ((1-eps) p, eps p').  The scaling
    condition is preserved.
    """
    if not 0.0 < eps <= 1.0:
        raise ValueError("eps must lie in (0, 1]")
    n = d.ambient
    rows = [np.eye(n)[i : i + 1, :] for i in range(n)]
    rows.append(np.ones((1, n)))
    aux = tuple(BLMap(r, MapKind.CLASSICAL) for r in rows)
    aux_w = np.full(n + 1, n / (n + 1))
    return BLDatum(
        m=d.m,
        maps=d.maps + aux,
        p=np.concatenate([(1.0 - eps) * d.p, eps * aux_w]),
    )


# ---------------------------------------------------------------------------
# Datum factories for the standard constructions


def identity_datum(m: int) -> BLDatum:
    """K = 1 with B = I_2m and unit weight; the constant is 0."""
    return BLDatum(m, (BLMap(np.eye(2 * m), MapKind.QUANTUM),), np.array([1.0]))


def eur_datum(m: int) -> BLDatum:
    """Position/momentum entropic-uncertainty datum: odd rows, even rows, p=(1,1)."""
    eye = np.eye(2 * m)
    q_rows = eye[0::2, :]
    p_rows = eye[1::2, :]
    return BLDatum(
        m,
        (BLMap(q_rows, MapKind.CLASSICAL), BLMap(p_rows, MapKind.CLASSICAL)),
        np.array([1.0, 1.0]),
        labels=("Q", "P"),
    )


def b0_datum(p, n: int = 1) -> BLDatum:
    """The standard three-map datum (I 0), (0 I), (I I) over R^{2n}.

    Finite constant iff p in [0,1]^3 with p1+p2+p3 = 2.  For n = 1 the maps
    are rank-one rows, hence classical kind.
    """
    eye = np.eye(n)
    zero = np.zeros((n, n))
    mats = (
        np.hstack([eye, zero]),
        np.hstack([zero, eye]),
        np.hstack([eye, eye]),
    )
    maps = tuple(BLMap.from_matrix(b) for b in mats)
    return BLDatum(n, maps, np.asarray(p, dtype=float), labels=("B1", "B2", "B3"))


def epi_datum(a1: np.ndarray, a2: np.ndarray, m: int) -> BLDatum:
    """Entropy-power datum: X1, X2 and the combination (A1 A2), p free."""
    a1 = np.asarray(a1, dtype=float)
    a2 = np.asarray(a2, dtype=float)
    if a1.shape != (2 * m, 2 * m) or a2.shape != (2 * m, 2 * m):
        raise ValueError("A1, A2 must be 2m x 2m")
    eye = np.eye(2 * m)
    zero = np.zeros((2 * m, 2 * m))
    b1 = np.hstack([eye, zero])
    b2 = np.hstack([zero, eye])
    b3 = np.hstack([a1, a2])
    return BLDatum(
        2 * m,
        tuple(BLMap.from_matrix(b) for b in (b1, b2, b3)),
        np.array([1.0, 1.0, 1.0]),
        labels=("X1", "X2", "Y"),
    )


def correlation_datum(s: np.ndarray, m1: int, m2: int) -> BLDatum:
    """Coordinate blocks plus the row blocks of a symplectic S, p = (1/2,)*4."""
    s = np.asarray(s, dtype=float)
    n = 2 * (m1 + m2)
    if s.shape != (n, n):
        raise ValueError("S must be 2(m1+m2) square")
    eye1 = np.eye(2 * m1)
    eye2 = np.eye(2 * m2)
    b1 = np.hstack([eye1, np.zeros((2 * m1, 2 * m2))])
    b2 = np.hstack([np.zeros((2 * m2, 2 * m1)), eye2])
    b1p = s[: 2 * m1, :]
    b2p = s[2 * m1 :, :]
    return BLDatum(
        m1 + m2,
        tuple(BLMap.from_matrix(b) for b in (b1, b2, b1p, b2p)),
        np.full(4, 0.5),
        labels=("X1", "X2", "X1'", "X2'"),
    )


__all__ = [
    "BLMap",
    "BLDatum",
    "scaling_condition",
    "objective",
    "stationarity_map",
    "stationarity_residual",
    "ProbeResult",
    "subcriticality_probe",
    "regularize",
    "identity_datum",
    "eur_datum",
    "b0_datum",
    "epi_datum",
    "correlation_datum",
]
