"""Dense transition-matrix types and structural/spectral chain operations.

State spaces are {0, ..., d-1}. A Markov chain is identified with its dense
row-stochastic transition matrix. All operations are pure functions over
immutable inputs and are safe to call concurrently.

Conventions adopted here and relied on elsewhere:

* The spectral gap is 1 - lambda_2 where lambda_2 is the second largest
  *signed* eigenvalue (not the second largest modulus). For strongly
  periodic chains lambda_2 can be negative, so the gap may exceed 1;
  aperiodicity is restored via lazy_version when a chain is near-periodic.
* Irreducibility and reversibility are decided with explicit numerical
  tolerances since exact set membership is meaningless in floating point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (
    AlphaOutOfRange,
    EmptySubset,
    MalformedDistribution,
    MalformedMatrix,
    NegativeEntry,
    NotIrreducible,
    NotReversible,
    ShapeMismatch,
)

ROW_SUM_TOL = 1e-10
SUPPORT_TOL = 1e-12
DETAILED_BALANCE_TOL = 1e-8


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TransitionMatrix:
    """Row-stochastic d x d matrix over the state space {0, ..., d-1}.

    Entries must lie in [0, 1] and each row must sum to 1 within 1e-10.
    """

    entries: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise MalformedMatrix(f"expected a square matrix, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise MalformedMatrix("non-finite entries")
        if arr.min() < -ROW_SUM_TOL or arr.max() > 1.0 + ROW_SUM_TOL:
            raise MalformedMatrix("entries must lie in [0, 1]")
        rows = arr.sum(axis=1)
        bad = np.abs(rows - 1.0).max()
        if bad > ROW_SUM_TOL:
            raise MalformedMatrix(f"row sums deviate from 1 by {bad:.3e}")
        object.__setattr__(self, "entries", _frozen(np.clip(arr, 0.0, 1.0)))

    @property
    def d(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def from_rows(cls, rows) -> "TransitionMatrix":
        return cls(np.asarray(rows, dtype=float))


@dataclass(frozen=True)
class ProbVector:
    """Probability distribution over {0, ..., d-1}."""

    entries: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=float)
        if arr.ndim != 1 or arr.shape[0] < 1:
            raise MalformedDistribution(f"expected a vector, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)) or arr.min() < -ROW_SUM_TOL:
            raise MalformedDistribution("entries must be nonnegative")
        if abs(arr.sum() - 1.0) > ROW_SUM_TOL:
            raise MalformedDistribution(f"mass {arr.sum()!r} != 1")
        object.__setattr__(self, "entries", _frozen(np.clip(arr, 0.0, 1.0)))

    @property
    def d(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class EdgeMeasure:
    """Joint distribution diag(nu) P over ordered state pairs; mass 1.

    When nu is the stationary distribution of a reversible P this is the
    edge measure Q, which is then symmetric.
    """

    entries: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise MalformedMatrix(f"expected a square matrix, got shape {arr.shape}")
        if arr.min() < -ROW_SUM_TOL:
            raise MalformedMatrix("negative mass")
        if abs(arr.sum() - 1.0) > ROW_SUM_TOL:
            raise MalformedMatrix(f"total mass {arr.sum()!r} != 1")
        object.__setattr__(self, "entries", _frozen(np.clip(arr, 0.0, None)))

    @property
    def d(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class ChainClass:
    """Structural classification flags. ergodic implies irreducible."""

    irreducible: bool
    reversible: bool
    ergodic: bool

    def __post_init__(self):
        if self.ergodic and not self.irreducible:
            raise ValueError("ergodic requires irreducible")


def as_transition_matrix(P) -> TransitionMatrix:
    """Coerce an array-like to TransitionMatrix (no-op if already one)."""
    if isinstance(P, TransitionMatrix):
        return P
    return TransitionMatrix(np.asarray(P, dtype=float))


def as_prob_vector(p) -> ProbVector:
    if isinstance(p, ProbVector):
        return p
    return ProbVector(np.asarray(p, dtype=float))


def _support(P: np.ndarray) -> np.ndarray:
    return P > SUPPORT_TOL


def _is_strongly_connected(P: np.ndarray) -> bool:
    n, _ = connected_components(csr_matrix(_support(P)), directed=True, connection="strong")
    return n == 1


def _period(P: np.ndarray) -> int:
    """Period of a strongly connected support graph (gcd of cycle lengths).

    BFS from state 0 assigns levels; the gcd over edges (u, v) of
    level[u] + 1 - level[v] is the period.
    """
    from math import gcd

    supp = _support(P)
    d = P.shape[0]
    level = np.full(d, -1, dtype=int)
    level[0] = 0
    queue = [0]
    edges = []
    while queue:
        u = queue.pop()
        for v in np.flatnonzero(supp[u]):
            if level[v] < 0:
                level[v] = level[u] + 1
                queue.append(int(v))
            edges.append((u, int(v)))
    g = 0
    for u, v in edges:
        g = gcd(g, level[u] + 1 - level[v])
    return abs(g) if g != 0 else 1


def validate(P) -> ChainClass:
    """Classify a chain: irreducible, reversible, ergodic.

    Irreducibility is reachability closure of the support graph (entries
    above 1e-12 count as edges). Reversibility is the detailed-balance check
    pi(i) P(i,j) = pi(j) P(j,i) within 1e-8, which requires irreducibility.
    Ergodic means irreducible with aperiodic support graph.
    """
    P = as_transition_matrix(P)
    arr = P.entries
    irreducible = _is_strongly_connected(arr)
    reversible = False
    ergodic = False
    if irreducible:
        pi = stationary_distribution(P).entries
        Q = pi[:, None] * arr
        reversible = bool(np.abs(Q - Q.T).max() <= DETAILED_BALANCE_TOL)
        ergodic = _period(arr) == 1
    return ChainClass(irreducible=irreducible, reversible=reversible, ergodic=ergodic)


def _require_irreducible(P: TransitionMatrix) -> None:
    if not _is_strongly_connected(P.entries):
        raise NotIrreducible("chain is not irreducible")


def stationary_distribution(P) -> ProbVector:
    """Stationary distribution pi of an irreducible chain, pi P = pi.

    Solved as a bordered linear system (one balance equation replaced by the
    normalization sum(pi) = 1) rather than by power iteration, which does not
    converge for periodic chains. Falls back to an SVD null-space solve if
    the direct solve is poorly conditioned. The result satisfies
    ||pi P - pi||_inf <= 1e-10 and is entrywise positive.
    """
    P = as_transition_matrix(P)
    _require_irreducible(P)
    arr = P.entries
    d = P.d
    A = arr.T - np.eye(d)
    A[-1, :] = 1.0
    b = np.zeros(d)
    b[-1] = 1.0
    try:
        pi = np.linalg.solve(A, b)
    except np.linalg.LinAlgError:
        pi = np.full(d, np.nan)
    if not np.all(np.isfinite(pi)) or pi.min() <= 0 or np.abs(pi @ arr - pi).max() > 1e-11:
        # Null space of (P^T - I) via SVD; right singular vector of the
        # smallest singular value, normalized to positive total mass.
        _, _, vt = np.linalg.svd(arr.T - np.eye(d))
        pi = vt[-1]
        pi = pi / pi.sum()
    pi = pi / pi.sum()
    residual = np.abs(pi @ arr - pi).max()
    if residual > 1e-10 or pi.min() <= 0:
        raise NotIrreducible(f"stationary solve failed (residual {residual:.3e})")
    return ProbVector(pi)


def edge_measure(P, nu) -> EdgeMeasure:
    """Joint distribution diag(nu) P over ordered pairs."""
    P = as_transition_matrix(P)
    nu = as_prob_vector(nu)
    if nu.d != P.d:
        raise ShapeMismatch(f"vector of length {nu.d} against a {P.d}-state chain")
    return EdgeMeasure(nu.entries[:, None] * P.entries)


def time_reversal(P) -> TransitionMatrix:
    """Time reversal diag(pi)^-1 P^T diag(pi); an involution, and equal to P
    exactly when P is reversible."""
    P = as_transition_matrix(P)
    pi = stationary_distribution(P).entries
    # rev[i, j] = pi[j] P[j, i] / pi[i]
    rev = pi[None, :] * P.entries.T / pi[:, None]
    return TransitionMatrix(rev)


def multiplicative_reversibilization(P) -> TransitionMatrix:
    """P* P: reversible with the same stationary distribution as P."""
    P = as_transition_matrix(P)
    rev = time_reversal(P)
    return TransitionMatrix(rev.entries @ P.entries)


def lazy_version(P, alpha: float) -> TransitionMatrix:
    """alpha I + (1 - alpha) P. Keeps the stationary distribution; ergodic
    for any irreducible P when alpha > 0."""
    P = as_transition_matrix(P)
    if not (0.0 <= alpha <= 1.0):
        raise AlphaOutOfRange(f"alpha={alpha}")
    return TransitionMatrix(alpha * np.eye(P.d) + (1.0 - alpha) * P.entries)


def convex_combination(P, Pbar, alpha: float) -> TransitionMatrix:
    """alpha P + (1 - alpha) Pbar, entrywise."""
    P = as_transition_matrix(P)
    Pbar = as_transition_matrix(Pbar)
    if P.d != Pbar.d:
        raise ShapeMismatch(f"{P.d} != {Pbar.d}")
    if not (0.0 <= alpha <= 1.0):
        raise AlphaOutOfRange(f"alpha={alpha}")
    return TransitionMatrix(alpha * P.entries + (1.0 - alpha) * Pbar.entries)


def censor(P, S) -> TransitionMatrix:
    """Watched chain on S: transitions recorded only when the chain is in S.

    Computed in closed form as P_S + P_{S,S^c} (I - P_{S^c})^{-1} P_{S^c,S},
    i.e. the geometric series over excursions through the complement summed
    by one linear solve. I - P_{S^c} is invertible because P is irreducible
    and S is nonempty. The result is row-stochastic, has stationary
    distribution pi|_S / pi(S), and is reversible whenever P is.
    """
    P = as_transition_matrix(P)
    S = _as_subset(S, P.d)
    if len(S) == 0:
        raise EmptySubset("S must be nonempty")
    _require_irreducible(P)
    if len(S) == P.d:
        return P
    comp = np.setdiff1d(np.arange(P.d), S)
    arr = P.entries
    M = np.eye(len(comp)) - arr[np.ix_(comp, comp)]
    X = np.linalg.solve(M, arr[np.ix_(comp, S)])
    watched = arr[np.ix_(S, S)] + arr[np.ix_(S, comp)] @ X
    return _renormalized(watched, tol=1e-9)


def matrix_power(P, k: int) -> TransitionMatrix:
    """P^k by repeated squaring."""
    P = as_transition_matrix(P)
    if k < 1:
        raise AlphaOutOfRange(f"k={k} must be >= 1")
    return _renormalized(np.linalg.matrix_power(P.entries, k), tol=1e-9)


def _renormalized(arr: np.ndarray, tol: float) -> TransitionMatrix:
    """Clean float drift: clip tiny negatives and re-sum rows to exactly 1."""
    arr = np.asarray(arr, dtype=float)
    rows = arr.sum(axis=1)
    if np.abs(rows - 1.0).max() > tol or arr.min() < -tol:
        raise MalformedMatrix(f"row drift exceeds {tol}")
    arr = np.clip(arr, 0.0, None)
    return TransitionMatrix(arr / arr.sum(axis=1, keepdims=True))


def _as_subset(S, d: int) -> np.ndarray:
    """Canonicalize a state subset: sorted unique int array within range."""
    idx = np.unique(np.asarray(list(S), dtype=int)) if not isinstance(S, np.ndarray) else np.unique(S.astype(int))
    if len(idx) and (idx[0] < 0 or idx[-1] >= d):
        raise ShapeMismatch(f"subset {idx.tolist()} out of range for d={d}")
    return idx


def spectral_gap(P) -> float:
    """1 - lambda_2 for an irreducible reversible chain.

    The chain is symmetrized as D^{1/2} P D^{-1/2} with D = diag(pi) and the
    full spectrum computed. lambda_2 is the second largest signed eigenvalue,
    so the gap exceeds 1 for chains with negative eigenvalues (e.g. the
    2-cycle has spectrum {1, -1} and gap 2).
    """
    P = as_transition_matrix(P)
    pi = stationary_distribution(P).entries
    Q = pi[:, None] * P.entries
    if np.abs(Q - Q.T).max() > DETAILED_BALANCE_TOL:
        raise NotReversible("detailed balance violated")
    if P.d == 1:
        return 1.0
    root = np.sqrt(pi)
    sym = root[:, None] * P.entries / root[None, :]
    w = np.linalg.eigvalsh((sym + sym.T) / 2.0)
    return float(1.0 - w[-2])


def spectral_radius_nonneg(M, max_iter: int = 100_000) -> float:
    """Perron root of an entrywise nonnegative matrix, accurate to 1e-10.

    Power iteration from a positive start vector, with a fallback to the full
    eigendecomposition when the iteration stalls (periodic or reducible
    matrices stall routinely; the fallback is mandatory for Hadamard-product
    matrices, which can be reducible even for irreducible factors).
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got {M.shape}")
    if M.min() < -1e-12:
        raise NegativeEntry(f"min entry {M.min():.3e}")
    M = np.clip(M, 0.0, None)
    if not M.any():
        return 0.0
    d = M.shape[0]
    x = np.full(d, 1.0 / np.sqrt(d))
    lam = 0.0
    best_res = np.inf
    stalled_since = 0
    for it in range(max_iter):
        y = M @ x
        ny = float(np.linalg.norm(y))
        if ny == 0.0:
            return 0.0
        x_new = y / ny
        lam = float(x_new @ (M @ x_new))
        res = float(np.linalg.norm(M @ x_new - lam * x_new))
        x = x_new
        if res <= 1e-12 * max(1.0, abs(lam)):
            return float(abs(lam))
        if res < best_res * 0.99:
            best_res = res
            stalled_since = it
        elif it - stalled_since > 500:
            break
    return float(np.max(np.abs(np.linalg.eigvals(M))))
