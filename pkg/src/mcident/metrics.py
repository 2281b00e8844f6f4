"""Distances between distributions and chains, cut ratios, induced laws.

Includes the brute-force conductance oracles. They are public operations,
not test helpers, so the CLI can certify partitions; each one is guarded by
d <= 20 since enumeration is 2^d.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .chain_core import (
    DETAILED_BALANCE_TOL,
    as_prob_vector,
    as_transition_matrix,
    spectral_radius_nonneg,
    stationary_distribution,
    _as_subset,
)
from .errors import (
    BadSubset,
    NotReversible,
    ShapeMismatch,
    TooLarge,
    ZeroDenominator,
    ZeroMassSubset,
)

#: Alphabet symbol collecting all transitions that leave a component.
INFINITY = "inf"

ENUMERATION_LIMIT = 20


def hellinger(p, q) -> float:
    """Hellinger distance.

    The squared distance is computed as 1 - sum(sqrt(p q)), which is stable
    near 0 (the half-sum-of-squares form loses precision there).
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ShapeMismatch(f"{p.shape} vs {q.shape}")
    h2 = 1.0 - float(np.sqrt(p * q).sum())
    return float(np.sqrt(max(h2, 0.0)))


def total_variation(p, q) -> float:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ShapeMismatch(f"{p.shape} vs {q.shape}")
    return float(0.5 * np.abs(p - q).sum())


def chain_distance(P, Pbar) -> float:
    """Spectral geometric-mean distance 1 - rho(sqrt(P o Pbar)).

    The Hadamard square-root matrix can be reducible even when both factors
    are irreducible, so the spectral radius routine's eigendecomposition
    fallback is load-bearing here.
    """
    P = as_transition_matrix(P)
    Pbar = as_transition_matrix(Pbar)
    if P.d != Pbar.d:
        raise ShapeMismatch(f"{P.d} != {Pbar.d}")
    rho = spectral_radius_nonneg(np.sqrt(P.entries * Pbar.entries))
    val = min(max(1.0 - rho, 0.0), 1.0)
    return 0.0 if val < 1e-12 else float(val)


def ratio_distance(pi, pibar) -> float:
    """max_i |pi(i)/pibar(i) - 1|; pibar must be entrywise positive."""
    pi = as_prob_vector(pi).entries
    pibar_arr = as_prob_vector(pibar).entries
    if pi.shape != pibar_arr.shape:
        raise ShapeMismatch(f"{pi.shape} vs {pibar_arr.shape}")
    if pibar_arr.min() <= 0.0:
        raise ZeroDenominator("reference distribution has a zero entry")
    return float(np.abs(pi / pibar_arr - 1.0).max())


@dataclass(frozen=True)
class InducedDistribution:
    """Distribution over S x S plus the symbol INFINITY.

    mass[(i, j)] = nu(i) P(i, j) / nu(S) for i, j in S; infinity_mass picks
    up everything that leaves S. Stored as a dict keyed by pairs because
    components are typically small subsets of a larger chain.
    """

    S: tuple
    mass: dict
    infinity_mass: float

    def __post_init__(self):
        total = sum(self.mass.values()) + self.infinity_mass
        if abs(total - 1.0) > 1e-10:
            raise ZeroMassSubset(f"total mass {total!r} != 1")

    def alphabet(self) -> list:
        """Canonical symbol order: row-major pairs of S, then INFINITY."""
        return [(i, j) for i in self.S for j in self.S] + [INFINITY]

    def as_mapping(self) -> dict:
        """Full symbol -> probability mapping over the alphabet."""
        out = {(i, j): self.mass.get((i, j), 0.0) for i in self.S for j in self.S}
        out[INFINITY] = self.infinity_mass
        return out

    def as_array(self) -> np.ndarray:
        """Probabilities in alphabet() order."""
        m = self.as_mapping()
        return np.array([m[a] for a in self.alphabet()])


def induced_distribution(P, nu, S) -> InducedDistribution:
    """Law of one transition anchored in S: pairs within S, else INFINITY."""
    P = as_transition_matrix(P)
    nu = as_prob_vector(nu)
    if nu.d != P.d:
        raise ShapeMismatch(f"{nu.d} != {P.d}")
    idx = _as_subset(S, P.d)
    if len(idx) == 0:
        raise ZeroMassSubset("empty subset")
    nu_S = float(nu.entries[idx].sum())
    if nu_S <= 0.0:
        raise ZeroMassSubset("nu(S) = 0")
    block = nu.entries[idx, None] * P.entries[np.ix_(idx, idx)] / nu_S
    S_t = tuple(int(i) for i in idx)
    mass = {(S_t[a], S_t[b]): float(block[a, b]) for a in range(len(idx)) for b in range(len(idx))}
    inf_mass = max(1.0 - block.sum(), 0.0)
    return InducedDistribution(S=S_t, mass=mass, infinity_mass=float(inf_mass))


@dataclass(frozen=True)
class CutRatio:
    """Bottleneck ratio of S inside the ambient subset I."""

    S: tuple
    I: tuple
    value: float


def bottleneck_ratio(P, S, I) -> CutRatio:
    """Phi(P, S, I): directed cut mass out of S within I over min side mass."""
    P = as_transition_matrix(P)
    S_idx = _as_subset(S, P.d)
    I_idx = _as_subset(I, P.d)
    if len(S_idx) == 0 or not np.isin(S_idx, I_idx).all() or len(S_idx) >= len(I_idx):
        raise BadSubset("need nonempty S strictly inside I")
    pi = stationary_distribution(P).entries
    Q = pi[:, None] * P.entries
    rest = np.setdiff1d(I_idx, S_idx)
    num = float(Q[np.ix_(S_idx, rest)].sum())
    den = float(min(pi[S_idx].sum(), pi[rest].sum()))
    return CutRatio(
        S=tuple(int(i) for i in S_idx),
        I=tuple(int(i) for i in I_idx),
        value=num / den,
    )


def _masks(n_states: int, indices: np.ndarray, include_full: bool = False):
    """Yield membership matrices (chunked) for nonempty subsets of `indices`
    as boolean arrays over the full state space. The subset equal to all of
    `indices` is included only when include_full is set."""
    k = len(indices)
    limit = (1 << k) if include_full else (1 << k) - 1
    chunk = 1 << 14
    for start in range(1, limit, chunk):
        stop = min(start + chunk, limit)
        codes = np.arange(start, stop, dtype=np.int64)
        bits = (codes[:, None] >> np.arange(k)) & 1
        members = np.zeros((len(codes), n_states), dtype=bool)
        members[:, indices] = bits.astype(bool)
        yield members


def cheeger_constant_bruteforce(P) -> float:
    """Exact min over nonempty proper subsets of Phi(P, S, [d]).

    2^d enumeration; rejects d > 20. Serves as the independent oracle for
    the LP-based partitioner.
    """
    P = as_transition_matrix(P)
    if P.d > ENUMERATION_LIMIT:
        raise TooLarge(f"d={P.d} exceeds enumeration limit {ENUMERATION_LIMIT}")
    if P.d < 2:
        raise BadSubset("no proper subsets for d < 2")
    pi = stationary_distribution(P).entries
    Q = pi[:, None] * P.entries
    best = np.inf
    for members in _masks(P.d, np.arange(P.d)):
        m = members.astype(float)
        cross = np.einsum("ki,ij,kj->k", m, Q, 1.0 - m)
        mass = m @ pi
        vals = cross / np.minimum(mass, 1.0 - mass)
        best = min(best, float(vals.min()))
    return best


class TailEigenvalueCheck(NamedTuple):
    lam: float
    alpha: float
    holds: bool


def tail_eigenvalue_bound_check(P, T) -> TailEigenvalueCheck:
    """Check lambda_max(P_T) <= 1 - alpha^2 / 2 for the leakage rate alpha.

    alpha is the exact minimum over nonempty R subseteq T of the escaped
    edge mass out of R relative to pi(R) (brute force, |T| <= 20). The
    submatrix P_T of a reversible chain is self-adjoint under pi, so its
    spectrum is real and computed after symmetrization.
    """
    P = as_transition_matrix(P)
    T_idx = _as_subset(T, P.d)
    if len(T_idx) == 0 or len(T_idx) >= P.d:
        raise BadSubset("need nonempty T strictly inside the state space")
    if len(T_idx) > ENUMERATION_LIMIT:
        raise TooLarge(f"|T|={len(T_idx)} exceeds enumeration limit")
    pi = stationary_distribution(P).entries
    Q = pi[:, None] * P.entries
    if np.abs(Q - Q.T).max() > DETAILED_BALANCE_TOL:
        raise NotReversible("detailed balance violated")

    sub = P.entries[np.ix_(T_idx, T_idx)]
    root = np.sqrt(pi[T_idx])
    sym = root[:, None] * sub / root[None, :]
    lam = float(np.linalg.eigvalsh((sym + sym.T) / 2.0)[-1]) if len(T_idx) > 1 else float(sub[0, 0])

    alpha = np.inf
    for members in _masks(P.d, T_idx, include_full=True):
        m = members.astype(float)
        out = np.einsum("ki,ij,kj->k", m, Q, 1.0 - m)
        mass = m @ pi
        alpha = min(alpha, float((out / mass).min()))
    holds = lam <= 1.0 - alpha * alpha / 2.0 + 1e-9
    return TailEigenvalueCheck(lam=lam, alpha=float(alpha), holds=bool(holds))


def internal_mass(P, I, pi: np.ndarray | None = None) -> float:
    """Edge mass retained inside I relative to pi(I): sum_{i,j in I} Q(i,j) / pi(I)."""
    P = as_transition_matrix(P)
    idx = _as_subset(I, P.d)
    if len(idx) == 0:
        raise BadSubset("empty subset")
    if pi is None:
        pi = stationary_distribution(P).entries
    Q = pi[:, None] * P.entries
    return float(Q[np.ix_(idx, idx)].sum() / pi[idx].sum())
