"""State-space partitioning via the constrained sparsest-cut LP.

The partitioner returns well-connected components plus a tail subset the
chain cannot linger in. A component is declared when the LP optimum itself
certifies expansion: the LP value lower-bounds every cut's normalized ratio,
and the factor-2 sandwich between that ratio and the bottleneck ratio turns
it into a sound lower bound on min_R Phi(P, R, I). Rounding (embedding +
sweep cuts) is only needed on the split branch, where the LP value is small
and an actual sparse cut must be produced.

The constrained subset T is handled by contracting it to a single node: the
LP constraints force delta = 0 inside T and equal distances from T to any
outside node, which is exactly the quotient metric. Contraction also makes
the embedding assign identical coordinates to all of T and keeps sweep cuts
from ever splitting it.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, log
import numpy as np

from ._rng import derive_rng
from .chain_core import (
    DETAILED_BALANCE_TOL,
    as_prob_vector,
    as_transition_matrix,
    stationary_distribution,
    _as_subset,
    _is_strongly_connected,
)
from .config import Constants, DEFAULT_CONSTANTS
from .errors import (
    BadArgs,
    BadSubset,
    CertificationFailed,
    DegenerateEmbedding,
    NotIrreducible,
    NotReversible,
    SolverStall,
)
from .metrics import _masks
from .sampling import simulate
from .simplex import solve_lp

CERTIFICATION_LIMIT = 12
_MATERIALIZE_LIMIT = 12


@dataclass(frozen=True)
class CutMetric:
    """0/1 metric of a two-sided cut: distance 0 within a side, 1 across."""

    S: tuple

    def distance(self, i: int, j: int) -> float:
        return float((i in self.S) != (j in self.S))


@dataclass(frozen=True)
class MetricLP:
    """Optimal feasible metric of the cut relaxation on the ambient set I.

    delta is the full |I| x |I| symmetric matrix in sorted-I order. The
    objective is sum over ordered pairs of Q(i,j) delta_ij at the optimum,
    under the normalization sum over ordered pairs of pi_i pi_j delta_ij = 1.
    """

    I: tuple
    T: tuple
    delta: np.ndarray
    objective: float


def _quotient(I: np.ndarray, T: np.ndarray) -> list[np.ndarray]:
    """Quotient node groups: T contracted to one node, singletons elsewhere."""
    groups = []
    if len(T):
        groups.append(T)
    for i in I:
        if i not in set(T.tolist()):
            groups.append(np.array([i], dtype=int))
    return groups


def solve_spccc_lp(P, I, T, max_rounds: int = 60) -> MetricLP:
    """Minimum of sum Q(i,j) delta_ij over metrics delta on I normalized by
    sum pi_i pi_j delta_ij = 1, with delta = 0 inside T and distances from T
    shared. Triangle inequalities are materialized up to 12 quotient nodes
    and generated lazily above that.
    """
    P = as_transition_matrix(P)
    I_idx = _as_subset(I, P.d)
    T_idx = _as_subset(T, P.d)
    if len(I_idx) < 2:
        raise BadSubset("need |I| >= 2")
    if len(T_idx) and (not np.isin(T_idx, I_idx).all() or len(T_idx) >= len(I_idx)):
        raise BadSubset("need T strictly inside I")
    pi = stationary_distribution(P).entries
    Q = pi[:, None] * P.entries
    if np.abs(Q - Q.T).max() > DETAILED_BALANCE_TOL:
        raise NotReversible("detailed balance violated")

    groups = _quotient(I_idx, T_idx)
    n = len(groups)
    gmass = np.array([pi[g].sum() for g in groups])
    Qsym = Q + Q.T
    gq = np.zeros((n, n))
    for a in range(n):
        for b in range(a + 1, n):
            gq[a, b] = Qsym[np.ix_(groups[a], groups[b])].sum()

    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    pair_index = {e: k for k, e in enumerate(pairs)}
    nv = len(pairs)
    c = np.array([gq[a, b] for a, b in pairs])
    norm_row = np.array([2.0 * gmass[a] * gmass[b] for a, b in pairs])

    def pvar(a, b):
        return pair_index[(a, b) if a < b else (b, a)]

    def triangle_rows(triples):
        A = np.zeros((len(triples), nv))
        for r, (a, b, w) in enumerate(triples):
            A[r, pvar(a, b)] = 1.0
            A[r, pvar(a, w)] = -1.0
            A[r, pvar(w, b)] = -1.0
        return A

    all_triples = [
        (a, b, w) for a in range(n) for b in range(a + 1, n) for w in range(n) if w != a and w != b
    ]
    if n <= _MATERIALIZE_LIMIT:
        A_ub = triangle_rows(all_triples)
        x, obj = solve_lp(c, A_ub, np.zeros(len(all_triples)), norm_row[None, :], np.array([1.0]))
    else:
        active: list = []
        x, obj = solve_lp(c, None, None, norm_row[None, :], np.array([1.0]))
        for _ in range(max_rounds):
            viol = [
                t
                for t in all_triples
                if x[pvar(t[0], t[1])] - x[pvar(t[0], t[2])] - x[pvar(t[2], t[1])] > 1e-10
            ]
            if not viol:
                break
            viol.sort(
                key=lambda t: -(x[pvar(t[0], t[1])] - x[pvar(t[0], t[2])] - x[pvar(t[2], t[1])])
            )
            active.extend(viol[:max(50, nv)])
            A_ub = triangle_rows(active)
            x, obj = solve_lp(c, A_ub, np.zeros(len(active)), norm_row[None, :], np.array([1.0]))
        else:
            raise SolverStall("triangle generation did not converge")

    pos = {int(v): k for k, v in enumerate(I_idx)}
    delta = np.zeros((len(I_idx), len(I_idx)))
    for (a, b), k in pair_index.items():
        for i in groups[a]:
            for j in groups[b]:
                delta[pos[int(i)], pos[int(j)]] = x[k]
                delta[pos[int(j)], pos[int(i)]] = x[k]
    return MetricLP(
        I=tuple(int(i) for i in I_idx),
        T=tuple(int(i) for i in T_idx),
        delta=delta,
        objective=float(obj),
    )


def cut_metric_ratio(P, S, I) -> float:
    """Normalized objective of the cut metric of S inside I:
    sum Q delta_S / sum pi pi delta_S over ordered pairs."""
    P = as_transition_matrix(P)
    S_idx = _as_subset(S, P.d)
    I_idx = _as_subset(I, P.d)
    rest = np.setdiff1d(I_idx, S_idx)
    if len(S_idx) == 0 or len(rest) == 0 or not np.isin(S_idx, I_idx).all():
        raise BadSubset("need nonempty S strictly inside I")
    pi = stationary_distribution(P).entries
    Q = pi[:, None] * P.entries
    num = Q[np.ix_(S_idx, rest)].sum() + Q[np.ix_(rest, S_idx)].sum()
    den = 2.0 * pi[S_idx].sum() * pi[rest].sum()
    return float(num / den)


def bourgain_embed(lp: MetricLP, seed: int, constants: Constants = DEFAULT_CONSTANTS) -> np.ndarray:
    """Randomized Frechet-style l1 embedding of the LP metric.

    For each scale s = 1..ceil(log2 n) and repetition r = 1..ceil(C log n),
    sample a node subset A with inclusion probability 2^-s and emit the
    coordinate min_{a in A} delta(i, a), scaled by the coordinate count so
    the embedding is 1-Lipschitz into l1. Nodes of T share all coordinates
    exactly (they are one quotient node). Rows follow sorted(I) order.
    """
    I_arr = np.asarray(lp.I, dtype=int)
    T_arr = np.asarray(lp.T, dtype=int)
    groups = _quotient(I_arr, T_arr)
    n = len(groups)
    pos = {int(v): k for k, v in enumerate(I_arr)}
    reps_idx = [pos[int(g[0])] for g in groups]
    dq = lp.delta[np.ix_(reps_idx, reps_idx)]

    if n == 1:
        return np.zeros((len(I_arr), 1))
    scales = max(1, ceil(np.log2(n)))
    reps = max(1, ceil(constants.bourgain_reps * log(n)))
    total = scales * reps
    rng = derive_rng(seed, "bourgain")
    coords_q = np.zeros((n, total))
    col = 0
    for s in range(1, scales + 1):
        p_inc = 2.0 ** (-s)
        for _ in range(reps):
            A = np.flatnonzero(rng.random(n) < p_inc)
            if len(A):
                coords_q[:, col] = dq[:, A].min(axis=1)
            col += 1
    coords_q /= total

    out = np.zeros((len(I_arr), total))
    for a, g in enumerate(groups):
        for i in g:
            out[pos[int(i)]] = coords_q[a]
    return out


def round_to_cut(embedding: np.ndarray, P, I, T) -> tuple:
    """Best sweep cut over all embedding coordinates.

    Each coordinate is swept at every strictly increasing value boundary and
    the candidate cut scored by its normalized metric ratio; the minimizer
    wins, earliest (coordinate, boundary) on ties. The returned side never
    meets T (the complement is taken when needed; the score is the same for
    both sides). Raises DegenerateEmbedding when every coordinate is
    constant, instructing the caller to re-seed.
    """
    P = as_transition_matrix(P)
    I_idx = _as_subset(I, P.d)
    T_set = set(int(t) for t in np.asarray(list(T), dtype=int)) if len(list(T)) else set()
    if embedding.shape[0] != len(I_idx):
        raise BadSubset("embedding rows must match sorted(I)")
    pi = stationary_distribution(P).entries
    Q = pi[:, None] * P.entries
    Qs = Q + Q.T
    pi_I = pi[I_idx]
    Q_I = Qs[np.ix_(I_idx, I_idx)]

    best = None
    k = len(I_idx)
    for cidx in range(embedding.shape[1]):
        vals = embedding[:, cidx]
        order = np.lexsort((np.arange(k), vals))
        sv = vals[order]
        boundaries = np.flatnonzero(np.diff(sv) > 0.0) + 1
        for cut in boundaries:
            left = order[:cut]
            right = order[cut:]
            num = Q_I[np.ix_(left, right)].sum()
            den = 2.0 * pi_I[left].sum() * pi_I[right].sum()
            ratio = num / den
            if best is None or ratio < best[0] - 1e-15:
                best = (ratio, left)
    if best is None:
        raise DegenerateEmbedding("all embedded points coincide; retry with a fresh seed")
    side = set(int(I_idx[i]) for i in best[1])
    if side & T_set:
        side = set(int(i) for i in I_idx) - side
    return tuple(sorted(side))


def find_comp(P, I, T, seed: int, lp: MetricLP | None = None,
              constants: Constants = DEFAULT_CONSTANTS) -> tuple:
    """LP relaxation, l1 embedding, sweep-cut rounding; returns a proper
    nonempty subset of I disjoint from T. Deterministic given the seed."""
    if lp is None:
        lp = solve_spccc_lp(P, I, T)
    emb = bourgain_embed(lp, seed, constants)
    return round_to_cut(emb, P, lp.I, lp.T)


@dataclass(frozen=True)
class StatePartition:
    """Partition of the state space into components and a tail subset.

    certificates carries internal-mass values, the LP expansion lower bounds
    and, when enumeration ran (d <= 12), brute-force cut minima.
    """

    components: tuple
    tail: tuple
    beta: float
    certificates: dict

    def all_states(self) -> set:
        out = set(self.tail)
        for S in self.components:
            out |= set(S)
        return out


def _retention(P_arr: np.ndarray, i: int, I_idx: np.ndarray) -> float:
    return float(P_arr[i, I_idx].sum())


def partition_states(
    P,
    beta: float,
    seed: int,
    certify: bool = True,
    constants: Constants = DEFAULT_CONSTANTS,
) -> StatePartition:
    """Partition the states of a reversible chain at tolerance beta.

    Work-list refinement: every candidate subset I gets a cut LP. If the LP
    certifies expansion (pi(I) * lp/2 >= c2 beta / log^2 d, a lower bound on
    every internal bottleneck ratio), I is declared a component unless it
    contains low-retention states (states keeping less than 1 - beta of
    their outgoing mass inside I); those move to the tail and the rest is
    re-examined. Declared components therefore retain >= 1 - beta per state,
    which implies the aggregate internal-mass bound. If the LP does not
    certify expansion, I is split along the rounded cut and both sides
    recurse.

    Guarantees on the output, certified by enumeration when d <= 12:
      (1) each component keeps internal edge mass >= 1 - beta (exact);
      (2) each component's internal bottleneck ratios are all
          >= c2 beta / log^2 d;
      (3) every subset of the tail leaks edge mass at rate
          >= c3 beta / log d.
    A certification failure means an implementation bug, not a bad input.
    """
    P = as_transition_matrix(P)
    if not (0.0 < beta < 1.0):
        raise BadArgs(f"beta={beta} outside (0, 1)")
    if not _is_strongly_connected(P.entries):
        raise NotIrreducible("chain is not irreducible")
    pi = stationary_distribution(P).entries
    Q = pi[:, None] * P.entries
    if np.abs(Q - Q.T).max() > DETAILED_BALANCE_TOL:
        raise NotReversible("detailed balance violated")

    d = P.d
    logd = log(max(d, 2))
    tau_comp = constants.c2 * beta / logd**2
    tau_tail = constants.c3 * beta / logd
    arr = P.entries

    components: list[tuple] = []
    comp_certs: list[dict] = []
    tail: list[int] = []
    work: list[np.ndarray] = [np.arange(d)]
    round_no = 0
    while work:
        I_idx = work.pop()
        if len(I_idx) == 0:
            continue
        if len(I_idx) == 1:
            i = int(I_idx[0])
            if arr[i, i] >= 1.0 - beta:
                components.append((i,))
                comp_certs.append(
                    {"states": [i], "internal_mass": float(arr[i, i]), "lp_phi_lower_bound": None}
                )
            else:
                tail.append(i)
            continue
        lp = solve_spccc_lp(P, I_idx, ())
        pi_I = float(pi[I_idx].sum())
        lp_bound = pi_I * lp.objective / 2.0
        if lp_bound >= tau_comp:
            low = [int(i) for i in I_idx if _retention(arr, int(i), I_idx) < 1.0 - beta]
            if low:
                tail.extend(low)
                rest = np.setdiff1d(I_idx, np.asarray(low, dtype=int))
                work.append(rest)
            else:
                mass_in = float(Q[np.ix_(I_idx, I_idx)].sum() / pi_I)
                components.append(tuple(int(i) for i in I_idx))
                comp_certs.append(
                    {
                        "states": [int(i) for i in I_idx],
                        "internal_mass": mass_in,
                        "lp_phi_lower_bound": lp_bound,
                    }
                )
        else:
            S1 = None
            for attempt in range(8):
                try:
                    S1 = find_comp(
                        P, I_idx, (), derive_rng(seed, "split", round_no, attempt).integers(2**63),
                        lp=lp, constants=constants,
                    )
                    break
                except DegenerateEmbedding:
                    continue
            if S1 is None:
                raise DegenerateEmbedding("embedding stayed degenerate across retries")
            work.append(np.asarray(S1, dtype=int))
            work.append(np.setdiff1d(I_idx, np.asarray(S1, dtype=int)))
        round_no += 1

    components.sort(key=lambda S: (-pi[list(S)].sum(), S))
    tail_t = tuple(sorted(tail))
    certificates = {
        "beta": beta,
        "component_threshold": tau_comp,
        "tail_threshold": tau_tail,
        "components": comp_certs,
        "tail": {"states": list(tail_t), "min_escape_ratio": None},
        "certified": False,
    }
    part = StatePartition(
        components=tuple(components), tail=tail_t, beta=beta, certificates=certificates
    )
    if certify and d <= CERTIFICATION_LIMIT:
        _certify(part, pi, Q, tau_comp, tau_tail)
    return part


def _certify(part: StatePartition, pi: np.ndarray, Q: np.ndarray,
             tau_comp: float, tau_tail: float) -> None:
    """Brute-force postcondition check; mutates certificates in place."""
    d = len(pi)
    covered = sorted(part.all_states())
    if covered != list(range(d)):
        raise CertificationFailed(f"not a partition of range({d}): {covered}")
    seen: set = set()
    for S in part.components:
        if seen & set(S):
            raise CertificationFailed("components overlap")
        seen |= set(S)
    if seen & set(part.tail):
        raise CertificationFailed("tail overlaps components")

    for S, cert in zip(part.components, part.certificates["components"]):
        S_idx = np.asarray(S, dtype=int)
        mass_in = float(Q[np.ix_(S_idx, S_idx)].sum() / pi[S_idx].sum())
        cert["internal_mass"] = mass_in
        if mass_in < 1.0 - part.beta - 1e-12:
            raise CertificationFailed(f"component {S} internal mass {mass_in}")
        if len(S_idx) >= 2:
            worst = np.inf
            for members in _masks(d, S_idx):
                m = members.astype(float)
                inside = np.zeros(d)
                inside[S_idx] = 1.0
                other = inside - m
                cross = np.einsum("ki,ij,kj->k", m, Q, other)
                mass = m @ pi
                rest = pi[S_idx].sum() - mass
                worst = min(worst, float((cross / np.minimum(mass, rest)).min()))
            cert["min_phi_bruteforce"] = worst
            if worst < tau_comp - 1e-12:
                raise CertificationFailed(
                    f"component {S}: min bottleneck ratio {worst:.3e} < {tau_comp:.3e}"
                )
        else:
            cert["min_phi_bruteforce"] = None

    if part.tail:
        T_idx = np.asarray(part.tail, dtype=int)
        worst = np.inf
        for members in _masks(d, T_idx, include_full=True):
            m = members.astype(float)
            out = np.einsum("ki,ij,kj->k", m, Q, 1.0 - m)
            mass = m @ pi
            worst = min(worst, float((out / mass).min()))
        part.certificates["tail"]["min_escape_ratio"] = worst
        if worst < tau_tail - 1e-12:
            raise CertificationFailed(
                f"tail escape ratio {worst:.3e} < {tau_tail:.3e}"
            )
    part.certificates["certified"] = True


def tail_occupancy_check(
    P,
    T,
    alpha: float,
    m: int,
    trials: int,
    seed: int,
    mu=None,
    constants: Constants = DEFAULT_CONSTANTS,
) -> float:
    """Empirical frequency of the tail-escape event over simulated runs.

    Each trial simulates m steps and checks that the number of steps spent
    outside T reaches c_esc * m * alpha^2 / log(1/min_T pi). A statistical
    acceptance probe for the tail guarantee, not a proof. T empty is
    vacuous (returns 1.0).
    """
    P = as_transition_matrix(P)
    T_idx = _as_subset(T, P.d)
    if len(T_idx) == 0:
        return 1.0
    if alpha <= 0 or m < 1 or trials < 1:
        raise BadArgs(f"alpha={alpha}, m={m}, trials={trials}")
    pi = stationary_distribution(P)
    mu = pi if mu is None else as_prob_vector(mu)
    pi_T_star = float(pi.entries[T_idx].min())
    threshold = constants.c_esc * m * alpha * alpha / log(1.0 / pi_T_star)
    in_T = np.zeros(P.d, dtype=bool)
    in_T[T_idx] = True
    hits = 0
    for t in range(trials):
        traj = simulate(P, mu, m, seed=int(derive_rng(seed, "occupancy", t).integers(2**63)))
        escapes = int((~in_T[traj.states]).sum())
        if escapes >= threshold:
            hits += 1
    return hits / trials
