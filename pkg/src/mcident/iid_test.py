"""Identity tester for iid samples against a known finite distribution.

Contract: given m >= iid_sample_size(K, eps, delta) iid samples from p over
the reference's alphabet, the verdict is 0 when p equals the reference and
1 when the Hellinger distance is at least eps, each with probability at
least 1 - delta.

The statistic is a centered collision (chi-squared family) statistic over
the histogram, with the rejection threshold calibrated by parametric
bootstrap from the reference at the same sample size. The statistic is a
function of the histogram alone: samples are split into two half-size
sub-multisets cell by cell (odd counts alternate sides), the per-half
statistics averaged. That keeps the verdict invariant under any reordering
of the samples while decorrelating the two averaged halves' fluctuations.
Everything is deterministic given (samples, seed).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, log, sqrt

import numpy as np

from .config import Constants, DEFAULT_CONSTANTS
from .errors import AlphabetMismatch, BadArgs, TooFewSamples


@dataclass(frozen=True)
class TestVerdict:
    """decision is 1 exactly when statistic > threshold."""

    decision: int
    statistic: float
    threshold: float
    sample_size: int


def iid_sample_size(
    support: int, eps: float, delta: float, constants: Constants = DEFAULT_CONSTANTS
) -> int:
    """Samples required by the tester contract: c_iid sqrt(K) log(1/delta) / eps^2."""
    if support < 1:
        raise BadArgs(f"support={support}")
    if not (0.0 < eps < 1.0) or not (0.0 < delta < 1.0):
        raise BadArgs(f"eps={eps}, delta={delta}")
    return int(ceil(constants.c_iid * sqrt(support) * log(1.0 / delta) / (eps * eps)))


def _split_halves(hist: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic per-cell half split; odd counts alternate sides.

    hist may be (K,) or (B, K); the split is applied row-wise.
    """
    h = np.atleast_2d(hist)
    base = h // 2
    odd = h % 2
    cum = np.cumsum(odd, axis=1)
    extra = odd * (cum % 2 == 1)
    a = base + extra
    b = h - a
    if hist.ndim == 1:
        return a[0], b[0]
    return a, b


def _collision_stat(counts: np.ndarray, p: np.ndarray, denom: np.ndarray) -> np.ndarray:
    """Sum_i ((N_i - m p_i)^2 - N_i) / denom_i, rows are datasets."""
    c = np.atleast_2d(counts).astype(float)
    m = c.sum(axis=1, keepdims=True)
    z = ((c - m * p[None, :]) ** 2 - c) / denom[None, :]
    return z.sum(axis=1)


def _statistic(hist: np.ndarray, p: np.ndarray, denom: np.ndarray) -> np.ndarray:
    a, b = _split_halves(hist)
    return (_collision_stat(a, p, denom) + _collision_stat(b, p, denom)) / 2.0


def iid_test(
    samples,
    pbar: dict,
    eps: float,
    delta: float,
    seed: int,
    constants: Constants = DEFAULT_CONSTANTS,
) -> TestVerdict:
    """Test iid samples against the reference distribution pbar.

    pbar maps every alphabet symbol to its probability. Observing any symbol
    of reference probability zero (including symbols outside the alphabet)
    is an impossible event under the null and forces decision 1. The
    bootstrap draws ceil(20/delta) null histograms from pbar at the same
    sample size and thresholds at the (1 - delta/2) quantile.
    """
    if not isinstance(pbar, dict) or len(pbar) == 0:
        raise AlphabetMismatch("reference must be a nonempty symbol -> probability map")
    order = sorted(pbar.keys(), key=repr)
    p = np.array([float(pbar[a]) for a in order])
    if p.min() < -1e-12 or abs(p.sum() - 1.0) > 1e-8:
        raise AlphabetMismatch(f"reference probabilities sum to {p.sum()!r}")
    p = np.clip(p, 0.0, None)
    p = p / p.sum()
    K = len(order)
    if not (0.0 < eps < 1.0) or not (0.0 < delta < 1.0):
        raise BadArgs(f"eps={eps}, delta={delta}")

    m = len(samples)
    needed = iid_sample_size(K, eps, delta, constants)
    if m < needed:
        raise TooFewSamples(f"{m} samples, need {needed}")

    index = {a: k for k, a in enumerate(order)}
    hist = np.zeros(K, dtype=np.int64)
    impossible = 0
    for s in samples:
        k = index.get(s)
        if k is None:
            impossible += 1
        else:
            hist[k] += 1
    if impossible == 0 and np.any(hist[p == 0.0] > 0):
        impossible = int(hist[p == 0.0].sum())

    denom = np.maximum(p, 1.0 / K)
    rng = np.random.default_rng(seed)
    B = ceil(20.0 / delta)
    null_hists = rng.multinomial(m, p, size=B)
    null_stats = _statistic(null_hists, p, denom)
    threshold = float(np.quantile(null_stats, 1.0 - delta / 2.0, method="higher"))

    if impossible:
        statistic = float("inf")
    else:
        statistic = float(_statistic(hist, p, denom)[0])
    return TestVerdict(
        decision=int(statistic > threshold),
        statistic=statistic,
        threshold=threshold,
        sample_size=m,
    )
