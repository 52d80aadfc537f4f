"""Core e-process: KT-mixture numerator over i.i.d. maximum-likelihood denominator.

The numerator is the sequential product of per-context Krichevsky-Trofimov
predictive probabilities (equal to a Dirichlet(1/2,...,1/2) mixture over
order-k Markov models), with the first k symbols priced uniformly at 1/d.
The denominator is the best i.i.d. fit in hindsight. Large values of the
ratio are evidence against exchangeability.

Everything is kept in natural-log space; the gamma-function closed form (for
d=2, k=1) is retained purely as a cross-checking oracle.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln, xlogy

from ._backend import bernoulli_mle_log, kt_log_numerator
from .counts import TransitionCounts

# Maximum of ml_gap(x) - ln t - ln R_t(x) over all binary strings of length
# <= 16 (exhaustive sweep, see derive_regret_constant). The maximizer is the
# alternating string; the supremum over unbounded lengths approaches ln(pi).
REGRET_CONSTANT = 1.1114211139204961


def kt_predictive(counts: TransitionCounts, c: int, a: int) -> float:
    """Predictive probability (n_{a|c} + 1/2) / (n_c + d/2), strictly in (0,1)."""
    if not 0 <= a < counts.d:
        raise ValueError(f"symbol {a} out of range")
    if not 0 <= c < counts.ctx.shape[0]:
        raise ValueError(f"context code {c} out of range")
    row = counts.ctx[c]
    return (row[a] + 0.5) / (row.sum() + 0.5 * counts.d)


class EvidenceState:
    """Streaming state: transition counts plus the running log numerator."""

    __slots__ = ("counts", "log_num")

    def __init__(self, d: int = 2, k: int = 1):
        self.counts = TransitionCounts(d, k)
        self.log_num = 0.0

    @property
    def t(self) -> int:
        return self.counts.t

    def update(self, a: int) -> None:
        counts = self.counts
        if counts.t < counts.k:
            if not 0 <= a < counts.d:
                raise ValueError(f"symbol {a} out of range")
            self.log_num += -math.log(counts.d)
        else:
            self.log_num += math.log(kt_predictive(counts, counts.context_code, a))
        counts.observe(a)

    def update_all(self, symbols) -> None:
        for a in symbols:
            self.update(int(a))

    def log_evidence(self) -> float:
        """ln R_t; R_0 = 1 by convention."""
        if self.counts.t == 0:
            return 0.0
        return self.log_num - log_mle_denominator(self.counts)


def log_mle_denominator(counts: TransitionCounts) -> float:
    """Max i.i.d. log-likelihood sum_a n_a ln(n_a/t), with 0 ln 0 = 0."""
    if counts.t == 0:
        raise ValueError("no symbols observed")
    n = counts.marginal
    return float(xlogy(n, n / counts.t).sum())


def closed_form_log_evidence(counts: TransitionCounts) -> float:
    """Gamma-function evaluation of ln R_t for d=2, k=1 (oracle path).

    Numerator: Gamma(n00+1/2) Gamma(n01+1/2) Gamma(n10+1/2) Gamma(n11+1/2)
    / (2 Gamma(1/2)^4 Gamma(n00+n10+1) Gamma(n01+n11+1)).
    """
    if counts.d != 2 or counts.k != 1:
        raise ValueError("closed form only available for d=2, k=1")
    if counts.t == 0:
        raise ValueError("no symbols observed")
    n00, n10 = counts.ctx[0]
    n01, n11 = counts.ctx[1]
    log_num = (gammaln(n00 + 0.5) + gammaln(n01 + 0.5) + gammaln(n10 + 0.5)
               + gammaln(n11 + 0.5) - math.log(2.0) - 4.0 * gammaln(0.5)
               - gammaln(n00 + n10 + 1.0) - gammaln(n01 + n11 + 1.0))
    return log_num - log_mle_denominator(counts)


def evidence_trajectory(x, d: int = 2, k: int = 1) -> np.ndarray:
    """ln R_t for t = 1..len(x), computed by the kernel backend."""
    x = np.asarray(x, dtype=np.int64)
    if len(x) and (x.min() < 0 or x.max() >= d):
        raise ValueError("symbol out of range")
    TransitionCounts(d, k)  # reuse the configuration guard
    return kt_log_numerator(x, d, k) - bernoulli_mle_log(x, d)


def stopping_time(trajectory, alpha: float):
    """First 1-based t with log-evidence >= ln(1/alpha), or None."""
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must be in (0,1), got {alpha}")
    hits = np.flatnonzero(np.asarray(trajectory) >= -math.log(alpha))
    return int(hits[0]) + 1 if len(hits) else None


def ml_gap(counts: TransitionCounts) -> float:
    """Per-context ML log-likelihood minus pooled i.i.d. ML log-likelihood.

    Nonnegative for every stream; this is the oracle side of the regret
    lower bound ln R_t >= ml_gap - ln t - REGRET_CONSTANT.
    """
    if counts.t == 0:
        raise ValueError("no symbols observed")
    ctx = counts.ctx
    rows = ctx.sum(axis=1, keepdims=True)
    cond = float(xlogy(ctx, ctx / np.maximum(rows, 1)).sum())
    return cond - log_mle_denominator(counts)


def derive_regret_constant(max_len: int = 16) -> float:
    """Exhaustive max of ml_gap - ln t - ln R_t over binary strings (d=2, k=1).

    Vectorized over all 2^L strings per length; count statistics determine
    both sides, so no per-string replay is needed.
    """
    best = -np.inf
    for t in range(1, max_len + 1):
        bits = (np.arange(2 ** t)[:, None] >> np.arange(t)[None, ::-1]) & 1
        n1 = bits.sum(axis=1)
        n0 = t - n1
        prev, cur = bits[:, :-1], bits[:, 1:]
        n00 = ((prev == 0) & (cur == 0)).sum(axis=1)
        n01 = ((prev == 1) & (cur == 0)).sum(axis=1)
        n10 = ((prev == 0) & (cur == 1)).sum(axis=1)
        n11 = ((prev == 1) & (cur == 1)).sum(axis=1)
        c0, c1 = n00 + n10, n01 + n11
        iid = xlogy(n1, n1 / t) + xlogy(n0, n0 / t)
        cond = (xlogy(n00, n00 / np.maximum(c0, 1)) + xlogy(n10, n10 / np.maximum(c0, 1))
                + xlogy(n01, n01 / np.maximum(c1, 1)) + xlogy(n11, n11 / np.maximum(c1, 1)))
        log_num = (gammaln(n00 + 0.5) + gammaln(n01 + 0.5) + gammaln(n10 + 0.5)
                   + gammaln(n11 + 0.5) - math.log(2.0) - 4.0 * gammaln(0.5)
                   - gammaln(c0 + 1.0) - gammaln(c1 + 1.0))
        gap = (cond - iid) - math.log(t) - (log_num - iid)
        best = max(best, float(gap.max()))
    return best
