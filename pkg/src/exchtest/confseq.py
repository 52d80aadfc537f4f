"""Confidence sequences for a binary success rate, dual to the e-process.

For each candidate q, replace the maximum-likelihood denominator by the
fixed i.i.d. Bernoulli(q) likelihood. The set of q whose evidence stays
below 1/alpha is a confidence interval; intersecting over time gives a
confidence sequence. The interval is empty exactly when the original
e-process (whose denominator is the likelihood maximized over q) crosses
1/alpha, so testing and estimation agree by construction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from ._backend import bernoulli_mle_log, kt_log_numerator
from .evidence import EvidenceState

_BRACKET_EPS = 1e-12
_BISECT_ITERS = 50  # interval width 2^-50 ~ 9e-16, well under the 1e-9 target


@dataclass(frozen=True)
class ConfInterval:
    lo: float
    hi: float
    empty: bool = False

    def intersect(self, other: "ConfInterval") -> "ConfInterval":
        if self.empty or other.empty:
            return EMPTY_INTERVAL
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            return EMPTY_INTERVAL
        return ConfInterval(lo, hi)

    def contains(self, q: float) -> bool:
        return (not self.empty) and self.lo <= q <= self.hi


EMPTY_INTERVAL = ConfInterval(math.nan, math.nan, empty=True)


def jeffreys_point_log_evidence(state: EvidenceState, q: float) -> float:
    """Log evidence against the fixed i.i.d. Bernoulli(q) null at the current t."""
    c = state.counts
    if c.d != 2:
        raise ValueError("point nulls require a binary alphabet")
    if c.t < 1:
        raise ValueError("no observations yet")
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie strictly inside (0, 1), got {q}")
    n1 = int(c.marginal[1])
    n0 = int(c.marginal[0])
    return state.log_num - (n1 * math.log(q) + n0 * math.log1p(-q))


def _phi(q, n1, n0):
    """Log-likelihood n1 ln q + n0 ln(1-q) of the point null (array-friendly)."""
    return xlogy(n1, q) + np.log1p(-q) * n0


def _bisect_phi(n1, n0, c, lo, hi):
    """Root of phi(q) = c on a monotone segment [lo, hi] (vectorized)."""
    lo = np.array(lo, dtype=np.float64, copy=True)
    hi = np.array(hi, dtype=np.float64, copy=True)
    increasing = _phi(lo, n1, n0) <= _phi(hi, n1, n0)
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        below = _phi(mid, n1, n0) < c
        go_up = below == increasing  # phi(mid) on the far side of c from hi
        lo = np.where(go_up, mid, lo)
        hi = np.where(go_up, hi, mid)
    return 0.5 * (lo + hi)


def _interval_arrays(log_num, n1, n0, alpha, log_evidence):
    """Per-time interval endpoints from trajectory arrays (vectorized).

    log_evidence carries the maximized e-process in the exact floats the
    caller tests against, so emptiness and threshold crossing agree bitwise.
    """
    log_num = np.asarray(log_num, dtype=np.float64)
    n1 = np.asarray(n1, dtype=np.float64)
    n0 = np.asarray(n0, dtype=np.float64)
    threshold = math.log(1.0 / alpha)
    c = log_num - threshold
    empty = np.asarray(log_evidence) >= threshold
    t = n1 + n0
    qhat = n1 / t
    lo_deg = n1 == 0
    hi_deg = n0 == 0
    # degenerate sides attach to the boundary; bisect the other side only
    lo_brk = np.full_like(c, _BRACKET_EPS)
    hi_brk = np.full_like(c, 1.0 - _BRACKET_EPS)
    lo_seg_hi = np.where(lo_deg, _BRACKET_EPS, qhat)
    hi_seg_lo = np.where(hi_deg, 1.0 - _BRACKET_EPS, qhat)
    inside_lo = _phi(lo_brk, n1, n0) > c  # bracket edge already in the set
    inside_hi = _phi(hi_brk, n1, n0) > c
    lo = np.where(lo_deg, 0.0,
                  np.where(inside_lo, lo_brk, _bisect_phi(n1, n0, c, lo_brk, lo_seg_hi)))
    hi = np.where(hi_deg, 1.0,
                  np.where(inside_hi, hi_brk, _bisect_phi(n1, n0, c, hi_seg_lo, hi_brk)))
    lo = np.where(empty, math.nan, lo)
    hi = np.where(empty, math.nan, hi)
    return lo, hi, empty


def conf_interval(state: EvidenceState, alpha: float) -> ConfInterval:
    """Level-(1-alpha) interval {q: evidence against Ber(q) stays below 1/alpha}."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    c = state.counts
    if c.d != 2:
        raise ValueError("confidence intervals require a binary alphabet")
    if c.t < 1:
        raise ValueError("no observations yet")
    n1 = int(c.marginal[1])
    n0 = int(c.marginal[0])
    lo, hi, empty = _interval_arrays(
        np.array([state.log_num]), np.array([n1]), np.array([n0]), alpha,
        np.array([state.log_evidence()]))
    if empty[0]:
        return EMPTY_INTERVAL
    return ConfInterval(float(lo[0]), float(hi[0]))


def conf_interval_trajectory(x, alpha: float, k: int = 1):
    """Interval endpoints at every prefix of a binary stream.

    Returns (lo, hi, empty) arrays of length len(x); nan endpoints where the
    interval is empty.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    x = np.asarray(x, dtype=np.int64)
    if np.any((x < 0) | (x > 1)):
        raise ValueError("stream must be binary")
    log_num = kt_log_numerator(x, 2, k)
    log_evidence = log_num - bernoulli_mle_log(x, 2)
    n1 = np.cumsum(x)
    t = np.arange(1, len(x) + 1)
    return _interval_arrays(log_num, n1, t - n1, alpha, log_evidence)


def running_intersection(intervals) -> ConfInterval:
    """Fold a sequence of ConfIntervals into their intersection."""
    out = ConfInterval(0.0, 1.0)
    for iv in intervals:
        out = out.intersect(iv)
    return out


def running_intersection_trajectory(lo, hi, empty):
    """Cumulative intersection of per-time intervals, as trajectory arrays.

    Emptiness is sticky; an inverted cummax/cummin pair also marks empty.
    """
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    empty = np.asarray(empty, dtype=bool)
    run_empty = np.maximum.accumulate(empty)
    run_lo = np.maximum.accumulate(np.where(empty, -np.inf, lo))
    run_hi = np.minimum.accumulate(np.where(empty, np.inf, hi))
    run_empty = run_empty | (run_lo > run_hi)
    run_empty = np.maximum.accumulate(run_empty)
    run_lo = np.where(run_empty, math.nan, run_lo)
    run_hi = np.where(run_empty, math.nan, run_hi)
    return run_lo, run_hi, run_empty
