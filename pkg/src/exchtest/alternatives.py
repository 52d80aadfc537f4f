"""E-processes against richer alternatives.

- double mixtures over Markov orders with Basel weights 6/(pi^2 k^2),
- generic betting numerators driven by non-anticipating predictors,
- changepoint families (two smoothed-MLE blocks split at hypothesized n=2^k)
  mixed over k.

All constructions are sub-unit convex combinations of safe e-processes, so
they inherit safety; consistency transfers from any single component.
"""
from __future__ import annotations

import math

import numpy as np

from ._backend import bernoulli_mle_log, kt0_split_log_numerator, kt_log_numerator
from .counts import TransitionCounts

_NEG_INF = float("-inf")


class PredictorContractError(ValueError):
    """A predictor emitted something that is not a probability distribution."""


def basel_weight(k: int) -> float:
    """Mixture weight 6/(pi^2 k^2) for component k >= 1; sums to 1 over all k."""
    if k < 1:
        raise ValueError(f"component index must be >= 1, got {k}")
    return 6.0 / (math.pi ** 2 * k * k)


def truncation_order(t: int) -> int:
    """Number of mixture components active at time t: floor(log2 t) + 1."""
    if t < 1:
        raise ValueError(f"time must be >= 1, got {t}")
    return int(math.log2(t)) + 1


def _logsumexp(values: np.ndarray, axis: int = 0) -> np.ndarray:
    """Max-shift log-sum-exp; tolerates -inf entries."""
    m = np.max(values, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    out = np.log(np.sum(np.exp(values - m), axis=axis)) + np.squeeze(m, axis=axis)
    return out


def double_mixture(log_components, t: int) -> float:
    """ln sum_{k <= f(t)} 6/(pi^2 k^2) exp(log_components[k-1]).

    Components are log e-values in ascending order k = 1, 2, ...; only the
    first f(t) participate. Monotone in every component.
    """
    k_use = min(len(log_components), truncation_order(t))
    if k_use == 0:
        raise ValueError("no mixture components")
    vals = np.asarray(log_components[:k_use], dtype=np.float64)
    logw = np.log([basel_weight(k) for k in range(1, k_use + 1)])
    return float(_logsumexp(logw + vals))


def _mixture_trajectory(log_numerators: np.ndarray, log_den: np.ndarray) -> np.ndarray:
    """Combine per-component log numerators (K, T) into a mixture log-evidence path.

    Component k participates from t >= 2^(k-1) (the truncation schedule);
    weights are Basel. The shared denominator factors out of the sum.
    """
    n_comp, t_max = log_numerators.shape
    logw = np.log([basel_weight(k) for k in range(1, n_comp + 1)])
    shifted = log_numerators + logw[:, None]
    times = np.arange(1, t_max + 1)
    active = times[None, :] >= (1 << np.arange(n_comp))[:, None]  # k-1 doublings
    shifted = np.where(active, shifted, _NEG_INF)
    return _logsumexp(shifted, axis=0) - log_den


def order_mixture_trajectory(x, d: int = 2) -> np.ndarray:
    """Double mixture over Markov orders k = 1..f(T) of the KT e-processes."""
    x = np.asarray(x, dtype=np.int64)
    if len(x) == 0:
        raise ValueError("empty stream")
    n_comp = truncation_order(len(x))
    nums = np.stack([kt_log_numerator(x, d, k) for k in range(1, n_comp + 1)])
    return _mixture_trajectory(nums, bernoulli_mle_log(x, d))


class KTPredictor:
    """Per-context KT predictive distribution; uniform over the first k symbols.

    Betting with this predictor reproduces the core e-process exactly (a
    Bayes mixture is the product of its own posterior predictives).
    """

    def __init__(self, d: int = 2, k: int = 1):
        self.counts = TransitionCounts(d, k)

    def predict(self) -> np.ndarray:
        c = self.counts
        if c.t < c.k:
            return np.full(c.d, 1.0 / c.d)
        row = c.ctx[c.context_code]
        return (row + 0.5) / (row.sum() + 0.5 * c.d)

    def observe(self, a: int) -> None:
        self.counts.observe(a)


class SmoothedMLEPredictor:
    """Additive-(1/2) smoothed empirical distribution of the current segment.

    Predicts (n_a + 1/2) / (seen + d/2); uniform at a fresh segment start.
    reset() begins a new segment (used by changepoint components).
    """

    def __init__(self, d: int = 2):
        self.d = d
        self.seg = np.zeros(d, dtype=np.int64)
        self.seen = 0

    def predict(self) -> np.ndarray:
        return (self.seg + 0.5) / (self.seen + 0.5 * self.d)

    def observe(self, a: int) -> None:
        self.seg[a] += 1
        self.seen += 1

    def reset(self) -> None:
        self.seg[:] = 0
        self.seen = 0


def betting_eprocess(predictor, stream, d: int = 2) -> np.ndarray:
    """Log evidence of a betting numerator against the i.i.d. MLE denominator.

    The predictor is queried for its full next-symbol distribution before
    each symbol is revealed, so it cannot anticipate; emitted distributions
    are validated (positive, sum to 1 within 1e-9).
    """
    x = np.asarray(stream, dtype=np.int64)
    log_num = np.empty(len(x))
    acc = 0.0
    for i, a in enumerate(x):
        g = np.asarray(predictor.predict(), dtype=np.float64)
        if g.shape != (d,) or np.any(g <= 0.0) or abs(g.sum() - 1.0) > 1e-9:
            raise PredictorContractError(
                f"invalid predictive distribution at step {i + 1}: {g!r}")
        acc += math.log(g[a])
        log_num[i] = acc
        predictor.observe(int(a))
    return log_num - bernoulli_mle_log(x, d)


def changepoint_log_numerator(x, d: int, k: int) -> np.ndarray:
    """Log numerator of the component hypothesizing a change at n = 2^k."""
    if k < 0:
        raise ValueError(f"hypothesis index must be >= 0, got {k}")
    return kt0_split_log_numerator(np.asarray(x, dtype=np.int64), d, 1 << k)


def changepoint_eprocess(k: int, stream, d: int = 2) -> np.ndarray:
    """Two smoothed-MLE blocks split at n = 2^k, over the i.i.d. MLE."""
    x = np.asarray(stream, dtype=np.int64)
    return changepoint_log_numerator(x, d, k) - bernoulli_mle_log(x, d)


def changepoint_mixture_trajectory(x, d: int = 2) -> np.ndarray:
    """Basel-weighted mixture of changepoint components n = 2^k, k = 0, 1, ...

    Component k carries weight 6/(pi^2 (k+1)^2) and joins the sum once
    t >= 2^k, via the same truncation schedule as the order mixture.
    """
    x = np.asarray(x, dtype=np.int64)
    if len(x) == 0:
        raise ValueError("empty stream")
    n_comp = truncation_order(len(x))
    nums = np.stack([changepoint_log_numerator(x, d, k) for k in range(n_comp)])
    return _mixture_trajectory(nums, bernoulli_mle_log(x, d))
