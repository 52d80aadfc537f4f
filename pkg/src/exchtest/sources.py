"""Binary and finite-alphabet data sources with reproducible sampling.

Sampling is pinned to the Philox counter-based generator so that every
experiment, test, and CLI run regenerates byte-identical streams from a
seed. Alternatives include first-order and higher-order Markov chains, a
sticky chain whose hold probability decays on a root-t-log-t budget, its
independent drifting-marginal control, changepoints, and periodic patterns.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import xlogy

from ._backend import sample_markov1, sample_markov_ctx
from .counts import counts_from_stream


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def spawn_rngs(seed: int, n: int):
    """Independent per-repetition generators derived from one seed."""
    return [np.random.Generator(np.random.Philox(s))
            for s in np.random.SeedSequence(seed).spawn(n)]


def _check_prob(name: str, value: float) -> float:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return float(value)


def cumulative_drift(t) -> np.ndarray:
    """Total drift budget F(t) = min(t/2, sqrt(t) ln(1+t))."""
    t = np.asarray(t, dtype=np.float64)
    return np.minimum(0.5 * t, np.sqrt(t) * np.log1p(t))


def delta_schedule(s) -> np.ndarray:
    """Per-step drift delta_s = F(s+1) - F(s) for s >= 1, clipped to [0, 1/2].

    Equals 1/2 while the linear branch of F is active (fully sticky early
    steps), then decays like ln(s) / (2 sqrt(s)).
    """
    s = np.asarray(s, dtype=np.float64)
    if np.any(s < 1):
        raise ValueError("schedule index starts at 1")
    return np.clip(cumulative_drift(s + 1.0) - cumulative_drift(s), 0.0, 0.5)


@dataclass(frozen=True)
class Bernoulli:
    p: float


@dataclass(frozen=True)
class Markov1:
    """First-order chain: p10 = P(1 | 0), p11 = P(1 | 1), init = P(X1 = 1)."""
    p10: float
    p11: float
    init: float = 0.5


@dataclass(frozen=True)
class MarkovK:
    """Order-k binary chain; p_one[c] = P(1 | context code c), contexts in
    base-2 code order oldest symbol most significant. First k symbols are
    uniform unless init gives them."""
    k: int
    p_one: tuple
    init: Optional[tuple] = None


@dataclass(frozen=True)
class TimeVaryingMarkov:
    """Sticky chain: X1 fair, then X_s repeats X_{s-1} with prob 1/2 + delta(s-1)."""
    schedule: Callable = delta_schedule


@dataclass(frozen=True)
class DriftingBernoulli:
    """Independent control with the sticky chain's marginal drift:
    X1 fair, then X_s ~ Bernoulli(1/2 + delta(s-1))."""
    schedule: Callable = delta_schedule


@dataclass(frozen=True)
class Changepoint:
    """Bernoulli(p) for the first n symbols, Bernoulli(q) ever after."""
    p: float
    q: float
    n: int


@dataclass(frozen=True)
class Pattern:
    """Deterministic periodic repetition of a digit string like '0011'."""
    pattern: str


def sample_with_rng(source, t_max: int, rng: np.random.Generator) -> np.ndarray:
    if t_max < 1:
        raise ValueError(f"t_max must be >= 1, got {t_max}")
    if isinstance(source, Bernoulli):
        p = _check_prob("p", source.p)
        return (rng.random(t_max) < p).astype(np.int64)
    if isinstance(source, Markov1):
        p10 = _check_prob("p10", source.p10)
        p11 = _check_prob("p11", source.p11)
        init = _check_prob("init", source.init)
        u = rng.random(t_max)
        x0 = int(u[0] < init)
        return sample_markov1(u, p10, p11, x0)
    if isinstance(source, MarkovK):
        if source.k < 1:
            raise ValueError(f"order must be >= 1, got {source.k}")
        p_one = np.asarray(source.p_one, dtype=np.float64)
        if p_one.shape != (1 << source.k,):
            raise ValueError(
                f"need {1 << source.k} context probabilities, got {p_one.shape}")
        if np.any((p_one < 0.0) | (p_one > 1.0)):
            raise ValueError("context probabilities must lie in [0, 1]")
        if source.init is None:
            init = rng.integers(0, 2, size=source.k).astype(np.int64)
        else:
            init = np.asarray(source.init, dtype=np.int64)
            if init.shape != (source.k,) or np.any((init < 0) | (init > 1)):
                raise ValueError("init must give k binary symbols")
        cdf = np.stack([1.0 - p_one, np.ones_like(p_one)], axis=1)
        u = rng.random(t_max)
        return sample_markov_ctx(u, cdf, 2, source.k, init)
    if isinstance(source, TimeVaryingMarkov):
        u = rng.random(t_max)
        x1 = np.int64(u[0] < 0.5)
        if t_max == 1:
            return np.array([x1])
        delta = source.schedule(np.arange(1, t_max))
        flips = (u[1:] >= 0.5 + delta).astype(np.int64)
        return (x1 + np.concatenate(([0], np.cumsum(flips)))) % 2
    if isinstance(source, DriftingBernoulli):
        u = rng.random(t_max)
        out = np.empty(t_max, dtype=np.int64)
        out[0] = u[0] < 0.5
        if t_max > 1:
            delta = source.schedule(np.arange(1, t_max))
            out[1:] = u[1:] < 0.5 + delta
        return out
    if isinstance(source, Changepoint):
        p = _check_prob("p", source.p)
        q = _check_prob("q", source.q)
        if source.n < 0:
            raise ValueError(f"changepoint must be >= 0, got {source.n}")
        u = rng.random(t_max)
        thresh = np.where(np.arange(t_max) < source.n, p, q)
        return (u < thresh).astype(np.int64)
    if isinstance(source, Pattern):
        base = np.array([int(ch) for ch in source.pattern], dtype=np.int64)
        if base.size == 0 or np.any(base < 0):
            raise ValueError(f"bad pattern {source.pattern!r}")
        reps = -(-t_max // base.size)
        return np.tile(base, reps)[:t_max]
    raise TypeError(f"unknown source {source!r}")


def sample(source, t_max: int, seed: int) -> np.ndarray:
    return sample_with_rng(source, t_max, rng_for(seed))


@dataclass(frozen=True)
class LimitParams:
    """Limiting pair frequencies: alpha = 11, beta = 00, gamma = 10 (= 01),
    p = marginal frequency of ones."""
    alpha: float
    beta: float
    gamma: float
    p: float

    def validate(self, atol: float = 1e-9) -> None:
        for name in ("alpha", "beta", "gamma", "p"):
            _check_prob(name, getattr(self, name))
        if abs(self.alpha + self.gamma - self.p) > atol:
            raise ValueError("pair frequencies starting in 1 must sum to p")
        if abs(self.beta + self.gamma - (1.0 - self.p)) > atol:
            raise ValueError("pair frequencies starting in 0 must sum to 1 - p")


def stationary_limits(p10: float, p11: float) -> LimitParams:
    """Limit frequencies of an ergodic first-order chain."""
    p10 = _check_prob("p10", p10)
    p11 = _check_prob("p11", p11)
    denom = p10 + (1.0 - p11)
    if denom == 0.0:
        raise ValueError("both states absorbing; no unique stationary law")
    p = p10 / denom
    return LimitParams(alpha=p * p11, beta=(1.0 - p) * (1.0 - p10),
                       gamma=p * (1.0 - p11), p=p)


def empirical_limits(x) -> LimitParams:
    """Pair frequencies of an observed stream (symmetrized in gamma).

    The identities in LimitParams.validate hold only up to O(1/t) here;
    pass atol of that order downstream.
    """
    x = np.asarray(x, dtype=np.int64)
    if len(x) < 2:
        raise ValueError("need at least two symbols")
    if np.any((x < 0) | (x > 1)):
        raise ValueError("stream must be binary")
    c = counts_from_stream(x, 2, 1)
    pairs = len(x) - 1
    alpha = c.ctx[1, 1] / pairs
    beta = c.ctx[0, 0] / pairs
    gamma = (c.ctx[1, 0] + c.ctx[0, 1]) / (2.0 * pairs)
    return LimitParams(alpha=alpha, beta=beta, gamma=gamma, p=float(np.mean(x[:-1])))


def growth_rate_rstar(limits: LimitParams, atol: float = 1e-9) -> float:
    """Almost-sure growth rate of (1/t) ln R_t for sources with these limits.

    Nonnegative; zero exactly when the pair frequencies factorize
    (alpha (1-p) = gamma p), which is the exchangeable case.
    """
    limits.validate(atol)
    a, b, g, p = limits.alpha, limits.beta, limits.gamma, limits.p
    if math.isclose(a * (1.0 - p), g * p, rel_tol=1e-12, abs_tol=1e-300):
        return 0.0
    rate = (xlogy(a, a) - xlogy(a, p)
            + xlogy(g, g) - xlogy(g, p)
            + xlogy(g, g) - xlogy(g, 1.0 - p)
            + xlogy(b, b) - xlogy(b, 1.0 - p)
            - xlogy(p, p) - xlogy(1.0 - p, 1.0 - p))
    return max(float(rate), 0.0)


def rstar_markov1(p10: float, p11: float) -> float:
    return growth_rate_rstar(stationary_limits(p10, p11))
