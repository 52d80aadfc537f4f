"""Pure-python (numpy) kernels: evidence trajectories and chain samplers.

Same API as the compiled module `_kernels_cy`; selected by `_backend` when the
extension is unavailable or EXCHTEST_PURE=1. Trajectory kernels are
vectorized via a stable-sort group-rank trick (the running count of earlier
equal keys), so no Python-level per-symbol loop is involved.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import xlogy

BACKEND = "python"


def _earlier_equal(keys: np.ndarray) -> np.ndarray:
    """For each position, the number of earlier positions with the same key."""
    n = len(keys)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    order = np.argsort(keys, kind="stable")
    sk = keys[order]
    new_grp = np.empty(n, dtype=bool)
    new_grp[0] = True
    np.not_equal(sk[1:], sk[:-1], out=new_grp[1:])
    idx = np.arange(n, dtype=np.int64)
    starts = idx[new_grp]
    pos_in_grp = idx - starts[np.cumsum(new_grp) - 1]
    out = np.empty(n, dtype=np.int64)
    out[order] = pos_in_grp
    return out


def kt_log_numerator(x: np.ndarray, d: int, k: int) -> np.ndarray:
    """Cumulative log of the per-context KT predictive product.

    The first k symbols are priced at ln(1/d) each; from then on symbol a in
    context c contributes ln((n_{a|c} + 1/2) / (n_c + d/2)) with counts taken
    just before the symbol.
    """
    x = np.asarray(x, dtype=np.int64)
    t = len(x)
    terms = np.full(t, -math.log(d))
    if t > k:
        if k == 0:
            codes = np.zeros(t, dtype=np.int64)
            tail = x
        else:
            w = d ** np.arange(k - 1, -1, -1, dtype=np.int64)
            windows = np.lib.stride_tricks.sliding_window_view(x, k)[: t - k]
            codes = windows @ w
            tail = x[k:]
        pair_rank = _earlier_equal(codes * d + tail)
        ctx_rank = _earlier_equal(codes)
        terms[k:] = np.log((pair_rank + 0.5) / (ctx_rank + 0.5 * d))
    return np.cumsum(terms)


def bernoulli_mle_log(x: np.ndarray, d: int) -> np.ndarray:
    """Cumulative max log-likelihood of an i.i.d. fit: sum_a n_a ln(n_a/t)."""
    x = np.asarray(x, dtype=np.int64)
    t = len(x)
    c = _earlier_equal(x).astype(np.float64)
    steps = xlogy(c + 1.0, c + 1.0) - xlogy(c, c)
    times = np.arange(1.0, t + 1.0)
    return np.cumsum(steps) - times * np.log(times)


def kt0_split_log_numerator(x: np.ndarray, d: int, split: int) -> np.ndarray:
    """Cumulative log numerator of two order-0 KT blocks split at `split`.

    Counts reset at index `split` (0-based); split >= len(x) means a single
    block. Each symbol contributes ln((n_a + 1/2) / (s + d/2)) with n_a and s
    counted within its own block.
    """
    x = np.asarray(x, dtype=np.int64)
    t = len(x)
    idx = np.arange(t, dtype=np.int64)
    seg = (idx >= split).astype(np.int64)
    rank = _earlier_equal(seg * d + x)
    pos = np.where(seg == 1, idx - split, idx)
    terms = np.log((rank + 0.5) / (pos + 0.5 * d))
    return np.cumsum(terms)


def sample_markov1(u: np.ndarray, p10: float, p11: float, x0: int) -> np.ndarray:
    """First-order binary chain driven by pre-drawn uniforms; u[0] is unused."""
    t = len(u)
    x = np.empty(t, dtype=np.int64)
    prev = int(x0)
    x[0] = prev
    for i in range(1, t):
        p = p11 if prev else p10
        prev = 1 if u[i] < p else 0
        x[i] = prev
    return x


def sample_markov_ctx(u: np.ndarray, cdf: np.ndarray, d: int, k: int,
                      init: np.ndarray) -> np.ndarray:
    """Order-k chain over alphabet d; cdf rows indexed by base-d context code.

    The first k symbols are copied from `init` (u[:k] unused).
    """
    t = len(u)
    dk = cdf.shape[0]
    x = np.empty(t, dtype=np.int64)
    code = 0
    for i in range(min(k, t)):
        x[i] = init[i]
        code = code * d + int(init[i])
    for i in range(k, t):
        a = int(np.searchsorted(cdf[code], u[i], side="right"))
        a = min(a, d - 1)  # guard u == 1.0 edge
        x[i] = a
        code = (code * d + a) % dk
    return x
