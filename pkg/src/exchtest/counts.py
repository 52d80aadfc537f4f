"""Exact sufficient statistics of a finite-alphabet stream.

Maintains per-context transition counts (contexts are the last k symbols,
encoded as base-d integers), marginal symbol counts, and the time index.
These are the only statistics any evidence computation needs.
"""
from __future__ import annotations

import numpy as np

# Dense context tables: reject configurations with more than 2^30 contexts.
_MAX_CONTEXT_BITS = 30.0


def check_alphabet_order(d: int, k: int) -> None:
    """Validate an (alphabet size, context order) configuration."""
    if d < 2:
        raise ValueError(f"alphabet size must be >= 2, got {d}")
    if k < 0:
        raise ValueError(f"context order must be >= 0, got {k}")
    if k * np.log2(d) > _MAX_CONTEXT_BITS:
        raise ValueError(f"context table d^k too large: d={d}, k={k}")


class TransitionCounts:
    """Counts n_a (marginal) and n_{a|c} (symbol a following context c).

    The first k symbols build up the context and produce no transition
    counts. Context codes treat the oldest symbol in the window as the most
    significant base-d digit.
    """

    __slots__ = ("d", "k", "t", "marginal", "ctx", "_code")

    def __init__(self, d: int = 2, k: int = 1):
        check_alphabet_order(d, k)
        self.d = d
        self.k = k
        self.t = 0
        self.marginal = np.zeros(d, dtype=np.int64)
        self.ctx = np.zeros((d ** k, d), dtype=np.int64)
        self._code = 0  # base-d code of the last min(t, k) symbols

    @property
    def context_code(self) -> int:
        """Code of the current context; meaningful once t >= k."""
        return self._code

    def observe(self, a: int) -> None:
        if not 0 <= a < self.d:
            raise ValueError(f"symbol {a} out of range for alphabet size {self.d}")
        if self.t >= self.k:
            self.ctx[self._code, a] += 1
        self.marginal[a] += 1
        self.t += 1
        if self.k > 0:
            code = self._code * self.d + a
            if self.t >= self.k:
                code %= self.d ** self.k
            self._code = code

    def observe_all(self, symbols) -> None:
        for a in symbols:
            self.observe(int(a))

    def copy(self) -> "TransitionCounts":
        new = TransitionCounts.__new__(TransitionCounts)
        new.d, new.k, new.t, new._code = self.d, self.k, self.t, self._code
        new.marginal = self.marginal.copy()
        new.ctx = self.ctx.copy()
        return new

    def __repr__(self) -> str:
        return f"TransitionCounts(d={self.d}, k={self.k}, t={self.t})"


def counts_from_stream(symbols, d: int = 2, k: int = 1) -> TransitionCounts:
    """Replay a whole stream into a fresh TransitionCounts."""
    counts = TransitionCounts(d, k)
    counts.observe_all(symbols)
    return counts
