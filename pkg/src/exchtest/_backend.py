"""Kernel backend selection.

Prefers the compiled extension; falls back to the numpy implementation when
the extension is missing. Set EXCHTEST_PURE=1 to force the fallback.
"""
from __future__ import annotations

import os

if os.environ.get("EXCHTEST_PURE"):
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels_cy as kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as kernels

BACKEND: str = kernels.BACKEND

kt_log_numerator = kernels.kt_log_numerator
bernoulli_mle_log = kernels.bernoulli_mle_log
kt0_split_log_numerator = kernels.kt0_split_log_numerator
sample_markov1 = kernels.sample_markov1
sample_markov_ctx = kernels.sample_markov_ctx
