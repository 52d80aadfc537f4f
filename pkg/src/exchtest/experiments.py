"""Batch experiments over seeded sources and canned replication recipes.

run_experiment samples many independent streams, evaluates a chosen
e-process family on each, and records log evidence on a checkpoint grid
(full trajectories are only held one repetition at a time). The replication
registry regenerates the summary tables and plots used in the docs from
pinned seeds, so reruns are byte-identical.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .alternatives import (KTPredictor, betting_eprocess,
                           changepoint_mixture_trajectory,
                           order_mixture_trajectory)
from .calibrate import log_p_process
from .confseq import conf_interval_trajectory, running_intersection_trajectory
from .evidence import evidence_trajectory
from .sources import (Bernoulli, Changepoint, DriftingBernoulli, Markov1,
                      TimeVaryingMarkov, cumulative_drift, rstar_markov1,
                      sample_with_rng, spawn_rngs)

FAMILIES = ("core", "double-mixture", "changepoint-mixture", "betting")


def compute_trajectory(x, d: int = 2, k: int = 1, family: str = "core") -> np.ndarray:
    """Log evidence trajectory of the selected e-process family."""
    if family == "core":
        return evidence_trajectory(x, d, k)
    if family == "double-mixture":
        return order_mixture_trajectory(x, d)
    if family == "changepoint-mixture":
        return changepoint_mixture_trajectory(x, d)
    if family == "betting":
        return betting_eprocess(KTPredictor(d, k), x, d)
    raise ValueError(f"unknown family {family!r}; choose one of {FAMILIES}")


def default_checkpoints(t_max: int, n: int = 200) -> np.ndarray:
    """Roughly geometric grid of times, always ending at t_max."""
    if t_max < 1:
        raise ValueError(f"t_max must be >= 1, got {t_max}")
    grid = np.unique(np.geomspace(1, t_max, num=min(n, t_max)).astype(np.int64))
    grid[-1] = t_max
    return grid


@dataclass
class ExperimentResult:
    times: np.ndarray
    log_evidence: np.ndarray  # (reps, len(times))
    quantiles: dict
    rstar: Optional[float]
    seed: int
    family: str


def run_experiment(source, t_max: int, reps: int, seed: int, d: int = 2,
                   k: int = 1, family: str = "core", checkpoints=None,
                   quantiles=(0.1, 0.5, 0.9)) -> ExperimentResult:
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    times = (default_checkpoints(t_max) if checkpoints is None
             else np.asarray(checkpoints, dtype=np.int64))
    if np.any((times < 1) | (times > t_max)):
        raise ValueError("checkpoints must lie in 1..t_max")
    values = np.empty((reps, len(times)))
    for i, rng in enumerate(spawn_rngs(seed, reps)):
        x = sample_with_rng(source, t_max, rng)
        values[i] = compute_trajectory(x, d, k, family)[times - 1]
    qs = {q: np.quantile(values, q, axis=0) for q in quantiles}
    rstar = None
    if isinstance(source, Markov1):
        try:
            rstar = rstar_markov1(source.p10, source.p11)
        except ValueError:
            rstar = None
    return ExperimentResult(times=times, log_evidence=values, quantiles=qs,
                            rstar=rstar, seed=seed, family=family)


def _quantile_columns(result: ExperimentResult):
    return (result.quantiles[0.1], result.quantiles[0.5], result.quantiles[0.9])


def _null_figure(p: float, seed: int, t_max: int = 10_000, reps: int = 20):
    res = run_experiment(Bernoulli(p), t_max, reps, seed)
    q10, q50, q90 = _quantile_columns(res)
    t = res.times.astype(np.float64)
    cols = ["t", "ln_r_q10", "ln_r_median", "ln_r_q90", "neg_ln_t"]
    rows = np.column_stack([t, q10, q50, q90, -np.log(t)])
    curves = [("ln R (10%-90%)", t, q10), ("", t, q90),
              ("ln R median", t, q50), ("-ln t", t, -np.log(t))]
    return cols, rows, curves, f"evidence under Bernoulli({p})"


def _markov_figure(p10: float, p11: float, seed: int, t_max: int = 10_000,
                   reps: int = 20):
    res = run_experiment(Markov1(p10, p11), t_max, reps, seed)
    q10, q50, q90 = _quantile_columns(res)
    t = res.times.astype(np.float64)
    cols = ["t", "ln_r_q10", "ln_r_median", "ln_r_q90", "rstar_t"]
    rows = np.column_stack([t, q10, q50, q90, res.rstar * t])
    curves = [("ln R (10%-90%)", t, q10), ("", t, q90),
              ("ln R median", t, q50), ("r* t", t, res.rstar * t)]
    return cols, rows, curves, f"evidence under Markov({p10}, {p11})"


def _sticky_figure(seed: int, t_max: int = 100_000, reps: int = 20,
                   lil_const: float = 1.0):
    res = run_experiment(TimeVaryingMarkov(), t_max, reps, seed)
    q10, q50, q90 = _quantile_columns(res)
    t = res.times.astype(np.float64)
    drift = cumulative_drift(t)
    with np.errstate(invalid="ignore", divide="ignore"):
        wobble = lil_const * np.sqrt(t * np.log(np.log(t)))
    wobble = np.where(t >= 16, wobble, np.nan)
    guide_hi = 2.0 / t * (drift + wobble) ** 2
    guide_lo = 2.0 / t * np.maximum(drift - wobble, 0.0) ** 2
    cols = ["t", "ln_r_q10", "ln_r_median", "ln_r_q90", "guide_lo", "guide_hi"]
    rows = np.column_stack([t, q10, q50, q90, guide_lo, guide_hi])
    curves = [("ln R (10%-90%)", t, q10), ("", t, q90),
              ("ln R median", t, q50),
              ("drift guide", t, guide_lo), ("", t, guide_hi)]
    return cols, rows, curves, "evidence under the sticky chain"


def _drift_control_figure(seed: int, t_max: int = 100_000, reps: int = 20):
    res = run_experiment(DriftingBernoulli(), t_max, reps, seed)
    q10, q50, q90 = _quantile_columns(res)
    t = res.times.astype(np.float64)
    cols = ["t", "ln_r_q10", "ln_r_median", "ln_r_q90"]
    rows = np.column_stack([t, q10, q50, q90])
    curves = [("ln R (10%-90%)", t, q10), ("", t, q90), ("ln R median", t, q50)]
    return cols, rows, curves, "evidence under the independent drifting control"


def _changepoint_figure(seed: int, t_max: int = 10_000, n_change: int = 5000):
    rng = spawn_rngs(seed, 1)[0]
    x = sample_with_rng(Changepoint(0.1, 0.4, n_change), t_max, rng)
    times = default_checkpoints(t_max)
    mix = changepoint_mixture_trajectory(x)
    core = evidence_trajectory(x, 2, 1)
    log10_p = log_p_process(mix) / np.log(10.0)
    t = times.astype(np.float64)
    cols = ["t", "ln_r_mixture", "ln_r_core", "log10_p"]
    rows = np.column_stack([t, mix[times - 1], core[times - 1],
                            log10_p[times - 1]])
    curves = [("ln R changepoint mixture", t, mix[times - 1]),
              ("ln R order-1", t, core[times - 1])]
    return cols, rows, curves, "changepoint stream, change at t=5000"


def _confseq_figure(source, seed: int, t_max: int,
                    alphas=(0.05, 0.1, 0.25)):
    rng = spawn_rngs(seed, 1)[0]
    x = sample_with_rng(source, t_max, rng)
    times = default_checkpoints(t_max)
    t = times.astype(np.float64)
    blocks = []
    curves = []
    for alpha in alphas:
        lo, hi, empty = conf_interval_trajectory(x, alpha)
        run_lo, run_hi, run_empty = running_intersection_trajectory(lo, hi, empty)
        idx = times - 1
        blocks.append(np.column_stack([
            t, np.full_like(t, alpha), lo[idx], hi[idx],
            run_lo[idx], run_hi[idx], run_empty[idx].astype(np.float64)]))
        curves.append((f"lo a={alpha}", t, run_lo[idx]))
        curves.append((f"hi a={alpha}", t, run_hi[idx]))
    cols = ["t", "alpha", "lo", "hi", "lo_run", "hi_run", "empty"]
    return cols, np.vstack(blocks), curves


_FIG_SEEDS = {
    "fig3a": 1103, "fig3b": 1113, "fig4a": 1104, "fig4b": 1114,
    "fig5a": 1105, "fig5b": 1115, "fig7": 1107, "fig8a": 1108, "fig8b": 1118,
}

REPLICATION_IDS = tuple(sorted(_FIG_SEEDS))


def replicate_figure(fig_id: str, reps: Optional[int] = None) -> dict:
    """Regenerate one pinned figure; returns columns, rows, curves, title."""
    if fig_id not in _FIG_SEEDS:
        raise ValueError(f"unknown figure id {fig_id!r}; "
                         f"choose one of {', '.join(REPLICATION_IDS)}")
    seed = _FIG_SEEDS[fig_id]
    rep_kw = {} if reps is None else {"reps": reps}
    if fig_id == "fig3a":
        cols, rows, curves, title = _null_figure(0.5, seed, **rep_kw)
    elif fig_id == "fig3b":
        cols, rows, curves, title = _null_figure(0.2, seed, **rep_kw)
    elif fig_id == "fig4a":
        cols, rows, curves, title = _markov_figure(0.1, 0.9, seed, **rep_kw)
    elif fig_id == "fig4b":
        cols, rows, curves, title = _markov_figure(0.4, 0.6, seed, **rep_kw)
    elif fig_id == "fig5a":
        cols, rows, curves, title = _sticky_figure(seed, **rep_kw)
    elif fig_id == "fig5b":
        cols, rows, curves, title = _drift_control_figure(seed, **rep_kw)
    elif fig_id == "fig7":
        cols, rows, curves, title = _changepoint_figure(seed)
    elif fig_id == "fig8a":
        cols, rows, curves = _confseq_figure(Markov1(0.1, 0.9), seed, 2000)
        title = "confidence sequence under Markov(0.1, 0.9)"
    else:
        cols, rows, curves = _confseq_figure(Bernoulli(0.2), seed, 5000)
        title = "confidence sequence under Bernoulli(0.2)"
    return {"id": fig_id, "columns": cols, "rows": rows, "curves": curves,
            "title": title, "seed": seed}
