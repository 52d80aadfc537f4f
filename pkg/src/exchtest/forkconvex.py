"""Finite binary tree processes and fork-convex combinations.

A process on {0,1}^T is stored as one flat array of likelihood-ratio values
Z(x) over all 2^(T+1)-1 prefixes, node (level, bits) at index 2^level-1+bits
with bits reading the prefix most significant first. Validity means root 1,
nonnegative values, and each parent equal to the mean of its children.

Fork-convex combination switches a fraction 1-h(x_1..x_s) of mass from Z to
the rescaled continuation of Z' after time s. The class of processes that
are supermartingale-dominated is closed under this operation, and the
fork-convex hull of the single-parameter Bernoulli family reaches every
valid tree law; both facts are exercised numerically by the trial runners
at the bottom, which back the verify-theory command.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MAX_HORIZON = 20


def n_nodes(horizon: int) -> int:
    return (1 << (horizon + 1)) - 1


def node_index(level: int, bits: int) -> int:
    return (1 << level) - 1 + bits


def _level(level: int) -> slice:
    return slice((1 << level) - 1, (1 << (level + 1)) - 1)


def _check_horizon(horizon: int) -> None:
    if not 0 < horizon <= _MAX_HORIZON:
        raise ValueError(f"horizon must be in 1..{_MAX_HORIZON}, got {horizon}")


def _popcount(bits: np.ndarray) -> np.ndarray:
    if hasattr(np, "bitwise_count"):
        return np.bitwise_count(bits)
    out = np.zeros_like(bits)
    work = bits.copy()
    while np.any(work):
        out += work & 1
        work >>= 1
    return out


def bernoulli_tree_values(p, horizon: int) -> np.ndarray:
    """Likelihood-ratio values of i.i.d. Bernoulli(p) against fair coin flips.

    Z(x) = 2^level p^(#ones) (1-p)^(#zeros). p may be an array for a batch,
    giving shape (batch, nodes).
    """
    _check_horizon(horizon)
    p = np.asarray(p, dtype=np.float64)
    out = np.empty(p.shape + (n_nodes(horizon),))
    out[..., 0] = 1.0
    for lev in range(1, horizon + 1):
        bits = np.arange(1 << lev)
        ones = _popcount(bits)
        out[..., _level(lev)] = (
            2.0 ** lev
            * p[..., None] ** ones
            * (1.0 - p[..., None]) ** (lev - ones))
    return out


def _tree_from_conditionals(q: np.ndarray, horizon: int) -> np.ndarray:
    """Build values from per-internal-node P(next=1 | prefix), batched."""
    out = np.empty(q.shape[:-1] + (n_nodes(horizon),))
    out[..., 0] = 1.0
    for lev in range(horizon):
        par = out[..., _level(lev)]
        qs = q[..., _level(lev)]
        child = np.stack([2.0 * par * (1.0 - qs), 2.0 * par * qs], axis=-1)
        out[..., _level(lev + 1)] = child.reshape(q.shape[:-1] + (1 << (lev + 1),))
    return out


def _tree_conditionals(values: np.ndarray, horizon: int) -> np.ndarray:
    """Per-internal-node P(next=1 | prefix); 1/2 where the prefix has mass 0."""
    q = np.empty(values.shape[:-1] + ((1 << horizon) - 1,))
    for lev in range(horizon):
        kids = values[..., _level(lev + 1)]
        v1 = kids[..., 1::2]
        v0 = kids[..., 0::2]
        tot = v0 + v1
        q[..., _level(lev)] = np.where(tot > 0.0, v1 / np.where(tot > 0, tot, 1.0), 0.5)
    return q


def _lr_gap(values: np.ndarray, horizon: int):
    """Max defect of the likelihood-ratio tree conditions (batched)."""
    gap = np.abs(values[..., 0] - 1.0)
    gap = np.maximum(gap, np.max(np.minimum(values, 0.0) * -1.0, axis=-1))
    for lev in range(horizon):
        par = values[..., _level(lev)]
        kids = values[..., _level(lev + 1)]
        mean = 0.5 * (kids[..., 0::2] + kids[..., 1::2])
        gap = np.maximum(gap, np.max(np.abs(mean - par), axis=-1))
    return gap


def _combine_values(z: np.ndarray, zp: np.ndarray, horizon: int, s: int,
                    h: np.ndarray) -> np.ndarray:
    """Fork-convex combination on raw value arrays (batched on leading axes)."""
    if not 0 <= s < horizon:
        raise ValueError(f"switch time must be in 0..{horizon - 1}, got {s}")
    h = np.asarray(h, dtype=np.float64)
    if h.shape[-1] != (1 << s):
        raise ValueError(f"h must have {1 << s} entries, got {h.shape[-1]}")
    if np.any((h < 0.0) | (h > 1.0)):
        raise ValueError("h values must lie in [0, 1]")
    zp_s = zp[..., _level(s)]
    if np.any((zp_s == 0.0) & (h != 1.0)):
        raise ValueError("h must equal 1 wherever the incoming process has mass 0 at the switch time")
    out = z.copy()
    z_s = z[..., _level(s)]
    safe_zp_s = np.where(zp_s > 0.0, zp_s, 1.0)
    for lev in range(s + 1, horizon + 1):
        anc = np.arange(1 << lev) >> (lev - s)
        hh = h[..., anc]
        ratio = zp[..., _level(lev)] / safe_zp_s[..., anc]
        out[..., _level(lev)] = (
            hh * z[..., _level(lev)]
            + (1.0 - hh) * z_s[..., anc] * ratio)
    return out


def _supermartingale_gap(l_vals: np.ndarray, z_vals: np.ndarray, horizon: int):
    """Max over internal nodes of E_Z[L(next) | x] - L(x) (batched)."""
    gap = np.full(np.broadcast_shapes(l_vals.shape[:-1], z_vals.shape[:-1]), -np.inf)
    for lev in range(horizon):
        zl_par = z_vals[..., _level(lev)] * l_vals[..., _level(lev)]
        zl_kids = z_vals[..., _level(lev + 1)] * l_vals[..., _level(lev + 1)]
        step = 0.5 * (zl_kids[..., 0::2] + zl_kids[..., 1::2]) - zl_par
        gap = np.maximum(gap, np.max(step, axis=-1))
    return gap


@dataclass
class TreeProcess:
    """A likelihood-ratio process on binary strings up to a fixed horizon."""

    horizon: int
    values: np.ndarray

    def __post_init__(self):
        _check_horizon(self.horizon)
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (n_nodes(self.horizon),):
            raise ValueError(
                f"expected {n_nodes(self.horizon)} node values, got {self.values.shape}")

    @classmethod
    def bernoulli(cls, p: float, horizon: int) -> "TreeProcess":
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {p}")
        return cls(horizon, bernoulli_tree_values(float(p), horizon))

    @classmethod
    def from_conditionals(cls, q, horizon: int) -> "TreeProcess":
        q = np.asarray(q, dtype=np.float64)
        if np.any((q < 0.0) | (q > 1.0)):
            raise ValueError("conditionals must lie in [0, 1]")
        return cls(horizon, _tree_from_conditionals(q, horizon))

    def value(self, prefix: str) -> float:
        """Value at a prefix written as a 0/1 string; '' is the root."""
        level = len(prefix)
        bits = int(prefix, 2) if prefix else 0
        return float(self.values[node_index(level, bits)])

    def conditionals(self) -> np.ndarray:
        return _tree_conditionals(self.values, self.horizon)

    def lr_gap(self) -> float:
        return float(_lr_gap(self.values, self.horizon))

    def is_valid(self, tol: float = 1e-9) -> bool:
        return self.lr_gap() <= tol


def fork_convex_combine(z: TreeProcess, zp: TreeProcess, s: int, h) -> TreeProcess:
    """h(x_1..x_s) of Z plus (1-h) of Z' rescaled to continue from Z at time s.

    h must equal 1 wherever Z' has mass 0 at the switch time (there is no
    continuation to borrow there).
    """
    if z.horizon != zp.horizon:
        raise ValueError("horizons differ")
    return TreeProcess(z.horizon, _combine_values(z.values, zp.values, z.horizon, s, h))


def supermartingale_gap(l: TreeProcess, z: TreeProcess) -> float:
    """Worst one-step drift of L under the law with likelihood ratio Z."""
    if l.horizon != z.horizon:
        raise ValueError("horizons differ")
    return float(_supermartingale_gap(l.values, z.values, l.horizon))


def is_supermartingale(l: TreeProcess, z: TreeProcess, tol: float = 1e-10) -> bool:
    return supermartingale_gap(l, z) <= tol


def hull_approximation(target: TreeProcess, s: int,
                       clip_eps: float = 1e-9) -> TreeProcess:
    """Reach the target law down to level s using only Bernoulli trees and combines.

    Conditionals of the target are clipped away from {0, 1} (combines cannot
    regenerate mass on a branch a Bernoulli tree gave positive mass), so the
    construction matches the clipped rebuild of the target, to rounding, at
    all levels <= s. Levels beyond s keep Bernoulli continuations.
    """
    horizon = target.horizon
    if not 1 <= s <= horizon:
        raise ValueError(f"depth must be in 1..{horizon}, got {s}")
    q = np.clip(_tree_conditionals(target.values, horizon), clip_eps, 1.0 - clip_eps)
    acc = bernoulli_tree_values(float(q[0]), horizon)
    for lev in range(1, s):
        q_lev = q[_level(lev)]
        mix = bernoulli_tree_values(float(q_lev[0]), horizon)
        for m in range(1, 1 << lev):
            h = np.ones(1 << lev)
            h[m] = 0.0
            mix = _combine_values(mix, bernoulli_tree_values(float(q_lev[m]), horizon),
                                  horizon, lev, h)
        acc = _combine_values(acc, mix, horizon, lev, np.zeros(1 << lev))
    return TreeProcess(horizon, acc)


def clipped_rebuild(target: TreeProcess, clip_eps: float = 1e-9) -> TreeProcess:
    """The target with conditionals clipped into [eps, 1-eps] (hull reference)."""
    q = np.clip(_tree_conditionals(target.values, target.horizon),
                clip_eps, 1.0 - clip_eps)
    return TreeProcess(target.horizon, _tree_from_conditionals(q, target.horizon))


def agreement_gap(a: TreeProcess, b: TreeProcess, depth: int) -> float:
    """Max absolute value difference over all nodes at levels <= depth."""
    if a.horizon != b.horizon:
        raise ValueError("horizons differ")
    upto = n_nodes(depth)
    return float(np.max(np.abs(a.values[:upto] - b.values[:upto])))


@dataclass(frozen=True)
class NSMCheck:
    grid_pass: bool
    nonincreasing_pass: bool
    implication_holds: bool
    max_grid_drift: float
    max_step_excess: float


def nsm_nonincreasing_check(l: TreeProcess, p_grid, tol: float = 1e-9) -> NSMCheck:
    """Supermartingale under every Bernoulli(p) in the grid implies path decay.

    The decay allows the slack forced by a finite grid: along a 1-step
    L(x1) <= (L(x) + tol) / p_max, along a 0-step
    L(x0) <= (L(x) + tol) / (1 - p_min).
    """
    p_grid = np.asarray(p_grid, dtype=np.float64)
    if p_grid.size == 0 or np.any((p_grid <= 0.0) | (p_grid >= 1.0)):
        raise ValueError("p grid must be nonempty and inside (0, 1)")
    horizon = l.horizon
    grid_drift = -np.inf
    step_excess = -np.inf
    inv_p_max = 1.0 / np.max(p_grid)
    inv_q_max = 1.0 / (1.0 - np.min(p_grid))
    for lev in range(horizon):
        par = l.values[_level(lev)]
        kids = l.values[_level(lev + 1)]
        l0, l1 = kids[0::2], kids[1::2]
        for p in p_grid:
            grid_drift = max(grid_drift, float(np.max(p * l1 + (1.0 - p) * l0 - par)))
        bound1 = (par + tol) * inv_p_max
        bound0 = (par + tol) * inv_q_max
        step_excess = max(step_excess,
                          float(np.max(l1 - bound1)), float(np.max(l0 - bound0)))
    grid_pass = bool(grid_drift <= tol)
    nonincreasing_pass = bool(step_excess <= tol)
    return NSMCheck(grid_pass, nonincreasing_pass,
                    (not grid_pass) or nonincreasing_pass,
                    grid_drift, step_excess)


def random_tree_values(rng: np.random.Generator, n: int, horizon: int,
                       q_low: float = 0.05, q_high: float = 0.95) -> np.ndarray:
    """Batch of valid likelihood-ratio trees with conditionals in [q_low, q_high]."""
    q = rng.uniform(q_low, q_high, size=(n, (1 << horizon) - 1))
    return _tree_from_conditionals(q, horizon)


def random_supermartingale_values(rng: np.random.Generator, z_a: np.ndarray,
                                  z_b: np.ndarray, horizon: int) -> np.ndarray:
    """Positive processes that are supermartingales under both given laws.

    Starts from i.i.d. lognormal node values and rescales each sibling pair
    top-down so the one-step drift is nonpositive under both laws.
    """
    l_vals = np.exp(rng.normal(0.0, 0.5, size=z_a.shape))
    for lev in range(horizon):
        sl_par = _level(lev)
        sl_kid = _level(lev + 1)
        worst = np.zeros(l_vals[..., sl_par].shape)
        for z in (z_a, z_b):
            zl_par = z[..., sl_par] * l_vals[..., sl_par]
            num = (z[..., sl_kid] * l_vals[..., sl_kid])
            drift = 0.5 * (num[..., 0::2] + num[..., 1::2]) / zl_par
            worst = np.maximum(worst, drift)
        scale = np.minimum(1.0, 1.0 / worst)
        l_vals[..., sl_kid] *= np.repeat(scale, 2, axis=-1)
    return l_vals


def run_lemma_trials(n_trials: int, horizon: int = 4, seed: int = 0,
                     tol: float = 1e-10) -> dict:
    """Random check that fork-convex combinations stay valid likelihood-ratio
    trees and preserve joint supermartingales.

    Each trial draws laws Z, Z', a process L that is a supermartingale under
    both, a switch time s, and a selector h (with exact 0 and 1 values mixed
    in), and measures both the tree defect of the combination and the drift
    of L under it.
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    z_a = random_tree_values(rng, n_trials, horizon)
    z_b = random_tree_values(rng, n_trials, horizon)
    l_vals = random_supermartingale_values(rng, z_a, z_b, horizon)
    s_all = rng.integers(0, horizon, size=n_trials)
    max_lr_gap = 0.0
    max_drift_before = np.max(np.maximum(
        _supermartingale_gap(l_vals, z_a, horizon),
        _supermartingale_gap(l_vals, z_b, horizon)))
    max_drift_after = -np.inf
    for s in range(horizon):
        rows = np.nonzero(s_all == s)[0]
        if rows.size == 0:
            continue
        h = rng.uniform(0.0, 1.0, size=(rows.size, 1 << s))
        kind = rng.random(size=h.shape)
        h = np.where(kind < 0.2, 0.0, np.where(kind > 0.8, 1.0, h))
        z_comb = _combine_values(z_a[rows], z_b[rows], horizon, s, h)
        max_lr_gap = max(max_lr_gap, float(np.max(_lr_gap(z_comb, horizon))))
        max_drift_after = max(max_drift_after,
                              float(np.max(_supermartingale_gap(l_vals[rows], z_comb, horizon))))
    passed = max_lr_gap <= tol and max_drift_after <= tol
    return {
        "n_trials": int(n_trials),
        "horizon": int(horizon),
        "max_lr_gap": float(max_lr_gap),
        "max_drift_before": float(max_drift_before),
        "max_drift_after": float(max_drift_after),
        "tol": float(tol),
        "passed": bool(passed),
    }


def run_hull_trials(n_targets: int, horizon: int = 6, seed: int = 0,
                    tol: float = 1e-9) -> dict:
    """Random targets reached by the Bernoulli-tree hull construction."""
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    worst = 0.0
    for i in range(n_targets):
        q = rng.uniform(0.02, 0.98, size=(1 << horizon) - 1)
        if i % 3 == 0:
            # degenerate conditionals exercise the clipping path
            hard = rng.integers(0, q.size, size=2)
            q[hard] = rng.integers(0, 2, size=2).astype(np.float64)
        target = TreeProcess.from_conditionals(q, horizon)
        s = int(rng.integers(1, horizon + 1))
        approx = hull_approximation(target, s)
        worst = max(worst, agreement_gap(approx, clipped_rebuild(target), s))
        worst = max(worst, approx.lr_gap())
    return {
        "n_targets": int(n_targets),
        "horizon": int(horizon),
        "max_agreement_gap": float(worst),
        "tol": float(tol),
        "passed": bool(worst <= tol),
    }


def run_nsm_trials(n_candidates: int, horizon: int = 3, seed: int = 0,
                   p_grid=None, tol: float = 1e-9) -> dict:
    """Grid-supermartingale candidates are nonincreasing within the grid slack.

    Half the candidates are arbitrary positive trees (they mostly fail the
    grid check, making the implication vacuous), half are rescaled to pass
    it, so both branches of the implication are exercised.
    """
    if p_grid is None:
        p_grid = np.linspace(0.1, 0.9, 9)
    p_grid = np.asarray(p_grid, dtype=np.float64)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    n_grid_pass = 0
    n_grid_fail = 0
    implication_failures = 0
    for i in range(n_candidates):
        vals = np.exp(rng.normal(0.0, 0.7, size=n_nodes(horizon)))
        if i % 2 == 0:
            for lev in range(horizon):
                par = vals[_level(lev)]
                kids = vals[_level(lev + 1)]
                worst = np.zeros_like(par)
                for p in p_grid:
                    worst = np.maximum(worst,
                                       (p * kids[1::2] + (1.0 - p) * kids[0::2]) / par)
                scale = np.minimum(1.0, 1.0 / worst)
                vals[_level(lev + 1)] *= np.repeat(scale, 2)
        check = nsm_nonincreasing_check(TreeProcess(horizon, vals), p_grid, tol)
        n_grid_pass += check.grid_pass
        n_grid_fail += not check.grid_pass
        implication_failures += not check.implication_holds
    return {
        "n_candidates": int(n_candidates),
        "n_grid_pass": int(n_grid_pass),
        "n_grid_fail": int(n_grid_fail),
        "implication_failures": int(implication_failures),
        "passed": bool(implication_failures == 0 and n_grid_pass > 0 and n_grid_fail > 0),
    }


def verify_theory_report(trials: int = 10000, seed: int = 0) -> dict:
    """Run all three randomized suites; `passed` is the conjunction."""
    lemma = run_lemma_trials(trials, horizon=4, seed=seed)
    hull = run_hull_trials(max(50, trials // 200), horizon=6, seed=seed + 1)
    nsm = run_nsm_trials(max(200, trials // 50), horizon=3, seed=seed + 2)
    return {
        "lemma": lemma,
        "hull": hull,
        "nsm": nsm,
        "passed": bool(lemma["passed"] and hull["passed"] and nsm["passed"]),
    }
