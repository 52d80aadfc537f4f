"""Calibration between e-processes, p-processes, and adjusted e-processes.

The running maximum of an e-process gives an anytime-valid p-process
p_t = min(1, 1/max_s R_s). A calibrator turns that p-process back into an
e-process, and an adjuster turns the running maximum itself into an
e-process, at a quantified price. Both closed forms used here integrate to
one against the uniform / unit-mean laws, which is all safety needs.
"""
from __future__ import annotations

import math

import numpy as np

_LOG_LN2 = math.log(math.log(2.0))


def p_process(evidence) -> np.ndarray:
    """Anytime p-values min(1, 1/max_{s<=t} R_s) from nonnegative evidence."""
    r = np.asarray(evidence, dtype=np.float64)
    if np.any(r < 0.0) or np.any(np.isnan(r)):
        raise ValueError("evidence values must be nonnegative")
    with np.errstate(divide="ignore"):
        return np.minimum(1.0, 1.0 / np.maximum.accumulate(r))


def log_p_process(log_evidence) -> np.ndarray:
    """ln p_t from a log-evidence trajectory; overflow-safe for huge evidence."""
    lr = np.asarray(log_evidence, dtype=np.float64)
    return -np.maximum(0.0, np.maximum.accumulate(lr))


def calibrator_f(u):
    """Calibrator f(u) = (1 - u + u ln u) / (u (ln u)^2) on (0, 1].

    Decreasing, integrates to 1 on the unit interval, f(1) = 1/2. Near
    u = 1 the closed form cancels catastrophically, so for |ln u| < 1e-4
    the series 1/2 - x/6 + x^2/24 in x = ln u is used instead.
    """
    u_arr = np.asarray(u, dtype=np.float64)
    if np.any(u_arr <= 0.0) or np.any(u_arr > 1.0):
        raise ValueError("calibrator input must lie in (0, 1]")
    x = np.log(u_arr)
    small = np.abs(x) < 1e-4
    x_safe = np.where(small, 1.0, x)
    u_safe = np.where(small, 0.5, u_arr)
    with np.errstate(invalid="ignore"):
        direct = (1.0 - u_safe + u_safe * x_safe) / (u_safe * x_safe * x_safe)
    series = 0.5 - x / 6.0 + x * x / 24.0
    out = np.where(small, series, direct)
    return float(out) if np.isscalar(u) else out


def log_calibrator_f(log_u):
    """ln f(e^log_u) for log_u <= 0; safe when u itself would underflow.

    Below u = 1e-300 the numerator of f is 1 to double precision, leaving
    ln f = -ln u - 2 ln(-ln u).
    """
    lu = np.asarray(log_u, dtype=np.float64)
    if np.any(lu > 0.0):
        raise ValueError("calibrator input must lie in (0, 1]")
    tiny = lu < -690.0
    lu_safe = np.where(tiny, -1.0, lu)
    with np.errstate(divide="ignore"):
        regular = np.log(calibrator_f(np.exp(lu_safe)))
    asymptotic = -lu - 2.0 * np.log(np.maximum(-lu, 1.0))
    out = np.where(tiny, asymptotic, regular)
    return float(out) if np.isscalar(log_u) else out


def calibrated_eprocess(log_evidence) -> np.ndarray:
    """ln f(p_t): the calibrated e-process of the induced p-process."""
    return log_calibrator_f(log_p_process(log_evidence))


def log_adjuster_F(log_y):
    """ln F(e^logy) for logy >= 0, where F(y) = y^2 ln2 / ((1+y) ln^2(1+y)).

    Works entirely in log space: ln(1+y) = logaddexp(0, ln y), so inputs far
    beyond the overflow range of y itself are fine. F(1) = 1/(2 ln 2).
    """
    ly = np.asarray(log_y, dtype=np.float64)
    if np.any(ly < 0.0):
        raise ValueError("adjuster input must satisfy y >= 1")
    ln1py = np.logaddexp(0.0, ly)
    out = 2.0 * ly + _LOG_LN2 - ln1py - 2.0 * np.log(ln1py)
    return float(out) if np.isscalar(log_y) else out


def adjuster_F(y):
    """F(y) = y^2 ln2 / ((1+y) ln^2(1+y)) for y >= 1; integrates dF/y = 1."""
    y_arr = np.asarray(y, dtype=np.float64)
    if np.any(y_arr < 1.0):
        raise ValueError("adjuster input must satisfy y >= 1")
    out = np.exp(log_adjuster_F(np.log(y_arr)))
    return float(out) if np.isscalar(y) else out


def log_adjusted_eprocess(log_evidence) -> np.ndarray:
    """ln F(max(1, max_{s<=t} R_s)): an e-process dominating a tracked maximum."""
    lr = np.asarray(log_evidence, dtype=np.float64)
    running = np.maximum(0.0, np.maximum.accumulate(lr))
    return log_adjuster_F(running)


def adjusted_eprocess(evidence) -> np.ndarray:
    """Linear-scale version of log_adjusted_eprocess for moderate evidence."""
    r = np.asarray(evidence, dtype=np.float64)
    if np.any(r < 0.0) or np.any(np.isnan(r)):
        raise ValueError("evidence values must be nonnegative")
    running = np.maximum.accumulate(np.maximum(r, 1.0))
    return adjuster_F(running)
