"""Safe anytime-valid tests of exchangeability against Markov alternatives.

The core object is a nonnegative process R_t that stays small on average
under every exchangeable law (an e-process) but grows exponentially when
the data carry Markovian dependence. Reject at level alpha the first time
R_t >= 1/alpha; optional stopping never breaks the guarantee.
"""
from ._backend import BACKEND
from .alternatives import (KTPredictor, PredictorContractError,
                           SmoothedMLEPredictor, basel_weight,
                           betting_eprocess, changepoint_eprocess,
                           changepoint_mixture_trajectory, double_mixture,
                           order_mixture_trajectory, truncation_order)
from .calibrate import (adjusted_eprocess, adjuster_F, calibrated_eprocess,
                        calibrator_f, log_adjusted_eprocess, log_adjuster_F,
                        log_calibrator_f, log_p_process, p_process)
from .confseq import (ConfInterval, conf_interval, conf_interval_trajectory,
                      jeffreys_point_log_evidence, running_intersection,
                      running_intersection_trajectory)
from .counts import TransitionCounts, check_alphabet_order, counts_from_stream
from .evidence import (REGRET_CONSTANT, EvidenceState,
                       closed_form_log_evidence, derive_regret_constant,
                       evidence_trajectory, kt_predictive,
                       log_mle_denominator, ml_gap, stopping_time)
from .experiments import (FAMILIES, REPLICATION_IDS, ExperimentResult,
                          compute_trajectory, default_checkpoints,
                          replicate_figure, run_experiment)
from .forkconvex import (NSMCheck, TreeProcess, fork_convex_combine,
                         hull_approximation, is_supermartingale,
                         nsm_nonincreasing_check, supermartingale_gap,
                         verify_theory_report)
from .sources import (Bernoulli, Changepoint, DriftingBernoulli, LimitParams,
                      Markov1, MarkovK, Pattern, TimeVaryingMarkov,
                      delta_schedule, empirical_limits, growth_rate_rstar,
                      rstar_markov1, sample, stationary_limits)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "REGRET_CONSTANT", "__version__",
    "Bernoulli", "Changepoint", "ConfInterval", "DriftingBernoulli",
    "EvidenceState", "ExperimentResult", "FAMILIES", "KTPredictor",
    "LimitParams", "Markov1", "MarkovK", "NSMCheck", "Pattern",
    "PredictorContractError", "REPLICATION_IDS", "SmoothedMLEPredictor",
    "TimeVaryingMarkov", "TransitionCounts", "TreeProcess",
    "adjusted_eprocess", "adjuster_F", "basel_weight", "betting_eprocess",
    "calibrated_eprocess", "calibrator_f", "changepoint_eprocess",
    "changepoint_mixture_trajectory", "check_alphabet_order",
    "closed_form_log_evidence", "compute_trajectory", "conf_interval",
    "conf_interval_trajectory", "counts_from_stream", "default_checkpoints",
    "delta_schedule", "derive_regret_constant", "double_mixture",
    "empirical_limits", "evidence_trajectory", "fork_convex_combine",
    "growth_rate_rstar", "hull_approximation", "is_supermartingale",
    "jeffreys_point_log_evidence", "kt_predictive", "log_adjusted_eprocess",
    "log_adjuster_F", "log_calibrator_f", "log_mle_denominator",
    "log_p_process", "ml_gap", "nsm_nonincreasing_check",
    "order_mixture_trajectory", "p_process", "replicate_figure",
    "rstar_markov1", "run_experiment", "running_intersection",
    "running_intersection_trajectory", "sample", "stationary_limits",
    "stopping_time", "supermartingale_gap", "truncation_order",
    "verify_theory_report",
]
