"""Resilient binary hypothesis testing with stochastic trust observations.

A fusion center receives one-shot binary measurements and per-robot trust
values from a network containing an unknown (possibly majority) malicious
subset.  The package provides a two-stage detector (trust-based
classification followed by likelihood-ratio fusion), a joint
maximum-likelihood detector over trust labelings and attack strategies,
reference baselines, exact worst-case error analysis with analytic upper
bounds, and a deterministic Monte Carlo harness with a CLI front end.
"""

from .aglrt import (
    BranchMaximum,
    CandidateSet,
    RobotPrior,
    aglrt_decide,
    aglrt_decide_constrained,
    aglrt_decide_with_prior,
    brute_force_glrt,
    candidate_set,
    constrained_inner_max,
    inner_max,
    mle_attacker_param,
)
from .baselines import (
    ReputationState,
    oblivious_decide,
    oracle_decide,
    reputation_update_and_decide,
)
from .model import (
    AttackModel,
    Decision,
    DomainError,
    Hypothesis,
    NetworkObservation,
    SensorModel,
    TrustModel,
    ValidityError,
    binomial_cdf,
    binomial_pmf,
    chernoff_lower_tail,
    chernoff_upper_tail,
    gaussian_q,
    kl_bernoulli,
    resolve_malicious_count,
)
from .sim import (
    AglrtConstrainedMethod,
    AglrtMethod,
    ErrorReport,
    MethodResult,
    METHOD_NAMES,
    ObliviousMethod,
    OracleMethod,
    ReputationMethod,
    ScenarioConfig,
    TwoStageMethod,
    build_methods,
    run_experiment,
    sample_trial,
    sweep_malicious_proportion,
)
from .two_stage import (
    BoundRegion,
    TwoStageThresholds,
    WorstCaseConfig,
    classify_trust,
    error_upper_bound,
    exact_error_given_counts,
    fuse_trusted,
    gamma_candidates,
    m_star_exact,
    m_star_noiseless_exact,
    m_star_normal_approx,
    optimize_thresholds,
    trust_likelihood_ratio,
    trust_probabilities,
    two_stage_decide,
    worst_case_error,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # model
    "AttackModel",
    "Decision",
    "DomainError",
    "Hypothesis",
    "NetworkObservation",
    "SensorModel",
    "TrustModel",
    "ValidityError",
    "binomial_cdf",
    "binomial_pmf",
    "chernoff_lower_tail",
    "chernoff_upper_tail",
    "gaussian_q",
    "kl_bernoulli",
    "resolve_malicious_count",
    # two-stage
    "BoundRegion",
    "TwoStageThresholds",
    "WorstCaseConfig",
    "classify_trust",
    "error_upper_bound",
    "exact_error_given_counts",
    "fuse_trusted",
    "gamma_candidates",
    "m_star_exact",
    "m_star_noiseless_exact",
    "m_star_normal_approx",
    "optimize_thresholds",
    "trust_likelihood_ratio",
    "trust_probabilities",
    "two_stage_decide",
    "worst_case_error",
    # joint-MLE detector
    "BranchMaximum",
    "CandidateSet",
    "RobotPrior",
    "aglrt_decide",
    "aglrt_decide_constrained",
    "aglrt_decide_with_prior",
    "brute_force_glrt",
    "candidate_set",
    "constrained_inner_max",
    "inner_max",
    "mle_attacker_param",
    # baselines
    "ReputationState",
    "oblivious_decide",
    "oracle_decide",
    "reputation_update_and_decide",
    # simulation
    "AglrtConstrainedMethod",
    "AglrtMethod",
    "ErrorReport",
    "MethodResult",
    "METHOD_NAMES",
    "ObliviousMethod",
    "OracleMethod",
    "ReputationMethod",
    "ScenarioConfig",
    "TwoStageMethod",
    "build_methods",
    "run_experiment",
    "sample_trial",
    "sweep_malicious_proportion",
]
