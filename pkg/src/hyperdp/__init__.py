"""Differentially private community detection on h-uniform hypergraphs."""

__version__ = "0.1.0"

from .hypergraph import (
    Hypergraph,
    Labeling,
    ValidationError,
    binom,
    count_cross_cluster,
    monochromatic_capacity,
    rank_subset,
    symmetric_difference_size,
    unrank_subset,
)
from .model import ModelParams, derive_seed, edge_probability, sample_ground_truth, sample_hypergraph
from .estimators import (
    RecoveryResult,
    StabilityDistance,
    distance_to_instability_exact,
    instability_surrogate,
    log_likelihood,
    misclassification_error,
    ml_exhaustive,
    spectral_recover,
)
from .mechanisms import (
    MechanismOutput,
    PrivacyBudget,
    PrivacySoundnessError,
    laplace_sample,
    mech_bayes_sampling,
    mech_exponential_sampling,
    mech_randomized_response,
    mech_stability,
)
from .audit import AuditReport, dp_audit
from .thresholds import (
    bayes_threshold,
    chernoff_exponent,
    classify_region,
    exponential_threshold,
    m_lower_bound,
    m_of_s,
    nonprivate_threshold,
    region_grid,
    rr_lambda,
    rr_min_a,
    rr_min_eps,
    rr_threshold,
    stability_threshold,
)
from .experiments import ExperimentConfig, TrialRecord, aggregate, emit_csv, run_experiment
