"""Likelihood-ratio belief updating over finite propositional models.

The package is organized around an exact enumeration oracle (worlds), a
registry of candidate update measures, the odds-form update calculus,
empirical audits of update behavior over seeded model ensembles, and
numerical recovery of the monotone transforms relating conforming measures
to the likelihood ratio.
"""

from .calculus import ChainReport, ChainStep, combine, posterior_odds, update_chain, weight_of_evidence
from .errors import (
    AuditError,
    BeliefError,
    ChainBrokenError,
    EvaluationError,
    FitError,
    ImpossibleContextError,
    ModelFormatError,
    PropositionError,
    SampleError,
)
from .harness import (
    CheckResult,
    EnsembleCase,
    ModelEnsemble,
    Witness,
    audit_combination,
    audit_consistency,
    audit_definition,
    audit_independence_correspondence,
    run_all_audits,
    standard_suite,
)
from .measures import (
    LAMBDA,
    LOG_LAMBDA,
    POSTERIOR_RATIO,
    PROB_DIFF,
    UpdateMeasure,
    evaluate,
    expected_failed_checks,
    likelihood_ratio,
    parse_measure,
)
from .props import FALSE, TRUE, And, Atom, Const, Not, Or, Proposition, conjoin, parse_proposition
from .transforms import (
    Classification,
    MonotoneTransform,
    PowerLawFit,
    classify_measure,
    collect_lambda_pairs,
    default_grid,
    fit_power_law,
    recover_additive_transform,
)
from .worlds import (
    DEFAULT_ATOM_CAP,
    JointDistribution,
    conditionally_independent,
    equivalent,
    load_model,
    odds,
    odds_from_probability,
    probability,
    probability_from_odds,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # propositions
    "Proposition",
    "Atom",
    "Not",
    "And",
    "Or",
    "Const",
    "TRUE",
    "FALSE",
    "parse_proposition",
    "conjoin",
    # worlds
    "JointDistribution",
    "load_model",
    "probability",
    "odds",
    "conditionally_independent",
    "equivalent",
    "odds_from_probability",
    "probability_from_odds",
    "DEFAULT_ATOM_CAP",
    # measures
    "UpdateMeasure",
    "LAMBDA",
    "LOG_LAMBDA",
    "POSTERIOR_RATIO",
    "PROB_DIFF",
    "parse_measure",
    "evaluate",
    "likelihood_ratio",
    "expected_failed_checks",
    # calculus
    "ChainStep",
    "ChainReport",
    "posterior_odds",
    "combine",
    "weight_of_evidence",
    "update_chain",
    # harness
    "ModelEnsemble",
    "EnsembleCase",
    "CheckResult",
    "Witness",
    "audit_definition",
    "audit_combination",
    "audit_consistency",
    "audit_independence_correspondence",
    "run_all_audits",
    "standard_suite",
    # transforms
    "MonotoneTransform",
    "PowerLawFit",
    "Classification",
    "default_grid",
    "recover_additive_transform",
    "fit_power_law",
    "classify_measure",
    "collect_lambda_pairs",
    # errors
    "BeliefError",
    "ModelFormatError",
    "PropositionError",
    "ImpossibleContextError",
    "EvaluationError",
    "ChainBrokenError",
    "AuditError",
    "SampleError",
    "FitError",
]
