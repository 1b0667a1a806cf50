"""The operational update engine: odds-form updating and evidence chaining.

Posterior odds equal prior odds times the likelihood ratio, and the ratio for
joint evidence is the product of the sequential ratios. Chains accumulate in
log-odds space, converting to odds and probability only at the boundary, so
long chains neither underflow nor overflow and the multiplicative identities
hold to float precision.

Two chaining modes are provided. Exact mode conditions each step's ratio on
all previously incorporated evidence; modular mode reuses the plain context
for every step, which is only correct when each evidence item is
conditionally independent of its predecessors given the hypothesis. Modular
chains are still computed when that assumption fails; the caller is expected
to compare against the oracle and surface the divergence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import ChainBrokenError, EvaluationError
from .measures import LAMBDA, evaluate
from .props import And, Proposition, TRUE, conjoin
from .worlds import (
    JointDistribution,
    odds_from_probability,
    probability,
    probability_from_odds,
)

__all__ = [
    "ChainStep",
    "ChainReport",
    "posterior_odds",
    "combine",
    "weight_of_evidence",
    "update_chain",
]

_LOG_ODDS_OVERFLOW = 700.0  # exp() overflows just above this


@dataclass(frozen=True, slots=True)
class ChainStep:
    evidence: Proposition
    lam: float
    posterior_odds: float

    def to_dict(self) -> dict:
        return {
            "evidence": str(self.evidence),
            "lambda": self.lam,
            "posterior_odds": self.posterior_odds,
        }


@dataclass(frozen=True, slots=True)
class ChainReport:
    """Per-step ratios and odds for a sequential belief update."""

    hypothesis: Proposition
    context: Proposition
    steps: tuple[ChainStep, ...]
    final_odds: float
    final_probability: float
    mode: str

    def to_dict(self) -> dict:
        return {
            "hypothesis": str(self.hypothesis),
            "context": str(self.context),
            "mode": self.mode,
            "steps": [step.to_dict() for step in self.steps],
            "final_odds": self.final_odds,
            "final_probability": self.final_probability,
        }


def posterior_odds(lam: float, prior: float) -> float:
    """Posterior odds from a likelihood ratio and prior odds.

    Extended-real product; the 0 * inf pairings carry no information and
    raise instead of returning NaN.
    """
    if (math.isinf(lam) and prior == 0.0) or (lam == 0.0 and math.isinf(prior)):
        raise EvaluationError("indeterminate posterior: 0 and +inf combined")
    return lam * prior


def combine(lam1: float, lam2: float) -> float:
    """Ratio for joint evidence from two sequential ratios (multiplication)."""
    if (math.isinf(lam1) and lam2 == 0.0) or (lam1 == 0.0 and math.isinf(lam2)):
        raise EvaluationError("indeterminate combination: 0 and +inf combined")
    return lam1 * lam2


def weight_of_evidence(
    dist: JointDistribution,
    hypothesis: Proposition,
    evidence: Proposition,
    context: Proposition = TRUE,
) -> float:
    """log of the likelihood ratio; additive across sequential evidence."""
    lam = evaluate(LAMBDA, dist, hypothesis, evidence, context)
    if lam == 0.0 or math.isinf(lam):
        raise EvaluationError("infinite weight: likelihood ratio is 0 or +inf")
    return math.log(lam)


def _odds_from_log(log_odds: float) -> float:
    if log_odds == math.inf or log_odds > _LOG_ODDS_OVERFLOW:
        return math.inf
    if log_odds == -math.inf:
        return 0.0
    return math.exp(log_odds)


def update_chain(
    dist: JointDistribution,
    hypothesis: Proposition,
    evidence: Sequence[Proposition],
    context: Proposition = TRUE,
    mode: str = "exact",
) -> ChainReport:
    """Sequentially update the hypothesis odds with each evidence item.

    Exact mode conditions step k's ratio on evidence[0..k-1] & context;
    modular mode uses the bare context throughout. The prior must be
    non-extreme, and every step's conditioning context must be realizable.
    """
    if mode not in ("exact", "modular"):
        raise ValueError(f"mode must be 'exact' or 'modular', got {mode!r}")
    prior = probability(dist, hypothesis, context)
    if prior <= 0.0 or prior >= 1.0:
        raise EvaluationError(f"degenerate prior: p({hypothesis} | {context}) = {prior}")

    log_odds = math.log(odds_from_probability(prior))
    steps: list[ChainStep] = []
    for k, item in enumerate(evidence, start=1):
        if mode == "exact":
            step_context = conjoin([prop for prop in evidence[: k - 1]], context)
        else:
            step_context = context
        if dist.mass(And(item, step_context)) <= 0.0 or dist.mass(step_context) <= 0.0:
            raise ChainBrokenError(k, f"chain broken at step {k}: p({item} & {step_context}) = 0")
        try:
            lam = evaluate(LAMBDA, dist, hypothesis, item, step_context)
        except EvaluationError as exc:
            raise ChainBrokenError(k, f"chain broken at step {k}: {exc}") from exc
        if lam == 0.0:
            log_term = -math.inf
        elif math.isinf(lam):
            log_term = math.inf
        else:
            log_term = math.log(lam)
        if math.isinf(log_term) and math.isinf(log_odds) and (log_term > 0) != (log_odds > 0):
            raise EvaluationError("indeterminate posterior: 0 and +inf combined")
        log_odds = log_odds + log_term
        steps.append(ChainStep(item, lam, _odds_from_log(log_odds)))

    final_odds = _odds_from_log(log_odds)
    return ChainReport(
        hypothesis=hypothesis,
        context=context,
        steps=tuple(steps),
        final_odds=final_odds,
        final_probability=probability_from_odds(final_odds),
        mode=mode,
    )
