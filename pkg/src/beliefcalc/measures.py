"""Candidate belief-update measures.

An update measure maps (distribution, hypothesis, evidence, context) to a
single extended-real number summarizing how the evidence shifts belief in the
hypothesis. The registry carries the likelihood ratio and its log, power-law
reparameterizations, and two deliberate foils (posterior ratio, probability
difference) that behave like updates but are not invariant under conditional
independence. Evaluation goes through the world oracle, so logically
equivalent argument triples give identical values exactly.

Extended-real conventions: a ratio with zero denominator and positive
numerator is +inf; 0/0 is an error. Infinities are first-class values here
and are excluded from tolerance comparisons by the audit layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import BeliefError, EvaluationError
from .props import And, Not, Proposition, TRUE
from .worlds import JointDistribution, probability

__all__ = [
    "UpdateMeasure",
    "LAMBDA",
    "LOG_LAMBDA",
    "POSTERIOR_RATIO",
    "PROB_DIFF",
    "parse_measure",
    "evaluate",
    "likelihood_ratio",
    "expected_failed_checks",
    "MEASURE_NAMES",
]

_KINDS = (
    "likelihood_ratio",
    "log_likelihood_ratio",
    "posterior_ratio",
    "probability_difference",
    "power_transform",
)


@dataclass(frozen=True, slots=True)
class UpdateMeasure:
    """A named update rule; power transforms wrap another measure."""

    name: str
    kind: str
    exponent: float | None = None
    scale: float | None = None
    base: "UpdateMeasure | None" = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise BeliefError(f"unknown measure kind {self.kind!r}")
        if self.kind == "power_transform":
            if self.base is None:
                raise BeliefError("power_transform needs a base measure")
            if self.scale is None or self.scale <= 0:
                raise BeliefError("power_transform scale must be positive")
            if self.exponent is None or self.exponent == 0:
                raise BeliefError("power_transform exponent must be nonzero")

    def root_kind(self) -> str:
        """Kind of the innermost measure under any power-transform wrapping."""
        measure = self
        while measure.base is not None:
            measure = measure.base
        return measure.kind


LAMBDA = UpdateMeasure("lambda", "likelihood_ratio")
LOG_LAMBDA = UpdateMeasure("log-lambda", "log_likelihood_ratio")
POSTERIOR_RATIO = UpdateMeasure("posterior-ratio", "posterior_ratio")
PROB_DIFF = UpdateMeasure("prob-diff", "probability_difference")

_BY_NAME = {
    "lambda": LAMBDA,
    "log-lambda": LOG_LAMBDA,
    "posterior-ratio": POSTERIOR_RATIO,
    "prob-diff": PROB_DIFF,
}

MEASURE_NAMES = ("lambda", "log-lambda", "posterior-ratio", "prob-diff", "power:<A>:<alpha>:<base>")


def parse_measure(name: str) -> UpdateMeasure:
    """Resolve a CLI measure name, e.g. 'lambda' or 'power:2:1:lambda'."""
    name = name.strip()
    if name in _BY_NAME:
        return _BY_NAME[name]
    if name.startswith("power:"):
        parts = name.split(":", 3)
        if len(parts) != 4:
            raise BeliefError(f"power measure must be power:<A>:<alpha>:<base>, got {name!r}")
        _, exponent_text, scale_text, base_name = parts
        try:
            exponent = float(exponent_text)
            scale = float(scale_text)
        except ValueError as exc:
            raise BeliefError(f"bad power measure parameters in {name!r}") from exc
        base = parse_measure(base_name)
        return UpdateMeasure(name, "power_transform", exponent=exponent, scale=scale, base=base)
    raise BeliefError(f"unknown measure {name!r}")


def likelihood_ratio(
    dist: JointDistribution,
    hypothesis: Proposition,
    evidence: Proposition,
    context: Proposition = TRUE,
) -> float:
    """p(evidence | hypothesis, context) / p(evidence | !hypothesis, context)."""
    return evaluate(LAMBDA, dist, hypothesis, evidence, context)


def evaluate(
    measure: UpdateMeasure,
    dist: JointDistribution,
    hypothesis: Proposition,
    evidence: Proposition,
    context: Proposition = TRUE,
) -> float:
    """Value of the measure for (hypothesis, evidence, context) under dist.

    Requires a non-extreme prior (both hypothesis & context and its negation
    realizable) and possible evidence; raises EvaluationError otherwise.
    """
    h_and_c = And(hypothesis, context)
    not_h_and_c = And(Not(hypothesis), context)
    if dist.mass(h_and_c) <= 0.0 or dist.mass(not_h_and_c) <= 0.0:
        raise EvaluationError(f"degenerate prior: p({hypothesis} | {context}) is 0 or 1")
    if dist.mass(And(evidence, context)) <= 0.0:
        raise EvaluationError(f"impossible evidence: p({evidence} & {context}) = 0")
    return _evaluate_checked(measure, dist, hypothesis, evidence, context, h_and_c, not_h_and_c)


def _evaluate_checked(measure, dist, hypothesis, evidence, context, h_and_c, not_h_and_c) -> float:
    kind = measure.kind
    if kind == "likelihood_ratio":
        numerator = probability(dist, evidence, h_and_c)
        denominator = probability(dist, evidence, not_h_and_c)
        if denominator == 0.0:
            if numerator == 0.0:
                raise EvaluationError("undefined update: 0/0 likelihood ratio")
            return math.inf
        return numerator / denominator
    if kind == "log_likelihood_ratio":
        lam = _evaluate_checked(LAMBDA, dist, hypothesis, evidence, context, h_and_c, not_h_and_c)
        if lam == 0.0:
            return -math.inf
        if math.isinf(lam):
            return math.inf
        return math.log(lam)
    if kind == "posterior_ratio":
        posterior = probability(dist, hypothesis, And(evidence, context))
        prior = probability(dist, hypothesis, context)
        return posterior / prior
    if kind == "probability_difference":
        posterior = probability(dist, hypothesis, And(evidence, context))
        prior = probability(dist, hypothesis, context)
        return posterior - prior
    if kind == "power_transform":
        base_value = _evaluate_checked(
            measure.base, dist, hypothesis, evidence, context, h_and_c, not_h_and_c
        )
        exponent = measure.exponent
        if math.isinf(base_value):
            return math.inf if exponent > 0 else 0.0
        if base_value == 0.0:
            return 0.0 if exponent > 0 else math.inf
        if base_value < 0.0 and not float(exponent).is_integer():
            raise EvaluationError(
                f"undefined update: negative base {base_value!r} under exponent {exponent}"
            )
        return measure.scale * base_value**exponent
    raise BeliefError(f"unknown measure kind {kind!r}")


def expected_failed_checks(measure: UpdateMeasure) -> frozenset[str]:
    """Audit checks this measure is known to fail (control expectations).

    The ratio family and its positive-exponent power transforms pass every
    audit; the foils fail the independence correspondence; negative-exponent
    transforms invert the posterior ordering and fail the definition audit.
    """
    expected: set[str] = set()
    if measure.root_kind() in ("posterior_ratio", "probability_difference"):
        expected.add("independence_correspondence")
    walker = measure
    flips = 0
    while walker.kind == "power_transform":
        if walker.exponent < 0:
            flips += 1
        walker = walker.base
    if flips % 2 == 1:
        expected.add("definition")
    return frozenset(expected)
