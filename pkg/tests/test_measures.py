"""Update-measure evaluation, parsing, and shared invariants."""

import math

import numpy as np
import pytest

from beliefcalc import (
    LAMBDA,
    LOG_LAMBDA,
    POSTERIOR_RATIO,
    PROB_DIFF,
    UpdateMeasure,
    evaluate,
    expected_failed_checks,
    likelihood_ratio,
    parse_measure,
    probability,
)
from beliefcalc.errors import BeliefError, EvaluationError
from beliefcalc.props import TRUE, And, Atom, Not, Or

from conftest import dense_model, literals

H = Atom("H")
E = Atom("E")


class TestEvaluation:
    def test_lambda_on_two_atom_model(self, two_atom):
        # p(E|H) = 0.3/0.5, p(E|!H) = 0.1/0.5 enumerated by hand
        assert evaluate(LAMBDA, two_atom, H, E) == pytest.approx(3.0, abs=1e-12)
        assert likelihood_ratio(two_atom, H, E) == pytest.approx(3.0, abs=1e-12)

    def test_probability_difference_on_two_atom_model(self, two_atom):
        # p(H|E) - p(H) = 0.75 - 0.5
        assert evaluate(PROB_DIFF, two_atom, H, E) == pytest.approx(0.25, abs=1e-12)

    def test_posterior_ratio_on_two_atom_model(self, two_atom):
        assert evaluate(POSTERIOR_RATIO, two_atom, H, E) == pytest.approx(1.5, abs=1e-12)

    @pytest.mark.parametrize(
        "name,neutral",
        [
            ("lambda", 1.0),
            ("log-lambda", 0.0),
            ("posterior-ratio", 1.0),
            ("prob-diff", 0.0),
            ("power:2:1.5:lambda", 1.5),  # the neutral of a power transform is its scale
        ],
    )
    def test_true_evidence_is_neutral(self, two_atom, name, neutral):
        measure = parse_measure(name)
        assert evaluate(measure, two_atom, H, TRUE) == pytest.approx(neutral, abs=1e-12)

    def test_log_lambda_matches_log_of_lambda(self):
        rng = np.random.default_rng(21)
        checked = 0
        for _ in range(15):
            dist = dense_model(rng, 3)
            props = literals(dist)
            for hyp in props[:2]:
                for ev in props[2:]:
                    lam = evaluate(LAMBDA, dist, hyp, ev)
                    if not math.isfinite(lam) or lam == 0.0:
                        continue
                    assert evaluate(LOG_LAMBDA, dist, hyp, ev) == pytest.approx(
                        math.log(lam), abs=1e-12
                    )
                    checked += 1
        assert checked > 100

    def test_sign_coherence(self):
        # lambda > 1 iff the posterior exceeds the prior, with equality at 1
        rng = np.random.default_rng(22)
        for _ in range(20):
            dist = dense_model(rng, 4)
            props = literals(dist)
            for hyp in props[:2]:
                for ev in props[2:]:
                    lam = evaluate(LAMBDA, dist, hyp, ev)
                    if not math.isfinite(lam):
                        continue
                    shift = probability(dist, hyp, ev) - probability(dist, hyp)
                    if abs(lam - 1.0) <= 1e-12:
                        assert abs(shift) <= 1e-12
                    elif lam > 1.0:
                        assert shift > -1e-12
                    else:
                        assert shift < 1e-12

    def test_equivalent_triples_identical_exactly(self, two_atom):
        for measure in (LAMBDA, LOG_LAMBDA, POSTERIOR_RATIO, PROB_DIFF, parse_measure("power:2:1:lambda")):
            reference = evaluate(measure, two_atom, H, E)
            assert evaluate(measure, two_atom, Not(Not(H)), E) == reference
            assert evaluate(measure, two_atom, H, Not(Not(E))) == reference
            assert evaluate(measure, two_atom, And(H, TRUE), E) == reference
            assert evaluate(measure, two_atom, H, Or(E, E)) == reference

    def test_power_transform_values(self, two_atom):
        lam = evaluate(LAMBDA, two_atom, H, E)
        squared = parse_measure("power:2:3:lambda")
        assert evaluate(squared, two_atom, H, E) == pytest.approx(3 * lam**2, abs=1e-12)
        inverse = parse_measure("power:-1:1:lambda")
        assert evaluate(inverse, two_atom, H, E) == pytest.approx(1 / lam, abs=1e-12)

    def test_infinite_ratio_convention(self):
        # evidence certain under H and impossible under !H
        from beliefcalc import load_model
        import json

        doc = {
            "atoms": ["H", "E"],
            "worlds": [
                {"assign": {"H": True, "E": True}, "p": 0.5},
                {"assign": {"H": False, "E": False}, "p": 0.5},
            ],
        }
        dist = load_model(json.dumps(doc))
        assert evaluate(LAMBDA, dist, H, E) == math.inf
        assert evaluate(LOG_LAMBDA, dist, H, E) == math.inf
        assert evaluate(LAMBDA, dist, Not(H), E) == 0.0
        assert evaluate(LOG_LAMBDA, dist, Not(H), E) == -math.inf
        assert evaluate(parse_measure("power:-2:1:lambda"), dist, H, E) == 0.0


class TestEvaluationErrors:
    def test_degenerate_prior(self, two_atom):
        with pytest.raises(EvaluationError, match="degenerate prior"):
            evaluate(LAMBDA, two_atom, TRUE, E)
        with pytest.raises(EvaluationError, match="degenerate prior"):
            evaluate(LAMBDA, two_atom, H, E, And(H, E))

    def test_impossible_evidence(self, two_atom):
        with pytest.raises(EvaluationError, match="impossible evidence"):
            evaluate(LAMBDA, two_atom, H, And(E, Not(E)))

    def test_zero_over_zero_is_shielded_by_impossible_evidence(self, two_atom):
        # both conditionals vanish only when the evidence itself has mass 0,
        # so the impossible-evidence guard always fires first
        with pytest.raises(EvaluationError, match="impossible evidence"):
            evaluate(LAMBDA, two_atom, H, Atom("E"), Not(E))

    def test_negative_base_under_fractional_exponent(self, two_atom):
        measure = parse_measure("power:0.5:1:prob-diff")
        with pytest.raises(EvaluationError, match="negative base"):
            evaluate(measure, two_atom, Not(H), E)  # p shift is negative here


class TestParseMeasure:
    def test_registry_names(self):
        assert parse_measure("lambda") is LAMBDA
        assert parse_measure("log-lambda") is LOG_LAMBDA
        assert parse_measure("posterior-ratio") is POSTERIOR_RATIO
        assert parse_measure("prob-diff") is PROB_DIFF

    def test_power_grammar(self):
        measure = parse_measure("power:2:1.5:lambda")
        assert measure.kind == "power_transform"
        assert measure.exponent == 2.0
        assert measure.scale == 1.5
        assert measure.base is LAMBDA

    def test_power_grammar_recursive_base(self):
        measure = parse_measure("power:3:1:power:2:1:lambda")
        assert measure.base.kind == "power_transform"
        assert measure.base.base is LAMBDA
        assert measure.root_kind() == "likelihood_ratio"

    @pytest.mark.parametrize("bad", ["gamma", "power:2:1", "power:x:1:lambda", "power:2:1:nope"])
    def test_rejects_unknown(self, bad):
        with pytest.raises(BeliefError):
            parse_measure(bad)

    def test_power_invariants(self):
        with pytest.raises(BeliefError):
            UpdateMeasure("m", "power_transform", exponent=0.0, scale=1.0, base=LAMBDA)
        with pytest.raises(BeliefError):
            UpdateMeasure("m", "power_transform", exponent=2.0, scale=0.0, base=LAMBDA)
        with pytest.raises(BeliefError):
            UpdateMeasure("m", "power_transform", exponent=2.0, scale=1.0, base=None)


class TestControlExpectations:
    def test_lambda_family_expected_clean(self):
        assert expected_failed_checks(LAMBDA) == frozenset()
        assert expected_failed_checks(LOG_LAMBDA) == frozenset()
        assert expected_failed_checks(parse_measure("power:2:1:lambda")) == frozenset()

    def test_foils_expected_to_fail_correspondence(self):
        assert expected_failed_checks(PROB_DIFF) == {"independence_correspondence"}
        assert expected_failed_checks(POSTERIOR_RATIO) == {"independence_correspondence"}

    def test_negative_exponent_inverts_the_ordering(self):
        assert "definition" in expected_failed_checks(parse_measure("power:-1:1:lambda"))
