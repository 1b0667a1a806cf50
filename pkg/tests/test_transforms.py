"""Transform recovery, power-law fitting, and measure classification."""

import numpy as np
import pytest

from beliefcalc import (
    LAMBDA,
    MonotoneTransform,
    classify_measure,
    default_grid,
    fit_power_law,
    parse_measure,
    recover_additive_transform,
    standard_suite,
)
from beliefcalc.errors import FitError, SampleError


def log_grid(lo: float, hi: float, size: int = 64) -> np.ndarray:
    return np.geomspace(lo, hi, size)


def node_pair_samples(grid, g):
    """All (x, y, g(x, y)) over grid-node pairs whose g value stays in span."""
    samples = []
    for x in grid:
        for y in grid:
            value = g(x, y)
            if grid[0] <= value <= grid[-1]:
                samples.append((float(x), float(y), float(value)))
    return samples


def rescale_to_anchor(values: np.ndarray, anchor: int) -> np.ndarray:
    return values / values[anchor]


class TestRecoverAdditiveTransform:
    def test_addition_recovers_the_identity(self):
        grid = np.linspace(0.25, 16.0, 64)  # node sums land exactly on nodes
        samples = node_pair_samples(grid, lambda x, y: x + y)
        transform, residual = recover_additive_transform(samples, grid)
        assert residual <= 1e-9
        expected = rescale_to_anchor(grid, 63)
        deviation = np.max(np.abs(np.array(transform.values) - expected))
        assert deviation <= 1e-6

    def test_addition_with_scattered_samples_is_still_exact(self):
        # arbitrary sample positions: the identity interpolates exactly, so the
        # defect stays at solver tolerance even though thin cells may wander
        grid = np.linspace(0.1, 10.0, 64)
        rng = np.random.default_rng(51)
        samples = []
        while len(samples) < 400:
            x, y = rng.uniform(0.1, 5.0, size=2)
            if grid[0] <= x + y <= grid[-1]:
                samples.append((x, y, x + y))
        _, residual = recover_additive_transform(samples, grid)
        assert residual <= 1e-9

    def test_multiplication_recovers_the_log(self):
        grid = log_grid(0.5, 8.0)
        samples = node_pair_samples(grid, lambda x, y: x * y)
        assert len(samples) >= 3 * len(grid)
        transform, residual = recover_additive_transform(samples, grid)
        assert residual <= 1e-6
        reference = np.log(grid) / np.log(grid[-1])  # anchored at the last point
        deviation = np.max(np.abs(np.array(transform.values) - reference))
        assert deviation / np.max(np.abs(reference)) <= 1e-3

    def test_x_plus_y_plus_xy_recovers_log1p(self):
        # 1 + g factors as (1 + x)(1 + y), so log(1 + x) solves the additivity exactly
        shifted = np.geomspace(1.5, 9.0, 64)
        grid = shifted - 1.0
        samples = node_pair_samples(grid, lambda x, y: x + y + x * y)
        transform, residual = recover_additive_transform(samples, grid)
        assert residual <= 1e-6
        reference = np.log1p(grid) / np.log1p(grid[-1])
        deviation = np.max(np.abs(np.array(transform.values) - reference))
        assert deviation / np.max(np.abs(reference)) <= 1e-3

    def test_anchor_choice_only_rescales(self):
        grid = log_grid(0.5, 8.0)
        samples = node_pair_samples(grid, lambda x, y: x * y)
        default_fit, _ = recover_additive_transform(samples, grid)
        # anchor on a point above 1 so the increasing solution stays positive there
        other_anchor = int(np.searchsorted(grid, 4.0))
        other_fit, _ = recover_additive_transform(samples, grid, anchor=other_anchor)
        rescaled = rescale_to_anchor(np.array(other_fit.values), 63)
        deviation = np.max(np.abs(rescaled - np.array(default_fit.values)))
        assert deviation / np.max(np.abs(default_fit.values)) <= 1e-6

    def test_more_exact_samples_never_hurt(self):
        grid = np.linspace(0.1, 10.0, 32)
        rng = np.random.default_rng(52)
        samples = []
        while len(samples) < 600:
            x, y = rng.uniform(0.1, 5.0, size=2)
            if grid[0] <= x + y <= grid[-1]:
                samples.append((x, y, x + y))
        _, small = recover_additive_transform(samples[:150], grid)
        _, large = recover_additive_transform(samples, grid)
        assert small <= 1e-9
        assert large <= 1e-9

    def test_out_of_span_sample_is_named(self):
        grid = np.linspace(0.0, 1.0, 8)
        samples = [(0.1, 0.2, 0.3)] * 30
        samples[17] = (0.1, 0.2, 1.5)
        with pytest.raises(SampleError, match="sample 17 outside grid span"):
            recover_additive_transform(samples, grid)

    def test_too_few_samples(self):
        grid = np.linspace(0.0, 1.0, 16)
        with pytest.raises(SampleError, match="at least 48"):
            recover_additive_transform([(0.1, 0.2, 0.3)] * 10, grid)

    def test_bad_grid(self):
        with pytest.raises(SampleError, match="strictly increasing"):
            recover_additive_transform([(0.1, 0.2, 0.3)] * 10, [0.0, 0.0, 1.0])

    def test_no_increasing_representation(self):
        # x*y/(x+y): 1/t solves the additivity, so every increasing solution is
        # a negative multiple and the anchor normalization is unreachable
        grid = log_grid(0.5, 8.0)
        samples = node_pair_samples(grid, lambda x, y: x * y / (x + y))
        with pytest.raises(FitError, match="no additive representation"):
            recover_additive_transform(samples, grid)


class TestMonotoneTransform:
    def test_interpolation(self):
        transform = MonotoneTransform((0.0, 1.0, 2.0), (0.0, 10.0, 20.0), 2)
        assert transform(0.5) == pytest.approx(5.0)
        assert transform(2.0) == pytest.approx(20.0)

    def test_outside_span_rejected(self):
        transform = MonotoneTransform((0.0, 1.0), (0.0, 1.0), 1)
        with pytest.raises(SampleError, match="outside transform grid"):
            transform(1.5)

    def test_dict_round_trip(self):
        transform = MonotoneTransform((0.0, 1.0, 2.0), (0.1, 0.5, 1.0), 2)
        assert MonotoneTransform.from_dict(transform.to_dict()) == transform


class TestDefaultGrid:
    def test_positive_span_is_log_spaced(self):
        grid = default_grid([0.5, 8.0, 2.0], size=16)
        ratios = grid[1:] / grid[:-1]
        assert np.allclose(ratios, ratios[0])

    def test_signed_span_is_linear(self):
        grid = default_grid([-2.0, 3.0], size=16)
        assert np.allclose(np.diff(grid), np.diff(grid)[0])

    def test_degenerate_span_rejected(self):
        with pytest.raises(SampleError, match="degenerate sample span"):
            default_grid([1.0, 1.0])


class TestFitPowerLaw:
    def test_exact_synthetic(self):
        xs = np.geomspace(0.2, 50.0, 40)
        fit = fit_power_law([(x, 2.0 * x**1.5) for x in xs])
        assert abs(fit.alpha - 2.0) / 2.0 <= 1e-12
        assert abs(fit.exponent - 1.5) <= 1e-12
        assert fit.residual <= 1e-12

    def test_identity(self):
        xs = np.geomspace(0.5, 20.0, 25)
        fit = fit_power_law([(x, x) for x in xs])
        assert fit.alpha == pytest.approx(1.0, abs=1e-12)
        assert fit.exponent == pytest.approx(1.0, abs=1e-12)

    def test_shifted_line_is_flagged(self):
        xs = np.linspace(1.0, 10.0, 50)
        fit = fit_power_law([(x, x + 1.0) for x in xs])
        assert fit.residual > 1e-2  # not a power law

    def test_round_trip(self):
        rng = np.random.default_rng(53)
        for _ in range(20):
            alpha = float(rng.uniform(0.1, 5.0))
            exponent = float(rng.uniform(-2.0, 2.0))
            xs = np.geomspace(0.3, 30.0, 20)
            fit = fit_power_law([(x, alpha * x**exponent) for x in xs])
            assert abs(fit.alpha - alpha) / alpha <= 1e-9
            assert abs(fit.exponent - exponent) <= 1e-9

    def test_log_domain_violation(self):
        with pytest.raises(SampleError, match="log-domain violation at sample 1"):
            fit_power_law([(1.0, 1.0), (2.0, -0.5), (3.0, 2.0)])

    def test_underdetermined(self):
        with pytest.raises(SampleError, match="underdetermined"):
            fit_power_law([(1.0, 1.0), (1.0, 1.1), (1.0, 0.9)])

    def test_export_schema(self):
        fit = fit_power_law([(1.0, 2.0), (2.0, 4.0), (4.0, 8.0)])
        assert set(fit.to_dict()) == {"alpha", "A", "residual"}


@pytest.fixture(scope="module")
def suite():
    return standard_suite(7)


class TestClassifyMeasure:
    """Fixed regression expectations for the classification controls."""

    def test_lambda_is_a_transform_of_itself(self, suite):
        result = classify_measure(LAMBDA, suite)
        assert result.verdict == "transform_of_lambda"
        assert result.a_estimate == pytest.approx(1.0, abs=1e-9)
        assert result.is_update and result.satisfies_correspondence

    def test_power_transform_slope_matches_exponent(self, suite):
        result = classify_measure(parse_measure("power:2:3:lambda"), suite)
        assert result.verdict == "transform_of_lambda"
        assert result.a_estimate == pytest.approx(2.0, abs=1e-9)

    def test_log_lambda_via_the_general_route(self, suite):
        # log-lambda takes negative values, so the log-log shortcut is bypassed
        result = classify_measure(parse_measure("log-lambda"), suite)
        assert result.verdict == "transform_of_lambda"
        assert result.a_estimate is None

    def test_prob_diff_is_an_update_but_no_transform(self, suite):
        result = classify_measure(parse_measure("prob-diff"), suite)
        assert result.verdict == "update_but_not_lambda"
        assert result.is_update
        assert not result.satisfies_correspondence

    def test_posterior_ratio_is_an_update_but_no_transform(self, suite):
        result = classify_measure(parse_measure("posterior-ratio"), suite)
        assert result.verdict == "update_but_not_lambda"

    def test_inverted_measure_is_not_an_update(self, suite):
        result = classify_measure(parse_measure("power:-1:1:lambda"), suite)
        assert result.verdict == "not_an_update"
        assert not result.is_update

    def test_verdict_implies_audit_flags(self, suite):
        for name in ("lambda", "log-lambda", "prob-diff", "power:2:1:lambda"):
            result = classify_measure(parse_measure(name), suite)
            if result.verdict == "transform_of_lambda":
                assert result.is_update and result.satisfies_correspondence

    def test_serialization(self, suite):
        result = classify_measure(LAMBDA, suite)
        data = result.to_dict()
        assert data["measure"] == "lambda"
        assert data["verdict"] == "transform_of_lambda"
        assert len(data["checks"]) == 4
