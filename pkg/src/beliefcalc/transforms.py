"""Numerical recovery of the transforms behind conforming update measures.

Any continuous bi-monotone combination rule that is associative is additive
after a monotone recoding: there is a strictly increasing h with
h(g(x, y)) = h(x) + h(y). ``recover_additive_transform`` finds such an h as
a piecewise-linear function on a grid by constrained least squares. Since
any positive multiple of a solution is again a solution, the result is
pinned by fixing h = 1 at an anchor grid point (the largest by default).

``fit_power_law`` fits j(x) = alpha * x**A by ordinary least squares in
log-log space, and ``classify_measure`` combines the audits with a
regression against the likelihood ratio to decide whether a measure is a
monotone transform of it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import lsq_linear

from .errors import EvaluationError, FitError, ImpossibleContextError, SampleError
from .harness import (
    CheckResult,
    Ensembles,
    ModelEnsemble,
    _combination_points,
    _iter_cases,
    run_all_audits,
)
from .measures import LAMBDA, UpdateMeasure, evaluate

__all__ = [
    "MonotoneTransform",
    "PowerLawFit",
    "Classification",
    "default_grid",
    "recover_additive_transform",
    "fit_power_law",
    "classify_measure",
    "collect_lambda_pairs",
]

_MONOTONE_MARGIN = 1e-9
_SOLVER_FLOOR = 1e-9
_DEFAULT_GRID_SIZE = 64
_CLASSIFY_FIT_TOL = 1e-6


@dataclass(frozen=True, slots=True)
class MonotoneTransform:
    """Strictly increasing piecewise-linear function on a fixed grid."""

    grid: tuple[float, ...]
    values: tuple[float, ...]
    anchor: int

    def __call__(self, x: float) -> float:
        grid = self.grid
        if x < grid[0] or x > grid[-1]:
            raise SampleError(f"value {x!r} outside transform grid [{grid[0]}, {grid[-1]}]")
        k = int(np.searchsorted(grid, x)) - 1
        k = min(max(k, 0), len(grid) - 2)
        span = grid[k + 1] - grid[k]
        theta = (x - grid[k]) / span
        return (1.0 - theta) * self.values[k] + theta * self.values[k + 1]

    def to_dict(self) -> dict:
        return {"grid": list(self.grid), "values": list(self.values), "anchor": self.anchor}

    @classmethod
    def from_dict(cls, data: dict) -> "MonotoneTransform":
        return cls(tuple(data["grid"]), tuple(data["values"]), int(data["anchor"]))


@dataclass(frozen=True, slots=True)
class PowerLawFit:
    """alpha * x**exponent, with root-mean-square residual in log space."""

    alpha: float
    exponent: float
    residual: float

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "A": self.exponent, "residual": self.residual}


@dataclass(frozen=True, slots=True)
class Classification:
    """Audit outcome plus the transform-of-likelihood-ratio verdict."""

    measure: str
    is_update: bool
    satisfies_correspondence: bool
    a_estimate: float | None
    verdict: str
    diagnostic: str | None = None
    checks: tuple[CheckResult, ...] = ()

    def to_dict(self) -> dict:
        return {
            "measure": self.measure,
            "is_update": self.is_update,
            "satisfies_correspondence": self.satisfies_correspondence,
            "A_estimate": self.a_estimate,
            "verdict": self.verdict,
            "diagnostic": self.diagnostic,
            "checks": [check.to_dict() for check in self.checks],
        }


def default_grid(values: Sequence[float], size: int = _DEFAULT_GRID_SIZE) -> np.ndarray:
    """Grid spanning the sample values: log-spaced when positive, else linear."""
    lo = min(values)
    hi = max(values)
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
        raise SampleError(f"degenerate sample span [{lo}, {hi}]")
    if lo > 0:
        return np.geomspace(lo, hi, size)
    return np.linspace(lo, hi, size)


def _interp_weights(grid: np.ndarray, t: float) -> np.ndarray:
    k = int(np.searchsorted(grid, t)) - 1
    k = min(max(k, 0), len(grid) - 2)
    theta = (t - grid[k]) / (grid[k + 1] - grid[k])
    row = np.zeros(len(grid))
    row[k] = 1.0 - theta
    row[k + 1] = theta
    return row


def recover_additive_transform(
    g_samples: Sequence[tuple[float, float, float]],
    grid: Sequence[float],
    anchor: int | None = None,
    margin: float = _MONOTONE_MARGIN,
) -> tuple[MonotoneTransform, float]:
    """Fit a strictly increasing h with h(g) ~= h(x) + h(y) on the grid.

    Minimizes the sum of squared additivity defects over the samples subject
    to consecutive ordinates increasing by at least ``margin`` and the anchor
    ordinate fixed to 1. Returns the transform and the root-mean-square
    defect at the optimum. Raises FitError when no increasing fit comes
    within a factor of 10 of the unconstrained optimum (the data admit no
    additive representation with an increasing recoding).
    """
    grid = np.asarray(grid, dtype=float)
    m = len(grid)
    if m < 2 or np.any(np.diff(grid) <= 0):
        raise SampleError("grid must be strictly increasing with at least 2 points")
    if anchor is None:
        anchor = m - 1
    if not 0 <= anchor < m:
        raise SampleError(f"anchor index {anchor} out of range")
    if len(g_samples) < 3 * m:
        raise SampleError(f"need at least {3 * m} samples for a {m}-point grid, got {len(g_samples)}")
    lo, hi = grid[0], grid[-1]
    for index, sample in enumerate(g_samples):
        if len(sample) != 3:
            raise SampleError(f"sample {index} is not an (x, y, g) triple")
        for value in sample:
            if not (isinstance(value, (int, float)) and math.isfinite(value)):
                raise SampleError(f"sample {index} contains a non-finite value")
            if value < lo or value > hi:
                raise SampleError(f"sample {index} outside grid span: {value!r} not in [{lo}, {hi}]")

    # Ordinates are parameterized by the positive gaps between consecutive
    # grid values: v = 1 + T @ delta with v[anchor] = 1 built in, delta >= margin.
    transform_map = np.zeros((m, m - 1))
    for i in range(m):
        if i > anchor:
            transform_map[i, anchor:i] = 1.0
        elif i < anchor:
            transform_map[i, i:anchor] = -1.0

    defect_rows = np.empty((len(g_samples), m))
    for row, (x, y, g) in enumerate(g_samples):
        defect_rows[row] = _interp_weights(grid, g) - _interp_weights(grid, x) - _interp_weights(grid, y)
    design = defect_rows @ transform_map
    # residual r = design @ delta - 1 (the constant comes from v = 1 + T delta)
    target = np.ones(len(g_samples))

    solution = lsq_linear(design, target, bounds=(margin, np.inf), method="bvls")
    delta = solution.x
    residuals = design @ delta - target
    rms = float(np.sqrt(np.mean(residuals**2)))

    free_delta, *_ = np.linalg.lstsq(design, target, rcond=None)
    free_residuals = design @ free_delta - target
    free_rms = float(np.sqrt(np.mean(free_residuals**2)))
    if rms > max(10.0 * free_rms, _SOLVER_FLOOR):
        raise FitError(
            "no additive representation: increasing fit residual "
            f"{rms:.3e} vs unconstrained {free_rms:.3e}"
        )

    values = 1.0 + transform_map @ delta
    transform = MonotoneTransform(tuple(grid.tolist()), tuple(values.tolist()), anchor)
    return transform, rms


def fit_power_law(samples: Sequence[tuple[float, float]]) -> PowerLawFit:
    """Least-squares line in log-log space: slope = exponent, intercept = log alpha."""
    xs = []
    ys = []
    for index, sample in enumerate(samples):
        if len(sample) != 2:
            raise SampleError(f"sample {index} is not an (x, j(x)) pair")
        x, y = sample
        if x <= 0 or y <= 0:
            raise SampleError(f"log-domain violation at sample {index}: ({x!r}, {y!r})")
        xs.append(math.log(x))
        ys.append(math.log(y))
    if len(set(xs)) < 3:
        raise SampleError("underdetermined: need at least 3 distinct x values")
    slope, intercept = np.polyfit(xs, ys, 1)
    fitted = slope * np.asarray(xs) + intercept
    residual = float(np.sqrt(np.mean((np.asarray(ys) - fitted) ** 2)))
    return PowerLawFit(alpha=float(math.exp(intercept)), exponent=float(slope), residual=residual)


def collect_lambda_pairs(
    measure: UpdateMeasure, ensembles: Ensembles
) -> list[tuple[float, float]]:
    """(likelihood ratio, measure value) pairs with both values finite and the ratio positive."""
    pairs = []
    for case in _iter_cases(ensembles):
        dist = case.dist
        for hyp in case.hypotheses:
            for ctx in case.contexts:
                for ev in case.evidence:
                    try:
                        lam = evaluate(LAMBDA, dist, hyp, ev, ctx)
                        value = evaluate(measure, dist, hyp, ev, ctx)
                    except (EvaluationError, ImpossibleContextError):
                        continue
                    if lam <= 0 or not math.isfinite(lam) or not math.isfinite(value):
                        continue
                    pairs.append((lam, value))
    return pairs


def _regress_log_log(pairs: list[tuple[float, float]]) -> tuple[float, float]:
    log_lam = np.log([lam for lam, _ in pairs])
    log_u = np.log([value for _, value in pairs])
    slope, intercept = np.polyfit(log_lam, log_u, 1)
    fitted = slope * log_lam + intercept
    residual = float(np.sqrt(np.mean((log_u - fitted) ** 2)))
    return float(slope), residual


def _regress_recovered(
    measure: UpdateMeasure,
    ensembles: Ensembles,
    pairs: list[tuple[float, float]],
) -> tuple[float | None, float]:
    """General route for measures that take nonpositive values.

    Recovers the additive recoding h from the measure's own combination
    samples, then checks that h(U) is affine in the log likelihood ratio
    (the additive recoding of a conforming measure must be a rescaled log
    ratio). Returns (None, normalized residual); the slope is only
    determined up to the positive scale left free in h, so no exponent
    estimate is reported.
    """
    triples, _ = _combination_points(measure, _iter_cases(ensembles))
    if len(triples) < 3 * 8:
        raise SampleError(f"too few combination samples ({len(triples)}) to recover a transform")
    values = [coordinate for x, y, g, _ in triples for coordinate in (x, y, g)]
    size = min(_DEFAULT_GRID_SIZE, max(8, len(triples) // 3))
    grid = default_grid(values, size=size)
    transform, _ = recover_additive_transform([(x, y, g) for x, y, g, _ in triples], grid)

    lo, hi = grid[0], grid[-1]
    log_lam = []
    h_of_u = []
    for lam, value in pairs:
        if lo <= value <= hi:
            log_lam.append(math.log(lam))
            h_of_u.append(transform(value))
    if len(log_lam) < 8:
        raise SampleError("too few in-span pairs for the recovered-transform regression")
    log_lam = np.asarray(log_lam)
    h_of_u = np.asarray(h_of_u)
    slope, intercept = np.polyfit(log_lam, h_of_u, 1)
    fitted = slope * log_lam + intercept
    residual = float(np.sqrt(np.mean((h_of_u - fitted) ** 2)))
    scale = max(1.0, float(np.max(np.abs(h_of_u))))
    return None, residual / scale


def classify_measure(
    measure: UpdateMeasure, ensembles: ModelEnsemble | Sequence[ModelEnsemble]
) -> Classification:
    """Decide whether a measure is a monotone transform of the likelihood ratio.

    Runs the four audits; a measure that fails definition, combination, or
    consistency is not an update at all, and one that fails the independence
    correspondence is an update but no transform of the ratio. Survivors are
    regressed against the ratio: log U against log lambda when the measure is
    positive-valued (the slope is the exponent estimate), otherwise via the
    recovered additive transform. The ensembles should cover both factored
    and adversarial schemes so the correspondence audit is non-vacuous.
    """
    checks = run_all_audits(measure, ensembles)
    by_name = {check.check: check for check in checks}
    is_update = all(
        by_name[name].passed for name in ("definition", "combination", "consistency")
    )
    satisfies = by_name["independence_correspondence"].passed

    if not is_update:
        return Classification(measure.name, False, satisfies, None, "not_an_update", checks=tuple(checks))
    if not satisfies:
        return Classification(
            measure.name, True, False, None, "update_but_not_lambda", checks=tuple(checks)
        )

    pairs = collect_lambda_pairs(measure, ensembles)
    try:
        if len(pairs) < 8:
            raise SampleError(f"too few defined (lambda, U) pairs: {len(pairs)}")
        if all(value > 0 for _, value in pairs):
            a_estimate, residual = _regress_log_log(pairs)
        else:
            a_estimate, residual = _regress_recovered(measure, ensembles, pairs)
    except (SampleError, FitError) as exc:
        return Classification(
            measure.name,
            True,
            True,
            None,
            "update_but_not_lambda",
            diagnostic=f"transform regression failed: {exc}",
            checks=tuple(checks),
        )
    if residual > _CLASSIFY_FIT_TOL:
        return Classification(
            measure.name,
            True,
            True,
            a_estimate,
            "update_but_not_lambda",
            diagnostic=f"regression residual {residual:.3e} exceeds {_CLASSIFY_FIT_TOL}",
            checks=tuple(checks),
        )
    return Classification(
        measure.name, True, True, a_estimate, "transform_of_lambda", checks=tuple(checks)
    )
