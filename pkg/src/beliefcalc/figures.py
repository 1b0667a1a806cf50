"""Matplotlib renderings written alongside CLI reports."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .calculus import ChainReport
from .harness import CheckResult
from .transforms import MonotoneTransform, PowerLawFit

__all__ = [
    "chain_figure",
    "audit_figure",
    "regression_figure",
    "transform_figure",
    "power_law_figure",
]

_VIOLATION_FLOOR = 1e-16


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def chain_figure(report: ChainReport, path: str | Path, prior: float | None = None) -> Path:
    """Posterior probability after each evidence item."""
    probs = [step.posterior_odds / (1.0 + step.posterior_odds) if math.isfinite(step.posterior_odds) else 1.0
             for step in report.steps]
    steps = list(range(1, len(probs) + 1))
    labels = [str(step.evidence) for step in report.steps]
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    if prior is not None:
        steps = [0] + steps
        probs = [prior] + probs
        labels = ["prior"] + labels
    ax.plot(steps, probs, "o-", color="C0")
    ax.set_xticks(steps)
    ax.set_xticklabels(labels, rotation=30, ha="right", fontsize=8)
    ax.set_ylim(-0.02, 1.02)
    ax.set_xlabel("evidence incorporated")
    ax.set_ylabel(f"p({report.hypothesis} | ...)")
    ax.set_title(f"{report.mode} chain for {report.hypothesis}")
    ax.grid(True, ls=":", alpha=0.6)
    return _save(fig, path)


def audit_figure(results: Sequence[CheckResult], path: str | Path) -> Path:
    """Normalized max violation per check, log scale, colored by verdict."""
    names = [r.check for r in results]
    violations = [max(r.max_violation, _VIOLATION_FLOOR) for r in results]
    colors = ["C2" if r.passed else "C3" for r in results]
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.bar(names, violations, color=colors)
    ax.set_yscale("log")
    ax.set_ylabel("max violation (check units)")
    ax.axhline(1.0, color="k", lw=0.8, ls="--")
    ax.tick_params(axis="x", rotation=20)
    for label, result in zip(ax.get_xticklabels(), results):
        label.set_color("C2" if result.passed else "C3")
    ax.set_title("audit violations (dashed line: unit tolerance)")
    return _save(fig, path)


def regression_figure(
    pairs: Sequence[tuple[float, float]], a_estimate: float | None, path: str | Path, measure: str = ""
) -> Path:
    """Measure value against likelihood ratio on log axes, with the fitted slope."""
    lams = np.array([lam for lam, _ in pairs])
    values = np.array([value for _, value in pairs])
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    positive = values > 0
    if positive.all():
        ax.loglog(lams, values, ".", ms=3, alpha=0.5)
        if a_estimate is not None and len(lams):
            xs = np.geomspace(lams.min(), lams.max(), 64)
            anchor_idx = int(np.argmin(np.abs(np.log(lams))))
            scale = values[anchor_idx] / lams[anchor_idx] ** a_estimate
            ax.loglog(xs, scale * xs**a_estimate, "C1-", lw=1, label=f"slope {a_estimate:.3g}")
            ax.legend()
        ax.set_ylabel("measure value")
    else:
        ax.semilogx(lams, values, ".", ms=3, alpha=0.5)
        ax.set_ylabel("measure value (signed)")
    ax.set_xlabel("likelihood ratio")
    ax.set_title(f"{measure} vs likelihood ratio".strip())
    ax.grid(True, ls=":", alpha=0.6)
    return _save(fig, path)


def transform_figure(transform: MonotoneTransform, path: str | Path) -> Path:
    """The recovered piecewise-linear recoding with its anchor marked."""
    grid = np.array(transform.grid)
    values = np.array(transform.values)
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(grid, values, "C0-", lw=1.2)
    ax.plot(grid[transform.anchor], values[transform.anchor], "C3o", label="anchor (h = 1)")
    ax.set_xlabel("x")
    ax.set_ylabel("h(x)")
    ax.set_title("recovered additive transform")
    ax.legend()
    ax.grid(True, ls=":", alpha=0.6)
    return _save(fig, path)


def power_law_figure(
    samples: Sequence[tuple[float, float]], fit: PowerLawFit, path: str | Path
) -> Path:
    """Samples and the fitted power law on log-log axes."""
    xs = np.array([x for x, _ in samples])
    ys = np.array([y for _, y in samples])
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.loglog(xs, ys, "C0.", ms=4, label="samples")
    span = np.geomspace(xs.min(), xs.max(), 64)
    ax.loglog(
        span,
        fit.alpha * span**fit.exponent,
        "C1-",
        lw=1,
        label=f"{fit.alpha:.3g} x^{fit.exponent:.3g} (rms {fit.residual:.2e})",
    )
    ax.set_xlabel("x")
    ax.set_ylabel("j(x)")
    ax.legend()
    ax.grid(True, ls=":", alpha=0.6)
    return _save(fig, path)
