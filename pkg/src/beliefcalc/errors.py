"""Exception types shared across the package."""


class BeliefError(Exception):
    """Base class for all beliefcalc errors."""


class ModelFormatError(BeliefError):
    """A model document is malformed or violates a table invariant."""


class PropositionError(BeliefError):
    """A proposition string cannot be parsed or references an unknown atom."""


class ImpossibleContextError(BeliefError):
    """Conditioning on a context with zero probability mass."""


class EvaluationError(BeliefError):
    """A measure or chain value is undefined for the given arguments.

    Covers degenerate priors, impossible evidence, 0/0 ratios,
    indeterminate extended-real products, and infinite weights.
    """


class ChainBrokenError(EvaluationError):
    """An evidence chain hit an unrealizable conditioning context."""

    def __init__(self, step: int, message: str | None = None):
        self.step = step
        super().__init__(message or f"chain broken at step {step}")


class AuditError(BeliefError):
    """An audit cannot produce a meaningful verdict (too few or no samples)."""


class SampleError(BeliefError):
    """Fit input data is malformed, out of range, or underdetermined."""


class FitError(BeliefError):
    """A requested fit has no admissible solution."""
