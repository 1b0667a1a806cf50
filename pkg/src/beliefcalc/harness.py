"""Empirical audits of update-measure behavior over seeded model ensembles.

Each audit samples a candidate measure across an ensemble of joint
distributions and decides whether an expected structural property holds:

* definition: the posterior is a function of (update value, prior) alone,
  nondecreasing in each argument;
* combination: the update for joint evidence is a function of the two
  sequential updates, nondecreasing in each, and insensitive to how a
  conjunction of three evidence items is bracketed;
* consistency: logically equivalent argument triples give identical values;
* independence_correspondence: for evidence pairs that are conditionally
  independent given the hypothesis, the update for the second item does not
  depend on the first having been observed.

Functional dependence and monotonicity are tested on samples rather than by
fitting a function: near-coincident inputs must agree, and any sample whose
inputs dominate another's (both coordinates >=) must not have a smaller
output beyond slack. Infinite or undefined values are excluded from all
comparisons and reported in the ``excluded`` count.

Violations are reported in units of each clause's tolerance, so a check
passes iff max_violation <= 1.0 (exactly 0.0 for the consistency check, and
the magnitude-normalized deviation with tolerance 1e-6 for the independence
correspondence). Audits are deterministic: the same measure and ensemble
seed yield byte-identical serialized results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import AuditError, EvaluationError, ImpossibleContextError
from .measures import UpdateMeasure, evaluate
from .props import And, Atom, Not, Proposition, TRUE
from .worlds import JointDistribution, conditionally_independent, probability

__all__ = [
    "SCHEMES",
    "CHECK_TOLERANCES",
    "EnsembleCase",
    "ModelEnsemble",
    "Witness",
    "CheckResult",
    "audit_definition",
    "audit_combination",
    "audit_consistency",
    "audit_independence_correspondence",
    "run_all_audits",
    "standard_suite",
]

SCHEMES = ("dense_random", "factored_conditionally_independent", "dependent_adversarial")
_SCHEME_CODE = {name: code for code, name in enumerate(SCHEMES)}

# Tolerances for the normalized max_violation reported by each check.
CHECK_TOLERANCES = {
    "definition": 1.0,
    "combination": 1.0,
    "consistency": 0.0,
    "independence_correspondence": 1e-6,
}

_FUNC_DEP_INPUT_TOL = 1e-9
_FUNC_DEP_OUTPUT_TOL = 1e-6
_MONOTONE_SLACK = 1e-9
_ASSOCIATIVITY_TOL = 1e-12
_CORRESPONDENCE_TOL = 1e-6
_MIN_SAMPLES = 100
_WITNESS_CAP = 10


@dataclass(frozen=True, slots=True)
class EnsembleCase:
    """One generated model plus the proposition catalog audits draw from."""

    model_id: str
    dist: JointDistribution
    hypotheses: tuple[Proposition, ...]
    evidence: tuple[Proposition, ...]
    contexts: tuple[Proposition, ...]


@dataclass(frozen=True)
class ModelEnsemble:
    """Reproducible family of joint distributions for auditing.

    dense_random draws a strictly positive table for every world;
    factored_conditionally_independent builds p(H) * prod p(Ei | H), so all
    evidence atoms are conditionally independent given the hypothesis by
    construction; dependent_adversarial keeps the factored backbone but adds
    evidence propositions that share atoms (a conjunction and a negation),
    planting logical dependence between catalog entries.
    """

    seed: int
    atom_count: int = 3
    model_count: int = 30
    scheme: str = "dense_random"

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if not 3 <= self.atom_count <= 5:
            raise ValueError(f"atom_count must be in 3..5, got {self.atom_count}")
        if self.model_count < 1:
            raise ValueError("model_count must be positive")

    def case(self, index: int) -> EnsembleCase:
        """Regenerate a single case; the same index always yields the same model."""
        if not 0 <= index < self.model_count:
            raise IndexError(f"case index {index} out of range for {self.model_count} models")
        rng = np.random.default_rng([_SCHEME_CODE[self.scheme], self.seed & 0xFFFFFFFF, index])
        n = self.atom_count
        atoms = ("H",) + tuple(f"E{k}" for k in range(1, n))
        if self.scheme == "dense_random":
            raw = rng.random(1 << n) + 0.25
            table = (raw / raw.sum()).tolist()
        else:
            p_h = rng.uniform(0.1, 0.9)
            cond = rng.uniform(0.1, 0.9, size=(n - 1, 2))  # [atom, hypothesis truth]
            table = []
            for world in range(1 << n):
                h = (world >> 0) & 1
                p = p_h if h else 1.0 - p_h
                for k in range(1, n):
                    c = cond[k - 1, h]
                    p *= c if (world >> k) & 1 else 1.0 - c
                table.append(p)
        dist = JointDistribution(atoms, table)

        hyp = Atom("H")
        hypotheses = (hyp, Not(hyp))
        e_atoms = tuple(Atom(name) for name in atoms[1:])
        if self.scheme == "dense_random":
            evidence = tuple(p for atom in e_atoms for p in (atom, Not(atom)))
            contexts = (TRUE, e_atoms[-1])
        elif self.scheme == "factored_conditionally_independent":
            evidence = e_atoms
            contexts = (TRUE,)
        else:
            evidence = e_atoms + (And(e_atoms[0], e_atoms[1]), Not(e_atoms[0]))
            contexts = (TRUE,)
        return EnsembleCase(
            model_id=f"{self.scheme}:{self.seed}:{index}",
            dist=dist,
            hypotheses=hypotheses,
            evidence=evidence,
            contexts=contexts,
        )

    def cases(self) -> Iterator[EnsembleCase]:
        for index in range(self.model_count):
            yield self.case(index)


def standard_suite(seed: int) -> tuple[ModelEnsemble, ModelEnsemble, ModelEnsemble]:
    """Default audit suite: one ensemble per generation scheme."""
    return (
        ModelEnsemble(seed, atom_count=4, model_count=30, scheme="dense_random"),
        ModelEnsemble(seed, atom_count=3, model_count=30, scheme="factored_conditionally_independent"),
        ModelEnsemble(seed, atom_count=3, model_count=20, scheme="dependent_adversarial"),
    )


Ensembles = ModelEnsemble | Sequence[ModelEnsemble | EnsembleCase]


def _iter_cases(ensembles: Ensembles) -> Iterator[EnsembleCase]:
    if isinstance(ensembles, (ModelEnsemble, EnsembleCase)):
        ensembles = (ensembles,)
    for ensemble in ensembles:
        if isinstance(ensemble, EnsembleCase):
            yield ensemble
        else:
            yield from ensemble.cases()


# ---------------------------------------------------------------------------
# Results


@dataclass(frozen=True, slots=True)
class Witness:
    """A reproducible worst offender: clause, normalized violation, samples."""

    clause: str
    violation: float
    samples: tuple[dict, ...]

    def to_dict(self) -> dict:
        return {
            "clause": self.clause,
            "violation": self.violation,
            "samples": list(self.samples),
        }


@dataclass(frozen=True, slots=True)
class CheckResult:
    check: str
    passed: bool
    samples: int
    max_violation: float
    witnesses: tuple[Witness, ...]
    excluded: int = 0

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "passed": self.passed,
            "samples": self.samples,
            "max_violation": self.max_violation,
            "witnesses": [w.to_dict() for w in self.witnesses],
            "excluded": self.excluded,
        }


def _sample_dict(ref: tuple, values: dict) -> dict:
    model_id, hypothesis, evidence, context = ref
    return {
        "model": model_id,
        "hypothesis": hypothesis,
        "evidence": evidence,
        "context": context,
        "values": values,
    }


def _finish(check: str, samples: int, excluded: int, max_violation: float, offenders) -> CheckResult:
    offenders.sort(key=lambda item: (-item.violation, item.clause, str(item.samples)))
    max_violation = float(max_violation)
    return CheckResult(
        check=check,
        passed=bool(max_violation <= CHECK_TOLERANCES[check]),
        samples=samples,
        max_violation=max_violation,
        witnesses=tuple(offenders[:_WITNESS_CAP]),
        excluded=excluded,
    )


# ---------------------------------------------------------------------------
# Generic sample engines


class _MaxFenwick:
    """Prefix-maximum tree tracking (value, payload index)."""

    def __init__(self, size: int):
        self.size = size
        self.best: list[tuple[float, int]] = [(-math.inf, -1)] * (size + 1)

    def update(self, pos: int, value: float, payload: int) -> None:
        pos += 1
        while pos <= self.size:
            if value > self.best[pos][0]:
                self.best[pos] = (value, payload)
            pos += pos & -pos

    def query(self, pos: int) -> tuple[float, int]:
        pos += 1
        best = (-math.inf, -1)
        while pos > 0:
            if self.best[pos][0] > best[0]:
                best = self.best[pos]
            pos -= pos & -pos
        return best


def _dominance_scan(points: list[tuple]) -> tuple[float, list[tuple[float, int, int]]]:
    """Largest output drop over pairs where both inputs are >= another sample's.

    points are (a, b, value, ref). Returns (max_drop, offender index pairs
    beyond slack). A conforming measure has max_drop ~ float noise.
    """
    if not points:
        return 0.0, []
    order = sorted(range(len(points)), key=lambda i: (points[i][0], points[i][1]))
    b_values = sorted({p[1] for p in points})
    rank = {v: i for i, v in enumerate(b_values)}
    tree = _MaxFenwick(len(b_values))
    max_drop = 0.0
    offenders: list[tuple[float, int, int]] = []
    for idx in order:
        _, b, value, _ = points[idx]
        best_value, best_idx = tree.query(rank[b])
        if best_idx >= 0:
            drop = best_value - value
            if drop > max_drop:
                max_drop = drop
            if drop > _MONOTONE_SLACK:
                offenders.append((drop, best_idx, idx))
        tree.update(rank[b], value, idx)
    return max_drop, offenders


def _coincidence_scan(points: list[tuple]) -> tuple[float, list[tuple[float, int, int]]]:
    """Largest output disagreement over pairs with near-identical inputs."""
    tol = _FUNC_DEP_INPUT_TOL
    buckets: dict[tuple[int, int], list[tuple[float, float, float, int]]] = {}
    max_delta = 0.0
    offenders: list[tuple[float, int, int]] = []
    for idx, (a, b, value, _) in enumerate(points):
        key_a = round(a / tol)
        key_b = round(b / tol)
        for da in (-1, 0, 1):
            for db in (-1, 0, 1):
                cell = buckets.get((key_a + da, key_b + db))
                if not cell:
                    continue
                for a2, b2, v2, idx2 in cell:
                    if abs(a - a2) <= tol and abs(b - b2) <= tol:
                        delta = abs(value - v2)
                        if delta > max_delta:
                            max_delta = delta
                        if delta > _FUNC_DEP_OUTPUT_TOL:
                            offenders.append((delta, idx2, idx))
        cell = buckets.setdefault((key_a, key_b), [])
        if not any(a2 == a and b2 == b and v2 == value for a2, b2, v2, _ in cell):
            cell.append((a, b, value, idx))
    return max_delta, offenders


def _pair_witnesses(
    clause: str,
    offenders: list[tuple[float, int, int]],
    points: list[tuple],
    value_names: tuple[str, str, str],
    scale: float,
) -> list[Witness]:
    name_a, name_b, name_value = value_names
    witnesses = []
    for violation, first, second in offenders:
        samples = []
        for idx in (first, second):
            a, b, value, ref = points[idx]
            samples.append(_sample_dict(ref, {name_a: a, name_b: b, name_value: value}))
        witnesses.append(Witness(clause, violation / scale, tuple(samples)))
    return witnesses


# ---------------------------------------------------------------------------
# Sample collection


def _definition_points(measure: UpdateMeasure, cases: Iterable[EnsembleCase]):
    points = []
    excluded = 0
    for case in cases:
        dist = case.dist
        for hyp in case.hypotheses:
            for ctx in case.contexts:
                for ev in case.evidence:
                    try:
                        value = evaluate(measure, dist, hyp, ev, ctx)
                    except (EvaluationError, ImpossibleContextError):
                        excluded += 1
                        continue
                    if not math.isfinite(value):
                        excluded += 1
                        continue
                    prior = probability(dist, hyp, ctx)
                    posterior = probability(dist, hyp, And(ev, ctx))
                    ref = (case.model_id, str(hyp), str(ev), str(ctx))
                    points.append((value, prior, posterior, ref))
    return points, excluded


def _combination_points(measure: UpdateMeasure, cases: Iterable[EnsembleCase]):
    points = []
    excluded = 0
    for case in cases:
        dist = case.dist
        for hyp in case.hypotheses:
            for ctx in case.contexts:
                for first in case.evidence:
                    for second in case.evidence:
                        try:
                            x = evaluate(measure, dist, hyp, first, ctx)
                            y = evaluate(measure, dist, hyp, second, And(first, ctx))
                            z = evaluate(measure, dist, hyp, And(first, second), ctx)
                        except (EvaluationError, ImpossibleContextError):
                            excluded += 1
                            continue
                        if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(z)):
                            excluded += 1
                            continue
                        ref = (case.model_id, str(hyp), f"{first} ; {second}", str(ctx))
                        points.append((x, y, z, ref))
    return points, excluded


# ---------------------------------------------------------------------------
# Audits


def audit_definition(measure: UpdateMeasure, ensembles: Ensembles) -> CheckResult:
    """Posterior must be a bi-monotone function of (update value, prior)."""
    points, excluded = _definition_points(measure, _iter_cases(ensembles))
    if len(points) < _MIN_SAMPLES:
        raise AuditError(f"insufficient samples: {len(points)} defined, need >= {_MIN_SAMPLES}")
    names = ("u", "prior", "posterior")
    delta, co_offenders = _coincidence_scan(points)
    drop, mono_offenders = _dominance_scan(points)
    max_violation = max(delta / _FUNC_DEP_OUTPUT_TOL, drop / _MONOTONE_SLACK, 0.0)
    witnesses = _pair_witnesses("functional_dependence", co_offenders, points, names, _FUNC_DEP_OUTPUT_TOL)
    witnesses += _pair_witnesses("monotonicity", mono_offenders, points, names, _MONOTONE_SLACK)
    return _finish("definition", len(points), excluded, max_violation, witnesses)


def audit_combination(measure: UpdateMeasure, ensembles: Ensembles) -> CheckResult:
    """Joint-evidence update must be a bi-monotone function of the two sequential updates."""
    cases = list(_iter_cases(ensembles))
    points, excluded = _combination_points(measure, cases)
    if len(points) < _MIN_SAMPLES:
        raise AuditError(f"insufficient samples: {len(points)} defined, need >= {_MIN_SAMPLES}")
    names = ("u_first", "u_second_given_first", "u_joint")
    delta, co_offenders = _coincidence_scan(points)
    drop, mono_offenders = _dominance_scan(points)
    witnesses = _pair_witnesses("functional_dependence", co_offenders, points, names, _FUNC_DEP_OUTPUT_TOL)
    witnesses += _pair_witnesses("monotonicity", mono_offenders, points, names, _MONOTONE_SLACK)

    # bracketing insensitivity on evidence triples
    assoc_max = 0.0
    for case in cases:
        dist = case.dist
        pool = case.evidence[:3]
        for hyp in case.hypotheses:
            for ctx in case.contexts:
                for e1, e2, e3 in product(pool, repeat=3):
                    left = And(And(e1, e2), e3)
                    right = And(e1, And(e2, e3))
                    try:
                        u_left = evaluate(measure, dist, hyp, left, ctx)
                        u_right = evaluate(measure, dist, hyp, right, ctx)
                    except (EvaluationError, ImpossibleContextError):
                        excluded += 1
                        continue
                    if u_left == u_right:
                        continue
                    if not (math.isfinite(u_left) and math.isfinite(u_right)):
                        excluded += 1
                        continue
                    diff = abs(u_left - u_right)
                    if diff > assoc_max:
                        assoc_max = diff
                    if diff > _ASSOCIATIVITY_TOL:
                        ref = (case.model_id, str(hyp), f"({e1} & {e2}) & {e3}", str(ctx))
                        witnesses.append(
                            Witness(
                                "associativity",
                                diff / _ASSOCIATIVITY_TOL,
                                (_sample_dict(ref, {"u_left": u_left, "u_right": u_right}),),
                            )
                        )
    max_violation = max(
        delta / _FUNC_DEP_OUTPUT_TOL,
        drop / _MONOTONE_SLACK,
        assoc_max / _ASSOCIATIVITY_TOL,
        0.0,
    )
    return _finish("combination", len(points), excluded, max_violation, witnesses)


def audit_consistency(measure: UpdateMeasure, ensembles: Ensembles) -> CheckResult:
    """Logically equivalent argument triples must give identical values exactly."""
    samples = 0
    excluded = 0
    max_violation = 0.0
    witnesses: list[Witness] = []

    def compare(case, base_args, varied_args, form: str):
        nonlocal samples, excluded, max_violation
        try:
            reference = evaluate(measure, case.dist, *base_args)
            variant = evaluate(measure, case.dist, *varied_args)
        except (EvaluationError, ImpossibleContextError):
            excluded += 1
            return
        samples += 1
        if reference == variant:
            return
        diff = abs(reference - variant)
        if not math.isfinite(diff):
            diff = math.inf
        if diff > max_violation:
            max_violation = diff
        hyp, ev, ctx = base_args
        ref = (case.model_id, str(hyp), str(ev), str(ctx))
        witnesses.append(
            Witness(form, diff, (_sample_dict(ref, {"reference": reference, "variant": variant}),))
        )

    for case in _iter_cases(ensembles):
        for hyp in case.hypotheses:
            for ctx in case.contexts:
                if len(case.evidence) >= 2:
                    e1, e2 = case.evidence[0], case.evidence[1]
                    compare(case, (hyp, And(e1, e2), ctx), (hyp, And(e2, e1), ctx), "commuted_conjunction")
                for ev in case.evidence:
                    compare(case, (hyp, ev, ctx), (hyp, Not(Not(ev)), ctx), "double_negation")
                    compare(case, (hyp, ev, ctx), (And(hyp, TRUE), ev, ctx), "hypothesis_and_true")
    if samples < _MIN_SAMPLES:
        raise AuditError(f"insufficient samples: {samples} defined, need >= {_MIN_SAMPLES}")
    return _finish("consistency", samples, excluded, max_violation, witnesses)


def audit_independence_correspondence(
    measure: UpdateMeasure, ensembles: Ensembles, ci_tol: float = 1e-9
) -> CheckResult:
    """Conditionally independent evidence must leave the update unchanged.

    Evidence pairs are filtered by the conditional-independence test at
    ci_tol; the deviation |U(H,E2,E1&e) - U(H,E2,e)| is normalized by
    max(1, |U(H,E2,e)|) and compared against 1e-6.
    """
    samples = 0
    excluded = 0
    max_violation = 0.0
    witnesses: list[Witness] = []
    for case in _iter_cases(ensembles):
        dist = case.dist
        for hyp in case.hypotheses:
            for ctx in case.contexts:
                for first in case.evidence:
                    for second in case.evidence:
                        if first == second:
                            continue
                        try:
                            if not conditionally_independent(dist, second, first, hyp, ctx, tol=ci_tol):
                                continue
                        except ImpossibleContextError:
                            excluded += 1
                            continue
                        try:
                            u_in_context = evaluate(measure, dist, hyp, second, And(first, ctx))
                            u_plain = evaluate(measure, dist, hyp, second, ctx)
                        except (EvaluationError, ImpossibleContextError):
                            excluded += 1
                            continue
                        if not (math.isfinite(u_in_context) and math.isfinite(u_plain)):
                            excluded += 1
                            continue
                        samples += 1
                        deviation = abs(u_in_context - u_plain)
                        normalized = deviation / max(1.0, abs(u_plain))
                        if normalized > max_violation:
                            max_violation = normalized
                        if normalized > _CORRESPONDENCE_TOL:
                            ref = (case.model_id, str(hyp), f"{second} given {first}", str(ctx))
                            witnesses.append(
                                Witness(
                                    "modularity",
                                    normalized,
                                    (
                                        _sample_dict(
                                            ref,
                                            {
                                                "u_in_context": u_in_context,
                                                "u_plain": u_plain,
                                                "deviation": deviation,
                                            },
                                        ),
                                    ),
                                )
                            )
    if samples == 0:
        raise AuditError("vacuous audit: no conditionally independent evidence pairs found")
    return _finish("independence_correspondence", samples, excluded, max_violation, witnesses)


def run_all_audits(measure: UpdateMeasure, ensembles: Ensembles) -> list[CheckResult]:
    """Run the four audits in a fixed order."""
    return [
        audit_definition(measure, ensembles),
        audit_combination(measure, ensembles),
        audit_consistency(measure, ensembles),
        audit_independence_correspondence(measure, ensembles),
    ]
