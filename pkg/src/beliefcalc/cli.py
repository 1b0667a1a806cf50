"""Command-line surface: model evaluation, audits, classification, recovery.

Exit codes are stable across subcommands: 0 success, 2 input error
(unparseable model, proposition, measure name, or samples file), 3
computation error (broken chain, impossible context, failed audit that was
expected to pass). Only the JSON output format is contractual; ``table`` is
a human-oriented rendering. Non-finite reals are serialized as the strings
"inf", "-inf", and "nan" so reports stay strict JSON.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import figures
from .calculus import update_chain
from .errors import (
    AuditError,
    BeliefError,
    EvaluationError,
    FitError,
    ImpossibleContextError,
    SampleError,
)
from .harness import run_all_audits, standard_suite
from .measures import expected_failed_checks, parse_measure
from .props import conjoin, parse_proposition
from .transforms import (
    classify_measure,
    collect_lambda_pairs,
    default_grid,
    fit_power_law,
    recover_additive_transform,
)
from .worlds import DEFAULT_ATOM_CAP, load_model, probability

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_COMPUTE = 3

_EVAL_ORACLE_TOL = 1e-9


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="belief",
        description="Likelihood-ratio belief updating over finite propositional models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--format", choices=("json", "table"), default="json")
        p.add_argument("--figures", metavar="DIR", help="also render figures into DIR")

    p_eval = sub.add_parser("eval", help="run an evidence chain against a model")
    p_eval.add_argument("--model", required=True, help="path to a JSON model document")
    p_eval.add_argument("--hyp", required=True, help="hypothesis proposition")
    p_eval.add_argument("--evidence", default="", help="comma-separated propositions, order significant")
    p_eval.add_argument("--context", default="true", help="background context proposition")
    p_eval.add_argument("--mode", choices=("exact", "modular"), default="exact")
    add_common(p_eval)

    p_audit = sub.add_parser("audit", help="audit a measure over seeded ensembles")
    p_audit.add_argument("--measure", required=True)
    p_audit.add_argument("--seed", type=int, default=0)
    add_common(p_audit)

    p_classify = sub.add_parser("classify", help="classify a measure against the likelihood ratio")
    p_classify.add_argument("--measure", required=True)
    p_classify.add_argument("--seed", type=int, default=0)
    add_common(p_classify)

    p_recover = sub.add_parser("recover", help="recover an additive transform or fit a power law")
    p_recover.add_argument("--samples", required=True, help="JSON list of [x, y, g] triples or [x, j] pairs")
    p_recover.add_argument("--kind", choices=("additive", "power"), required=True)
    p_recover.add_argument("--grid-span", metavar="LO:HI", help="override the transform grid span")
    add_common(p_recover)

    return parser


def _sanitize(value):
    """Replace non-finite floats so output stays strict JSON."""
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if value == math.inf:
            return "inf"
        if value == -math.inf:
            return "-inf"
        return value
    if isinstance(value, dict):
        return {key: _sanitize(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_sanitize(item) for item in value]
    return value


def _emit(payload: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(_sanitize(payload), indent=2, sort_keys=True))
    else:
        _print_table(payload)


def _print_table(payload, indent: int = 0) -> None:
    pad = "  " * indent
    if isinstance(payload, dict):
        for key, value in payload.items():
            if isinstance(value, (dict, list)):
                print(f"{pad}{key}:")
                _print_table(value, indent + 1)
            else:
                print(f"{pad}{key}: {value}")
    elif isinstance(payload, list):
        for item in payload:
            if isinstance(item, (dict, list)):
                _print_table(item, indent)
                print(f"{pad}-")
            else:
                print(f"{pad}{item}")
    else:
        print(f"{pad}{payload}")


def _fail(message: str, code: int) -> int:
    print(json.dumps({"error": message}), file=sys.stderr)
    return code


def _atom_cap() -> int:
    raw = os.environ.get("BELIEF_ATOM_CAP")
    if raw is None:
        return DEFAULT_ATOM_CAP
    try:
        return int(raw)
    except ValueError as exc:
        raise BeliefError(f"BELIEF_ATOM_CAP must be an integer, got {raw!r}") from exc


def _cmd_eval(args) -> int:
    dist = load_model(Path(args.model).read_text(), atom_cap=_atom_cap())
    hypothesis = parse_proposition(args.hyp)
    evidence = [parse_proposition(text) for text in args.evidence.split(",") if text.strip()]
    context = parse_proposition(args.context)

    report = update_chain(dist, hypothesis, evidence, context, mode=args.mode)
    oracle = probability(dist, hypothesis, conjoin(evidence, context))
    difference = abs(report.final_probability - oracle)

    payload = report.to_dict()
    payload["oracle_probability"] = oracle
    payload["abs_difference"] = difference
    if args.mode == "modular" and difference > _EVAL_ORACLE_TOL:
        payload["divergence_warning"] = (
            f"modular chain diverges from the oracle by {difference:.6g}; "
            "the evidence is not conditionally independent given the hypothesis"
        )
    else:
        payload["divergence_warning"] = None
    _emit(payload, args.format)

    if args.figures:
        prior = probability(dist, hypothesis, context)
        figures.chain_figure(report, Path(args.figures) / "chain.png", prior=prior)
    if args.mode == "exact" and difference > _EVAL_ORACLE_TOL:
        return _fail(f"exact chain disagrees with the oracle by {difference:.3e}", EXIT_COMPUTE)
    return EXIT_OK


def _cmd_audit(args) -> int:
    measure = parse_measure(args.measure)
    suite = standard_suite(args.seed)
    results = run_all_audits(measure, suite)
    expected_failures = sorted(expected_failed_checks(measure))
    ok = all(result.passed for result in results if result.check not in expected_failures)
    payload = {
        "measure": measure.name,
        "seed": args.seed,
        "checks": [result.to_dict() for result in results],
        "expected_failures": expected_failures,
        "all_expected_passed": ok,
    }
    _emit(payload, args.format)
    if args.figures:
        figures.audit_figure(results, Path(args.figures) / "audits.png")
    return EXIT_OK if ok else EXIT_COMPUTE


def _cmd_classify(args) -> int:
    measure = parse_measure(args.measure)
    suite = standard_suite(args.seed)
    classification = classify_measure(measure, suite)
    payload = classification.to_dict()
    payload["seed"] = args.seed
    _emit(payload, args.format)
    if args.figures:
        pairs = collect_lambda_pairs(measure, suite)
        figures.regression_figure(
            pairs, classification.a_estimate, Path(args.figures) / "classification.png", measure.name
        )
    return EXIT_OK


def _parse_grid_span(text: str) -> tuple[float, float]:
    try:
        lo_text, hi_text = text.split(":")
        lo, hi = float(lo_text), float(hi_text)
    except ValueError as exc:
        raise SampleError(f"--grid-span must be LO:HI, got {text!r}") from exc
    if not lo < hi:
        raise SampleError(f"--grid-span needs LO < HI, got {text!r}")
    return lo, hi


def _cmd_recover(args) -> int:
    try:
        data = json.loads(Path(args.samples).read_text())
    except json.JSONDecodeError as exc:
        raise SampleError(f"samples file is not valid JSON: {exc}") from exc
    if not isinstance(data, list) or not data:
        raise SampleError("samples file must be a nonempty JSON list")

    if args.kind == "additive":
        samples = []
        for index, entry in enumerate(data):
            if not isinstance(entry, list) or len(entry) != 3:
                raise SampleError(f"sample {index} must be an [x, y, g] triple")
            samples.append(tuple(float(v) for v in entry))
        if args.grid_span:
            lo, hi = _parse_grid_span(args.grid_span)
            grid = np.geomspace(lo, hi, 64) if lo > 0 else np.linspace(lo, hi, 64)
        else:
            grid = default_grid([v for triple in samples for v in triple])
        transform, residual = recover_additive_transform(samples, grid)
        payload = transform.to_dict()
        payload["residual"] = residual
        _emit(payload, args.format)
        if args.figures:
            figures.transform_figure(transform, Path(args.figures) / "transform.png")
    else:
        pairs = []
        for index, entry in enumerate(data):
            if not isinstance(entry, list) or len(entry) != 2:
                raise SampleError(f"sample {index} must be an [x, j] pair")
            pairs.append((float(entry[0]), float(entry[1])))
        fit = fit_power_law(pairs)
        _emit(fit.to_dict(), args.format)
        if args.figures:
            figures.power_law_figure(pairs, fit, Path(args.figures) / "powerlaw.png")
    return EXIT_OK


_COMMANDS = {
    "eval": _cmd_eval,
    "audit": _cmd_audit,
    "classify": _cmd_classify,
    "recover": _cmd_recover,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (EvaluationError, ImpossibleContextError, AuditError, FitError) as exc:
        return _fail(str(exc), EXIT_COMPUTE)
    except (BeliefError, FileNotFoundError, IsADirectoryError) as exc:
        return _fail(str(exc), EXIT_INPUT)


if __name__ == "__main__":
    sys.exit(main())
