"""Shared fixtures and the brute-force oracle used to cross-check everything.

The oracle here deliberately avoids the package's world-mask machinery: it
walks every truth assignment as a plain dict and evaluates propositions by
structural recursion, so agreement between the two paths is meaningful.
"""

import json
import math

import numpy as np
import pytest

from beliefcalc import JointDistribution, load_model
from beliefcalc.props import And, Atom, Const, Not, Or, Proposition, TRUE

TWO_ATOM_DOC = {
    "atoms": ["H", "E"],
    "worlds": [
        {"assign": {"H": True, "E": True}, "p": 0.3},
        {"assign": {"H": True, "E": False}, "p": 0.2},
        {"assign": {"H": False, "E": True}, "p": 0.1},
        {"assign": {"H": False, "E": False}, "p": 0.4},
    ],
}


@pytest.fixture
def two_atom() -> JointDistribution:
    return load_model(json.dumps(TWO_ATOM_DOC))


def eval_prop(prop: Proposition, assignment: dict) -> bool:
    """Independent structural evaluation of a proposition at one world."""
    if isinstance(prop, Const):
        return prop.value
    if isinstance(prop, Atom):
        return assignment[prop.name]
    if isinstance(prop, Not):
        return not eval_prop(prop.inner, assignment)
    if isinstance(prop, And):
        return eval_prop(prop.left, assignment) and eval_prop(prop.right, assignment)
    if isinstance(prop, Or):
        return eval_prop(prop.left, assignment) or eval_prop(prop.right, assignment)
    raise TypeError(prop)


def brute_probability(dist: JointDistribution, prop: Proposition, given: Proposition = TRUE) -> float:
    """Conditional probability by dict-based enumeration (the test oracle)."""
    matching = []
    context = []
    for world in range(dist.world_count):
        assignment = {name: bool((world >> k) & 1) for k, name in enumerate(dist.atoms)}
        mass = dist.table[world]
        if eval_prop(given, assignment):
            context.append(mass)
            if eval_prop(prop, assignment):
                matching.append(mass)
    denom = math.fsum(context)
    if denom == 0.0:
        raise ZeroDivisionError("oracle conditioned on an impossible context")
    return math.fsum(matching) / denom


def dense_model(rng: np.random.Generator, atom_count: int, floor: float = 0.25) -> JointDistribution:
    """Random strictly positive joint over generic atom names A0..A{n-1}."""
    raw = rng.random(1 << atom_count) + floor
    table = (raw / raw.sum()).tolist()
    return JointDistribution([f"A{k}" for k in range(atom_count)], table)


def literals(dist: JointDistribution) -> list[Proposition]:
    """Every atom and its negation."""
    props: list[Proposition] = []
    for name in dist.atoms:
        props.append(Atom(name))
        props.append(Not(Atom(name)))
    return props
