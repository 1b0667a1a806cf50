"""Finite propositional models and the exact-probability oracle.

A model is an explicit joint distribution over all truth assignments of its
atoms. World w (an integer in [0, 2**n)) assigns atom k the value of bit k.
Every query is answered by summing table entries over the worlds satisfying
a proposition, so probabilities are exact up to float rounding and two
logically equivalent propositions always produce bitwise-identical results:
they denote the same world set, hence the same cached sum.

The oracle is deliberately brute force; the atom cap (default 16, so at most
65536 worlds) keeps enumeration at desk scale.
"""

from __future__ import annotations

import json
import math
from typing import Mapping

from .errors import ImpossibleContextError, ModelFormatError, PropositionError
from .props import And, Atom, Const, Not, Or, Proposition, TRUE

__all__ = [
    "JointDistribution",
    "load_model",
    "probability",
    "odds",
    "conditionally_independent",
    "equivalent",
    "odds_from_probability",
    "probability_from_odds",
    "DEFAULT_ATOM_CAP",
]

DEFAULT_ATOM_CAP = 16
_NORMALIZATION_TOL = 1e-9


class JointDistribution:
    """Probability table over the 2**n truth assignments of n atoms.

    Immutable after construction (the mass cache only memoizes sums already
    determined by the table); safe for concurrent reads.
    """

    __slots__ = ("atoms", "table", "_atom_masks", "_full_mask", "_mass_cache")

    def __init__(self, atoms: list[str] | tuple[str, ...], table: list[float]):
        atoms = tuple(atoms)
        if not atoms:
            raise ModelFormatError("model declares no atoms")
        if len(set(atoms)) != len(atoms):
            raise ModelFormatError("duplicate atom name in model")
        n_worlds = 1 << len(atoms)
        if len(table) != n_worlds:
            raise ModelFormatError(
                f"table has {len(table)} entries, expected {n_worlds} for {len(atoms)} atoms"
            )
        total = math.fsum(table)
        for index, value in enumerate(table):
            if value < 0.0:
                raise ModelFormatError(f"negative probability {value} at world index {index}")
        if abs(total - 1.0) > _NORMALIZATION_TOL:
            kind = "deficit" if total < 1.0 else "surplus"
            raise ModelFormatError(f"probability mass {kind}: worlds sum to {total!r}")
        # renormalize so downstream identities hold tighter than the load tolerance
        self.atoms = atoms
        self.table = [float(value) / total for value in table]
        self._full_mask = (1 << n_worlds) - 1
        self._atom_masks = {}
        for k, name in enumerate(atoms):
            mask = 0
            for world in range(n_worlds):
                if (world >> k) & 1:
                    mask |= 1 << world
            self._atom_masks[name] = mask
        self._mass_cache: dict[int, float] = {}

    @property
    def world_count(self) -> int:
        return 1 << len(self.atoms)

    def world_mask(self, prop: Proposition) -> int:
        """Bitmask of worlds satisfying prop (bit w set iff world w satisfies)."""
        if isinstance(prop, Atom):
            mask = self._atom_masks.get(prop.name)
            if mask is None:
                raise PropositionError(f"unknown atom {prop.name!r}")
            return mask
        if isinstance(prop, Const):
            return self._full_mask if prop.value else 0
        if isinstance(prop, Not):
            return self._full_mask ^ self.world_mask(prop.inner)
        if isinstance(prop, And):
            return self.world_mask(prop.left) & self.world_mask(prop.right)
        if isinstance(prop, Or):
            return self.world_mask(prop.left) | self.world_mask(prop.right)
        raise TypeError(f"not a proposition: {prop!r}")

    def mass(self, prop_or_mask: Proposition | int) -> float:
        """Total probability of the worlds in a proposition or world mask."""
        mask = prop_or_mask if isinstance(prop_or_mask, int) else self.world_mask(prop_or_mask)
        cached = self._mass_cache.get(mask)
        if cached is not None:
            return cached
        total = 0.0
        bits = mask
        table = self.table
        while bits:
            low = bits & -bits
            total += table[low.bit_length() - 1]
            bits ^= low
        self._mass_cache[mask] = total
        return total


def load_model(document: str | bytes | Mapping, *, atom_cap: int = DEFAULT_ATOM_CAP) -> JointDistribution:
    """Parse and validate a JSON model document.

    Format: ``{"atoms": [...], "worlds": [{"assign": {atom: bool, ...}, "p": x}, ...]}``.
    Assignments must be full (every atom valued); worlds left unlisted get
    probability 0.
    """
    if isinstance(document, (str, bytes)):
        try:
            data = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"model document is not valid JSON: {exc}") from exc
    else:
        data = document
    if not isinstance(data, Mapping):
        raise ModelFormatError("model document must be a JSON object")
    atoms = data.get("atoms")
    if not isinstance(atoms, list) or not all(isinstance(a, str) for a in atoms):
        raise ModelFormatError('model document needs an "atoms" list of names')
    if len(atoms) > atom_cap:
        raise ModelFormatError(f"model declares {len(atoms)} atoms, exceeding the cap of {atom_cap}")
    worlds = data.get("worlds")
    if not isinstance(worlds, list):
        raise ModelFormatError('model document needs a "worlds" list')

    index_of = {name: k for k, name in enumerate(atoms)}
    table = [0.0] * (1 << len(atoms))
    seen: set[int] = set()
    for position, entry in enumerate(worlds):
        if not isinstance(entry, Mapping) or "assign" not in entry or "p" not in entry:
            raise ModelFormatError(f'world #{position} must be an object with "assign" and "p"')
        assign = entry["assign"]
        if not isinstance(assign, Mapping):
            raise ModelFormatError(f'world #{position}: "assign" must map atoms to booleans')
        for name in assign:
            if name not in index_of:
                raise ModelFormatError(f"world #{position}: undeclared atom {name!r}")
        missing = [name for name in atoms if name not in assign]
        if missing:
            raise ModelFormatError(f"world #{position}: incomplete assignment, missing {missing}")
        world = 0
        for name, value in assign.items():
            if not isinstance(value, bool):
                raise ModelFormatError(f"world #{position}: atom {name!r} must be true or false")
            if value:
                world |= 1 << index_of[name]
        if world in seen:
            raise ModelFormatError(f"world #{position}: duplicate assignment")
        seen.add(world)
        p = entry["p"]
        if not isinstance(p, (int, float)) or isinstance(p, bool):
            raise ModelFormatError(f"world #{position}: probability must be a number")
        if p < 0:
            raise ModelFormatError(f"world #{position}: negative probability {p}")
        table[world] = float(p)

    return JointDistribution(atoms, table)


def probability(dist: JointDistribution, prop: Proposition, given: Proposition = TRUE) -> float:
    """Exact conditional probability p(prop | given) by world enumeration."""
    given_mask = dist.world_mask(given)
    denom = dist.mass(given_mask)
    if denom <= 0.0:
        raise ImpossibleContextError(f"impossible context: p({given}) = 0")
    joint = dist.mass(dist.world_mask(prop) & given_mask)
    value = joint / denom
    # float summation can stray an ulp outside [0, 1]
    if value < 0.0:
        return 0.0
    if value > 1.0:
        return 1.0
    return value


def odds_from_probability(p: float) -> float:
    """p/(1-p), mapping p=0 to 0 and p=1 to +inf."""
    if p >= 1.0:
        return math.inf
    if p <= 0.0:
        return 0.0
    return p / (1.0 - p)


def probability_from_odds(o: float) -> float:
    """Inverse of odds_from_probability; +inf maps to 1."""
    if math.isinf(o):
        return 1.0
    return o / (1.0 + o)


def odds(dist: JointDistribution, hypothesis: Proposition, given: Proposition = TRUE) -> float:
    """O(hypothesis | given) = p/(1-p) with the p=1 -> +inf convention."""
    return odds_from_probability(probability(dist, hypothesis, given))


def conditionally_independent(
    dist: JointDistribution,
    e2: Proposition,
    e1: Proposition,
    hypothesis: Proposition,
    given: Proposition = TRUE,
    tol: float = 1e-9,
) -> bool:
    """True iff e2 is conditionally independent of e1 given both hypothesis truth values.

    Checks |p(e2|h,e1,given) - p(e2|h,given)| <= tol for h = hypothesis and
    h = !hypothesis. All four conditioning contexts must be realizable.
    """
    negated = Not(hypothesis)
    contexts = [
        ("hypothesis & e1 & context", And(And(hypothesis, e1), given)),
        ("hypothesis & context", And(hypothesis, given)),
        ("!hypothesis & e1 & context", And(And(negated, e1), given)),
        ("!hypothesis & context", And(negated, given)),
    ]
    for label, ctx in contexts:
        if dist.mass(ctx) <= 0.0:
            raise ImpossibleContextError(f"impossible context: {label} has zero probability")
    with_e1_pos = probability(dist, e2, contexts[0][1])
    without_pos = probability(dist, e2, contexts[1][1])
    with_e1_neg = probability(dist, e2, contexts[2][1])
    without_neg = probability(dist, e2, contexts[3][1])
    return abs(with_e1_pos - without_pos) <= tol and abs(with_e1_neg - without_neg) <= tol


def equivalent(dist: JointDistribution, left: Proposition, right: Proposition) -> bool:
    """Logical equivalence decided by truth-table comparison over the model's atoms."""
    return dist.world_mask(left) == dist.world_mask(right)
