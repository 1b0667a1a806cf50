"""Boolean propositions over named atoms.

A proposition is an immutable expression tree built from atom references,
negation, conjunction, disjunction, and the constants true/false. Evaluation
against a full truth assignment is total, so any proposition can be decided
world by world.

The concrete string syntax is: identifiers for atoms, ``!`` ``&`` ``|`` for
the connectives (in decreasing precedence, ``&`` and ``|`` left-associative),
parentheses, and the keywords ``true`` / ``false``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

from .errors import PropositionError

__all__ = [
    "Proposition",
    "Atom",
    "Not",
    "And",
    "Or",
    "Const",
    "TRUE",
    "FALSE",
    "parse_proposition",
    "conjoin",
]


class Proposition:
    """Base class; concrete nodes are Atom, Not, And, Or, Const."""

    __slots__ = ()

    def atoms(self) -> Iterator[str]:
        """Yield every atom name referenced by this proposition."""
        stack = [self]
        while stack:
            node = stack.pop()
            if isinstance(node, Atom):
                yield node.name
            elif isinstance(node, Not):
                stack.append(node.inner)
            elif isinstance(node, (And, Or)):
                stack.append(node.left)
                stack.append(node.right)

    # precedence: Or=1, And=2, Not=3, leaves=4
    def _precedence(self) -> int:
        return 4

    def _render(self, parent_prec: int) -> str:
        text = str(self)
        if self._precedence() < parent_prec:
            return f"({text})"
        return text


@dataclass(frozen=True, slots=True)
class Const(Proposition):
    value: bool

    def __str__(self) -> str:
        return "true" if self.value else "false"


@dataclass(frozen=True, slots=True)
class Atom(Proposition):
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Not(Proposition):
    inner: Proposition

    def _precedence(self) -> int:
        return 3

    def __str__(self) -> str:
        return "!" + self.inner._render(3)


@dataclass(frozen=True, slots=True)
class And(Proposition):
    left: Proposition
    right: Proposition

    def _precedence(self) -> int:
        return 2

    def __str__(self) -> str:
        return f"{self.left._render(2)} & {self.right._render(2)}"


@dataclass(frozen=True, slots=True)
class Or(Proposition):
    left: Proposition
    right: Proposition

    def _precedence(self) -> int:
        return 1

    def __str__(self) -> str:
        return f"{self.left._render(1)} | {self.right._render(1)}"


TRUE = Const(True)
FALSE = Const(False)

_TOKEN = re.compile(r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[!&|()]))")
_KEYWORDS = {"true": TRUE, "false": FALSE}


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            remainder = text[pos:].strip()
            if not remainder:
                break
            raise PropositionError(f"unexpected character {remainder[0]!r} in proposition {text!r}")
        tokens.append(match.group("ident") or match.group("op"))
        pos = match.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> str:
        token = self.peek()
        if token is None:
            raise PropositionError(f"unexpected end of proposition {self.text!r}")
        self.pos += 1
        return token

    def parse(self) -> Proposition:
        node = self.disjunction()
        if self.peek() is not None:
            raise PropositionError(f"trailing input {self.peek()!r} in proposition {self.text!r}")
        return node

    def disjunction(self) -> Proposition:
        node = self.conjunction()
        while self.peek() == "|":
            self.take()
            node = Or(node, self.conjunction())
        return node

    def conjunction(self) -> Proposition:
        node = self.unary()
        while self.peek() == "&":
            self.take()
            node = And(node, self.unary())
        return node

    def unary(self) -> Proposition:
        if self.peek() == "!":
            self.take()
            return Not(self.unary())
        return self.primary()

    def primary(self) -> Proposition:
        token = self.take()
        if token == "(":
            node = self.disjunction()
            if self.peek() != ")":
                raise PropositionError(f"missing ')' in proposition {self.text!r}")
            self.take()
            return node
        if token in "&|)!":
            raise PropositionError(f"unexpected {token!r} in proposition {self.text!r}")
        lowered = token.lower()
        if lowered in _KEYWORDS:
            return _KEYWORDS[lowered]
        return Atom(token)


def parse_proposition(text: str) -> Proposition:
    """Parse the CLI proposition syntax into an expression tree."""
    if not text or not text.strip():
        raise PropositionError("empty proposition")
    return _Parser(text).parse()


def conjoin(props: list[Proposition] | tuple[Proposition, ...], tail: Proposition = TRUE) -> Proposition:
    """Left-fold a list of propositions into a conjunction, ending with tail.

    An empty list yields the tail itself; a tail of TRUE is dropped when the
    list is nonempty (conditioning on P & true equals conditioning on P).
    """
    node: Proposition | None = None
    for prop in props:
        node = prop if node is None else And(node, prop)
    if node is None:
        return tail
    if tail is TRUE:
        return node
    return And(node, tail)
