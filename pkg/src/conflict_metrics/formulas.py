"""Propositional formulas and knowledge bases.

Formulas are immutable trees over variables, constants, negation,
conjunction, disjunction and implication.  A knowledge base is an ordered,
duplicate-free list of formulas with stable 1-based indices; every derived
artifact in this package (MUSes, MSSes, decompositions, measures) refers to
formulas through these indices, passed around as plain ``frozenset[int]``
values.

Concrete syntax (one formula per line in KB files):

    ``!`` or ``~``   negation              (binds tightest)
    ``&``            conjunction
    ``|``            disjunction
    ``->``           implication           (right associative, binds loosest)
    ``true`` ``false``  constants
    identifiers      ``[A-Za-z_][A-Za-z0-9_]*``
    ``# ...``        comment to end of line, blank lines ignored

Equality of formulas is structural: same tree shape, same variable names.
Duplicate formulas in a KB are dropped, keeping the first occurrence; no
semantic equivalence check is attempted.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .errors import FormulaParseError, KbParseError

IndexSet = frozenset[int]


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Not:
    child: "Formula"

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Const:
    value: bool

    def __str__(self) -> str:
        return format_formula(self)


TRUE = Const(True)
FALSE = Const(False)

Formula = Var | Not | And | Or | Implies | Const

# Binding strength; implication is right associative, & and | associate left.
_PREC = {Implies: 1, Or: 2, And: 3, Not: 4, Var: 5, Const: 5}


def format_formula(f: Formula) -> str:
    """Render ``f`` with the minimal parentheses needed to reparse it."""

    def fmt(node: Formula, min_prec: int) -> str:
        prec = _PREC[type(node)]
        match node:
            case Var(name):
                s = name
            case Const(value):
                s = "true" if value else "false"
            case Not(child):
                s = "!" + fmt(child, 4)
            case And(left, right):
                s = f"{fmt(left, 3)} & {fmt(right, 4)}"
            case Or(left, right):
                s = f"{fmt(left, 2)} | {fmt(right, 3)}"
            case Implies(left, right):
                s = f"{fmt(left, 2)} -> {fmt(right, 1)}"
            case _:
                raise TypeError(f"not a formula: {node!r}")
        return f"({s})" if prec < min_prec else s

    return fmt(f, 0)


def variables_of(f: Formula) -> frozenset[str]:
    """All variable names occurring in ``f``."""
    match f:
        case Var(name):
            return frozenset((name,))
        case Const():
            return frozenset()
        case Not(child):
            return variables_of(child)
        case And(l, r) | Or(l, r) | Implies(l, r):
            return variables_of(l) | variables_of(r)
    raise TypeError(f"not a formula: {f!r}")


def map_vars(f: Formula, fn: Callable[[str], str]) -> Formula:
    """Rename every variable through ``fn``, preserving the tree shape."""
    match f:
        case Var(name):
            return Var(fn(name))
        case Const():
            return f
        case Not(child):
            return Not(map_vars(child, fn))
        case And(l, r):
            return And(map_vars(l, fn), map_vars(r, fn))
        case Or(l, r):
            return Or(map_vars(l, fn), map_vars(r, fn))
        case Implies(l, r):
            return Implies(map_vars(l, fn), map_vars(r, fn))
    raise TypeError(f"not a formula: {f!r}")


def eval_formula(f: Formula, assignment: Mapping[str, bool]) -> bool:
    """Evaluate ``f`` under a total assignment of its variables."""
    match f:
        case Var(name):
            return assignment[name]
        case Const(value):
            return value
        case Not(child):
            return not eval_formula(child, assignment)
        case And(l, r):
            return eval_formula(l, assignment) and eval_formula(r, assignment)
        case Or(l, r):
            return eval_formula(l, assignment) or eval_formula(r, assignment)
        case Implies(l, r):
            return (not eval_formula(l, assignment)) or eval_formula(r, assignment)
    raise TypeError(f"not a formula: {f!r}")


_TOKEN_RE = re.compile(r"(?P<ws>\s+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>->|[!~&|()])")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormulaParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    """Recursive-descent parser for the grammar in the module docstring."""

    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def parse(self) -> Formula:
        kind, _, pos = self.peek()
        if kind == "end":
            raise FormulaParseError("empty formula", pos)
        f = self.implication()
        kind, value, pos = self.peek()
        if kind != "end":
            raise FormulaParseError(f"unexpected {value!r}", pos)
        return f

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.peek()[1] == "->":
            self.take()
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.peek()[1] == "|":
            self.take()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.negation()
        while self.peek()[1] == "&":
            self.take()
            f = And(f, self.negation())
        return f

    def negation(self) -> Formula:
        if self.peek()[1] in ("!", "~"):
            self.take()
            return Not(self.negation())
        return self.atom()

    def atom(self) -> Formula:
        kind, value, pos = self.take()
        if kind == "ident":
            if value == "true":
                return TRUE
            if value == "false":
                return FALSE
            return Var(value)
        if value == "(":
            f = self.implication()
            kind, value, pos = self.take()
            if value != ")":
                raise FormulaParseError("expected ')'", pos)
            return f
        raise FormulaParseError(f"expected a formula, found {value!r}" if value else "unexpected end of input", pos)


def parse_formula(text: str) -> Formula:
    """Parse a single formula; raises FormulaParseError with the offset on bad input."""
    return _Parser(text).parse()


class KnowledgeBase:
    """An indexed set of formulas.

    Indices run 1..len(kb), are assigned in input order after dropping
    structural duplicates, and are never reused.  Instances are immutable
    and safe to share across workers.
    """

    __slots__ = ("formulas", "source_text", "_clause_db", "_oracle", "__weakref__")

    def __init__(self, formulas: Iterable[Formula], source_text: str | None = None):
        seen: dict[Formula, None] = {}
        for f in formulas:
            if f not in seen:
                seen[f] = None
        object.__setattr__(self, "formulas", tuple(seen))
        object.__setattr__(self, "source_text", source_text)
        object.__setattr__(self, "_clause_db", None)
        object.__setattr__(self, "_oracle", None)

    def __setattr__(self, name, value):
        if name in ("formulas", "source_text"):
            raise AttributeError("KnowledgeBase is immutable")
        object.__setattr__(self, name, value)

    def __len__(self) -> int:
        return len(self.formulas)

    def __iter__(self):
        return iter(self.formulas)

    def __eq__(self, other) -> bool:
        return isinstance(other, KnowledgeBase) and self.formulas == other.formulas

    def __hash__(self) -> int:
        return hash(self.formulas)

    def __repr__(self) -> str:
        return f"KnowledgeBase({len(self)} formulas)"

    def formula(self, index: int) -> Formula:
        """The formula at a 1-based index."""
        if not 1 <= index <= len(self.formulas):
            raise IndexError(f"KB index {index} out of range 1..{len(self.formulas)}")
        return self.formulas[index - 1]

    def all_indices(self) -> IndexSet:
        return frozenset(range(1, len(self.formulas) + 1))

    def check_indices(self, indices: Iterable[int]) -> IndexSet:
        s = frozenset(indices)
        bad = [i for i in s if not 1 <= i <= len(self.formulas)]
        if bad:
            raise IndexError(f"KB indices out of range 1..{len(self.formulas)}: {sorted(bad)}")
        return s

    def variables(self) -> tuple[str, ...]:
        names: set[str] = set()
        for f in self.formulas:
            names |= variables_of(f)
        return tuple(sorted(names))

    def restrict(self, indices: Iterable[int]) -> "KnowledgeBase":
        """Sub-KB of the given indices, re-indexed 1..k in ascending original order."""
        picked = sorted(self.check_indices(indices))
        return KnowledgeBase(self.formulas[i - 1] for i in picked)

    def union(self, other: "KnowledgeBase") -> "KnowledgeBase":
        """Set union; our formulas keep their indices, new ones are appended."""
        return KnowledgeBase(self.formulas + other.formulas)


def parse_kb(text: str) -> KnowledgeBase:
    """Parse KB text: one formula per line, ``#`` comments, duplicates dropped."""
    formulas = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            formulas.append(parse_formula(line))
        except FormulaParseError as exc:
            raise KbParseError(str(exc), lineno) from exc
    return KnowledgeBase(formulas, source_text=text)


def kb_to_text(kb: KnowledgeBase) -> str:
    return "\n".join(format_formula(f) for f in kb.formulas) + "\n"


def fmt_indices(s: Iterable[int]) -> str:
    return "{" + ", ".join(str(i) for i in sorted(s)) + "}"
