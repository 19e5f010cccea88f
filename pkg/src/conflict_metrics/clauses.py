"""Group-tagged CNF for knowledge bases.

Each KB formula is translated on its own by the standard definitional
(Tseitin) transformation: one fresh auxiliary variable per internal
connective, negation folded into literals, plus a unit clause forcing the
formula's root literal.  All clauses produced for formula i carry group tag
i; the conjunction of group i's clauses is equisatisfiable with formula i.
Group 0 is reserved for hard clauses that are active in every query -- the
translator never emits any, but the GCNF reader accepts them (external
tools commonly use group 0 for definitional clauses).

The SAT layer activates group i by asserting a selector variable, so
consistency of any formula subset is a single assumption-based query
against one immutable clause set.  Selector variables are not stored here;
by convention the selector of group g is ``num_vars + g``.

Text formats:

* GCNF: header ``p gcnf <vars> <clauses> <groups>``; clause lines
  ``{g} <lit> ... 0`` with g in 0..groups.
* DIMACS CNF: the usual ``p cnf`` format; groups are flattened (all clauses
  of the chosen groups, selectors dropped) for plain SAT interop.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .errors import GcnfFormatError
from .formulas import (
    FALSE,
    TRUE,
    And,
    Const,
    Formula,
    Implies,
    KnowledgeBase,
    Not,
    Or,
    Var,
)

Clause = tuple[int, ...]


@dataclass(frozen=True)
class ClauseDB:
    """Immutable group-tagged clause set.

    ``clauses[k]`` belongs to group ``groups[k]``; group 0 is hard,
    groups 1..num_groups correspond to KB formulas.  Variables are
    1..num_vars; selectors live above them.
    """

    num_vars: int
    num_groups: int
    clauses: tuple[Clause, ...]
    groups: tuple[int, ...]
    var_names: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if len(self.clauses) != len(self.groups):
            raise ValueError("clauses and groups must have equal length")

    def selector(self, group: int) -> int:
        """Selector variable asserting group ``group`` (1-based)."""
        if not 1 <= group <= self.num_groups:
            raise IndexError(f"group {group} out of range 1..{self.num_groups}")
        return self.num_vars + group

    def group_clauses(self, group: int) -> list[Clause]:
        return [c for c, g in zip(self.clauses, self.groups) if g == group]


def _fold(f: Formula) -> Formula:
    """Constant folding; the result contains no Const unless it is one."""
    match f:
        case Var() | Const():
            return f
        case Not(child):
            c = _fold(child)
            if isinstance(c, Const):
                return FALSE if c.value else TRUE
            return Not(c)
        case And(left, right):
            l, r = _fold(left), _fold(right)
            if l == FALSE or r == FALSE:
                return FALSE
            if l == TRUE:
                return r
            if r == TRUE:
                return l
            return And(l, r)
        case Or(left, right):
            l, r = _fold(left), _fold(right)
            if l == TRUE or r == TRUE:
                return TRUE
            if l == FALSE:
                return r
            if r == FALSE:
                return l
            return Or(l, r)
        case Implies(left, right):
            l, r = _fold(left), _fold(right)
            if l == FALSE or r == TRUE:
                return TRUE
            if l == TRUE:
                return r
            if r == FALSE:
                return _fold(Not(l))
            return Implies(l, r)
    raise TypeError(f"not a formula: {f!r}")


class _Translator:
    def __init__(self, var_index: dict[str, int]):
        self.var_index = var_index
        self.next_var = len(var_index) + 1
        self.clauses: list[Clause] = []

    def fresh(self) -> int:
        v = self.next_var
        self.next_var += 1
        return v

    def literal(self, f: Formula) -> int:
        """Tseitin literal for ``f``; emits defining clauses for connectives."""
        match f:
            case Var(name):
                return self.var_index[name]
            case Not(child):
                return -self.literal(child)
            case And(left, right):
                l, r = self.literal(left), self.literal(right)
                a = self.fresh()
                self.clauses += [(-a, l), (-a, r), (-l, -r, a)]
                return a
            case Or(left, right):
                l, r = self.literal(left), self.literal(right)
                a = self.fresh()
                self.clauses += [(-a, l, r), (-l, a), (-r, a)]
                return a
            case Implies(left, right):
                return self.literal(Or(Not(left), right))
        raise TypeError(f"unexpected node in folded formula: {f!r}")


def to_clause_db(kb: KnowledgeBase) -> ClauseDB:
    """Translate a KB into a group-tagged clause set (cached on the KB).

    Asserting the selectors of exactly the groups in S yields a CNF that is
    satisfiable iff the formula subset S is consistent.  Variables 1..V are
    the KB's variables in sorted name order; auxiliaries follow in formula
    index order, so the translation is deterministic.
    """
    cached = kb._clause_db
    if cached is not None:
        return cached

    names = kb.variables()
    tr = _Translator({name: i for i, name in enumerate(names, start=1)})
    clauses: list[Clause] = []
    groups: list[int] = []

    for index, f in enumerate(kb.formulas, start=1):
        folded = _fold(f)
        if folded == TRUE:
            continue  # empty group: asserting it adds nothing
        if folded == FALSE:
            clauses.append(())
            groups.append(index)
            continue
        mark = len(tr.clauses)
        root = tr.literal(folded)
        emitted = tr.clauses[mark:] + [(root,)]
        clauses.extend(emitted)
        groups.extend([index] * len(emitted))

    db = ClauseDB(
        num_vars=tr.next_var - 1,
        num_groups=len(kb),
        clauses=tuple(clauses),
        groups=tuple(groups),
        var_names=names,
    )
    kb._clause_db = db
    return db


def write_gcnf(db: ClauseDB) -> str:
    lines = [f"p gcnf {db.num_vars} {len(db.clauses)} {db.num_groups}"]
    for clause, group in zip(db.clauses, db.groups):
        parts = [f"{{{group}}}", *map(str, clause), "0"]
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def read_gcnf(text: str) -> ClauseDB:
    """Parse GCNF text; raises GcnfFormatError on malformed input."""
    num_vars = num_clauses = num_groups = None
    clauses: list[Clause] = []
    groups: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 5 or parts[1] != "gcnf":
                raise GcnfFormatError(f"line {lineno}: malformed header {line!r}")
            try:
                num_vars, num_clauses, num_groups = (int(p) for p in parts[2:])
            except ValueError as exc:
                raise GcnfFormatError(f"line {lineno}: malformed header {line!r}") from exc
            if num_vars < 0 or num_clauses < 0 or num_groups < 0:
                raise GcnfFormatError(f"line {lineno}: negative counts in header")
            continue
        if num_vars is None:
            raise GcnfFormatError(f"line {lineno}: clause before header")
        if not line.startswith("{"):
            raise GcnfFormatError(f"line {lineno}: missing group tag")
        close = line.find("}")
        if close < 0:
            raise GcnfFormatError(f"line {lineno}: missing group tag")
        try:
            group = int(line[1:close])
        except ValueError as exc:
            raise GcnfFormatError(f"line {lineno}: bad group id {line[1:close]!r}") from exc
        if not 0 <= group <= num_groups:
            raise GcnfFormatError(f"line {lineno}: group id {group} out of range 0..{num_groups}")
        try:
            lits = [int(tok) for tok in line[close + 1 :].split()]
        except ValueError as exc:
            raise GcnfFormatError(f"line {lineno}: bad literal") from exc
        if not lits or lits[-1] != 0:
            raise GcnfFormatError(f"line {lineno}: clause not terminated by 0")
        lits = lits[:-1]
        if any(lit == 0 for lit in lits):
            raise GcnfFormatError(f"line {lineno}: literal 0 inside clause")
        if any(abs(lit) > num_vars for lit in lits):
            raise GcnfFormatError(f"line {lineno}: literal out of range 1..{num_vars}")
        clauses.append(tuple(lits))
        groups.append(group)
    if num_vars is None:
        raise GcnfFormatError("missing header")
    if len(clauses) != num_clauses:
        raise GcnfFormatError(f"header declares {num_clauses} clauses, found {len(clauses)}")
    return ClauseDB(
        num_vars=num_vars,
        num_groups=num_groups,
        clauses=tuple(clauses),
        groups=tuple(groups),
    )


def write_dimacs(db: ClauseDB, selected_groups: Iterable[int] | None = None) -> str:
    """Plain CNF of group 0 plus the selected groups (default: all groups)."""
    if selected_groups is None:
        active = set(range(0, db.num_groups + 1))
    else:
        active = {0} | set(selected_groups)
        for g in active:
            if not 0 <= g <= db.num_groups:
                raise IndexError(f"group {g} out of range 0..{db.num_groups}")
    picked = [c for c, g in zip(db.clauses, db.groups) if g in active]
    lines = [f"p cnf {db.num_vars} {len(picked)}"]
    for clause in picked:
        lines.append(" ".join(str(lit) for lit in clause + (0,)))
    return "\n".join(lines) + "\n"
