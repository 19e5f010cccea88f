"""Assumption-based satisfiability: the single consistency oracle.

A small chronological DPLL with two watched literals per clause.  There is
no clause learning; instances here are desk scale (tens of variables), but
assumption support is essential: every consistency question about a formula
subset is answered by asserting the matching selector variables against one
immutable clause set.

Determinism: branching always picks the lowest unassigned variable and
tries True first, so repeated runs return identical models.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .clauses import ClauseDB, write_dimacs
from .errors import GcnfFormatError, ResourceLimitError
from .formulas import IndexSet, KnowledgeBase


@dataclass
class SatResult:
    satisfiable: bool
    model: dict[int, bool] | None = None
    conflict_subset: frozenset[int] | None = None


class DpllSolver:
    """Reusable solver over a growing clause set.

    ``solve`` restarts from scratch each call (watch lists persist), so a
    single instance can serve many assumption sets; it is stateful and must
    stay confined to one worker at a time.
    """

    def __init__(self, num_vars: int, clauses: Iterable[Sequence[int]] = ()):
        self.num_vars = num_vars
        self.clauses: list[list[int]] = []
        self.watches: dict[int, list[int]] = {}
        self.units: list[int] = []
        self.has_empty = False
        self.assign = [0] * (num_vars + 1)  # 0 unknown, 1 true, -1 false
        self.trail: list[int] = []
        self.qhead = 0
        for c in clauses:
            self.add_clause(c)

    def add_clause(self, lits: Sequence[int]) -> None:
        seen: dict[int, None] = {}
        for lit in lits:
            if not lit or abs(lit) > self.num_vars:
                raise ValueError(f"bad literal {lit} (num_vars={self.num_vars})")
            if -lit in seen:
                return  # tautology, satisfied everywhere
            seen[lit] = None
        clause = list(seen)
        if not clause:
            self.has_empty = True
        elif len(clause) == 1:
            self.units.append(clause[0])
        else:
            ci = len(self.clauses)
            self.clauses.append(clause)
            self.watches.setdefault(clause[0], []).append(ci)
            self.watches.setdefault(clause[1], []).append(ci)

    def _value(self, lit: int) -> int:
        v = self.assign[lit if lit > 0 else -lit]
        return v if lit > 0 else -v

    def _push(self, lit: int) -> None:
        self.assign[abs(lit)] = 1 if lit > 0 else -1
        self.trail.append(lit)

    def _propagate(self) -> bool:
        """Unit propagation; returns False on conflict."""
        clauses, watches, assign = self.clauses, self.watches, self.assign
        while self.qhead < len(self.trail):
            lit = self.trail[self.qhead]
            self.qhead += 1
            neg = -lit
            ws = watches.get(neg)
            if not ws:
                continue
            i = 0
            while i < len(ws):
                ci = ws[i]
                c = clauses[ci]
                if c[0] == neg:
                    c[0], c[1] = c[1], c[0]
                first = c[0]
                fv = assign[first if first > 0 else -first]
                if (fv if first > 0 else -fv) == 1:
                    i += 1
                    continue
                for j in range(2, len(c)):
                    other = c[j]
                    ov = assign[other if other > 0 else -other]
                    if (ov if other > 0 else -ov) != -1:
                        c[1], c[j] = c[j], c[1]
                        watches.setdefault(other, []).append(ci)
                        ws[i] = ws[-1]
                        ws.pop()
                        break
                else:
                    if (fv if first > 0 else -fv) == -1:
                        return False
                    self._push(first)
                    i += 1
        return True

    def _backtrack_to(self, mark: int) -> None:
        while len(self.trail) > mark:
            self.assign[abs(self.trail.pop())] = 0
        self.qhead = mark

    def solve(self, assumptions: Sequence[int] = ()) -> tuple[bool, dict[int, bool] | None]:
        """Decide satisfiability under the given assumption literals."""
        self._backtrack_to(0)
        if self.has_empty:
            return False, None
        for u in self.units:
            v = self._value(u)
            if v == -1:
                return False, None
            if v == 0:
                self._push(u)
        if not self._propagate():
            return False, None
        for a in assumptions:
            v = self._value(a)
            if v == -1:
                return False, None
            if v == 0:
                self._push(a)
                if not self._propagate():
                    return False, None

        decisions: list[tuple[int, bool, int]] = []  # (var, flipped, trail mark)
        var = 1
        while True:
            while var <= self.num_vars and self.assign[var] != 0:
                var += 1
            if var > self.num_vars:
                model = {v: self.assign[v] == 1 for v in range(1, self.num_vars + 1)}
                return True, model
            decisions.append((var, False, len(self.trail)))
            self._push(var)
            while not self._propagate():
                while decisions and decisions[-1][1]:
                    v0, _, mark = decisions.pop()
                    self._backtrack_to(mark)
                if not decisions:
                    return False, None
                v0, _, mark = decisions[-1]
                self._backtrack_to(mark)
                decisions[-1] = (v0, True, mark)
                self._push(-v0)
            var = 1  # rescan: propagation may assign variables below the decision


def solver_for(db: ClauseDB) -> DpllSolver:
    """Fresh solver over db's clauses with selectors guarding each group."""
    s = DpllSolver(db.num_vars + db.num_groups)
    for clause, group in zip(db.clauses, db.groups):
        if group == 0:
            s.add_clause(clause)
        else:
            s.add_clause(clause + (-db.selector(group),))
    return s


def _selector_assumptions(db: ClauseDB, asserted: IndexSet) -> list[int]:
    # Unasserted selectors are pinned False so their groups stay vacuous and
    # the search never wanders into deactivated formulas.
    return [db.selector(g) if g in asserted else -db.selector(g) for g in range(1, db.num_groups + 1)]


def is_satisfiable(db: ClauseDB, assumptions: Iterable[int], solver: DpllSolver | None = None) -> SatResult:
    """Decide satisfiability with the groups in ``assumptions`` asserted.

    On Unsat the reported conflict subset is the full assumption set: a
    valid (not necessarily minimal) starting point for shrinking.
    """
    asserted = frozenset(assumptions)
    for g in asserted:
        if not 1 <= g <= db.num_groups:
            raise IndexError(f"selector index {g} out of range 1..{db.num_groups}")
    if solver is None:
        solver = solver_for(db)
    sat, model = solver.solve(_selector_assumptions(db, asserted))
    if not sat:
        return SatResult(False, conflict_subset=asserted)
    return SatResult(True, model={v: model[v] for v in range(1, db.num_vars + 1)})


class ConsistencyOracle:
    """Per-KB consistency oracle: one clause set, one reusable solver.

    Counts every query so enumeration layers can enforce call budgets.
    """

    def __init__(self, kb: KnowledgeBase):
        from .clauses import to_clause_db  # local import: same package layer

        self.kb = kb
        self.db = to_clause_db(kb)
        self.solver = solver_for(self.db)
        self.calls = 0

    @classmethod
    def for_kb(cls, kb: KnowledgeBase) -> "ConsistencyOracle":
        oracle = kb._oracle
        if oracle is None:
            oracle = cls(kb)
            kb._oracle = oracle
        return oracle

    def query(self, indices: Iterable[int]) -> SatResult:
        self.calls += 1
        return is_satisfiable(self.db, self.kb.check_indices(indices), solver=self.solver)

    def is_consistent(self, indices: Iterable[int]) -> bool:
        return self.query(indices).satisfiable


class OracleBudget:
    """Cap on oracle calls for one enumeration run."""

    def __init__(self, oracle: ConsistencyOracle, max_calls: int | None):
        self.oracle = oracle
        self.start = oracle.calls
        self.max_calls = max_calls

    def charge(self) -> None:
        if self.max_calls is not None and self.oracle.calls - self.start >= self.max_calls:
            raise ResourceLimitError(f"oracle call budget of {self.max_calls} exceeded")


def is_subset_consistent(kb: KnowledgeBase, indices: Iterable[int]) -> bool:
    """True iff the conjunction of the indexed formulas is satisfiable."""
    return ConsistencyOracle.for_kb(kb).is_consistent(indices)


def export_query_dimacs(db: ClauseDB, assumptions: Iterable[int]) -> str:
    """Current query as plain DIMACS for an external solver."""
    return write_dimacs(db, selected_groups=assumptions)


def parse_solver_output(text: str) -> SatResult:
    """Parse ``s SATISFIABLE|s UNSATISFIABLE`` plus ``v <lit>... 0`` lines."""
    status: bool | None = None
    model: dict[int, bool] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("s "):
            word = line[2:].strip()
            if word == "SATISFIABLE":
                status = True
            elif word == "UNSATISFIABLE":
                status = False
            else:
                raise GcnfFormatError(f"unknown status line {line!r}")
        elif line.startswith("v "):
            for tok in line[2:].split():
                lit = int(tok)
                if lit != 0:
                    model[abs(lit)] = lit > 0
    if status is None:
        raise GcnfFormatError("missing 's' status line")
    return SatResult(status, model=model if status else None)
