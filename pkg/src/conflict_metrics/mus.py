"""MUS and MSS enumeration, formula classification, and MUS-list interop.

Complete enumeration follows the two-solver scheme popularized by MARCO
(Liffiton et al.): a *map* solver over one boolean per formula proposes a
maximal unexplored subset; if the subset is consistent it is grown to a
maximal satisfiable subset (MSS) and the map blocks everything below it,
otherwise it is shrunk to a minimal unsatisfiable subset (MUS) and the map
blocks everything above it.  When the map runs dry, both families are
complete.  Grown/shrunk candidates walk indices in ascending order, so the
output is deterministic.

Families are kept in canonical order: by size, then lexicographically on
the sorted indices.  MUS ids used elsewhere (graphs, packings) are 1-based
positions in that order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import MusImportError
from .formulas import IndexSet, KnowledgeBase, fmt_indices
from .sat import ConsistencyOracle, DpllSolver, OracleBudget


def canonical_order(sets: Iterable[IndexSet]) -> tuple[IndexSet, ...]:
    return tuple(sorted(set(sets), key=lambda s: (len(s), sorted(s))))


@dataclass(frozen=True, eq=False)
class MusSet:
    """The MUSes of a KB in canonical order.

    ``complete`` records whether this is known to be the full family;
    imported lists are treated as partial (lower-bound pipelines).
    Equality and hashing ignore the flag.
    """

    sets: tuple[IndexSet, ...]
    complete: bool = field(default=True)

    @classmethod
    def of(cls, sets: Iterable[IndexSet], complete: bool = True) -> "MusSet":
        return cls(canonical_order(sets), complete)

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self) -> Iterator[IndexSet]:
        return iter(self.sets)

    def __eq__(self, other) -> bool:
        return isinstance(other, MusSet) and self.sets == other.sets

    def __hash__(self) -> int:
        return hash(self.sets)

    def get(self, mus_id: int) -> IndexSet:
        """MUS by 1-based canonical id."""
        if not 1 <= mus_id <= len(self.sets):
            raise IndexError(f"MUS id {mus_id} out of range 1..{len(self.sets)}")
        return self.sets[mus_id - 1]

    def ids(self) -> range:
        return range(1, len(self.sets) + 1)

    def union_all(self) -> IndexSet:
        out: frozenset[int] = frozenset()
        for s in self.sets:
            out |= s
        return out


@dataclass(frozen=True)
class MssSet:
    """The MSSes of a KB in canonical order."""

    sets: tuple[IndexSet, ...]

    @classmethod
    def of(cls, sets: Iterable[IndexSet]) -> "MssSet":
        return cls(canonical_order(sets))

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self) -> Iterator[IndexSet]:
        return iter(self.sets)


@dataclass(frozen=True)
class FormulaClassification:
    self_contradictory: IndexSet
    free: IndexSet
    unfree: IndexSet


def grow_to_mss(kb: KnowledgeBase, seed: IndexSet, within: IndexSet | None = None) -> IndexSet:
    """Extend a consistent subset to an MSS of ``within`` (default: the whole KB)."""
    oracle = ConsistencyOracle.for_kb(kb)
    universe = kb.all_indices() if within is None else kb.check_indices(within)
    current = set(kb.check_indices(seed))
    for i in sorted(universe - current):
        if oracle.is_consistent(current | {i}):
            current.add(i)
    return frozenset(current)


def shrink_to_mus(kb: KnowledgeBase, subset: IndexSet) -> IndexSet:
    """Shrink an inconsistent subset to a MUS, trying removals in ascending order."""
    oracle = ConsistencyOracle.for_kb(kb)
    current = set(kb.check_indices(subset))
    if oracle.is_consistent(current):
        raise ValueError(f"subset {fmt_indices(current)} is consistent; nothing to shrink")
    for i in sorted(current):
        if not oracle.is_consistent(current - {i}):
            current.remove(i)
    return frozenset(current)


def _maximal_map_model(map_solver: DpllSolver, n: int) -> set[int] | None:
    """A map model whose true-set is inclusion-maximal among map models."""
    sat, model = map_solver.solve()
    if not sat:
        return None
    true_set = {v for v in range(1, n + 1) if model[v]}
    for v in range(1, n + 1):
        if v in true_set:
            continue
        sat, model = map_solver.solve(sorted(true_set) + [v])
        if sat:
            true_set = {w for w in range(1, n + 1) if model[w]}
    return true_set


def _enumerate(
    kb: KnowledgeBase,
    within: IndexSet | None,
    max_oracle_calls: int | None,
) -> tuple[tuple[IndexSet, ...], tuple[IndexSet, ...]]:
    oracle = ConsistencyOracle.for_kb(kb)
    budget = OracleBudget(oracle, max_oracle_calls)
    universe = sorted(kb.all_indices() if within is None else kb.check_indices(within))
    pos = {idx: v for v, idx in enumerate(universe, start=1)}
    n = len(universe)

    map_solver = DpllSolver(n)
    muses: list[IndexSet] = []
    msses: list[IndexSet] = []
    while True:
        model = _maximal_map_model(map_solver, n)
        if model is None:
            break
        seed = frozenset(universe[v - 1] for v in model)
        budget.charge()
        if oracle.is_consistent(seed):
            mss = grow_to_mss(kb, seed, within=frozenset(universe))
            msses.append(mss)
            map_solver.add_clause([pos[i] for i in universe if i not in mss])
        else:
            mus = shrink_to_mus(kb, seed)
            muses.append(mus)
            map_solver.add_clause([-pos[i] for i in mus])
    return canonical_order(muses), canonical_order(msses)


def enumerate_muses(kb: KnowledgeBase, within: IndexSet | None = None, max_oracle_calls: int | None = None) -> MusSet:
    """All MUSes of the KB (or of the sub-KB ``within``).

    A consistent KB yields the empty family.  Raises ResourceLimitError if
    the oracle call budget is exhausted before enumeration completes.
    """
    muses, _ = _enumerate(kb, within, max_oracle_calls)
    return MusSet(muses, complete=True)


def enumerate_msses(kb: KnowledgeBase, within: IndexSet | None = None, max_oracle_calls: int | None = None) -> MssSet:
    """All MSSes; for a consistent KB this is the single set ``within`` itself."""
    _, msses = _enumerate(kb, within, max_oracle_calls)
    return MssSet(msses)


def enumerate_all(
    kb: KnowledgeBase, within: IndexSet | None = None, max_oracle_calls: int | None = None
) -> tuple[MusSet, MssSet]:
    """Both families from a single enumeration pass."""
    muses, msses = _enumerate(kb, within, max_oracle_calls)
    return MusSet(muses, complete=True), MssSet(msses)


def classify_formulas(kb: KnowledgeBase, muses: MusSet) -> FormulaClassification:
    """Split the KB into self-contradictory, free, and unfree formulas."""
    unfree = muses.union_all()
    self_contradictory = frozenset(i for s in muses if len(s) == 1 for i in s)
    free = kb.all_indices() - unfree
    return FormulaClassification(self_contradictory, free, unfree)


def import_mus_list(kb: KnowledgeBase, text: str) -> MusSet:
    """Parse and verify an externally produced MUS list.

    Each non-comment line is a whitespace-separated list of 1-based KB
    indices.  Every set is checked to be inconsistent and minimal; all
    failing lines are collected into a single MusImportError.  The result
    is marked incomplete: external enumerators may emit only a subset of
    the MUSes, so downstream measures run in lower-bound mode.
    """
    oracle = ConsistencyOracle.for_kb(kb)
    sets: list[IndexSet] = []
    failures: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            indices = frozenset(int(tok) for tok in line.split())
        except ValueError:
            failures.append((lineno, "not a list of integers"))
            continue
        bad = [i for i in indices if not 1 <= i <= len(kb)]
        if bad:
            failures.append((lineno, f"index out of range 1..{len(kb)}: {sorted(bad)}"))
            continue
        if oracle.is_consistent(indices):
            failures.append((lineno, f"{fmt_indices(indices)} is consistent"))
            continue
        non_minimal = [i for i in sorted(indices) if not oracle.is_consistent(indices - {i})]
        if non_minimal:
            failures.append((lineno, f"{fmt_indices(indices)} is not minimal (drop {non_minimal[0]})"))
            continue
        sets.append(indices)
    if failures:
        raise MusImportError(failures)
    return MusSet.of(sets, complete=False)


def muses_to_text(muses: MusSet | MssSet) -> str:
    """One subset per line, 1-based indices; the import format."""
    return "\n".join(" ".join(str(i) for i in sorted(s)) for s in muses) + "\n"
