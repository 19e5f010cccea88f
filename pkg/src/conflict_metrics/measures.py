"""Inconsistency measures over a knowledge base and its MUS family.

Implemented measures:

* ``i_mi``       -- number of MUSes.
* ``i_m``        -- |MSSes| + |self-contradictory formulas| - 1.
* ``i_m_prime``  -- sum of per-component |MSSes| over the MUS-graph
  decomposition, plus |self-contradictory|, for inconsistent KBs; 0
  otherwise.  The per-component form restores additivity over
  vocabulary-independent parts, which plain ``i_m`` lacks.
* ``delta_hs``   -- size of a minimum hitting set of the MUS family (the
  smallest number of formulas whose removal restores consistency).
* ``i_d``        -- the distribution index: the largest number of groups in
  any partial decomposition of the KB into disjoint inconsistent subsets
  whose union introduces no MUS that crosses group lines.  Equivalently,
  the maximum closed packing of the MUS family; it is computed per
  MUS-graph component and summed, which is valid because the index is
  additive across formula-disjoint components.

``distributable_decomposition`` materializes an optimal partition whose
groups are inclusion-maximal unions of MUSes: each group can be handed to
a separate reviewer, repaired independently, and the repaired groups merge
consistently (``repair_merge_check`` verifies this and also reports whether
merging the untouched residue back in can reintroduce a conflict -- it
can).

``check_postulates`` probes a measure against the standard postulates
(consistency, monotony, free-formula independence, unit score on a single
MUS, additivity over independent parts) on a family of KBs and reports
counterexamples instead of raising, so known-failing measures can be
documented by test.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .errors import ResourceLimitError
from .formulas import IndexSet, KnowledgeBase, Var, fmt_indices, kb_to_text, map_vars
from .mus import MusSet, MssSet, enumerate_msses, enumerate_muses, shrink_to_mus
from .musgraph import Decomposition, mus_decomposition
from .packing import PackingSolution, SetFamily, mcsp_branch_bound, mcsp_bruteforce
from .sat import ConsistencyOracle

MEASURE_IDS = ("i_mi", "i_m", "i_m_prime", "delta_hs", "i_d")

BACKENDS = ("bruteforce", "branch_bound")


def i_mi(muses: MusSet) -> int:
    """Number of MUSes."""
    return len(muses)


def self_contradictory(kb: KnowledgeBase) -> IndexSet:
    """Indices whose formula is inconsistent on its own."""
    oracle = ConsistencyOracle.for_kb(kb)
    return frozenset(i for i in kb.all_indices() if not oracle.is_consistent({i}))


def i_m(kb: KnowledgeBase, msses: MssSet | None = None) -> int:
    """|MSSes| + |selfC| - 1; the -1 normalizes consistent KBs to 0.

    When every formula is self-contradictory the only MSS is the empty set,
    which counts as one, keeping the measure total.
    """
    if msses is None:
        msses = enumerate_msses(kb)
    return len(msses) + len(self_contradictory(kb)) - 1


def i_m_prime(kb: KnowledgeBase, dec: Decomposition) -> int:
    """Per-component |MSSes| summed, plus |selfC|; 0 for a consistent KB."""
    if not dec.components:
        return 0
    total = sum(len(enumerate_msses(kb, within=comp.formulas)) for comp in dec.components)
    return total + len(self_contradictory(kb))


def minimum_hitting_set(sets: Sequence[IndexSet]) -> IndexSet:
    """A minimum-cardinality hitting set of the given nonempty sets.

    Branch and bound: branch on the elements of the first un-hit set in
    ascending order; prune with a greedy upper bound and a disjoint-sets
    lower bound.  Deterministic.
    """
    family = [frozenset(s) for s in sets]
    if any(not s for s in family):
        raise ValueError("an empty set cannot be hit")
    if not family:
        return frozenset()

    universe = sorted(set().union(*family))
    greedy: set[int] = set()
    unhit = list(family)
    while unhit:
        counts = {e: sum(1 for s in unhit if e in s) for e in universe}
        pick = max(sorted(counts), key=lambda e: counts[e])
        greedy.add(pick)
        unhit = [s for s in unhit if pick not in s]
    best = frozenset(greedy)

    def disjoint_bound(remaining: list[IndexSet]) -> int:
        taken: set[int] = set()
        count = 0
        for s in remaining:
            if not (s & taken):
                count += 1
                taken |= s
        return count

    def search(current: set[int], remaining: list[IndexSet]) -> None:
        nonlocal best
        if not remaining:
            if len(current) < len(best):
                best = frozenset(current)
            return
        if len(current) + disjoint_bound(remaining) >= len(best):
            return
        for e in sorted(remaining[0]):
            search(current | {e}, [s for s in remaining if e not in s])

    search(set(), family)
    return best


def delta_hs(muses: MusSet) -> int:
    """Minimum hitting set size of the MUS family; 0 when there are no MUSes."""
    if len(muses) == 0:
        return 0
    return len(minimum_hitting_set(muses.sets))


def all_minimum_hitting_sets(sets: Sequence[IndexSet], max_results: int = 4096) -> tuple[IndexSet, ...]:
    """Every minimum-cardinality hitting set, canonically ordered."""
    family = [frozenset(s) for s in sets]
    if not family:
        return (frozenset(),)
    k = len(minimum_hitting_set(family))
    found: set[IndexSet] = set()

    def search(current: set[int], remaining: list[IndexSet]) -> None:
        if not remaining:
            found.add(frozenset(current))
            if len(found) > max_results:
                raise ResourceLimitError(f"more than {max_results} minimum hitting sets")
            return
        if len(current) == k:
            return
        for e in sorted(remaining[0]):
            search(current | {e}, [s for s in remaining if e not in s])

    search(set(), family)
    return tuple(sorted(found, key=lambda s: sorted(s)))


def _component_family(muses: MusSet, mus_ids: Iterable[int], formulas: IndexSet) -> tuple[SetFamily, list[int]]:
    """Remap one component's MUSes to a SetFamily over 1..|formulas|.

    Returns the family plus the MUS id of each family set (sets keep the
    ascending-id order, and distinct MUSes stay distinct under remapping).
    """
    position = {f: e for e, f in enumerate(sorted(formulas), start=1)}
    ids = sorted(mus_ids)
    sets = tuple(tuple(sorted(position[f] for f in muses.get(mid))) for mid in ids)
    return SetFamily(universe_size=len(position), sets=sets), ids


def _solve_component(family: SetFamily, backend: str, time_budget_s: float | None) -> PackingSolution:
    if backend == "bruteforce":
        return mcsp_bruteforce(family)
    if backend in ("branch_bound", "bnb"):
        solution = mcsp_branch_bound(family, time_budget_s=time_budget_s)
        if not solution.optimal:
            raise ResourceLimitError("branch and bound timed out before certifying optimality")
        return solution
    raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")


def i_d(
    kb: KnowledgeBase,
    muses: MusSet,
    backend: str = "branch_bound",
    time_budget_s: float | None = None,
) -> int:
    """The distribution index: summed per-component maximum closed packings.

    With a partial MUS family this is the same computation on the known
    subset (lower-bound pipeline); exactness is only claimed when
    ``muses.complete`` holds.
    """
    if len(muses) == 0:
        return 0
    dec = mus_decomposition(kb, muses)
    total = 0
    for comp in dec.components:
        family, _ = _component_family(muses, comp.mus_ids, comp.formulas)
        total += _solve_component(family, backend, time_budget_s).cardinality
    return total


def decomposition_index(dec: Decomposition, kind: str = "components") -> int:
    """Two degenerate per-component indices: the component count (not
    monotone under formula addition) and the MUS count (ignores structure)."""
    if kind == "components":
        return len(dec.components)
    if kind == "mus_count":
        return sum(len(c.mus_ids) for c in dec.components)
    raise ValueError(f"unknown kind {kind!r}")


# ---------------------------------------------------------------------------
# Distributable decomposition


@dataclass(frozen=True)
class PartialMusDecomposition:
    """Disjoint inconsistent groups, each a union of whole MUSes, whose
    joint union contains no MUS that crosses group lines."""

    groups: tuple[IndexSet, ...]
    mus_ids_per_group: tuple[frozenset[int], ...]
    muses: MusSet

    @property
    def cardinality(self) -> int:
        return len(self.groups)

    def group_mus_sets(self, index: int) -> tuple[IndexSet, ...]:
        return tuple(self.muses.get(mid) for mid in sorted(self.mus_ids_per_group[index]))


def validate_partial_decomposition(kb: KnowledgeBase, pmd: PartialMusDecomposition) -> None:
    """Raise ValueError unless the three defining conditions hold.

    Requires a complete MUS family so condition (2) can be decided by
    containment instead of fresh enumeration.
    """
    if not pmd.muses.complete:
        raise ValueError("validation needs the complete MUS family")
    oracle = ConsistencyOracle.for_kb(kb)
    union_all: frozenset[int] = frozenset()
    for g, (group, ids) in enumerate(zip(pmd.groups, pmd.mus_ids_per_group)):
        if oracle.is_consistent(group):
            raise ValueError(f"group {g + 1} {fmt_indices(group)} is consistent")
        if union_all & group:
            raise ValueError(f"group {g + 1} overlaps an earlier group")
        union_all |= group
        from_ids: frozenset[int] = frozenset()
        for mid in ids:
            from_ids |= pmd.muses.get(mid)
        if from_ids != group:
            raise ValueError(f"group {g + 1} is not the union of its MUSes")
    for mid in pmd.muses.ids():
        mus = pmd.muses.get(mid)
        if mus <= union_all and not any(mus <= group for group in pmd.groups):
            raise ValueError(f"MUS {fmt_indices(mus)} crosses group boundaries")


def distributable_decomposition(kb: KnowledgeBase, muses: MusSet) -> PartialMusDecomposition:
    """An optimal partial decomposition with inclusion-maximal groups.

    Per MUS-graph component: compute one maximum closed packing of the
    component's MUSes (each packed MUS seeds a group), then try to absorb
    the remaining MUSes of the component into the groups in ascending id
    order, keeping an absorption only if the groups stay pairwise disjoint
    and no MUS inside the combined union crosses group lines.  Group
    maximality is verified before returning.  The group count equals the
    distribution index.
    """
    if not muses.complete:
        raise ValueError("distributable decomposition needs the complete MUS family")
    dec = mus_decomposition(kb, muses)
    groups: list[set[int]] = []
    group_ids: list[set[int]] = []
    comp_of_group: list[int] = []

    for comp_no, comp in enumerate(dec.components):
        family, ids = _component_family(muses, comp.mus_ids, comp.formulas)
        packing = mcsp_bruteforce(family) if family.m <= 20 else mcsp_branch_bound(family)
        local_groups: list[set[int]] = []
        local_ids: list[set[int]] = []
        for pos in packing.selected:
            mid = ids[pos - 1]
            local_groups.append(set(muses.get(mid)))
            local_ids.append({mid})
        packed = {mid for s in local_ids for mid in s}
        component_muses = [muses.get(mid) for mid in sorted(comp.mus_ids)]

        def absorbable(target: int, mid: int) -> bool:
            mus = muses.get(mid)
            widened = local_groups[target] | mus
            for other, other_group in enumerate(local_groups):
                if other != target and widened & other_group:
                    return False
            union = widened.union(*(g for t, g in enumerate(local_groups) if t != target))
            shapes = [widened] + [g for t, g in enumerate(local_groups) if t != target]
            for m in component_muses:
                if m <= union and not any(m <= shape for shape in shapes):
                    return False
            return True

        for mid in sorted(comp.mus_ids):
            if mid in packed:
                continue
            for target in range(len(local_groups)):
                if absorbable(target, mid):
                    local_groups[target] |= muses.get(mid)
                    local_ids[target].add(mid)
                    break

        for target in range(len(local_groups)):
            for mid in sorted(comp.mus_ids - frozenset(local_ids[target])):
                assert not absorbable(target, mid), (
                    f"group {target} of component {comp_no} should have absorbed MUS {mid}"
                )
        groups.extend(local_groups)
        group_ids.extend(local_ids)
        comp_of_group.extend([comp_no] * len(local_groups))

    order = sorted(range(len(groups)), key=lambda g: min(groups[g], default=0))
    pmd = PartialMusDecomposition(
        groups=tuple(frozenset(groups[g]) for g in order),
        mus_ids_per_group=tuple(frozenset(group_ids[g]) for g in order),
        muses=muses,
    )
    if pmd.groups:
        validate_partial_decomposition(kb, pmd)
    return pmd


# ---------------------------------------------------------------------------
# Parallel-repair check


@dataclass(frozen=True)
class RepairOutcome:
    removed: tuple[IndexSet, ...]
    merged_consistent: bool
    with_residue_consistent: bool


@dataclass(frozen=True)
class RepairWitness:
    removed: tuple[IndexSet, ...]
    conflicting_core: IndexSet


@dataclass(frozen=True)
class RepairReport:
    groups: tuple[IndexSet, ...]
    residue: IndexSet
    min_hitting_sets: tuple[tuple[IndexSet, ...], ...]
    outcomes: tuple[RepairOutcome, ...]
    merged_always_consistent: bool
    residue_always_consistent: bool
    residue_witness: RepairWitness | None
    truncated: bool


def repair_merge_check(kb: KnowledgeBase, pmd: PartialMusDecomposition, max_combinations: int = 4096) -> RepairReport:
    """Repair each group by deleting a minimum hitting set of its MUSes and
    check the merge guarantees.

    The union of repaired groups must be consistent for every choice of
    minimum hitting sets; re-adding the untouched residue may still clash,
    so each combination is probed and the first clashing one is reported
    with a conflicting core.
    """
    oracle = ConsistencyOracle.for_kb(kb)
    residue = kb.all_indices() - frozenset().union(*pmd.groups) if pmd.groups else kb.all_indices()
    per_group = tuple(
        all_minimum_hitting_sets([pmd.muses.get(mid) for mid in sorted(ids)])
        for ids in pmd.mus_ids_per_group
    )

    outcomes: list[RepairOutcome] = []
    witness: RepairWitness | None = None
    merged_ok = True
    residue_ok = True
    truncated = False
    for combo in itertools.product(*per_group):
        if len(outcomes) >= max_combinations:
            truncated = True
            break
        repaired_union: set[int] = set()
        for group, removed in zip(pmd.groups, combo):
            repaired_union |= group - removed
        merged = oracle.is_consistent(repaired_union)
        with_residue = oracle.is_consistent(repaired_union | residue)
        outcomes.append(RepairOutcome(tuple(combo), merged, with_residue))
        merged_ok &= merged
        if not with_residue and witness is None:
            core = shrink_to_mus(kb, frozenset(repaired_union | residue))
            witness = RepairWitness(tuple(combo), core)
        residue_ok &= with_residue

    return RepairReport(
        groups=pmd.groups,
        residue=residue,
        min_hitting_sets=per_group,
        outcomes=tuple(outcomes),
        merged_always_consistent=merged_ok,
        residue_always_consistent=residue_ok,
        residue_witness=witness,
        truncated=truncated,
    )


# ---------------------------------------------------------------------------
# Postulate harness


@dataclass
class PostulateCheck:
    postulate: str
    checked: int = 0
    counterexamples: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples


@dataclass
class PostulateReport:
    measure: str
    checks: tuple[PostulateCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def to_json_dict(self) -> dict:
        return {
            "measure": self.measure,
            "ok": self.ok,
            "postulates": {
                c.postulate: {
                    "checked": c.checked,
                    "status": "no counterexample found" if c.ok else "counterexample",
                    "counterexamples": c.counterexamples,
                }
                for c in self.checks
            },
        }


POSTULATES = (
    "consistency",
    "monotony",
    "free_formula_independence",
    "min_inc",
    "independent_decomposability",
)


class _MeasureSession:
    """Caches enumerations and values across the KBs of one postulate run."""

    def __init__(self, measure_id: str, backend: str = "branch_bound"):
        if measure_id not in MEASURE_IDS:
            raise ValueError(f"unknown measure {measure_id!r}; expected one of {MEASURE_IDS}")
        self.measure_id = measure_id
        self.backend = backend
        self.pinned: list[KnowledgeBase] = []
        self._muses: dict[int, MusSet] = {}
        self._values: dict[int, int] = {}

    def pin(self, kb: KnowledgeBase) -> KnowledgeBase:
        self.pinned.append(kb)
        return kb

    def muses(self, kb: KnowledgeBase) -> MusSet:
        key = id(kb)
        if key not in self._muses:
            self._muses[key] = enumerate_muses(kb)
        return self._muses[key]

    def value(self, kb: KnowledgeBase) -> int:
        key = id(kb)
        if key not in self._values:
            self._values[key] = self._compute(kb)
        return self._values[key]

    def _compute(self, kb: KnowledgeBase) -> int:
        mid = self.measure_id
        if mid == "i_m":
            return i_m(kb)
        muses = self.muses(kb)
        if mid == "i_mi":
            return i_mi(muses)
        if mid == "delta_hs":
            return delta_hs(muses)
        if mid == "i_m_prime":
            return i_m_prime(kb, mus_decomposition(kb, muses))
        return i_d(kb, muses, backend=self.backend)


def _fresh_var_name(kb: KnowledgeBase) -> str:
    used = set(kb.variables())
    name = "fz"
    while name in used:
        name += "z"
    return name


def check_postulates(
    measure_id: str,
    kb_family: Sequence[KnowledgeBase],
    backend: str = "branch_bound",
    max_counterexamples: int = 5,
) -> PostulateReport:
    """Probe one measure against the five postulates over a KB family.

    Monotony pairs each KB with its union with the next one; additivity
    pairs each KB with a variable-renamed copy of the next one so the two
    parts share no vocabulary (the partition precondition is verified, not
    assumed).  Counterexamples carry the offending KB texts and values.
    """
    session = _MeasureSession(measure_id, backend)
    for kb in kb_family:
        session.pin(kb)
    checks = {p: PostulateCheck(p) for p in POSTULATES}

    def note(postulate: str, witness: dict) -> None:
        box = checks[postulate]
        if len(box.counterexamples) < max_counterexamples:
            box.counterexamples.append(witness)

    family = list(kb_family)
    for pos, kb in enumerate(family):
        value = session.value(kb)

        check = checks["consistency"]
        check.checked += 1
        consistent = ConsistencyOracle.for_kb(kb).is_consistent(kb.all_indices())
        if (value == 0) != consistent:
            note("consistency", {"kb": kb_to_text(kb), "value": value, "consistent": consistent})

        check = checks["monotony"]
        check.checked += 1
        bigger = session.pin(kb.union(family[(pos + 1) % len(family)]))
        if value > session.value(bigger):
            note(
                "monotony",
                {"kb": kb_to_text(kb), "value": value, "superset": kb_to_text(bigger), "superset_value": session.value(bigger)},
            )

        check = checks["free_formula_independence"]
        check.checked += 1
        extended = session.pin(kb.union(KnowledgeBase([Var(_fresh_var_name(kb))])))
        if session.value(extended) != value:
            note(
                "free_formula_independence",
                {"kb": kb_to_text(kb), "value": value, "extended_value": session.value(extended)},
            )

        check = checks["min_inc"]
        for mus in session.muses(kb):
            check.checked += 1
            single = session.pin(kb.restrict(mus))
            if session.value(single) != 1:
                note("min_inc", {"mus": fmt_indices(mus), "kb": kb_to_text(kb), "value": session.value(single)})

        check = checks["independent_decomposability"]
        check.checked += 1
        partner = family[(pos + 1) % len(family)]
        renamed = session.pin(KnowledgeBase([map_vars(f, lambda v: v + "_r") for f in partner]))
        union = session.pin(kb.union(renamed))
        if len(union) != len(kb) + len(renamed):
            continue  # structural collision; the partition precondition cannot hold
        shift = len(kb)
        left = set(session.muses(kb).sets)
        right = {frozenset(i + shift for i in mus) for mus in session.muses(renamed)}
        if set(session.muses(union).sets) != left | right or left & right:
            continue  # precondition violated; postulate does not apply
        total = session.value(union)
        parts = session.value(kb) + session.value(renamed)
        if total != parts:
            note(
                "independent_decomposability",
                {"kb": kb_to_text(kb), "partner": kb_to_text(renamed), "union_value": total, "sum_of_parts": parts},
            )

    return PostulateReport(measure=measure_id, checks=tuple(checks[p] for p in POSTULATES))


# ---------------------------------------------------------------------------
# Aggregate report


@dataclass
class MeasureReport:
    i_mi: int | None = None
    i_m: int | None = None
    i_m_prime: int | None = None
    delta_hs: int | None = None
    i_d: int | None = None
    mode: str = "exact"
    components: tuple[int, ...] = ()
    time_ms: float | None = None

    def to_json_dict(self) -> dict:
        out: dict = {}
        for key in MEASURE_IDS:
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        out["mode"] = self.mode
        out["components"] = list(self.components)
        if self.time_ms is not None:
            out["time_ms"] = self.time_ms
        return out


def compute_report(
    kb: KnowledgeBase,
    measures: Iterable[str] = MEASURE_IDS,
    backend: str = "branch_bound",
    muses: MusSet | None = None,
    with_timing: bool = True,
    max_oracle_calls: int | None = None,
    time_budget_s: float | None = None,
) -> MeasureReport:
    """Compute the selected measures in one pass.

    Supplying an incomplete MUS family switches the report to lower-bound
    mode: every MUS-derived number is computed on the given subfamily.
    """
    wanted = tuple(measures)
    for m in wanted:
        if m not in MEASURE_IDS:
            raise ValueError(f"unknown measure {m!r}; expected one of {MEASURE_IDS}")
    start = time.perf_counter()
    if muses is None:
        muses = enumerate_muses(kb, max_oracle_calls=max_oracle_calls)
    dec = mus_decomposition(kb, muses)
    report = MeasureReport(
        mode="exact" if muses.complete else "lower_bound",
        components=tuple(len(c.formulas) for c in dec.components),
    )
    if "i_mi" in wanted:
        report.i_mi = i_mi(muses)
    if "i_m" in wanted:
        report.i_m = i_m(kb)
    if "i_m_prime" in wanted:
        report.i_m_prime = i_m_prime(kb, dec)
    if "delta_hs" in wanted:
        report.delta_hs = delta_hs(muses)
    if "i_d" in wanted:
        report.i_d = i_d(kb, muses, backend=backend, time_budget_s=time_budget_s)
    if report.mode == "exact" and report.i_d is not None and report.delta_hs is not None:
        assert report.i_d <= report.delta_hs, "distribution index exceeded the hitting-set bound"
    if with_timing:
        report.time_ms = (time.perf_counter() - start) * 1000.0
    return report
