"""Independent brute-force oracles for the test suite.

Everything here works from first principles -- truth tables over the
formula trees and power-set enumeration over inline bitmasks -- and never
touches the CNF translation, the SAT engine, or the packing solvers it is
used to check.
"""

from __future__ import annotations

from itertools import combinations

from conflict_metrics import KnowledgeBase, eval_formula

_mask_cache: dict[int, tuple[list[int], int]] = {}
_pinned: list[KnowledgeBase] = []


def satisfying_masks(kb: KnowledgeBase) -> tuple[list[int], int]:
    """Per-formula bitmask of satisfying assignments, plus the all-ones mask."""
    key = id(kb)
    if key in _mask_cache:
        return _mask_cache[key]
    names = kb.variables()
    nv = len(names)
    assert nv <= 16, "truth-table oracle capped at 16 variables"
    masks = []
    for f in kb.formulas:
        mask = 0
        for a in range(1 << nv):
            assignment = {names[k]: bool(a >> k & 1) for k in range(nv)}
            if eval_formula(f, assignment):
                mask |= 1 << a
        masks.append(mask)
    full = (1 << (1 << nv)) - 1
    _pinned.append(kb)
    _mask_cache[key] = (masks, full)
    return masks, full


def tt_consistent(kb: KnowledgeBase, subset) -> bool:
    """Truth-table consistency of a formula subset (1-based indices)."""
    masks, acc = satisfying_masks(kb)
    for i in subset:
        acc &= masks[i - 1]
    return acc != 0


def powerset_mus_mss(kb: KnowledgeBase) -> tuple[set[frozenset[int]], set[frozenset[int]]]:
    """All MUSes and MSSes by checking every subset against truth tables."""
    n = len(kb)
    masks, full = satisfying_masks(kb)
    consistent = [False] * (1 << n)
    consistent[0] = True
    sat_mask = [full] * (1 << n)
    for sub in range(1, 1 << n):
        low = (sub & -sub).bit_length() - 1
        sat_mask[sub] = sat_mask[sub & (sub - 1)] & masks[low]
        consistent[sub] = sat_mask[sub] != 0
    muses: set[frozenset[int]] = set()
    msses: set[frozenset[int]] = set()
    for sub in range(1 << n):
        members = [i for i in range(n) if sub >> i & 1]
        if not consistent[sub]:
            if all(consistent[sub & ~(1 << i)] for i in members):
                muses.add(frozenset(i + 1 for i in members))
        else:
            if all(not consistent[sub | (1 << i)] for i in range(n) if not sub >> i & 1):
                msses.add(frozenset(i + 1 for i in members))
    return muses, msses


def brute_min_hitting_set_size(sets) -> int:
    """Smallest k such that some k-subset of the universe hits every set."""
    family = [frozenset(s) for s in sets]
    if not family:
        return 0
    universe = sorted(set().union(*family))
    for k in range(len(universe) + 1):
        for cand in combinations(universe, k):
            chosen = set(cand)
            if all(chosen & s for s in family):
                return k
    raise AssertionError("unreachable: the whole universe is a hitting set")


def brute_all_minimal_hitting_sets(sets) -> set[frozenset[int]]:
    family = [frozenset(s) for s in sets]
    if not family:
        return {frozenset()}
    universe = sorted(set().union(*family))
    hitting: list[frozenset[int]] = []
    for k in range(len(universe) + 1):
        for cand in combinations(universe, k):
            chosen = frozenset(cand)
            if all(chosen & s for s in family):
                hitting.append(chosen)
    return {h for h in hitting if not any(other < h for other in hitting)}


def brute_max_closed_packing(sets) -> int:
    """Maximum closed packing cardinality by direct definition checking."""
    family = [frozenset(s) for s in sets]
    m = len(family)
    best = -1
    for sub in range(1 << m):
        chosen = [family[i] for i in range(m) if sub >> i & 1]
        union: frozenset[int] = frozenset().union(*chosen) if chosen else frozenset()
        if sum(len(s) for s in chosen) != len(union):
            continue  # not pairwise disjoint
        if any(family[i] <= union for i in range(m) if not sub >> i & 1):
            continue  # not closed
        best = max(best, len(chosen))
    return best


def brute_max_set_packing(sets) -> int:
    family = [frozenset(s) for s in sets]
    m = len(family)
    best = 0
    for sub in range(1 << m):
        chosen = [family[i] for i in range(m) if sub >> i & 1]
        union: frozenset[int] = frozenset().union(*chosen) if chosen else frozenset()
        if sum(len(s) for s in chosen) == len(union):
            best = max(best, len(chosen))
    return best
