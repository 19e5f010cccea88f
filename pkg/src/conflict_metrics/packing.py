"""Maximum closed set packing (MCSP).

A packing of a set family is a pairwise-disjoint subfamily; it is *closed*
when no unselected member of the family hides inside the union of the
selected ones.  The distribution index of a knowledge base equals the size
of a maximum closed packing of its MUS family, which is why this module
exists, but everything here is phrased over abstract families.

Provided back-ends, all exact and mutually cross-checkable:

* ``mcsp_bruteforce``   -- exhaustive over all packings, canonical
  tie-break (lexicographically smallest selected index set among maxima);
  capped instance size.
* ``mcsp_branch_bound`` -- branch and bound with closedness-doom pruning
  and an optimistic disjointness bound; self-certifying ``optimal`` flag
  with a best-so-far answer on timeout.
* 0/1 ILP encoder: per shared element an at-most-one row over the set
  variables, and per set two rows tying its selection variable to the
  element variables (selected => all elements marked, unselected => some
  element unmarked); objective maximizes the number of selected sets.
* Min-cost/weighted-CNF encoder: the at-most-one rows become sequential
  counter chains, selection variables are flipped (x' true means NOT
  selected) so that minimizing the weight of violated unit softs maximizes
  the packing; minimum cost equals m - cardinality.
* ``solve_encoding_exhaustive`` -- a dumb assignment-enumeration optimum
  for either encoding, used as the validation oracle in tests.

Set indices are 1-based everywhere in the public surface, matching the
``x<i>``/``y<e>`` variable names used by the LP and WCNF writers.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import GcnfFormatError, ResourceLimitError

Clause = tuple[int, ...]


@dataclass(frozen=True)
class SetFamily:
    """Universe 1..universe_size plus a duplicate-free list of nonempty subsets.

    Construction sorts each set and drops exact duplicates, keeping the
    first occurrence.
    """

    universe_size: int
    sets: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.universe_size < 0:
            raise ValueError("universe_size must be >= 0")
        seen: dict[tuple[int, ...], None] = {}
        for s in self.sets:
            t = tuple(sorted(set(s)))
            if not t:
                raise ValueError("empty sets are not allowed in a SetFamily")
            if t[0] < 1 or t[-1] > self.universe_size:
                raise ValueError(f"set {t} leaves universe 1..{self.universe_size}")
            if t not in seen:
                seen[t] = None
        object.__setattr__(self, "sets", tuple(seen))

    @property
    def m(self) -> int:
        return len(self.sets)

    @property
    def n(self) -> int:
        return self.universe_size

    def element_masks(self) -> list[int]:
        return [_mask_of(s) for s in self.sets]


@dataclass(frozen=True)
class PackingSolution:
    selected: tuple[int, ...]  # 1-based set indices, ascending
    covered: frozenset[int]
    cardinality: int
    optimal: bool


def _mask_of(elems: Iterable[int]) -> int:
    mask = 0
    for e in elems:
        mask |= 1 << e
    return mask


def _mask_elems(mask: int) -> frozenset[int]:
    out = set()
    e = 0
    while mask:
        if mask & 1:
            out.add(e)
        mask >>= 1
        e += 1
    return frozenset(out)


def is_closed_packing(family: SetFamily, selected: Iterable[int]) -> bool:
    """True iff the selected sets are pairwise disjoint and no unselected
    set is contained in their union."""
    sel = set(selected)
    for i in sel:
        if not 1 <= i <= family.m:
            raise IndexError(f"set index {i} out of range 1..{family.m}")
    masks = family.element_masks()
    union = 0
    for i in sorted(sel):
        mask = masks[i - 1]
        if mask & union:
            return False
        union |= mask
    for j in range(1, family.m + 1):
        if j not in sel and masks[j - 1] | union == union:
            return False
    return True


def _solution(selected0: Sequence[int], masks: list[int], optimal: bool) -> PackingSolution:
    sel = tuple(sorted(i + 1 for i in selected0))
    union = 0
    for i in selected0:
        union |= masks[i]
    return PackingSolution(sel, _mask_elems(union), len(sel), optimal)


def mcsp_bruteforce(family: SetFamily, max_sets: int = 20) -> PackingSolution:
    """Exhaustive maximum closed packing.

    Explores every packing (subsets pruned only when disjointness is
    already violated, which no completion can repair).  Ties are broken
    toward the lexicographically smallest selected index set because
    include-branches are explored first and only strict improvements are
    recorded.
    """
    if family.m > max_sets:
        raise ResourceLimitError(f"brute force capped at {max_sets} sets, got {family.m}")
    masks = family.element_masks()
    m = family.m
    best_card = -1
    best_sel: tuple[int, ...] = ()
    chosen: list[int] = []

    def rec(i: int, union: int) -> None:
        nonlocal best_card, best_sel
        if i == m:
            if len(chosen) > best_card:
                in_sel = set(chosen)
                for j in range(m):
                    if j not in in_sel and masks[j] | union == union:
                        return
                best_card = len(chosen)
                best_sel = tuple(chosen)
            return
        if masks[i] & union == 0:
            chosen.append(i)
            rec(i + 1, union | masks[i])
            chosen.pop()
        rec(i + 1, union)

    rec(0, 0)
    return _solution(best_sel, masks, optimal=True)


def msp_bruteforce(family: SetFamily, max_sets: int = 20) -> PackingSolution:
    """Exhaustive maximum set packing (no closedness requirement)."""
    if family.m > max_sets:
        raise ResourceLimitError(f"brute force capped at {max_sets} sets, got {family.m}")
    masks = family.element_masks()
    m = family.m
    best_card = -1
    best_sel: tuple[int, ...] = ()
    chosen: list[int] = []

    def rec(i: int, union: int) -> None:
        nonlocal best_card, best_sel
        if i == m:
            if len(chosen) > best_card:
                best_card = len(chosen)
                best_sel = tuple(chosen)
            return
        if masks[i] & union == 0:
            chosen.append(i)
            rec(i + 1, union | masks[i])
            chosen.pop()
        rec(i + 1, union)

    rec(0, 0)
    return _solution(best_sel, masks, optimal=True)


def mcsp_branch_bound(family: SetFamily, time_budget_s: float | None = None) -> PackingSolution:
    """Branch-and-bound maximum closed packing.

    Sets are ordered by ascending overlap degree (ties by index) and decided
    include-first.  A branch dies as soon as any unselected set is contained
    in the current union: containment never goes away and a nonempty
    contained set can never be selected.  The optimistic bound counts the
    undecided sets still disjoint from the union, refined by how many
    disjoint sets the uncovered elements could possibly host.  A greedy
    packing seeds the incumbent.  On timeout the best solution so far is
    returned with ``optimal=False``; it is always a valid closed packing.
    """
    masks = family.element_masks()
    sizes = [len(s) for s in family.sets]
    m = family.m
    overlap = [sum(1 for j in range(m) if j != i and masks[i] & masks[j]) for i in range(m)]
    order = sorted(range(m), key=lambda i: (overlap[i], i))

    best_card = -1
    best_sel: tuple[int, ...] = ()

    def consider(sel: Sequence[int]) -> None:
        nonlocal best_card, best_sel
        if len(sel) > best_card:
            best_card = len(sel)
            best_sel = tuple(sel)

    consider(())  # the empty packing is closed (no empty sets exist)
    greedy, g_union = [], 0
    for i in order:
        if masks[i] & g_union == 0:
            greedy.append(i)
            g_union |= masks[i]
    greedy_set = set(greedy)
    if all(masks[j] | g_union != g_union for j in range(m) if j not in greedy_set):
        consider(greedy)

    deadline = None if time_budget_s is None else time.monotonic() + time_budget_s
    timed_out = False
    nodes = 0
    decision = [0] * m  # 0 undecided, 1 selected, -1 excluded
    selected: list[int] = []

    def dfs(k: int, union: int) -> None:
        nonlocal timed_out, nodes, best_card, best_sel
        if timed_out:
            return
        nodes += 1
        if deadline is not None and nodes & 1023 == 0 and time.monotonic() > deadline:
            timed_out = True
            return
        for j in range(m):
            if decision[j] != 1 and masks[j] | union == union:
                return  # contained but unselected: no closed completion
        if k == m:
            consider(selected)
            return
        candidates = [j for j in order[k:] if masks[j] & union == 0]
        bound = len(selected) + len(candidates)
        if bound <= best_card:
            return
        if candidates:
            cover = 0
            for j in candidates:
                cover |= masks[j]
            refined = len(selected) + cover.bit_count() // min(sizes[j] for j in candidates)
            if refined <= best_card:
                return
        i = order[k]
        if masks[i] & union == 0:
            decision[i] = 1
            selected.append(i)
            dfs(k + 1, union | masks[i])
            selected.pop()
        decision[i] = -1
        dfs(k + 1, union)
        decision[i] = 0

    dfs(0, 0)
    solution = _solution(best_sel, masks, optimal=not timed_out)
    assert is_closed_packing(family, solution.selected)
    return solution


# ---------------------------------------------------------------------------
# 0/1 integer linear program


@dataclass(frozen=True)
class IlpConstraint:
    name: str
    kind: str  # "pairwise_disjoint" | "selected_covers" | "unselected_misses"
    terms: tuple[tuple[int, str], ...]  # (coefficient, variable name)
    sense: str  # "<=" | ">="
    rhs: int


@dataclass(frozen=True)
class IlpModel:
    """Binary program whose optimum is the maximum closed packing size."""

    set_vars: tuple[str, ...]
    elem_vars: tuple[str, ...]
    set_sizes: tuple[int, ...]
    constraints: tuple[IlpConstraint, ...]
    objective: tuple[str, ...]  # maximize the sum of these variables


def encode_ilp(family: SetFamily) -> IlpModel:
    """Binary variables x<i> per set and y<e> per element.

    Disjointness rows are emitted only for elements occurring in at least
    two sets (otherwise the row is vacuous); every set gets one covering
    row (x_i = 1 forces all its y_e) and one miss row (x_i = 0 forces some
    y_e = 0), which together make selection equivalent to containment in
    the marked-element region.
    """
    set_vars = tuple(f"x{i}" for i in range(1, family.m + 1))
    elem_vars = tuple(f"y{e}" for e in range(1, family.n + 1))
    sizes = tuple(len(s) for s in family.sets)
    constraints: list[IlpConstraint] = []

    occurs: dict[int, list[int]] = {}
    for i, s in enumerate(family.sets, start=1):
        for e in s:
            occurs.setdefault(e, []).append(i)
    for e in sorted(occurs):
        owners = occurs[e]
        if len(owners) < 2:
            continue
        constraints.append(
            IlpConstraint(
                name=f"disjoint_e{e}",
                kind="pairwise_disjoint",
                terms=tuple((1, f"x{i}") for i in owners),
                sense="<=",
                rhs=1,
            )
        )
    for i, s in enumerate(family.sets, start=1):
        y_terms = tuple((1, f"y{e}") for e in s)
        constraints.append(
            IlpConstraint(
                name=f"cover_s{i}",
                kind="selected_covers",
                terms=y_terms + ((-sizes[i - 1], f"x{i}"),),
                sense=">=",
                rhs=0,
            )
        )
        constraints.append(
            IlpConstraint(
                name=f"miss_s{i}",
                kind="unselected_misses",
                terms=y_terms + ((-1, f"x{i}"),),
                sense="<=",
                rhs=sizes[i - 1] - 1,
            )
        )
    return IlpModel(set_vars, elem_vars, sizes, tuple(constraints), set_vars)


def _lp_terms(terms: Sequence[tuple[int, str]]) -> str:
    parts: list[str] = []
    for coeff, var in terms:
        sign = "-" if coeff < 0 else "+"
        mag = abs(coeff)
        body = var if mag == 1 else f"{mag} {var}"
        if not parts:
            parts.append(body if coeff > 0 else f"- {body}")
        else:
            parts.append(f"{sign} {body}")
    return " ".join(parts)


def write_lp(model: IlpModel) -> str:
    """LP text: Maximize / Subject To / Binary / End."""
    lines = ["Maximize", " obj: " + _lp_terms([(1, v) for v in model.objective]), "Subject To"]
    for c in model.constraints:
        lines.append(f" {c.name}: {_lp_terms(c.terms)} {c.sense} {c.rhs}")
    lines.append("Binary")
    for v in model.set_vars + model.elem_vars:
        lines.append(f" {v}")
    lines.append("End")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Min-cost SAT / weighted partial MaxSAT


@dataclass(frozen=True)
class WcnfInstance:
    """Weighted partial CNF whose minimum cost is m - (max closed packing).

    Variables: 1..m are the flipped selection variables x' (true = set NOT
    selected, each costing 1), m+1..m+n are element variables y, and the
    rest are sequential-counter chain variables, one chain per element
    shared by at least two sets.  ``counter_chains`` records
    (element, set indices, chain variables) per chain.
    """

    num_vars: int
    top: int
    hard: tuple[Clause, ...]
    soft: tuple[tuple[Clause, int], ...]
    select_vars: tuple[int, ...]
    elem_vars: tuple[int, ...]
    counter_chains: tuple[tuple[int, tuple[int, ...], tuple[int, ...]], ...]
    var_roles: tuple[str, ...] = field(compare=False, default=())

    @property
    def counter_vars(self) -> tuple[int, ...]:
        return tuple(v for _, _, chain in self.counter_chains for v in chain)

    def cost_of(self, v: int) -> int:
        return 1 if v in set(self.select_vars) else 0


def encode_mincost_sat(family: SetFamily) -> WcnfInstance:
    """Encode maximum closed packing as minimum-cost satisfiability.

    For every element shared by k >= 2 sets, an at-most-one constraint over
    their selection variables is laid out as a sequential counter: k = 2
    yields 2 clauses and 1 chain variable, k >= 3 yields 2 + 3(k-2) clauses
    and k-1 chain variables.  Selection variables enter every clause
    flipped (x' = NOT selected) so all softs are unit clauses (-x'_i,
    weight 1) and minimum cost corresponds to maximum cardinality.
    """
    m, n = family.m, family.n
    roles = [f"x'{i}" for i in range(1, m + 1)] + [f"y{e}" for e in range(1, n + 1)]
    next_var = m + n + 1
    hard: list[Clause] = []
    chains: list[tuple[int, tuple[int, ...], tuple[int, ...]]] = []

    occurs: dict[int, list[int]] = {}
    for i, s in enumerate(family.sets, start=1):
        for e in s:
            occurs.setdefault(e, []).append(i)

    for e in sorted(occurs):
        owners = occurs[e]
        k = len(owners)
        if k < 2:
            continue
        chain = tuple(range(next_var, next_var + k - 1))
        next_var += k - 1
        roles += [f"p[e{e},{t}]" for t in range(1, k)]
        chains.append((e, tuple(owners), chain))
        # sequential counter over (not x'_i1) .. (not x'_ik): at most one true
        hard.append((owners[0], chain[0]))
        for t in range(1, k - 1):
            hard.append((owners[t], chain[t]))
            hard.append((-chain[t - 1], chain[t]))
            hard.append((owners[t], -chain[t - 1]))
        hard.append((owners[-1], -chain[-1]))

    for i, s in enumerate(family.sets, start=1):
        for e in s:
            hard.append((i, m + e))  # selected set covers its elements
    for i, s in enumerate(family.sets, start=1):
        hard.append((-i,) + tuple(-(m + e) for e in s))  # unselected set misses one

    soft = tuple(((-i,), 1) for i in range(1, m + 1))
    return WcnfInstance(
        num_vars=next_var - 1,
        top=m + 1,
        hard=tuple(hard),
        soft=soft,
        select_vars=tuple(range(1, m + 1)),
        elem_vars=tuple(range(m + 1, m + n + 1)),
        counter_chains=tuple(chains),
        var_roles=tuple(roles),
    )


def write_wcnf(w: WcnfInstance) -> str:
    lines = ["c maximum closed set packing as weighted partial CNF"]
    for v, role in enumerate(w.var_roles, start=1):
        lines.append(f"c var {v} : {role}")
    lines.append(f"p wcnf {w.num_vars} {len(w.hard) + len(w.soft)} {w.top}")
    for clause in w.hard:
        lines.append(" ".join([str(w.top), *map(str, clause), "0"]))
    for clause, weight in w.soft:
        lines.append(" ".join([str(weight), *map(str, clause), "0"]))
    return "\n".join(lines) + "\n"


def packing_to_assignment(family: SetFamily, w: WcnfInstance, selected: Iterable[int]) -> dict[int, bool]:
    """Total assignment encoding a packing: x' flipped, y = covered, chains
    set to the prefix-or of their selection bits.  Satisfies all hard
    clauses whenever the selection is a closed packing."""
    sel = set(selected)
    covered: set[int] = set()
    for i in sel:
        covered.update(family.sets[i - 1])
    m = len(w.select_vars)
    assignment = {v: (v - m) in covered for v in w.elem_vars}
    for i in w.select_vars:
        assignment[i] = i not in sel
    for _, owners, chain in w.counter_chains:
        prefix = False
        for t, owner in enumerate(owners[:-1]):
            prefix = prefix or (owner in sel)
            assignment[chain[t]] = prefix
    return assignment


def check_wcnf_assignment(w: WcnfInstance, assignment: dict[int, bool]) -> tuple[bool, int]:
    """(all hard clauses satisfied?, total weight of violated softs)."""

    def sat(clause: Clause) -> bool:
        return any(assignment[abs(lit)] == (lit > 0) for lit in clause)

    hard_ok = all(sat(c) for c in w.hard)
    cost = sum(weight for clause, weight in w.soft if not sat(clause))
    return hard_ok, cost


def import_packing_solution(family: SetFamily, text: str) -> PackingSolution:
    """Read a solver model (``v <lit>... 0`` lines or bare literals) for the
    WCNF encoding and rebuild the packing it denotes.

    Variables 1..m are the flipped selection variables, so set i is
    selected when literal -i is asserted.  The result is validated with
    is_closed_packing and the cardinality recomputed; ``optimal`` is left
    False because a bare model carries no optimality certificate.
    """
    lits: set[int] = set()
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith(("c", "s", "o")):
            continue
        if line.startswith("v"):
            line = line[1:]
        try:
            lits.update(int(tok) for tok in line.split())
        except ValueError as exc:
            raise GcnfFormatError(f"bad literal in solution line {raw!r}") from exc
    lits.discard(0)
    selected = sorted(i for i in range(1, family.m + 1) if -i in lits)
    if not is_closed_packing(family, selected):
        raise ValueError(f"imported selection {selected} is not a closed packing")
    masks = family.element_masks()
    return _solution([i - 1 for i in selected], masks, optimal=False)


# ---------------------------------------------------------------------------
# Validation oracle and the set-packing reduction


def solve_encoding_exhaustive(model: IlpModel | WcnfInstance, max_vars: int = 24) -> int:
    """Exact optimum of either encoding by exhaustive assignment enumeration,
    reported as the packing cardinality.  Test oracle only; capped at
    ``max_vars`` binary variables."""
    if isinstance(model, IlpModel):
        return _ilp_exhaustive(model, max_vars)
    if isinstance(model, WcnfInstance):
        return _wcnf_exhaustive(model, max_vars)
    raise TypeError(f"expected IlpModel or WcnfInstance, got {type(model).__name__}")


_CHUNK = 1 << 16


def _ilp_exhaustive(model: IlpModel, max_vars: int) -> int:
    names = model.set_vars + model.elem_vars
    v = len(names)
    if v > max_vars:
        raise ResourceLimitError(f"exhaustive ILP search capped at {max_vars} variables, got {v}")
    col = {name: k for k, name in enumerate(names)}
    rows = []
    for c in model.constraints:
        coeffs = np.zeros(v, dtype=np.int64)
        for coeff, var in c.terms:
            coeffs[col[var]] += coeff
        rows.append((coeffs, c.sense, c.rhs))
    obj = np.zeros(v, dtype=np.int64)
    for var in model.objective:
        obj[col[var]] += 1

    shifts = np.arange(v, dtype=np.uint32)
    best = -1
    for start in range(0, 1 << v, _CHUNK):
        stop = min(start + _CHUNK, 1 << v)
        masks = np.arange(start, stop, dtype=np.uint32)
        bits = ((masks[:, None] >> shifts) & 1).astype(np.int64)
        feasible = np.ones(len(masks), dtype=bool)
        for coeffs, sense, rhs in rows:
            lhs = bits @ coeffs
            feasible &= (lhs <= rhs) if sense == "<=" else (lhs >= rhs)
        if feasible.any():
            best = max(best, int((bits @ obj)[feasible].max()))
    if best < 0:
        raise RuntimeError("ILP model is infeasible; the encoding is broken")
    return best


def _wcnf_exhaustive(w: WcnfInstance, max_vars: int) -> int:
    v = w.num_vars
    if v > max_vars:
        raise ResourceLimitError(f"exhaustive WCNF search capped at {max_vars} variables, got {v}")

    def clause_masks(clause: Clause) -> tuple[int, int]:
        pos = _mask_of(lit - 1 for lit in clause if lit > 0)
        neg = _mask_of(-lit - 1 for lit in clause if lit < 0)
        return pos, neg

    hard = [clause_masks(c) for c in w.hard]
    soft = [(clause_masks(c), weight) for c, weight in w.soft]
    best_cost = None
    for start in range(0, 1 << v, _CHUNK):
        stop = min(start + _CHUNK, 1 << v)
        masks = np.arange(start, stop, dtype=np.uint32)
        ok = np.ones(len(masks), dtype=bool)
        for pos, neg in hard:
            ok &= ((masks & pos) != 0) | ((masks & neg) != neg)
        if not ok.any():
            continue
        cost = np.zeros(len(masks), dtype=np.int64)
        for (pos, neg), weight in soft:
            sat = ((masks & pos) != 0) | ((masks & neg) != neg)
            cost += weight * (~sat)
        chunk_best = int(cost[ok].min())
        best_cost = chunk_best if best_cost is None else min(best_cost, chunk_best)
    if best_cost is None:
        raise RuntimeError("WCNF hard clauses are unsatisfiable; the encoding is broken")
    return len(w.select_vars) - best_cost


def reduce_msp_to_mcsp(family: SetFamily) -> SetFamily:
    """Append a fresh element to every set so that any packing is a closed
    packing: the maximum set packing of the input equals the maximum closed
    packing of the output.  Set i gains element universe_size + i."""
    n = family.universe_size
    sets = tuple(s + (n + i,) for i, s in enumerate(family.sets, start=1))
    return SetFamily(universe_size=n + family.m, sets=sets)


# ---------------------------------------------------------------------------
# Family text format


def family_to_text(family: SetFamily) -> str:
    """First line ``m n``, then one set per line as space-separated elements."""
    lines = [f"{family.m} {family.universe_size}"]
    lines += [" ".join(map(str, s)) for s in family.sets]
    return "\n".join(lines) + "\n"


def parse_family(text: str) -> SetFamily:
    rows: list[list[int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append([int(tok) for tok in line.split()])
        except ValueError as exc:
            raise GcnfFormatError(f"line {lineno}: not a list of integers") from exc
    if not rows:
        raise GcnfFormatError("empty family file")
    header = rows[0]
    if len(header) != 2:
        raise GcnfFormatError("header must be 'm n'")
    m, n = header
    body = rows[1:]
    if len(body) != m:
        raise GcnfFormatError(f"header declares {m} sets, found {len(body)}")
    return SetFamily(universe_size=n, sets=tuple(tuple(s) for s in body))
