"""MUS graph and the decomposition induced by its connected components.

Vertices are 1-based MUS ids (positions in a canonical MusSet); two MUSes
are adjacent iff they share a formula.  The connected components partition
the unfree part of the KB into formula-disjoint blocks -- MUSes in
different components cannot share a formula -- and the decomposition is
those blocks plus the free formulas.  Building it performs no SAT calls.
"""

from __future__ import annotations

from dataclasses import dataclass

from .formulas import IndexSet, KnowledgeBase
from .mus import MusSet


@dataclass(frozen=True)
class MusGraph:
    num_vertices: int
    edges: tuple[tuple[int, int], ...]  # (i, j) with i < j, sorted

    def adjacency(self) -> dict[int, set[int]]:
        adj: dict[int, set[int]] = {v: set() for v in range(1, self.num_vertices + 1)}
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return adj


@dataclass(frozen=True)
class DecompositionComponent:
    formulas: IndexSet
    mus_ids: frozenset[int]


@dataclass(frozen=True)
class Decomposition:
    """Formula-disjoint inconsistent components plus the free remainder."""

    components: tuple[DecompositionComponent, ...]
    free: IndexSet


def build_mus_graph(muses: MusSet) -> MusGraph:
    edges = []
    for i in muses.ids():
        si = muses.get(i)
        for j in range(i + 1, len(muses) + 1):
            if si & muses.get(j):
                edges.append((i, j))
    return MusGraph(num_vertices=len(muses), edges=tuple(edges))


def connected_components(graph: MusGraph) -> tuple[frozenset[int], ...]:
    """Vertex sets of the connected components, ordered by smallest member id."""
    adj = graph.adjacency()
    seen: set[int] = set()
    components = []
    for start in range(1, graph.num_vertices + 1):
        if start in seen:
            continue
        stack, comp = [start], set()
        while stack:
            v = stack.pop()
            if v in comp:
                continue
            comp.add(v)
            stack.extend(adj[v] - comp)
        seen |= comp
        components.append(frozenset(comp))
    return tuple(components)  # discovery order == ascending smallest member


def mus_decomposition(kb: KnowledgeBase, muses: MusSet) -> Decomposition:
    """The unique decomposition of the KB induced by the MUS graph.

    Components are ordered by their smallest formula index.  A consistent
    KB has no components and everything free.
    """
    graph = build_mus_graph(muses)
    components = []
    for ids in connected_components(graph):
        formulas: frozenset[int] = frozenset()
        for mid in ids:
            formulas |= muses.get(mid)
        components.append(DecompositionComponent(formulas, ids))
    components.sort(key=lambda c: min(c.formulas))

    covered: set[int] = set()
    for comp in components:
        overlap = covered & comp.formulas
        assert not overlap, f"components share formulas {sorted(overlap)}"
        covered |= comp.formulas
    return Decomposition(tuple(components), free=kb.all_indices() - covered)


def graph_to_text(graph: MusGraph) -> str:
    """DIMACS-style graph text: ``p edge n m`` then one ``e i j`` line per edge."""
    lines = [f"p edge {graph.num_vertices} {len(graph.edges)}"]
    lines += [f"e {i} {j}" for i, j in graph.edges]
    return "\n".join(lines) + "\n"
