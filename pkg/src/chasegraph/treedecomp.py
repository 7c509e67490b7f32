"""Tree decompositions: extraction from reduced graphs, validation, width bound."""

from __future__ import annotations

from dataclasses import dataclass

from .derivgraph import DerivationGraph
from .errors import NotCycleFreeError
from .model import Instance, KnowledgeBase, Term, term_key
from .reduction import is_cycle_free


@dataclass(frozen=True)
class TreeDecomposition:
    """Term bags connected by undirected tree edges; width = max bag size - 1."""

    bags: tuple[frozenset[Term], ...]
    edges: frozenset[tuple[int, int]]
    root: int

    @property
    def width(self) -> int:
        return max(len(b) for b in self.bags) - 1

    def neighbors(self, i: int) -> list[int]:
        out = [b for (a, b) in self.edges if a == i]
        out += [a for (a, b) in self.edges if b == i]
        return sorted(out)

    def is_tree(self) -> bool:
        n = len(self.bags)
        if len(self.edges) != n - 1:
            return False
        seen = {self.root}
        stack = [self.root]
        while stack:
            for nxt in self.neighbors(stack.pop()):
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return len(seen) == n


def extract_tree_decomposition(g: DerivationGraph) -> TreeDecomposition:
    """Read a reduced cycle-free graph as a tree decomposition.

    Bags are the node term sets and arcs become undirected edges.  A fully
    reduced graph is a forest; its trees are chained together by linking the
    roots (each tree's smallest node) in index order, which cannot break the
    occurrence-connectedness of any term.
    """
    if not is_cycle_free(g):
        raise NotCycleFreeError("graph still has converging arcs")
    bags = tuple(g.node_terms(i) for i in g.nodes)
    edges = {(min(i, j), max(i, j)) for (i, j) in g.arcs}

    component: dict[int, int] = {}
    for i in g.nodes:
        if i in component:
            continue
        stack = [i]
        component[i] = i
        while stack:
            cur = stack.pop()
            for (a, b) in g.arcs:
                for nxt in ((b,) if a == cur else (a,) if b == cur else ()):
                    if nxt not in component:
                        component[nxt] = i
                        stack.append(nxt)
    roots = sorted({component[i] for i in g.nodes})
    for a, b in zip(roots, roots[1:]):
        edges.add((a, b))
    return TreeDecomposition(bags, frozenset(edges), roots[0])


def validate_tree_decomposition(td: TreeDecomposition, instance: Instance) -> bool:
    """The three tree-decomposition conditions against an instance.

    (i) the bags cover the instance's terms; (ii) each atom's terms fit in
    one bag; (iii) the bags containing any given term induce a connected
    subtree.  The edge set must itself form a single tree.
    """
    if not td.is_tree():
        return False
    union = frozenset().union(*td.bags)
    if not instance.terms() <= union:
        return False
    for a in instance:
        needed = a.terms()
        if not any(needed <= bag for bag in td.bags):
            return False
    for t in sorted(union, key=term_key):
        members = {i for i, bag in enumerate(td.bags) if t in bag}
        start = min(members)
        seen = {start}
        stack = [start]
        while stack:
            for nxt in td.neighbors(stack.pop()):
                if nxt in members and nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        if seen != members:
            return False
    return True


def width_bound(kb: KnowledgeBase) -> int:
    """Uniform bound on node term counts: the larger of the database's term
    count and any rule head's term count, plus the number of KB constants."""
    head_sizes = [len({t for a in r.head for t in a.args}) for r in kb.rules]
    base = max([len(kb.database.terms())] + head_sizes)
    return base + len(kb.constants)
