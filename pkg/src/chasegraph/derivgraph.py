"""Derivation graphs: one node per derivation step, arcs tracking frontier atoms.

Node X0 is decorated with the database; node Xi with the atoms step i
introduced.  An arc (Xi, Xj) exists when some body atom of step j's rule
containing a frontier variable is matched against an atom that step i
introduced; its label is the frontier part of that match, minus constants.
Frontier-atom matching is restricted to body atoms: head atoms do not exist
yet when step j fires, so only body atoms can reach earlier nodes.  When
several frontier atoms of one step hit the same earlier node, the single
arc carries the union of their labels.

Graphs are immutable; the reduction engine produces rewritten copies that
share node decorations.
"""

from __future__ import annotations

from dataclasses import dataclass

from .chase import Derivation, Trigger
from .errors import UnknownTermError
from .model import (
    Atom,
    Constant,
    Instance,
    KnowledgeBase,
    Null,
    Rule,
    Term,
    frontier_atoms,
    terms_of,
    term_key,
)

Arc = tuple[int, int]


class DerivationGraph:
    """Decorated DAG over derivation steps; arcs always point forward."""

    __slots__ = ("at", "arcs", "constants", "provenance")

    def __init__(
        self,
        at: tuple[frozenset[Atom], ...],
        arcs: dict[Arc, frozenset[Term]],
        constants: frozenset[Constant],
        provenance: tuple[tuple[Rule, Trigger] | None, ...],
    ):
        for (i, j) in arcs:
            if not 0 <= i < j < len(at):
                raise ValueError(f"arc ({i},{j}) violates forward orientation")
        self.at = at
        self.arcs = dict(arcs)
        self.constants = constants
        self.provenance = provenance

    def __len__(self) -> int:
        return len(self.at)

    @property
    def nodes(self) -> range:
        return range(len(self.at))

    def label(self, i: int, j: int) -> frozenset[Term]:
        return self.arcs[(i, j)]

    def node_terms(self, i: int) -> frozenset[Term]:
        """terms(Xi) = terms of the node's atoms plus every constant."""
        return terms_of(self.at[i]) | self.constants

    def nonconstant_terms(self, i: int) -> frozenset[Term]:
        return terms_of(self.at[i]) - self.constants

    def parents(self, k: int) -> list[int]:
        return sorted(i for (i, j) in self.arcs if j == k)

    def children(self, i: int) -> list[int]:
        return sorted(j for (i2, j) in self.arcs if i2 == i)

    def in_degree(self, k: int) -> int:
        return sum(1 for (_, j) in self.arcs if j == k)

    def with_arcs(self, arcs: dict[Arc, frozenset[Term]]) -> "DerivationGraph":
        return DerivationGraph(self.at, arcs, self.constants, self.provenance)

    def state_key(self) -> tuple:
        """Canonical encoding of the arc structure, for memoized search."""
        return tuple(
            (i, j, tuple(sorted(map(term_key, lbl))))
            for (i, j), lbl in sorted(self.arcs.items())
        )

    def __repr__(self) -> str:
        arcs = ", ".join(
            f"X{i}->X{j}:{{{','.join(str(t) for t in sorted(lbl, key=term_key))}}}"
            for (i, j), lbl in sorted(self.arcs.items())
        )
        return f"DerivationGraph({len(self.at)} nodes; {arcs})"


def build_derivation_graph(d: Derivation, kb: KnowledgeBase) -> DerivationGraph:
    """The derivation graph of ``d`` over ``kb``.

    Works for derivations starting at the knowledge base's database; a step
    adding no atoms yields a node with an empty decoration.
    """
    constants = kb.constants | d.initial.constants()
    at: list[frozenset[Atom]] = [d.initial.atoms]
    provenance: list[tuple[Rule, Trigger] | None] = [None]
    owner: dict[Atom, int] = {a: 0 for a in d.initial.atoms}
    arcs: dict[Arc, frozenset[Term]] = {}

    for j, step in enumerate(d.steps, start=1):
        new = d.new_atoms(j)
        at.append(new)
        provenance.append((step.rule, step.trigger))
        hom = step.trigger.hom
        fr = step.rule.frontier
        for fa in sorted(frontier_atoms(step.rule, "body"), key=str):
            image = hom.apply_atom(fa)
            i = owner[image]
            contribution = frozenset(hom[v] for v in fa.terms() & fr) - constants
            arcs[(i, j)] = arcs.get((i, j), frozenset()) | contribution
        for a in new:
            owner[a] = j
    return DerivationGraph(tuple(at), arcs, frozenset(constants), tuple(provenance))


def node_frontier(g: DerivationGraph, node: int) -> frozenset[Term]:
    """Frontier image of the node's creating step, minus constants.

    Source nodes (no incoming arcs in the *current* graph) have an empty
    frontier by definition; reductions may turn nodes into sources.
    """
    if g.in_degree(node) == 0:
        return frozenset()
    r, trig = g.provenance[node]
    return frozenset(trig.extension[v] for v in r.frontier) - g.constants


def x_generative_node(g: DerivationGraph, x: Null) -> int:
    """The earliest node whose non-constant terms contain x."""
    for i in g.nodes:
        if x in g.nonconstant_terms(i):
            return i
    raise UnknownTermError(f"{x} occurs in no node of the graph")


@dataclass(frozen=True)
class DecompositionReport:
    term_cover: bool
    atom_cover: bool
    connected: bool
    bounded: bool
    bound: int
    failures: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return self.term_cover and self.atom_cover and self.connected and self.bounded


def check_decomposition_properties(
    g: DerivationGraph, final: Instance, kb: KnowledgeBase
) -> DecompositionReport:
    """The four tree-decomposition-like properties of (reduced) derivation graphs.

    1. node terms cover exactly the final instance's terms (plus the KB
       constants, which every node carries by definition);
    2. every atom of the final instance decorates some node;
    3. for every null, the nodes containing it induce a connected subgraph;
    4. every node's term count respects the KB-size bound.
    """
    from .treedecomp import width_bound  # local import to avoid a cycle

    failures: list[str] = []
    covered = frozenset.union(*(g.node_terms(i) for i in g.nodes))
    want = final.terms() | g.constants
    term_cover = covered == want
    if not term_cover:
        failures.append(f"term cover: {covered ^ want} mismatched")

    decorated = frozenset.union(*(frozenset(g.at[i]) for i in g.nodes))
    atom_cover = final.atoms <= decorated
    if not atom_cover:
        failures.append(f"atom cover: missing {final.atoms - decorated}")

    connected = True
    undirected: dict[int, set[int]] = {i: set() for i in g.nodes}
    for (i, j) in g.arcs:
        undirected[i].add(j)
        undirected[j].add(i)
    for x in sorted(final.nulls(), key=term_key):
        members = {i for i in g.nodes if x in g.nonconstant_terms(i)}
        if not members:
            continue
        start = min(members)
        seen = {start}
        stack = [start]
        while stack:
            for nxt in undirected[stack.pop()]:
                if nxt in members and nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        if seen != members:
            connected = False
            failures.append(f"occurrence subgraph for {x} is disconnected")

    bound = width_bound(kb)
    oversized = [i for i in g.nodes if len(g.node_terms(i)) > bound]
    bounded = not oversized
    if oversized:
        failures.append(f"nodes {oversized} exceed the term bound {bound}")

    return DecompositionReport(term_cover, atom_cover, connected, bounded, bound, tuple(failures))


def check_generative_paths(g: DerivationGraph) -> list[str]:
    """Directed-path property: from each null's generative node there is a
    directed path to every other node containing that null, running only
    through nodes that contain it and never through a later index.

    Returns a list of violation descriptions (empty = property holds).
    """
    violations: list[str] = []
    all_nulls = frozenset.union(
        frozenset(), *(g.nonconstant_terms(i) for i in g.nodes)
    )
    for x in sorted((t for t in all_nulls if isinstance(t, Null)), key=term_key):
        members = [i for i in g.nodes if x in g.nonconstant_terms(i)]
        gen = members[0]
        for k in members:
            allowed = {m for m in members if m <= k}
            seen = {gen}
            stack = [gen]
            while stack:
                cur = stack.pop()
                for (i, j) in g.arcs:
                    if i == cur and j in allowed and j not in seen:
                        seen.add(j)
                        stack.append(j)
            if k not in seen:
                violations.append(f"no admissible directed path from X{gen} to X{k} for {x}")
    return violations
