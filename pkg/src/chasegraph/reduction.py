"""The three reduction operations on derivation graphs, and reduction search.

Arc removal deletes an empty-labeled arc.  Term removal deletes a term from
one of two converging arcs that both carry it.  Cycle removal redirects two
converging arcs onto a single earlier node whose terms cover both labels.
All three touch only arcs and labels, never nodes or decorations.

A graph counts as cycle-free when no node has two incoming arcs: every
node keeps at most one parent, which makes the underlying undirected graph
a forest and lets each non-source node inherit its frontier from a single
earlier node.  Reduction search ends exactly when that shape is reached.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterator, Union

from .derivgraph import DerivationGraph, node_frontier
from .errors import ResourceLimitError, SideConditionViolatedError
from .model import Term, term_key

DEFAULT_MAX_STATES = 10**5


@dataclass(frozen=True)
class ArStep:
    i: int
    j: int

    def describe(self) -> str:
        return f"ar[{self.i},{self.j}]"


@dataclass(frozen=True)
class TrStep:
    i: int
    j: int
    k: int
    t: Term

    def describe(self) -> str:
        return f"tr[{self.i},{self.j},{self.k},{self.t}]"


@dataclass(frozen=True)
class CrStep:
    i: int
    j: int
    k: int
    l: int

    def describe(self) -> str:
        return f"cr[{self.i},{self.j},{self.k},{self.l}]"


ReductionStep = Union[ArStep, TrStep, CrStep]


def apply_ar(g: DerivationGraph, i: int, j: int) -> DerivationGraph:
    """Remove the arc (Xi, Xj); its label must be empty."""
    if (i, j) not in g.arcs:
        raise SideConditionViolatedError(f"ar: no arc ({i},{j})")
    if g.arcs[(i, j)]:
        raise SideConditionViolatedError(f"ar: label of ({i},{j}) is not empty")
    arcs = dict(g.arcs)
    del arcs[(i, j)]
    return g.with_arcs(arcs)


def apply_tr(g: DerivationGraph, i: int, j: int, k: int, t: Term) -> DerivationGraph:
    """Remove term t from the label of (Xj, Xk); (Xi, Xk) must also carry t."""
    if i == j:
        raise SideConditionViolatedError("tr: the two parents must be distinct")
    for arc in ((i, k), (j, k)):
        if arc not in g.arcs:
            raise SideConditionViolatedError(f"tr: no arc {arc}")
    if t not in g.arcs[(i, k)] or t not in g.arcs[(j, k)]:
        raise SideConditionViolatedError(f"tr: {t} is not shared by both labels")
    arcs = dict(g.arcs)
    arcs[(j, k)] = arcs[(j, k)] - {t}
    return g.with_arcs(arcs)


def apply_cr(g: DerivationGraph, i: int, j: int, k: int, l: int) -> DerivationGraph:
    """Replace converging arcs (Xi, Xk), (Xj, Xk) by (Xl, Xk) labeled with
    their union; Xl must be earlier than Xk and its terms must cover the union."""
    if i == j:
        raise SideConditionViolatedError("cr: the two converging arcs must be distinct")
    for arc in ((i, k), (j, k)):
        if arc not in g.arcs:
            raise SideConditionViolatedError(f"cr: no arc {arc}")
    if not 0 <= l < k:
        raise SideConditionViolatedError(f"cr: witness index {l} is not below {k}")
    union = g.arcs[(i, k)] | g.arcs[(j, k)]
    if not union <= g.node_terms(l):
        raise SideConditionViolatedError(
            f"cr: label union {set(union)} not covered by terms(X{l})"
        )
    arcs = dict(g.arcs)
    del arcs[(i, k)]
    del arcs[(j, k)]
    arcs[(l, k)] = union  # overwrites any previous label on (l, k)
    return g.with_arcs(arcs)


def apply_step(g: DerivationGraph, step: ReductionStep) -> DerivationGraph:
    if isinstance(step, ArStep):
        return apply_ar(g, step.i, step.j)
    if isinstance(step, TrStep):
        return apply_tr(g, step.i, step.j, step.k, step.t)
    return apply_cr(g, step.i, step.j, step.k, step.l)


def is_cycle_free(g: DerivationGraph) -> bool:
    """True iff no node has two incoming arcs.

    With all arcs oriented forward, that single-parent condition also rules
    out undirected cycles (any undirected cycle must contain a node where
    two of its arcs converge), so the underlying graph is a forest.
    """
    indegree: dict[int, int] = {}
    for (_, j) in g.arcs:
        indegree[j] = indegree.get(j, 0) + 1
        if indegree[j] > 1:
            return False
    return True


@dataclass(frozen=True)
class ReductionTrace:
    """A replayable reduction: initial graph, steps, and every intermediate."""

    initial: DerivationGraph
    steps: tuple[ReductionStep, ...]
    graphs: tuple[DerivationGraph, ...]  # graphs[p] = result after p steps

    @property
    def final(self) -> DerivationGraph:
        return self.graphs[-1]

    @property
    def complete(self) -> bool:
        return is_cycle_free(self.final)

    def replay(self) -> None:
        """Re-apply the steps and verify each recorded intermediate."""
        g = self.initial
        if self.graphs[0].state_key() != g.state_key():
            raise ValueError("trace does not start at the initial graph")
        for p, step in enumerate(self.steps, start=1):
            g = apply_step(g, step)
            if g.state_key() != self.graphs[p].state_key():
                raise ValueError(f"replay diverges after step {p} ({step.describe()})")


def _convergence_points(g: DerivationGraph) -> list[int]:
    return sorted(k for k in g.nodes if g.in_degree(k) >= 2)


def _reduce_cr_only(g: DerivationGraph) -> ReductionTrace | None:
    steps: list[ReductionStep] = []
    graphs = [g]
    while True:
        points = _convergence_points(g)
        if not points:
            break
        k = points[0]
        parents = g.parents(k)
        chosen: CrStep | None = None
        for l in range(k):  # smallest witness first
            for i, j in combinations(parents, 2):
                if g.arcs[(i, k)] | g.arcs[(j, k)] <= g.node_terms(l):
                    chosen = CrStep(i, j, k, l)
                    break
            if chosen:
                break
        if chosen is None:
            return None
        g = apply_cr(g, chosen.i, chosen.j, chosen.k, chosen.l)
        steps.append(chosen)
        graphs.append(g)
    return ReductionTrace(graphs[0], tuple(steps), tuple(graphs))


def _moves(g: DerivationGraph) -> Iterator[ReductionStep]:
    """All applicable reduction steps, in a fixed deterministic order."""
    for (i, j), lbl in sorted(g.arcs.items()):
        if not lbl:
            yield ArStep(i, j)
    for k in g.nodes:
        parents = g.parents(k)
        if len(parents) < 2:
            continue
        for i in parents:
            for j in parents:
                if i == j:
                    continue
                shared = g.arcs[(i, k)] & g.arcs[(j, k)]
                for t in sorted(shared, key=term_key):
                    yield TrStep(i, j, k, t)
        for i, j in combinations(parents, 2):
            union = g.arcs[(i, k)] | g.arcs[(j, k)]
            for l in range(k):
                if union <= g.node_terms(l):
                    yield CrStep(i, j, k, l)


def _reduce_full(g: DerivationGraph, max_states: int) -> ReductionTrace | None:
    """Depth-first search over all reduction sequences, memoized on graph state.

    Every operation strictly shrinks (arc count, total label size)
    lexicographically, so the state space is a finite DAG and plain DFS with
    a visited set is complete.  Exceeding the state budget raises instead of
    reporting irreducibility.
    """
    seen: set[tuple] = set()

    def dfs(cur: DerivationGraph, steps: list, graphs: list) -> ReductionTrace | None:
        if is_cycle_free(cur):
            return ReductionTrace(graphs[0], tuple(steps), tuple(graphs))
        key = cur.state_key()
        if key in seen:
            return None
        seen.add(key)
        if len(seen) > max_states:
            raise ResourceLimitError(f"reduction search exceeded {max_states} states")
        for step in _moves(cur):
            nxt = apply_step(cur, step)
            steps.append(step)
            graphs.append(nxt)
            found = dfs(nxt, steps, graphs)
            if found is not None:
                return found
            steps.pop()
            graphs.pop()
        return None

    return dfs(g, [], [g])


def reduce_graph(
    g: DerivationGraph,
    strategy: str = "cr-only",
    max_states: int = DEFAULT_MAX_STATES,
) -> ReductionTrace | None:
    """Search for a complete reduction sequence; None means none exists.

    ``cr-only`` greedily removes the earliest convergence point with the
    smallest admissible witness node.  ``full`` explores all three
    operations exhaustively and is the ground truth for reducibility; it
    raises ResourceLimitError rather than misreporting when capped.
    """
    if strategy == "cr-only":
        return _reduce_cr_only(g)
    if strategy == "full":
        return _reduce_full(g, max_states)
    raise ValueError(f"unknown strategy {strategy!r}")


@dataclass(frozen=True)
class PrefixInvariantReport:
    frontier_matches: bool
    labels_covered: bool
    frontier_witness: bool
    failures: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return self.frontier_matches and self.labels_covered and self.frontier_witness


def check_prefix_invariants(trace: ReductionTrace) -> PrefixInvariantReport:
    """Invariants that every prefix of a reduction sequence maintains.

    (a) a node with parents has frontier equal to the union of its incoming
        labels;
    (b) every arc label is contained in the terms of its source node;
    (c) for complete traces only: in every prefix, each non-source node has
        an earlier node whose terms cover its frontier.
    """
    trace.replay()
    failures: list[str] = []
    fr_ok = lbl_ok = wit_ok = True
    check_witness = trace.complete
    for p, g in enumerate(trace.graphs):
        for n in g.nodes:
            parents = g.parents(n)
            if not parents:
                continue
            incoming = frozenset().union(*(g.arcs[(i, n)] for i in parents))
            if node_frontier(g, n) != incoming:
                fr_ok = False
                failures.append(f"prefix {p}: frontier of X{n} != union of incoming labels")
        for (i, j), lbl in g.arcs.items():
            if not lbl <= g.node_terms(i):
                lbl_ok = False
                failures.append(f"prefix {p}: label of ({i},{j}) escapes terms(X{i})")
        if check_witness:
            for n in g.nodes:
                if g.in_degree(n) == 0:
                    continue
                fr = node_frontier(g, n)
                if not any(fr <= g.node_terms(m) for m in range(n)):
                    wit_ok = False
                    failures.append(f"prefix {p}: no earlier node covers the frontier of X{n}")
    return PrefixInvariantReport(fr_ok, lbl_ok, wit_ok, tuple(failures))
