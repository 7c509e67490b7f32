"""Rule dependence, greediness checking, and derivation transformations.

Dependence ("applying rule r1 can newly enable rule r2") is decided by
checking candidate instances built from frozen copies of body(r1) together
with frozen copies of a proper subset of body(r2), under every pattern that
partitions the participating variables and optionally identifies blocks
with rule constants.  Any real witness instance projects onto one of these
candidates, so the enumeration is complete; each candidate is checked
directly against the definition, so it is sound.

Greediness of a derivation demands that each step's frontier image live
inside the constants of the knowledge base, the nulls of the initial
instance, and the nulls introduced by a *single* earlier step.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .chase import Derivation, DerivationStep, apply_rule, enumerate_derivations, triggers
from .errors import NotPermutableError
from .homs import find_homomorphisms, isomorphic_mod_nulls
from .model import (
    Constant,
    Instance,
    KnowledgeBase,
    Rule,
    Substitution,
    Term,
    Variable,
    constants_of,
    nulls_of,
    term_key,
    variables_of,
)


# ---------------------------------------------------------------------------
# Rule dependence and the dependency graph
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RuleDependencyGraph:
    """Vertices are rule ids; an edge (r, r2) says r2 depends on r."""

    vertices: tuple[str, ...]
    edges: frozenset[tuple[str, str]]

    def sources(self) -> frozenset[str]:
        dependents = {r2 for _, r2 in self.edges}
        return frozenset(v for v in self.vertices if v not in dependents)

    def layers(self) -> dict[str, int]:
        """Topological depth over the condensation of the dependence graph.

        Rules in a dependence cycle share a layer; a rule's layer is one more
        than the deepest layer it depends on outside its own cycle.
        """
        succ = {v: set() for v in self.vertices}
        pred = {v: set() for v in self.vertices}
        for a, b in self.edges:
            succ[a].add(b)
            pred[b].add(a)
        # Tarjan-free SCC via repeated reachability; rule sets are tiny.
        sccs: list[set[str]] = []
        assigned: set[str] = set()
        for v in self.vertices:
            if v in assigned:
                continue
            reach_fwd = _reachable(v, succ)
            reach_bwd = _reachable(v, pred)
            comp = (reach_fwd & reach_bwd) | {v}
            comp -= assigned
            sccs.append(comp)
            assigned |= comp
        comp_of = {v: i for i, comp in enumerate(sccs) for v in comp}
        layer_of_comp: dict[int, int] = {}

        def comp_layer(ci: int) -> int:
            if ci in layer_of_comp:
                return layer_of_comp[ci]
            parents = {
                comp_of[a]
                for a, b in self.edges
                if comp_of[b] == ci and comp_of[a] != ci
            }
            layer_of_comp[ci] = 0 if not parents else 1 + max(comp_layer(p) for p in parents)
            return layer_of_comp[ci]

        return {v: comp_layer(comp_of[v]) for v in self.vertices}


def _reachable(start: str, adj: dict[str, set[str]]) -> set[str]:
    seen = {start}
    stack = [start]
    while stack:
        for nxt in adj[stack.pop()]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return seen


def _rename_apart(r: Rule, taken: frozenset[Variable]) -> Rule:
    clash = variables_of(r.body) | variables_of(r.head)
    if not (clash & taken):
        return r
    ren = Substitution({v: Variable(f"{v.name}__2") for v in clash})
    return Rule(r.rid + "__2", frozenset(ren.apply(r.body)), frozenset(ren.apply(r.head)))


def _patterns(variables: list[Variable], consts: list[Constant]):
    """Every partition of the variables, each block frozen to its own fresh
    constant or identified with one rule constant (injectively)."""
    if not variables:
        yield Substitution()
        return
    blocks: list[list[Variable]] = []
    labels: list[Constant | None] = []

    def emit() -> Substitution:
        mapping: dict[Term, Term] = {}
        for i, blk in enumerate(blocks):
            img = labels[i] if labels[i] is not None else Constant(f"_frz{i}")
            for v in blk:
                mapping[v] = img
        return Substitution(mapping)

    def assign(i: int):
        if i == len(variables):
            yield emit()
            return
        v = variables[i]
        for blk in blocks:
            blk.append(v)
            yield from assign(i + 1)
            blk.pop()
        blocks.append([v])
        labels.append(None)
        yield from assign(i + 1)
        used = {c for c in labels if c is not None}
        for c in consts:
            if c in used:
                continue
            labels[-1] = c
            yield from assign(i + 1)
            labels[-1] = None
        blocks.pop()
        labels.pop()

    yield from assign(0)


def depends_on(r2: Rule, r1: Rule) -> bool:
    """True iff applying r1 to some instance can newly trigger r2.

    Formally: there is an instance I, a trigger h of r1 in I, and a
    homomorphism h2 mapping body(r2) into the result of applying (r1, h)
    such that h2 does not already map body(r2) into I itself.
    """
    if not {a.pred for a in r1.head} & {a.pred for a in r2.body}:
        return False  # a new trigger must read at least one new atom
    r2r = _rename_apart(r2, variables_of(r1.body) | variables_of(r1.head))
    consts = sorted(r1.constants() | r2r.constants(), key=term_key)
    body2 = sorted(r2r.body, key=lambda a: (a.pred, len(a.args), str(a)))
    for keep_n in range(len(body2)):  # proper subsets: >= 1 atom must be new
        for kept in itertools.combinations(body2, keep_n):
            pool = sorted(
                variables_of(r1.body) | variables_of(kept),
                key=term_key,
            )
            for sigma in _patterns(pool, consts):
                candidate = Instance(sigma.apply(r1.body) | sigma.apply(kept))
                if _witnesses_dependence(candidate, r1, r2r):
                    return True
    return False


def _witnesses_dependence(instance: Instance, r1: Rule, r2: Rule) -> bool:
    body2_preds = {a.pred for a in r2.body}
    if not {a.pred for a in r1.head} & body2_preds:
        return False  # no head atom could ever feed a new body match
    for h in triggers(instance, r1):
        chased, trig = apply_rule(instance, r1, h)
        new = chased - instance
        # a new trigger must read a new atom, and atoms only match their
        # own predicate
        if not {a.pred for a in new} & body2_preds:
            continue
        for h2 in find_homomorphisms(r2.body, chased):
            if not h2.apply(r2.body) <= instance.atoms:
                return True
    return False


def rule_dependency_graph(rules: tuple[Rule, ...]) -> RuleDependencyGraph:
    edges = set()
    for r1 in rules:
        for r2 in rules:
            if depends_on(r2, r1):
                edges.add((r1.rid, r2.rid))
    return RuleDependencyGraph(tuple(r.rid for r in rules), frozenset(edges))


# ---------------------------------------------------------------------------
# Greediness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GreedinessReport:
    """Verdict plus per-step evidence.

    ``witnesses[i]`` is the earlier step whose introduced nulls cover step
    i's frontier image (0 when constants and initial nulls suffice).
    ``violations`` lists (step, frontier image) pairs with no such witness.
    """

    greedy: bool
    witnesses: dict[int, int]
    violations: tuple[tuple[int, frozenset[Term]], ...]


def is_greedy(d: Derivation, kb: KnowledgeBase) -> GreedinessReport:
    """Check that each step's frontier image sits inside the nulls introduced
    by one earlier step, plus constants and initial nulls.

    The witness set for step j is the nulls of the atoms j actually added.
    For steps whose head image is disjoint from the prior instance (every
    application in practice) this is exactly the null set of the head image.
    """
    base: set[Term] = set(constants_of(d.initial.atoms))
    for r in kb.rules:
        base |= r.constants()
    base |= nulls_of(d.initial.atoms)
    step_nulls = [nulls_of(d.new_atoms(i)) for i in range(1, len(d) + 1)]

    witnesses: dict[int, int] = {}
    violations: list[tuple[int, frozenset[Term]]] = []
    for i, step in enumerate(d.steps, start=1):
        image = frozenset(step.trigger.hom[v] for v in step.rule.frontier)
        rest = image - base
        if not rest:
            witnesses[i] = 0
            continue
        for j in range(1, i):
            if rest <= step_nulls[j - 1]:
                witnesses[i] = j
                break
        else:
            violations.append((i, image))
    return GreedinessReport(not violations, witnesses, tuple(violations))


# ---------------------------------------------------------------------------
# Permutations and normalization
# ---------------------------------------------------------------------------

def permute_adjacent(d: Derivation, i: int) -> Derivation:
    """Swap steps i and i+1 (1-based); the final instance is unchanged.

    Permutability is checked at the trigger level: step i+1's body match
    must already hold in I_{i-1} (weaker than rule-level independence, and
    exactly what the swap needs), and step i+1's head image may not
    re-derive atoms step i introduced.  Without the second condition the
    swapped intermediate I_{i-1} + (I_{i+1} - I_i) would silently drop the
    re-derived atoms and the steps' introduced-atom sets would no longer be
    a permutation, which can break greediness.
    """
    if not 1 <= i < len(d):
        raise ValueError(f"step index {i} out of range for length {len(d)}")
    earlier = d.instance_at(i - 1)
    mid = d.instance_at(i)
    later = d.instance_at(i + 1)
    step_a, step_b = d.steps[i - 1], d.steps[i]
    if not step_b.trigger.hom.apply(step_b.rule.body) <= earlier.atoms:
        raise NotPermutableError(
            f"step {i + 1} reads atoms produced by step {i}; cannot swap"
        )
    head_image = step_b.trigger.extension.apply(step_b.rule.head)
    if head_image & (mid - earlier):
        raise NotPermutableError(
            f"step {i + 1} re-derives atoms produced by step {i}; cannot swap"
        )
    swapped_first = DerivationStep(step_b.rule, step_b.trigger, earlier | (later - mid))
    swapped_second = DerivationStep(step_a.rule, step_a.trigger, later)
    steps = d.steps[: i - 1] + (swapped_first, swapped_second) + d.steps[i + 1:]
    return Derivation(d.initial, steps)


def normalize_by_grd(d: Derivation, grd: RuleDependencyGraph) -> Derivation:
    """Bubble applications of shallower-layer rules toward the front.

    A stable pass: adjacent steps swap only when the right rule's dependency
    layer is strictly smaller and the trigger-level condition allows it;
    non-permutable pairs stay put.  Terminates because every swap removes a
    layer inversion.
    """
    layers = grd.layers()
    current = d
    changed = True
    while changed:
        changed = False
        for i in range(1, len(current)):
            left = layers[current.steps[i - 1].rule.rid]
            right = layers[current.steps[i].rule.rid]
            if right < left:
                try:
                    current = permute_adjacent(current, i)
                    changed = True
                except NotPermutableError:
                    pass
    return current


# ---------------------------------------------------------------------------
# Greedy re-derivation search
# ---------------------------------------------------------------------------

def find_greedy_rederivation(
    kb: KnowledgeBase,
    target: Instance,
    max_len: int,
    dedup: str = "mod-nulls",
) -> Derivation | None:
    """Shortest greedy derivation of ``target`` (up to null renaming), if any.

    Iterative deepening over the exhaustive enumeration; the first greedy
    derivation whose final instance is isomorphic to the target wins.
    """
    for length in range(max_len + 1):
        for cand in enumerate_derivations(kb.database, kb.rules, length, dedup=dedup):
            if len(cand) != length:
                continue
            if not is_greedy(cand, kb).greedy:
                continue
            if isomorphic_mod_nulls(cand.final, target) is not None:
                return cand
    return None
