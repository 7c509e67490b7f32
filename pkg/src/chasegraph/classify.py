"""Bounded, per-database verdicts for the four derivation-based rule-set classes.

All verdicts are relative to the given database and an enumeration depth:
"holds" means "holds for every derivation of length up to the depth", never
an unbounded claim.  Refutations carry re-checkable certificates; resource
exhaustion is reported as unknown, never as a verdict.

The universal classes quantify over all derivations (greediness for the
greedy bounded-treewidth class, graph reducibility for the cycle-free
derivation-graph class).  The weak variants quantify over derivable
instances up to null renaming and ask for one good derivation each.
"""

from __future__ import annotations

from dataclasses import dataclass

from .analysis import GreedinessReport, find_greedy_rederivation, is_greedy
from .chase import Derivation, chase_k, enumerate_derivations
from .derivgraph import build_derivation_graph
from .errors import ResourceLimitError
from .homs import hom_exists, isomorphic_mod_nulls
from .model import BooleanQuery, Instance, KnowledgeBase
from .reduction import ReductionTrace, reduce_graph

HOLDS = "holds-up-to-depth"
REFUTED = "refuted"
UNKNOWN = "unknown"

CLASSES = ("gbts", "wgbts", "cdgs", "wcdgs")


@dataclass(frozen=True)
class Refutation:
    derivation: Derivation
    reason: str
    greediness: GreedinessReport | None = None
    target: Instance | None = None


@dataclass(frozen=True)
class GroupWitness:
    """One derivable instance (up to null renaming) and its good derivation."""

    target: Instance
    shortest_len: int
    witness: Derivation | None
    trace: ReductionTrace | None = None


@dataclass(frozen=True)
class ClassificationVerdict:
    cls: str
    depth: int
    result: str
    certificate: object = None
    detail: str = ""

    @property
    def holds(self) -> bool:
        return self.result == HOLDS


@dataclass
class _Group:
    target: Instance
    shortest_len: int
    shortest: Derivation


def _bucket_key(inst: Instance) -> tuple:
    """Cheap renaming-invariant key; candidates in one bucket still get a
    full isomorphism check."""
    from .model import Null

    shape = []
    for a in inst.sorted_atoms():
        shape.append((a.pred, tuple("?" if isinstance(t, Null) else t.name for t in a.args)))
    return (tuple(sorted(shape)), len(inst.nulls()))


def _group_instances(kb: KnowledgeBase, depth: int, dedup: str) -> list[_Group]:
    buckets: dict[tuple, list[_Group]] = {}
    ordered: list[_Group] = []
    for d in enumerate_derivations(kb.database, kb.rules, depth, dedup=dedup):
        inst = d.final
        key = _bucket_key(inst)
        group = None
        for g in buckets.get(key, []):
            if isomorphic_mod_nulls(inst, g.target) is not None:
                group = g
                break
        if group is None:
            group = _Group(inst, len(d), d)
            buckets.setdefault(key, []).append(group)
            ordered.append(group)
        elif len(d) < group.shortest_len:
            group.shortest_len = len(d)
            group.shortest = d
    return ordered


def _find_reducible_rederivation(
    kb: KnowledgeBase, target: Instance, max_len: int, dedup: str
) -> tuple[Derivation, ReductionTrace] | None:
    for length in range(max_len + 1):
        for cand in enumerate_derivations(kb.database, kb.rules, length, dedup=dedup):
            if len(cand) != length:
                continue
            if isomorphic_mod_nulls(cand.final, target) is None:
                continue
            trace = reduce_graph(build_derivation_graph(cand, kb), "full")
            if trace is not None:
                return cand, trace
    return None


def classify(
    kb: KnowledgeBase,
    cls: str,
    depth: int,
    dedup: str = "mod-nulls",
    rederivation_bound: str = "shortest",
) -> ClassificationVerdict:
    """Bounded membership verdict for one class.

    gbts: every derivation up to the depth is greedy.
    cdgs: every derivation's graph reduces to a cycle-free graph.
    wgbts: every derivable instance has a greedy derivation (searched up to
      the shortest recorded length for that instance, or the full depth when
      ``rederivation_bound="depth"``).
    wcdgs: every derivable instance has some derivation with a reducible graph.
    """
    if cls not in CLASSES:
        raise ValueError(f"unknown class {cls!r}")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if rederivation_bound not in ("shortest", "depth"):
        raise ValueError(f"unknown rederivation bound {rederivation_bound!r}")
    try:
        if cls == "gbts":
            for d in enumerate_derivations(kb.database, kb.rules, depth, dedup=dedup):
                report = is_greedy(d, kb)
                if not report.greedy:
                    cert = Refutation(d, "non-greedy derivation", greediness=report)
                    return ClassificationVerdict(
                        cls, depth, REFUTED, cert,
                        f"violation at step {report.violations[0][0]}",
                    )
            return ClassificationVerdict(cls, depth, HOLDS)

        if cls == "cdgs":
            for d in enumerate_derivations(kb.database, kb.rules, depth, dedup=dedup):
                if reduce_graph(build_derivation_graph(d, kb), "full") is None:
                    cert = Refutation(d, "derivation graph admits no complete reduction")
                    return ClassificationVerdict(cls, depth, REFUTED, cert)
            return ClassificationVerdict(cls, depth, HOLDS)

        groups = _group_instances(kb, depth, dedup)
        witnesses: list[GroupWitness] = []
        for grp in groups:
            bound = grp.shortest_len if rederivation_bound == "shortest" else depth
            if cls == "wgbts":
                w = find_greedy_rederivation(kb, grp.target, bound, dedup=dedup)
                if w is None:
                    cert = Refutation(
                        grp.shortest, "instance admits no greedy derivation",
                        target=grp.target,
                    )
                    return ClassificationVerdict(cls, depth, REFUTED, cert)
                witnesses.append(GroupWitness(grp.target, grp.shortest_len, w))
            else:  # wcdgs
                found = _find_reducible_rederivation(kb, grp.target, bound, dedup)
                if found is None:
                    cert = Refutation(
                        grp.shortest, "no derivation of the instance has a reducible graph",
                        target=grp.target,
                    )
                    return ClassificationVerdict(cls, depth, REFUTED, cert)
                w, trace = found
                witnesses.append(GroupWitness(grp.target, grp.shortest_len, w, trace))
        return ClassificationVerdict(cls, depth, HOLDS, tuple(witnesses))
    except ResourceLimitError as exc:
        return ClassificationVerdict(cls, depth, UNKNOWN, detail=str(exc))


@dataclass(frozen=True)
class SubsumptionReport:
    verdicts: dict[str, ClassificationVerdict]
    implications: tuple[tuple[str, bool], ...]

    @property
    def ok(self) -> bool:
        return all(good for _, good in self.implications)


def subsumption_check(kb: KnowledgeBase, depth: int, dedup: str = "mod-nulls") -> SubsumptionReport:
    """Cross-validate the four verdicts on one enumeration.

    The universal class must imply its weak variant, and the greediness
    pipeline must agree with the reduction pipeline outright; a failed
    implication is a bug in exactly one of the two pipelines.
    """
    v = {cls: classify(kb, cls, depth, dedup=dedup) for cls in CLASSES}
    implications = (
        ("gbts-holds implies wgbts-holds", (not v["gbts"].holds) or v["wgbts"].holds),
        ("cdgs-holds implies wcdgs-holds", (not v["cdgs"].holds) or v["wcdgs"].holds),
        ("gbts verdict equals cdgs verdict", v["gbts"].result == v["cdgs"].result),
        ("wgbts verdict equals wcdgs verdict", v["wgbts"].result == v["wcdgs"].result),
    )
    return SubsumptionReport(v, implications)


@dataclass(frozen=True)
class EntailmentResult:
    entailed: bool
    at_depth: int | None = None

    def __bool__(self) -> bool:
        return self.entailed


def entails(kb: KnowledgeBase, q: BooleanQuery, depth: int) -> EntailmentResult:
    """Sound bounded entailment: search the query in the k-level saturation
    for the least k up to the depth.  A negative answer is only "unknown at
    this depth"."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    current = kb.database
    for k in range(depth + 1):
        if hom_exists(q.atoms, current):
            return EntailmentResult(True, k)
        if k < depth:
            current = chase_k(current, kb.rules, 1)
    return EntailmentResult(False)
