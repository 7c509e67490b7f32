import pytest

from chasegraph.derivgraph import build_derivation_graph
from chasegraph.errors import ResourceLimitError, SideConditionViolatedError
from chasegraph.reduction import (
    ArStep,
    CrStep,
    TrStep,
    apply_ar,
    apply_cr,
    apply_step,
    apply_tr,
    check_prefix_invariants,
    is_cycle_free,
    reduce_graph,
)
from conftest import chain_nulls


@pytest.fixture
def golden(chain_kb, chain_derivation):
    g = build_derivation_graph(chain_derivation, chain_kb)
    z0, z1 = chain_nulls(chain_derivation)
    return g, z0, z1


def test_tr_removes_shared_term(golden):
    g, z0, z1 = golden
    reduced = apply_tr(g, 2, 1, 3, z0)  # drop z0 from the arc (X1, X3)
    assert reduced.label(1, 3) == frozenset()
    assert reduced.label(2, 3) == {z0, z1}
    assert reduced.at == g.at  # decorations untouched


def test_tr_symmetric_choice(golden):
    g, z0, z1 = golden
    other = apply_tr(g, 1, 2, 3, z0)  # legal with roles swapped: removes from (X2, X3)
    assert other.label(2, 3) == {z1}
    assert other.label(1, 3) == {z0}


def test_tr_side_conditions(golden):
    g, z0, z1 = golden
    with pytest.raises(SideConditionViolatedError):
        apply_tr(g, 1, 1, 3, z0)  # parents must differ
    with pytest.raises(SideConditionViolatedError):
        apply_tr(g, 2, 1, 3, z1)  # z1 not shared by both labels
    with pytest.raises(SideConditionViolatedError):
        apply_tr(g, 0, 1, 2, z0)  # (0, 2) is not an arc


def test_ar_removes_empty_labeled_arc(golden):
    g, z0, _ = golden
    reduced = apply_ar(g, 0, 1)
    assert (0, 1) not in reduced.arcs
    with pytest.raises(SideConditionViolatedError):
        apply_ar(g, 1, 2)  # label {z0} is not empty
    with pytest.raises(SideConditionViolatedError):
        apply_ar(g, 0, 4)  # no such arc


def test_cr_redirects_converging_arcs(golden):
    g, z0, z1 = golden
    after_tr = apply_tr(g, 2, 1, 3, z0)
    after_ar = apply_ar(after_tr, 1, 3)
    after_cr = apply_cr(after_ar, 2, 3, 4, 2)
    assert after_cr.label(2, 4) == {z0, z1}
    assert (3, 4) not in after_cr.arcs
    assert is_cycle_free(after_cr)


def test_cr_directly_on_golden_graph(golden):
    g, z0, z1 = golden
    reduced = apply_cr(g, 1, 2, 3, 2)  # {z0} | {z0,z1} covered by terms(X2)
    assert reduced.label(2, 3) == {z0, z1}
    assert (1, 3) not in reduced.arcs


def test_cr_side_conditions(golden):
    g, z0, z1 = golden
    with pytest.raises(SideConditionViolatedError):
        apply_cr(g, 2, 3, 4, 4)  # witness must be earlier than the target
    with pytest.raises(SideConditionViolatedError):
        apply_cr(g, 2, 3, 4, 0)  # terms(X0) lack z0, z1
    with pytest.raises(SideConditionViolatedError):
        apply_cr(g, 2, 2, 4, 2)  # arcs must be distinct


def test_cycle_free_judgments(golden, chain_kb):
    g, *_ = golden
    assert not is_cycle_free(g)
    from chasegraph.chase import Derivation

    single = build_derivation_graph(Derivation(chain_kb.database), chain_kb)
    assert is_cycle_free(single)


def test_reduce_cr_only_trace(golden):
    g, z0, z1 = golden
    trace = reduce_graph(g, "cr-only")
    assert trace is not None
    assert trace.steps == (CrStep(1, 2, 3, 2), CrStep(2, 3, 4, 2))
    assert is_cycle_free(trace.final)
    trace.replay()


def test_reduce_full_succeeds_and_replays(golden):
    g, *_ = golden
    trace = reduce_graph(g, "full")
    assert trace is not None and is_cycle_free(trace.final)
    trace.replay()


def test_replayed_step_sequence_is_a_valid_full_trace(golden):
    g, z0, z1 = golden
    seq = [TrStep(2, 1, 3, z0), ArStep(1, 3), CrStep(2, 3, 4, 2)]
    cur = g
    for step in seq:
        cur = apply_step(cur, step)
    assert is_cycle_free(cur)
    assert cur.label(2, 4) == {z0, z1}


def test_nongreedy_graph_is_irreducible(join_kb, nongreedy_join_derivation):
    g = build_derivation_graph(nongreedy_join_derivation, join_kb)
    assert reduce_graph(g, "cr-only") is None
    assert reduce_graph(g, "full") is None


def test_greedy_graph_reduces_both_ways(join_kb, greedy_join_derivation):
    g = build_derivation_graph(greedy_join_derivation, join_kb)
    for strategy in ("cr-only", "full"):
        trace = reduce_graph(g, strategy)
        assert trace is not None and is_cycle_free(trace.final)
        assert check_prefix_invariants(trace).ok


def test_greedy_iff_reducible_exhaustive_on_join_kb(join_kb):
    from chasegraph.analysis import is_greedy
    from chasegraph.chase import enumerate_derivations

    nongreedy_seen = 0
    for d in enumerate_derivations(join_kb.database, join_kb.rules, 3, dedup="mod-nulls"):
        g = build_derivation_graph(d, join_kb)
        greedy = is_greedy(d, join_kb).greedy
        nongreedy_seen += not greedy
        assert greedy == (reduce_graph(g, "cr-only") is not None)
        assert greedy == (reduce_graph(g, "full") is not None)
    assert nongreedy_seen > 0  # the crossing join occurs from length 3 on


def test_reduce_full_state_cap(join_kb, nongreedy_join_derivation):
    g = build_derivation_graph(nongreedy_join_derivation, join_kb)
    with pytest.raises(ResourceLimitError):
        reduce_graph(g, "full", max_states=2)


def test_reductions_only_touch_arcs(golden):
    g, z0, _ = golden
    for reduced in (apply_tr(g, 2, 1, 3, z0), apply_ar(g, 0, 1), apply_cr(g, 1, 2, 3, 2)):
        assert reduced.at == g.at
        assert reduced.provenance == g.provenance
        assert len(reduced) == len(g)
        assert all(i < j for (i, j) in reduced.arcs)


def test_prefix_invariants_on_replayed_trace(golden):
    g, z0, _ = golden
    from chasegraph.reduction import ReductionTrace

    seq = (TrStep(2, 1, 3, z0), ArStep(1, 3), CrStep(2, 3, 4, 2))
    graphs = [g]
    for step in seq:
        graphs.append(apply_step(graphs[-1], step))
    trace = ReductionTrace(g, seq, tuple(graphs))
    report = check_prefix_invariants(trace)
    assert report.ok, report.failures


def test_prefix_invariants_on_empty_trace(golden):
    g, *_ = golden
    from chasegraph.reduction import ReductionTrace

    trace = ReductionTrace(g, (), (g,))
    report = check_prefix_invariants(trace)
    # the unreduced graph satisfies (a) and (b); (c) is only checked for
    # complete traces and this one is not complete
    assert report.frontier_matches and report.labels_covered


def test_prefix_invariants_on_cr_only_trace(golden):
    g, *_ = golden
    trace = reduce_graph(g, "cr-only")
    report = check_prefix_invariants(trace)
    assert report.ok, report.failures


def test_replay_detects_tampering(golden):
    g, *_ = golden
    trace = reduce_graph(g, "cr-only")
    from chasegraph.reduction import ReductionTrace

    broken = ReductionTrace(g, trace.steps, (g,) + trace.graphs[:-1])
    with pytest.raises(ValueError):
        broken.replay()
