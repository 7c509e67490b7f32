import random

import pytest

from chasegraph.analysis import is_greedy
from chasegraph.classify import (
    HOLDS,
    REFUTED,
    UNKNOWN,
    Refutation,
    classify,
    entails,
    subsumption_check,
)
from chasegraph.derivgraph import build_derivation_graph
from chasegraph.homs import isomorphic_mod_nulls
from chasegraph.model import Atom, BooleanQuery, Instance, KnowledgeBase
from chasegraph.randkb import random_kb
from chasegraph.reduction import reduce_graph

from conftest import A, X, Y, Z


def test_gbts_refuted_with_reverifiable_certificate(join_kb):
    verdict = classify(join_kb, "gbts", 4)
    assert verdict.result == REFUTED
    cert = verdict.certificate
    assert isinstance(cert, Refutation)
    cert.derivation.validate()
    report = is_greedy(cert.derivation, join_kb)
    assert not report.greedy
    assert report.violations == cert.greediness.violations


def test_gbts_refuted_already_at_depth_three(join_kb):
    # a two-producer join shows up from length 3 on
    assert classify(join_kb, "gbts", 3).result == REFUTED


def test_cdgs_refutation_certificate_reverifies(join_kb):
    verdict = classify(join_kb, "cdgs", 4)
    assert verdict.result == REFUTED
    g = build_derivation_graph(verdict.certificate.derivation, join_kb)
    assert reduce_graph(g, "full") is None


def test_weak_classes_hold_at_depth_three(join_kb):
    assert classify(join_kb, "wgbts", 3).result == HOLDS
    assert classify(join_kb, "wcdgs", 3).result == HOLDS


def test_wgbts_witnesses_reverify_at_depth_three(join_kb):
    verdict = classify(join_kb, "wgbts", 3)
    assert verdict.result == HOLDS
    for witness in verdict.certificate:
        witness.witness.validate()
        assert is_greedy(witness.witness, join_kb).greedy
        assert isomorphic_mod_nulls(witness.witness.final, witness.target) is not None


def test_wgbts_refuted_at_depth_four_by_shared_producer_instance(join_kb):
    # Two joins against the same s-atom but different q-atoms: under strict
    # fresh-null derivations no greedy derivation of that instance exists at
    # any length, so the bounded weak verdicts flip at depth 4.  The
    # derivation-graph pipeline must flip with them (the verdict equality is
    # the point of the cross-check).  See the decisions ledger.
    wgbts = classify(join_kb, "wgbts", 4)
    wcdgs = classify(join_kb, "wcdgs", 4)
    assert wgbts.result == REFUTED
    assert wcdgs.result == REFUTED
    cert = wgbts.certificate
    counts = sorted(a.pred for a in cert.target - join_kb.database)
    assert counts == ["q", "q", "s", "t", "t"]
    # the refutation is honest: the recorded shortest derivation really
    # derives the target and is non-greedy
    cert.derivation.validate()
    assert isomorphic_mod_nulls(cert.derivation.final, cert.target) is not None
    assert not is_greedy(cert.derivation, join_kb).greedy


def test_chain_universal_verdicts_agree(chain_kb):
    gbts = classify(chain_kb, "gbts", 4)
    cdgs = classify(chain_kb, "cdgs", 4)
    assert gbts.result == cdgs.result == HOLDS


def test_subsumption_depth_three(join_kb):
    report = subsumption_check(join_kb, 3)
    assert report.ok
    assert report.verdicts["gbts"].result == REFUTED
    assert report.verdicts["cdgs"].result == REFUTED
    assert report.verdicts["wgbts"].result == HOLDS
    assert report.verdicts["wcdgs"].result == HOLDS


def test_subsumption_trivial_for_empty_rule_set():
    kb = KnowledgeBase(Instance({Atom("p", (A,))}), ())
    report = subsumption_check(kb, 2)
    assert report.ok
    assert all(v.result == HOLDS for v in report.verdicts.values())


def test_subsumption_never_violated_on_random_kbs():
    rng = random.Random(99)
    checked = 0
    while checked < 12:
        kb = random_kb(rng)
        try:
            report = subsumption_check(kb, 2)
        except Exception:
            continue
        if any(v.result == UNKNOWN for v in report.verdicts.values()):
            continue
        assert report.ok, report.implications
        checked += 1


def test_classify_rejects_bad_arguments(join_kb):
    with pytest.raises(ValueError):
        classify(join_kb, "nonsense", 2)
    with pytest.raises(ValueError):
        classify(join_kb, "gbts", 0)


def test_entailment_examples(join_kb, chain_kb):
    q_join = BooleanQuery(frozenset({Atom("q", (X, Y, Z))}))
    res = entails(join_kb, q_join, 1)
    assert res.entailed and res.at_depth == 1

    q_chain = BooleanQuery(frozenset({Atom("t", (X, Y))}))
    res = entails(chain_kb, q_chain, 4)
    assert res.entailed and res.at_depth <= 4

    unused = BooleanQuery(frozenset({Atom("u", (X,))}))
    assert not entails(join_kb, unused, 3).entailed


def test_entailment_depth_is_minimal_and_monotone(chain_kb):
    q = BooleanQuery(frozenset({Atom("t", (X, Y))}))
    first = entails(chain_kb, q, 4).at_depth
    for deeper in range(first, 5):
        res = entails(chain_kb, q, deeper)
        assert res.entailed and res.at_depth == first


def test_entailment_of_database_atom_at_depth_zero(join_kb):
    q = BooleanQuery(frozenset({Atom("p", (X,))}))
    res = entails(join_kb, q, 0)
    assert res.entailed and res.at_depth == 0
