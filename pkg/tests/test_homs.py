import pytest
from hypothesis import given, settings, strategies as st

from chasegraph.homs import (
    HomSearchProblem,
    find_homomorphisms,
    hom_equivalent,
    isomorphic_mod_nulls,
    satisfies_rule,
)
from chasegraph.model import (
    Atom,
    Constant,
    Instance,
    Null,
    Rule,
    Substitution,
    Variable,
)

from conftest import A, B, X, Y
from oracles import brute_force_homomorphisms


def test_single_match():
    target = Instance({Atom("p", (A,)), Atom("r", (B,))})
    assert find_homomorphisms({Atom("p", (X,))}, target) == [Substitution({X: A})]


def test_no_unifier_when_variable_repeats():
    target = Instance({Atom("t", (A, B))})
    assert find_homomorphisms({Atom("t", (X, X))}, target) == []


def test_join_body_match_found(join_kb, nongreedy_join_derivation):
    # the recorded join match must be among all matches into I3
    d = nongreedy_join_derivation
    i3 = d.instance_at(3)
    body = join_kb.rule_by_id("r4").body
    homs = find_homomorphisms(body, i3)
    assert d.steps[3].trigger.hom in homs
    # two q-atoms x one s-atom
    assert len(homs) == 2


def test_results_extend_seed_and_map_into_target():
    target = Instance({Atom("e", (A, B)), Atom("e", (B, A))})
    seed = Substitution({X: A})
    for h in find_homomorphisms({Atom("e", (X, Y))}, target, seed=seed):
        assert h[X] == A
        assert h.apply({Atom("e", (X, Y))}) <= target.atoms


def test_seed_outside_source_rejected():
    with pytest.raises(ValueError):
        HomSearchProblem(frozenset({Atom("p", (X,))}), Instance(), Substitution({Y: A}))


def test_limit_returns_prefix_of_search():
    target = Instance({Atom("p", (Constant(c),)) for c in "abcde"})
    assert len(find_homomorphisms({Atom("p", (X,))}, target, limit=2)) == 2
    assert len(find_homomorphisms({Atom("p", (X,))}, target)) == 5


def test_satisfies_rule_examples(join_kb):
    r1 = join_kb.rule_by_id("r1")
    assert not satisfies_rule(join_kb.database, r1)  # p(a) matched, no q-atom
    n1, n2 = Null(2001), Null(2002)
    saturated = join_kb.database | {Atom("q", (A, n1, n2))}
    assert satisfies_rule(saturated, r1)
    vacuous = Rule("v", frozenset({Atom("missing", (X,))}), frozenset({Atom("p", (X,))}))
    assert satisfies_rule(join_kb.database, vacuous)


def test_hom_equivalent_examples():
    one = Instance({Atom("q", (A, Null(1), Null(2)))})
    two = Instance({Atom("q", (A, Null(3), Null(4))), Atom("q", (A, Null(5), Null(6)))})
    assert hom_equivalent(one, one)
    assert hom_equivalent(one, two)
    assert not hom_equivalent(Instance({Atom("p", (A,))}), Instance({Atom("p", (B,))}))


def test_isomorphic_mod_nulls_examples():
    left = Instance({Atom("q", (A, Null(1), Null(2)))})
    right = Instance({Atom("q", (A, Null(7), Null(9)))})
    ren = isomorphic_mod_nulls(left, right)
    assert ren is not None
    assert ren.apply(left.atoms) == right.atoms
    shared = Instance({Atom("q", (A, Null(1), Null(1)))})
    split = Instance({Atom("q", (A, Null(2), Null(3)))})
    assert isomorphic_mod_nulls(shared, split) is None
    assert isomorphic_mod_nulls(split, shared) is None


def test_isomorphic_implies_hom_equivalent():
    left = Instance({Atom("e", (Null(1), Null(2))), Atom("e", (Null(2), Null(1)))})
    right = Instance({Atom("e", (Null(5), Null(4))), Atom("e", (Null(4), Null(5)))})
    assert isomorphic_mod_nulls(left, right) is not None
    assert hom_equivalent(left, right)


def test_same_final_instance_of_two_runs_identical_mod_nulls(
    join_kb, nongreedy_join_derivation, greedy_join_derivation
):
    assert isomorphic_mod_nulls(
        nongreedy_join_derivation.final, greedy_join_derivation.final
    ) is not None


_consts = [Constant(c) for c in "ab"]
_nulls = [Null(9000 + i) for i in range(3)]
_vars = [Variable(v) for v in "XYZ"]

ground_terms = st.sampled_from(_consts + _nulls)
ground_atoms = st.builds(
    lambda p, args: Atom(p, tuple(args)),
    st.sampled_from("pq"),
    st.lists(ground_terms, min_size=1, max_size=2),
)
pattern_atoms = st.builds(
    lambda p, args: Atom(p, tuple(args)),
    st.sampled_from("pq"),
    st.lists(st.sampled_from(_consts + _vars), min_size=1, max_size=2),
)


@settings(max_examples=150, deadline=None)
@given(st.sets(pattern_atoms, min_size=1, max_size=3), st.sets(ground_atoms, max_size=6))
def test_search_agrees_with_brute_force(source, target_atoms):
    # arity consistency within one generated problem
    arities: dict[str, int] = {}
    for a in list(source) + list(target_atoms):
        if arities.setdefault(a.pred, a.arity) != a.arity:
            return
    target = Instance(target_atoms)
    fast = find_homomorphisms(source, target)
    slow = brute_force_homomorphisms(source, target)
    assert fast == slow


def test_search_agrees_with_brute_force_on_recorded_instances(
    join_kb, nongreedy_join_derivation
):
    body = join_kb.rule_by_id("r4").body
    target = nongreedy_join_derivation.final
    assert find_homomorphisms(body, target) == brute_force_homomorphisms(body, target)
