"""Brute-force oracles, deliberately independent of the engine's search paths.

The homomorphism oracle enumerates every assignment of the source's
non-constant terms; the dependence oracle enumerates every instance over
the two rules' body predicates on a small constant universe (up to
renaming of the fresh constants) and checks the new-trigger condition on
each.  Both are only usable at desk scale.
"""

from __future__ import annotations

import itertools

from chasegraph.analysis import _rename_apart, _witnesses_dependence
from chasegraph.model import (
    Atom,
    Constant,
    Instance,
    Rule,
    Substitution,
    term_key,
    variables_of,
)


def brute_force_homomorphisms(source, target: Instance) -> list[Substitution]:
    mappable = sorted(
        {t for a in source for t in a.args if not isinstance(t, Constant)},
        key=term_key,
    )
    pool = sorted(target.terms(), key=term_key)
    found = []
    for combo in itertools.product(pool, repeat=len(mappable)):
        sub = Substitution(dict(zip(mappable, combo)))
        if sub.apply(source) <= target.atoms:
            found.append(sub)
    found.sort(key=Substitution.key)
    return found


def brute_force_depends_on(r2: Rule, r1: Rule, max_fresh: int = 3) -> bool:
    """Exhaustive search for an instance where applying r1 newly triggers r2.

    Instances range over the predicates of the two bodies, with at most
    |body(r1)| + |body(r2)| atoms over min(max_fresh, total body variables)
    fresh constants plus the rules' own constants.  Instances differing only
    by a permutation of the fresh constants are checked once.
    """
    r2 = _rename_apart(r2, variables_of(r1.body) | variables_of(r1.head))
    n_fresh = min(max_fresh, len(variables_of(r1.body)) + len(variables_of(r2.body)))
    fresh = [Constant(f"_u{i}") for i in range(n_fresh)]
    consts = sorted(r1.constants() | r2.constants(), key=term_key) + fresh

    preds = sorted({(a.pred, len(a.args)) for a in r1.body | r2.body})
    atoms: list[Atom] = []
    for pred, arity in preds:
        for args in itertools.product(consts, repeat=arity):
            atoms.append(Atom(pred, args))

    # permutations of the fresh constants as atom-index maps
    perms = []
    atom_index = {a: i for i, a in enumerate(atoms)}
    for perm in itertools.permutations(fresh):
        table = dict(zip(fresh, perm))
        mapped = [
            atom_index[Atom(a.pred, tuple(table.get(t, t) for t in a.args))]
            for a in atoms
        ]
        perms.append(mapped)

    pred_bit = {p: 1 << i for i, (p, _) in enumerate(preds)}
    atom_bits = [pred_bit[a.pred] for a in atoms]
    need_mask = 0
    for a in r1.body:
        need_mask |= pred_bit[a.pred]

    max_atoms = len(r1.body) + len(r2.body)
    for size in range(max_atoms + 1):
        for combo in itertools.combinations(range(len(atoms)), size):
            mask = 0
            for i in combo:
                mask |= atom_bits[i]
            if mask & need_mask != need_mask:
                continue
            canonical = min(tuple(sorted(p[i] for i in combo)) for p in perms)
            if canonical != combo:
                continue
            instance = Instance(atoms[i] for i in combo)
            if _witnesses_dependence(instance, r1, r2):
                return True
    return False
