"""Backtracking homomorphism search between atom sets.

A homomorphism fixes every constant and maps the remaining terms of the
source (variables and nulls alike) onto terms of the target so that every
source atom lands on a target atom.  The search is plain backtracking with
two deterministic choices: the next atom to resolve is the one with the
fewest remaining candidate matches, and candidates are tried in term order.
Determinism matters because trigger enumeration order downstream fixes
derivation identifiers.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    Atom,
    Constant,
    Instance,
    Null,
    Rule,
    Substitution,
    Term,
    atom_key,
    nulls_of,
)


@dataclass(frozen=True)
class HomSearchProblem:
    source: frozenset[Atom]
    target: Instance
    seed: Substitution

    def __post_init__(self):
        src_terms = {t for a in self.source for t in a.args}
        for k in self.seed.mapping:
            if k not in src_terms:
                raise ValueError(f"seed binds {k}, which does not occur in the source")


def _index_by_pred(target: Instance) -> dict[tuple[str, int], list[Atom]]:
    index: dict[tuple[str, int], list[Atom]] = {}
    for a in target.sorted_atoms():
        index.setdefault((a.pred, len(a.args)), []).append(a)
    return index


def _match_atom(src: Atom, tgt: Atom, binding: dict[Term, Term]) -> dict[Term, Term] | None:
    """Extend ``binding`` so that src maps onto tgt, or return None."""
    new: dict[Term, Term] = {}
    for s, t in zip(src.args, tgt.args):
        if isinstance(s, Constant):
            if s != t:
                return None
            continue
        bound = binding.get(s) or new.get(s)
        if bound is None:
            new[s] = t
        elif bound != t:
            return None
    return new


def find_homomorphisms(
    source: frozenset[Atom] | set[Atom],
    target: Instance,
    seed: Substitution | None = None,
    limit: int | None = None,
) -> list[Substitution]:
    """All extensions of ``seed`` mapping ``source`` into ``target``.

    Returns the empty list when no homomorphism exists.  Without ``limit``
    the list is complete and sorted canonically; with a limit it holds the
    first matches in (deterministic) search order, sorted.
    """
    source = frozenset(source)
    seed = seed or Substitution()
    index = _index_by_pred(target)
    atoms = sorted(source, key=atom_key)
    results: list[Substitution] = []

    def candidates(a: Atom, binding: dict[Term, Term]) -> list[Atom]:
        pool = index.get((a.pred, len(a.args)), [])
        return [t for t in pool if _match_atom(a, t, binding) is not None]

    def search(remaining: list[Atom], binding: dict[Term, Term]) -> bool:
        """Return True when the requested number of results has been found."""
        if not remaining:
            results.append(Substitution(binding))
            return limit is not None and len(results) >= limit
        ranked = sorted(
            ((len(candidates(a, binding)), i, a) for i, a in enumerate(remaining)),
            key=lambda x: (x[0], x[1]),
        )
        _, pick_i, pick = ranked[0]
        rest = remaining[:pick_i] + remaining[pick_i + 1:]
        for tgt in candidates(pick, binding):
            ext = _match_atom(pick, tgt, binding)
            if ext is None:
                continue
            binding.update(ext)
            if search(rest, binding):
                return True
            for k in ext:
                del binding[k]
        return False

    search(atoms, dict(seed.mapping))
    results.sort(key=Substitution.key)
    return results


def hom_exists(source, target: Instance, seed: Substitution | None = None) -> bool:
    return bool(find_homomorphisms(source, target, seed=seed, limit=1))


def satisfies_rule(instance: Instance, r: Rule) -> bool:
    """True iff every body match extends to a head match within the instance."""
    for h in find_homomorphisms(r.body, instance):
        head_seed = h.restrict(r.frontier)
        if not hom_exists(r.head, instance, seed=head_seed):
            return False
    return True


def hom_equivalent(a: Instance, b: Instance) -> bool:
    """True iff homomorphisms exist in both directions (nulls act as variables)."""
    return hom_exists(a.atoms, b) and hom_exists(b.atoms, a)


def isomorphic_mod_nulls(a: Instance, b: Instance) -> Substitution | None:
    """A bijective null renaming turning ``a`` into exactly ``b``, if any.

    Constants stay fixed, so two instances can only be isomorphic when they
    agree on their null-free atoms and share the same atom count.
    """
    if len(a) != len(b):
        return None
    a_nulls = sorted(nulls_of(a.atoms), key=lambda n: n.ordinal)
    b_nulls = nulls_of(b.atoms)
    if len(a_nulls) != len(b_nulls):
        return None
    ground_a = frozenset(x for x in a if not nulls_of([x]))
    ground_b = frozenset(x for x in b if not nulls_of([x]))
    if ground_a != ground_b:
        return None

    b_atoms = b.atoms

    def solve(i: int, binding: dict[Term, Term], used: set[Null]) -> dict[Term, Term] | None:
        if i == len(a_nulls):
            image = {Substitution(binding).apply_atom(x) for x in a}
            return binding if image == b_atoms else None
        n = a_nulls[i]
        for m in sorted(b_nulls - used, key=lambda x: x.ordinal):
            binding[n] = m
            used.add(m)
            # prune: every atom fully renamed so far must exist in b
            ok = True
            sub = Substitution(binding)
            for x in a:
                xs = nulls_of([x])
                if xs and xs <= set(binding):
                    if sub.apply_atom(x) not in b_atoms:
                        ok = False
                        break
            if ok:
                found = solve(i + 1, binding, used)
                if found is not None:
                    return found
            del binding[n]
            used.discard(m)
        return None

    found = solve(0, {}, set())
    return Substitution(found) if found is not None else None
