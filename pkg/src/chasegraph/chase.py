"""Rule application, bounded saturation, and exhaustive derivation enumeration.

A trigger is a homomorphism from a rule body into the current instance.
Applying it extends the instance with the head image, where each
existential variable is sent to a fresh null.  Derivations record the whole
history (trigger, extension, resulting instance per step) so that
greediness analysis and derivation graphs can be computed after the fact.

The one-step operator applies *all* triggers of *all* rules in parallel
with pairwise-distinct fresh nulls; iterating it k times gives the k-level
saturation used for (sound, bounded) entailment checking.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import NotTriggeredError, ResourceLimitError
from .homs import find_homomorphisms
from .model import (
    Atom,
    Instance,
    Null,
    Rule,
    Substitution,
    fresh_null,
    nulls_of,
    term_key,
)

DEFAULT_MAX_ATOMS = 10**5
DEFAULT_MAX_DERIVATIONS = 10**6


@dataclass(frozen=True)
class Trigger:
    """A rule body match plus its recorded head extension.

    ``hom`` maps exactly the body variables; ``extension`` additionally maps
    each existential head variable to the fresh null it received.
    """

    rule_id: str
    hom: Substitution
    extension: Substitution


@dataclass(frozen=True)
class DerivationStep:
    rule: Rule
    trigger: Trigger
    result: Instance


@dataclass(frozen=True)
class Derivation:
    """A sequence I0, (rule_1, h_1, I1), ..., (rule_n, h_n, In)."""

    initial: Instance
    steps: tuple[DerivationStep, ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def final(self) -> Instance:
        return self.steps[-1].result if self.steps else self.initial

    def instance_at(self, i: int) -> Instance:
        """The instance after step i (i = 0 gives the initial instance)."""
        return self.initial if i == 0 else self.steps[i - 1].result

    def new_atoms(self, i: int) -> frozenset[Atom]:
        """Atoms introduced by step i (1-based)."""
        return self.steps[i - 1].result - self.instance_at(i - 1)

    def extend(self, r: Rule, hom: Substitution) -> "Derivation":
        prev = self.final
        result, trig = apply_rule(prev, r, hom)
        return Derivation(self.initial, self.steps + (DerivationStep(r, trig, result),))

    def rule_ids(self) -> tuple[str, ...]:
        return tuple(s.rule.rid for s in self.steps)

    def validate(self) -> None:
        """Raise ValueError unless every step invariant holds."""
        for i, step in enumerate(self.steps, start=1):
            prev = self.instance_at(i - 1)
            r = step.rule
            hom, ext = step.trigger.hom, step.trigger.extension
            if step.trigger.rule_id != r.rid:
                raise ValueError(f"step {i}: trigger names rule {step.trigger.rule_id}")
            if set(hom.mapping) != set(r.body_vars):
                raise ValueError(f"step {i}: trigger domain is not vars(body)")
            if not hom.apply(r.body) <= prev.atoms:
                raise ValueError(f"step {i}: trigger does not map the body into I{i-1}")
            if ext.restrict(r.body_vars) != hom:
                raise ValueError(f"step {i}: extension disagrees with trigger on body vars")
            fresh = [ext[z] for z in sorted(r.existentials, key=term_key)]
            if len(set(fresh)) != len(fresh) or not all(isinstance(n, Null) for n in fresh):
                raise ValueError(f"step {i}: existential images are not distinct nulls")
            if any(n in prev.terms() for n in fresh):
                raise ValueError(f"step {i}: fresh null already occurs earlier")
            if step.result != prev | ext.apply(r.head):
                raise ValueError(f"step {i}: result is not I{i-1} plus the head image")


def triggers(instance: Instance, r: Rule) -> list[Substitution]:
    """All homomorphisms from the rule body into the instance, in canonical order."""
    return find_homomorphisms(r.body, instance)


def apply_rule(instance: Instance, r: Rule, hom: Substitution) -> tuple[Instance, Trigger]:
    """One rule application: I plus the head image under the extended match.

    The extension sends each existential variable to a fresh null; the
    returned trigger records it so the step can be replayed or audited.
    """
    hom = hom.restrict(r.body_vars)
    if not hom.apply(r.body) <= instance.atoms:
        raise NotTriggeredError(f"{r.rid}: homomorphism {hom} is not a trigger")
    ext = hom.extend({z: fresh_null() for z in sorted(r.existentials, key=term_key)})
    result = instance | ext.apply(r.head)
    return result, Trigger(r.rid, hom, ext)


def one_step(instance: Instance, rules: Sequence[Rule]) -> Instance:
    """Parallel application of every trigger of every rule, fresh nulls distinct."""
    added: set[Atom] = set()
    for r in rules:
        for hom in triggers(instance, r):
            ext = hom.extend({z: fresh_null() for z in sorted(r.existentials, key=term_key)})
            added |= ext.apply(r.head)
    return instance | added


def chase_levels(
    db: Instance,
    rules: Sequence[Rule],
    k: int,
    max_atoms: int = DEFAULT_MAX_ATOMS,
) -> list[Instance]:
    """The saturation chain [db, Ch1(db), ..., Chk(db)] of one run.

    Within one run each level contains the previous; across runs the fresh
    nulls differ, so monotonicity only makes sense level-to-level here.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    levels = [db]
    for _ in range(k):
        levels.append(one_step(levels[-1], rules))
        if len(levels[-1]) > max_atoms:
            raise ResourceLimitError(f"saturation exceeded {max_atoms} atoms")
    return levels


def chase_k(
    db: Instance,
    rules: Sequence[Rule],
    k: int,
    max_atoms: int = DEFAULT_MAX_ATOMS,
) -> Instance:
    """The k-level saturation: one_step iterated k times from db."""
    return chase_levels(db, rules, k, max_atoms)[-1]


def derivation_key(d: Derivation) -> tuple:
    """A canonical key equal for two derivations iff they differ only by a
    null renaming (the renaming is forced: step-aligned triggers determine
    where each null must go, and fresh nulls are allocated in sorted
    existential-variable order)."""
    dense: dict[Null, int] = {}

    def render(t) -> tuple:
        if isinstance(t, Null):
            if t not in dense:
                dense[t] = len(dense)
            return (2, dense[t])
        return term_key(t)

    for t in sorted(nulls_of(d.initial.atoms), key=term_key):
        render(t)
    key = []
    for step in d.steps:
        bindings = tuple(
            (term_key(var), render(img)) for var, img in step.trigger.extension.items()
        )
        key.append((step.rule.rid, bindings))
    return tuple(key)


def enumerate_derivations(
    db: Instance,
    rules: Sequence[Rule],
    max_len: int,
    dedup: str = "none",
    skip_redundant: bool = False,
    max_derivations: int = DEFAULT_MAX_DERIVATIONS,
) -> Iterator[Derivation]:
    """Yield every derivation from db of length <= max_len, depth-first.

    Order is deterministic: children are explored by rule-list order, then
    by trigger order.  ``dedup="mod-nulls"`` yields one representative per
    null-renaming class; pruning whole subtrees at a duplicate is sound
    because isomorphic derivations have isomorphic sets of extensions.
    Redundant steps (head image already present) are legal derivation steps
    and are enumerated unless ``skip_redundant`` is set.
    """
    if max_len < 0:
        raise ValueError("max_len must be >= 0")
    if dedup not in ("none", "mod-nulls"):
        raise ValueError(f"unknown dedup mode {dedup!r}")
    seen: set[tuple] = set()
    count = 0

    def walk(d: Derivation) -> Iterator[Derivation]:
        nonlocal count
        count += 1
        if count > max_derivations:
            raise ResourceLimitError(f"more than {max_derivations} derivations")
        yield d
        if len(d) >= max_len:
            return
        for r in rules:
            for hom in triggers(d.final, r):
                child = d.extend(r, hom)
                if skip_redundant and not child.new_atoms(len(child)):
                    continue
                if dedup == "mod-nulls":
                    key = derivation_key(child)
                    if key in seen:
                        continue
                    seen.add(key)
                yield from walk(child)

    yield from walk(Derivation(db))
