"""Core vocabulary: terms, atoms, instances, substitutions, rules, queries, KBs.

Terms come in three disjoint kinds.  Constants and variables are identified
by name; nulls are identified by a globally unique creation ordinal handed
out by :func:`fresh_null`.  Every value here is immutable and hashable, so
instances and rules can be shared freely between threads; the null ordinal
counter is the only mutable global and ``itertools.count`` makes it atomic
under CPython.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

from .errors import UnboundVariableError


@dataclass(frozen=True, slots=True)
class Constant:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Null:
    ordinal: int

    def __str__(self) -> str:
        return f"_:n{self.ordinal}"


Term = Union[Constant, Variable, Null]

_null_counter = itertools.count(1)


def fresh_null() -> Null:
    """Return a null no previous call has returned in this session."""
    return Null(next(_null_counter))


_KIND_RANK = {Constant: 0, Variable: 1, Null: 2}


def term_key(t: Term) -> tuple:
    """Total order: constants < variables < nulls, then name/ordinal."""
    if isinstance(t, Null):
        return (2, t.ordinal)
    return (_KIND_RANK[type(t)], t.name)


@dataclass(frozen=True, slots=True)
class Atom:
    pred: str
    args: tuple[Term, ...]

    def __str__(self) -> str:
        return f"{self.pred}({','.join(str(a) for a in self.args)})"

    @property
    def arity(self) -> int:
        return len(self.args)

    def terms(self) -> frozenset[Term]:
        return frozenset(self.args)


def atom_key(a: Atom) -> tuple:
    return (a.pred, len(a.args), tuple(term_key(t) for t in a.args))


def atom(pred: str, *args: Term) -> Atom:
    return Atom(pred, tuple(args))


def terms_of(atoms: Iterable[Atom]) -> frozenset[Term]:
    return frozenset(t for a in atoms for t in a.args)


def constants_of(atoms: Iterable[Atom]) -> frozenset[Constant]:
    return frozenset(t for a in atoms for t in a.args if isinstance(t, Constant))


def variables_of(atoms: Iterable[Atom]) -> frozenset[Variable]:
    return frozenset(t for a in atoms for t in a.args if isinstance(t, Variable))


def nulls_of(atoms: Iterable[Atom]) -> frozenset[Null]:
    return frozenset(t for a in atoms for t in a.args if isinstance(t, Null))


class Instance:
    """A finite set of atoms over constants and nulls.

    Variables are rejected at construction; everything downstream may rely
    on instances being variable-free.
    """

    __slots__ = ("atoms",)

    def __init__(self, atoms: Iterable[Atom] = ()):
        atom_set = frozenset(atoms)
        for a in atom_set:
            for t in a.args:
                if isinstance(t, Variable):
                    raise ValueError(f"instance atom {a} contains variable {t}")
        object.__setattr__(self, "atoms", atom_set)

    def __contains__(self, a: Atom) -> bool:
        return a in self.atoms

    def __iter__(self) -> Iterator[Atom]:
        return iter(self.atoms)

    def __len__(self) -> int:
        return len(self.atoms)

    def __eq__(self, other) -> bool:
        return isinstance(other, Instance) and self.atoms == other.atoms

    def __hash__(self) -> int:
        return hash(self.atoms)

    def __le__(self, other: "Instance") -> bool:
        return self.atoms <= other.atoms

    def __or__(self, other: "Instance | Iterable[Atom]") -> "Instance":
        extra = other.atoms if isinstance(other, Instance) else frozenset(other)
        return Instance(self.atoms | extra)

    def __sub__(self, other: "Instance") -> frozenset[Atom]:
        return self.atoms - other.atoms

    def __repr__(self) -> str:
        inner = ", ".join(str(a) for a in sorted(self.atoms, key=atom_key))
        return f"{{{inner}}}"

    def terms(self) -> frozenset[Term]:
        return terms_of(self.atoms)

    def constants(self) -> frozenset[Constant]:
        return constants_of(self.atoms)

    def nulls(self) -> frozenset[Null]:
        return nulls_of(self.atoms)

    def is_ground(self) -> bool:
        return not self.nulls()

    def sorted_atoms(self) -> list[Atom]:
        return sorted(self.atoms, key=atom_key)


class Substitution:
    """A partial map on terms, implicitly the identity on every constant.

    Only variables and nulls may appear in the stored domain; binding a
    constant to anything but itself is rejected.
    """

    __slots__ = ("mapping",)

    def __init__(self, mapping: dict[Term, Term] | Iterable[tuple[Term, Term]] = ()):
        m = dict(mapping)
        for k, v in m.items():
            if isinstance(k, Constant):
                if k != v:
                    raise ValueError(f"constant {k} cannot be remapped to {v}")
        object.__setattr__(self, "mapping", {
            k: v for k, v in m.items() if not isinstance(k, Constant)
        })

    def __getitem__(self, t: Term) -> Term:
        if isinstance(t, Constant):
            return t
        return self.mapping[t]

    def get(self, t: Term, default: Term | None = None) -> Term | None:
        if isinstance(t, Constant):
            return t
        return self.mapping.get(t, default)

    def __contains__(self, t: Term) -> bool:
        return isinstance(t, Constant) or t in self.mapping

    def __len__(self) -> int:
        return len(self.mapping)

    def __eq__(self, other) -> bool:
        return isinstance(other, Substitution) and self.mapping == other.mapping

    def __hash__(self) -> int:
        return hash(frozenset(self.mapping.items()))

    def __repr__(self) -> str:
        inner = ", ".join(
            f"{k}->{v}" for k, v in sorted(self.mapping.items(), key=lambda kv: term_key(kv[0]))
        )
        return f"{{{inner}}}"

    def items(self) -> list[tuple[Term, Term]]:
        return sorted(self.mapping.items(), key=lambda kv: term_key(kv[0]))

    def key(self) -> tuple:
        """Canonical sort key: the mapping viewed as a sorted pair list."""
        return tuple((term_key(k), term_key(v)) for k, v in self.items())

    def extend(self, extra: dict[Term, Term]) -> "Substitution":
        merged = dict(self.mapping)
        merged.update(extra)
        return Substitution(merged)

    def restrict(self, domain: Iterable[Term]) -> "Substitution":
        dom = set(domain)
        return Substitution({k: v for k, v in self.mapping.items() if k in dom})

    def apply_term(self, t: Term) -> Term:
        if isinstance(t, Constant):
            return t
        if isinstance(t, Variable):
            try:
                return self.mapping[t]
            except KeyError:
                raise UnboundVariableError(f"variable {t} has no image") from None
        return self.mapping.get(t, t)  # unmapped nulls pass through

    def apply_atom(self, a: Atom) -> Atom:
        return Atom(a.pred, tuple(self.apply_term(t) for t in a.args))

    def apply(self, atoms: Iterable[Atom]) -> frozenset[Atom]:
        return frozenset(self.apply_atom(a) for a in atoms)


def apply_substitution(atoms: Iterable[Atom], s: Substitution) -> frozenset[Atom]:
    """Componentwise image of an atom set; may collapse atoms (set semantics)."""
    return s.apply(atoms)


@dataclass(frozen=True)
class Rule:
    """An existential rule body -> head.

    The frontier is the set of variables shared by body and head; head
    variables outside the frontier are existential and get a fresh null at
    each application.
    """

    rid: str
    body: frozenset[Atom]
    head: frozenset[Atom]

    def __post_init__(self):
        if not self.body:
            raise ValueError(f"rule {self.rid}: empty body")
        if not self.head:
            raise ValueError(f"rule {self.rid}: empty head")
        if nulls_of(self.body) or nulls_of(self.head):
            raise ValueError(f"rule {self.rid}: rules may not contain nulls")

    @property
    def body_vars(self) -> frozenset[Variable]:
        return variables_of(self.body)

    @property
    def head_vars(self) -> frozenset[Variable]:
        return variables_of(self.head)

    @property
    def frontier(self) -> frozenset[Variable]:
        return self.body_vars & self.head_vars

    @property
    def existentials(self) -> frozenset[Variable]:
        return self.head_vars - self.body_vars

    def constants(self) -> frozenset[Constant]:
        return constants_of(self.body) | constants_of(self.head)

    def __str__(self) -> str:
        body = ", ".join(str(a) for a in sorted(self.body, key=atom_key))
        head = ", ".join(str(a) for a in sorted(self.head, key=atom_key))
        return f"{self.rid}: {body} -> {head}."


def rule(rid: str, body: Iterable[Atom], head: Iterable[Atom]) -> Rule:
    return Rule(rid, frozenset(body), frozenset(head))


def frontier(r: Rule) -> frozenset[Variable]:
    """Variables the body and head of the rule have in common."""
    return r.frontier


def frontier_atoms(r: Rule, side: str = "body") -> frozenset[Atom]:
    """Atoms of the rule containing at least one frontier variable.

    ``side`` selects which conjunction to draw from; the derivation-graph
    builder only ever needs the body side, since head atoms do not exist yet
    when a step's incoming arcs are determined.
    """
    if side == "body":
        pool: frozenset[Atom] = r.body
    elif side == "head":
        pool = r.head
    elif side == "both":
        pool = r.body | r.head
    else:
        raise ValueError(f"unknown side {side!r}")
    fr = r.frontier
    return frozenset(a for a in pool if any(t in fr for t in a.args))


@dataclass(frozen=True)
class KnowledgeBase:
    """A ground database together with an ordered rule list."""

    database: Instance
    rules: tuple[Rule, ...]

    def __post_init__(self):
        if not self.database.is_ground():
            raise ValueError("database must be ground (no nulls)")
        seen: dict[str, Rule] = {}
        for r in self.rules:
            if r.rid in seen:
                raise ValueError(f"duplicate rule id {r.rid}")
            seen[r.rid] = r

    @property
    def constants(self) -> frozenset[Constant]:
        cs = set(self.database.constants())
        for r in self.rules:
            cs |= r.constants()
        return frozenset(cs)

    def rule_by_id(self, rid: str) -> Rule:
        for r in self.rules:
            if r.rid == rid:
                return r
        raise KeyError(rid)


@dataclass(frozen=True)
class BooleanQuery:
    """A conjunction of atoms over constants and (implicitly existential) variables."""

    atoms: frozenset[Atom]

    def __post_init__(self):
        if not self.atoms:
            raise ValueError("query must be non-empty")
        if nulls_of(self.atoms):
            raise ValueError("query may not contain nulls")
