"""Text frontend for rule files.

Format, one statement per '.', with '%' line comments:

    p(a).  r(b).                      % facts: ground atoms
    r1: p(X) -> q(X,Y,Z).             % rule: NAME: body -> head
    ?q1: q(X,Y,Z).                    % named Boolean query

Identifiers starting with a lowercase letter are constants or predicates;
identifiers starting with an uppercase letter (or underscore) are
variables.  Variables occurring only in a rule head are existential.
Predicate arities must be consistent across the whole document.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ArityMismatchError, EmptyBodyError, EmptyHeadError, ParseError
from .model import (
    Atom,
    BooleanQuery,
    Constant,
    Instance,
    KnowledgeBase,
    Rule,
    Term,
    Variable,
    atom_key,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


_PUNCT = {"(": "LPAREN", ")": "RPAREN", ",": "COMMA", ":": "COLON", ".": "DOT", "?": "QMARK"}


def _tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c == "-" and i + 1 < n and text[i + 1] == ">":
            tokens.append(Token("ARROW", "->", line, col))
            i += 2
            col += 2
            continue
        if c in _PUNCT:
            tokens.append(Token(_PUNCT[c], c, line, col))
            i += 1
            col += 1
            continue
        if c.isalpha() or c == "_":
            start = i
            start_col = col
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
                col += 1
            tokens.append(Token("IDENT", text[start:i], line, start_col))
            continue
        raise ParseError(f"unexpected character {c!r}", line, col)
    tokens.append(Token("EOF", "", line, col))
    return tokens


@dataclass
class RuleDocument:
    """Parsed rule file: facts, named rules, and named queries, in file order.

    ``positions`` maps ("fact", index), ("rule", name), or ("query", name)
    to the 1-based (line, column) where the statement starts.
    """

    facts: list[Atom] = field(default_factory=list)
    rules: list[Rule] = field(default_factory=list)
    queries: dict[str, BooleanQuery] = field(default_factory=dict)
    arities: dict[str, int] = field(default_factory=dict)
    positions: dict[tuple, tuple[int, int]] = field(default_factory=dict)

    def knowledge_base(self) -> KnowledgeBase:
        return KnowledgeBase(Instance(self.facts), tuple(self.rules))


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.doc = RuleDocument()

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def take(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"expected {kind}, found {tok.text!r}", tok.line, tok.column)
        self.pos += 1
        return tok

    def parse(self) -> RuleDocument:
        while self.peek().kind != "EOF":
            if self.peek().kind == "QMARK":
                self.query()
            elif self.peek().kind == "IDENT" and self.peek(1).kind == "COLON":
                self.rule()
            else:
                self.fact()
        return self.doc

    def term(self) -> Term:
        tok = self.take("IDENT")
        if tok.text[0].islower():
            return Constant(tok.text)
        return Variable(tok.text)

    def atom(self) -> Atom:
        name = self.take("IDENT")
        if not name.text[0].islower():
            raise ParseError(
                f"predicate {name.text!r} must start lowercase", name.line, name.column
            )
        self.take("LPAREN")
        args = [self.term()]
        while self.peek().kind == "COMMA":
            self.take("COMMA")
            args.append(self.term())
        self.take("RPAREN")
        known = self.doc.arities.get(name.text)
        if known is not None and known != len(args):
            raise ArityMismatchError(
                f"predicate {name.text} used with arity {len(args)}, previously {known}",
                name.line, name.column,
            )
        self.doc.arities[name.text] = len(args)
        return Atom(name.text, tuple(args))

    def atom_list(self) -> list[Atom]:
        if self.peek().kind != "IDENT":
            return []
        atoms = [self.atom()]
        while self.peek().kind == "COMMA":
            self.take("COMMA")
            atoms.append(self.atom())
        return atoms

    def fact(self) -> None:
        tok = self.peek()
        a = self.atom()
        self.take("DOT")
        if any(isinstance(t, Variable) for t in a.args):
            raise ParseError(f"fact {a} must be ground", tok.line, tok.column)
        self.doc.positions[("fact", len(self.doc.facts))] = (tok.line, tok.column)
        self.doc.facts.append(a)

    def rule(self) -> None:
        name = self.take("IDENT")
        self.take("COLON")
        body = self.atom_list()
        arrow = self.take("ARROW")
        head = self.atom_list()
        dot = self.take("DOT")
        if not body:
            raise EmptyBodyError(f"rule {name.text} has no body atoms", arrow.line, arrow.column)
        if not head:
            raise EmptyHeadError(f"rule {name.text} has no head atoms", dot.line, dot.column)
        if any(r.rid == name.text for r in self.doc.rules):
            raise ParseError(f"duplicate rule name {name.text!r}", name.line, name.column)
        self.doc.positions[("rule", name.text)] = (name.line, name.column)
        self.doc.rules.append(Rule(name.text, frozenset(body), frozenset(head)))

    def query(self) -> None:
        self.take("QMARK")
        name = self.take("IDENT")
        self.take("COLON")
        atoms = self.atom_list()
        self.take("DOT")
        if not atoms:
            raise ParseError(f"query {name.text} is empty", name.line, name.column)
        if name.text in self.doc.queries:
            raise ParseError(f"duplicate query name {name.text!r}", name.line, name.column)
        self.doc.positions[("query", name.text)] = (name.line, name.column)
        self.doc.queries[name.text] = BooleanQuery(frozenset(atoms))


def parse_document(text: str) -> RuleDocument:
    return _Parser(_tokenize(text)).parse()


def print_document(doc: RuleDocument) -> str:
    """Render a document so that parsing the output reproduces it."""
    lines = [f"{a}." for a in doc.facts]
    for r in doc.rules:
        body = ", ".join(str(a) for a in sorted(r.body, key=atom_key))
        head = ", ".join(str(a) for a in sorted(r.head, key=atom_key))
        lines.append(f"{r.rid}: {body} -> {head}.")
    for name, q in doc.queries.items():
        atoms = ", ".join(str(a) for a in sorted(q.atoms, key=atom_key))
        lines.append(f"?{name}: {atoms}.")
    return "\n".join(lines) + ("\n" if lines else "")
