"""Text syntax for formulas and knowledge bases.

Formulas, loosest binding first::

    a -> b        implication, right associative
    a | b         disjunction
    a & b         conjunction
    !a            negation
    true, false, atoms, ( ... )

A knowledge base is a sequence of statements, each ending with ``.``::

    fact <formula>.
    rule <name>: if <formula> then <formula> weight <decimal> [contra|nocontra] [priority <int>].
    default <name>: [<formula>] : <formula> / <formula>.

``#`` starts a comment running to the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple

from ..bext import Q_PREFIX, CombinedModel
from ..defaults import DefaultRule, DefaultTheory
from ..logic import BOTTOM, TOP, And, Formula, Implies, Not, Or, Var, atoms_of, satisfiable
from ..sources import DS, EvidenceModel, Prioritized, Source

KEYWORDS = frozenset(
    {"fact", "rule", "default", "if", "then", "weight", "contra", "nocontra", "priority", "true", "false"}
)


class ParseError(Exception):
    def __init__(self, line: int, column: int, message: str, snippet: str = ""):
        super().__init__(message)
        self.line = line
        self.column = column
        self.message = message
        self.snippet = snippet

    def __str__(self) -> str:
        out = f"{self.line}:{self.column}: {self.message}"
        if self.snippet:
            out += f"\n  {self.snippet}\n  {' ' * (self.column - 1)}^"
        return out


class DuplicateNameError(ParseError):
    pass


class WeightRangeError(ParseError):
    pass


class Token(NamedTuple):
    kind: str  # ident, number, op, eof
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\f\v]+)|(?P<nl>\n)|(?P<comment>\#[^\n]*)"
    r"|(?P<number>\d+(?:\.\d+)?)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>->|[|&!()]|[:/.])"
)


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.lines = text.split("\n")

    def snippet(self, line: int) -> str:
        return self.lines[line - 1] if 0 < line <= len(self.lines) else ""

    def error(self, line: int, column: int, message: str, cls=ParseError) -> ParseError:
        return cls(line, column, message, self.snippet(line))

    def tokens(self) -> list[Token]:
        out = []
        pos, line, line_start = 0, 1, 0
        text = self.text
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            column = pos - line_start + 1
            if m is None:
                raise self.error(line, column, f"unexpected character {text[pos]!r}")
            kind = m.lastgroup
            if kind == "nl":
                line += 1
                line_start = m.end()
            elif kind == "ident":
                word = m.group()
                if word.startswith(Q_PREFIX):
                    raise self.error(line, column, f"atom {word!r} uses the reserved prefix {Q_PREFIX!r}")
                out.append(Token(kind, word, line, column))
            elif kind in ("number", "op"):
                out.append(Token(kind, m.group(), line, column))
            pos = m.end()
        out.append(Token("eof", "", line, pos - line_start + 1))
        return out


class _Parser:
    def __init__(self, text: str):
        self.lexer = _Lexer(text)
        self.toks = self.lexer.tokens()
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def error(self, message: str, tok: Token | None = None, cls=ParseError) -> ParseError:
        tok = tok or self.tok
        return self.lexer.error(tok.line, tok.column, message, cls)

    def _describe(self, tok: Token) -> str:
        return "end of input" if tok.kind == "eof" else repr(tok.text)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "ident") and self.tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"expected {text!r}, found {self._describe(self.tok)}")
        return self.advance()

    def name(self) -> Token:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            raise self.error(f"expected a name, found {self._describe(t)}")
        return self.advance()

    # formulas

    def formula(self) -> Formula:
        left = self.disjunction()
        if self.at("->"):
            self.advance()
            return Implies(left, self.formula())
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.at("|"):
            self.advance()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self.at("&"):
            self.advance()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        if self.at("!"):
            self.advance()
            return Not(self.unary())
        return self.primary()

    def primary(self) -> Formula:
        t = self.tok
        if self.at("("):
            self.advance()
            f = self.formula()
            self.expect(")")
            return f
        if t.kind == "ident":
            if t.text == "true":
                self.advance()
                return TOP
            if t.text == "false":
                self.advance()
                return BOTTOM
            if t.text not in KEYWORDS:
                self.advance()
                return Var(t.text)
        raise self.error(f"expected a formula, found {self._describe(t)}")

    # knowledge bases

    def knowledge_base(self) -> "KnowledgeBase":
        facts: list[Formula] = []
        rules: list[RuleSpec] = []
        defaults: list[DefaultSpec] = []
        names: set[str] = set()

        def claim(tok: Token) -> str:
            if tok.text in names:
                raise self.error(f"duplicate name {tok.text!r}", tok, DuplicateNameError)
            names.add(tok.text)
            return tok.text

        while self.tok.kind != "eof":
            head = self.tok
            if self.at("fact"):
                self.advance()
                facts.append(self.formula())
            elif self.at("rule"):
                self.advance()
                name = claim(self.name())
                self.expect(":")
                self.expect("if")
                a = self.formula()
                self.expect("then")
                c = self.formula()
                self.expect("weight")
                wt = self.tok
                if wt.kind != "number":
                    raise self.error(f"expected a weight, found {self._describe(wt)}")
                self.advance()
                alpha = float(wt.text)
                if not 0.0 <= alpha <= 1.0:
                    raise self.error(f"weight {wt.text} outside [0, 1]", wt, WeightRangeError)
                contra = True
                if self.at("contra") or self.at("nocontra"):
                    contra = self.advance().text == "contra"
                priority = 0
                if self.at("priority"):
                    self.advance()
                    pt = self.tok
                    if pt.kind != "number" or "." in pt.text:
                        raise self.error(f"expected a non-negative integer priority, found {self._describe(pt)}")
                    self.advance()
                    priority = int(pt.text)
                rules.append(RuleSpec(name, a, c, alpha, priority, contra, head.line))
            elif self.at("default"):
                self.advance()
                name = claim(self.name())
                self.expect(":")
                a = TOP if self.at(":") else self.formula()
                self.expect(":")
                b = self.formula()
                self.expect("/")
                c = self.formula()
                defaults.append(DefaultSpec(name, a, b, c, head.line))
            else:
                raise self.error(f"expected 'fact', 'rule' or 'default', found {self._describe(head)}")
            self.expect(".")
        return KnowledgeBase(tuple(facts), tuple(rules), tuple(defaults))


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    try:
        f = p.formula()
    except RecursionError:
        raise p.error("formula nested too deeply") from None
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p._describe(p.tok)} after formula")
    return f


def parse_kb(text: str) -> "KnowledgeBase":
    p = _Parser(text)
    try:
        return p.knowledge_base()
    except RecursionError:
        raise p.error("formula nested too deeply") from None


@dataclass(frozen=True)
class RuleSpec:
    name: str
    a: Formula
    c: Formula
    alpha: float
    priority: int = 0
    contra: bool = True
    line: int = 0


@dataclass(frozen=True)
class DefaultSpec:
    name: str
    a: Formula
    b: Formula
    c: Formula
    line: int = 0


@dataclass(frozen=True)
class KnowledgeBase:
    facts: tuple[Formula, ...] = ()
    rules: tuple[RuleSpec, ...] = ()
    default_rules: tuple[DefaultSpec, ...] = ()

    @property
    def material_rules(self) -> tuple[RuleSpec, ...]:
        return tuple(r for r in self.rules if r.contra)

    @property
    def inference_rules(self) -> tuple[RuleSpec, ...]:
        return tuple(r for r in self.rules if not r.contra)

    @property
    def atoms(self) -> frozenset[str]:
        fs = list(self.facts)
        for r in self.rules:
            fs += [r.a, r.c]
        for d in self.default_rules:
            fs += [d.a, d.b, d.c]
        return atoms_of(fs)

    def facts_consistent(self) -> bool:
        return satisfiable(self.facts)

    def sources(self) -> tuple[Source, ...]:
        """Rules as sources, numbered 1..m in declaration order."""
        make = {True: Source.material, False: Source.inference}
        return tuple(make[r.contra](i, r.a, r.c, r.alpha, r.name) for i, r in enumerate(self.rules, 1))

    def priority_levels(self) -> tuple[frozenset[int], ...]:
        levels: dict[int, set[int]] = {}
        for i, r in enumerate(self.rules, 1):
            levels.setdefault(r.priority, set()).add(i)
        return tuple(frozenset(levels[p]) for p in sorted(levels))

    def evidence_model(self, model: str = "ds") -> EvidenceModel:
        if model == "ds":
            probability = DS()
        elif model == "priority":
            probability = Prioritized(self.priority_levels())
        else:
            raise ValueError(f"unknown probability model {model!r}")
        return EvidenceModel(self.facts, self.sources(), probability)

    def default_theory(self) -> DefaultTheory:
        return DefaultTheory(
            tuple(DefaultRule(d.a, d.b, d.c, i, d.name) for i, d in enumerate(self.default_rules, 1)),
            self.facts,
        )

    def combined_model(self, model: str = "ds") -> CombinedModel:
        em = self.evidence_model(model)
        return CombinedModel(self.facts, self.default_theory().defaults, em.sources, em.probability)
