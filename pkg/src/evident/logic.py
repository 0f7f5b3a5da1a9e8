"""Propositional formulas, satisfiability and inference-rule closure.

Formulas are immutable trees.  Satisfiability goes through a CNF translation
(plain distribution for small formulas, Tseitin definitions otherwise) and a
DPLL search with unit propagation.  Theories are always carried as finite
bases; every question about a theory is answered with entailment queries.
"""

from __future__ import annotations

import itertools
import re
import threading
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence, Union

ATOM_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class MissingAtomError(KeyError):
    """A valuation was asked about an atom outside its domain."""


@dataclass(frozen=True)
class Top:
    def __str__(self) -> str:
        return "true"


@dataclass(frozen=True)
class Bottom:
    def __str__(self) -> str:
        return "false"


@dataclass(frozen=True)
class Var:
    name: str

    def __post_init__(self) -> None:
        if not isinstance(self.name, str) or not ATOM_RE.match(self.name):
            raise ValueError(f"invalid atom name {self.name!r}")

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Not:
    arg: "Formula"

    def __str__(self) -> str:
        return "!" + _wrap(self.arg)


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return f"{_wrap(self.left)} & {_wrap(self.right)}"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return f"{_wrap(self.left)} | {_wrap(self.right)}"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return f"{_wrap(self.left)} -> {_wrap(self.right)}"


Formula = Union[Top, Bottom, Var, Not, And, Or, Implies]
TOP = Top()
BOTTOM = Bottom()


def _wrap(f: Formula) -> str:
    if isinstance(f, (And, Or, Implies)):
        return f"({f})"
    return str(f)


def pretty_print(f: Formula) -> str:
    """Fully parenthesised rendering; parses back to the identical tree."""
    if isinstance(f, (And, Or, Implies)):
        return f"({f})"
    return str(f)


def conj(formulas: Iterable[Formula]) -> Formula:
    result: Formula | None = None
    for f in formulas:
        result = f if result is None else And(result, f)
    return TOP if result is None else result


def atoms(f: Formula) -> frozenset[str]:
    return _atoms(f)


@lru_cache(maxsize=None)
def _atoms(f: Formula) -> frozenset[str]:
    if isinstance(f, Var):
        return frozenset((f.name,))
    if isinstance(f, Not):
        return _atoms(f.arg)
    if isinstance(f, (And, Or, Implies)):
        return _atoms(f.left) | _atoms(f.right)
    return frozenset()


def atoms_of(formulas: Iterable[Formula]) -> frozenset[str]:
    out: frozenset[str] = frozenset()
    for f in formulas:
        out |= atoms(f)
    return out


def evaluate(f: Formula, v: Mapping[str, bool]) -> bool:
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Var):
        try:
            return bool(v[f.name])
        except KeyError:
            raise MissingAtomError(f.name) from None
    if isinstance(f, Not):
        return not evaluate(f.arg, v)
    if isinstance(f, And):
        return evaluate(f.left, v) and evaluate(f.right, v)
    if isinstance(f, Or):
        return evaluate(f.left, v) or evaluate(f.right, v)
    if isinstance(f, Implies):
        return (not evaluate(f.left, v)) or evaluate(f.right, v)
    raise TypeError(f"not a formula: {f!r}")


def equivalent(f: Formula, g: Formula) -> bool:
    return entails([f], g) and entails([g], f)


# ---------------------------------------------------------------------------
# CNF translation

_var_ids: dict[str, int] = {}
_id_lock = threading.Lock()
_aux_counter = itertools.count(1)

# Clause-count ceiling for translation by distribution; above it subformulas
# get Tseitin definitions.
_DISTRIBUTE_LIMIT = 32

Clause = frozenset  # of non-zero ints; negative means negated


def _atom_id(name: str) -> int:
    vid = _var_ids.get(name)
    if vid is None:
        with _id_lock:
            vid = _var_ids.get(name)
            if vid is None:
                vid = next(_aux_counter)
                _var_ids[name] = vid
    return vid


def _fresh() -> int:
    with _id_lock:
        return next(_aux_counter)


def _nnf(f: Formula, positive: bool = True) -> Formula:
    if isinstance(f, (Top, Bottom)):
        if positive:
            return f
        return BOTTOM if isinstance(f, Top) else TOP
    if isinstance(f, Var):
        return f if positive else Not(f)
    if isinstance(f, Not):
        return _nnf(f.arg, not positive)
    if isinstance(f, Implies):
        f = Or(Not(f.left), f.right)
    if isinstance(f, And):
        l, r = _nnf(f.left, positive), _nnf(f.right, positive)
        return And(l, r) if positive else Or(l, r)
    if isinstance(f, Or):
        l, r = _nnf(f.left, positive), _nnf(f.right, positive)
        return Or(l, r) if positive else And(l, r)
    raise TypeError(f"not a formula: {f!r}")


def _cnf_nnf(f: Formula) -> frozenset[Clause]:
    """Clauses equisatisfiable with an NNF formula (equivalent over its atoms
    when no Tseitin variable was needed)."""
    if isinstance(f, Top):
        return frozenset()
    if isinstance(f, Bottom):
        return frozenset((frozenset(),))
    if isinstance(f, Var):
        return frozenset((frozenset((_atom_id(f.name),)),))
    if isinstance(f, Not):  # NNF: argument is a Var
        return frozenset((frozenset((-_atom_id(f.arg.name),)),))
    if isinstance(f, And):
        return _cnf_nnf(f.left) | _cnf_nnf(f.right)
    # Or
    left, right = _cnf_nnf(f.left), _cnf_nnf(f.right)
    if len(left) * len(right) > _DISTRIBUTE_LIMIT:
        # Tseitin: t -> left, -t -> right, keep (t | right) folded in.
        t = _fresh()
        out = {c | {-t} for c in left}
        out |= {c | {t} for c in right}
        return frozenset(out)
    out = set()
    for a in left:
        for b in right:
            c = a | b
            if not any(-lit in c for lit in c):
                out.add(c)
    return frozenset(out)


@lru_cache(maxsize=65536)
def cnf(f: Formula) -> frozenset[Clause]:
    """Clause set satisfiable together with other clauses exactly when f is."""
    return _cnf_nnf(_nnf(f))


def _propagate(clauses: list[Clause], lit: int) -> list[Clause] | None:
    out = []
    for c in clauses:
        if lit in c:
            continue
        if -lit in c:
            c = c - {-lit}
            if not c:
                return None
        out.append(c)
    return out


def _unit_reduce(clauses: list[Clause]) -> list[Clause] | None:
    """Apply all unit clauses, round by round, each round in one pass."""
    while True:
        units = {lit for c in clauses if len(c) == 1 for lit in c}
        if not units:
            return clauses
        falsified = {-lit for lit in units}
        if not units.isdisjoint(falsified):
            return None
        out = []
        for c in clauses:
            if not c.isdisjoint(units):
                continue
            if not c.isdisjoint(falsified):
                c = c - falsified
                if not c:
                    return None
            out.append(c)
        clauses = out


def _dpll(clauses: list[Clause]) -> bool:
    reduced = _unit_reduce(clauses)
    if reduced is None:
        return False
    clauses = reduced
    if not clauses:
        return True
    # Branch on the literal occurring most often in the shortest clauses.
    shortest = min(len(c) for c in clauses)
    counts: dict[int, int] = {}
    for c in clauses:
        if len(c) == shortest:
            for lit in c:
                counts[lit] = counts.get(lit, 0) + 1
    lit = max(counts, key=lambda x: (counts[x], -abs(x), x))
    for choice in (lit, -lit):
        reduced = _propagate(clauses, choice)
        if reduced is not None and _dpll(reduced):
            return True
    return False


def _clauses_of(gamma: Iterable[Formula]) -> list[Clause] | None:
    clauses: set[Clause] = set()
    for f in gamma:
        clauses |= cnf(f)
    if frozenset() in clauses:
        return None
    return list(clauses)


def satisfiable(gamma: Iterable[Formula]) -> bool:
    return _satisfiable(frozenset(gamma))


@lru_cache(maxsize=262144)
def _satisfiable(gamma: frozenset[Formula]) -> bool:
    clauses = _clauses_of(gamma)
    if clauses is None:
        return False
    return _dpll(clauses)


def entails(gamma: Iterable[Formula], d: Formula) -> bool:
    return _entails(frozenset(gamma), d)


@lru_cache(maxsize=262144)
def _entails(gamma: frozenset[Formula], d: Formula) -> bool:
    if isinstance(d, Top) or d in gamma:
        return True
    return not _satisfiable(gamma | {_negate(d)})


def _negate(f: Formula) -> Formula:
    return f.arg if isinstance(f, Not) else Not(f)


# ---------------------------------------------------------------------------
# Theories and inference rules


@dataclass(frozen=True)
class TheoryBase:
    """A finite base standing for its deductive closure."""

    base: tuple[Formula, ...] = ()
    _key: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "base", tuple(dict.fromkeys(self.base)))
        object.__setattr__(self, "_key", frozenset(self.base))

    @classmethod
    def of(cls, formulas: Iterable[Formula]) -> "TheoryBase":
        return cls(tuple(formulas))

    def entails(self, d: Formula) -> bool:
        return _entails(self._key, d)

    def consistent(self) -> bool:
        return _satisfiable(self._key)

    def atoms(self) -> frozenset[str]:
        return atoms_of(self.base)

    def __iter__(self):
        return iter(self.base)

    def __len__(self) -> int:
        return len(self.base)


def theory_subset(k1: TheoryBase, k2: TheoryBase) -> bool:
    """Th(k1) is contained in Th(k2)."""
    return all(k2.entails(f) for f in k1.base)


def theory_equal(k1: TheoryBase, k2: TheoryBase) -> bool:
    return theory_subset(k1, k2) and theory_subset(k2, k1)


@dataclass(frozen=True)
class InferenceRule:
    """``premise / consequent``: knowing the premise licenses the consequent."""

    premise: Formula
    consequent: Formula

    def __str__(self) -> str:
        return f"{self.premise} / {self.consequent}"


def fixpoint(
    u: Iterable[Formula],
    rules: Sequence[InferenceRule],
    active: Iterable[int] | None = None,
    fired: Iterable[int] = (),
) -> tuple[TheoryBase, frozenset[int]]:
    """Least fixpoint of firing ``rules`` over ``u``.

    Only the rules at positions in ``active`` take part (all of them when it
    is None).  ``fired`` may name positions already known to fire, e.g. from a
    smaller active set; it seeds the iteration without changing the result
    because the closure operator is monotone.  Returns the base (``u`` plus
    the fired consequents, in firing order) and the fired positions.
    """
    positions = range(len(rules)) if active is None else sorted(set(active))
    base = list(dict.fromkeys(u))
    done = set(fired)
    for i in sorted(done):
        base.append(rules[i].consequent)
    key = frozenset(base)
    pending = [i for i in positions if i not in done]
    changed = True
    while changed and pending:
        changed = False
        still = []
        for i in pending:
            rule = rules[i]
            if rule.premise in key or _entails(key, rule.premise):
                done.add(i)
                if rule.consequent not in key:
                    base.append(rule.consequent)
                    key = key | {rule.consequent}
                changed = True
            else:
                still.append(i)
        pending = still
    return TheoryBase(tuple(base)), frozenset(done)


def th_closure(u: Iterable[Formula], j: Sequence[InferenceRule]) -> TheoryBase:
    """Base of the smallest deductively closed superset of u closed under j."""
    return fixpoint(u, list(j))[0]
