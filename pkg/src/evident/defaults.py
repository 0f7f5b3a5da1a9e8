"""Default theories and their extensions.

A default ``a : b / c`` is mimicked by the inference rule ``a / c``.  For every
subset gamma of the defaults, ``Th^gamma(W)`` is the closure of the facts under
the rules in gamma; the family of these theories is the search space.  A
theory in the family is Delta-consistent when some gamma generating it has no
justification refuted by the theory.  M-extensions are the maximal
Delta-consistent theories; Reiter extensions are the theories E with
``E = Th^gamma(W)`` for ``gamma = {i : E does not entail !b_i}``.

Everything here is exhaustive enumeration over the 2^m subsets.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from .errors import check_size
from .logic import Formula, InferenceRule, Not, TheoryBase, equivalent, fixpoint, theory_equal, theory_subset

GammaIndex = frozenset  # of default ids


@dataclass(frozen=True)
class DefaultRule:
    prerequisite: Formula
    justification: Formula
    consequent: Formula
    id: int
    label: str | None = None

    @property
    def rule(self) -> InferenceRule:
        return InferenceRule(self.prerequisite, self.consequent)

    @property
    def name(self) -> str:
        return self.label if self.label is not None else str(self.id)

    def __str__(self) -> str:
        return f"{self.prerequisite} : {self.justification} / {self.consequent}"


@dataclass(frozen=True)
class DefaultTheory:
    defaults: tuple[DefaultRule, ...] = ()
    facts: tuple[Formula, ...] = ()

    def __post_init__(self) -> None:
        ordered = tuple(sorted(self.defaults, key=lambda r: r.id))
        if [r.id for r in ordered] != list(range(1, len(ordered) + 1)):
            raise ValueError(f"default ids must be exactly 1..{len(ordered)}")
        object.__setattr__(self, "defaults", ordered)
        object.__setattr__(self, "facts", tuple(self.facts))

    @property
    def m(self) -> int:
        return len(self.defaults)

    @property
    def rules(self) -> tuple[InferenceRule, ...]:
        return tuple(r.rule for r in self.defaults)

    def mask(self, gamma: Iterable[int]) -> int:
        mask = 0
        for i in gamma:
            if not 1 <= i <= self.m:
                raise ValueError(f"default id {i} not in 1..{self.m}")
            mask |= 1 << (i - 1)
        return mask


@dataclass(frozen=True)
class Extension:
    """An extension with the index sets that produce it.

    ``generator`` is the smallest subset (in bitmask order) generating the
    theory that passes the relevant test; ``fired`` are the ids among it whose
    rules actually fired.
    """

    theory: TheoryBase
    generator: frozenset[int]
    fired: frozenset[int]


def ids_of(mask: int) -> frozenset[int]:
    return frozenset(i + 1 for i in range(mask.bit_length()) if mask >> i & 1)


def th_gamma(theory: DefaultTheory, gamma: Iterable[int]) -> TheoryBase:
    mask = theory.mask(gamma)
    return fixpoint(theory.facts, theory.rules, [i for i in range(theory.m) if mask >> i & 1])[0]


@dataclass(frozen=True)
class _Class:
    """One theory of S with every gamma generating it."""

    theory: TheoryBase
    masks: tuple[int, ...]
    fired: dict  # mask -> fired rule positions
    refuted: int  # mask of defaults whose justification the theory refutes

    @property
    def delta_generators(self) -> tuple[int, ...]:
        return tuple(g for g in self.masks if not g & self.refuted)

    @property
    def delta_consistent(self) -> bool:
        return bool(self.delta_generators)


@dataclass(frozen=True)
class _Space:
    classes: tuple[_Class, ...]
    class_of: tuple[int, ...]  # mask -> class index


def _fired_ids(positions: frozenset[int]) -> frozenset[int]:
    return frozenset(p + 1 for p in positions)


def _space(theory: DefaultTheory) -> _Space:
    check_size(theory.m, "defaults")
    return _build_space(theory)


@lru_cache(maxsize=128)
def _build_space(theory: DefaultTheory) -> _Space:
    rules = theory.rules
    n = 1 << theory.m
    fired: list[frozenset[int]] = [frozenset()] * n
    bases: dict[frozenset[int], TheoryBase] = {}
    for mask in range(n):
        seed: frozenset[int] = frozenset()
        for bit in range(theory.m):
            if mask >> bit & 1:
                seed |= fired[mask ^ (1 << bit)]
        base, fired[mask] = fixpoint(theory.facts, rules, [i for i in range(theory.m) if mask >> i & 1], seed)
        bases.setdefault(fired[mask], base)

    # Distinct fired sets can still yield equal theories; merge those.
    reps: list[frozenset[int]] = []
    rep_of: dict[frozenset[int], int] = {}
    for f, base in bases.items():
        for idx, r in enumerate(reps):
            if theory_equal(bases[r], base):
                rep_of[f] = idx
                break
        else:
            rep_of[f] = len(reps)
            reps.append(f)

    members: list[list[int]] = [[] for _ in reps]
    class_of = []
    for mask in range(n):
        idx = rep_of[fired[mask]]
        members[idx].append(mask)
        class_of.append(idx)
    classes = []
    for idx, r in enumerate(reps):
        base = bases[r]
        refuted = 0
        for d in theory.defaults:
            if base.entails(Not(d.justification)):
                refuted |= 1 << (d.id - 1)
        classes.append(_Class(base, tuple(members[idx]), {g: fired[g] for g in members[idx]}, refuted))
    return _Space(tuple(classes), tuple(class_of))


def _find(space: _Space, k: TheoryBase) -> _Class | None:
    for c in space.classes:
        if theory_equal(c.theory, k):
            return c
    return None


def delta_consistent(theory: DefaultTheory, k: TheoryBase) -> bool:
    """Whether k is generated by some gamma none of whose justifications k refutes.

    A k outside the family S is never Delta-consistent.
    """
    c = _find(_space(theory), k)
    return c is not None and c.delta_consistent


def _as_extension(c: _Class, generators: Iterable[int]) -> Extension:
    g = min(generators)
    return Extension(c.theory, ids_of(g), _fired_ids(c.fired[g]))


def m_extension_entries(theory: DefaultTheory) -> list[Extension]:
    space = _space(theory)
    candidates = [c for c in space.classes if c.delta_consistent]
    maximal = [
        c for c in candidates if not any(o is not c and theory_subset(c.theory, o.theory) for o in candidates)
    ]
    maximal.sort(key=lambda c: min(c.masks))
    return [_as_extension(c, c.delta_generators) for c in maximal]


def m_extensions(theory: DefaultTheory) -> list[TheoryBase]:
    return [e.theory for e in m_extension_entries(theory)]


def reiter_extension_entries(theory: DefaultTheory) -> list[Extension]:
    space = _space(theory)
    full = (1 << theory.m) - 1
    out = []
    for idx, c in enumerate(space.classes):
        gamma = full & ~c.refuted
        if space.class_of[gamma] == idx:
            out.append((min(c.masks), Extension(c.theory, ids_of(gamma), _fired_ids(c.fired[gamma]))))
    return [e for _, e in sorted(out, key=lambda t: t[0])]


def reiter_extensions(theory: DefaultTheory) -> list[TheoryBase]:
    return [e.theory for e in reiter_extension_entries(theory)]


def is_normal(theory: DefaultTheory) -> bool:
    return all(equivalent(d.justification, d.consequent) for d in theory.defaults)


def m_credulous(theory: DefaultTheory, p: Formula) -> bool:
    return any(e.entails(p) for e in m_extensions(theory))
