"""B-extensions and combined numeric/default belief.

B-extensions are the theories whose belief tends to 1 as every reliability
tends to 1.  Under the renormalised independent model they are the maximal
consistent theories ``K_sigma``.  Defaults ``a : b / c`` enter as sources
whose evidence is the rule triple ``a / q``, ``q / c``, ``!b / !q`` over a
fresh atom ``q``; the triple becomes inconsistent exactly when the default
fires against a refuted justification.

Maximality is taken over theories (inclusion of closures).  Maximality over
index sets is computed alongside it and a ``MaximalityDivergence`` warning
is issued when the two readings pick different theories.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .defaults import DefaultRule, DefaultTheory, Extension, ids_of
from .errors import ContradictorySources, ReservedAtomError, check_size
from .logic import Formula, InferenceRule, Not, TheoryBase, Var, atoms, fixpoint, theory_equal, theory_subset
from .sources import DS, EvidenceModel, Prioritized, Probability, Source, bel_exact, closures

Q_PREFIX = "__q"


class MaximalityDivergence(UserWarning):
    """Index-set maximality and theory maximality select different theories."""


def q_atom(i: int) -> Var:
    return Var(f"{Q_PREFIX}{i}")


def is_reserved(name: str) -> bool:
    return name.startswith(Q_PREFIX)


def check_unreserved(f: Formula) -> None:
    bad = sorted(a for a in atoms(f) if is_reserved(a))
    if bad:
        raise ReservedAtomError(f"atom {bad[0]!r} uses the reserved prefix {Q_PREFIX!r}")


@dataclass(frozen=True)
class DefaultEncoding:
    """The theory's defaults as rule triples; default i owns positions 3(i-1)..3(i-1)+2."""

    theory: DefaultTheory
    rules: tuple[InferenceRule, ...] = field(init=False)

    def __post_init__(self) -> None:
        rules = []
        for d in self.theory.defaults:
            q = q_atom(d.id)
            rules += [
                InferenceRule(d.prerequisite, q),
                InferenceRule(q, d.consequent),
                InferenceRule(Not(d.justification), Not(q)),
            ]
        object.__setattr__(self, "rules", tuple(rules))

    def active(self, mask: int) -> list[int]:
        return [3 * bit + k for bit in range(self.theory.m) if mask >> bit & 1 for k in range(3)]

    def j_sigma(self, sigma: Iterable[int]) -> list[InferenceRule]:
        return [self.rules[p] for p in self.active(self.theory.mask(sigma))]


def k_prime_sigma(enc: DefaultEncoding, sigma: Iterable[int]) -> TheoryBase:
    mask = enc.theory.mask(sigma)
    return fixpoint(enc.theory.facts, enc.rules, enc.active(mask))[0]


def k_sigma_restricted(enc: DefaultEncoding, sigma: Iterable[int], d: Formula) -> bool:
    """Membership of a q-free formula in K'_sigma stripped of q-atoms."""
    check_unreserved(d)
    return k_prime_sigma(enc, sigma).entails(d)


@dataclass(frozen=True)
class _Entry:
    mask: int
    theory: TheoryBase  # q-free base
    fired: frozenset[int]


def _maximal(entries: Sequence[_Entry], prune: bool = True) -> list[Extension]:
    """Theory-maximal entries, deduplicated, ordered by smallest generating mask.

    With ``prune`` off every distinct theory is kept.
    """
    classes: list[list[_Entry]] = []
    seen: dict[frozenset, int] = {}
    for e in entries:
        key = frozenset(e.theory.base)
        idx = seen.get(key)
        if idx is None:
            for j, cls in enumerate(classes):
                if theory_equal(cls[0].theory, e.theory):
                    idx = j
                    break
            else:
                idx = len(classes)
                classes.append([])
            seen[key] = idx
        classes[idx].append(e)

    top = [
        j
        for j, cls in enumerate(classes)
        if not prune
        or not any(k != j and theory_subset(cls[0].theory, other[0].theory) for k, other in enumerate(classes))
    ]
    if not prune:
        return _extensions(classes, top)
    masks = [e.mask for e in entries]
    by_sigma = {
        j
        for j, cls in enumerate(classes)
        if any(not any(m != e.mask and m & e.mask == e.mask for m in masks) for e in cls)
    }
    if by_sigma != set(top):
        warnings.warn(
            f"index-set maximality selects {len(by_sigma)} theories, theory maximality {len(top)}; "
            "reporting the theory-maximal ones",
            MaximalityDivergence,
            stacklevel=3,
        )
    return _extensions(classes, top)


def _extensions(classes: list[list[_Entry]], chosen: list[int]) -> list[Extension]:
    out = []
    for j in chosen:
        e = min(classes[j], key=lambda x: x.mask)
        out.append((e.mask, Extension(e.theory, ids_of(e.mask), e.fired)))
    return [x for _, x in sorted(out, key=lambda t: t[0])]


def _source_entries(model: EvidenceModel) -> list[_Entry]:
    table = closures(model)
    return [
        _Entry(mask, c.theory, frozenset(model.rule_owner(p) for p in c.fired))
        for mask, c in enumerate(table)
        if c is not None
    ]


def _prioritized_entries(model: EvidenceModel) -> list[_Entry]:
    """Lexicographic choice: each level takes a theory-maximal consistent extension of the levels above."""
    table = closures(model)
    levels = [model.mask(level) for level in model.probability.levels]
    finals: set[int] = set()

    def descend(depth: int, chosen: int) -> None:
        if depth == len(levels):
            finals.add(chosen)
            return
        scope = levels[depth]
        cands = []
        sub = scope
        while True:
            if table[chosen | sub] is not None:
                cands.append(chosen | sub)
            if sub == 0:
                break
            sub = (sub - 1) & scope
        for c in cands:
            th = table[c].theory
            if not any(
                o != c and theory_subset(th, table[o].theory) and not theory_subset(table[o].theory, th)
                for o in cands
            ):
                descend(depth + 1, c)

    descend(0, 0)
    return [
        _Entry(mask, table[mask].theory, frozenset(model.rule_owner(p) for p in table[mask].fired))
        for mask in sorted(finals)
    ]


def b_extension_entries(model: EvidenceModel) -> list[Extension]:
    if closures(model)[0] is None:
        return []
    if isinstance(model.probability, Prioritized):
        return _maximal(_prioritized_entries(model), prune=False)
    return _maximal(_source_entries(model))


def b_extensions_sources(model: EvidenceModel) -> list[TheoryBase]:
    return [e.theory for e in b_extension_entries(model)]


def _encoded_entries(theory: DefaultTheory) -> tuple[_Entry, ...]:
    check_size(theory.m, "defaults")
    return _build_encoded_entries(theory)


@lru_cache(maxsize=128)
def _build_encoded_entries(theory: DefaultTheory) -> tuple[_Entry, ...]:
    enc = DefaultEncoding(theory)
    n = 1 << theory.m
    fired: list[frozenset[int] | None] = [None] * n
    out = []
    for mask in range(n):
        seed: frozenset[int] = frozenset()
        dead = False
        for bit in range(theory.m):
            if mask >> bit & 1:
                sub = fired[mask ^ (1 << bit)]
                if sub is None:
                    dead = True
                    break
                seed |= sub
        if dead:
            continue
        base, done = fixpoint(theory.facts, enc.rules, enc.active(mask), seed)
        if not base.consistent():
            continue
        fired[mask] = done
        # q_i / c_i firing marks default i as applied
        applied = sorted(p // 3 + 1 for p in done if p % 3 == 1)
        restricted = TheoryBase(tuple(theory.facts) + tuple(theory.defaults[i - 1].consequent for i in applied))
        out.append(_Entry(mask, restricted, frozenset(applied)))
    return tuple(out)


def b_extension_entries_defaults(theory: DefaultTheory) -> list[Extension]:
    return _maximal(_encoded_entries(theory))


def b_extensions_defaults(theory: DefaultTheory) -> list[TheoryBase]:
    return [e.theory for e in b_extension_entries_defaults(theory)]


def b_extensions_normal(theory: DefaultTheory) -> list[TheoryBase]:
    """Direct route for normal theories: maximal consistent Th^sigma(W), no encoding."""
    model = EvidenceModel(
        theory.facts,
        tuple(Source(d.id, 1.0, (d.rule,)) for d in theory.defaults),
    )
    return b_extensions_sources(model)


@dataclass(frozen=True)
class CombinedModel:
    facts: tuple[Formula, ...] = ()
    default_sources: tuple[DefaultRule, ...] = ()
    numeric_sources: tuple[Source, ...] = ()
    probability: Probability = DS()

    def __post_init__(self) -> None:
        object.__setattr__(self, "facts", tuple(self.facts))
        object.__setattr__(self, "default_sources", tuple(self.default_sources))
        object.__setattr__(self, "numeric_sources", tuple(self.numeric_sources))

    @property
    def default_theory(self) -> DefaultTheory:
        return DefaultTheory(self.default_sources, self.facts)


@dataclass(frozen=True)
class BelStar:
    lower: float
    upper: float
    average: float
    per_extension: tuple[float, ...]


def bel_star(model: CombinedModel, d: Formula) -> BelStar:
    """Belief in d within each B-extension of the defaults, then min, max and mean."""
    check_size(len(model.numeric_sources))
    extensions = b_extensions_defaults(model.default_theory)
    if not extensions:
        raise ContradictorySources("the facts are inconsistent; there are no B-extensions")
    values = tuple(
        bel_exact(EvidenceModel(e.base, model.numeric_sources, model.probability), d) for e in extensions
    )
    lower, upper = min(values), max(values)
    average = min(upper, max(lower, math.fsum(values) / len(values)))
    return BelStar(lower, upper, average, values)


def bel_star_lower(model: CombinedModel, d: Formula) -> float:
    return bel_star(model, d).lower


def bel_star_upper(model: CombinedModel, d: Formula) -> float:
    return bel_star(model, d).upper


def bel_star_avg(model: CombinedModel, d: Formula) -> float:
    return bel_star(model, d).average
