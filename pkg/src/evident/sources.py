"""Sources of evidence: elementary events, their probabilities, and exact belief.

Each source ``i`` is reliable with prior probability ``alpha_i``; when it is
reliable its inference rules are added to the logic.  An elementary event is
identified by the set ``sigma`` of reliable source ids, and ``K_sigma`` is the
closure of the facts under the rules of those sources.  Belief in ``d`` is the
probability of landing in an event whose ``K_sigma`` entails ``d``.

Subsets are enumerated as bitmasks: source id ``i`` is bit ``i - 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Union

from .errors import ContradictorySources, check_size
from .logic import TOP, Formula, Implies, InferenceRule, TheoryBase, fixpoint

SigmaIndex = frozenset  # of source ids


@dataclass(frozen=True)
class Source:
    id: int
    alpha: float
    rules: tuple[InferenceRule, ...]
    label: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "rules", tuple(self.rules))
        if not 0.0 <= self.alpha <= 1.0 or math.isnan(self.alpha):
            raise ValueError(f"source {self.id}: alpha {self.alpha} not in [0, 1]")
        if not self.rules:
            raise ValueError(f"source {self.id}: needs at least one rule")

    @classmethod
    def material(cls, id: int, a: Formula, c: Formula, alpha: float, label: str | None = None) -> "Source":
        """Rule that allows contraposition: vouches for the implication a -> c."""
        return cls(id, alpha, (InferenceRule(TOP, Implies(a, c)),), label)

    @classmethod
    def inference(cls, id: int, a: Formula, c: Formula, alpha: float, label: str | None = None) -> "Source":
        """Rule without contraposition: from a conclude c."""
        return cls(id, alpha, (InferenceRule(a, c),), label)

    @property
    def name(self) -> str:
        return self.label if self.label is not None else str(self.id)


@dataclass(frozen=True)
class DS:
    """Independent priors, renormalised over the consistent events."""


@dataclass(frozen=True)
class Prioritized:
    """Levels of source ids, highest priority first."""

    levels: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "levels", tuple(frozenset(lv) for lv in self.levels))


Probability = Union[DS, Prioritized]


@dataclass(frozen=True)
class EvidenceModel:
    facts: tuple[Formula, ...] = ()
    sources: tuple[Source, ...] = ()
    probability: Probability = DS()
    # flattened rules of all sources and, per source bit, their positions
    _rules: tuple[InferenceRule, ...] = field(init=False, repr=False, compare=False)
    _positions: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "facts", tuple(self.facts))
        object.__setattr__(self, "sources", tuple(self.sources))
        m = len(self.sources)
        ids = sorted(s.id for s in self.sources)
        if ids != list(range(1, m + 1)):
            raise ValueError(f"source ids must be exactly 1..{m}, got {ids}")
        if isinstance(self.probability, Prioritized):
            seen: list[int] = []
            for level in self.probability.levels:
                seen.extend(level)
            if sorted(seen) != ids or any(not lv for lv in self.probability.levels):
                raise ValueError("priority levels must partition the source ids")
        by_id = sorted(self.sources, key=lambda s: s.id)
        rules: list[InferenceRule] = []
        positions = []
        for s in by_id:
            positions.append(tuple(range(len(rules), len(rules) + len(s.rules))))
            rules.extend(s.rules)
        object.__setattr__(self, "_rules", tuple(rules))
        object.__setattr__(self, "_positions", tuple(positions))

    @property
    def m(self) -> int:
        return len(self.sources)

    @property
    def alphas(self) -> tuple[float, ...]:
        return tuple(s.alpha for s in sorted(self.sources, key=lambda s: s.id))

    def source(self, i: int) -> Source:
        for s in self.sources:
            if s.id == i:
                return s
        raise KeyError(i)

    def with_probability(self, probability: Probability) -> "EvidenceModel":
        return EvidenceModel(self.facts, self.sources, probability)

    def mask(self, sigma: Iterable[int]) -> int:
        mask = 0
        for i in sigma:
            if not 1 <= i <= self.m:
                raise ValueError(f"source id {i} not in 1..{self.m}")
            mask |= 1 << (i - 1)
        return mask

    def active_rules(self, mask: int) -> list[int]:
        out: list[int] = []
        for bit, pos in enumerate(self._positions):
            if mask >> bit & 1:
                out.extend(pos)
        return out

    def rule_owner(self, position: int) -> int:
        for bit, pos in enumerate(self._positions):
            if position in pos:
                return bit + 1
        raise IndexError(position)


def sigma_of(mask: int) -> SigmaIndex:
    return frozenset(i + 1 for i in range(mask.bit_length()) if mask >> i & 1)


@dataclass(frozen=True)
class Closure:
    """``K_sigma`` for one elementary event, with the sources whose rules fired."""

    theory: TheoryBase
    fired: frozenset[int]  # rule positions


def k_sigma(model: EvidenceModel, sigma: Iterable[int]) -> TheoryBase:
    mask = model.mask(sigma)
    return fixpoint(model.facts, model._rules, model.active_rules(mask))[0]


def closures(model: EvidenceModel) -> tuple[Closure | None, ...]:
    check_size(model.m)
    if isinstance(model.probability, Prioritized):
        model = model.with_probability(DS())
    return _closures(model)


@lru_cache(maxsize=64)
def _closures(model: EvidenceModel) -> tuple[Closure | None, ...]:
    """``K_sigma`` for every mask, or None where it is inconsistent.

    Inconsistency is inherited by supersets, so a mask with an inconsistent
    one-bit-smaller subset is skipped without any closure computation.  The
    remaining ones are seeded with the rules already fired by their subsets.
    """
    table: list[Closure | None] = [None] * (1 << model.m)
    for mask in range(1 << model.m):
        seed: frozenset[int] = frozenset()
        dead = False
        for bit in range(model.m):
            if mask >> bit & 1:
                sub = table[mask ^ (1 << bit)]
                if sub is None:
                    dead = True
                    break
                seed |= sub.fired
        if dead:
            continue
        theory, fired = fixpoint(model.facts, model._rules, model.active_rules(mask), seed)
        if theory.consistent():
            table[mask] = Closure(theory, fired)
    return tuple(table)


def consistent(model: EvidenceModel, mask: int) -> bool:
    return closures(model)[mask] is not None


def rho(model: EvidenceModel, sigma: Iterable[int]) -> float:
    return _rho(model.alphas, model.mask(sigma), (1 << model.m) - 1)


def _rho(alphas: tuple[float, ...], mask: int, scope: int) -> float:
    """Product of alpha over the set bits and (1 - alpha) over the clear bits of ``scope``."""
    out = 1.0
    for bit, a in enumerate(alphas):
        if scope >> bit & 1:
            out *= a if mask >> bit & 1 else 1.0 - a
    return out


@lru_cache(maxsize=64)
def ds_distribution(model: EvidenceModel) -> tuple[float, ...]:
    table = closures(model)
    full = (1 << model.m) - 1
    weights = [_rho(model.alphas, mask, full) if table[mask] is not None else 0.0 for mask in range(len(table))]
    k = math.fsum(weights)
    if k <= 0.0:
        raise ContradictorySources(
            "no consistent combination of sources has positive probability"
            if table[0] is not None
            else "the facts are inconsistent"
        )
    return tuple(w / k for w in weights)


def normaliser(model: EvidenceModel) -> float:
    """Total prior mass of the consistent events."""
    table = closures(model)
    full = (1 << model.m) - 1
    return math.fsum(_rho(model.alphas, mask, full) for mask in range(len(table)) if table[mask] is not None)


@lru_cache(maxsize=64)
def prioritized_distribution(model: EvidenceModel) -> tuple[float, ...]:
    """Level-by-level conditional renormalisation.

    Given the reliable set R chosen at higher levels, the sources of the next
    level are drawn from their independent priors conditioned on the result
    staying consistent with R.
    """
    if not isinstance(model.probability, Prioritized):
        raise ValueError("model does not carry priority levels")
    table = closures(model)
    if table[0] is None:
        raise ContradictorySources("the facts are inconsistent")
    alphas = model.alphas
    levels = [model.mask(level) for level in model.probability.levels]
    dist = [0.0] * len(table)

    def descend(depth: int, chosen: int, prob: float) -> None:
        if depth == len(levels):
            dist[chosen] += prob
            return
        scope = levels[depth]
        options = []
        sub = scope
        while True:
            tau = sub
            if table[chosen | tau] is not None:
                w = _rho(alphas, tau, scope)
                if w > 0.0:
                    options.append((tau, w))
            if sub == 0:
                break
            sub = (sub - 1) & scope
        k = math.fsum(w for _, w in options)
        if k <= 0.0:
            raise ContradictorySources(
                f"priority level {depth} has no consistent choice given the sources above it"
            )
        for tau, w in sorted(options):
            descend(depth + 1, chosen | tau, prob * (w / k))

    descend(0, 0, 1.0)
    return tuple(dist)


def distribution(model: EvidenceModel) -> tuple[float, ...]:
    if isinstance(model.probability, Prioritized):
        return prioritized_distribution(model)
    return ds_distribution(model)


def p_ds(model: EvidenceModel, sigma: Iterable[int]) -> float:
    if isinstance(model.probability, Prioritized):
        model = model.with_probability(DS())
    return ds_distribution(model)[model.mask(sigma)]


def p_prioritized(model: EvidenceModel, sigma: Iterable[int]) -> float:
    return prioritized_distribution(model)[model.mask(sigma)]


def bel_exact(model: EvidenceModel, d: Formula) -> float:
    """Probability of being in an event whose K_sigma entails d."""
    table = closures(model)
    dist = distribution(model)
    return math.fsum(
        p for mask, p in enumerate(dist) if p > 0.0 and table[mask] is not None and table[mask].theory.entails(d)
    )
