import itertools
import math
import random

import pytest

from conftest import F
from generators import random_formula, random_simple_support_model
from oracles import entailed_by_models, semantic_closure, simple_support_belief, tt_satisfiable
from evident.errors import ContradictorySources, SizeLimit
from evident.logic import BOTTOM, TOP, InferenceRule, entails, theory_equal, TheoryBase
from evident.sources import (
    DS,
    EvidenceModel,
    Prioritized,
    Source,
    bel_exact,
    distribution,
    k_sigma,
    p_ds,
    p_prioritized,
    rho,
)


def subsets(m):
    for r in range(m + 1):
        yield from itertools.combinations(range(1, m + 1), r)


def cases_model():
    return EvidenceModel(
        (), (Source.material(1, F("a"), F("c"), 0.9), Source.material(2, F("!a"), F("c"), 0.8))
    )


def chain_model():
    return EvidenceModel(
        (F("a"),), (Source.material(1, F("a"), F("b"), 0.9), Source.material(2, F("b"), F("c"), 0.8))
    )


def penguin(levels=((1,), (2,))):
    return EvidenceModel(
        (F("penguin"), F("bird")),
        (
            Source.inference(1, F("penguin"), F("!flies"), 0.9),
            Source.inference(2, F("bird"), F("flies"), 0.8),
        ),
        Prioritized(levels),
    )


class TestSourceValidation:
    def test_alpha_range(self):
        with pytest.raises(ValueError):
            Source.material(1, F("a"), F("b"), 1.2)

    def test_needs_rules(self):
        with pytest.raises(ValueError):
            Source(1, 0.5, ())

    def test_ids_form_a_range(self):
        with pytest.raises(ValueError):
            EvidenceModel((), (Source.material(2, F("a"), F("b"), 0.5),))

    def test_levels_partition(self):
        with pytest.raises(ValueError):
            penguin(levels=((1,),))

    def test_material_encoding(self):
        s = Source.material(1, F("a"), F("c"), 0.5)
        assert s.rules == (InferenceRule(TOP, F("a -> c")),)


class TestKSigma:
    def test_first_rule(self, nixon):
        assert k_sigma(nixon, {1}).entails(F("pacifist"))

    def test_empty_sigma_is_facts(self, nixon):
        assert theory_equal(k_sigma(nixon, set()), TheoryBase.of(nixon.facts))

    def test_both_rules_inconsistent(self, nixon):
        assert not k_sigma(nixon, {1, 2}).consistent()


class TestRho:
    def test_all_reliable(self):
        m = EvidenceModel((), tuple(Source.material(i, F("a"), F("b"), 1.0) for i in (1, 2, 3)))
        assert rho(m, {1, 2, 3}) == 1.0

    def test_products(self, nixon):
        assert rho(nixon, {1}) == pytest.approx(0.9 * 0.2, abs=1e-12)
        assert rho(nixon, set()) == pytest.approx(0.1 * 0.2, abs=1e-12)


class TestPds:
    def test_inconsistent_event_has_no_mass(self, nixon):
        assert p_ds(nixon, {1, 2}) == 0.0

    def test_nixon_first_rule(self, nixon):
        # k = 1 - 0.9 * 0.8 over the three consistent events
        assert p_ds(nixon, {1}) == pytest.approx(0.18 / 0.28, abs=1e-9)
        assert p_ds(nixon, {1}) == pytest.approx(9 / 14, abs=1e-9)

    def test_single_source(self):
        m = EvidenceModel((), (Source.material(1, F("a"), F("b"), 0.6),))
        assert p_ds(m, {1}) == pytest.approx(0.6, abs=1e-12)

    def test_contradictory_certain_sources(self, nixon):
        certain = EvidenceModel(nixon.facts, tuple(Source(s.id, 1.0, s.rules) for s in nixon.sources))
        with pytest.raises(ContradictorySources):
            p_ds(certain, {1})

    def test_inconsistent_facts(self):
        m = EvidenceModel((F("a"), F("!a")), (Source.material(1, F("a"), F("b"), 0.5),))
        with pytest.raises(ContradictorySources):
            bel_exact(m, F("b"))


class TestPrioritized:
    def test_dominant_rule_keeps_its_prior(self):
        assert p_prioritized(penguin(), {1}) == pytest.approx(0.9, abs=1e-9)

    def test_dominated_rule(self):
        assert p_prioritized(penguin(), {2}) == pytest.approx(0.1 * 0.8, abs=1e-9)

    def test_remaining_events(self):
        m = penguin()
        assert p_prioritized(m, {1, 2}) == 0.0
        assert p_prioritized(m, set()) == pytest.approx(0.1 * 0.2, abs=1e-9)

    def test_beliefs(self):
        assert bel_exact(penguin(), F("!flies")) == pytest.approx(0.9, abs=1e-9)
        assert bel_exact(penguin(), F("flies")) == pytest.approx(0.08, abs=1e-9)

    def test_single_level_is_ds(self):
        m = penguin(levels=((1, 2),))
        for sigma in subsets(2):
            assert p_prioritized(m, sigma) == pytest.approx(p_ds(m, sigma), abs=1e-12)

    def test_inconsistent_facts(self):
        m = EvidenceModel((BOTTOM,), (Source.material(1, F("a"), F("b"), 0.5),), Prioritized(((1,),)))
        with pytest.raises(ContradictorySources):
            p_prioritized(m, {1})


class TestBelExact:
    def test_nixon(self, nixon):
        a1, a2 = 0.9, 0.8
        assert bel_exact(nixon, F("pacifist")) == pytest.approx(a1 * (1 - a2) / (1 - a1 * a2), abs=1e-9)
        assert bel_exact(nixon, F("!pacifist")) == pytest.approx((1 - a1) * a2 / (1 - a1 * a2), abs=1e-9)

    def test_reasoning_by_cases(self):
        value = bel_exact(cases_model(), F("c"))
        assert value == pytest.approx(0.72, abs=1e-9)
        assert value < min(0.9, 0.8)

    def test_chaining(self):
        assert bel_exact(chain_model(), F("c")) == pytest.approx(0.72, abs=1e-9)

    def test_size_limit(self, monkeypatch):
        monkeypatch.setenv("EVIDENT_MAX_M", "3")
        m = EvidenceModel((), tuple(Source.material(i, F("a"), F("b"), 0.5) for i in range(1, 5)))
        with pytest.raises(SizeLimit):
            bel_exact(m, F("b"))

    def test_cap_ceiling(self, monkeypatch):
        monkeypatch.setenv("EVIDENT_MAX_M", "31")
        with pytest.raises(SizeLimit):
            bel_exact(cases_model(), F("c"))


def _random_rule_model(rng):
    names = ["a", "b", "c", "d"]
    facts = tuple(random_formula(rng, names, 1) for _ in range(rng.randint(0, 2)))
    sources = []
    for i in range(1, rng.randint(0, 5) + 1):
        x, y = random_formula(rng, names), random_formula(rng, names)
        make = Source.material if rng.random() < 0.5 else Source.inference
        sources.append(make(i, x, y, round(rng.uniform(0.05, 0.95), 2)))
    return EvidenceModel(facts, tuple(sources)), names


def brute_force_bel(model, d, names):
    """Independent enumeration: semantic closure per event, explicit renormalisation."""
    weights, hits = [], []
    for sigma in subsets(model.m):
        rules = [(r.premise, r.consequent) for i in sigma for r in model.source(i).rules]
        worlds = semantic_closure(model.facts, rules, names)
        if not worlds:
            continue
        w = math.prod(s.alpha if s.id in sigma else 1 - s.alpha for s in model.sources)
        weights.append(w)
        hits.append(entailed_by_models(worlds, d, names))
    k = math.fsum(weights)
    return math.fsum(w for w, h in zip(weights, hits) if h) / k


def test_bel_matches_brute_force_enumeration():
    rng = random.Random(11)
    checked = 0
    while checked < 40:
        model, names = _random_rule_model(rng)
        if not tt_satisfiable(model.facts):
            continue
        for _ in range(5):
            d = random_formula(rng, names)
            assert bel_exact(model, d) == pytest.approx(brute_force_bel(model, d, names), abs=1e-9)
        checked += 1


def test_distribution_invariants():
    rng = random.Random(3)
    for _ in range(40):
        model, names = _random_rule_model(rng)
        if not tt_satisfiable(model.facts):
            continue
        dist = distribution(model)
        assert math.fsum(dist) == pytest.approx(1.0, abs=1e-9)
        assert bel_exact(model, TOP) == pytest.approx(1.0, abs=1e-9)
        assert bel_exact(model, BOTTOM) == 0.0
        levels = tuple((s.id,) for s in model.sources)
        if levels:
            prio = model.with_probability(Prioritized(levels))
            assert math.fsum(distribution(prio)) == pytest.approx(1.0, abs=1e-9)
        # weakening the query never lowers belief
        d1, d2 = random_formula(rng, names), random_formula(rng, names)
        for x, y in ((d1, d2), (d1, F("a")), (F("a & b"), F("a"))):
            if entails([x], y):
                assert bel_exact(model, x) <= bel_exact(model, y) + 1e-12


def test_single_level_collapse_on_random_models():
    rng = random.Random(5)
    for _ in range(25):
        model, _ = _random_rule_model(rng)
        if model.m == 0 or not tt_satisfiable(model.facts):
            continue
        one = model.with_probability(Prioritized((tuple(range(1, model.m + 1)),)))
        for sigma in subsets(model.m):
            assert p_prioritized(one, sigma) == pytest.approx(p_ds(model, sigma), abs=1e-12)


def test_dempster_rule_equivalence():
    rng = random.Random(2024)
    for _ in range(30):
        model, names = random_simple_support_model(rng)
        props = [s.rules[0].consequent for s in model.sources]
        alphas = [s.alpha for s in model.sources]
        for _ in range(5):
            d = random_formula(rng, names)
            expected = simple_support_belief(props, alphas, d, names)
            assert bel_exact(model, d) == pytest.approx(expected, abs=1e-9)


def test_sandwich_violation_for_any_reliabilities():
    for a1, a2 in [(0.5, 0.5), (0.99, 0.3), (0.1, 0.95)]:
        m = EvidenceModel(
            (), (Source.material(1, F("a"), F("c"), a1), Source.material(2, F("!a"), F("c"), a2))
        )
        assert bel_exact(m, F("c")) == pytest.approx(a1 * a2, abs=1e-12)
        assert bel_exact(m, F("c")) < min(a1, a2)


def test_ds_marker_is_default(nixon):
    assert nixon.probability == DS()
