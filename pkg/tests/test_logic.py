import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import F
from generators import formulas, random_formula
from oracles import entailed_by_models, semantic_closure, tt_entails, tt_satisfiable
from evident.logic import (
    BOTTOM,
    TOP,
    And,
    Implies,
    InferenceRule,
    MissingAtomError,
    Not,
    TheoryBase,
    Var,
    cnf,
    entails,
    equivalent,
    evaluate,
    fixpoint,
    satisfiable,
    th_closure,
    theory_equal,
    theory_subset,
)

a, b, c, p, q = (Var(n) for n in "abcpq")


class TestEvaluate:
    def test_top(self):
        assert evaluate(TOP, {}) is True

    def test_material_implication(self):
        assert evaluate(Implies(a, c), {"a": True, "c": False}) is False
        assert evaluate(Implies(a, c), {"a": False, "c": False}) is True

    @pytest.mark.parametrize("value", [True, False])
    def test_contradiction(self, value):
        assert evaluate(And(a, Not(a)), {"a": value}) is False

    def test_missing_atom(self):
        with pytest.raises(MissingAtomError):
            evaluate(And(a, b), {"a": True})

    def test_bad_atom_name(self):
        with pytest.raises(ValueError):
            Var("1x")


class TestSatisfiable:
    def test_empty(self):
        assert satisfiable([])

    def test_clash(self):
        assert not satisfiable([p, Not(p)])

    def test_modus_ponens_clash(self):
        assert not satisfiable([Implies(a, c), a, Not(c)])

    def test_bottom(self):
        assert not satisfiable([BOTTOM])
        assert satisfiable([TOP])

    def test_pigeonhole_three_into_two(self):
        # pigeon i in hole j
        x = {(i, j): Var(f"x{i}{j}") for i in range(3) for j in range(2)}
        gamma = [F(f"x{i}0 | x{i}1") for i in range(3)]
        for j in range(2):
            for i in range(3):
                for k in range(i + 1, 3):
                    gamma.append(Not(And(x[i, j], x[k, j])))
        assert not satisfiable(gamma)
        assert satisfiable(gamma[:-1])

    def test_wide_disjunction_uses_definitions(self):
        # (a1 & b1) | ... | (a6 & b6) distributes to 64 clauses; forced through Tseitin
        f = F(" | ".join(f"(a{i} & b{i})" for i in range(6)))
        assert satisfiable([f])
        assert not satisfiable([f] + [F(f"!a{i}") for i in range(6)])
        assert entails([f], F(" | ".join(f"a{i}" for i in range(6))))
        assert len(cnf(f)) < 64


class TestEntails:
    def test_modus_ponens(self):
        assert entails([a, Implies(a, c)], c)

    def test_nothing_from_nothing(self):
        assert not entails([], p)

    def test_contraposition(self):
        assert entails([Not(c), Implies(a, c)], Not(a))

    def test_inconsistent_entails_everything(self):
        assert entails([p, Not(p)], q)

    def test_equivalent(self):
        assert equivalent(F("c & c"), c)
        assert not equivalent(a, b)


@settings(max_examples=300, deadline=None)
@given(st.lists(formulas(), max_size=4), formulas())
def test_entails_matches_truth_tables(gamma, d):
    assert entails(gamma, d) == tt_entails(gamma, d)
    assert satisfiable(gamma) == tt_satisfiable(gamma)


def test_entails_matches_truth_tables_on_ten_atoms():
    rng = random.Random(7)
    names = [f"v{i}" for i in range(10)]
    for _ in range(150):
        gamma = [random_formula(rng, names, 3) for _ in range(rng.randint(1, 6))]
        d = random_formula(rng, names, 3)
        assert entails(gamma, d) == tt_entails(gamma, d)


class TestTheories:
    def test_conjunction_split(self):
        assert theory_equal(TheoryBase.of([And(a, c)]), TheoryBase.of([a, c]))

    def test_strictly_weaker(self):
        assert not theory_equal(TheoryBase.of([a]), TheoryBase.of([a, c]))

    def test_modus_ponens_base(self):
        # truth table over {p, q}: both bases have the single model p=q=true
        assert theory_equal(TheoryBase.of([p, Implies(p, q)]), TheoryBase.of([p, q]))

    def test_subset_reflexive(self):
        k = TheoryBase.of([a, Implies(a, b)])
        assert theory_subset(k, k)

    def test_empty_below_everything(self):
        assert theory_subset(TheoryBase.of([]), TheoryBase.of([p]))

    def test_weakening(self):
        assert theory_subset(TheoryBase.of([F("p | q")]), TheoryBase.of([p]))
        assert not theory_subset(TheoryBase.of([p]), TheoryBase.of([F("p | q")]))

    def test_base_is_deduplicated(self):
        assert TheoryBase.of([a, a, b]).base == (a, b)


@settings(max_examples=100, deadline=None)
@given(st.lists(formulas(), max_size=3), st.lists(formulas(), max_size=3), st.lists(formulas(), max_size=3))
def test_subset_is_a_preorder(x, y, z):
    kx, ky, kz = TheoryBase.of(x), TheoryBase.of(y), TheoryBase.of(z)
    assert theory_subset(kx, kx)
    if theory_subset(kx, ky) and theory_subset(ky, kz):
        assert theory_subset(kx, kz)
    assert theory_equal(kx, ky) == (theory_subset(kx, ky) and theory_subset(ky, kx))


class TestClosure:
    def test_nixon_single_rule(self):
        base = th_closure([F("quaker"), F("republican")], [InferenceRule(F("quaker"), F("pacifist"))])
        assert base.entails(F("pacifist"))

    def test_no_rules_is_plain_closure(self):
        u = [a, Implies(a, b)]
        assert th_closure(u, []).base == tuple(u)

    def test_chained_firing(self):
        base = th_closure([a], [InferenceRule(b, c), InferenceRule(a, b)])
        assert base.entails(c)

    def test_no_contraposition(self):
        base = th_closure([Not(c)], [InferenceRule(a, c)])
        assert not base.entails(Not(a))
        assert entails([Not(c), Implies(a, c)], Not(a))

    def test_fired_positions(self):
        rules = [InferenceRule(a, b), InferenceRule(q, c), InferenceRule(b, p)]
        base, fired = fixpoint([a], rules)
        assert fired == {0, 2}
        assert base.base == (a, b, p)

    def test_active_subset(self):
        rules = [InferenceRule(a, b), InferenceRule(b, c)]
        _, fired = fixpoint([a], rules, active=[1])
        assert fired == frozenset()


closure_rules = st.lists(st.tuples(formulas(max_leaves=4), formulas(max_leaves=4)), max_size=4)


def _rules(pairs):
    return [InferenceRule(x, y) for x, y in pairs]


@settings(max_examples=150, deadline=None)
@given(st.lists(formulas(max_leaves=6), max_size=3), closure_rules)
def test_closure_matches_semantic_fixpoint(u, pairs):
    names = ["a", "b", "c", "d"]
    base = th_closure(u, _rules(pairs))
    expected = semantic_closure(u, pairs, names)
    for probe in [Var(n) for n in names] + [Not(Var(n)) for n in names] + [BOTTOM]:
        assert base.entails(probe) == entailed_by_models(expected, probe, names)


@settings(max_examples=100, deadline=None)
@given(st.lists(formulas(max_leaves=6), max_size=3), closure_rules, st.randoms(use_true_random=False))
def test_closure_properties(u, pairs, rnd):
    rules = _rules(pairs)
    k = th_closure(u, rules)
    # soundness of the fixpoint
    assert all(k.entails(f) for f in u)
    for r in rules:
        if k.entails(r.premise):
            assert k.entails(r.consequent)
    # idempotence
    assert theory_equal(th_closure(k.base, rules), k)
    # declaration order does not matter
    shuffled = rules[:]
    rnd.shuffle(shuffled)
    assert theory_equal(th_closure(u, shuffled), k)
    # monotone in the rule set and in the facts
    assert theory_subset(th_closure(u, rules[:-1]), k)
    assert theory_subset(k, th_closure(list(u) + [a], rules))
