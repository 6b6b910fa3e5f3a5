from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tolerance_lab import corpus
from tolerance_lab.semantics import (
    FiniteValues, Model, ModelError, EvalError, UnitInterval, as_value,
    crispify, domain_names, enumerate_models, evaluate, format_model,
    is_closed, parse_model, value_closure,
)
from tolerance_lab.syntax import Signature, parse_formula

from oracles import ref_eval

F = Fraction
UP = lambda name, elems: 1
DOWN = lambda name, elems: 0


def model_ab(pa, pb, sim):
    return Model(
        ("d1", "d2"),
        {"a": "d1", "b": "d2"},
        {("P", ("d1",)): pa, ("P", ("d2",)): pb},
        {("P", "d1", "d2"): sim},
    )


class TestValues:
    def test_as_value_exact_decimal(self):
        assert as_value("0.6") == F(3, 5)
        assert as_value("3/5") == F(3, 5)
        assert as_value(1) == F(1)

    def test_as_value_rejects_floats_and_range(self):
        with pytest.raises(ModelError):
            as_value(0.6)
        with pytest.raises(ModelError):
            as_value("7/5")


class TestEvaluate:
    def test_negation_clause(self):
        m = model_ab(F(3, 5), F(2, 5), F(1))
        assert evaluate(m, parse_formula("!P(a)")) == F(2, 5)

    def test_conditional_on_borderline_model(self):
        # values .6 / .6 / .4 force the conditional down to .4
        m = model_ab(F(3, 5), F(2, 5), F(3, 5))
        assert evaluate(m, parse_formula("(P(a) & a ~P b) -> P(b)")) == F(2, 5)

    def test_forall_is_minimum(self):
        m = Model(
            ("d1", "d2"), {},
            {("P", ("d1",)): F(1), ("P", ("d2",)): F(1, 2)},
        )
        assert evaluate(m, parse_formula("forall x. P(x)")) == F(1, 2)
        assert evaluate(m, parse_formula("exists x. P(x)")) == F(1)

    def test_unmapped_constant(self):
        m = model_ab(F(1), F(0), F(0))
        with pytest.raises(EvalError):
            evaluate(m, parse_formula("P(q)"))

    def test_sim_reflexive_default(self):
        m = model_ab(F(1), F(0), F(0))
        assert evaluate(m, parse_formula("a ~P a")) == F(1)

    def test_sim_symmetric_lookup(self):
        m = model_ab(F(1), F(0), F(1, 3))
        assert evaluate(m, parse_formula("b ~P a")) == F(1, 3)


class TestModelConstruction:
    def test_rejects_broken_reflexivity(self):
        with pytest.raises(ModelError):
            Model(("d1",), {}, {}, {("P", "d1", "d1"): F(1, 2)})

    def test_rejects_conflicting_symmetry(self):
        with pytest.raises(ModelError):
            Model(
                ("d1", "d2"), {},
                {},
                {("P", "d1", "d2"): F(1), ("P", "d2", "d1"): F(0)},
            )

    def test_isomorphism_invariance(self):
        rng = corpus.make_rng(5)
        for _ in range(30):
            m = corpus.random_model(rng)
            perm = dict(zip(m.domain, reversed(m.domain)))
            m2 = m.rename(perm)
            f = corpus.random_closed_formula(rng)
            assert evaluate(m, f) == evaluate(m2, f)


class TestClosedSets:
    def test_examples(self):
        assert is_closed(FiniteValues.of([0, "1/2", 1])) == (True, None)
        ok, witness = is_closed(FiniteValues.of([0, "3/10", 1]))
        assert not ok and witness == F(3, 10)
        assert is_closed(FiniteValues.of([0, "1/4", "3/4", 1]))[0]
        assert is_closed(UnitInterval()) == (True, None)

    def test_value_closure(self):
        assert tuple(value_closure(["1/2"])) == (F(0), F(1, 2), F(1))
        assert tuple(value_closure(["3/10"])) == (F(0), F(3, 10), F(7, 10), F(1))
        assert tuple(value_closure([])) == (F(0), F(1))

    def test_closure_output_is_closed(self):
        rng = corpus.make_rng(7)
        for _ in range(50):
            seed = [F(rng.randint(0, 8), 8) for _ in range(rng.randint(0, 4))]
            assert is_closed(value_closure(seed))[0]


class TestCrispify:
    def test_above_half_rounds_up(self):
        m = model_ab(F(7, 10), F(1, 5), F(1))
        c = crispify(m, UP)
        assert c.preds[("P", ("d1",))] == F(1)
        assert c.preds[("P", ("d2",))] == F(0)

    def test_half_follows_tie_break(self):
        m = model_ab(F(1, 2), F(1, 2), F(1, 2))
        assert crispify(m, UP).preds[("P", ("d1",))] == F(1)
        assert crispify(m, DOWN).preds[("P", ("d1",))] == F(0)

    def test_compound_follows(self):
        m = model_ab(F(4, 5), F(4, 5), F(1))
        c = crispify(m, DOWN)
        f = parse_formula("P(a) & P(b)")
        assert evaluate(m, f) == F(4, 5)
        assert evaluate(c, f) == F(1)

    def test_sim_symmetry_preserved_at_half(self):
        m = model_ab(F(1, 2), F(1, 2), F(1, 2))
        for tie in (UP, DOWN):
            c = crispify(m, tie)
            assert c.sim_value("P", "d1", "d2") == c.sim_value("P", "d2", "d1")

    def test_rounding_lemma_on_random_models(self):
        rng = corpus.make_rng(11)
        for _ in range(300):
            m = corpus.random_model(rng)
            f = corpus.random_closed_formula(rng)
            v = evaluate(m, f)
            for tie in (UP, DOWN):
                cv = evaluate(crispify(m, tie), f)
                if v > F(1, 2):
                    assert cv == F(1)
                elif v < F(1, 2):
                    assert cv == F(0)

    def test_closed_set_preservation(self):
        rng = corpus.make_rng(13)
        vs = FiniteValues.of([0, "1/4", "1/2", "3/4", 1])
        for _ in range(200):
            m = corpus.random_model(rng, value_choices=tuple(vs))
            f = corpus.random_closed_formula(rng)
            assert evaluate(m, f) in vs


class TestAlgebraicLaws:
    def test_double_negation_demorgan_conditional(self):
        rng = corpus.make_rng(17)
        for _ in range(200):
            m = corpus.random_model(rng)
            a = corpus.random_closed_formula(rng, atom_budget=2)
            b = corpus.random_closed_formula(rng, atom_budget=2)
            va = evaluate(m, a)
            assert evaluate(m, parse_formula("!!" + "(" + str_of(a) + ")")) == va
            from tolerance_lab.syntax import And, Implies, Not, Or
            assert evaluate(m, Not(And(a, b))) == evaluate(m, Or(Not(a), Not(b)))
            assert evaluate(m, Implies(a, b)) == evaluate(m, Or(Not(a), b))

    def test_reference_evaluator_agrees(self):
        rng = corpus.make_rng(19)
        for _ in range(300):
            m = corpus.random_model(rng)
            f = corpus.random_closed_formula(rng)
            assert evaluate(m, f) == ref_eval(m, f)


def str_of(f):
    from tolerance_lab.syntax import print_formula
    return print_formula(f)


class TestEnumeration:
    def test_single_atom_two_values(self):
        sig = Signature({"P": 1}, frozenset(), frozenset({"a"}))
        models = list(enumerate_models(
            sig, 1, FiniteValues.of([0, 1]),
        ))
        assert len(models) == 2

    def test_single_atom_three_values(self):
        sig = Signature({"P": 1}, frozenset(), frozenset())
        models = list(enumerate_models(sig, 1, FiniteValues.of([0, "1/2", 1])))
        assert len(models) == 3

    def test_sim_tables_reflexive_symmetric_count(self):
        # P over 2 elements (4 tables) x one free off-diagonal value (2): 8
        sig = Signature({"P": 1}, frozenset({"P"}), frozenset())
        models = list(enumerate_models(sig, 2, FiniteValues.of([0, 1])))
        assert len(models) == 8
        for m in models:
            assert m.sim_value("P", "d1", "d1") == F(1)
            assert m.sim_value("P", "d1", "d2") == m.sim_value("P", "d2", "d1")

    def test_deterministic_order(self):
        sig = Signature({"P": 1}, frozenset({"P"}), frozenset({"a"}))
        a = [format_model(m) for m in enumerate_models(sig, 2, FiniteValues.of([0, 1]))]
        b = [format_model(m) for m in enumerate_models(sig, 2, FiniteValues.of([0, 1]))]
        assert a == b

    def test_empty_signature_yields_single_model(self):
        sig = Signature({}, frozenset(), frozenset())
        models = list(enumerate_models(sig, 1, FiniteValues.of([0, 1])))
        assert len(models) == 1 and models[0].preds == {}


class TestModelFiles:
    def test_roundtrip(self):
        rng = corpus.make_rng(23)
        for _ in range(20):
            m = corpus.random_model(rng)
            text = format_model(m)
            m2 = parse_model(text)
            assert format_model(m2) == text

    def test_symmetric_entry_autofilled(self):
        m = parse_model("domain d1 d2\nsim P(d2,d1) = 1/3\n")
        assert m.sim_value("P", "d1", "d2") == F(1, 3)

    def test_conflicting_asymmetric_entries_rejected(self):
        with pytest.raises(ModelError):
            parse_model("domain d1 d2\nsim P(d1,d2) = 1\nsim P(d2,d1) = 0\n")

    def test_decimal_values_exact(self):
        m = parse_model("domain d1\npred P(d1) = 0.6\n")
        assert m.preds[("P", ("d1",))] == F(3, 5)
