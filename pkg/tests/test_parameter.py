from fractions import Fraction

import pytest

from tolerance_lab.parameter import (
    ExplicitSet, Interval, Parameter, bs_contains, bs_mirror, format_parameter,
    is_open, is_proper, is_symmetric, parse_parameter, preset, profile,
    validate_parameter, verify_open_witness,
)
from tolerance_lab.semantics import FiniteValues, UnitInterval, is_closed

F = Fraction

SMITH = preset("SMITH")
ST = preset("ST")
CLASSICAL = preset("CLASSICAL")
ASYM = parse_parameter("V=[0,1] T={1} F=[0,1/2)")
NON_OPEN = parse_parameter("V=[0,1] T=[3/5,1] F=[0,2/5]")


class TestValidate:
    def test_named_presets_are_valid(self):
        for name in ("CLASSICAL", "ST", "SMITH", "VN(2)", "VN(7)", "DYADIC(1)", "DYADIC(5)"):
            assert validate_parameter(preset(name)) is None

    def test_smith_literal_ok(self):
        assert validate_parameter(parse_parameter("V=[0,1] T=(1/2,1] F=[0,1/2)")) is None

    def test_unclosed_value_set(self):
        p = Parameter(FiniteValues.of([0, "3/10", 1]), ExplicitSet.of([1]), ExplicitSet.of([0]))
        violation = validate_parameter(p)
        assert violation is not None and violation.clause == "values"
        assert violation.witness == F(3, 10)

    def test_premise_set_must_contain_one(self):
        p = Parameter(FiniteValues.of([0, 1]), ExplicitSet.of(["3/4"]), ExplicitSet.of([0]))
        violation = validate_parameter(p)
        assert violation is not None and violation.clause == "premise-set"

    def test_premise_set_must_sit_above_half(self):
        p = Parameter(UnitInterval(), Interval(F(1, 2), False, F(1), False), ExplicitSet.of([0]))
        violation = validate_parameter(p)
        assert violation is not None and "1/2" in violation.message

    def test_finite_upset_other_than_one_rejected(self):
        p = Parameter(UnitInterval(), ExplicitSet.of(["3/4", 1]), ExplicitSet.of([0]))
        violation = validate_parameter(p)
        assert violation is not None and "upward" in violation.message

    def test_conclusion_set_checks(self):
        p = Parameter(UnitInterval(), ExplicitSet.of([1]), Interval(F(0), False, F(1, 2), False))
        violation = validate_parameter(p)
        assert violation is not None and violation.clause == "conclusion-set"


class TestProper:
    def test_st_proper_with_half(self):
        assert is_proper(ST) == (True, F(1, 2))

    def test_classical_improper(self):
        assert is_proper(CLASSICAL) == (False, None)

    def test_smith_proper(self):
        assert is_proper(SMITH) == (True, F(1, 2))

    def test_four_valued_variant(self):
        p = parse_parameter("V={0,1/4,3/4,1} T={1} F={0}")
        ok, witness = is_proper(p)
        assert ok and witness == F(1, 4)


class TestSymmetric:
    def test_smith_symmetric(self):
        assert is_symmetric(SMITH) == (True, None)

    def test_st_symmetric(self):
        assert is_symmetric(ST) == (True, None)

    def test_asymmetric_witness(self):
        ok, witness = is_symmetric(ASYM)
        assert not ok
        in_t = bs_contains(ASYM.premise_set, witness)
        in_f_mirror = bs_contains(ASYM.conclusion_set, F(1) - witness)
        assert in_t != in_f_mirror  # the witness breaks one direction

    def test_probe_interval_parameters(self):
        # dense random probing of the mirror condition
        import random
        rng = random.Random(31)
        for p in (SMITH, preset("DYADIC(3)"), NON_OPEN):
            expected, _ = is_symmetric(p)
            broken = False
            for _ in range(10_000):
                q = rng.randint(1, 64)
                x = F(rng.randint(0, q), q)
                if bs_contains(p.premise_set, x) != bs_contains(p.conclusion_set, F(1) - x):
                    broken = True
                    break
            assert expected == (not broken)

    def test_exhaustive_on_finite_values(self):
        for p in (ST, CLASSICAL, preset("VN(6)"), preset("DYADIC(4)")):
            expected, _ = is_symmetric(p)
            broken = any(
                bs_contains(p.premise_set, x) != bs_contains(p.conclusion_set, F(1) - x)
                for x in p.values
            )
            assert expected == (not broken)


class TestOpen:
    def test_finite_always_open(self):
        for p in (ST, CLASSICAL, preset("VN(9)"), preset("DYADIC(2)")):
            assert is_open(p) == (True, None)

    def test_open_interval_family(self):
        for x in ("1/2", "3/5", "9/10"):
            p = parse_parameter(f"V=[0,1] T=({x},1] F=[0,{F(1) - F(x)})")
            assert is_open(p)[0]

    def test_closed_boundary_not_open(self):
        ok, witness = is_open(NON_OPEN)
        assert not ok
        assert witness.boundary == F(3, 5)
        assert verify_open_witness(NON_OPEN, witness)

    def test_smith_open(self):
        assert is_open(SMITH) == (True, None)


class TestProfile:
    def test_triples(self):
        assert _triple(ST) == (True, True, True)
        assert _triple(SMITH) == (True, True, True)
        assert _triple(CLASSICAL) == (False, True, True)
        assert _triple(ASYM) == (True, False, True)
        assert _triple(NON_OPEN) == (True, True, False)


def _triple(p):
    prof = profile(p)
    return (prof.proper, prof.symmetric, prof.open)


class TestPresets:
    def test_vn3_is_st(self):
        assert preset("VN(3)").values == ST.values
        assert preset("VN(3)").premise_set == ST.premise_set
        assert preset("VN(3)").conclusion_set == ST.conclusion_set

    def test_vn_spacing(self):
        assert tuple(preset("VN(5)").values) == (F(0), F(1, 4), F(1, 2), F(3, 4), F(1))

    def test_vn_requires_two(self):
        with pytest.raises(ValueError):
            preset("VN(1)")

    def test_dyadic_values(self):
        v4 = preset("DYADIC(4)").values
        for x in ("0", "1/16", "1/8", "1/4", "1/2", "3/4", "7/8", "15/16", "1"):
            assert F(x) in v4

    def test_dyadic_closed_up_to_16(self):
        for k in range(1, 17):
            assert is_closed(preset(f"DYADIC({k})").values)[0]

    def test_unknown_preset(self):
        with pytest.raises(ValueError):
            preset("FUZZY")


class TestLiterals:
    def test_roundtrip_formatting(self):
        for spec in (
            "V=[0,1] T=(1/2,1] F=[0,1/2)",
            "V={0,1/2,1} T={1} F={0}",
            "V=[0,1] T=[3/5,1] F=[0,2/5]",
        ):
            p = parse_parameter(spec)
            again = parse_parameter(format_parameter(p))
            assert format_parameter(again) == format_parameter(p)

    def test_preset_names_accepted(self):
        assert parse_parameter("st").name == "ST"
        assert parse_parameter("vn(4)").name == "VN(4)"

    def test_general_interval_value_space_rejected(self):
        with pytest.raises(ValueError):
            parse_parameter("V=[0,1/2] T={1} F={0}")

    def test_mirror_helper(self):
        assert bs_mirror(Interval(F(1, 2), True, F(1), False)) == Interval(F(0), False, F(1, 2), True)
        assert bs_mirror(ExplicitSet.of([1])) == ExplicitSet.of([0])
