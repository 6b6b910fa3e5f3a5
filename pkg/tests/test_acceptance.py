"""Acceptance criteria, one test per criterion, at their stated sizes and
tolerances.  Each test prints a PASS/FAIL line (visible with ``pytest -s``;
``pytest -v`` shows the same verdicts as test outcomes).
"""

import time
from fractions import Fraction

import pytest

from tolerance_lab import corpus
from tolerance_lab.consequence import (
    Invalid, Mode, SearchBounds, Valid, decide, sorites_sequent,
)
from tolerance_lab.parameter import parse_parameter, preset
from tolerance_lab.suite import (
    ASYMMETRIC, SuiteConfig, check_calculus_agreement, check_classical_collapse,
    check_conservativity, check_crispification, check_cut_failure,
    check_improper_sorites, check_metainference_matrix,
    check_parameter_profiles, check_tolerance_validity,
    check_tolerant_canonicity,
)

import oracles

F = Fraction


@pytest.fixture(scope="module")
def cfg():
    return SuiteConfig(corpus_size=500, side_corpus_size=200, trials=200,
                       crisp_trials=1000, seed=corpus.DEFAULT_SEED)


def _report(number: int, result) -> None:
    status = "PASS" if result.ok else "FAIL"
    print(f"[criterion {number:02d}] {status} {result.name}: {result.detail}")
    if not result.ok:
        print(f"              first counterexample: {result.counterexample}")
    assert result.ok, f"{result.name}: {result.counterexample}"


def test_criterion_01_paraclassical_equivalence(cfg):
    # 500 sequents, five parameters, zero disagreements, under 60 s
    result = check_classical_collapse(cfg)
    assert "500 sequents" in result.detail
    _report(1, result)


def test_criterion_02_canonicity_equivalence(cfg):
    result = check_tolerant_canonicity(cfg)
    assert "0 disagreements" in result.detail or not result.ok
    _report(2, result)


def test_criterion_03_tolerance_validity(cfg):
    result = check_tolerance_validity(cfg)
    _report(3, result)


def test_criterion_04_cut_failure(cfg):
    result = check_cut_failure(cfg)
    _report(4, result)
    # independent re-evaluation of the emitted countermodel
    st = preset("ST")
    chain = sorites_sequent("P", 3)
    verdict = decide(chain, st, Mode.TOLERANT, cfg.bounds)
    assert isinstance(verdict, Invalid)
    assert oracles.is_countermodel_ref(verdict.countermodel, chain, st, tolerant=True)
    values = sorted(
        verdict.countermodel.preds[("P", (d,))] for d in verdict.countermodel.domain
    )
    assert values == [F(0), F(1, 2), F(1)]


def test_criterion_05_improper_sorites(cfg):
    result = check_improper_sorites(cfg)
    _report(5, result)


def test_criterion_06_metainference_matrix(cfg):
    result = check_metainference_matrix(cfg)
    _report(6, result)


def test_criterion_07_conservativity(cfg):
    result = check_conservativity(cfg)
    assert "200 similarity-free" in result.detail
    _report(7, result)


def test_criterion_08_calculus_agreement(cfg):
    result = check_calculus_agreement(cfg)
    assert "200 valid" in result.detail
    _report(8, result)


def test_criterion_09_crispification(cfg):
    result = check_crispification(cfg)
    assert "1000" in result.detail
    _report(9, result)


def test_criterion_10_parameter_profiles(cfg):
    result = check_parameter_profiles(cfg)
    _report(10, result)
    # the stated classifications, spelled out
    from tolerance_lab.parameter import profile
    smith = profile(preset("SMITH"))
    assert (smith.proper, smith.symmetric, smith.open) == (True, True, True)
    asym = profile(ASYMMETRIC)
    assert (asym.proper, asym.symmetric, asym.open) == (True, False, True)
    non_open = profile(parse_parameter("V=[0,1] T=[3/5,1] F=[0,2/5]"))
    assert not non_open.open and non_open.open_witness is not None
    classical = profile(preset("CLASSICAL"))
    assert not classical.proper
