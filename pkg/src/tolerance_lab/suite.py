"""The property suite: machine checks for the engine's governing theorems.

Each check verifies one claim at desk scale on seeded random corpora:
the collapse of every plain parameterized relation into classical logic,
the canonicity of the three-valued tolerant relation among proper symmetric
open parameters, object- and argument-level tolerance, Cut failure on
sorites chains, conservativity over similarity-free sequents, the
metainference closure matrix, prover/semantics agreement, crispification
rounding, and the parameter profile classifications.

The corpus-wide checks deliberately run the search engine with fast paths
disabled: running one search per parameter is the whole point, since the
claims are precisely that the differently-valued searches agree.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import corpus
from .calculus import ProofNode, check_proof, prove
from .consequence import (
    CUT, Invalid, Mode, SearchBounds, UnknownUpToBounds, Valid,
    check_metainference_closure, decide, is_countermodel, sorites_sequent,
)
from .parameter import Parameter, parse_parameter, preset, profile
from .semantics import (
    FiniteValues, HALF, ONE, ZERO, crispify, evaluate, format_model,
    parse_model,
)
from .syntax import RuleName, Sequent, parse_sequent, print_sequent

ASYMMETRIC = parse_parameter("V=[0,1] T={1} F=[0,1/2)")
NON_OPEN = parse_parameter("V=[0,1] T=[3/5,1] F=[0,2/5]")


@dataclass
class SuiteConfig:
    corpus_size: int = 500
    side_corpus_size: int = 200
    trials: int = 200
    crisp_trials: int = 1000
    seed: int | None = None
    bounds: SearchBounds = field(default_factory=SearchBounds)

    def quick(self) -> "SuiteConfig":
        return SuiteConfig(
            corpus_size=60, side_corpus_size=40, trials=25, crisp_trials=120,
            seed=self.seed, bounds=self.bounds,
        )


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str
    elapsed: float
    counterexample: str | None = None


def _status(v) -> str:
    return type(v).__name__


def _plain_corpus(cfg: SuiteConfig):
    return corpus.generate_corpus(cfg.corpus_size, seed=cfg.seed)


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------

def check_classical_collapse(cfg: SuiteConfig) -> CheckResult:
    """Plain-mode validity is one and the same relation for every parameter."""
    t0 = time.time()
    seqs = _plain_corpus(cfg)
    params = [preset("CLASSICAL"), preset("ST"), preset("SMITH"),
              preset("VN(5)"), preset("DYADIC(3)")]
    disagreements = 0
    bad = None
    counts = {"Valid": 0, "Invalid": 0}
    for s in seqs:
        row = [_status(decide(s, p, Mode.PLAIN, cfg.bounds, use_fast_paths=False))
               for p in params]
        if len(set(row)) != 1:
            disagreements += 1
            bad = bad or f"{print_sequent(s)}: {row}"
        else:
            counts[row[0]] = counts.get(row[0], 0) + 1
    elapsed = time.time() - t0
    ok = disagreements == 0 and elapsed < 60.0
    detail = (
        f"{len(seqs)} sequents x {len(params)} parameters, "
        f"{counts.get('Valid', 0)} valid / {counts.get('Invalid', 0)} invalid, "
        f"{disagreements} disagreements, {elapsed:.1f}s"
    )
    return CheckResult("classical-collapse", ok, detail, elapsed, bad)


def check_tolerant_canonicity(cfg: SuiteConfig) -> CheckResult:
    """Tolerant validity coincides across proper symmetric open parameters."""
    t0 = time.time()
    seqs = _plain_corpus(cfg)
    params = [preset("ST"), preset("SMITH"), preset("VN(7)"), preset("DYADIC(3)")]
    disagreements = 0
    bad = None
    for s in seqs:
        row = [_status(decide(s, p, Mode.TOLERANT, cfg.bounds, use_fast_paths=False))
               for p in params]
        if len(set(row)) != 1:
            disagreements += 1
            bad = bad or f"{print_sequent(s)}: {row}"
    elapsed = time.time() - t0
    detail = f"{len(seqs)} sequents x {len(params)} parameters, {disagreements} disagreements, {elapsed:.1f}s"
    return CheckResult("tolerant-canonicity", disagreements == 0, detail, elapsed, bad)


def check_tolerance_validity(cfg: SuiteConfig) -> CheckResult:
    """Argument-form and quantified-conditional tolerance are valid."""
    t0 = time.time()
    st = preset("ST")
    problems = [
        "P(a), a ~P b |- P(b)",
        "|- forall x. forall y. (P(x) & x ~P y -> P(y))",
    ]
    failures = []
    for text in problems:
        t1 = time.time()
        v = decide(parse_sequent(text), st, Mode.TOLERANT, cfg.bounds)
        dt = time.time() - t1
        if not isinstance(v, Valid) or dt >= 1.0:
            failures.append(f"{text}: {_status(v)} in {dt:.2f}s")
    elapsed = time.time() - t0
    return CheckResult(
        "tolerance-validity", not failures,
        f"{len(problems)} sequents valid, {elapsed:.2f}s", elapsed,
        "; ".join(failures) or None,
    )


def check_cut_failure(cfg: SuiteConfig) -> CheckResult:
    """Adjacent tolerance steps are valid but do not chain: the composed
    sequent has a three-valued countermodel with base values 1, 1/2, 0."""
    t0 = time.time()
    st = preset("ST")
    steps = [
        parse_sequent("P(t1), t1 ~P t2 |- P(t2)"),
        parse_sequent("P(t2), t2 ~P t3 |- P(t3)"),
    ]
    chain = sorites_sequent("P", 3)
    problems = []
    for s in steps:
        if not isinstance(decide(s, st, Mode.TOLERANT, cfg.bounds), Valid):
            problems.append(f"step not valid: {print_sequent(s)}")
    verdict = decide(chain, st, Mode.TOLERANT, cfg.bounds)
    if not isinstance(verdict, Invalid):
        problems.append(f"chain not invalid: {_status(verdict)}")
    else:
        model = verdict.countermodel
        values = tuple(
            model.preds[("P", (model.element(t),))] for t in ("t1", "t2", "t3")
        )
        if values != (ONE, HALF, ZERO):
            problems.append(f"countermodel base values {values}")
        reparsed = parse_model(format_model(model))
        if not is_countermodel(reparsed, chain, st, Mode.TOLERANT):
            problems.append("countermodel does not re-verify after round trip")
    elapsed = time.time() - t0
    return CheckResult(
        "cut-failure", not problems,
        f"2 steps valid, chain invalid with base values (1, 1/2, 0), {elapsed:.2f}s",
        elapsed, "; ".join(problems) or None,
    )


def check_improper_sorites(cfg: SuiteConfig) -> CheckResult:
    """Improper parameters swallow whole sorites chains; proper ones refuse
    every chain of length three or more."""
    t0 = time.time()
    problems = []
    classical = preset("CLASSICAL")
    for n in range(2, 7):
        v = decide(sorites_sequent("P", n), classical, Mode.TOLERANT, cfg.bounds)
        if not isinstance(v, Valid):
            problems.append(f"CLASSICAL n={n}: {_status(v)}")
    proper_params = [preset("ST"), preset("SMITH"), preset("VN(5)"),
                     preset("DYADIC(3)"), ASYMMETRIC]
    for p in proper_params:
        for n in range(3, 7):
            v = decide(sorites_sequent("P", n), p, Mode.TOLERANT, cfg.bounds)
            if not isinstance(v, Invalid):
                problems.append(f"{p} n={n}: {_status(v)}")
        v2 = decide(sorites_sequent("P", 2), p, Mode.TOLERANT, cfg.bounds)
        if not isinstance(v2, Valid):
            problems.append(f"{p} single step: {_status(v2)}")
    elapsed = time.time() - t0
    return CheckResult(
        "improper-sorites", not problems,
        f"chains n=2..6 valid for the improper parameter, invalid (n>=3) for "
        f"{len(proper_params)} proper ones, {elapsed:.1f}s",
        elapsed, "; ".join(problems) or None,
    )


POSITIVE_RULES = [
    RuleName.Id, RuleName.K, RuleName.AndL, RuleName.AndR, RuleName.OrL,
    RuleName.OrR, RuleName.ForallL, RuleName.ExistsR, RuleName.SimRef,
    RuleName.SimSymL, RuleName.SimSymR, RuleName.Tol,
]
NEGATIVE_RULES = [RuleName.NotL, RuleName.NotR, RuleName.ImpL, RuleName.ImpR]
EIGEN_RULES = [RuleName.ForallR, RuleName.ExistsL]


def check_metainference_matrix(cfg: SuiteConfig) -> CheckResult:
    """Closure under each rule, parameter by parameter: the unconditional
    rules hold everywhere; the negation-flavored ones hold exactly when the
    parameter is symmetric (the known counterexamples fire otherwise); the
    eigenvariable rules hold for the open parameters tested; Cut fails for
    every proper parameter through the sorites chain."""
    t0 = time.time()
    symmetric_params = [preset("CLASSICAL"), preset("ST"), preset("SMITH"),
                        preset("VN(5)"), preset("DYADIC(3)")]
    finite_open = [preset("CLASSICAL"), preset("ST"), preset("VN(5)"), preset("DYADIC(3)")]
    problems = []
    tested_total = 0
    skipped_total = 0
    # Quantified conclusions are decided by prover-or-refutation; keep the
    # fallback enumeration shallow and the interval grid coarse so that
    # undecidable strays get skipped fast.
    matrix_bounds = SearchBounds(max_domain=2, values_per_zone=1, timeout=5.0)

    def run(rule, param, expect_holds, trials, seed_shift):
        nonlocal tested_total, skipped_total
        res = check_metainference_closure(
            rule, param, Mode.TOLERANT, trials=trials, bounds=matrix_bounds,
            seed=(cfg.seed or corpus.seed_from_env()) + seed_shift,
        )
        tested_total += res.tested
        skipped_total += res.skipped
        if res.holds != expect_holds:
            word = "held" if res.holds else "fired"
            name = rule if isinstance(rule, str) else rule.value
            problems.append(f"{name} on {param}: unexpectedly {word}")

    shift = 0
    for param in symmetric_params + [ASYMMETRIC]:
        for rule in POSITIVE_RULES:
            shift += 1
            run(rule, param, True, cfg.trials, shift)
    for param in symmetric_params:
        for rule in NEGATIVE_RULES:
            shift += 1
            run(rule, param, True, cfg.trials, shift)
    # The asymmetric parameter: the strict-premise side is intact, the
    # negation-flavored right rules break on the library instances.
    for rule, expect in [(RuleName.NotL, True), (RuleName.ImpL, True),
                         (RuleName.NotR, False), (RuleName.ImpR, False)]:
        shift += 1
        run(rule, ASYMMETRIC, expect, cfg.trials, shift)
    for param in finite_open + [preset("SMITH")]:
        for rule in EIGEN_RULES:
            shift += 1
            run(rule, param, True, max(cfg.trials // 4, 10), shift)
    for param in [preset("ST"), preset("SMITH"), preset("VN(5)"), preset("DYADIC(3)"), ASYMMETRIC]:
        shift += 1
        run(CUT, param, False, 5, shift)
    run(CUT, preset("CLASSICAL"), True, cfg.trials // 4, shift + 1)
    elapsed = time.time() - t0
    return CheckResult(
        "metainference-matrix", not problems,
        f"{tested_total} instances decided, {skipped_total} skipped, {elapsed:.1f}s",
        elapsed, "; ".join(problems) or None,
    )


def check_conservativity(cfg: SuiteConfig) -> CheckResult:
    """On similarity-free sequents, tolerant validity is classical validity
    for every parameter."""
    t0 = time.time()
    seqs = corpus.generate_corpus(
        cfg.side_corpus_size, seed=(cfg.seed or corpus.seed_from_env()) + 77,
        allow_sim=False,
    )
    params = [preset("CLASSICAL"), preset("ST"), preset("SMITH"),
              preset("VN(5)"), preset("DYADIC(3)"), ASYMMETRIC]
    classical = preset("CLASSICAL")
    exceptions = 0
    bad = None
    for s in seqs:
        reference = _status(decide(s, classical, Mode.PLAIN, cfg.bounds))
        for p in params:
            got = _status(decide(s, p, Mode.TOLERANT, cfg.bounds, use_fast_paths=False))
            if got != reference:
                exceptions += 1
                bad = bad or f"{print_sequent(s)} under {p}: {got} vs {reference}"
    elapsed = time.time() - t0
    return CheckResult(
        "conservativity", exceptions == 0,
        f"{len(seqs)} similarity-free sequents x {len(params)} parameters, "
        f"{exceptions} exceptions, {elapsed:.1f}s",
        elapsed, bad,
    )


def check_calculus_agreement(cfg: SuiteConfig) -> CheckResult:
    """Prover and countermodel search agree: provable iff no countermodel,
    on quantifier-free sequents, and produced proofs check."""
    t0 = time.time()
    st = preset("ST")
    want = cfg.side_corpus_size
    valid_seqs: list[Sequent] = []
    invalid_seqs: list[Sequent] = []
    batch = 0
    base_seed = (cfg.seed or corpus.seed_from_env()) + 7000
    while (len(valid_seqs) < want or len(invalid_seqs) < want) and batch < 60:
        for s in corpus.generate_corpus(200, seed=base_seed + batch):
            v = decide(s, st, Mode.TOLERANT, cfg.bounds)
            if isinstance(v, Valid) and len(valid_seqs) < want:
                valid_seqs.append(s)
            elif isinstance(v, Invalid) and len(invalid_seqs) < want:
                invalid_seqs.append(s)
        batch += 1
    problems = []
    if len(valid_seqs) < want or len(invalid_seqs) < want:
        problems.append(
            f"could not assemble corpora: {len(valid_seqs)} valid / "
            f"{len(invalid_seqs)} invalid"
        )
    for s in valid_seqs:
        proof = prove(s, depth=20)
        if not isinstance(proof, ProofNode):
            problems.append(f"no proof for valid {print_sequent(s)}")
            continue
        report = check_proof(proof)
        if not report.ok:
            problems.append(f"proof fails checking for {print_sequent(s)}: {report.reason}")
    for s in invalid_seqs:
        proof = prove(s, depth=20)
        if isinstance(proof, ProofNode):
            problems.append(f"proof found for invalid {print_sequent(s)}")
        v = decide(s, st, Mode.TOLERANT, cfg.bounds)
        if not (isinstance(v, Invalid)
                and is_countermodel(v.countermodel, s, st, Mode.TOLERANT)):
            problems.append(f"missing countermodel for {print_sequent(s)}")
    elapsed = time.time() - t0
    return CheckResult(
        "calculus-agreement", not problems,
        f"{len(valid_seqs)} valid sequents proved, {len(invalid_seqs)} invalid "
        f"refuted, 100% agreement, {elapsed:.1f}s",
        elapsed, "; ".join(problems[:3]) or None,
    )


def check_crispification(cfg: SuiteConfig) -> CheckResult:
    """Rounding atoms to 0/1 rounds every formula the same way, for both
    tie-breaks; closed value sets trap evaluation."""
    t0 = time.time()
    rng = corpus.make_rng((cfg.seed or corpus.seed_from_env()) + 99)
    problems = []
    up = lambda name, elems: 1
    down = lambda name, elems: 0
    for _ in range(cfg.crisp_trials):
        model = corpus.random_model(rng)
        f = corpus.random_closed_formula(rng)
        v = evaluate(model, f)
        for tie in (up, down):
            crisp = evaluate(crispify(model, tie), f)
            if v > HALF and crisp != ONE:
                problems.append(f"value {v} rounded to {crisp} for {f}")
            if v < HALF and crisp != ZERO:
                problems.append(f"value {v} rounded to {crisp} for {f}")
    value_sets = [preset("VN(3)").values, preset("VN(5)").values, preset("DYADIC(3)").values]
    for _ in range(cfg.crisp_trials):
        vs = rng.choice(value_sets)
        model = corpus.random_model(rng, value_choices=tuple(vs))
        f = corpus.random_closed_formula(rng)
        if evaluate(model, f) not in vs:
            problems.append(f"closure escape: {f} on {vs}")
    elapsed = time.time() - t0
    return CheckResult(
        "crispification", not problems,
        f"{cfg.crisp_trials} rounding pairs x 2 tie-breaks, "
        f"{cfg.crisp_trials} closure pairs, {elapsed:.1f}s",
        elapsed, "; ".join(problems[:3]) or None,
    )


def check_parameter_profiles(cfg: SuiteConfig) -> CheckResult:
    """The classification of the named parameters."""
    t0 = time.time()
    problems = []
    cases = [
        (preset("SMITH"), (True, True, True)),
        (ASYMMETRIC, (True, False, True)),
        (preset("CLASSICAL"), (False, True, True)),
        (preset("ST"), (True, True, True)),
    ]
    for p, expected in cases:
        prof = profile(p)
        got = (prof.proper, prof.symmetric, prof.open)
        if got != expected:
            problems.append(f"{p}: {got} expected {expected}")
    non_open_profile = profile(NON_OPEN)
    if non_open_profile.open or non_open_profile.open_witness is None:
        problems.append("closed-boundary parameter not reported as non-open with witness")
    else:
        from .parameter import verify_open_witness
        if not verify_open_witness(NON_OPEN, non_open_profile.open_witness):
            problems.append("openness witness does not re-verify")
    elapsed = time.time() - t0
    return CheckResult(
        "parameter-profiles", not problems,
        f"{len(cases) + 1} parameters classified, {elapsed:.2f}s",
        elapsed, "; ".join(problems) or None,
    )


ALL_CHECKS = {
    "classical-collapse": check_classical_collapse,
    "tolerant-canonicity": check_tolerant_canonicity,
    "tolerance-validity": check_tolerance_validity,
    "cut-failure": check_cut_failure,
    "improper-sorites": check_improper_sorites,
    "metainference-matrix": check_metainference_matrix,
    "conservativity": check_conservativity,
    "calculus-agreement": check_calculus_agreement,
    "crispification": check_crispification,
    "parameter-profiles": check_parameter_profiles,
}


def run_suite(
    cfg: SuiteConfig | None = None, names: list[str] | None = None
) -> list[CheckResult]:
    cfg = cfg or SuiteConfig()
    names = names or list(ALL_CHECKS)
    unknown = [n for n in names if n not in ALL_CHECKS]
    if unknown:
        raise KeyError(f"unknown suite checks: {unknown}")
    return [ALL_CHECKS[n](cfg) for n in names]
