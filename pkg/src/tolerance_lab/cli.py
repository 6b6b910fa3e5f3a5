"""Command-line interface.

Commands: check, prove, checkproof, eval, param, sorites, suite.

Output is a machine-readable JSON record per result by default (one object
per line, schema below); pass ``--format human`` for prose.  Exit codes:
0 valid/success, 1 invalid/failure, 2 unknown or search exhausted,
64 usage error, 66 missing input file.

Record schema (schema version 1): ``{"schema": 1, "engine": ...,
"command": ..., "input": {...}, "verdict": {"status": "valid" | "invalid"
| "unknown", "method": ..., "countermodel": ..., "bounds": {...}},
"timing_ms": ...}``.  Countermodels and proofs are embedded in their text
formats and re-verify on load.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict

from . import __version__
from .calculus import (
    ProofNode, SearchFailure, check_proof, format_proof, parse_proof, prove,
)
from .consequence import (
    Invalid, Mode, SearchBounds, UnknownUpToBounds, Valid, Verdict, decide,
    sorites_sequent,
)
from .parameter import (
    Parameter, format_parameter, parse_parameter, profile, validate_parameter,
)
from .semantics import evaluate, format_model, parse_model
from .syntax import ParseError, parse_formula, parse_sequent, print_sequent
from .suite import ALL_CHECKS, SuiteConfig, run_suite

EX_VALID = 0
EX_INVALID = 1
EX_UNKNOWN = 2
EX_USAGE = 64
EX_NOINPUT = 66


class CliError(Exception):
    def __init__(self, message: str, code: int = EX_USAGE):
        super().__init__(message)
        self.code = code


def _engine() -> str:
    return f"tolerance-lab {__version__}"


def _emit(args, payload: dict, human: str) -> None:
    text = human if args.format == "human" else json.dumps(payload, default=str)
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _bounds(args) -> SearchBounds:
    return SearchBounds(
        max_domain=args.max_domain,
        values_per_zone=args.zone_points,
        timeout=args.timeout,
    )


def _mode(args) -> Mode:
    return Mode.TOLERANT if args.tolerant else Mode.PLAIN


def _parameter(args) -> Parameter:
    try:
        p = parse_parameter(args.param)
    except ValueError as e:
        raise CliError(f"bad parameter: {e}")
    violation = validate_parameter(p)
    if violation is not None:
        raise CliError(f"invalid parameter ({violation.clause}): {violation.message}")
    return p


def _verdict_payload(v: Verdict) -> dict:
    if isinstance(v, Valid):
        return {"status": "valid", "method": v.method}
    if isinstance(v, Invalid):
        return {"status": "invalid", "countermodel": format_model(v.countermodel)}
    return {
        "status": "unknown",
        "bounds": {"max_domain": v.max_domain, "value_grid": v.value_grid},
        "note": v.note,
    }


def _verdict_exit(v: Verdict) -> int:
    if isinstance(v, Valid):
        return EX_VALID
    if isinstance(v, Invalid):
        return EX_INVALID
    return EX_UNKNOWN


def _record(args, command: str, inputs: dict, body: dict, started: float) -> dict:
    return {
        "schema": 1,
        "engine": _engine(),
        "command": command,
        "input": inputs,
        **body,
        "timing_ms": round((time.time() - started) * 1000, 3),
    }


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_check(args) -> int:
    started = time.time()
    try:
        s = parse_sequent(args.sequent)
    except ParseError as e:
        raise CliError(f"bad sequent: {e}")
    p = _parameter(args)
    mode = _mode(args)
    verdict = decide(
        s, p, mode, _bounds(args),
        use_fast_paths=not args.no_fast_path,
        prover_depth=args.depth,
    )
    payload = _record(
        args, "check",
        {
            "sequent": print_sequent(s),
            "parameter": format_parameter(p),
            "mode": mode.value,
            "fast_paths": not args.no_fast_path,
        },
        {"verdict": _verdict_payload(verdict)},
        started,
    )
    if isinstance(verdict, Valid):
        human = f"Valid ({verdict.method})"
    elif isinstance(verdict, Invalid):
        human = "Invalid; countermodel:\n" + format_model(verdict.countermodel).rstrip()
    else:
        note = f" ({verdict.note})" if verdict.note else ""
        human = (
            f"Unknown up to bounds: domains <= {verdict.max_domain}, "
            f"grid {verdict.value_grid}{note}"
        )
    _emit(args, payload, human)
    return _verdict_exit(verdict)


def cmd_prove(args) -> int:
    started = time.time()
    try:
        s = parse_sequent(args.sequent)
    except ParseError as e:
        raise CliError(f"bad sequent: {e}")
    result = prove(s, depth=args.depth, term_pool_extra=args.extra_terms,
                   tol_enabled=not args.no_tol)
    if isinstance(result, SearchFailure):
        payload = _record(
            args, "prove", {"sequent": print_sequent(s), "depth": args.depth},
            {"proof": None, "failure": asdict(result)},
            started,
        )
        _emit(args, payload, f"no proof within depth {args.depth} "
                             f"({result.expanded} sequents expanded)")
        return EX_UNKNOWN
    report = check_proof(result)
    if not report.ok:  # never expected; the prover's output must check
        raise CliError(f"internal error: produced proof fails checking: {report.reason}", 70)
    text = format_proof(result)
    payload = _record(
        args, "prove", {"sequent": print_sequent(s), "depth": args.depth},
        {"proof": text}, started,
    )
    _emit(args, payload, text.rstrip())
    return EX_VALID


def cmd_checkproof(args) -> int:
    started = time.time()
    try:
        with open(args.path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise CliError(str(e), EX_NOINPUT)
    proof = parse_proof(text)
    report = check_proof(proof)
    payload = _record(
        args, "checkproof", {"path": args.path},
        {"ok": report.ok, "path_to_failure": list(report.path), "reason": report.reason},
        started,
    )
    human = "proof checks" if report.ok else (
        f"proof fails at premise path {list(report.path)}: {report.reason}"
    )
    _emit(args, payload, human)
    return EX_VALID if report.ok else EX_INVALID


def cmd_eval(args) -> int:
    started = time.time()
    try:
        with open(args.model, encoding="utf-8") as fh:
            model = parse_model(fh.read())
    except OSError as e:
        raise CliError(str(e), EX_NOINPUT)
    try:
        f = parse_formula(args.formula)
    except ParseError as e:
        raise CliError(f"bad formula: {e}")
    value = evaluate(model, f)
    payload = _record(
        args, "eval", {"model": args.model, "formula": args.formula},
        {"value": str(value)}, started,
    )
    _emit(args, payload, str(value))
    return EX_VALID


def cmd_param(args) -> int:
    started = time.time()
    p = _parameter(args)
    prof = profile(p)
    routes = ["plain mode collapses to the classical relation"]
    if prof.proper and prof.symmetric and prof.open:
        routes.append(
            "tolerant mode coincides with the three-valued strict-tolerant relation"
        )
    if not prof.proper:
        routes.append("improper: tolerant mode validates whole sorites chains")
    payload = _record(
        args, "param", {"parameter": format_parameter(p)},
        {
            "profile": {
                "proper": prof.proper,
                "proper_witness": str(prof.proper_witness) if prof.proper_witness is not None else None,
                "symmetric": prof.symmetric,
                "symmetric_witness": str(prof.symmetric_witness) if prof.symmetric_witness is not None else None,
                "open": prof.open,
                "open_witness": str(prof.open_witness) if prof.open_witness is not None else None,
            },
            "routes": routes,
        },
        started,
    )
    lines = [f"parameter: {format_parameter(p)}"]
    lines.append(f"proper:    {prof.proper}"
                 + (f" (witness {prof.proper_witness})" if prof.proper_witness is not None else ""))
    lines.append(f"symmetric: {prof.symmetric}"
                 + (f" (witness {prof.symmetric_witness})" if prof.symmetric_witness is not None else ""))
    lines.append(f"open:      {prof.open}"
                 + (f" (witness {prof.open_witness})" if prof.open_witness is not None else ""))
    for route in routes:
        lines.append(f"route:     {route}")
    _emit(args, payload, "\n".join(lines))
    return EX_VALID


def cmd_sorites(args) -> int:
    started = time.time()
    if args.n < 2:
        raise CliError("a sorites chain needs n >= 2")
    p = _parameter(args)
    mode = _mode(args)
    bounds = _bounds(args)
    steps = []
    for i in range(1, args.n):
        step = parse_sequent(f"{args.pred}(t{i}), t{i} ~{args.pred} t{i+1} |- {args.pred}(t{i+1})")
        steps.append((i, decide(step, p, mode, bounds)))
    chain = sorites_sequent(args.pred, args.n)
    chain_verdict = decide(chain, p, mode, bounds)
    value_profile = None
    if isinstance(chain_verdict, Invalid):
        m = chain_verdict.countermodel
        value_profile = [
            str(m.preds[(args.pred, (m.element(f"t{i}"),))]) for i in range(1, args.n + 1)
        ]
        if args.plot_data:
            with open(args.plot_data, "w", encoding="utf-8") as fh:
                fh.write("# index\tvalue\n")
                for i, v in enumerate(value_profile, start=1):
                    fh.write(f"{i}\t{v}\n")
    payload = _record(
        args, "sorites",
        {"predicate": args.pred, "n": args.n, "parameter": format_parameter(p),
         "mode": mode.value},
        {
            "steps": [
                {"step": i, **_verdict_payload(v)} for i, v in steps
            ],
            "chain": _verdict_payload(chain_verdict),
            "value_profile": value_profile,
        },
        started,
    )
    lines = []
    for i, v in steps:
        status = _verdict_payload(v)["status"]
        lines.append(f"step {i}: {args.pred}(t{i}), t{i} ~{args.pred} t{i+1} |- {args.pred}(t{i+1})  ->  {status}")
    lines.append(f"chain (n={args.n}): {_verdict_payload(chain_verdict)['status']}")
    if value_profile:
        lines.append("countermodel values along the chain: " + ", ".join(value_profile))
    _emit(args, payload, "\n".join(lines))
    return _verdict_exit(chain_verdict)


def cmd_suite(args) -> int:
    started = time.time()
    names = None
    cfg = SuiteConfig(seed=args.seed)
    if args.spec:
        try:
            with open(args.spec, encoding="utf-8") as fh:
                spec = json.load(fh)
        except OSError as e:
            raise CliError(str(e), EX_NOINPUT)
        except json.JSONDecodeError as e:
            raise CliError(f"bad suite spec: {e}")
        if not spec or not spec.get("checks"):
            raise CliError("suite spec names no checks")
        names = list(spec["checks"])
        if names == ["all"]:
            names = None
        cfg = SuiteConfig(
            corpus_size=spec.get("corpus_size", cfg.corpus_size),
            side_corpus_size=spec.get("side_corpus_size", cfg.side_corpus_size),
            trials=spec.get("trials", cfg.trials),
            crisp_trials=spec.get("crisp_trials", cfg.crisp_trials),
            seed=spec.get("seed", args.seed),
            bounds=SearchBounds(
                max_domain=spec.get("max_domain", 3),
                values_per_zone=spec.get("zone_points", 2),
                timeout=spec.get("timeout", 30.0),
            ),
        )
        corpus_path = spec.get("corpus_path")
        if corpus_path is not None:
            import os
            if not os.path.exists(corpus_path):
                raise CliError(f"corpus file not found: {corpus_path}", EX_NOINPUT)
    if args.quick:
        cfg = cfg.quick()
    if args.checks:
        names = args.checks
    try:
        results = run_suite(cfg, names)
    except KeyError as e:
        raise CliError(str(e))
    failures = 0
    for r in results:
        line = f"{'PASS' if r.ok else 'FAIL'}  {r.name:<24} {r.detail}"
        if not r.ok and r.counterexample:
            line += f"\n      first counterexample: {r.counterexample}"
        if args.format == "human":
            print(line)
        else:
            print(json.dumps({
                "schema": 1, "engine": _engine(), "command": "suite",
                "check": r.name, "ok": r.ok, "detail": r.detail,
                "counterexample": r.counterexample,
                "timing_ms": round(r.elapsed * 1000, 1),
            }))
        failures += 0 if r.ok else 1
    summary = f"{len(results) - failures}/{len(results)} checks passed in {time.time() - started:.1f}s"
    if args.format == "human":
        print(summary)
    return EX_VALID if failures == 0 else EX_INVALID


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _add_engine_flags(sub) -> None:
    sub.add_argument("--param", default="CLASSICAL",
                     help="parameter preset or literal, e.g. ST or 'V=[0,1] T=(1/2,1] F=[0,1/2)'")
    group = sub.add_mutually_exclusive_group()
    group.add_argument("--tolerant", action="store_true",
                       help="impose the tolerance constraint on countermodels")
    group.add_argument("--plain", dest="tolerant", action="store_false")
    sub.set_defaults(tolerant=False)
    sub.add_argument("--max-domain", type=int, default=3)
    sub.add_argument("--zone-points", type=int, default=2,
                     help="grid points per open zone for interval value spaces")
    sub.add_argument("--timeout", type=float, default=30.0)
    sub.add_argument("--depth", type=int, default=20, help="proof search depth")
    sub.add_argument("--no-fast-path", action="store_true",
                     help="always search the parameter directly")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tolerance-lab",
        description="Degree-valued consequence engine with countermodel search "
                    "and a cut-free similarity sequent calculus.",
    )
    parser.add_argument("--version", action="version", version=_engine())
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("check", help="decide a sequent")
    sub.add_argument("sequent")
    _add_engine_flags(sub)
    sub.add_argument("--format", choices=("human", "record"), default="record")
    sub.add_argument("--out", help="write the result to a file")
    sub.set_defaults(fn=cmd_check)

    sub = subs.add_parser("prove", help="search for a proof")
    sub.add_argument("sequent")
    sub.add_argument("--depth", type=int, default=20)
    sub.add_argument("--extra-terms", type=int, default=1)
    sub.add_argument("--no-tol", action="store_true",
                     help="disable the tolerance rule (plain-mode calculus)")
    sub.add_argument("--format", choices=("human", "record"), default="human")
    sub.add_argument("--out")
    sub.set_defaults(fn=cmd_prove)

    sub = subs.add_parser("checkproof", help="check a proof file")
    sub.add_argument("path")
    sub.add_argument("--format", choices=("human", "record"), default="record")
    sub.add_argument("--out")
    sub.set_defaults(fn=cmd_checkproof)

    sub = subs.add_parser("eval", help="evaluate a formula in a model file")
    sub.add_argument("model")
    sub.add_argument("formula")
    sub.add_argument("--format", choices=("human", "record"), default="record")
    sub.add_argument("--out")
    sub.set_defaults(fn=cmd_eval)

    sub = subs.add_parser("param", help="profile a parameter")
    sub.add_argument("param")
    sub.add_argument("--format", choices=("human", "record"), default="human")
    sub.add_argument("--out")
    sub.set_defaults(fn=cmd_param)

    sub = subs.add_parser("sorites", help="step and chain verdicts for a sorites sequence")
    sub.add_argument("pred")
    sub.add_argument("n", type=int)
    _add_engine_flags(sub)
    sub.add_argument("--plot-data", help="write index/value pairs for the countermodel")
    sub.add_argument("--format", choices=("human", "record"), default="human")
    sub.add_argument("--out")
    sub.set_defaults(fn=cmd_sorites)

    sub = subs.add_parser("suite", help="run the property suite")
    sub.add_argument("spec", nargs="?", help="JSON suite spec")
    sub.add_argument("--checks", nargs="*", help="subset of checks to run")
    sub.add_argument("--quick", action="store_true", help="reduced trial counts")
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--format", choices=("human", "record"), default="human")
    sub.set_defaults(fn=cmd_suite)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage problems; remap to the documented code
        if e.code not in (0, None):
            return EX_USAGE
        return 0
    try:
        return args.fn(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return EX_USAGE


if __name__ == "__main__":
    sys.exit(main())
