import json

import pytest

from tolerance_lab.cli import main
from tolerance_lab.consequence import Mode, is_countermodel
from tolerance_lab.parameter import parse_parameter
from tolerance_lab.semantics import parse_model
from tolerance_lab.syntax import parse_sequent


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestCheck:
    def test_valid_exit_zero(self, capsys):
        code, out, _ = run(capsys, "check", "P(a), a ~P b |- P(b)",
                           "--param", "ST", "--tolerant")
        assert code == 0
        record = json.loads(out)
        assert record["verdict"]["status"] == "valid"

    def test_invalid_exit_one_with_countermodel(self, capsys):
        code, out, _ = run(capsys, "check", "P(t1), t1 ~P t2, t2 ~P t3 |- P(t3)",
                           "--param", "ST", "--tolerant")
        assert code == 1
        record = json.loads(out)
        model = parse_model(record["verdict"]["countermodel"])
        s = parse_sequent(record["input"]["sequent"])
        p = parse_parameter(record["input"]["parameter"])
        assert is_countermodel(model, s, p, Mode.TOLERANT)

    def test_default_parameter_is_classical_plain(self, capsys):
        code, out, _ = run(capsys, "check", "P(a) |- P(b)")
        assert code == 1
        record = json.loads(out)
        assert record["input"]["mode"] == "plain"
        assert record["input"]["parameter"] == "V={0,1} T={1} F={0}"

    def test_unknown_exit_two(self, capsys):
        # valid but out of reach for a depth-1 proof search
        code, out, _ = run(capsys, "check", "|- forall x. (P(x) | !P(x))",
                           "--param", "ST", "--tolerant", "--depth", "1")
        assert code == 2
        assert json.loads(out)["verdict"]["status"] == "unknown"

    def test_usage_error_exit(self, capsys):
        code, _, err = run(capsys, "check", "P(a |- P(a)")
        assert code == 64 and "error" in err

    def test_invalid_parameter_exit(self, capsys):
        code, _, err = run(capsys, "check", "P(a) |- P(a)",
                           "--param", "V={0,3/10,1} T={1} F={0}")
        assert code == 64 and "closed" in err

    def test_no_fast_path_agrees(self, capsys):
        for seq in ("P(a), a ~P b |- P(b)", "P(a) |- P(b)", "|- P(c) | !P(c)"):
            code1, _, _ = run(capsys, "check", seq, "--param", "SMITH", "--tolerant")
            code2, _, _ = run(capsys, "check", seq, "--param", "SMITH", "--tolerant",
                              "--no-fast-path")
            assert code1 == code2

    def test_human_format(self, capsys):
        code, out, _ = run(capsys, "check", "P(a) |- P(a)", "--format", "human")
        assert code == 0 and out.startswith("Valid")

    def test_record_written_to_file_reverifies(self, capsys, tmp_path):
        out_path = tmp_path / "result.json"
        code, _, _ = run(capsys, "check", "P(a) |- P(b)", "--param", "ST",
                         "--out", str(out_path))
        assert code == 1
        record = json.loads(out_path.read_text())
        model = parse_model(record["verdict"]["countermodel"])
        assert is_countermodel(
            model, parse_sequent(record["input"]["sequent"]),
            parse_parameter(record["input"]["parameter"]), Mode.PLAIN,
        )

    def test_env_seed_fixes_suite_corpora(self, capsys, monkeypatch):
        monkeypatch.setenv("TOLERANCE_LAB_SEED", "777")
        from tolerance_lab import corpus
        first = corpus.generate_corpus(6)
        second = corpus.generate_corpus(6)
        assert first == second


class TestProveAndCheckproof:
    def test_pipeline(self, capsys, tmp_path):
        path = tmp_path / "tolerance.proof"
        code, _, _ = run(capsys, "prove",
                         "|- forall x. forall y. (P(x) & x ~P y -> P(y))",
                         "--out", str(path))
        assert code == 0
        code2, out, _ = run(capsys, "checkproof", str(path))
        assert code2 == 0
        assert json.loads(out)["ok"] is True

    def test_depth_exhaustion_exit_two(self, capsys):
        code, out, _ = run(capsys, "prove", "P(t1), t1 ~P t2, t2 ~P t3 |- P(t3)",
                           "--format", "record")
        assert code == 2
        record = json.loads(out)
        assert record["failure"]["reason"] == "depth-exhausted"
        assert record["failure"]["expanded"] > 0

    def test_proof_record_reverifies(self, capsys):
        from tolerance_lab.calculus import check_proof, parse_proof
        code, out, _ = run(capsys, "prove", "|- P(a) | !P(a)", "--format", "record")
        assert code == 0
        proof = parse_proof(json.loads(out)["proof"])
        assert check_proof(proof).ok

    def test_missing_proof_file(self, capsys):
        code, _, err = run(capsys, "checkproof", "/nonexistent/x.proof")
        assert code == 66

    def test_tampered_proof_detected(self, capsys, tmp_path):
        path = tmp_path / "good.proof"
        run(capsys, "prove", "|- P(a) | !P(a)", "--out", str(path))
        text = path.read_text().replace('"P(a) | !P(a)"', '"P(a) | !P(b)"', 1)
        bad = tmp_path / "bad.proof"
        bad.write_text(text)
        code, _, _ = run(capsys, "checkproof", str(bad))
        assert code == 1


class TestEval:
    def test_paper_model(self, capsys, tmp_path):
        path = tmp_path / "m.model"
        path.write_text(
            "domain d1 d2\nconst a = d1\nconst b = d2\n"
            "pred P(d1) = 0.6\npred P(d2) = 2/5\nsim P(d1,d2) = 3/5\n"
        )
        code, out, _ = run(capsys, "eval", str(path), "(P(a) & a ~P b) -> P(b)",
                           "--format", "human")
        assert code == 0 and out.strip() == "2/5"

    def test_missing_model(self, capsys):
        code, _, _ = run(capsys, "eval", "/nonexistent.model", "P(a)")
        assert code == 66


class TestParam:
    def test_smith_profile(self, capsys):
        code, out, _ = run(capsys, "param", "SMITH")
        assert code == 0
        assert "proper:    True" in out
        assert "symmetric: True" in out
        assert "open:      True" in out
        assert "strict-tolerant" in out

    def test_non_open_witness(self, capsys):
        code, out, _ = run(capsys, "param", "V=[0,1] T=[3/5,1] F=[0,2/5]")
        assert code == 0 and "open:      False" in out and "3/5" in out

    def test_classical_improper(self, capsys):
        code, out, _ = run(capsys, "param", "CLASSICAL")
        assert code == 0 and "improper" in out

    def test_invalid_parameter(self, capsys):
        code, _, err = run(capsys, "param", "V={0,1} T={0,1} F={0}")
        assert code == 64


class TestSorites:
    def test_st_steps_valid_chain_invalid(self, capsys, tmp_path):
        plot = tmp_path / "chain.tsv"
        code, out, _ = run(capsys, "sorites", "P", "5", "--param", "ST",
                           "--tolerant", "--plot-data", str(plot))
        assert code == 1
        assert out.count("->  valid") == 4
        assert "chain (n=5): invalid" in out
        lines = [l for l in plot.read_text().splitlines() if not l.startswith("#")]
        assert len(lines) == 5 and lines[0].split("\t") == ["1", "1"]

    def test_classical_chain_valid(self, capsys):
        code, out, _ = run(capsys, "sorites", "P", "5", "--param", "CLASSICAL",
                           "--tolerant")
        assert code == 0 and "chain (n=5): valid" in out

    def test_two_terms_single_step(self, capsys):
        code, out, _ = run(capsys, "sorites", "P", "2", "--param", "ST", "--tolerant")
        assert code == 0 and "chain (n=2): valid" in out

    def test_bad_n(self, capsys):
        code, _, _ = run(capsys, "sorites", "P", "1", "--param", "ST")
        assert code == 64


class TestSuiteCommand:
    def test_subset_runs(self, capsys):
        code, out, _ = run(capsys, "suite", "--quick", "--checks",
                           "tolerance-validity", "parameter-profiles")
        assert code == 0
        assert out.count("PASS") == 2

    def test_record_format(self, capsys):
        code, out, _ = run(capsys, "suite", "--quick", "--checks",
                           "cut-failure", "--format", "record")
        assert code == 0
        record = json.loads(out.splitlines()[0])
        assert record["check"] == "cut-failure" and record["ok"] is True

    def test_empty_spec_is_usage_error(self, capsys, tmp_path):
        spec = tmp_path / "suite.json"
        spec.write_text("{}")
        code, _, err = run(capsys, "suite", str(spec))
        assert code == 64

    def test_missing_corpus_exit(self, capsys, tmp_path):
        spec = tmp_path / "suite.json"
        spec.write_text(json.dumps({
            "checks": ["parameter-profiles"], "corpus_path": "/nonexistent.seq",
        }))
        code, _, _ = run(capsys, "suite", str(spec))
        assert code == 66

    def test_unknown_check_name(self, capsys):
        code, _, _ = run(capsys, "suite", "--checks", "no-such-check")
        assert code == 64

    def test_spec_driven_run(self, capsys, tmp_path):
        spec = tmp_path / "suite.json"
        spec.write_text(json.dumps({
            "checks": ["parameter-profiles", "tolerance-validity"],
            "corpus_size": 20, "trials": 5,
        }))
        code, out, _ = run(capsys, "suite", str(spec))
        assert code == 0 and out.count("PASS") == 2
