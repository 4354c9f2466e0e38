"""Corpus format, batch runner, CLI behaviour, exit codes, JSON schema."""

import json
import subprocess
import sys
from fractions import Fraction

import pytest

from odecubic.cli import main
from odecubic.corpus import (CorpusFormatError, derive_seed,
                             load_bundled_corpus, parse_corpus,
                             parse_rational, run_corpus, stable_report_text)


def run_cli(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestCorpusFormat:
    def test_fields_and_comments(self):
        text = """
        # comment
        rec1 | y'' = 6*y^2 | | Theorem5 |
        rec2 | y*y'' + a*(y'^2 + 1) = 0 | a=2, box=0.5:2:0.5:2 | Theorem3 | inv:I1=-6/5@1e-7, inv:c=-5/3
        """
        records = parse_corpus(text)
        assert [r.id for r in records] == ["rec1", "rec2"]
        assert records[1].params["a"] == Fraction(2)
        assert records[1].box == (0.5, 2.0, 0.5, 2.0)
        assert records[1].expectations[0].name == "I1"
        assert records[1].expectations[0].value == pytest.approx(-1.2)
        assert records[1].expectations[0].tol == 1e-7
        assert records[1].expectations[1].value == pytest.approx(-5 / 3)

    def test_duplicate_ids_rejected(self):
        with pytest.raises(CorpusFormatError):
            parse_corpus("a | y'' = 0 | | |\na | y'' = 0 | | |")

    def test_bad_lines_rejected(self):
        with pytest.raises(CorpusFormatError):
            parse_corpus("only-an-id")
        with pytest.raises(CorpusFormatError):
            parse_corpus("a | y'' = 0 | notakv | |")

    def test_rationals(self):
        assert parse_rational("-5/3") == Fraction(-5, 3)
        assert parse_rational("0.25") == Fraction(1, 4)
        assert parse_rational("2") == Fraction(2)

    def test_empty_corpus_runs_clean(self):
        report = run_corpus([])
        assert report["summary"] == {"total": 0, "passed": 0, "failed": 0}

    def test_record_seed_independent_of_order(self):
        assert derive_seed(0, "abc") == derive_seed(0, "abc")
        assert derive_seed(0, "abc") != derive_seed(1, "abc")
        assert derive_seed(0, "abc") != derive_seed(0, "abd")


class TestBundledCorpus:
    def test_all_records_pass(self):
        report = run_corpus(load_bundled_corpus(), seed=0)
        failures = [r["id"] for r in report["records"] if not r["passed"]]
        assert failures == []
        assert report["summary"]["failed"] == 0

    def test_expected_mismatch_is_reported(self):
        records = parse_corpus("bad | y'' = 6*y^2 | | Theorem2 |")
        report = run_corpus(records)
        assert report["summary"]["failed"] == 1
        checks = report["records"][0]["checks"]
        assert checks[0]["expected"] == "Theorem2"
        assert checks[0]["actual"] == "Theorem5"

    def test_unparseable_record_is_failure_not_crash(self):
        records = parse_corpus(
            "bad | y'' = exp(y') | | Theorem2 |\ngood | y'' = 6*y^2 | | Theorem5 |")
        report = run_corpus(records)
        assert report["records"][0]["status"] == "error"
        assert report["records"][0]["passed"] is False
        assert report["records"][1]["passed"] is True

    def test_determinism_equal_seeds(self):
        records = load_bundled_corpus()[:6]
        a = stable_report_text(run_corpus(records, seed=0))
        b = stable_report_text(run_corpus(records, seed=0))
        assert a == b

    def test_schema_validation(self):
        import jsonschema
        from importlib import resources
        schema = json.loads(resources.files("odecubic.data")
                            .joinpath("report_schema.json").read_text())
        report = run_corpus(load_bundled_corpus()[:4], seed=0)
        jsonschema.validate(json.loads(json.dumps(report)), schema)


class TestCli:
    def test_classify_ok(self, capsys):
        code, out, _ = run_cli(["classify", "--ode", "y'' = 6*y^2"], capsys)
        assert code == 0
        assert "Theorem5" in out
        assert "y^2/2" in out  # model equation

    def test_classify_with_param_json(self, capsys):
        code, out, _ = run_cli(["classify", "--ode", "y'' = a*y^3",
                                "--param", "a=1", "--json"], capsys)
        assert code == 0
        payload = json.loads(out)
        assert payload["verdict"] == "Theorem3"
        assert payload["params"]["c"] == pytest.approx(1.0)

    def test_input_error_exit_2(self, capsys):
        code, _, err = run_cli(["classify", "--ode", "y'' = exp(y')"], capsys)
        assert code == 2
        assert "residual-p-dependence" in err

    def test_syntax_error_exit_2(self, capsys):
        code, _, err = run_cli(["classify", "--ode", "y'' = 6**y"], capsys)
        assert code == 2
        assert "offset" in err

    def test_probe_exhausted_exit_3(self, capsys):
        code, _, err = run_cli(["classify", "--ode", "y'' = ln(-1 - x^2)"],
                               capsys)
        assert code == 3

    def test_box_flag(self, capsys):
        code, out, _ = run_cli(["classify", "--ode",
                                "(y - x)*y'' - 2*y'*(y' + 1) = 0",
                                "--box", "0.3,1.0,1.5,2.7"], capsys)
        assert code == 0
        assert "Linearizable" in out

    def test_invariants_dump(self, capsys):
        code, out, _ = run_cli(["invariants", "--ode", "y'' = y^3"], capsys)
        assert code == 0
        assert "I1" in out and "18/5" in out

    def test_invariants_maximal_stops(self, capsys):
        code, out, _ = run_cli(["invariants", "--ode", "y'' = 0"], capsys)
        assert code == 0
        assert "maximal" in out

    def test_invariants_general_route(self, capsys):
        code, out, _ = run_cli(
            ["invariants", "--ode", "y'' = y'/y - y'^2/y", "--json"], capsys)
        assert code == 0
        dump = json.loads(out)
        assert dump["route"] == "general"
        names = {e["name"] for e in dump["entries"]}
        assert {"I3", "I6", "I7", "I8"} <= names

    def test_corpus_mismatch_exit_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.corpus"
        bad.write_text("r | y'' = 6*y^2 | | Theorem2 |\n")
        code, out, _ = run_cli(["corpus", str(bad)], capsys)
        assert code == 1
        assert "FAIL" in out

    def test_corpus_empty_exit_0(self, tmp_path, capsys):
        empty = tmp_path / "empty.corpus"
        empty.write_text("# nothing here\n")
        code, out, _ = run_cli(["corpus", str(empty)], capsys)
        assert code == 0

    def test_corpus_missing_file_exit_2(self, capsys):
        code, _, err = run_cli(["corpus", "/nonexistent.corpus"], capsys)
        assert code == 2

    def test_entry_point_runs(self):
        proc = subprocess.run(
            [sys.executable, "-m", "odecubic.cli", "classify",
             "--ode", "y'' = exp(y)"],
            capture_output=True, text=True)
        assert proc.returncode == 0
        assert "Theorem2" in proc.stdout


def test_corpus_cli_stable_json_deterministic(tmp_path):
    """Two stable-JSON runs with the same seed are byte-identical."""
    sub = tmp_path / "sub.corpus"
    sub.write_text("r1 | y'' = 6*y^2 | | Theorem5 |\n"
                   "r2 | y'' = exp(y) | | Theorem2 | inv:I1=3/5\n")
    outs = []
    for _ in range(2):
        proc = subprocess.run(
            [sys.executable, "-m", "odecubic.cli", "corpus", str(sub),
             "--seed", "0", "--stable-json"],
            capture_output=True, text=True)
        assert proc.returncode == 0
        outs.append(proc.stdout)
    assert outs[0] == outs[1]
