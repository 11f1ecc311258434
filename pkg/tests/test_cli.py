import json

import pytest

from conftest import setting
from soergel import suites
from soergel.cli import main
from soergel.errors import ConfigError, ParseError, VerificationFailed
from soergel.expr import compute, evaluate
from soergel.report import run_suite
from soergel.suites import RunConfig


class TestCompute:
    def test_examples(self):
        assert compute(setting("additive", 3, 6), "demazure 1 (x1^2)") == "x1 + x2"
        assert compute(setting("multiplicative", 3, 6), "g") == "1 - b*y"
        assert compute(setting("additive", 2, 6), "nablaL 1 (1 (*) x1 (*) 1)") == "1 · [1⊗1]"
        M = setting("multiplicative", 2, 6)
        g21 = compute(M, "g(x2, x1)")
        assert compute(M, "nablaL 1 (1 (*) x1 (*) 1)") == f"({g21}) · [1⊗1]"

    def test_series_and_laws(self):
        M = setting("multiplicative", 2, 6)
        assert compute(M, "fsum(x1, x2)") == "x1 + x2 - b*x1*x2"
        # the inverse is a truncated series, so the cancellation is certified only to N
        assert compute(M, "fsum(x1, finv(x1))") == "0 + O(7)"
        assert compute(M, "fdiff(x1, x1)") == "0 + O(7)"
        assert compute(M, "(x1 - x2) * (x1 + x2)") == "x1^2 - x2^2"
        assert compute(M, "demazure' 1 x1") == "1 - b*x1"
        value, law_level = evaluate(M, "g")
        assert law_level

    def test_elements(self):
        M = setting("multiplicative", 2, 6)
        assert compute(M, "EB 1 (1 (*) x2)").splitlines() == ["(x1 + x2) · [1⊗1]", "-1 · [1⊗x1]"]
        assert compute(M, "m 1 (1 (*) x2)") == "x2 · [1]"
        assert compute(M, "m 1 (x1 * EB 1 (1 (*) 1))") == "x1 · [1]"
        assert compute(M, "m 1 (EB 1 (1 (*) 1) * x1)") == "x1 · [1]"

    @pytest.mark.parametrize("text, pos", [
        ("demazure 1 (x1^2", 16),
        ("foo 1 x1", 0),
        ("x1 +", 4),
    ])
    def test_parse_errors(self, text, pos):
        with pytest.raises(ParseError) as ei:
            compute(setting("additive", 2, 6), text)
        assert ei.value.position == pos


class TestConfig:
    def test_truncation_too_low(self):
        with pytest.raises(ConfigError):
            RunConfig(trunc=1, suite="splittings").validate()

    def test_rank_too_low(self):
        with pytest.raises(ConfigError):
            RunConfig(rank=2, suite="braid").validate()
        cfg = RunConfig(rank=2)
        assert "braid" in cfg.skipped() and "braid" not in cfg.suites()

    def test_unknown_suite(self):
        with pytest.raises(ConfigError):
            RunConfig(suite="nope").validate()

    def test_bad_workers(self, monkeypatch):
        monkeypatch.setenv("SOERGEL_WORKERS", "many")
        with pytest.raises(ConfigError):
            run_suite(RunConfig(rank=2, trunc=4, suite="gkm"))


class TestReport:
    def test_deterministic(self, monkeypatch):
        cfg = RunConfig(fgl="multiplicative", rank=3, trunc=5, suite="demazure,splittings", seed=7)
        a = run_suite(cfg).jsonl(timing=False)
        assert a == run_suite(cfg).jsonl(timing=False)
        monkeypatch.setenv("SOERGEL_WORKERS", "2")
        assert a == run_suite(cfg).jsonl(timing=False)

    def test_seed_changes_inputs(self):
        a = run_suite(RunConfig(rank=2, trunc=5, suite="splittings", seed=1)).jsonl(timing=False)
        b = run_suite(RunConfig(rank=2, trunc=5, suite="splittings", seed=2)).jsonl(timing=False)
        assert a != b

    def test_failure_has_repro(self, monkeypatch):
        def broken(S, cfg, args, inputs):
            inputs["r"] = "x1"
            raise VerificationFailed("made up", 3)

        monkeypatch.setattr(suites, "_gkm", broken)
        rep = run_suite(RunConfig(rank=2, trunc=4, suite="gkm"))
        assert not rep.passed
        rec = rep.failures[0]
        assert rec["status"] == "fail" and rec["certified"] == 3
        assert rec["error"]["type"] == "VerificationFailed"
        assert rec["repro"]["inputs"] == {"r": "x1"}
        assert rec["repro"]["config"]["trunc"] == 4

    def test_records_unique(self):
        rep = run_suite(RunConfig(rank=3, trunc=4, suite="all"))
        ids = [r["id"] for r in rep.records]
        assert len(ids) == len(set(ids))
        assert rep.summary()["total"] == len(ids)


class TestMain:
    def test_rouquier(self, capsys):
        assert main(["--fgl", "additive", "--rank", "2", "--trunc", "8", "--suite", "rouquier"]) == 0
        assert "2/2 checks passed" in capsys.readouterr().out

    def test_config_error(self, capsys):
        assert main(["--trunc", "1", "--suite", "splittings"]) == 2
        assert "config error" in capsys.readouterr().err

    def test_parse_error(self, capsys):
        assert main(["--rank", "2", "--expr", "x1 +"]) == 2
        err = capsys.readouterr().err
        assert err.splitlines()[-1] == "  " + " " * 4 + "^"

    def test_expr(self, capsys):
        assert main(["--fgl", "multiplicative", "--expr", "g"]) == 0
        assert capsys.readouterr().out.strip() == "1 - b*y"

    def test_failing_check(self, monkeypatch, capsys):
        def broken(S, cfg, args, inputs):
            raise VerificationFailed("made up")

        monkeypatch.setattr(suites, "_gkm", broken)
        assert main(["--rank", "2", "--trunc", "4", "--suite", "gkm"]) == 1
        assert "FAIL" in capsys.readouterr().out

    def test_out_file(self, tmp_path, capsys):
        out = tmp_path / "r.jsonl"
        assert main(["--rank", "2", "--trunc", "4", "--suite", "gkm,condition-one", "--out", str(out)]) == 0
        lines = [json.loads(x) for x in out.read_text().splitlines()]
        assert lines[-1]["summary"] and lines[-1]["passed"] == 2
        assert [r["id"] for r in lines[:-1]] == sorted(r["id"] for r in lines[:-1])

    def test_custom_law(self, tmp_path, capsys):
        p = tmp_path / "law.json"
        p.write_text(json.dumps({"base": "Z", "params": [["b", -2]], "trunc": 6, "F": "x1 + x2 - b*x1*x2"}))
        assert main(["--fgl", f"custom:{p}", "--rank", "2", "--trunc", "6", "--suite", "fgl-axioms,rouquier"]) == 0
        assert main(["--fgl", f"custom:{p}", "--trunc", "6", "--expr", "g"]) == 0
        assert capsys.readouterr().out.strip().endswith("1 - b*y + O(6)")

    def test_bad_law(self, capsys):
        assert main(["--fgl", "bogus", "--suite", "gkm"]) == 2
