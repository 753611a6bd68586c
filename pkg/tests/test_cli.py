import json

import pytest
from click.testing import CliRunner

from conftest import fixture_path, fixture_text
from routelens.cli import main
from test_disambig import INSERT_BOTTOM_GOLDEN, INSERT_TOP_GOLDEN


@pytest.fixture
def runner():
    return CliRunner()


ISP_OUT = fixture_path("isp_out.cfg")
ACL = fixture_path("acl_conflict.cfg")
SNIPPET = fixture_path("set_metric.snippet")
SPEC = fixture_path("set_metric.spec.json")
FIXTURES = fixture_path("synth_scripted.json")


class TestParse:
    def test_canonical_output(self, runner):
        result = runner.invoke(main, ["parse", ISP_OUT])
        assert result.exit_code == 0
        assert "route-map ISP_OUT deny 10" in result.output

    def test_json_format(self, runner):
        result = runner.invoke(main, ["parse", ISP_OUT, "--format", "json"])
        assert result.exit_code == 0
        data = json.loads(result.output)
        assert data["diagnostics"] == []

    def test_parse_error_exit_2(self, runner, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text("nonsense\n")
        result = runner.invoke(main, ["parse", str(bad)])
        assert result.exit_code == 2
        assert "error" in result.stderr

    def test_parse_error_json_on_stderr(self, runner, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text("nonsense\n")
        result = runner.invoke(main, ["parse", str(bad), "--format", "json"])
        assert result.exit_code == 2
        err = json.loads(result.stderr)
        assert err["errors"][0]["line"] == 1


class TestOverlaps:
    def test_json(self, runner):
        result = runner.invoke(main, ["overlaps", ISP_OUT])
        assert result.exit_code == 0
        data = json.loads(result.output)
        assert len(data["pairs"]) == 3

    def test_csv(self, runner):
        result = runner.invoke(main, ["overlaps", ISP_OUT, "--format", "csv"])
        assert result.exit_code == 0
        lines = result.output.strip().splitlines()
        assert lines[0] == "policy,seqA,seqB,kind,trivialSubset,witness"
        assert len(lines) == 4

    def test_include_trivial_toggle(self, runner):
        with_trivial = runner.invoke(main, ["overlaps", ACL])
        without = runner.invoke(main, ["overlaps", ACL, "--no-include-trivial"])
        assert len(json.loads(with_trivial.output)["pairs"]) == 1
        assert len(json.loads(without.output)["pairs"]) == 0

    def test_acl_pair_shape(self, runner):
        result = runner.invoke(main, ["overlaps", ACL])
        pair = json.loads(result.output)["pairs"][0]
        assert pair["kind"] == "conflicting"
        assert pair["trivialSubset"] is True


class TestVerify:
    def test_pass(self, runner):
        result = runner.invoke(main, ["verify", "--snippet", SNIPPET, "--spec", SPEC])
        assert result.exit_code == 0
        assert result.output.strip() == "pass"

    def test_match_all_fails_with_feedback(self, runner, tmp_path):
        bad = tmp_path / "bad.snippet"
        bad.write_text("route-map SET_METRIC permit 10\n set metric 55\n")
        result = runner.invoke(main, ["verify", "--snippet", str(bad), "--spec", SPEC])
        assert result.exit_code == 1
        assert "permits an input route" in result.output

    def test_json_format(self, runner):
        result = runner.invoke(
            main, ["verify", "--snippet", SNIPPET, "--spec", SPEC, "--format", "json"]
        )
        data = json.loads(result.output)
        assert data["verdict"] == "pass"


class TestSynthesize:
    ARGS = [
        "synthesize",
        "--intent",
        "Set metric 55 for routes with community 300:3 in prefix 100.0.0.0/16",
        "--fixtures",
        FIXTURES,
    ]

    def test_scripted(self, runner):
        result = runner.invoke(main, self.ARGS)
        assert result.exit_code == 0
        assert "status: verified (attempts: 1)" in result.output

    def test_faulty_recovers(self, runner):
        result = runner.invoke(
            main, self.ARGS + ["--plugin", "faulty", "--fault", "wrong-metric"]
        )
        assert result.exit_code == 0
        assert "attempts: 2" in result.output

    def test_json_format(self, runner):
        result = runner.invoke(main, self.ARGS + ["--format", "json"])
        data = json.loads(result.output)
        assert data["status"] == "verified"
        assert data["spec"]["set"] == {"metric": 55}

    def test_missing_fixtures_exit_2(self, runner):
        result = runner.invoke(main, ["synthesize", "--intent", "whatever routes"])
        assert result.exit_code == 2


class TestDisambiguate:
    BASE = [
        "disambiguate",
        "--config",
        ISP_OUT,
        "--map",
        "ISP_OUT",
        "--snippet",
        SNIPPET,
    ]

    def test_scripted_new_gives_top_insertion(self, runner):
        result = runner.invoke(main, self.BASE + ["--answers", "new"])
        assert result.exit_code == 0
        assert result.output == INSERT_TOP_GOLDEN

    def test_scripted_existing_existing_gives_bottom(self, runner):
        result = runner.invoke(main, self.BASE + ["--answers", "existing,existing"])
        assert result.exit_code == 0
        assert result.output == INSERT_BOTTOM_GOLDEN

    def test_runs_are_reproducible(self, runner):
        a = runner.invoke(main, self.BASE + ["--answers", "new"]).output
        b = runner.invoke(main, self.BASE + ["--answers", "new"]).output
        assert a == b

    def test_interactive_two_option_prompt(self, runner):
        result = runner.invoke(main, self.BASE, input="1\n")
        assert result.exit_code == 0
        assert "OPTION 1:" in result.output
        assert "OPTION 2:" in result.output
        assert "ACTION: permit" in result.output
        assert "ACTION: deny" in result.output
        assert "Network: 100.0.0.0/16" in result.output

    def test_json_format(self, runner):
        result = runner.invoke(
            main, self.BASE + ["--answers", "new", "--format", "json"]
        )
        data = json.loads(result.output)
        assert data["position"] == 0
        assert data["configText"] == INSERT_TOP_GOLDEN

    def test_out_file(self, runner, tmp_path):
        out = tmp_path / "result.cfg"
        result = runner.invoke(
            main, self.BASE + ["--answers", "new", "--out", str(out)]
        )
        assert result.exit_code == 0
        assert out.read_text() == INSERT_TOP_GOLDEN

    def test_exhaustive_ok(self, runner):
        result = runner.invoke(
            main, self.BASE + ["--exhaustive", "--answers", "existing,new"]
        )
        assert result.exit_code == 0
        assert "single insertion point" in result.output

    def test_exhaustive_violation(self, runner):
        result = runner.invoke(
            main, self.BASE + ["--exhaustive", "--answers", "new,existing"]
        )
        assert result.exit_code == 1
        assert "No single insertion point" in result.output

    def test_extra_answers_exit_2(self, runner):
        result = runner.invoke(
            main, self.BASE + ["--answers", "new,new,new"]
        )
        assert result.exit_code == 2

    def test_unknown_map_exit_2(self, runner):
        result = runner.invoke(
            main,
            ["disambiguate", "--config", ISP_OUT, "--map", "NOPE", "--snippet", SNIPPET],
        )
        assert result.exit_code == 2
