import json

import pytest

from conftest import fixture_path
from routelens.synth import (
    FaultyPlugin,
    GeneratorPlugin,
    PluginError,
    ScriptedPlugin,
    SynthesisRequest,
    classify_query,
    run_repair_loop,
)


INTENT = "Set the metric 55 for routes with community 300:3 and prefix 100.0.0.0/16"


@pytest.fixture
def scripted():
    return ScriptedPlugin.from_file(fixture_path("synth_scripted.json"))


class TestClassify:
    def test_route_map_queries(self):
        assert classify_query("set metric on routes with community 300:3") == "routeMap"
        assert classify_query("deny the prefix 10.0.0.0/8") == "routeMap"

    def test_acl_queries(self):
        assert classify_query("block tcp traffic to host 1.1.1.1 port 80") == "acl"

    def test_unknown(self):
        assert classify_query("make it faster") == "unknown"


class TestScripted:
    def test_replays_fixture(self, scripted):
        req = SynthesisRequest(INTENT)
        assert "set metric 55" in scripted.generate_snippet(req)
        spec = json.loads(scripted.generate_spec(req))
        assert spec["set"] == {"metric": 55}

    def test_no_match_raises(self, scripted):
        with pytest.raises(PluginError):
            scripted.generate_snippet(SynthesisRequest("something else entirely"))


class TestRepairLoop:
    def test_correct_plugin_verifies_first_attempt(self, scripted):
        outcome = run_repair_loop(SynthesisRequest(INTENT), scripted)
        assert outcome.verified and outcome.attempts == 1
        assert outcome.history == ()

    def test_faulty_converges_on_second_attempt(self, scripted):
        plugin = FaultyPlugin(scripted, fault="match-all", bad_attempts=1)
        outcome = run_repair_loop(SynthesisRequest(INTENT), plugin)
        assert outcome.verified and outcome.attempts == 2
        # the feedback for the bad attempt contains the rendered counterexample
        _, feedback = outcome.history[0]
        assert "permits an input route" in feedback
        assert "Network:" in feedback
        assert feedback.endswith("Please rectify your output.")

    def test_wrong_metric_feedback_mentions_output(self, scripted):
        plugin = FaultyPlugin(scripted, fault="wrong-metric", bad_attempts=1)
        outcome = run_repair_loop(SynthesisRequest(INTENT), plugin)
        assert outcome.verified and outcome.attempts == 2
        _, feedback = outcome.history[0]
        assert "Metric: 56" in feedback

    def test_multi_stanza_feedback(self, scripted):
        plugin = FaultyPlugin(scripted, fault="multi-stanza", bad_attempts=1)
        outcome = run_repair_loop(SynthesisRequest(INTENT), plugin)
        assert outcome.verified and outcome.attempts == 2
        _, feedback = outcome.history[0]
        assert "more than one route-map stanza" in feedback

    def test_always_bad_punts_at_threshold(self, scripted):
        plugin = FaultyPlugin(scripted, fault="match-all", bad_attempts=99)
        outcome = run_repair_loop(SynthesisRequest(INTENT), plugin, threshold=3)
        assert outcome.status == "punted"
        assert outcome.attempts == 3
        assert len(outcome.history) == 3
        assert outcome.last_feedback

    def test_plugin_error_retried_once(self):
        class Flaky(GeneratorPlugin):
            def __init__(self, inner):
                self.inner = inner
                self.calls = 0

            def generate_snippet(self, request):
                self.calls += 1
                if self.calls == 1:
                    raise PluginError("transient")
                return self.inner.generate_snippet(request)

            def generate_spec(self, request):
                return self.inner.generate_spec(request)

        scripted = ScriptedPlugin.from_file(fixture_path("synth_scripted.json"))
        flaky = Flaky(scripted)
        outcome = run_repair_loop(SynthesisRequest(INTENT), flaky)
        assert outcome.verified and outcome.attempts == 1
        assert flaky.calls == 2

    def test_bad_spec_punts_before_snippets(self):
        class BadSpec(GeneratorPlugin):
            def generate_spec(self, request):
                return "{not json"

            def generate_snippet(self, request):
                raise AssertionError("should not be called")

        outcome = run_repair_loop(SynthesisRequest(INTENT), BadSpec())
        assert outcome.status == "punted" and outcome.attempts == 0
        assert "invalid spec" in outcome.last_feedback

    def test_threshold_validation(self, scripted):
        with pytest.raises(ValueError):
            run_repair_loop(SynthesisRequest(INTENT), scripted, threshold=0)
