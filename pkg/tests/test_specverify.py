import pytest

from routelens.model import Community, Prefix, Route
from routelens.parser import parse_stanza_snippet
from routelens.specverify import (
    CHECK_INPUT_DENIED,
    CHECK_OUTPUT_WRONG,
    CHECK_OVER_PERMISSIVE,
    JsonSpec,
    NotAFailure,
    SpecParseError,
    parse_prefix_atom,
    render_feedback,
    render_route,
    spec_to_constraints,
    verify_stanza,
)
from routelens.symbolic import space_member


GOOD_SPEC = """
{
  "permit": true,
  "prefix": ["100.0.0.0/16:16-23"],
  "community": "/_300:3_/",
  "set": {"metric": 55}
}
"""

GOOD_SNIPPET = (
    "ip community-list expanded COM_LIST permit _300:3_\n"
    "ip prefix-list PREFIX_100 permit 100.0.0.0/16 le 23\n"
    "route-map SET_METRIC permit 10\n"
    " match community COM_LIST\n"
    " match ip address prefix-list PREFIX_100\n"
    " set metric 55\n"
)

MATCH_ALL_SNIPPET = "route-map SET_METRIC permit 10\n set metric 55\n"

WRONG_METRIC_SNIPPET = GOOD_SNIPPET.replace("set metric 55", "set metric 56")


class TestSpecParsing:
    def test_good_spec(self):
        spec = JsonSpec.parse(GOOD_SPEC)
        assert spec.permit is True
        assert spec.community == Community(300, 3)
        assert spec.expect.scalar_map() == {"med": 55}

    def test_unknown_top_level_field_path(self):
        with pytest.raises(SpecParseError) as exc:
            JsonSpec.parse('{"permit": true, "prefxi": []}')
        assert exc.value.path == "prefxi"

    def test_unknown_set_field_path(self):
        with pytest.raises(SpecParseError) as exc:
            JsonSpec.parse('{"permit": true, "set": {"metrc": 5}}')
        assert exc.value.path == "set.metrc"

    def test_permit_required(self):
        with pytest.raises(SpecParseError) as exc:
            JsonSpec.parse("{}")
        assert exc.value.path == "permit"

    def test_set_requires_permit_true(self):
        with pytest.raises(SpecParseError):
            JsonSpec.parse('{"permit": false, "set": {"metric": 1}}')

    def test_bad_prefix_atom(self):
        with pytest.raises(SpecParseError):
            parse_prefix_atom("100.0.0.0/16:8-23")  # lo below base length
        with pytest.raises(SpecParseError):
            parse_prefix_atom("100.0.0.1/16:16-23")  # host bits set
        atom = parse_prefix_atom("100.0.0.0/16:16-23")
        assert (atom.len_lo, atom.len_hi) == (16, 23)

    def test_scalar_intervals(self):
        spec = JsonSpec.parse('{"permit": true, "localPref": "100-300"}')
        assert spec.scalars == (("local_pref", ((100, 300),)),)

    def test_invalid_json(self):
        with pytest.raises(SpecParseError):
            JsonSpec.parse("{nope")


class TestSpecSpace:
    def test_spec_space_membership(self):
        spec = JsonSpec.parse(GOOD_SPEC)
        space = [spec_to_constraints(spec)]
        inside = Route(
            network=Prefix.parse("100.0.0.0/16"),
            communities=frozenset([Community(300, 3)]),
        )
        outside = Route(network=Prefix.parse("100.0.0.0/16"))  # no community
        assert space_member(space, inside)
        assert not space_member(space, outside)


class TestVerifyStanza:
    def test_correct_snippet_passes(self):
        result = verify_stanza(
            parse_stanza_snippet(GOOD_SNIPPET), JsonSpec.parse(GOOD_SPEC)
        )
        assert result.passed

    def test_match_all_is_over_permissive(self):
        result = verify_stanza(
            parse_stanza_snippet(MATCH_ALL_SNIPPET), JsonSpec.parse(GOOD_SPEC)
        )
        assert result.verdict == "fail"
        assert result.check == CHECK_OVER_PERMISSIVE
        # the witness lies outside the spec space
        spec_space = [spec_to_constraints(JsonSpec.parse(GOOD_SPEC))]
        assert not space_member(spec_space, result.counterexample)

    def test_wrong_metric_is_output_wrong(self):
        result = verify_stanza(
            parse_stanza_snippet(WRONG_METRIC_SNIPPET), JsonSpec.parse(GOOD_SPEC)
        )
        assert result.check == CHECK_OUTPUT_WRONG
        assert result.output.med == 56

    def test_narrow_stanza_is_input_denied(self):
        narrow = GOOD_SNIPPET.replace("le 23", "le 20")
        result = verify_stanza(
            parse_stanza_snippet(narrow), JsonSpec.parse(GOOD_SPEC)
        )
        assert result.check == CHECK_INPUT_DENIED

    def test_action_polarity_mismatch(self):
        deny_spec = '{"permit": false, "prefix": ["100.0.0.0/16:16-23"]}'
        permit_snippet = (
            "ip prefix-list PL permit 100.0.0.0/16 le 23\n"
            "route-map RM permit 10\n"
            " match ip address prefix-list PL\n"
        )
        result = verify_stanza(
            parse_stanza_snippet(permit_snippet), JsonSpec.parse(deny_spec)
        )
        assert result.verdict == "fail"
        assert result.check == CHECK_OVER_PERMISSIVE


class TestFeedback:
    def test_render_route_format(self):
        r = Route(
            network=Prefix.parse("100.0.0.0/16"),
            as_path=(32,),
            communities=frozenset([Community(300, 3)]),
        )
        text = render_route(r)
        assert text == (
            "Network: 100.0.0.0/16\n"
            'AS Path: [32]\n'
            'Communities: ["300:3"]\n'
            "Local Preference: 100\n"
            "Metric: 0\n"
            "Next Hop IP: 0.0.0.1\n"
            "Tag: 0\n"
            "Weight: 0"
        )

    def test_over_permissive_feedback_wording(self):
        result = verify_stanza(
            parse_stanza_snippet(MATCH_ALL_SNIPPET), JsonSpec.parse(GOOD_SPEC)
        )
        text = render_feedback(result)
        assert text.startswith(
            "The stanza SET_METRIC permits an input route with the following "
            "attributes, but it should be denied:"
        )
        assert text.endswith("Please rectify your output.")

    def test_output_wrong_feedback_includes_both_routes(self):
        result = verify_stanza(
            parse_stanza_snippet(WRONG_METRIC_SNIPPET), JsonSpec.parse(GOOD_SPEC)
        )
        text = render_feedback(result)
        assert "Input route:" in text and "Output route:" in text
        assert "Metric: 56" in text

    def test_pass_result_has_no_feedback(self):
        result = verify_stanza(
            parse_stanza_snippet(GOOD_SNIPPET), JsonSpec.parse(GOOD_SPEC)
        )
        with pytest.raises(NotAFailure):
            render_feedback(result)
