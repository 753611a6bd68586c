"""JSON behavioral specifications and the stanza-vs-spec equivalence check.

A spec describes the input routes a stanza must act on (permit flag,
prefix atoms, community/as-path atoms, scalar intervals) and the output
attribute assignments expected on permitted routes. Verification runs
three checks over the single-stanza route-map: no spec-space route is
mishandled, no permitted output violates the set expectations, and no
route outside the spec space is handled by the stanza (which is what
rejects the degenerate match-everything stanza).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .model import Community, Route, ip_to_int
from .parser import Snippet
from .engine import (
    OutputExpectation,
    SearchOutcome,
    evaluate,
    route_to_dict,
    search_route_policies,
)
from .symbolic import (
    AsPathConstraint,
    BoundExceeded,
    CommunityConstraint,
    PrefixAtom,
    PrefixSpace,
    RouteConstraints,
    ScalarConstraint,
    UnsupportedRegex,
    parse_as_path_regex,
    parse_community_regex,
    space_satisfiable,
    space_subtract,
    space_witness,
)


class SpecParseError(ValueError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


_PREFIX_ATOM_RE = re.compile(r"^(\d+\.\d+\.\d+\.\d+/\d+):(\d+)-(\d+)$")
_SCALAR_FIELDS = {
    "localPref": "local_pref",
    "med": "med",
    "tag": "tag",
    "weight": "weight",
}
_SET_FIELDS = ("metric", "local-preference", "next-hop", "community", "weight", "tag")
_TOP_FIELDS = {"permit", "prefix", "community", "asPath", "set"} | set(_SCALAR_FIELDS)


def parse_prefix_atom(text: str, path: str = "prefix") -> PrefixAtom:
    m = _PREFIX_ATOM_RE.match(text)
    if not m:
        raise SpecParseError(path, f"bad prefix atom {text!r}; expected A.B.C.D/L:lo-hi")
    from .model import Prefix

    base = Prefix.parse(m.group(1))
    if not base.is_normalized():
        raise SpecParseError(path, f"prefix base {m.group(1)} has host bits set")
    lo, hi = int(m.group(2)), int(m.group(3))
    if not (base.length <= lo <= hi <= 32):
        raise SpecParseError(
            path, f"length range {lo}-{hi} invalid for base length {base.length}"
        )
    return PrefixAtom(base, lo, hi)


def _parse_interval(value, path: str):
    if isinstance(value, bool):
        raise SpecParseError(path, "expected an integer or 'lo-hi' string")
    if isinstance(value, int):
        return ((value, value),)
    if isinstance(value, str):
        m = re.match(r"^(\d+)-(\d+)$", value)
        if m:
            lo, hi = int(m.group(1)), int(m.group(2))
            if hi < lo:
                raise SpecParseError(path, f"inverted interval {value!r}")
            return ((lo, hi),)
        if value.isdigit():
            return ((int(value), int(value)),)
    if isinstance(value, list):
        out = []
        for i, v in enumerate(value):
            out.extend(_parse_interval(v, f"{path}[{i}]"))
        return tuple(out)
    raise SpecParseError(path, f"expected an integer or 'lo-hi' string, got {value!r}")


@dataclass(frozen=True)
class JsonSpec:
    permit: bool
    prefix: tuple = ()  # PrefixAtoms; empty = unconstrained
    community: object = None  # Community or None
    as_path: object = None  # AsPathAtom or None
    scalars: tuple = ()  # ((attr, interval tuple), ...)
    expect: OutputExpectation = field(default_factory=OutputExpectation)
    raw: str = ""

    @classmethod
    def parse(cls, text_or_dict) -> "JsonSpec":
        if isinstance(text_or_dict, str):
            try:
                data = json.loads(text_or_dict)
            except json.JSONDecodeError as exc:
                raise SpecParseError("$", f"invalid JSON: {exc}") from exc
            raw = text_or_dict
        else:
            data = text_or_dict
            raw = json.dumps(data, indent=2)
        if not isinstance(data, dict):
            raise SpecParseError("$", "spec must be a JSON object")
        unknown = set(data) - _TOP_FIELDS
        if unknown:
            raise SpecParseError(sorted(unknown)[0], "unknown field")
        if "permit" not in data or not isinstance(data["permit"], bool):
            raise SpecParseError("permit", "required boolean field")
        permit = data["permit"]

        prefix = tuple(
            parse_prefix_atom(p, f"prefix[{i}]")
            for i, p in enumerate(data.get("prefix", []))
        )
        community = None
        if data.get("community") is not None:
            try:
                community = parse_community_regex(data["community"])
            except UnsupportedRegex as exc:
                raise SpecParseError("community", str(exc)) from exc
        as_path = None
        if data.get("asPath") is not None:
            try:
                as_path = parse_as_path_regex(data["asPath"])
            except UnsupportedRegex as exc:
                raise SpecParseError("asPath", str(exc)) from exc
        scalars = tuple(
            (attr, _parse_interval(data[key], key))
            for key, attr in _SCALAR_FIELDS.items()
            if key in data
        )

        set_data = data.get("set", {})
        if not isinstance(set_data, dict):
            raise SpecParseError("set", "must be a JSON object")
        unknown = set(set_data) - set(_SET_FIELDS)
        if unknown:
            raise SpecParseError(f"set.{sorted(unknown)[0]}", "unknown field")
        if set_data and not permit:
            raise SpecParseError("set", "set expectations require \"permit\": true")
        exp_scalars = []
        communities = None
        next_hop = None
        for key, attr in (("metric", "med"), ("local-preference", "local_pref"),
                          ("weight", "weight"), ("tag", "tag")):
            if key in set_data:
                v = set_data[key]
                if not isinstance(v, int) or isinstance(v, bool):
                    raise SpecParseError(f"set.{key}", "expected an integer")
                exp_scalars.append((attr, v))
        if "next-hop" in set_data:
            next_hop = ip_to_int(set_data["next-hop"])
        if "community" in set_data:
            v = set_data["community"]
            if isinstance(v, str):
                v = [v]
            if not isinstance(v, list):
                raise SpecParseError("set.community", "expected a string or list")
            comms = frozenset(Community.parse(x) for x in v)
            communities = ("add", comms)
        expect = OutputExpectation(tuple(exp_scalars), communities, next_hop)
        return cls(permit, prefix, community, as_path, scalars, expect, raw)


def spec_to_constraints(spec: JsonSpec) -> RouteConstraints:
    """The spec's input space as a single conjunctive constraint."""
    prefix = PrefixSpace(spec.prefix) if spec.prefix else PrefixSpace.full()
    community = (
        CommunityConstraint(requires=frozenset([spec.community]))
        if spec.community
        else CommunityConstraint()
    )
    as_path = AsPathConstraint((spec.as_path,)) if spec.as_path else AsPathConstraint()
    return RouteConstraints(
        prefix=prefix,
        community=community,
        as_path=as_path,
        scalars=ScalarConstraint(spec.scalars),
    )


CHECK_INPUT_DENIED = "inputDenied"
CHECK_OUTPUT_WRONG = "outputWrong"
CHECK_OVER_PERMISSIVE = "overPermissive"


@dataclass(frozen=True)
class VerificationResult:
    verdict: str  # "pass" | "fail" | "inconclusive"
    check: str = ""
    counterexample: object = None  # Route for fail
    output: object = None  # output Route for outputWrong
    reason: str = ""
    stanza_name: str = ""
    action: str = "permit"  # the stanza's action, for feedback wording

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


class NotAFailure(ValueError):
    pass


def verify_stanza(snippet: Snippet, spec: JsonSpec) -> VerificationResult:
    """Check single-stanza equivalence between a snippet and its spec."""
    from .symbolic import stanza_space

    config = snippet.config
    rm = snippet.route_map
    stanza = snippet.stanza
    spec_space = [spec_to_constraints(spec)]
    st_space = stanza_space(stanza, config)
    name = snippet.map_name

    def fail(check, witness, output=None):
        return VerificationResult(
            "fail", check, witness, output, stanza_name=name, action=stanza.action
        )

    # check 1: every spec-space route must be matched by the stanza
    try:
        w = space_witness(space_subtract(spec_space, st_space))
    except BoundExceeded as exc:
        return VerificationResult("inconclusive", reason=str(exc), stanza_name=name)
    if w is not None:
        return fail(CHECK_INPUT_DENIED, w)

    # check 3: no route outside the spec space may be matched by the stanza
    try:
        w = space_witness(space_subtract(st_space, spec_space))
    except BoundExceeded as exc:
        return VerificationResult("inconclusive", reason=str(exc), stanza_name=name)
    if w is not None:
        return fail(CHECK_OVER_PERMISSIVE, w)

    # stanza action must agree with the spec's polarity
    if (stanza.action == "permit") != spec.permit:
        try:
            w = space_witness(spec_space)
        except BoundExceeded as exc:
            return VerificationResult("inconclusive", reason=str(exc), stanza_name=name)
        if w is not None:
            check = (
                CHECK_OVER_PERMISSIVE
                if stanza.action == "permit"
                else CHECK_INPUT_DENIED
            )
            return fail(check, w)

    # check 2: permitted outputs must meet the set expectations exactly
    if spec.permit:
        outcome = search_route_policies(
            rm, config, "permit", output_expect=spec.expect, output_violates=True
        )
        if outcome.status == "inconclusive":
            return VerificationResult(
                "inconclusive", reason=outcome.reason, stanza_name=name
            )
        if outcome.found:
            verdict = evaluate(rm, outcome.witness, config)
            return fail(CHECK_OUTPUT_WRONG, outcome.witness, verdict.output)

    return VerificationResult("pass", stanza_name=name)


ROUTE_TEXT_FIELDS = (
    ("Network", lambda r: str(r.network)),
    ("AS Path", lambda r: json.dumps(list(r.as_path))),
    ("Communities", lambda r: json.dumps([str(c) for c in sorted(r.communities)])),
    ("Local Preference", lambda r: str(r.local_pref)),
    ("Metric", lambda r: str(r.med)),
    ("Next Hop IP", lambda r: route_to_dict(r)["nextHop"]),
    ("Tag", lambda r: str(r.tag)),
    ("Weight", lambda r: str(r.weight)),
)


def render_route(r: Route) -> str:
    """Attribute-per-line route rendering used in all user-facing text."""
    return "\n".join(f"{label}: {fn(r)}" for label, fn in ROUTE_TEXT_FIELDS)


def render_feedback(result: VerificationResult) -> str:
    """English feedback for a failed verification; byte-stable."""
    if result.verdict != "fail":
        raise NotAFailure(f"cannot render feedback for a {result.verdict} result")
    name = result.stanza_name or "the stanza"
    if result.check == CHECK_OVER_PERMISSIVE:
        if result.action == "permit":
            lead = (
                f"The stanza {name} permits an input route with the following "
                "attributes, but it should be denied:"
            )
        else:
            lead = (
                f"The stanza {name} denies an input route with the following "
                "attributes, but it should not match it:"
            )
        body = lead + "\n" + render_route(result.counterexample)
    elif result.check == CHECK_INPUT_DENIED:
        if result.action == "permit":
            lead = (
                f"The stanza {name} denies an input route with the following "
                "attributes, but it should be permitted:"
            )
        else:
            lead = (
                f"The stanza {name} fails to match an input route with the "
                "following attributes, but it should deny it:"
            )
        body = lead + "\n" + render_route(result.counterexample)
    else:  # outputWrong
        body = (
            f"The stanza {name} permits an input route but produces the wrong "
            "output attributes. Input route:\n"
            + render_route(result.counterexample)
            + "\nOutput route:\n"
            + render_route(result.output)
        )
    return body + "\nPlease rectify your output."
