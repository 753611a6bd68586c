"""Pluggable stanza generation and the bounded verify-repair loop.

The generator seam stands in for an external language model: a plugin
turns a natural-language intent into a config snippet and a JSON spec.
Shipped plugins: `scripted` (replays fixtures), `faulty` (injects one
configurable error on the first attempt), and `http` (posts to a gateway).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from .parser import MultipleStanzas, ParseFailure, parse_stanza_snippet
from .specverify import (
    JsonSpec,
    SpecParseError,
    render_feedback,
    verify_stanza,
)

DEFAULT_THRESHOLD = 3

_ROUTE_MAP_WORDS = (
    "route",
    "routes",
    "route-map",
    "prefix",
    "community",
    "med",
    "metric",
    "local-preference",
    "local preference",
    "as-path",
    "as path",
    "bgp",
)
_ACL_WORDS = (
    "packet",
    "packets",
    "traffic",
    "tcp",
    "udp",
    "icmp",
    "port",
    "host",
    "acl",
    "access-list",
    "access list",
    "firewall",
)


def classify_query(intent: str) -> str:
    """Keyword heuristic: "routeMap", "acl", or "unknown"."""
    text = intent.lower()
    rm_score = sum(1 for w in _ROUTE_MAP_WORDS if w in text)
    acl_score = sum(1 for w in _ACL_WORDS if w in text)
    if rm_score == acl_score == 0:
        return "unknown"
    return "routeMap" if rm_score >= acl_score else "acl"


@dataclass(frozen=True)
class SynthesisRequest:
    intent: str
    kind: str = "routeMap"
    history: tuple = ()  # ((attempt text, feedback text), ...)


class PluginError(Exception):
    pass


class GeneratorPlugin:
    """Interface for snippet/spec generators; implementations must be
    deterministic given the request for test reproducibility."""

    name = "base"

    def generate_snippet(self, request: SynthesisRequest) -> str:
        raise NotImplementedError

    def generate_spec(self, request: SynthesisRequest) -> str:
        raise NotImplementedError


class ScriptedPlugin(GeneratorPlugin):
    """Replays snippets/specs from fixtures: a list of dicts with keys
    `match` (intent substring), `snippet`, and `spec`."""

    name = "scripted"

    def __init__(self, fixtures):
        self.fixtures = list(fixtures)

    @classmethod
    def from_file(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh))

    def _lookup(self, request: SynthesisRequest) -> dict:
        for fx in self.fixtures:
            if fx["match"] in request.intent:
                return fx
        raise PluginError(f"no scripted fixture matches intent {request.intent!r}")

    def generate_snippet(self, request):
        return self._lookup(request)["snippet"]

    def generate_spec(self, request):
        fx = self._lookup(request)
        spec = fx["spec"]
        return spec if isinstance(spec, str) else json.dumps(spec)


FAULT_KINDS = ("multi-stanza", "wrong-metric", "match-all")


class FaultyPlugin(GeneratorPlugin):
    """Wraps another plugin and corrupts the snippet on early attempts."""

    name = "faulty"

    def __init__(self, inner: GeneratorPlugin, fault: str = "match-all", bad_attempts: int = 1):
        if fault not in FAULT_KINDS:
            raise ValueError(f"unknown fault {fault!r}")
        self.inner = inner
        self.fault = fault
        self.bad_attempts = bad_attempts

    def generate_snippet(self, request):
        good = self.inner.generate_snippet(request)
        if len(request.history) >= self.bad_attempts:
            return good
        if self.fault == "multi-stanza":
            return good + "\n" + _bump_stanza_seq(good)
        if self.fault == "wrong-metric":
            if "set metric" in good:
                return _rewrite_metric(good)
            return good + " set metric 1\n"
        # match-all: keep the map header and drop every match line
        lines = [l for l in good.splitlines() if l.strip().startswith(("route-map", "set"))]
        return "\n".join(lines) + "\n"

    def generate_spec(self, request):
        return self.inner.generate_spec(request)


def _bump_stanza_seq(snippet: str) -> str:
    out = []
    for line in snippet.splitlines():
        toks = line.split()
        if toks[:1] == ["route-map"] and len(toks) == 4:
            toks[3] = str(int(toks[3]) + 10)
            out.append(" ".join(toks))
        else:
            out.append(line)
    return "\n".join(out)


def _rewrite_metric(snippet: str) -> str:
    out = []
    for line in snippet.splitlines():
        toks = line.split()
        if toks[:2] == ["set", "metric"]:
            toks[2] = str(int(toks[2]) + 1)
            out.append(" " + " ".join(toks))
        else:
            out.append(line)
    return "\n".join(out)


class HttpPlugin(GeneratorPlugin):
    """POSTs {intent, kind, history, promptTemplate, want} JSON to an
    external gateway and expects {"snippet": ...} or {"spec": ...}."""

    name = "http"

    def __init__(self, url: str, prompt_template: str = "", timeout: float = 30.0):
        self.url = url
        self.prompt_template = prompt_template
        self.timeout = timeout

    def _post(self, request: SynthesisRequest, want: str) -> str:
        import requests

        body = {
            "intent": request.intent,
            "kind": request.kind,
            "history": [list(h) for h in request.history],
            "promptTemplate": self.prompt_template,
            "want": want,
        }
        try:
            resp = requests.post(self.url, json=body, timeout=self.timeout)
            resp.raise_for_status()
            data = resp.json()
        except Exception as exc:  # transport errors become PluginError
            raise PluginError(f"http plugin request failed: {exc}") from exc
        if want not in data:
            raise PluginError(f"http plugin response missing {want!r}")
        value = data[want]
        return value if isinstance(value, str) else json.dumps(value)

    def generate_snippet(self, request):
        return self._post(request, "snippet")

    def generate_spec(self, request):
        return self._post(request, "spec")


@dataclass(frozen=True)
class LoopOutcome:
    status: str  # "verified" | "punted"
    attempts: int
    snippet: str = ""
    spec: object = None  # JsonSpec when verified
    spec_text: str = ""
    last_feedback: str = ""
    history: tuple = ()  # ((snippet text, feedback text), ...)

    @property
    def verified(self) -> bool:
        return self.status == "verified"


def _call_plugin(fn, request):
    """One generator call with a single retry on PluginError."""
    try:
        return fn(request)
    except PluginError:
        return fn(request)


def run_repair_loop(
    request: SynthesisRequest,
    plugin: GeneratorPlugin,
    threshold: int = DEFAULT_THRESHOLD,
) -> LoopOutcome:
    """Generate, verify, and feed counterexamples back until the snippet
    verifies or `threshold` attempts are exhausted.

    The spec is generated once up front (it is the user-reviewed contract);
    only the snippet is regenerated on retries.
    """
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    try:
        spec_text = _call_plugin(plugin.generate_spec, request)
    except PluginError as exc:
        return LoopOutcome("punted", 0, last_feedback=str(exc))
    try:
        spec = JsonSpec.parse(spec_text)
    except SpecParseError as exc:
        return LoopOutcome(
            "punted", 0, spec_text=spec_text, last_feedback=f"invalid spec: {exc}"
        )

    history = list(request.history)
    feedback = ""
    for attempt in range(1, threshold + 1):
        req = replace(request, history=tuple(history))
        try:
            snippet_text = _call_plugin(plugin.generate_snippet, req)
        except PluginError as exc:
            return LoopOutcome(
                "punted",
                attempt,
                spec_text=spec_text,
                last_feedback=str(exc),
                history=tuple(history),
            )
        try:
            snippet = parse_stanza_snippet(snippet_text)
        except MultipleStanzas:
            feedback = (
                "The output contains more than one route-map stanza. "
                "Please regenerate with only one stanza."
            )
            history.append((snippet_text, feedback))
            continue
        except ParseFailure as exc:
            feedback = f"The output could not be parsed: {exc}. Please rectify your output."
            history.append((snippet_text, feedback))
            continue
        result = verify_stanza(snippet, spec)
        if result.passed:
            return LoopOutcome(
                "verified",
                attempt,
                snippet=snippet_text,
                spec=spec,
                spec_text=spec_text,
                history=tuple(history),
            )
        if result.verdict == "inconclusive":
            feedback = f"Verification was inconclusive: {result.reason}"
        else:
            feedback = render_feedback(result)
        history.append((snippet_text, feedback))
    return LoopOutcome(
        "punted",
        threshold,
        spec_text=spec_text,
        last_feedback=feedback,
        history=tuple(history),
    )
