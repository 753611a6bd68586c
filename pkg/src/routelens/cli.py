"""Command-line interface.

Exit codes: 0 on success, 1 when an analysis reports a problem (failed
verification, punted synthesis, violated intent conditions), 2 on input
errors (unparseable config, bad references, bad arguments).
"""

from __future__ import annotations

import json
import sys

import click

from .disambig import (
    CHOICE_EXISTING,
    CHOICE_NEW,
    Inconclusive,
    InsertionProblem,
    answer as apply_answer,
    check_intent_conditions,
    finish_session,
    question_to_dict,
    render_verdict,
    session_to_dict,
    start_session,
)
from .parser import ParseFailure, parse_config, parse_stanza_snippet, print_config
from .engine import overlap_census, route_to_dict
from .specverify import (
    JsonSpec,
    NotAFailure,
    SpecParseError,
    render_feedback,
    render_route,
    verify_stanza,
)
from .synth import (
    FAULT_KINDS,
    FaultyPlugin,
    HttpPlugin,
    ScriptedPlugin,
    SynthesisRequest,
    classify_query,
    run_repair_loop,
)


def _fail(message: str, code: int = 2, fmt: str = "text"):
    if fmt == "json":
        click.echo(json.dumps({"error": message}), err=True)
    else:
        click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _parse_fail(errors, fmt: str = "text"):
    if fmt == "json":
        payload = {
            "error": "parse failed",
            "errors": [
                {"line": e.span.line, "message": e.message, "text": e.text}
                for e in errors
            ],
        }
        click.echo(json.dumps(payload), err=True)
    else:
        for e in errors:
            click.echo(f"error: {e}", err=True)
    sys.exit(2)


def _read_config(path: str, fmt: str = "text"):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        _fail(str(exc), fmt=fmt)
    try:
        return parse_config(text), text
    except ParseFailure as exc:
        _parse_fail(exc.errors, fmt)


@click.group()
def main():
    """Route-map and ACL analysis, synthesis, and insertion tooling."""


@main.command()
@click.argument("config_path", type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def parse(config_path, fmt):
    """Parse CONFIG_PATH and print it in canonical form; exit 0 iff clean."""
    config, _ = _read_config(config_path, fmt)
    if fmt == "json":
        click.echo(
            json.dumps({"configText": print_config(config), "diagnostics": []})
        )
    else:
        click.echo(print_config(config), nl=False)


@main.command()
@click.argument("config_path", type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json")
@click.option("--include-trivial/--no-include-trivial", default=True,
              help="Include pairs where one rule's space contains the other's.")
def overlaps(config_path, fmt, include_trivial):
    """Report overlapping stanza pairs and conflicting ACL rule pairs."""
    config, _ = _read_config(config_path)
    report = overlap_census(config)
    if fmt == "json":
        click.echo(report.to_json(include_trivial=include_trivial))
    else:
        click.echo(report.to_csv(include_trivial=include_trivial), nl=False)
    if report.inconclusive:
        sys.exit(1)


@main.command()
@click.option("--snippet", "snippet_path", required=True, type=click.Path(exists=True))
@click.option("--spec", "spec_path", required=True, type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def verify(snippet_path, spec_path, fmt):
    """Check a single-stanza snippet against a JSON behavior spec."""
    with open(snippet_path, encoding="utf-8") as fh:
        snippet_text = fh.read()
    with open(spec_path, encoding="utf-8") as fh:
        spec_text = fh.read()
    try:
        snippet = parse_stanza_snippet(snippet_text)
    except ParseFailure as exc:
        _parse_fail(exc.errors, fmt)
    try:
        spec = JsonSpec.parse(spec_text)
    except SpecParseError as exc:
        _fail(f"bad spec: {exc}", fmt=fmt)
    result = verify_stanza(snippet, spec)
    feedback = ""
    if result.verdict == "fail":
        try:
            feedback = render_feedback(result)
        except NotAFailure:
            feedback = ""
    if fmt == "json":
        click.echo(
            json.dumps(
                {
                    "verdict": result.verdict,
                    "check": result.check,
                    "reason": result.reason,
                    "feedback": feedback,
                }
            )
        )
    elif result.passed:
        click.echo("pass")
    elif result.verdict == "inconclusive":
        click.echo(f"inconclusive: {result.reason}")
    else:
        click.echo(f"fail ({result.check})")
        click.echo(feedback)
    if not result.passed:
        sys.exit(1)


def _make_plugin(plugin, fixtures, fault, url):
    if plugin in ("scripted", "faulty"):
        if not fixtures:
            _fail(f"--plugin {plugin} requires --fixtures")
        inner = ScriptedPlugin.from_file(fixtures)
        if plugin == "scripted":
            return inner
        return FaultyPlugin(inner, fault)
    if plugin == "http":
        if not url:
            _fail("--plugin http requires --url")
        return HttpPlugin(url)
    _fail(f"unknown plugin {plugin!r}")


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True),
              help="Existing config (reserved for context; optional).")
@click.option("--intent", required=True, help="Natural-language intent.")
@click.option("--plugin", type=click.Choice(["scripted", "faulty", "http"]),
              default="scripted")
@click.option("--fixtures", type=click.Path(exists=True),
              help="Fixture file for the scripted/faulty plugins.")
@click.option("--fault", type=click.Choice(list(FAULT_KINDS)), default="match-all")
@click.option("--url", default="", help="Gateway URL for the http plugin.")
@click.option("--threshold", type=int, default=3, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def synthesize(config_path, intent, plugin, fixtures, fault, url, threshold, fmt):
    """Run the generate-verify-repair loop for an intent."""
    if config_path:
        _read_config(config_path)
    gen = _make_plugin(plugin, fixtures, fault, url)
    kind = classify_query(intent)
    if kind == "unknown":
        kind = "routeMap"
    outcome = run_repair_loop(SynthesisRequest(intent, kind), gen, threshold)
    if fmt == "json":
        click.echo(json.dumps({
            "status": outcome.status,
            "attempts": outcome.attempts,
            "snippet": outcome.snippet,
            "spec": json.loads(outcome.spec_text) if outcome.spec_text else None,
            "lastFeedback": outcome.last_feedback,
        }, indent=2))
    else:
        click.echo(f"status: {outcome.status} (attempts: {outcome.attempts})")
        if outcome.verified:
            click.echo("spec:")
            click.echo(outcome.spec_text.rstrip())
            click.echo("snippet:")
            click.echo(outcome.snippet.rstrip())
        else:
            click.echo(f"last feedback: {outcome.last_feedback}")
    if not outcome.verified:
        sys.exit(1)


def _prompt_choice(question) -> str:
    click.echo("For a route with the following attributes:")
    click.echo(render_route(question.witness))
    click.echo()
    click.echo("OPTION 1:")
    click.echo(render_verdict(question.option_new))
    click.echo()
    click.echo("OPTION 2:")
    click.echo(render_verdict(question.option_existing))
    while True:
        raw = click.prompt("Choose 1 or 2").strip()
        if raw == "1":
            return CHOICE_NEW
        if raw == "2":
            return CHOICE_EXISTING
        click.echo("Please answer 1 or 2.")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--map", "map_name", required=True, help="Target route-map name.")
@click.option("--snippet", "snippet_path", required=True, type=click.Path(exists=True))
@click.option("--answers", default="",
              help="Comma-separated existing/new answers (non-interactive).")
@click.option("--exhaustive", is_flag=True,
              help="Treat --answers as one choice per overlapping stanza and "
                   "check whether any single insertion point implements them.")
@click.option("--out", "out_path", type=click.Path(), default="",
              help="Write the resulting config here instead of stdout.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def disambiguate(config_path, map_name, snippet_path, answers, exhaustive, out_path, fmt):
    """Place a new stanza into a route-map, asking where overlaps demand it."""
    config, _ = _read_config(config_path, fmt)
    if map_name not in config.route_maps:
        _fail(f"no route-map {map_name!r} in {config_path}", fmt=fmt)
    with open(snippet_path, encoding="utf-8") as fh:
        snippet_text = fh.read()
    try:
        snippet = parse_stanza_snippet(snippet_text)
    except ParseFailure as exc:
        _parse_fail(exc.errors, fmt)
    problem = InsertionProblem(config, map_name, snippet)

    given = [a.strip() for a in answers.split(",") if a.strip()]
    for a in given:
        if a not in (CHOICE_EXISTING, CHOICE_NEW):
            _fail(f"bad answer {a!r}; use {CHOICE_EXISTING!r} or {CHOICE_NEW!r}", fmt=fmt)

    if exhaustive:
        try:
            check = check_intent_conditions(problem, given)
        except Inconclusive as exc:
            _fail(f"overlap analysis undecided for stanzas {exc.seqs}", code=1, fmt=fmt)
        except ValueError as exc:
            _fail(str(exc), fmt=fmt)
        if fmt == "json":
            from .engine import route_to_dict

            payload = {"ok": check.ok}
            if not check.ok:
                kept, moved = check.evidence
                payload["evidence"] = {
                    "keepsExisting": route_to_dict(kept),
                    "movesToNew": route_to_dict(moved),
                }
            click.echo(json.dumps(payload))
            sys.exit(0 if check.ok else 1)
        if not check.ok:
            kept, moved = check.evidence
            click.echo("No single insertion point implements these choices.")
            click.echo("This route must keep its existing behavior:")
            click.echo(render_route(kept))
            click.echo("but this earlier-matching route must take the new stanza:")
            click.echo(render_route(moved))
            sys.exit(1)
        click.echo("A single insertion point implements these choices.")
        return

    try:
        session = start_session(problem)
    except Inconclusive as exc:
        _fail(f"overlap analysis undecided for stanzas {exc.seqs}", code=1, fmt=fmt)

    queue = list(given)
    while session.state != "done":
        question = session.pending_question()
        if queue:
            choice = queue.pop(0)
        else:
            choice = _prompt_choice(question)
        session = apply_answer(session, choice)
    if queue:
        _fail(f"{len(queue)} extra answer(s) beyond what the session needed", fmt=fmt)

    new_config, _ = finish_session(session)
    text = print_config(new_config)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
        if fmt != "json":
            click.echo(f"wrote {out_path}")
    if fmt == "json":
        click.echo(
            json.dumps(
                {
                    "position": session.position,
                    "answers": [
                        {"seq": s, "choice": c} for s, c in session.answers
                    ],
                    "configText": text,
                }
            )
        )
    elif not out_path:
        click.echo(text, nl=False)


@main.command()
@click.option("--addr", default="127.0.0.1:8000", show_default=True)
@click.option("--data", "data_dir", type=click.Path(), default=None,
              help="Workspace storage directory.")
@click.option("--ui", "ui_dir", type=click.Path(), default=None,
              help="Static frontend bundle to serve at /.")
def serve(addr, data_dir, ui_dir):
    """Run the HTTP API (and optionally the web UI)."""
    import uvicorn

    from .service import create_app

    host, _, port = addr.rpartition(":")
    if not host or not port.isdigit():
        _fail(f"bad --addr {addr!r}; expected HOST:PORT")
    app = create_app(data_dir=data_dir, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=int(port))


if __name__ == "__main__":
    main()
