"""Incremental configuration construction.

A build step pairs a natural-language intent with a target route-map and
a scripted list of disambiguation answers. Applying a step runs the
generate-verify-repair loop, then splices the verified stanza into the
target map, asking the recorded answers where overlaps leave the
position ambiguous. A whole router config is built by folding steps over
an empty config, which makes the construction reproducible end to end.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

from .model import Config, RouteMap
from .parser import parse_stanza_snippet
from .disambig import (
    InsertionProblem,
    answer as apply_answer,
    finish_session,
    start_session,
)
from .synth import (
    GeneratorPlugin,
    ScriptedPlugin,
    SynthesisRequest,
    classify_query,
    run_repair_loop,
)


class StepFailed(RuntimeError):
    def __init__(self, step: "BuildStep", message: str):
        self.step = step
        super().__init__(f"step {step.intent!r}: {message}")


@dataclass(frozen=True)
class BuildStep:
    intent: str
    target_map: str
    answers: tuple = ()
    threshold: int = 3


def apply_step(config: Config, step: BuildStep, plugin: GeneratorPlugin) -> Config:
    """Synthesize one stanza for `step.intent` and place it in the target
    map, consuming `step.answers` for any disambiguation questions."""
    kind = classify_query(step.intent)
    request = SynthesisRequest(step.intent, kind if kind != "unknown" else "routeMap")
    outcome = run_repair_loop(request, plugin, step.threshold)
    if not outcome.verified:
        raise StepFailed(step, f"synthesis punted: {outcome.last_feedback}")
    snippet = parse_stanza_snippet(outcome.snippet)

    if step.target_map not in config.route_maps:
        if step.answers:
            raise StepFailed(step, "answers given but the target map is new")
        config = replace(
            config,
            route_maps={**config.route_maps, step.target_map: RouteMap(step.target_map, ())},
        )
    problem = InsertionProblem(config, step.target_map, snippet)
    session = start_session(problem)
    for choice in step.answers:
        if session.state == "done":
            raise StepFailed(step, "more answers than questions")
        session = apply_answer(session, choice)
    if session.state != "done":
        raise StepFailed(step, "fewer answers than questions")
    new_config, _ = finish_session(session)
    return new_config


def build_config(steps, plugin: GeneratorPlugin, base: Config = None) -> Config:
    config = base if base is not None else Config()
    for step in steps:
        config = apply_step(config, step, plugin)
    return config


def load_topology(path: str):
    """Read a topology build plan: shared plugin fixtures plus per-router
    step lists. Returns (plugin, {router: [BuildStep, ...]})."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    plugin = ScriptedPlugin(data["fixtures"])
    routers = {
        name: [
            BuildStep(
                intent=s["intent"],
                target_map=s["targetMap"],
                answers=tuple(s.get("answers", ())),
            )
            for s in steps
        ]
        for name, steps in data["routers"].items()
    }
    return plugin, routers


def build_topology(path: str):
    """Build every router config in a topology plan; returns {router: Config}."""
    plugin, routers = load_topology(path)
    return {name: build_config(steps, plugin) for name, steps in routers.items()}
