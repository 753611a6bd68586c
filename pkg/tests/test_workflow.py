import pytest

from conftest import fixture_path, fixture_text
from routelens.model import validate_config
from routelens.parser import parse_config, print_config
from routelens.synth import ScriptedPlugin
from routelens.workflow import (
    BuildStep,
    StepFailed,
    apply_step,
    build_config,
    build_topology,
    load_topology,
)


TOPOLOGY = fixture_path("topology.json")


def test_route_map_counts_match_shipped_plan():
    configs = build_topology(TOPOLOGY)
    assert {name: len(cfg.route_maps) for name, cfg in configs.items()} == {
        "M": 4,
        "R1": 5,
        "R2": 5,
    }


def test_built_configs_match_shipped_fixtures():
    configs = build_topology(TOPOLOGY)
    for name, cfg in configs.items():
        assert print_config(cfg) == fixture_text(f"{name}.cfg")


def test_build_is_reproducible():
    first = {n: print_config(c) for n, c in build_topology(TOPOLOGY).items()}
    second = {n: print_config(c) for n, c in build_topology(TOPOLOGY).items()}
    assert first == second


def test_built_configs_are_valid():
    configs = build_topology(TOPOLOGY)
    for cfg in configs.values():
        assert validate_config(cfg) == []


def test_shipped_router_fixtures_parse_and_round_trip():
    for name in ("M", "R1", "R2"):
        text = fixture_text(f"{name}.cfg")
        cfg = parse_config(text)
        assert print_config(cfg) == text
        assert validate_config(cfg) == []


def test_wrong_answer_count_fails_loudly():
    plugin, routers = load_topology(TOPOLOGY)
    steps = routers["M"]
    config = build_config(steps[:1], plugin)
    over = BuildStep(
        intent=steps[1].intent, target_map=steps[1].target_map, answers=("new", "new")
    )
    with pytest.raises(StepFailed):
        apply_step(config, over, plugin)
    under = BuildStep(
        intent=steps[1].intent, target_map=steps[1].target_map, answers=()
    )
    with pytest.raises(StepFailed):
        apply_step(config, under, plugin)


def test_punted_synthesis_fails_step():
    plugin = ScriptedPlugin([])
    with pytest.raises(StepFailed):
        apply_step(
            parse_config(""),
            BuildStep(intent="permit some routes", target_map="RM"),
            plugin,
        )


def test_policy_behavior_spot_checks():
    """The six global policies, checked on the built configs."""
    from routelens.model import Community, Prefix, Route
    from routelens.engine import evaluate

    configs = build_topology(TOPOLOGY)
    m, r1, r2 = configs["M"], configs["R1"], configs["R2"]
    reused_dc = Route(network=Prefix.parse("10.200.4.0/24"))
    service = Route(network=Prefix.parse("10.1.0.0/16"))
    reused_mgmt = Route(network=Prefix.parse("172.20.9.0/24"))
    bogon = Route(network=Prefix.parse("127.0.0.0/8"))
    external = Route(
        network=Prefix.parse("192.168.0.0/16"),
        communities=frozenset([Community(100, 1)]),
    )

    # 1: reused datacenter prefixes are hidden from management
    for cfg in (r1, r2):
        assert evaluate(cfg.route_maps["TO_M"], reused_dc, cfg).action == "deny"
    # 2: reused management prefixes are hidden from the datacenter side
    for cfg in (r1, r2):
        assert evaluate(cfg.route_maps["FROM_M"], reused_mgmt, cfg).action == "deny"
    # 3: the service prefix reaches M
    for cfg in (r1, r2):
        assert evaluate(cfg.route_maps["TO_M"], service, cfg).action == "permit"
    # 4: M prefers the R1 path for the service prefix
    lp_r1 = evaluate(m.route_maps["FROM_R1"], service, m).output.local_pref
    lp_r2 = evaluate(m.route_maps["FROM_R2"], service, m).output.local_pref
    assert lp_r1 > lp_r2
    # 5: bogons are never advertised
    for cfg, maps in ((r1, ("TO_M", "TO_ISP1")), (r2, ("TO_M", "TO_ISP2"))):
        for name in maps:
            assert evaluate(cfg.route_maps[name], bogon, cfg).action == "deny"
    # 6: ISP-learned routes are tagged on ingress and dropped on egress
    tagged = evaluate(
        r1.route_maps["FROM_ISP1"],
        Route(network=Prefix.parse("192.168.0.0/16")),
        r1,
    )
    assert tagged.action == "permit"
    assert Community(100, 1) in tagged.output.communities
    assert evaluate(r1.route_maps["TO_ISP1"], external, r1).action == "deny"
    assert evaluate(r2.route_maps["TO_ISP2"], external, r2).action == "deny"
