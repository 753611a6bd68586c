"""First-match evaluation, symbolic policy queries, and the overlap census.

The symbolic queries (search_route_policies, search_filters,
compare_route_policies, overlap_census) are computed on the constraint
algebra from `symbolic`; every witness is re-validated against the
concrete evaluator before being returned. A small deterministic finite
universe of routes/packets derived from the config serves as an
independent brute-force oracle in tests and as a fallback when a
symbolic candidate cannot be validated (results then carry an `oracle`
provenance flag).
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import dataclass, field, replace

from .model import (
    Acl,
    Community,
    Config,
    Packet,
    Prefix,
    PROTOCOLS,
    Route,
    RouteMap,
    SET_APPLY_ORDER,
    Stanza,
    int_to_ip,
    normalize_route,
)
from .symbolic import (
    AS_PATH_BOUND,
    BoundExceeded,
    FRESH_ASN,
    HeaderSpace,
    RouteConstraints,
    ScalarConstraint,
    complement_intervals,
    header_space,
    parse_as_path_regex,
    parse_community_regex,
    space_full,
    space_intersect,
    space_member,
    space_satisfiable,
    space_subtract,
    space_witness,
    stanza_space,
)

IMPLICIT_DENY = "implicit-deny"
FRESH_PREFIX = Prefix.parse("203.0.113.0/24")
FRESH_IP = Prefix.parse("203.0.113.7/32").addr


@dataclass(frozen=True)
class Verdict:
    action: str  # "permit" | "deny"
    matched_seq: object  # stanza seq (int) or IMPLICIT_DENY
    output: object = None  # Route iff permit

    def same_behavior(self, other: "Verdict") -> bool:
        """Behavioral equality: same action and, when permitting, same output."""
        if self.action != other.action:
            return False
        if self.action == "permit":
            return self.output == other.output
        return True


def matches(route: Route, stanza: Stanza, config: Config) -> bool:
    """The concrete per-stanza match predicate (conjunction of match lines)."""
    for m in stanza.matches:
        if m.kind == "prefix-list":
            if not _prefix_list_matches(config.prefix_lists[m.value], route.network):
                return False
        elif m.kind == "community":
            if not _community_list_matches(config.community_lists[m.value], route.communities):
                return False
        elif m.kind == "as-path":
            if not _as_path_list_matches(config.as_path_lists[m.value], route.as_path):
                return False
        elif m.kind == "local-preference":
            if route.local_pref != m.value:
                return False
        elif m.kind == "tag":
            if route.tag != m.value:
                return False
    return True


def _prefix_list_matches(pl, network: Prefix) -> bool:
    for e in pl.entries:
        lo, hi = e.bounds()
        if lo <= network.length <= hi and e.prefix.contains(network):
            return e.action == "permit"
    return False


def _community_list_matches(cl, communities) -> bool:
    for e in cl.entries:
        if cl.style == "standard":
            hit = e.communities <= communities
        else:
            hit = parse_community_regex(e.regex) in communities
        if hit:
            return e.action == "permit"
    return False


def _as_path_list_matches(al, path) -> bool:
    for e in al.entries:
        if parse_as_path_regex(e.regex).holds(path):
            return e.action == "permit"
    return False


def apply_sets(stanza: Stanza, route: Route) -> Route:
    out = route
    for kind in SET_APPLY_ORDER:
        clause = stanza.set_clause(kind)
        if clause is None:
            continue
        if kind == "metric":
            out = replace(out, med=clause.value)
        elif kind == "local-preference":
            out = replace(out, local_pref=clause.value)
        elif kind == "next-hop":
            out = replace(out, next_hop=clause.value)
        elif kind == "weight":
            out = replace(out, weight=clause.value)
        elif kind == "tag":
            out = replace(out, tag=clause.value)
        elif kind == "community-add":
            out = replace(out, communities=out.communities | clause.value)
        elif kind == "community-replace":
            out = replace(out, communities=frozenset(clause.value))
    return out


def stanza_verdict(stanza: Stanza, route: Route) -> Verdict:
    if stanza.action == "permit":
        return Verdict("permit", stanza.seq, apply_sets(stanza, route))
    return Verdict("deny", stanza.seq)


def evaluate(rm: RouteMap, route: Route, config: Config) -> Verdict:
    """First-match semantics with the implicit trailing deny."""
    route = normalize_route(route)
    for st in rm.stanzas:
        if matches(route, st, config):
            return stanza_verdict(st, route)
    return Verdict("deny", IMPLICIT_DENY)


def evaluate_acl(acl: Acl, packet: Packet):
    """Returns (action, matched index or IMPLICIT_DENY)."""
    for idx, rule in enumerate(acl.rules):
        if header_space(rule).member(packet):
            return rule.action, idx
    return "deny", IMPLICIT_DENY


# ---------------------------------------------------------------------------
# Finite oracle universes
# ---------------------------------------------------------------------------

def _mentioned_route_values(config: Config, extra_spaces=()):
    bases, lengths = set(), set()
    communities, asns = set(), set()
    lps, meds, tags = set(), set(), set()

    for pl in config.prefix_lists.values():
        for e in pl.entries:
            lo, hi = e.bounds()
            bases.add(e.prefix)
            lengths.update((e.prefix.length, lo, hi))
    for cl in config.community_lists.values():
        for e in cl.entries:
            if cl.style == "standard":
                communities.update(e.communities)
            else:
                communities.add(parse_community_regex(e.regex))
    for al in config.as_path_lists.values():
        for e in al.entries:
            atom = parse_as_path_regex(e.regex)
            if atom.op != "empty":
                asns.add(atom.asn)
    for rm in config.route_maps.values():
        for st in rm.stanzas:
            for m in st.matches:
                if m.kind == "local-preference":
                    lps.add(m.value)
                elif m.kind == "tag":
                    tags.add(m.value)
            for sc in st.sets:
                if sc.kind == "metric":
                    meds.add(sc.value)
                elif sc.kind == "local-preference":
                    lps.add(sc.value)
                elif sc.kind == "tag":
                    tags.add(sc.value)
                elif sc.kind in ("community-add", "community-replace"):
                    communities.update(sc.value)

    for space in extra_spaces:
        for alt in space:
            for atom in alt.prefix.atoms:
                bases.add(atom.base)
                lengths.update((atom.base.length, atom.len_lo, atom.len_hi))
            communities.update(alt.community.requires | alt.community.forbids)
            asns.update(alt.as_path.mentioned_asns())
            for attr, ivs in alt.scalars.intervals:
                values = {lo for lo, _ in ivs} | {hi for _, hi in ivs}
                if attr == "local_pref":
                    lps.update(values)
                elif attr == "med":
                    meds.update(values)
                elif attr == "tag":
                    tags.update(values)
    return bases, lengths, communities, asns, lps, meds, tags


def build_route_universe(config: Config, extra_spaces=(), max_communities=4):
    """Deterministic finite route universe covering every match boundary.

    Every mentioned base prefix is instantiated at every mentioned length
    (cross product, so intersections of constraints from different objects
    stay covered), plus a fresh prefix, fresh ASN, and default scalars.
    """
    bases, lengths, communities, asns, lps, meds, tags = _mentioned_route_values(
        config, extra_spaces
    )
    bases.add(FRESH_PREFIX)
    lengths.add(FRESH_PREFIX.length)
    networks = set()
    for base in bases:
        for length in lengths:
            if length >= base.length:
                networks.add(Prefix(base.addr, length).normalized())
    comm_pool = sorted(communities)[:max_communities]
    comm_subsets = [
        frozenset(s)
        for r in range(len(comm_pool) + 1)
        for s in itertools.combinations(comm_pool, r)
    ]
    asn_pool = sorted(asns) + [FRESH_ASN]
    paths = [()]
    paths += [(a,) for a in asn_pool]
    paths += [(a, b) for a in asn_pool for b in asn_pool]
    lp_values = sorted(lps | {100})
    med_values = sorted(meds | {0})
    tag_values = sorted(tags | {0})

    universe = []
    for network in sorted(networks):
        for path in paths:
            for comms in comm_subsets:
                for lp in lp_values:
                    for med in med_values:
                        for tag in tag_values:
                            universe.append(
                                Route(
                                    network=network,
                                    as_path=path,
                                    communities=comms,
                                    local_pref=lp,
                                    med=med,
                                    tag=tag,
                                )
                            )
    return universe


def build_packet_universe(config: Config, extra_spaces=()):
    """Deterministic finite packet universe from the config's ACLs."""
    ips, ports = set(), {0}

    def add_prefix(p: Prefix):
        ips.add(p.addr)
        if p.length < 32:
            # one address strictly inside the prefix
            ips.add(p.addr | (1 << (31 - p.length)))

    def add_ports(q):
        if q is None:
            return
        for v in (q.lo, q.hi):
            ports.add(v)
            if v + 1 <= 0xFFFF:
                ports.add(v + 1)
            if v - 1 >= 0:
                ports.add(v - 1)

    for acl in config.acls.values():
        for r in acl.rules:
            add_prefix(r.src)
            add_prefix(r.dst)
            add_ports(r.src_ports)
            add_ports(r.dst_ports)
    for space in extra_spaces:
        for box in space.boxes:
            add_prefix(box.src)
            add_prefix(box.dst)
            for ivs in (box.src_ports, box.dst_ports):
                for lo, hi in ivs:
                    ports.update(v for v in (lo, hi) if 0 <= v <= 0xFFFF)
    ips.add(FRESH_IP)
    ip_list, port_list = sorted(ips), sorted(ports)
    universe = []
    for src, dst in itertools.product(ip_list, repeat=2):
        for proto in PROTOCOLS:
            if proto in ("tcp", "udp"):
                for sp in port_list:
                    for dp in port_list:
                        universe.append(Packet(src, dst, proto, sp, dp))
            else:
                universe.append(Packet(src, dst, proto))
    return universe


# ---------------------------------------------------------------------------
# Reach spaces (first-match filtered)
# ---------------------------------------------------------------------------

def reach_spaces(rm: RouteMap, config: Config):
    """Per-stanza route space of inputs first-matched by that stanza,
    plus the implicit-deny remainder under the key IMPLICIT_DENY."""
    reaches = {}
    earlier = []
    for st in rm.stanzas:
        sp = stanza_space(st, config)
        reach = sp
        for prev in earlier:
            reach = space_subtract(reach, prev)
        reaches[st.seq] = reach
        earlier.append(sp)
    remainder = space_full()
    for prev in earlier:
        remainder = space_subtract(remainder, prev)
    reaches[IMPLICIT_DENY] = remainder
    return reaches


def acl_reach_spaces(acl: Acl):
    reaches = {}
    earlier = HeaderSpace(())
    remaining = HeaderSpace.full()
    for idx, rule in enumerate(acl.rules):
        hs = header_space(rule)
        reaches[idx] = hs.subtract(earlier) if earlier.boxes else hs
        earlier = HeaderSpace(earlier.boxes + hs.boxes)
    reaches[IMPLICIT_DENY] = remaining.subtract(earlier)
    return reaches


# ---------------------------------------------------------------------------
# search / compare / census
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SearchOutcome:
    status: str  # "found" | "none" | "inconclusive"
    witness: object = None
    provenance: str = "symbolic"  # "symbolic" | "oracle"
    reason: str = ""

    @property
    def found(self) -> bool:
        return self.status == "found"


@dataclass(frozen=True)
class OutputExpectation:
    """Expected output-attribute assignments for permitted routes.

    scalars maps attr -> exact value; communities, when not None, is a
    (mode, set) pair with mode "add" (input plus set) or "replace".
    next_hop, when not None, is an exact address.
    """

    scalars: tuple = ()  # ((attr, value), ...)
    communities: object = None
    next_hop: object = None

    def scalar_map(self):
        return dict(self.scalars)

    def expected_output(self, route: Route) -> Route:
        out = route
        for attr, value in self.scalars:
            out = replace(out, **{attr: value})
        if self.communities is not None:
            mode, comms = self.communities
            if mode == "add":
                out = replace(out, communities=out.communities | comms)
            else:
                out = replace(out, communities=frozenset(comms))
        if self.next_hop is not None:
            out = replace(out, next_hop=self.next_hop)
        return out


_SET_TO_ATTR = {"metric": "med", "local-preference": "local_pref", "weight": "weight", "tag": "tag"}


def _stanza_effect(stanza: Stanza):
    """The stanza's output transformation as an OutputExpectation."""
    scalars = []
    communities = None
    next_hop = None
    for sc in stanza.sets:
        if sc.kind in _SET_TO_ATTR:
            scalars.append((_SET_TO_ATTR[sc.kind], sc.value))
        elif sc.kind == "next-hop":
            next_hop = sc.value
        elif sc.kind == "community-add":
            communities = ("add", frozenset(sc.value))
        elif sc.kind == "community-replace":
            communities = ("replace", frozenset(sc.value))
    return OutputExpectation(tuple(scalars), communities, next_hop)


def _output_mismatch_spaces(stanza: Stanza, expect: OutputExpectation):
    """Input-route spaces on which the stanza's permit output violates
    `expect`, or None when a mismatch cannot be expressed symbolically
    (the caller then falls back to witness probing)."""
    effect = _stanza_effect(stanza)
    spaces = []
    exact_only = True

    eff_scalars = effect.scalar_map()
    exp_scalars = expect.scalar_map()
    for attr in set(eff_scalars) | set(exp_scalars):
        if attr in exp_scalars:
            want = exp_scalars[attr]
            if attr in eff_scalars:
                if eff_scalars[attr] != want:
                    spaces.append(space_full())  # always wrong
            else:
                # passthrough: wrong whenever the input attr differs
                comp = complement_intervals(((want, want),), 0xFFFF if attr == "weight" else 0xFFFFFFFF)
                spaces.append([RouteConstraints(scalars=ScalarConstraint(((attr, comp),)))])
        else:
            # stanza modifies an attribute the expectation wants untouched
            v = eff_scalars[attr]
            comp = complement_intervals(((v, v),), 0xFFFF if attr == "weight" else 0xFFFFFFFF)
            spaces.append([RouteConstraints(scalars=ScalarConstraint(((attr, comp),)))])

    comm_spaces, comm_exact = _community_mismatch_spaces(
        effect.communities, expect.communities
    )
    spaces.extend(comm_spaces)
    exact_only = exact_only and comm_exact

    if effect.next_hop != expect.next_hop:
        if effect.next_hop is not None and expect.next_hop is not None:
            spaces.append(space_full())  # different constant next-hops
        else:
            # next-hop passthrough vs constant: the input's next-hop is not
            # part of the constraint language; probe concretely
            exact_only = False

    return spaces, exact_only


def _community_mismatch_spaces(ec, xc):
    """Input spaces where applying `ec` and `xc` to the community set
    yields different results; None means passthrough."""
    if ec == xc:
        return [], True
    a = ec if ec is not None else ("add", frozenset())
    b = xc if xc is not None else ("add", frozenset())
    spaces = []
    if a[0] == "add" and b[0] == "add":
        diff = (a[1] | b[1]) - (a[1] & b[1])
        for c in sorted(diff):
            spaces.append([RouteConstraints(community=_forbid(c))])
        return spaces, True
    if a[0] == "replace" and b[0] == "replace":
        return ([space_full()] if a[1] != b[1] else []), True
    # one replaces with R, the other adds A: outputs are R vs input | A
    r_set = a[1] if a[0] == "replace" else b[1]
    a_set = a[1] if a[0] == "add" else b[1]
    if a_set - r_set:
        return [space_full()], True  # the added community can never be in R
    for c in sorted(r_set - a_set):
        spaces.append([RouteConstraints(community=_forbid(c))])
    # the remaining case (input carries a community outside R) is not
    # expressible; callers probe concretely
    return spaces, False


def _forbid(c: Community):
    from .symbolic import CommunityConstraint

    return CommunityConstraint(forbids=frozenset([c]))


def search_route_policies(
    rm: RouteMap,
    config: Config,
    action: str,
    input_space=None,
    output_expect: OutputExpectation = None,
    output_violates: bool = True,
    bound: int = AS_PATH_BOUND,
) -> SearchOutcome:
    """Find a route in `input_space` that the map handles with `action`
    (and, when given, whose permit output violates/meets `output_expect`)."""
    if input_space is None:
        input_space = space_full()
    if isinstance(input_space, RouteConstraints):
        input_space = [input_space]

    candidates = []
    inconclusive = False
    reaches = reach_spaces(rm, config)
    stanza_by_seq = {st.seq: st for st in rm.stanzas}

    for seq, reach in reaches.items():
        st = stanza_by_seq.get(seq)
        st_action = st.action if st is not None else "deny"
        if st_action != action:
            continue
        region = space_intersect(reach, input_space)
        if output_expect is not None and action == "permit":
            if not output_violates:
                # meeting the expectation is the complement of violating it
                mismatch, exact = _output_mismatch_spaces(st, output_expect)
                bad = []
                for sp in mismatch:
                    bad.extend(sp)
                region = space_subtract(region, bad) if bad else region
                if not exact:
                    inconclusive = True  # cannot exactly express; validated below
            else:
                mismatch, exact = _output_mismatch_spaces(st, output_expect)
                pieces = []
                for sp in mismatch:
                    pieces.extend(space_intersect(region, sp))
                if not exact:
                    # probe: any region member may still differ concretely
                    try:
                        w = space_witness(region, bound)
                    except BoundExceeded:
                        inconclusive = True
                        w = None
                    if w is not None:
                        pieces.append(_route_point(w))
                region = pieces
        try:
            w = space_witness(region, bound)
        except BoundExceeded:
            inconclusive = True
            continue
        if w is not None:
            candidates.append(w)

    # concrete validation
    valid = []
    for w in candidates:
        if _validates(rm, config, w, action, input_space, output_expect, output_violates):
            valid.append(w)
    if valid:
        return SearchOutcome("found", min(valid, key=lambda r: r.sort_key()))

    # fall back to the finite oracle when symbolic candidates failed to
    # validate (possible only for next-hop/community probe cases)
    if candidates or inconclusive:
        universe = build_route_universe(config, extra_spaces=(input_space,))
        for r in universe:
            if _validates(rm, config, r, action, input_space, output_expect, output_violates):
                return SearchOutcome("found", r, provenance="oracle")
        if inconclusive:
            return SearchOutcome("inconclusive", reason="as-path bound exceeded")
    return SearchOutcome("none")


def _route_point(route: Route):
    """A one-route space used to carry a concrete probe candidate."""
    from .symbolic import (
        AsPathAtom,
        AsPathConstraint,
        CommunityConstraint,
        PrefixAtom,
        PrefixSpace,
    )

    atoms = []
    if route.as_path:
        atoms.append(AsPathAtom("begins", route.as_path[0]))
        atoms.append(AsPathAtom("ends", route.as_path[-1]))
    else:
        atoms.append(AsPathAtom("empty"))
    return [
        RouteConstraints(
            prefix=PrefixSpace.of(
                PrefixAtom(route.network, route.network.length, route.network.length)
            ),
            community=CommunityConstraint(requires=frozenset(route.communities)),
            as_path=AsPathConstraint(tuple(atoms)),
            scalars=ScalarConstraint.of(
                local_pref=route.local_pref,
                med=route.med,
                tag=route.tag,
                weight=route.weight,
            ),
        )
    ]


def _validates(rm, config, route, action, input_space, output_expect, output_violates) -> bool:
    if not space_member(input_space, route):
        return False
    verdict = evaluate(rm, route, config)
    if verdict.action != action:
        return False
    if output_expect is not None and action == "permit":
        expected = output_expect.expected_output(route)
        wrong = verdict.output != expected
        if output_violates != wrong:
            return False
    return True


def search_filters(
    acl: Acl, action: str, header_constraints: HeaderSpace = None
) -> SearchOutcome:
    """ACL analogue of search_route_policies; exact."""
    if header_constraints is None:
        header_constraints = HeaderSpace.full()
    reaches = acl_reach_spaces(acl)
    best = None
    for idx, reach in reaches.items():
        rule_action = acl.rules[idx].action if idx != IMPLICIT_DENY else "deny"
        if rule_action != action:
            continue
        w = reach.intersect(header_constraints).witness()
        if w is not None and (best is None or w.sort_key() < best.sort_key()):
            best = w
    if best is None:
        return SearchOutcome("none")
    return SearchOutcome("found", best)


@dataclass(frozen=True)
class Difference:
    input_route: Route
    verdict_a: Verdict
    verdict_b: Verdict


def _difference_region(region, st_a, st_b, bound=AS_PATH_BOUND):
    """Constrain `region` to inputs where the two permit stanzas produce
    different outputs. Returns (spaces, exact)."""
    effect_a, effect_b = _stanza_effect(st_a), _stanza_effect(st_b)
    if effect_a == effect_b:
        return [], True
    # reuse the mismatch machinery: outputs differ where st_a's output
    # violates st_b's effect treated as the expectation
    mismatch, exact = _output_mismatch_spaces(st_a, effect_b)
    pieces = []
    for sp in mismatch:
        pieces.extend(space_intersect(region, sp))
    return pieces, exact


def compare_route_policies(
    rm_a: RouteMap, rm_b: RouteMap, config: Config, scope=None, bound: int = AS_PATH_BOUND
):
    """Deterministic list of behavioral differences between two route-maps.

    Returns (differences, inconclusive_flag); at least one Difference per
    distinct (seqA, seqB) pair of handling stanzas with differing verdicts.
    """
    if scope is None:
        scope = space_full()
    if isinstance(scope, RouteConstraints):
        scope = [scope]
    reaches_a = reach_spaces(rm_a, config)
    reaches_b = reach_spaces(rm_b, config)
    st_a = {st.seq: st for st in rm_a.stanzas}
    st_b = {st.seq: st for st in rm_b.stanzas}

    diffs = []
    inconclusive = False
    oracle_universe = None

    for seq_a, reach_a in reaches_a.items():
        for seq_b, reach_b in reaches_b.items():
            a, b = st_a.get(seq_a), st_b.get(seq_b)
            action_a = a.action if a else "deny"
            action_b = b.action if b else "deny"
            region = space_intersect(space_intersect(reach_a, reach_b), scope)
            if not region:
                continue
            need_probe = False
            if action_a != action_b:
                target = region
            elif action_a == "deny":
                continue  # both deny: identical behavior
            else:
                target, exact = _difference_region(region, a, b, bound)
                need_probe = not exact
            witness = None
            try:
                witness = space_witness(target, bound)
            except BoundExceeded:
                inconclusive = True
            if witness is None and need_probe:
                try:
                    witness = space_witness(region, bound)
                except BoundExceeded:
                    inconclusive = True
            if witness is None:
                continue
            va = evaluate(rm_a, witness, config)
            vb = evaluate(rm_b, witness, config)
            if va.same_behavior(vb):
                # symbolic candidate did not validate; consult the oracle
                if oracle_universe is None:
                    probe_config = replace(
                        config,
                        route_maps={
                            **config.route_maps,
                            "__cmp_a__": rm_a,
                            "__cmp_b__": rm_b,
                        },
                    )
                    oracle_universe = build_route_universe(
                        probe_config, extra_spaces=(scope,)
                    )
                witness = None
                for r in oracle_universe:
                    if not space_member(region, r):
                        continue
                    xa, xb = evaluate(rm_a, r, config), evaluate(rm_b, r, config)
                    if not xa.same_behavior(xb):
                        witness, va, vb = r, xa, xb
                        break
                if witness is None:
                    continue
            diffs.append(Difference(witness, va, vb))

    key = lambda d: (
        str(d.verdict_a.matched_seq),
        str(d.verdict_b.matched_seq),
        d.input_route.sort_key(),
    )
    return sorted(diffs, key=key), inconclusive


@dataclass(frozen=True)
class OverlapPair:
    policy: str
    seq_a: object
    seq_b: object
    kind: str  # "overlap" | "conflicting"
    trivial_subset: bool
    witness: object  # Route or Packet


@dataclass
class OverlapReport:
    """Overlap census for every route-map and ACL in a config.

    Counting note: `pairs` counts overlapping rule *pairs*, not rules.
    """

    pairs: list = field(default_factory=list)
    inconclusive: list = field(default_factory=list)

    def for_policy(self, name: str):
        return [p for p in self.pairs if p.policy == name]

    def filtered(self, include_trivial: bool = True):
        if include_trivial:
            return list(self.pairs)
        return [p for p in self.pairs if not p.trivial_subset]

    def to_json(self, include_trivial: bool = True) -> str:
        def witness_dict(w):
            if isinstance(w, Route):
                return route_to_dict(w)
            return packet_to_dict(w)

        return json.dumps(
            {
                "counting": "overlapping rule pairs per policy",
                "pairs": [
                    {
                        "policy": p.policy,
                        "seqA": p.seq_a,
                        "seqB": p.seq_b,
                        "kind": p.kind,
                        "trivialSubset": p.trivial_subset,
                        "witness": witness_dict(p.witness),
                    }
                    for p in self.filtered(include_trivial)
                ],
                "inconclusive": [
                    {"policy": name, "seqA": a, "seqB": b}
                    for name, a, b in self.inconclusive
                ],
            },
            indent=2,
        )

    def to_csv(self, include_trivial: bool = True) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["policy", "seqA", "seqB", "kind", "trivialSubset", "witness"])
        for p in self.filtered(include_trivial):
            writer.writerow(
                [
                    p.policy,
                    p.seq_a,
                    p.seq_b,
                    p.kind,
                    str(p.trivial_subset).lower(),
                    json.dumps(
                        route_to_dict(p.witness)
                        if isinstance(p.witness, Route)
                        else packet_to_dict(p.witness)
                    ),
                ]
            )
        return buf.getvalue()


def route_to_dict(r: Route) -> dict:
    return {
        "network": str(r.network),
        "asPath": list(r.as_path),
        "communities": [str(c) for c in sorted(r.communities)],
        "localPref": r.local_pref,
        "med": r.med,
        "nextHop": int_to_ip(r.next_hop),
        "tag": r.tag,
        "weight": r.weight,
    }


def packet_to_dict(p: Packet) -> dict:
    return {
        "srcIp": int_to_ip(p.src_ip),
        "dstIp": int_to_ip(p.dst_ip),
        "protocol": p.protocol,
        "srcPort": p.src_port,
        "dstPort": p.dst_port,
    }


def overlap_census(config: Config, bound: int = AS_PATH_BOUND) -> OverlapReport:
    report = OverlapReport()
    for name in sorted(config.route_maps):
        rm = config.route_maps[name]
        spaces = [(st.seq, stanza_space(st, config)) for st in rm.stanzas]
        for (seq_a, sp_a), (seq_b, sp_b) in itertools.combinations(spaces, 2):
            inter = space_intersect(sp_a, sp_b)
            try:
                w = space_witness(inter, bound)
            except BoundExceeded:
                report.inconclusive.append((name, seq_a, seq_b))
                continue
            if w is None:
                continue
            trivial = _space_subset(sp_a, sp_b, bound) or _space_subset(sp_b, sp_a, bound)
            report.pairs.append(
                OverlapPair(name, seq_a, seq_b, "overlap", trivial, w)
            )
    for name in sorted(config.acls):
        acl = config.acls[name]
        for ia, ib in itertools.combinations(range(len(acl.rules)), 2):
            ra, rb = acl.rules[ia], acl.rules[ib]
            if ra.action == rb.action:
                continue
            hs = header_space(ra).intersect(header_space(rb))
            w = hs.witness()
            if w is None:
                continue
            trivial = (
                header_space(ra).subtract(header_space(rb)).witness() is None
                or header_space(rb).subtract(header_space(ra)).witness() is None
            )
            report.pairs.append(OverlapPair(name, ia, ib, "conflicting", trivial, w))
    report.pairs.sort(key=lambda p: (p.policy, str(p.seq_a), str(p.seq_b)))
    return report


def _space_subset(a, b, bound) -> bool:
    try:
        return not space_satisfiable(space_subtract(a, b), bound)
    except BoundExceeded:
        return False
