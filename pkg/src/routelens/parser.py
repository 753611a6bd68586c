"""Parser and canonical printer for the supported Cisco-IOS-like subset.

Grammar covered: `ip prefix-list`, `ip community-list standard|expanded`,
`ip as-path access-list`, `route-map` stanzas with the supported match/set
lines, and extended ACLs. `!` comment lines and blank lines are ignored.
Everything else yields a ParseError (or UnsupportedConstruct for known
IOS keywords we deliberately exclude, such as `continue`).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import (
    Acl,
    AclRule,
    AsPathList,
    AsPathListEntry,
    Community,
    CommunityList,
    CommunityListEntry,
    Config,
    MatchCondition,
    PortQualifier,
    Prefix,
    PrefixList,
    PrefixListEntry,
    RouteMap,
    SetClause,
    Stanza,
    int_to_ip,
    ip_to_int,
    validate_config,
)

UNSUPPORTED_KEYWORDS = ("continue", "goto", "call")


@dataclass(frozen=True)
class SourceSpan:
    line: int
    col_start: int = 1
    col_end: int = 1


@dataclass(frozen=True)
class ParseError:
    span: SourceSpan
    message: str
    text: str = ""

    def __str__(self) -> str:
        return f"line {self.span.line}: {self.message}: {self.text!r}"


class ParseFailure(Exception):
    """Raised when parsing produced one or more errors."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(str(e) for e in self.errors))


class MultipleStanzas(ParseFailure):
    pass


class DanglingReference(ParseFailure):
    pass


@dataclass
class _Builder:
    route_maps: dict = field(default_factory=dict)
    acls: dict = field(default_factory=dict)
    prefix_lists: dict = field(default_factory=dict)
    community_lists: dict = field(default_factory=dict)
    as_path_lists: dict = field(default_factory=dict)
    # (map name, stanza seq) in definition order
    stanza_order: list = field(default_factory=list)
    # list names in first-definition order (across all list kinds)
    list_order: list = field(default_factory=list)

    def note_list(self, name: str) -> None:
        if name not in self.list_order:
            self.list_order.append(name)

    def config(self) -> Config:
        return Config(
            route_maps={n: RouteMap(n, tuple(sts)) for n, sts in self.route_maps.items()},
            acls={n: Acl(n, tuple(rs)) for n, rs in self.acls.items()},
            prefix_lists={n: PrefixList(n, tuple(es)) for n, es in self.prefix_lists.items()},
            community_lists={
                n: CommunityList(n, style, tuple(es))
                for n, (style, es) in self.community_lists.items()
            },
            as_path_lists={n: AsPathList(n, tuple(es)) for n, es in self.as_path_lists.items()},
        )


def _parse_lines(text: str):
    """Yield (lineno, tokens, raw) for each significant line."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("!"):
            continue
        yield lineno, stripped.split(), raw


def _parse_int(tok: str, lo: int, hi: int) -> int:
    v = int(tok)
    if not (lo <= v <= hi):
        raise ValueError(f"{v} out of range {lo}..{hi}")
    return v


def _parse_action(tok: str) -> str:
    if tok not in ("permit", "deny"):
        raise ValueError(f"expected permit/deny, got {tok!r}")
    return tok


def _parse_endpoint(toks: list, i: int):
    """Parse an ACL src/dst: `any`, `host A.B.C.D`, or `A.B.C.D/L`."""
    tok = toks[i]
    if tok == "any":
        return Prefix(0, 0), i + 1
    if tok == "host":
        return Prefix.host(toks[i + 1]), i + 2
    return Prefix.parse(tok).normalized(), i + 1


def _parse_ports(toks: list, i: int):
    if i < len(toks) and toks[i] == "eq":
        p = _parse_int(toks[i + 1], 0, 0xFFFF)
        return PortQualifier(p, p), i + 2
    if i < len(toks) and toks[i] == "range":
        lo = _parse_int(toks[i + 1], 0, 0xFFFF)
        hi = _parse_int(toks[i + 2], 0, 0xFFFF)
        if hi < lo:
            raise ValueError(f"port range {lo}..{hi} is inverted")
        return PortQualifier(lo, hi), i + 3
    return None, i


def _parse_acl_rule(toks: list) -> AclRule:
    action = _parse_action(toks[0])
    proto = toks[1]
    if proto not in ("ip", "tcp", "udp", "icmp"):
        raise ValueError(f"unsupported protocol {proto!r}")
    src, i = _parse_endpoint(toks, 2)
    src_ports, i = _parse_ports(toks, i)
    dst, i = _parse_endpoint(toks, i)
    dst_ports, i = _parse_ports(toks, i)
    if i != len(toks):
        raise ValueError(f"trailing tokens {' '.join(toks[i:])!r}")
    return AclRule(action, proto, src, dst, src_ports, dst_ports)


def _parse_match(toks: list) -> MatchCondition:
    # toks starts after "match"
    if toks[:1] == ["as-path"] and len(toks) == 2:
        return MatchCondition("as-path", toks[1])
    if toks[:3] == ["ip", "address", "prefix-list"] and len(toks) == 4:
        return MatchCondition("prefix-list", toks[3])
    if toks[:1] == ["community"] and len(toks) == 2:
        return MatchCondition("community", toks[1])
    if toks[:1] == ["local-preference"] and len(toks) == 2:
        return MatchCondition("local-preference", _parse_int(toks[1], 0, 0xFFFFFFFF))
    if toks[:1] == ["tag"] and len(toks) == 2:
        return MatchCondition("tag", _parse_int(toks[1], 0, 0xFFFFFFFF))
    raise ValueError(f"unsupported match condition {' '.join(toks)!r}")


def _parse_set(toks: list) -> SetClause:
    # toks starts after "set"
    if toks[:1] == ["metric"] and len(toks) == 2:
        return SetClause("metric", _parse_int(toks[1], 0, 0xFFFFFFFF))
    if toks[:1] == ["local-preference"] and len(toks) == 2:
        return SetClause("local-preference", _parse_int(toks[1], 0, 0xFFFFFFFF))
    if toks[:3] == ["ip", "next-hop"] and len(toks) == 3:
        return SetClause("next-hop", ip_to_int(toks[2]))
    if toks[:1] == ["weight"] and len(toks) == 2:
        return SetClause("weight", _parse_int(toks[1], 0, 0xFFFF))
    if toks[:1] == ["tag"] and len(toks) == 2:
        return SetClause("tag", _parse_int(toks[1], 0, 0xFFFFFFFF))
    if toks[:1] == ["community"] and len(toks) >= 2:
        additive = toks[-1] == "additive"
        comm_toks = toks[1 : -1 if additive else None]
        if not comm_toks:
            raise ValueError("set community needs at least one community")
        comms = frozenset(Community.parse(t) for t in comm_toks)
        return SetClause("community-add" if additive else "community-replace", comms)
    raise ValueError(f"unsupported set clause {' '.join(toks)!r}")


def _parse_into(text: str, builder: _Builder, errors: list) -> None:
    current_stanza = None  # (map name, Stanza fields being built)
    current_acl = None

    def flush_stanza():
        nonlocal current_stanza
        if current_stanza is None:
            return
        name, seq, action, matches, sets = current_stanza
        try:
            st = Stanza(seq, action, tuple(matches), tuple(sets))
        except ValueError as exc:
            errors.append(ParseError(SourceSpan(0), str(exc), f"route-map {name} {action} {seq}"))
            current_stanza = None
            return
        builder.route_maps.setdefault(name, []).append(st)
        builder.stanza_order.append((name, seq))
        current_stanza = None

    for lineno, toks, raw in _parse_lines(text):
        span = SourceSpan(lineno, 1, len(raw))
        head = toks[0]
        try:
            if head == "route-map":
                flush_stanza()
                current_acl = None
                if len(toks) != 4:
                    raise ValueError("expected `route-map NAME permit|deny SEQ`")
                name, action, seq = toks[1], _parse_action(toks[2]), _parse_int(toks[3], 1, 0xFFFF)
                current_stanza = (name, seq, action, [], [])
            elif head == "match" and current_stanza is not None:
                current_stanza[3].append(_parse_match(toks[1:]))
            elif head == "set" and current_stanza is not None:
                name, seq, action, matches, sets = current_stanza
                if action == "deny":
                    raise ValueError("`set` is not allowed under a deny stanza")
                sets.append(_parse_set(toks[1:]))
            elif head in UNSUPPORTED_KEYWORDS:
                errors.append(
                    ParseError(span, f"UnsupportedConstruct: {head!r} is out of scope", raw.strip())
                )
            elif head == "ip" and toks[1:2] == ["prefix-list"]:
                flush_stanza()
                current_acl = None
                i = 2
                name = toks[i]
                i += 1
                seq = None
                if toks[i] == "seq":
                    seq = _parse_int(toks[i + 1], 1, 0xFFFFFFFF)
                    i += 2
                action = _parse_action(toks[i])
                prefix = Prefix.parse(toks[i + 1]).normalized()
                i += 2
                ge = le = None
                while i < len(toks):
                    if toks[i] == "ge":
                        ge = _parse_int(toks[i + 1], 0, 32)
                    elif toks[i] == "le":
                        le = _parse_int(toks[i + 1], 0, 32)
                    else:
                        raise ValueError(f"unexpected token {toks[i]!r}")
                    i += 2
                entry = PrefixListEntry(action, prefix, ge, le, seq)
                lo, hi = entry.bounds()
                if not (prefix.length <= lo <= hi <= 32):
                    raise ValueError(f"bad ge/le range {lo}-{hi} for {prefix}")
                builder.note_list(name)
                builder.prefix_lists.setdefault(name, []).append(entry)
            elif head == "ip" and toks[1:2] == ["community-list"]:
                flush_stanza()
                current_acl = None
                style = toks[2]
                if style not in ("standard", "expanded"):
                    raise ValueError("expected `standard` or `expanded`")
                name = toks[3]
                action = _parse_action(toks[4])
                if style == "standard":
                    comms = frozenset(Community.parse(t) for t in toks[5:])
                    if not comms:
                        raise ValueError("standard community-list entry needs communities")
                    entry = CommunityListEntry(action, communities=comms)
                else:
                    if len(toks) != 6:
                        raise ValueError("expanded community-list entry takes one regex")
                    entry = CommunityListEntry(action, regex=toks[5])
                builder.note_list(name)
                existing = builder.community_lists.setdefault(name, (style, []))
                if existing[0] != style:
                    raise ValueError(f"community-list {name} mixes standard and expanded")
                existing[1].append(entry)
            elif head == "ip" and toks[1:3] == ["as-path", "access-list"]:
                flush_stanza()
                current_acl = None
                if len(toks) != 6:
                    raise ValueError("expected `ip as-path access-list NAME permit|deny REGEX`")
                name, action, regex = toks[3], _parse_action(toks[4]), toks[5]
                builder.note_list(name)
                builder.as_path_lists.setdefault(name, []).append(AsPathListEntry(action, regex))
            elif head == "ip" and toks[1:3] == ["access-list", "extended"]:
                flush_stanza()
                if len(toks) != 4:
                    raise ValueError("expected `ip access-list extended NAME`")
                current_acl = toks[3]
                builder.acls.setdefault(current_acl, [])
            elif head in ("permit", "deny") and current_acl is not None:
                builder.acls[current_acl].append(_parse_acl_rule(toks))
            elif head == "access-list":
                flush_stanza()
                current_acl = None
                name = toks[1]
                builder.acls.setdefault(name, []).append(_parse_acl_rule(toks[2:]))
            else:
                raise ValueError("unrecognized configuration line")
        except (ValueError, IndexError) as exc:
            msg = str(exc) if str(exc) else "malformed line"
            errors.append(ParseError(span, msg, raw.strip()))
    flush_stanza()


def parse_config(text: str) -> Config:
    """Parse a device configuration; raises ParseFailure on any error."""
    builder = _Builder()
    errors: list = []
    _parse_into(text, builder, errors)
    if errors:
        raise ParseFailure(errors)
    config = builder.config()
    diags = validate_config(config)
    if diags:
        raise ParseFailure(
            [ParseError(SourceSpan(0), str(d), d.obj) for d in diags]
        )
    return config


@dataclass(frozen=True)
class Snippet:
    """One route-map stanza plus the lists it references."""

    map_name: str
    stanza: Stanza
    config: Config  # single-stanza route-map and the supporting lists
    list_order: tuple = ()  # supporting list names in definition order

    @property
    def route_map(self) -> RouteMap:
        return self.config.route_maps[self.map_name]


def parse_stanza_snippet(text: str) -> Snippet:
    """Parse a generated snippet: exactly one stanza plus supporting lists."""
    builder = _Builder()
    errors: list = []
    _parse_into(text, builder, errors)
    if errors:
        raise ParseFailure(errors)
    if len(builder.stanza_order) == 0:
        raise ParseFailure([ParseError(SourceSpan(0), "snippet contains no route-map stanza")])
    if len(builder.stanza_order) > 1:
        raise MultipleStanzas(
            [ParseError(SourceSpan(0), f"snippet contains {len(builder.stanza_order)} stanzas; expected exactly one")]
        )
    config = builder.config()
    diags = validate_config(config)
    if any(d.code == "DanglingReference" for d in diags):
        raise DanglingReference([ParseError(SourceSpan(0), str(d), d.obj) for d in diags])
    if diags:
        raise ParseFailure([ParseError(SourceSpan(0), str(d), d.obj) for d in diags])
    map_name = builder.stanza_order[0][0]
    return Snippet(
        map_name,
        config.route_maps[map_name].stanzas[0],
        config,
        tuple(builder.list_order),
    )


def _print_prefix_entry(name: str, e: PrefixListEntry) -> str:
    parts = ["ip prefix-list", name]
    if e.seq is not None:
        parts += ["seq", str(e.seq)]
    parts += [e.action, str(e.prefix)]
    if e.ge is not None:
        parts += ["ge", str(e.ge)]
    if e.le is not None:
        parts += ["le", str(e.le)]
    return " ".join(parts)


def _print_match(m: MatchCondition) -> str:
    if m.kind == "as-path":
        return f" match as-path {m.value}"
    if m.kind == "prefix-list":
        return f" match ip address prefix-list {m.value}"
    if m.kind == "community":
        return f" match community {m.value}"
    if m.kind == "local-preference":
        return f" match local-preference {m.value}"
    return f" match tag {m.value}"


def _print_set(s: SetClause) -> str:
    if s.kind == "metric":
        return f" set metric {s.value}"
    if s.kind == "local-preference":
        return f" set local-preference {s.value}"
    if s.kind == "next-hop":
        return f" set ip next-hop {int_to_ip(s.value)}"
    if s.kind == "weight":
        return f" set weight {s.value}"
    if s.kind == "tag":
        return f" set tag {s.value}"
    comms = " ".join(str(c) for c in sorted(s.value))
    suffix = " additive" if s.kind == "community-add" else ""
    return f" set community {comms}{suffix}"


def _print_acl_rule(r: AclRule) -> str:
    def endpoint(p: Prefix):
        if p.length == 0 and p.addr == 0:
            return ["any"]
        if p.length == 32:
            return ["host", int_to_ip(p.addr)]
        return [str(p)]

    def ports(q):
        if q is None:
            return []
        if q.lo == q.hi:
            return ["eq", str(q.lo)]
        return ["range", str(q.lo), str(q.hi)]

    toks = [r.action, r.protocol]
    toks += endpoint(r.src) + ports(r.src_ports)
    toks += endpoint(r.dst) + ports(r.dst_ports)
    return " ".join(toks)


def print_config(c: Config) -> str:
    """Canonical, byte-stable text form; parse_config(print_config(c)) == c."""
    blocks = []
    for name in sorted(c.prefix_lists):
        pl = c.prefix_lists[name]
        blocks.append("\n".join(_print_prefix_entry(name, e) for e in pl.entries))
    for name in sorted(c.community_lists):
        cl = c.community_lists[name]
        lines = []
        for e in cl.entries:
            if cl.style == "standard":
                comms = " ".join(str(x) for x in sorted(e.communities))
                lines.append(f"ip community-list standard {name} {e.action} {comms}")
            else:
                lines.append(f"ip community-list expanded {name} {e.action} {e.regex}")
        blocks.append("\n".join(lines))
    for name in sorted(c.as_path_lists):
        al = c.as_path_lists[name]
        blocks.append(
            "\n".join(f"ip as-path access-list {name} {e.action} {e.regex}" for e in al.entries)
        )
    for name in sorted(c.acls):
        acl = c.acls[name]
        lines = [f"ip access-list extended {name}"]
        lines += [f" {_print_acl_rule(r)}" for r in acl.rules]
        blocks.append("\n".join(lines))
    for name in sorted(c.route_maps):
        rm = c.route_maps[name]
        lines = []
        for st in rm.stanzas:
            lines.append(f"route-map {name} {st.action} {st.seq}")
            lines += [_print_match(m) for m in st.matches]
            lines += [_print_set(s) for s in st.sets]
        blocks.append("\n".join(lines))
    if not blocks:
        return ""
    return "\n\n".join(blocks) + "\n"
