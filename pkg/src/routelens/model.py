"""Core domain types: routes, packets, rules, and named configurations.

All types are immutable value objects; they can be shared freely between
threads and used as dict keys.
"""

from __future__ import annotations

import ipaddress
from dataclasses import dataclass, field, replace
from typing import Optional, Union

PROTOCOLS = ("ip", "tcp", "udp", "icmp")

MATCH_KINDS = ("as-path", "prefix-list", "community", "local-preference", "tag")
SET_KINDS = (
    "metric",
    "local-preference",
    "next-hop",
    "weight",
    "tag",
    "community-add",
    "community-replace",
)

# Order in which set clauses are applied to a permitted route.
SET_APPLY_ORDER = (
    "metric",
    "local-preference",
    "next-hop",
    "weight",
    "tag",
    "community-add",
    "community-replace",
)

U16_MAX = 0xFFFF
U32_MAX = 0xFFFFFFFF


class InvalidPrefixLength(ValueError):
    pass


def ip_to_int(text: str) -> int:
    return int(ipaddress.IPv4Address(text))


def int_to_ip(value: int) -> str:
    return str(ipaddress.IPv4Address(value))


def mask_bits(length: int) -> int:
    if length == 0:
        return 0
    return (U32_MAX << (32 - length)) & U32_MAX


@dataclass(frozen=True, order=True)
class Prefix:
    """An IPv4 prefix: a 32-bit base address plus a mask length."""

    addr: int
    length: int

    def __post_init__(self):
        if not (0 <= self.length <= 32):
            raise InvalidPrefixLength(f"prefix length {self.length} out of range")
        if not (0 <= self.addr <= U32_MAX):
            raise ValueError(f"address {self.addr} out of range")

    @classmethod
    def parse(cls, text: str) -> "Prefix":
        addr_s, _, len_s = text.partition("/")
        if not len_s:
            raise ValueError(f"prefix {text!r} missing /length")
        return cls(ip_to_int(addr_s), int(len_s))

    @classmethod
    def host(cls, text: str) -> "Prefix":
        return cls(ip_to_int(text), 32)

    def normalized(self) -> "Prefix":
        return Prefix(self.addr & mask_bits(self.length), self.length)

    def is_normalized(self) -> bool:
        return self.addr == self.addr & mask_bits(self.length)

    def contains(self, other: "Prefix") -> bool:
        """True when `other` is a sub-prefix of (or equal to) this prefix."""
        if other.length < self.length:
            return False
        return (other.addr & mask_bits(self.length)) == self.addr

    def contains_addr(self, addr: int) -> bool:
        return (addr & mask_bits(self.length)) == self.addr

    def __str__(self) -> str:
        return f"{int_to_ip(self.addr)}/{self.length}"


FULL_PREFIX = Prefix(0, 0)


@dataclass(frozen=True, order=True)
class Community:
    """A classic 16:16 BGP community, written "asn:value" in decimal."""

    asn: int
    value: int

    def __post_init__(self):
        if not (0 <= self.asn <= U16_MAX and 0 <= self.value <= U16_MAX):
            raise ValueError(f"community {self.asn}:{self.value} out of 16-bit range")

    @classmethod
    def parse(cls, text: str) -> "Community":
        asn_s, sep, val_s = text.partition(":")
        if not sep:
            raise ValueError(f"community {text!r} is not in asn:value form")
        return cls(int(asn_s), int(val_s))

    def __str__(self) -> str:
        return f"{self.asn}:{self.value}"


DEFAULT_LOCAL_PREF = 100
DEFAULT_NEXT_HOP = ip_to_int("0.0.0.1")


@dataclass(frozen=True)
class Route:
    """A BGP route advertisement."""

    network: Prefix
    as_path: tuple = ()
    communities: frozenset = frozenset()
    local_pref: int = DEFAULT_LOCAL_PREF
    med: int = 0
    next_hop: int = DEFAULT_NEXT_HOP
    tag: int = 0
    weight: int = 0

    def sort_key(self):
        return (
            self.network.addr,
            self.network.length,
            len(self.as_path),
            self.as_path,
            tuple(sorted((c.asn, c.value) for c in self.communities)),
            self.local_pref,
            self.med,
            self.tag,
            self.weight,
            self.next_hop,
        )


def normalize_route(r: Route) -> Route:
    """Mask the network address to its length and deduplicate communities."""
    return replace(
        r,
        network=r.network.normalized(),
        as_path=tuple(r.as_path),
        communities=frozenset(r.communities),
    )


@dataclass(frozen=True)
class Packet:
    """An IPv4 packet header. Ports are zero unless protocol is tcp/udp."""

    src_ip: int
    dst_ip: int
    protocol: str
    src_port: int = 0
    dst_port: int = 0

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.protocol!r}")
        if self.protocol not in ("tcp", "udp") and (self.src_port or self.dst_port):
            raise ValueError("ports must be zero for non-tcp/udp packets")

    def sort_key(self):
        return (self.src_ip, self.dst_ip, PROTOCOLS.index(self.protocol), self.src_port, self.dst_port)


@dataclass(frozen=True)
class MatchCondition:
    """One `match` line of a stanza; `value` is a list name or an integer."""

    kind: str
    value: Union[str, int]

    def __post_init__(self):
        if self.kind not in MATCH_KINDS:
            raise ValueError(f"unknown match kind {self.kind!r}")


@dataclass(frozen=True)
class SetClause:
    """One `set` line of a stanza.

    value is an int for metric/local-preference/weight/tag, an int address
    for next-hop, and a frozenset of Community for the community kinds.
    """

    kind: str
    value: Union[int, frozenset]

    def __post_init__(self):
        if self.kind not in SET_KINDS:
            raise ValueError(f"unknown set kind {self.kind!r}")


@dataclass(frozen=True)
class Stanza:
    seq: int
    action: str  # "permit" | "deny"
    matches: tuple = ()
    sets: tuple = ()

    def __post_init__(self):
        if self.action not in ("permit", "deny"):
            raise ValueError(f"bad action {self.action!r}")
        if self.action == "deny" and self.sets:
            raise ValueError("deny stanzas cannot carry set clauses")

    def match(self, kind: str) -> Optional[MatchCondition]:
        for m in self.matches:
            if m.kind == kind:
                return m
        return None

    def set_clause(self, kind: str) -> Optional[SetClause]:
        for s in self.sets:
            if s.kind == kind:
                return s
        return None


@dataclass(frozen=True)
class RouteMap:
    name: str
    stanzas: tuple = ()


@dataclass(frozen=True)
class PrefixListEntry:
    action: str
    prefix: Prefix
    ge: Optional[int] = None
    le: Optional[int] = None
    seq: Optional[int] = None

    def bounds(self) -> tuple:
        """Effective (lo, hi) mask-length range after ge/le defaulting."""
        lo = self.ge if self.ge is not None else self.prefix.length
        if self.le is not None:
            hi = self.le
        elif self.ge is not None:
            hi = 32
        else:
            hi = self.prefix.length
        return lo, hi


@dataclass(frozen=True)
class PrefixList:
    name: str
    entries: tuple = ()


@dataclass(frozen=True)
class CommunityListEntry:
    action: str
    communities: frozenset = frozenset()  # standard form
    regex: Optional[str] = None  # expanded form


@dataclass(frozen=True)
class CommunityList:
    name: str
    style: str  # "standard" | "expanded"
    entries: tuple = ()


@dataclass(frozen=True)
class AsPathListEntry:
    action: str
    regex: str


@dataclass(frozen=True)
class AsPathList:
    name: str
    entries: tuple = ()


@dataclass(frozen=True)
class PortQualifier:
    """An `eq P` or `range A B` qualifier; denotes the closed range [lo, hi]."""

    lo: int
    hi: int


@dataclass(frozen=True)
class AclRule:
    action: str
    protocol: str
    src: Prefix
    dst: Prefix
    src_ports: Optional[PortQualifier] = None
    dst_ports: Optional[PortQualifier] = None

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.protocol!r}")
        if self.protocol not in ("tcp", "udp") and (self.src_ports or self.dst_ports):
            raise ValueError("port qualifiers require tcp or udp")


@dataclass(frozen=True)
class Acl:
    name: str
    rules: tuple = ()


@dataclass(frozen=True)
class Config:
    """Name-keyed collections of every policy object on one device."""

    route_maps: dict = field(default_factory=dict)
    acls: dict = field(default_factory=dict)
    prefix_lists: dict = field(default_factory=dict)
    community_lists: dict = field(default_factory=dict)
    as_path_lists: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Diagnostic:
    code: str
    obj: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}({self.obj}): {self.message}"


def validate_config(c: Config) -> list:
    """Check referential integrity and per-object invariants.

    Returns an empty list iff the config is valid; never raises.
    """
    diags = []

    def dangling(kind, name, where):
        diags.append(
            Diagnostic("DanglingReference", name, f"{where} references undefined {kind} {name!r}")
        )

    for rm in c.route_maps.values():
        prev = 0
        for st in rm.stanzas:
            where = f"route-map {rm.name} seq {st.seq}"
            if st.seq <= prev:
                diags.append(
                    Diagnostic(
                        "NonMonotonicSeq",
                        rm.name,
                        f"{where}: sequence numbers must strictly increase",
                    )
                )
            prev = max(prev, st.seq)
            seen = set()
            for m in st.matches:
                if m.kind in seen:
                    diags.append(
                        Diagnostic(
                            "DuplicateMatchKind",
                            rm.name,
                            f"{where}: more than one `match {m.kind}`",
                        )
                    )
                seen.add(m.kind)
                if m.kind == "prefix-list" and m.value not in c.prefix_lists:
                    dangling("prefix-list", m.value, where)
                elif m.kind == "community" and m.value not in c.community_lists:
                    dangling("community-list", m.value, where)
                elif m.kind == "as-path" and m.value not in c.as_path_lists:
                    dangling("as-path list", m.value, where)
            seen = set()
            for sc in st.sets:
                kind = "community" if sc.kind.startswith("community") else sc.kind
                if kind in seen:
                    diags.append(
                        Diagnostic(
                            "DuplicateSetKind",
                            rm.name,
                            f"{where}: more than one `set {kind}`",
                        )
                    )
                seen.add(kind)

    for pl in c.prefix_lists.values():
        for e in pl.entries:
            lo, hi = e.bounds()
            if not (e.prefix.length <= lo <= hi <= 32):
                diags.append(
                    Diagnostic(
                        "BadLengthRange",
                        pl.name,
                        f"prefix-list {pl.name} entry {e.prefix}: bad ge/le range {lo}-{hi}",
                    )
                )
    return diags


def config_union(a: Config, b: Config) -> Config:
    """Merge two configs; names in `b` win on collision."""
    return Config(
        route_maps={**a.route_maps, **b.route_maps},
        acls={**a.acls, **b.acls},
        prefix_lists={**a.prefix_lists, **b.prefix_lists},
        community_lists={**a.community_lists, **b.community_lists},
        as_path_lists={**a.as_path_lists, **b.as_path_lists},
    )
