"""Constraint algebra over sets of routes and packets.

Route sets are represented as unions of conjunctive `RouteConstraints`
(prefix space, community require/forbid sets, polarized AS-path atoms,
scalar interval sets). Every dimension supports exact complement, so
intersection, subtraction, satisfiability, and deterministic witness
generation are all closed over the representation. The only approximation
is AS-path satisfiability, decided by bounded enumeration; when the bound
is the deciding factor a BoundExceeded is raised rather than guessing.

Packet sets (`HeaderSpace`) are unions of boxes over (src prefix, dst
prefix, protocol subset, port interval sets); that algebra is exact.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from functools import lru_cache

from .model import (
    Community,
    Config,
    DEFAULT_LOCAL_PREF,
    DEFAULT_NEXT_HOP,
    Packet,
    Prefix,
    PROTOCOLS,
    Route,
    Stanza,
    mask_bits,
    normalize_route,
)

AS_PATH_BOUND = 4
FRESH_ASN = 65000

SCALAR_ATTRS = ("local_pref", "med", "tag", "weight")
SCALAR_DEFAULTS = {"local_pref": DEFAULT_LOCAL_PREF, "med": 0, "tag": 0, "weight": 0}
SCALAR_MAX = 0xFFFFFFFF
WEIGHT_MAX = 0xFFFF


class UnsupportedRegex(ValueError):
    pass


class BoundExceeded(Exception):
    """AS-path satisfiability undecided within the enumeration bound."""


# ---------------------------------------------------------------------------
# Interval sets over non-negative integers
# ---------------------------------------------------------------------------

def normalize_intervals(intervals):
    """Sort, clip, and merge a list of (lo, hi) closed intervals."""
    ivs = sorted((lo, hi) for lo, hi in intervals if lo <= hi)
    out = []
    for lo, hi in ivs:
        if out and lo <= out[-1][1] + 1:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return tuple(out)


def intersect_intervals(a, b):
    out = []
    for alo, ahi in a:
        for blo, bhi in b:
            lo, hi = max(alo, blo), min(ahi, bhi)
            if lo <= hi:
                out.append((lo, hi))
    return normalize_intervals(out)


def complement_intervals(a, maximum):
    out = []
    cursor = 0
    for lo, hi in a:
        if cursor < lo:
            out.append((cursor, lo - 1))
        cursor = hi + 1
    if cursor <= maximum:
        out.append((cursor, maximum))
    return tuple(out)


def interval_member(a, v) -> bool:
    return any(lo <= v <= hi for lo, hi in a)


# ---------------------------------------------------------------------------
# Prefix spaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class PrefixAtom:
    """All (network, length) pairs nested under `base` with length in [lo, hi]."""

    base: Prefix
    len_lo: int
    len_hi: int

    def __post_init__(self):
        if not (self.base.length <= self.len_lo <= self.len_hi <= 32):
            raise ValueError(f"bad atom range {self.base}:{self.len_lo}-{self.len_hi}")

    def member(self, network: Prefix) -> bool:
        return self.len_lo <= network.length <= self.len_hi and self.base.contains(network)

    def smallest(self) -> Prefix:
        return Prefix(self.base.addr, self.len_lo)

    def __str__(self) -> str:
        return f"{self.base}:{self.len_lo}-{self.len_hi}"


FULL_ATOM = PrefixAtom(Prefix(0, 0), 0, 32)


def atom_intersect(a: PrefixAtom, b: PrefixAtom):
    if a.base.contains(b.base):
        base = b.base
    elif b.base.contains(a.base):
        base = a.base
    else:
        return None
    lo, hi = max(a.len_lo, b.len_lo), min(a.len_hi, b.len_hi)
    if lo > hi:
        return None
    return PrefixAtom(base, lo, hi)


def _sibling_path(outer: Prefix, inner: Prefix):
    """The sibling prefixes along the path from `outer` down to `inner`.

    Their union is exactly {n : n within outer, n not within inner} at each
    depth; there are inner.length - outer.length of them.
    """
    siblings = []
    for depth in range(outer.length + 1, inner.length + 1):
        bit = 1 << (32 - depth)
        sib_addr = (inner.addr & mask_bits(depth)) ^ bit
        siblings.append(Prefix(sib_addr, depth))
    return siblings


def atom_subtract(a: PrefixAtom, b: PrefixAtom):
    """a \\ b as a list of atoms (union semantics, may overlap)."""
    lo, hi = max(a.len_lo, b.len_lo), min(a.len_hi, b.len_hi)
    nested = a.base.contains(b.base) or b.base.contains(a.base)
    if lo > hi or not nested:
        return [a]
    out = []
    # length ranges untouched by b
    if a.len_lo < lo:
        out.append(PrefixAtom(a.base, a.len_lo, lo - 1))
    if a.len_hi > hi:
        out.append(PrefixAtom(a.base, hi + 1, a.len_hi))
    if b.base.contains(a.base):
        # every network of a lies under b.base; the [lo, hi] slice is gone
        return out
    # b.base is strictly inside a.base: keep the sibling subtrees
    for sib in _sibling_path(a.base, b.base):
        slo = max(lo, sib.length)
        if slo <= hi:
            out.append(PrefixAtom(sib, slo, hi))
    return out


@dataclass(frozen=True)
class PrefixSpace:
    """Union of prefix atoms; empty tuple denotes the empty set."""

    atoms: tuple = ()

    @classmethod
    def full(cls) -> "PrefixSpace":
        return cls((FULL_ATOM,))

    @classmethod
    def of(cls, *atoms) -> "PrefixSpace":
        return cls(tuple(atoms))

    def is_empty(self) -> bool:
        return not self.atoms

    def member(self, network: Prefix) -> bool:
        return any(a.member(network) for a in self.atoms)

    def intersect(self, other: "PrefixSpace") -> "PrefixSpace":
        out = []
        for a in self.atoms:
            for b in other.atoms:
                r = atom_intersect(a, b)
                if r is not None and r not in out:
                    out.append(r)
        return PrefixSpace(tuple(out))

    def subtract(self, other: "PrefixSpace") -> "PrefixSpace":
        atoms = list(self.atoms)
        for b in other.atoms:
            atoms = [piece for a in atoms for piece in atom_subtract(a, b)]
        return PrefixSpace(tuple(atoms))

    def complement(self) -> "PrefixSpace":
        return PrefixSpace.full().subtract(self)

    def smallest(self):
        """Deterministic smallest member: minimal (base address, len_lo)."""
        if not self.atoms:
            return None
        atom = min(self.atoms, key=lambda a: (a.base.addr, a.len_lo, a.len_hi))
        return atom.smallest()


# ---------------------------------------------------------------------------
# Community and AS-path constraints
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CommunityConstraint:
    requires: frozenset = frozenset()
    forbids: frozenset = frozenset()

    def satisfiable(self) -> bool:
        return not (self.requires & self.forbids)

    def member(self, communities: frozenset) -> bool:
        return self.requires <= communities and not (self.forbids & communities)

    def intersect(self, other: "CommunityConstraint") -> "CommunityConstraint":
        return CommunityConstraint(
            self.requires | other.requires, self.forbids | other.forbids
        )

    def negation_alternatives(self):
        """Alternatives whose union is the complement of this constraint."""
        alts = [CommunityConstraint(forbids=frozenset([c])) for c in sorted(self.requires)]
        alts += [CommunityConstraint(requires=frozenset([c])) for c in sorted(self.forbids)]
        return alts


# AS-path atoms: (op, asn) with op in {contains, begins, ends, empty, single}
AS_OPS = ("contains", "begins", "ends", "empty", "single")


@dataclass(frozen=True, order=True)
class AsPathAtom:
    op: str
    asn: int = 0
    required: bool = True

    def holds(self, path: tuple) -> bool:
        if self.op == "contains":
            ok = self.asn in path
        elif self.op == "begins":
            ok = bool(path) and path[0] == self.asn
        elif self.op == "ends":
            ok = bool(path) and path[-1] == self.asn
        elif self.op == "empty":
            ok = not path
        else:  # single
            ok = path == (self.asn,)
        return ok if self.required else not ok

    def flipped(self) -> "AsPathAtom":
        return replace(self, required=not self.required)


_AS_REGEX_FORMS = (
    (re.compile(r"^\^\$$"), "empty", False),
    (re.compile(r"^\^(\d+)\$$"), "single", True),
    (re.compile(r"^_(\d+)\$$"), "ends", True),
    (re.compile(r"^\^(\d+)_$"), "begins", True),
    (re.compile(r"^_(\d+)_$"), "contains", True),
)


def parse_as_path_regex(text: str) -> AsPathAtom:
    for pattern, op, has_asn in _AS_REGEX_FORMS:
        m = pattern.match(text)
        if m:
            return AsPathAtom(op, int(m.group(1)) if has_asn else 0)
    raise UnsupportedRegex(f"unsupported as-path regex {text!r}")


_COMMUNITY_REGEX = re.compile(r"^/?_(\d+):(\d+)_/?$")


def parse_community_regex(text: str) -> Community:
    m = _COMMUNITY_REGEX.match(text)
    if not m:
        raise UnsupportedRegex(f"unsupported community regex {text!r}")
    return Community(int(m.group(1)), int(m.group(2)))


@dataclass(frozen=True)
class AsPathConstraint:
    atoms: tuple = ()

    def member(self, path: tuple) -> bool:
        return all(a.holds(path) for a in self.atoms)

    def intersect(self, other: "AsPathConstraint") -> "AsPathConstraint":
        merged = list(self.atoms)
        for a in other.atoms:
            if a not in merged:
                merged.append(a)
        return AsPathConstraint(tuple(merged))

    def negation_alternatives(self):
        return [AsPathConstraint((a.flipped(),)) for a in self.atoms]

    def mentioned_asns(self):
        return sorted({a.asn for a in self.atoms if a.op != "empty"})


@lru_cache(maxsize=8192)
def _shortest_path(atoms: tuple, bound: int):
    """Shortest AS path satisfying every atom, by bounded enumeration.

    Returns the path tuple, None when provably unsatisfiable, or raises
    BoundExceeded when the bound is too small to decide.
    """
    constraint = AsPathConstraint(atoms)
    asns = constraint.mentioned_asns()
    fresh = FRESH_ASN
    while fresh in asns:
        fresh += 1
    candidates = asns + [fresh]
    frontier = [()]
    for _ in range(bound + 1):
        for path in frontier:
            if constraint.member(path):
                return path
        frontier = [p + (a,) for p in frontier for a in candidates]
    # A satisfying path, if one exists, needs at most one element per
    # required atom (plus endpoints); below that the search was exhaustive.
    required = sum(1 for a in atoms if a.required and a.op != "empty")
    if required + 2 <= bound:
        return None
    raise BoundExceeded(f"as-path atoms undecided within length {bound}")


# ---------------------------------------------------------------------------
# Route constraints
# ---------------------------------------------------------------------------

def _full_scalars():
    return {}


@dataclass(frozen=True)
class ScalarConstraint:
    """Per-attribute finite unions of closed intervals; absent = unconstrained."""

    intervals: tuple = ()  # tuple of (attr, interval tuple)

    @classmethod
    def of(cls, **kwargs) -> "ScalarConstraint":
        items = []
        for attr in SCALAR_ATTRS:
            if attr in kwargs:
                v = kwargs[attr]
                if isinstance(v, int):
                    v = ((v, v),)
                items.append((attr, normalize_intervals(v)))
        return cls(tuple(items))

    def get(self, attr):
        for a, ivs in self.intervals:
            if a == attr:
                return ivs
        return None

    def member(self, route: Route) -> bool:
        for attr, ivs in self.intervals:
            if not interval_member(ivs, getattr(route, attr)):
                return False
        return True

    def satisfiable(self) -> bool:
        return all(ivs for _, ivs in self.intervals)

    def intersect(self, other: "ScalarConstraint") -> "ScalarConstraint":
        attrs = {a for a, _ in self.intervals} | {a for a, _ in other.intervals}
        items = []
        for attr in SCALAR_ATTRS:
            if attr not in attrs:
                continue
            mine, theirs = self.get(attr), other.get(attr)
            if mine is None:
                items.append((attr, theirs))
            elif theirs is None:
                items.append((attr, mine))
            else:
                items.append((attr, intersect_intervals(mine, theirs)))
        return ScalarConstraint(tuple(items))

    def negation_alternatives(self):
        alts = []
        for attr, ivs in self.intervals:
            maximum = WEIGHT_MAX if attr == "weight" else SCALAR_MAX
            comp = complement_intervals(ivs, maximum)
            alts.append(ScalarConstraint(((attr, comp),)))
        return alts

    def witness_value(self, attr):
        ivs = self.get(attr)
        if ivs is None:
            return SCALAR_DEFAULTS[attr]
        return ivs[0][0]


@dataclass(frozen=True)
class RouteConstraints:
    prefix: PrefixSpace = field(default_factory=PrefixSpace.full)
    community: CommunityConstraint = CommunityConstraint()
    as_path: AsPathConstraint = AsPathConstraint()
    scalars: ScalarConstraint = ScalarConstraint()

    @classmethod
    def full(cls) -> "RouteConstraints":
        return cls()

    def member(self, route: Route) -> bool:
        return (
            self.prefix.member(route.network)
            and self.community.member(route.communities)
            and self.as_path.member(route.as_path)
            and self.scalars.member(route)
        )

    def intersect(self, other: "RouteConstraints") -> "RouteConstraints":
        return RouteConstraints(
            self.prefix.intersect(other.prefix),
            self.community.intersect(other.community),
            self.as_path.intersect(other.as_path),
            self.scalars.intersect(other.scalars),
        )

    def quick_unsat(self) -> bool:
        """Cheap unsatisfiability check that never touches the AS-path bound."""
        return (
            self.prefix.is_empty()
            or not self.community.satisfiable()
            or not self.scalars.satisfiable()
        )

    def satisfiable(self, bound: int = AS_PATH_BOUND) -> bool:
        if self.quick_unsat():
            return False
        return _shortest_path(self.as_path.atoms, bound) is not None

    def negation_alternatives(self):
        """Alternatives whose union denotes the complement of this constraint."""
        alts = []
        comp = self.prefix.complement()
        if not comp.is_empty():
            alts.append(RouteConstraints(prefix=comp))
        alts += [RouteConstraints(community=c) for c in self.community.negation_alternatives()]
        alts += [RouteConstraints(as_path=a) for a in self.as_path.negation_alternatives()]
        alts += [RouteConstraints(scalars=s) for s in self.scalars.negation_alternatives()]
        return alts

    def witness(self, bound: int = AS_PATH_BOUND):
        """Deterministic member route, or None when unsatisfiable."""
        if self.quick_unsat():
            return None
        path = _shortest_path(self.as_path.atoms, bound)
        if path is None:
            return None
        network = self.prefix.smallest()
        return normalize_route(
            Route(
                network=network,
                as_path=path,
                communities=frozenset(self.community.requires),
                local_pref=self.scalars.witness_value("local_pref"),
                med=self.scalars.witness_value("med"),
                tag=self.scalars.witness_value("tag"),
                weight=self.scalars.witness_value("weight"),
                next_hop=DEFAULT_NEXT_HOP,
            )
        )


# A route space is a union of RouteConstraints alternatives.

def space_full():
    return [RouteConstraints.full()]


def space_intersect(a, b):
    out = []
    for x in a:
        for y in b:
            r = x.intersect(y)
            if not r.quick_unsat():
                out.append(r)
    return out


def space_subtract(a, b):
    """a \\ b for route spaces (lists of alternatives)."""
    result = list(a)
    for constraint in b:
        negs = constraint.negation_alternatives()
        result = [
            piece
            for alt in result
            for neg in negs
            for piece in [alt.intersect(neg)]
            if not piece.quick_unsat()
        ]
    return result


def space_member(space, route: Route) -> bool:
    return any(alt.member(route) for alt in space)


def space_satisfiable(space, bound: int = AS_PATH_BOUND) -> bool:
    undecided = False
    for alt in space:
        try:
            if alt.satisfiable(bound):
                return True
        except BoundExceeded:
            undecided = True
    if undecided:
        raise BoundExceeded("satisfiability undecided within the as-path bound")
    return False


def space_witness(space, bound: int = AS_PATH_BOUND):
    """Deterministic witness: the smallest member over all alternatives."""
    best = None
    undecided = False
    for alt in space:
        try:
            w = alt.witness(bound)
        except BoundExceeded:
            undecided = True
            continue
        if w is not None and (best is None or w.sort_key() < best.sort_key()):
            best = w
    if best is None and undecided:
        raise BoundExceeded("witness undecided within the as-path bound")
    return best


# ---------------------------------------------------------------------------
# Compiling config objects to route spaces
# ---------------------------------------------------------------------------

def compile_prefix_list(pl) -> PrefixSpace:
    """First-match compile permit/deny entries into an exact union of atoms."""
    acc = []
    remaining = PrefixSpace.full()
    for e in pl.entries:
        lo, hi = e.bounds()
        atom_space = PrefixSpace.of(PrefixAtom(e.prefix, lo, hi))
        effective = atom_space.intersect(remaining)
        if e.action == "permit":
            acc.extend(effective.atoms)
        remaining = remaining.subtract(atom_space)
    return PrefixSpace(tuple(acc))


def _community_entry_constraint(cl, e) -> CommunityConstraint:
    if cl.style == "standard":
        return CommunityConstraint(requires=frozenset(e.communities))
    return CommunityConstraint(requires=frozenset([parse_community_regex(e.regex)]))


def compile_community_list(cl):
    """First-match compile to a union of CommunityConstraint alternatives."""
    alts = []
    earlier = []
    for e in cl.entries:
        cons = _community_entry_constraint(cl, e)
        if e.action == "permit":
            # matched by this entry and by no earlier entry
            cases = [cons]
            for prev in earlier:
                cases = [
                    c.intersect(neg)
                    for c in cases
                    for neg in prev.negation_alternatives()
                    if c.intersect(neg).satisfiable()
                ]
            alts.extend(cases)
        earlier.append(cons)
    return alts


def compile_as_path_list(al):
    """First-match compile to a union of AsPathConstraint alternatives."""
    alts = []
    earlier = []
    for e in al.entries:
        atom = parse_as_path_regex(e.regex)
        if e.action == "permit":
            cases = [AsPathConstraint((atom,))]
            for prev in earlier:
                cases = [c.intersect(AsPathConstraint((prev.flipped(),))) for c in cases]
            alts.extend(cases)
        earlier.append(atom)
    return alts


def stanza_space(stanza: Stanza, config: Config):
    """Route space matched by a stanza (ignoring its position in the map)."""
    space = space_full()
    for m in stanza.matches:
        if m.kind == "prefix-list":
            pl_space = compile_prefix_list(config.prefix_lists[m.value])
            space = space_intersect(space, [RouteConstraints(prefix=pl_space)])
        elif m.kind == "community":
            alts = compile_community_list(config.community_lists[m.value])
            space = space_intersect(
                space, [RouteConstraints(community=c) for c in alts]
            )
        elif m.kind == "as-path":
            alts = compile_as_path_list(config.as_path_lists[m.value])
            space = space_intersect(space, [RouteConstraints(as_path=a) for a in alts])
        elif m.kind == "local-preference":
            space = space_intersect(
                space, [RouteConstraints(scalars=ScalarConstraint.of(local_pref=m.value))]
            )
        elif m.kind == "tag":
            space = space_intersect(
                space, [RouteConstraints(scalars=ScalarConstraint.of(tag=m.value))]
            )
    return space


# ---------------------------------------------------------------------------
# Header spaces (packets)
# ---------------------------------------------------------------------------

PORT_MAX = 0xFFFF
FULL_PORTS = ((0, PORT_MAX),)
ALL_PROTOS = frozenset(PROTOCOLS)
_PORTED = frozenset(("tcp", "udp"))


@dataclass(frozen=True)
class HeaderBox:
    src: Prefix = Prefix(0, 0)
    dst: Prefix = Prefix(0, 0)
    protos: frozenset = ALL_PROTOS
    src_ports: tuple = FULL_PORTS
    dst_ports: tuple = FULL_PORTS

    def normalized(self) -> "HeaderBox":
        protos = self.protos
        if self.src_ports != FULL_PORTS or self.dst_ports != FULL_PORTS:
            protos = protos & _PORTED
        return replace(self, protos=protos)

    def is_empty(self) -> bool:
        return not self.protos or not self.src_ports or not self.dst_ports

    def member(self, p: Packet) -> bool:
        if p.protocol not in self.protos:
            return False
        if not (self.src.contains_addr(p.src_ip) and self.dst.contains_addr(p.dst_ip)):
            return False
        if p.protocol in _PORTED:
            return interval_member(self.src_ports, p.src_port) and interval_member(
                self.dst_ports, p.dst_port
            )
        return self.src_ports == FULL_PORTS and self.dst_ports == FULL_PORTS

    def witness(self):
        """Deterministic member packet, or None."""
        if self.is_empty():
            return None
        for proto in PROTOCOLS:
            if proto not in self.protos:
                continue
            if proto in _PORTED:
                return Packet(
                    self.src.addr,
                    self.dst.addr,
                    proto,
                    self.src_ports[0][0],
                    self.dst_ports[0][0],
                )
            if self.src_ports == FULL_PORTS and self.dst_ports == FULL_PORTS:
                return Packet(self.src.addr, self.dst.addr, proto)
        return None


def box_intersect(a: HeaderBox, b: HeaderBox):
    if a.src.contains(b.src):
        src = b.src
    elif b.src.contains(a.src):
        src = a.src
    else:
        return None
    if a.dst.contains(b.dst):
        dst = b.dst
    elif b.dst.contains(a.dst):
        dst = a.dst
    else:
        return None
    box = HeaderBox(
        src,
        dst,
        a.protos & b.protos,
        intersect_intervals(a.src_ports, b.src_ports),
        intersect_intervals(a.dst_ports, b.dst_ports),
    ).normalized()
    return None if box.is_empty() else box


def _prefix_complement_list(p: Prefix):
    if p.length == 0:
        return []
    return _sibling_path(Prefix(0, 0), p)


def box_subtract(a: HeaderBox, b: HeaderBox):
    """a \\ b as a list of boxes (per-dimension splitting)."""
    if box_intersect(a, b) is None:
        return [a]
    out = []
    for sib in _prefix_complement_list(b.src):
        piece = box_intersect(a, HeaderBox(src=sib))
        if piece:
            out.append(piece)
    for sib in _prefix_complement_list(b.dst):
        piece = box_intersect(a, HeaderBox(dst=sib))
        if piece:
            out.append(piece)
    proto_comp = ALL_PROTOS - b.protos
    if proto_comp:
        piece = box_intersect(a, HeaderBox(protos=frozenset(proto_comp)))
        if piece:
            out.append(piece)
    for ports, dim in ((b.src_ports, "src_ports"), (b.dst_ports, "dst_ports")):
        comp = complement_intervals(ports, PORT_MAX)
        if comp:
            piece = box_intersect(a, HeaderBox(**{dim: comp}))
            if piece:
                out.append(piece)
    return out


@dataclass(frozen=True)
class HeaderSpace:
    boxes: tuple = ()

    @classmethod
    def full(cls) -> "HeaderSpace":
        return cls((HeaderBox(),))

    def is_empty(self) -> bool:
        return not self.boxes

    def member(self, p: Packet) -> bool:
        return any(b.member(p) for b in self.boxes)

    def intersect(self, other: "HeaderSpace") -> "HeaderSpace":
        out = []
        for a in self.boxes:
            for b in other.boxes:
                r = box_intersect(a, b)
                if r is not None:
                    out.append(r)
        return HeaderSpace(tuple(out))

    def subtract(self, other: "HeaderSpace") -> "HeaderSpace":
        boxes = list(self.boxes)
        for b in other.boxes:
            boxes = [piece for a in boxes for piece in box_subtract(a, b)]
        return HeaderSpace(tuple(boxes))

    def satisfiable(self) -> bool:
        return any(b.witness() is not None for b in self.boxes)

    def witness(self):
        best = None
        for b in self.boxes:
            w = b.witness()
            if w is not None and (best is None or w.sort_key() < best.sort_key()):
                best = w
        return best


def header_space(rule) -> HeaderSpace:
    """The exact packet set matched by one ACL rule."""
    box = HeaderBox(
        src=rule.src,
        dst=rule.dst,
        protos=ALL_PROTOS if rule.protocol == "ip" else frozenset([rule.protocol]),
        src_ports=((rule.src_ports.lo, rule.src_ports.hi),) if rule.src_ports else FULL_PORTS,
        dst_ports=((rule.dst_ports.lo, rule.dst_ports.hi),) if rule.dst_ports else FULL_PORTS,
    ).normalized()
    return HeaderSpace(() if box.is_empty() else (box,))
