"""Insertion disambiguation: overlap chain, binary search over insertion
positions, intent-consistency checking, and the final splice.

Positions are counted over the overlap chain [o_1..o_k], not raw slots:
position p means "insert after o_p and before o_{p+1}" (0 = before the
whole chain, k = after it). Slots separated only by non-overlapping
stanzas are behaviorally identical and therefore collapsed.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field, replace

from .model import Config, MatchCondition, Route, RouteMap, Stanza
from .parser import Snippet
from .engine import (
    Difference,
    IMPLICIT_DENY,
    Verdict,
    evaluate,
    reach_spaces,
    route_to_dict,
    stanza_verdict,
    _difference_region,
)
from .symbolic import (
    BoundExceeded,
    space_intersect,
    space_satisfiable,
    space_witness,
    stanza_space,
)

CHOICE_EXISTING = "existing"
CHOICE_NEW = "new"


class SessionFinished(Exception):
    pass


class Inconclusive(Exception):
    def __init__(self, seqs):
        self.seqs = list(seqs)
        super().__init__(f"overlap undecided for stanzas {self.seqs}")


@dataclass(frozen=True)
class InsertionProblem:
    config: Config
    map_name: str
    snippet: Snippet

    @property
    def target(self) -> RouteMap:
        return self.config.route_maps[self.map_name]

    def merged_config(self) -> Config:
        """Target config plus the snippet's supporting lists."""
        from .model import config_union

        merged = config_union(self.config, self.snippet.config)
        # the snippet's single-stanza map itself must not leak into the target
        maps = dict(merged.route_maps)
        maps.pop(self.snippet.map_name, None)
        maps[self.map_name] = self.config.route_maps[self.map_name]
        return replace(merged, route_maps=maps)


@dataclass(frozen=True)
class ChainElement:
    seq: int
    witness: Route
    option_existing: Verdict  # target's current handling of the witness
    option_new: Verdict  # the candidate stanza's handling


@dataclass(frozen=True)
class OverlapChain:
    elements: tuple = ()

    def seqs(self):
        return [e.seq for e in self.elements]

    def __len__(self):
        return len(self.elements)


def build_chain(problem: InsertionProblem) -> OverlapChain:
    """Stanzas of the target whose first-match region intersects the
    candidate's space on a behaviorally distinguishing route.

    Shadow-filtered: a stanza counts only if some route is first-matched
    by it and also matches the candidate. Elements whose two options are
    behaviorally identical on the whole shared region are dropped (no
    question about them could ever matter).
    """
    config = problem.merged_config()
    target = problem.target
    candidate = problem.snippet.stanza
    cand_space = stanza_space(candidate, config)
    reaches = reach_spaces(target, config)

    elements = []
    undecided = []
    for st in target.stanzas:
        region = space_intersect(reaches[st.seq], cand_space)
        try:
            if not space_satisfiable(region):
                continue
        except BoundExceeded:
            undecided.append(st.seq)
            continue
        # prefer a witness on which the two options actually differ
        if st.action != candidate.action:
            differing, exact = region, True
        elif st.action == "deny":
            differing, exact = [], True
        else:
            differing, exact = _difference_region(region, st, candidate)
        try:
            witness = space_witness(differing)
            if witness is None and not exact:
                witness = space_witness(region)
        except BoundExceeded:
            undecided.append(st.seq)
            continue
        if witness is None:
            continue  # behaviorally indistinct: collapse this position
        opt_existing = evaluate(target, witness, config)
        opt_new = stanza_verdict(candidate, witness)
        if opt_existing.same_behavior(opt_new):
            # probe failed concretely (possible for inexact dimensions);
            # fall back to brute force over the shared region
            witness = _oracle_differing_witness(problem, config, region, st)
            if witness is None:
                continue
            opt_existing = evaluate(target, witness, config)
            opt_new = stanza_verdict(candidate, witness)
        elements.append(ChainElement(st.seq, witness, opt_existing, opt_new))
    if undecided:
        raise Inconclusive(undecided)
    return OverlapChain(tuple(elements))


def _oracle_differing_witness(problem, config, region, st):
    from .engine import build_route_universe
    from .symbolic import space_member

    candidate = problem.snippet.stanza
    probe_config = replace(
        config,
        route_maps={**config.route_maps, "__cand__": RouteMap("__cand__", (candidate,))},
    )
    for r in build_route_universe(probe_config):
        if not space_member(region, r):
            continue
        if not evaluate(problem.target, r, config).same_behavior(
            stanza_verdict(candidate, r)
        ):
            return r
    return None


@dataclass(frozen=True)
class Question:
    seq: int  # chain stanza under test
    witness: Route
    option_existing: Verdict
    option_new: Verdict


@dataclass(frozen=True)
class DisambiguationSession:
    problem: InsertionProblem
    chain: OverlapChain
    lo: int
    hi: int
    answers: tuple = ()  # ((seq, choice), ...)
    questions_asked: int = 0

    @property
    def state(self) -> str:
        return "done" if self.lo == self.hi else "pending"

    @property
    def position(self):
        return self.lo if self.state == "done" else None

    def pending_question(self):
        if self.state == "done":
            return None
        m = math.ceil((self.lo + self.hi) / 2)
        elem = self.chain.elements[m - 1]
        return Question(elem.seq, elem.witness, elem.option_existing, elem.option_new)


def start_session(problem: InsertionProblem) -> DisambiguationSession:
    chain = build_chain(problem)
    k = len(chain)
    return DisambiguationSession(problem, chain, 0, k)


def answer(session: DisambiguationSession, choice: str) -> DisambiguationSession:
    if session.state == "done":
        raise SessionFinished("session already finished")
    if choice not in (CHOICE_EXISTING, CHOICE_NEW):
        raise ValueError(f"choice must be {CHOICE_EXISTING!r} or {CHOICE_NEW!r}")
    m = math.ceil((session.lo + session.hi) / 2)
    elem = session.chain.elements[m - 1]
    if choice == CHOICE_EXISTING:
        lo, hi = m, session.hi
    else:
        lo, hi = session.lo, m - 1
    return replace(
        session,
        lo=lo,
        hi=hi,
        answers=session.answers + ((elem.seq, choice),),
        questions_asked=session.questions_asked + 1,
    )


@dataclass(frozen=True)
class IntentCheck:
    ok: bool
    evidence: tuple = ()  # (route kept old, route moved to new) when violated


def check_intent_conditions(problem: InsertionProblem, choices) -> IntentCheck:
    """Exhaustive mode: one choice per chain element, in chain order.

    A single insertion point exists iff the `existing` choices form a
    prefix of the chain; otherwise the two offending witnesses are the
    evidence that no single position implements the intent.
    """
    chain = build_chain(problem)
    if len(choices) != len(chain):
        raise ValueError(
            f"need one choice per chain element ({len(chain)}), got {len(choices)}"
        )
    first_new = None
    for idx, choice in enumerate(choices):
        if choice not in (CHOICE_EXISTING, CHOICE_NEW):
            raise ValueError(f"bad choice {choice!r}")
        if choice == CHOICE_NEW and first_new is None:
            first_new = idx
        if choice == CHOICE_EXISTING and first_new is not None:
            return IntentCheck(
                ok=False,
                evidence=(chain.elements[idx].witness, chain.elements[first_new].witness),
            )
    return IntentCheck(ok=True)


_D_NAME = re.compile(r"^D(\d+)$")


class NameCollision(RuntimeError):
    pass


def _used_d_numbers(config: Config):
    used = set()
    for coll in (config.prefix_lists, config.community_lists, config.as_path_lists):
        for name in coll:
            m = _D_NAME.match(name)
            if m:
                used.add(int(m.group(1)))
    return used


def _fresh_names(config: Config, count: int):
    used = _used_d_numbers(config)
    names = []
    n = 0
    while len(names) < count:
        if n not in used:
            names.append(f"D{n}")
            used.add(n)
        n += 1
        if n > 10**6:
            raise NameCollision("fresh D-name space exhausted")
    return names


def insert_stanza(problem: InsertionProblem, position: int):
    """Splice the candidate at the given chain position.

    Returns (new Config, new RouteMap). Stanzas are renumbered 10, 20, ...
    and the snippet's supporting lists are renamed to fresh D-numbers with
    all references rewritten.
    """
    chain = build_chain(problem)
    k = len(chain)
    if not (0 <= position <= k):
        raise ValueError(f"position {position} out of range 0..{k}")
    return _insert_at_chain_position(problem, chain, position)


def _insert_at_chain_position(problem: InsertionProblem, chain: OverlapChain, position: int):
    target = problem.target
    candidate = problem.snippet.stanza
    snippet_cfg = problem.snippet.config
    k = len(chain)

    # concrete slot in the stanza list
    if k == 0 or position == k:
        if k == 0:
            slot = len(target.stanzas)
        else:
            last_seq = chain.elements[k - 1].seq
            slot = next(
                i for i, st in enumerate(target.stanzas) if st.seq == last_seq
            ) + 1
    else:
        next_seq = chain.elements[position].seq
        slot = next(i for i, st in enumerate(target.stanzas) if st.seq == next_seq)

    # rename the snippet's supporting lists in definition order
    order = list(problem.snippet.list_order) or (
        list(snippet_cfg.community_lists)
        + list(snippet_cfg.prefix_lists)
        + list(snippet_cfg.as_path_lists)
    )
    renames = dict(zip(order, _fresh_names(problem.config, len(order))))

    new_matches = tuple(
        MatchCondition(m.kind, renames.get(m.value, m.value))
        if isinstance(m.value, str)
        else m
        for m in candidate.matches
    )

    stanzas = list(target.stanzas)
    stanzas.insert(slot, Stanza(0, candidate.action, new_matches, candidate.sets))
    renumbered = tuple(
        Stanza((i + 1) * 10, st.action, st.matches, st.sets)
        for i, st in enumerate(stanzas)
    )
    new_map = RouteMap(target.name, renumbered)

    new_config = replace(
        problem.config,
        route_maps={**problem.config.route_maps, target.name: new_map},
        prefix_lists={
            **problem.config.prefix_lists,
            **{
                renames[n]: replace(pl, name=renames[n])
                for n, pl in snippet_cfg.prefix_lists.items()
            },
        },
        community_lists={
            **problem.config.community_lists,
            **{
                renames[n]: replace(cl, name=renames[n])
                for n, cl in snippet_cfg.community_lists.items()
            },
        },
        as_path_lists={
            **problem.config.as_path_lists,
            **{
                renames[n]: replace(al, name=renames[n])
                for n, al in snippet_cfg.as_path_lists.items()
            },
        },
    )
    return new_config, new_map


def finish_session(session: DisambiguationSession):
    if session.state != "done":
        raise ValueError("session not finished")
    return _insert_at_chain_position(session.problem, session.chain, session.position)


def question_bound(chain_length: int) -> int:
    return math.ceil(math.log2(chain_length + 1)) if chain_length else 0


# ---------------------------------------------------------------------------
# JSON serialization (service / CLI surface)
# ---------------------------------------------------------------------------

def verdict_to_dict(v: Verdict) -> dict:
    d = {"action": v.action, "matchedSeq": v.matched_seq}
    if v.output is not None:
        d["outputRoute"] = route_to_dict(v.output)
    return d


def render_verdict(v: Verdict) -> str:
    """The two-option presentation format: ACTION plus, for permits, the
    resulting route attributes one per line."""
    from .specverify import render_route

    if v.action == "deny":
        return "ACTION: deny"
    return "ACTION: permit\n" + render_route(v.output)


def question_to_dict(q: Question) -> dict:
    return {
        "seq": q.seq,
        "witness": route_to_dict(q.witness),
        "optionExisting": {
            **verdict_to_dict(q.option_existing),
            "rendered": render_verdict(q.option_existing),
        },
        "optionNew": {
            **verdict_to_dict(q.option_new),
            "rendered": render_verdict(q.option_new),
        },
    }


def session_to_dict(session: DisambiguationSession) -> dict:
    q = session.pending_question()
    return {
        "state": session.state,
        "chain": [
            {
                "seq": e.seq,
                "witness": route_to_dict(e.witness),
            }
            for e in session.chain.elements
        ],
        "window": {"lo": session.lo, "hi": session.hi},
        "answers": [{"seq": s, "choice": c} for s, c in session.answers],
        "questionsAsked": session.questions_asked,
        "questionBound": question_bound(len(session.chain)),
        "pendingQuestion": question_to_dict(q) if q else None,
        "position": session.position,
    }
