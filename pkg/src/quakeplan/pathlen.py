"""Path lengths under partial link-state assignments, and the interchange test.

During scenario enumeration each link is Free (undecided), Fail, or Survive.
The two bounds below bracket what the realized source-sink length can still
become, and their comparison decides whether a link's value can be left open:

* bound_including(e): the best length still reachable when e survives, taking
  the shortest allowed path through e with no failed member (Free members are
  allowed to survive).  +inf when every path through e is already dead.
* bound_excluding(e): the length already guaranteed without e, taking the
  shortest allowed path avoiding e whose members have all survived; the
  disconnection penalty m_penalty when no such path is certain yet.

If bound_including >= bound_excluding the pair's length no longer depends on
e, so both values of e can be merged into a single outcome.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .model import PairSpec, ValidationError

FREE = 0
FAIL = 1
SURVIVE = 2

# float slack so mathematically equal bounds always compare as a tie
TIE_EPS = 1e-9

INF = math.inf


@dataclass
class PartialAssignment:
    """Realization state per link id; links not present are Free."""

    states: dict[int, int] = field(default_factory=dict)

    @classmethod
    def of(cls, survive=(), fail=()) -> "PartialAssignment":
        states = {int(e): SURVIVE for e in survive}
        for e in fail:
            e = int(e)
            if states.get(e) == SURVIVE:
                raise ValidationError(f"link {e} listed as both surviving and failed")
            states[e] = FAIL
        return cls(states)

    def state_of(self, link_id: int) -> int:
        return self.states.get(link_id, FREE)

    def assign(self, link_id: int, state: int) -> None:
        if state not in (FREE, FAIL, SURVIVE):
            raise ValidationError(f"bad state {state}")
        if state == FREE:
            self.states.pop(link_id, None)
        else:
            self.states[link_id] = state


def realized_length(pair: PairSpec, assignment: PartialAssignment) -> float:
    """Length the pair realizes: shortest allowed path with all members
    surviving, or m_penalty when none qualifies.

    Links still Free count as not surviving, which matches completing the
    enumeration with merged links resolved to failure.
    """
    state = assignment.state_of
    best = INF
    for path in pair.allowed_paths:
        if path.length < best and all(state(e) == SURVIVE for e in path.links):
            best = path.length
    return best if best < INF else pair.m_penalty


def bound_including(pair: PairSpec, assignment: PartialAssignment, link_id: int) -> float:
    """Shortest allowed path through link_id with no failed member; +inf if none."""
    state = assignment.state_of
    best = INF
    for path in pair.allowed_paths:
        if link_id not in path.links or path.length >= best:
            continue
        if all(state(e) != FAIL for e in path.links):
            best = path.length
    return best


def bound_excluding(pair: PairSpec, assignment: PartialAssignment, link_id: int) -> float:
    """Shortest allowed path avoiding link_id whose members all survived;
    m_penalty if no such path is guaranteed yet."""
    state = assignment.state_of
    best = INF
    for path in pair.allowed_paths:
        if link_id in path.links or path.length >= best:
            continue
        if all(state(e) == SURVIVE for e in path.links):
            best = path.length
    return best if best < INF else pair.m_penalty


def is_interchangeable(pair: PairSpec, assignment: PartialAssignment, link_id: int) -> bool:
    """True when the pair's realized length cannot depend on link_id any more.

    Surviving can only help via paths through link_id, and the best such hope
    is bound_including; failing leaves bound_excluding.  When the hope is no
    better than what is already secured, both values of link_id lead to the
    same realized length under every completion.
    """
    return bound_including(pair, assignment, link_id) >= bound_excluding(pair, assignment, link_id) - TIE_EPS


def relevant_links(pair: PairSpec) -> tuple[int, ...]:
    """Links that appear in at least one allowed path of the pair."""
    return pair.relevant_links
