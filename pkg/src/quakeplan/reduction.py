"""Scenario-space compression: depth-first enumeration with interchange merging.

Enumerating links in a chosen permutation order, each tree node asks whether
the next link's survival can still matter (pathlen.is_interchangeable).  If
not, the link is recorded as "i" and the tree does not branch; otherwise the
node splits into Fail (0) and Survive (1).  Each leaf is a multiscenario: a
row of symbols covering a whole block of raw scenarios that share one realized
length.  The walk below keeps per-path counters instead of re-scanning the
assignment, which is what lets 30-link instances reduce in seconds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .model import Instance, PairSpec, effective_survival
from .pathlen import TIE_EPS
from .validation import check_permutation

_CANONICAL = str.maketrans("i01", "012")  # canonical row order: i < 0 < 1


@dataclass(frozen=True)
class Multiscenario:
    """One compressed scenario: a symbol per permutation position and the
    realized length shared by every completion of its "i" symbols."""

    values: str                                 # symbols in {0, 1, i}
    length: float
    assigned: tuple[tuple[int, int], ...] = None  # (position, 0/1) for non-i symbols

    def __post_init__(self):
        if self.assigned is None:
            pairs = []
            for pos, symbol in enumerate(self.values):
                if symbol == "0":
                    pairs.append((pos, 0))
                elif symbol == "1":
                    pairs.append((pos, 1))
                elif symbol != "i":
                    raise ValueError(f"bad symbol {symbol!r} in multiscenario")
            object.__setattr__(self, "assigned", tuple(pairs))

    def canonical_key(self) -> str:
        return self.values.translate(_CANONICAL)


@dataclass(frozen=True)
class MultiscenarioSet:
    pair_index: int
    permutation: tuple[int, ...]
    rows: tuple[Multiscenario, ...]

    def __len__(self) -> int:
        return len(self.rows)

    def sorted_rows(self) -> tuple[Multiscenario, ...]:
        return tuple(sorted(self.rows, key=Multiscenario.canonical_key))

    def probabilities(self, plan, links) -> list[float]:
        survival = effective_survival(plan, links)
        s = [survival[e] for e in self.permutation]
        out = []
        for row in self.rows:
            prob = 1.0
            for pos, bit in row.assigned:
                prob *= s[pos] if bit else 1.0 - s[pos]
            out.append(prob)
        return out


def row_probability(row: Multiscenario, permutation, plan, links) -> float:
    """Probability of a row under a plan: survive symbols contribute s_e,
    fail symbols 1-s_e, merged symbols 1."""
    survival = effective_survival(plan, links)
    prob = 1.0
    for pos, bit in row.assigned:
        s = survival[permutation[pos]]
        prob *= s if bit else 1.0 - s
    return prob


def set_size(mset: MultiscenarioSet) -> int:
    return len(mset.rows)


# ---------------------------------------------------------------------------
# compiled pair data shared by the emitting and counting walkers

class _PairData:
    __slots__ = ("members", "sizes", "lengths", "contains", "m_penalty", "m")

    def __init__(self, pair: PairSpec):
        paths = sorted(pair.allowed_paths, key=lambda p: (p.length, p.links))
        self.members = [p.links for p in paths]
        self.sizes = [len(p.links) for p in paths]
        self.lengths = [p.length for p in paths]
        self.m = len(paths)
        self.m_penalty = pair.m_penalty
        contains: dict[int, list[int]] = {}
        for j, p in enumerate(paths):
            for e in p.links:
                contains.setdefault(e, []).append(j)
        # path indices ascend in length order, so the first live entry is the bound
        self.contains = {e: tuple(js) for e, js in contains.items()}


def _resolve_pair(instance: Instance, pair) -> tuple[int, PairSpec]:
    if isinstance(pair, PairSpec):
        for i, candidate in enumerate(instance.pairs):
            if candidate == pair:
                return i, candidate
        raise ValueError("pair does not belong to the instance")
    index = int(pair)
    if not 0 <= index < len(instance.pairs):
        raise ValueError(f"pair index {index} outside 0..{len(instance.pairs) - 1}")
    return index, instance.pairs[index]


def reduce_pair(instance: Instance, pair, permutation=None) -> MultiscenarioSet:
    """Build the multiscenario set for a pair under a link permutation.

    ``pair`` is a pair index or PairSpec; ``permutation`` must rearrange all
    instance link ids and defaults to ascending numerical order.  Rows come
    out in depth-first order with Fail explored before Survive.
    """
    index, spec = _resolve_pair(instance, pair)
    if permutation is None:
        permutation = instance.link_ids
    perm = check_permutation(permutation, instance.link_ids)
    data = _PairData(spec)

    n = len(perm)
    m = data.m
    lengths = data.lengths
    sizes = data.sizes
    contains = data.contains
    m_penalty = data.m_penalty
    fail = [0] * m
    survive = [0] * m
    symbols = ["i"] * n
    trail: list[tuple[int, int]] = []  # (position, bit) along the current branch
    rows: list[Multiscenario] = []

    def leaf(pos: int) -> None:
        for j in range(m):
            if survive[j] == sizes[j]:
                length = lengths[j]
                break
        else:
            length = m_penalty
        for k in range(pos, n):
            symbols[k] = "i"
        rows.append(Multiscenario("".join(symbols), length, tuple(trail)))

    # unresolved counts paths neither dead (a failed member) nor fully survived;
    # when it hits zero no remaining link can matter, so the branch is a leaf
    unresolved = m

    def visit(pos: int) -> None:
        nonlocal unresolved
        if pos == n or unresolved == 0:
            leaf(pos)
            return
        e = perm[pos]
        through = contains.get(e)
        if through is None:  # link on no allowed path
            symbols[pos] = "i"
            visit(pos + 1)
            return
        bound_incl = math.inf
        for j in through:
            if fail[j] == 0:
                bound_incl = lengths[j]
                break
        # a fully survived path cannot contain e (e is still free), so the
        # excluding bound is just the best completed path
        bound_excl = m_penalty
        for j in range(m):
            if survive[j] == sizes[j]:
                bound_excl = lengths[j]
                break
        if bound_incl >= bound_excl - TIE_EPS:
            symbols[pos] = "i"
            visit(pos + 1)
            return

        symbols[pos] = "0"
        trail.append((pos, 0))
        for j in through:
            fail[j] += 1
            if fail[j] == 1:
                unresolved -= 1
        visit(pos + 1)
        for j in through:
            if fail[j] == 1:
                unresolved += 1
            fail[j] -= 1

        symbols[pos] = "1"
        trail[-1] = (pos, 1)
        for j in through:
            survive[j] += 1
            if survive[j] == sizes[j]:
                unresolved -= 1
        visit(pos + 1)
        for j in through:
            if survive[j] == sizes[j]:
                unresolved += 1
            survive[j] -= 1
        trail.pop()

    visit(0)
    return MultiscenarioSet(pair_index=index, permutation=perm, rows=tuple(rows))


def count_multiscenarios(instance: Instance, pair, permutation, cutoff=None):
    """Number of rows reduce_pair would emit, or None once it exceeds cutoff.

    Shares the walk logic with reduce_pair but skips row construction, which
    makes it cheap enough to drive permutation search.
    """
    _, spec = _resolve_pair(instance, pair)
    perm = check_permutation(permutation, instance.link_ids)
    return _count(_PairData(spec), perm, cutoff)


class _Over(Exception):
    """Internal: leaf count exceeded the cutoff."""


def _count(data: _PairData, perm, cutoff=None):
    m = data.m
    lengths = data.lengths
    sizes = data.sizes
    contains = data.contains
    m_penalty = data.m_penalty
    limit = math.inf if cutoff is None else cutoff
    n = len(perm)
    fail = [0] * m
    survive = [0] * m
    count = 0
    unresolved = m

    def visit(pos: int) -> None:
        nonlocal count, unresolved
        # only fail branches recurse; merged links and survive branches stay
        # in the loop, with their survive-count batches undone before returning
        survived: list[tuple[int, ...]] = []
        while pos < n and unresolved:
            e = perm[pos]
            through = contains.get(e)
            if through is None:
                pos += 1
                continue
            bound_incl = math.inf
            for j in through:
                if fail[j] == 0:
                    bound_incl = lengths[j]
                    break
            bound_excl = m_penalty
            for j in range(m):
                if survive[j] == sizes[j]:
                    bound_excl = lengths[j]
                    break
            if bound_incl >= bound_excl - TIE_EPS:
                pos += 1
                continue

            for j in through:
                fail[j] += 1
                if fail[j] == 1:
                    unresolved -= 1
            visit(pos + 1)
            for j in through:
                if fail[j] == 1:
                    unresolved += 1
                fail[j] -= 1

            for j in through:
                survive[j] += 1
                if survive[j] == sizes[j]:
                    unresolved -= 1
            survived.append(through)
            pos += 1

        count += 1
        if count > limit:
            raise _Over
        for through in reversed(survived):
            for j in through:
                if survive[j] == sizes[j]:
                    unresolved += 1
                survive[j] -= 1

    try:
        visit(0)
    except _Over:
        return None
    return count


# ---------------------------------------------------------------------------
# rendering

def _fmt(value: float) -> str:
    return f"{value:.12g}"


def format_set(mset: MultiscenarioSet, include_lengths: bool = True, probabilities=None) -> str:
    """Render a set: permutation header, then one row per line with symbols in
    permutation order, optionally followed by the length and a probability."""
    lines = [" ".join(str(e) for e in mset.permutation)]
    for i, row in enumerate(mset.rows):
        parts = list(row.values)
        if include_lengths:
            parts.append(_fmt(row.length))
        if probabilities is not None:
            parts.append(f"{probabilities[i]:.4f}")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def write_set(mset: MultiscenarioSet, path, include_lengths: bool = True) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_set(mset, include_lengths=include_lengths))
