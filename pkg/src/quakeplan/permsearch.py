"""Hill-climbing search for permutations that give small multiscenario sets.

Moves are 2-exchanges (swap two positions) and 3-exchanges (one of the two
cyclic rotations of three positions), drawn uniformly at random; a move is
accepted when it does not increase the set size.  Equal-size moves keep the
walk off plateaus but are capped, after which the climb reseeds from a random
permutation.  Candidate sizes are counted with an early-abort cutoff at the
current size, so rejected moves cost only a partial walk.
"""
from __future__ import annotations

import itertools
import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .model import Instance, ValidationError
from .reduction import MultiscenarioSet, _count, _PairData, _resolve_pair, reduce_pair


@dataclass(frozen=True)
class PermSearchParams:
    seed: int = 0
    max_iterations: int = 50_000  # evaluated moves per restart
    sideways_limit: int | None = None  # None -> 10 * |E|
    restarts: int = 4

    def __post_init__(self):
        if self.max_iterations <= 0:
            raise ValidationError("max_iterations must be positive")
        if self.restarts < 1:
            raise ValidationError("restarts must be at least 1")
        if self.sideways_limit is not None and self.sideways_limit < 0:
            raise ValidationError("sideways_limit must be nonnegative")


@dataclass(frozen=True)
class PermSearchResult:
    permutation: tuple[int, ...]
    multiscenarios: MultiscenarioSet
    initial_size: int
    history: tuple[tuple[int, ...], ...]  # per-restart incumbent size traces

    @property
    def size(self) -> int:
        return len(self.multiscenarios)

    def __iter__(self):
        # allows: permutation, mset = optimize_permutation(...)
        return iter((self.permutation, self.multiscenarios))


def initial_permutation(instance: Instance, pair) -> tuple[int, ...]:
    """Heuristic start: relevant links ordered by the length of the shortest
    allowed path containing each, then the remaining links by id."""
    _, spec = _resolve_pair(instance, pair)
    shortest: dict[int, float] = {}
    for path in spec.allowed_paths:
        for e in path.links:
            if path.length < shortest.get(e, math.inf):
                shortest[e] = path.length
    relevant = sorted(shortest, key=lambda e: (shortest[e], e))
    rest = [e for e in instance.link_ids if e not in shortest]
    return tuple(relevant + rest)


def _neighbor(perm: tuple[int, ...], rng: random.Random) -> tuple[int, ...]:
    p = list(perm)
    n = len(p)
    if n >= 3 and rng.random() < 0.5:
        i, j, k = rng.sample(range(n), 3)
        if rng.random() < 0.5:
            p[i], p[j], p[k] = p[j], p[k], p[i]
        else:
            p[i], p[j], p[k] = p[k], p[i], p[j]
    else:
        i, j = rng.sample(range(n), 2)
        p[i], p[j] = p[j], p[i]
    return tuple(p)


def _climb(data: _PairData, link_ids, start, seed: int, params: PermSearchParams,
           sideways_cap: int):
    """One restart: first-accept hill climb from ``start``.

    Returns (best permutation, best size, incumbent trace).  The incumbent
    records strict improvements only, so the first permutation reaching a
    size is kept; equal-size moves shift the walker but not the incumbent.
    """
    rng = random.Random(seed)
    if start is None:  # random restart: draw the start from this climb's rng
        start = list(link_ids)
        rng.shuffle(start)
    cur = tuple(start)
    cur_size = _count(data, cur)
    best, best_size = cur, cur_size
    trace = [cur_size]
    sideways = 0
    for _ in range(params.max_iterations):
        if len(cur) < 2:
            break
        cand = _neighbor(cur, rng)
        size = _count(data, cand, cutoff=cur_size)
        if size is None:  # worse than current: rejected
            continue
        if size < cur_size:
            sideways = 0
        else:
            sideways += 1
        cur, cur_size = cand, size
        if cur_size < best_size:
            best, best_size = cur, cur_size
            trace.append(cur_size)
        if sideways > sideways_cap:
            cur = list(link_ids)
            rng.shuffle(cur)
            cur = tuple(cur)
            cur_size = _count(data, cur)
            sideways = 0
            if cur_size < best_size:
                best, best_size = cur, cur_size
                trace.append(cur_size)
    return best, best_size, tuple(trace)


def optimize_permutation(instance: Instance, pair, params: PermSearchParams | None = None,
                         jobs: int = 1) -> PermSearchResult:
    """Search for a permutation minimizing the pair's multiscenario count.

    Restart 0 climbs from the heuristic initial permutation, the others from
    independent random shuffles.  Restarts use seeds derived from params.seed
    and may run on a thread pool (``jobs``); the merged winner is the smallest
    set, ties broken by lowest restart index, so results do not depend on
    scheduling.  Never returns a permutation worse than the heuristic start.
    """
    if params is None:
        params = PermSearchParams()
    _, spec = _resolve_pair(instance, pair)
    data = _PairData(spec)
    link_ids = instance.link_ids
    sideways_cap = params.sideways_limit if params.sideways_limit is not None else 10 * len(link_ids)

    master = random.Random(params.seed)
    seeds = [master.randrange(2**32) for _ in range(params.restarts)]
    heuristic = initial_permutation(instance, pair)
    initial_size = _count(data, heuristic)

    def run(r: int):
        start = heuristic if r == 0 else None
        return _climb(data, link_ids, start, seeds[r], params, sideways_cap)

    if jobs > 1 and params.restarts > 1:
        with ThreadPoolExecutor(max_workers=min(jobs, params.restarts)) as pool:
            outcomes = list(pool.map(run, range(params.restarts)))
    else:
        outcomes = [run(r) for r in range(params.restarts)]

    best_r = min(range(params.restarts), key=lambda r: (outcomes[r][1], r))
    best_perm = outcomes[best_r][0]
    mset = reduce_pair(instance, pair, best_perm)
    return PermSearchResult(
        permutation=best_perm,
        multiscenarios=mset,
        initial_size=initial_size,
        history=tuple(out[2] for out in outcomes),
    )


EXHAUSTIVE_LINK_LIMIT = 8


def exhaustive_best(instance: Instance, pair) -> tuple[int, int]:
    """(min, max) multiscenario count over every permutation; |E| <= 8 only."""
    if instance.n_links > EXHAUSTIVE_LINK_LIMIT:
        raise ValidationError(
            f"{instance.n_links} links exceed the {EXHAUSTIVE_LINK_LIMIT}-link factorial guard")
    _, spec = _resolve_pair(instance, pair)
    data = _PairData(spec)
    lo = math.inf
    hi = 0
    for perm in itertools.permutations(instance.link_ids):
        size = _count(data, perm)
        lo = min(lo, size)
        hi = max(hi, size)
    return int(lo), hi
