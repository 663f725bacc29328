"""Independent brute-force and Monte-Carlo evaluators.

Everything here recomputes realized lengths by direct scans over the
allowed-path lists and enumerates or samples raw scenarios with numpy.  The
only shared code with the reduction engine is the instance model, so an
agreement between the two is meaningful evidence of correctness.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import Instance, InvestmentPlan, PairSpec, ValidationError, plan_cost
from .validation import as_invest_vector

_CHUNK_BITS = 18  # enumerate/sample in chunks of 2^18 rows to bound memory

BRUTE_FORCE_LINK_LIMIT = 25


def _relevant(pair: PairSpec) -> tuple[int, ...]:
    seen: set[int] = set()
    for path in pair.allowed_paths:
        seen.update(path.links)
    return tuple(sorted(seen))


def _survival_vector(plan, links) -> dict[int, float]:
    vec = as_invest_vector(plan, len(links))
    return {k.id: (k.q if y else k.p) for k, y in zip(links, vec)}


def _lengths_for_alive(pair: PairSpec, alive_columns) -> np.ndarray:
    """Realized length per scenario row given per-link alive boolean columns.

    alive_columns maps link id -> boolean array.  Paths are scanned shortest
    first; the first fully-alive one sets the length, m_penalty otherwise.
    """
    paths = sorted(pair.allowed_paths, key=lambda p: (p.length, p.links))
    n_rows = len(next(iter(alive_columns.values())))
    out = np.full(n_rows, pair.m_penalty)
    settled = np.zeros(n_rows, dtype=bool)
    for path in paths:
        path_alive = np.ones(n_rows, dtype=bool)
        for e in path.links:
            path_alive &= alive_columns[e]
        fresh = path_alive & ~settled
        out[fresh] = path.length
        settled |= path_alive
    return out


def brute_force_distribution(pair: PairSpec, plan, links) -> tuple[np.ndarray, np.ndarray]:
    """Exact (lengths, probabilities) over all 2^k completions of the pair's
    relevant links.  Guarded to k <= 25."""
    relevant = _relevant(pair)
    k = len(relevant)
    if k > BRUTE_FORCE_LINK_LIMIT:
        raise ValidationError(f"{k} relevant links exceed the 2^{BRUTE_FORCE_LINK_LIMIT} enumeration guard")
    survival = _survival_vector(plan, links)
    lengths: dict[float, list[float]] = {}
    total = 1 << k
    step = 1 << min(_CHUNK_BITS, k)
    for start in range(0, total, step):
        idx = np.arange(start, min(start + step, total), dtype=np.int64)
        alive = {e: ((idx >> bit) & 1).astype(bool) for bit, e in enumerate(relevant)}
        realized = _lengths_for_alive(pair, alive)
        probs = np.ones(len(idx))
        for e in relevant:
            s = survival[e]
            probs *= np.where(alive[e], s, 1.0 - s)
        for value in np.unique(realized):
            lengths.setdefault(float(value), []).append(float(probs[realized == value].sum()))
    atoms = sorted(lengths)
    return (np.array(atoms), np.array([math.fsum(lengths[a]) for a in atoms]))


def brute_force_expected(pair: PairSpec, plan, links) -> float:
    """Exact expectation by raw scenario enumeration (2^k, guarded)."""
    relevant = _relevant(pair)
    k = len(relevant)
    if k > BRUTE_FORCE_LINK_LIMIT:
        raise ValidationError(f"{k} relevant links exceed the 2^{BRUTE_FORCE_LINK_LIMIT} enumeration guard")
    survival = _survival_vector(plan, links)
    total = 1 << k
    step = 1 << min(_CHUNK_BITS, k)
    parts = []
    for start in range(0, total, step):
        idx = np.arange(start, min(start + step, total), dtype=np.int64)
        alive = {e: ((idx >> bit) & 1).astype(bool) for bit, e in enumerate(relevant)}
        realized = _lengths_for_alive(pair, alive)
        probs = np.ones(len(idx))
        for e in relevant:
            s = survival[e]
            probs *= np.where(alive[e], s, 1.0 - s)
        # fsum keeps the enumeration exact enough for 1e-10 comparisons
        parts.append(math.fsum((probs * realized).tolist()))
    return math.fsum(parts)


def brute_force_statistic(pair: PairSpec, plan, links, objective=None) -> float:
    """Expectation or CVaR from the exact enumerated distribution."""
    if objective is None or objective.kind == "expectation":
        return brute_force_expected(pair, plan, links)
    atoms, probs = brute_force_distribution(pair, plan, links)
    tail = 1.0 - objective.alpha
    taken = 0.0
    total = 0.0
    for length, prob in sorted(zip(atoms.tolist(), probs.tolist()), key=lambda a: -a[0]):
        chunk = min(prob, tail - taken)
        total += chunk * length
        taken += chunk
        if taken >= tail:
            return total / tail
    return total / taken


def _objective_weights(instance: Instance, objective) -> tuple[float, ...]:
    if objective is not None and objective.weights is not None:
        return objective.weights
    return tuple(p.weight for p in instance.pairs)


def brute_force_objective(instance: Instance, plan, objective=None) -> float:
    weights = _objective_weights(instance, objective)
    return math.fsum(w * brute_force_statistic(pair, plan, instance.sorted_links, objective)
                     for w, pair in zip(weights, instance.pairs))


PLAN_ENUMERATION_LIMIT = 1 << 20


def _maximal_feasible_plans(instance: Instance):
    """Yield maximal budget-feasible plans in lexicographic order (0 before 1).

    Maximal: no uninvested link could still be afforded.  Enumeration is
    guarded; it aborts once more than 2^20 feasible completions were visited.
    """
    costs = [k.cost for k in instance.sorted_links]
    budget = instance.budget
    n = len(costs)
    visited = 0
    current = [0] * n

    def rec(i: int, spent: float):
        nonlocal visited
        if i == n:
            visited += 1
            if visited > PLAN_ENUMERATION_LIMIT:
                raise ValidationError(
                    f"more than 2^20 feasible plans; exhaustive search refused")
            if all(current[j] or spent + costs[j] > budget for j in range(n)):
                yield tuple(current)
            return
        current[i] = 0
        yield from rec(i + 1, spent)
        if spent + costs[i] <= budget:
            current[i] = 1
            yield from rec(i + 1, spent + costs[i])
            current[i] = 0

    yield from rec(0, 0.0)


def brute_force_optimal(instance: Instance, objective=None) -> tuple[InvestmentPlan, float]:
    """Exhaustive search over maximal feasible plans; exact per-pair values.

    Returns the lexicographically smallest optimal plan.  Per-pair statistics
    are memoized on the plan's restriction to that pair's relevant links, so
    plans differing only on irrelevant links reuse the work.
    """
    weights = _objective_weights(instance, objective)
    links = instance.sorted_links
    position = {k.id: i for i, k in enumerate(links)}
    relevant_positions = [tuple(position[e] for e in _relevant(pair)) for pair in instance.pairs]
    memo: dict[tuple[int, tuple[int, ...]], float] = {}

    best_plan = None
    best_value = math.inf
    for plan in _maximal_feasible_plans(instance):
        total = 0.0
        for i, pair in enumerate(instance.pairs):
            key = (i, tuple(plan[j] for j in relevant_positions[i]))
            if key not in memo:
                memo[key] = brute_force_statistic(pair, plan, links, objective)
            total += weights[i] * memo[key]
        if total < best_value:
            best_plan = plan
            best_value = total
    if best_plan is None:
        raise ValidationError("no feasible plan found")
    return InvestmentPlan(best_plan), best_value


def monte_carlo_estimate(instance: Instance, plan, objective=None, samples: int = 1_000_000,
                         seed: int = 0) -> tuple[float, float]:
    """Sampled objective estimate and its standard error.

    Scenarios are drawn i.i.d. under the plan's survival probabilities.  For
    the expectation objective the standard error is the classic s/sqrt(n) of
    the per-scenario weighted sum.  For CVaR each pair's tail is estimated
    empirically and the error term uses a tail-sample normal approximation
    (pair errors combined in quadrature, ignoring cross-pair correlation).
    """
    from .evaluation import Objective

    if samples <= 0:
        raise ValidationError("samples must be positive")
    if objective is None:
        objective = Objective()
    vec = as_invest_vector(plan, instance.n_links)
    links = instance.sorted_links
    survival = np.array([k.q if y else k.p for k, y in zip(links, vec)])
    column = {k.id: i for i, k in enumerate(links)}
    weights = _objective_weights(instance, objective)
    rng = np.random.default_rng(seed)

    step = 1 << _CHUNK_BITS
    if objective.kind == "expectation":
        acc = []
        acc_sq = []
        done = 0
        while done < samples:
            take = min(step, samples - done)
            alive_matrix = rng.random((take, len(links))) < survival
            z = np.zeros(take)
            for w, pair in zip(weights, instance.pairs):
                alive = {e: alive_matrix[:, column[e]] for e in _relevant(pair)}
                z += w * _lengths_for_alive(pair, alive)
            acc.append(float(z.sum()))
            acc_sq.append(float((z * z).sum()))
            done += take
        mean = math.fsum(acc) / samples
        if samples == 1:
            return mean, 0.0
        var = max(0.0, (math.fsum(acc_sq) - samples * mean * mean) / (samples - 1))
        return mean, math.sqrt(var / samples)

    per_pair = [np.empty(samples) for _ in instance.pairs]
    done = 0
    while done < samples:
        take = min(step, samples - done)
        alive_matrix = rng.random((take, len(links))) < survival
        for i, pair in enumerate(instance.pairs):
            alive = {e: alive_matrix[:, column[e]] for e in _relevant(pair)}
            per_pair[i][done:done + take] = _lengths_for_alive(pair, alive)
        done += take
    estimate = 0.0
    se_sq = 0.0
    tail = 1.0 - objective.alpha
    m = max(1, math.ceil(samples * tail))
    for w, values in zip(weights, per_pair):
        worst = np.sort(values)[-m:]
        estimate += w * float(worst.mean())
        if m > 1:
            se_sq += (w * float(worst.std(ddof=1)) / math.sqrt(m)) ** 2
    return estimate, math.sqrt(se_sq)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def certify(instance: Instance, sets, seed: int = 0, n_plans: int = 25,
            mc_samples: int = 200_000) -> list[CheckResult]:
    """Certification suite comparing the multiscenario engine against the
    oracle on random plans, plus structural properties of the sets."""
    import random as _random

    from .evaluation import expected_length
    from .reduction import reduce_pair

    rng = _random.Random(seed)
    links = instance.sorted_links
    results = []

    def feasible_random_plan():
        genes = [rng.randint(0, 1) for _ in links]
        from .ga import decode
        return decode(genes, instance).invest

    plans = [feasible_random_plan() for _ in range(n_plans)]

    worst = 0.0
    for plan in plans:
        for mset, pair in zip(sets, instance.pairs):
            engine = expected_length(mset, plan, links)
            exact = brute_force_expected(pair, plan, links)
            worst = max(worst, abs(engine - exact))
    results.append(CheckResult(
        "engine-vs-oracle expectations", worst <= 1e-10,
        f"max abs diff {worst:.3e} over {len(plans)} plans x {len(sets)} pairs"))

    bad_mass = 0.0
    for plan in plans[: max(1, n_plans // 2)]:
        for mset in sets:
            mass = math.fsum(mset.probabilities(plan, links))
            bad_mass = max(bad_mass, abs(mass - 1.0))
    results.append(CheckResult(
        "probability mass", bad_mass <= 1e-12, f"max |sum - 1| = {bad_mass:.3e}"))

    partition_ok = True
    detail = []
    for i, pair in enumerate(instance.pairs):
        relevant = _relevant(pair)
        k = len(relevant)
        if k > 16:
            detail.append(f"pair {i}: skipped (k={k})")
            continue
        mset = sets[i]
        pos_of = {e: p for p, e in enumerate(mset.permutation)}
        seen = np.zeros(1 << k, dtype=np.int64)
        for row in mset.rows:
            fixed_mask = 0
            fixed_bits = 0
            for pos, bit in row.assigned:
                b = relevant.index(mset.permutation[pos])
                fixed_mask |= 1 << b
                fixed_bits |= bit << b
            free = [b for b in range(k) if not fixed_mask & (1 << b)]
            indices = np.array([fixed_bits], dtype=np.int64)
            for b in free:
                indices = np.concatenate([indices, indices | (1 << b)])
            seen[indices] += 1
        if not (seen == 1).all():
            partition_ok = False
            detail.append(f"pair {i}: partition violated")
        else:
            detail.append(f"pair {i}: 2^{k} scenarios covered once")
    results.append(CheckResult("partition property", partition_ok, "; ".join(detail)))

    flip_ok = True
    for i, pair in enumerate(instance.pairs):
        relevant = set(_relevant(pair))
        others = [k.id for k in links if k.id not in relevant]
        if not others:
            continue
        for _ in range(20):
            from .pathlen import FAIL, SURVIVE, PartialAssignment, realized_length
            states = {e: rng.choice((FAIL, SURVIVE)) for e in relevant}
            base = PartialAssignment(dict(states))
            flipped = PartialAssignment(dict(states))
            e = rng.choice(others)
            flipped.assign(e, rng.choice((FAIL, SURVIVE)))
            if realized_length(pair, base) != realized_length(pair, flipped):
                flip_ok = False
    results.append(CheckResult(
        "irrelevant-link flips", flip_ok, "realized length unchanged by non-relevant links"))

    plan = plans[0]
    exact = math.fsum(w * expected_length(mset, plan, links)
                      for w, mset in zip((p.weight for p in instance.pairs), sets))
    est, se = monte_carlo_estimate(instance, plan, samples=mc_samples, seed=seed)
    bracket = abs(est - exact) <= 3.0 * se if se > 0 else abs(est - exact) < 1e-12
    results.append(CheckResult(
        "monte-carlo bracket", bracket,
        f"exact {exact:.6f} vs {est:.6f} +/- {se:.6f} ({mc_samples} samples)"))

    return results
