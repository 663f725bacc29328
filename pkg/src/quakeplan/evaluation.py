"""Exact objective computation over multiscenario sets.

The objective is a weighted sum of per-pair statistics (expectation or CVaR)
of the realized path-length distribution.  Each pair is evaluated on its own
multiscenario set, so an evaluation touches only a few hundred rows instead
of 2^|E| scenarios.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .model import Instance, ValidationError, effective_survival, plan_cost
from .reduction import MultiscenarioSet
from .validation import as_invest_vector


@dataclass(frozen=True)
class Objective:
    """What to minimize: expectation or CVaR at level alpha, with optional
    per-pair weights overriding the instance's."""

    kind: str = "expectation"           # "expectation" or "cvar"
    alpha: float | None = None          # required for cvar, in (0, 1)
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in ("expectation", "cvar"):
            raise ValidationError(f"unknown objective kind {self.kind!r}")
        if self.kind == "cvar":
            if self.alpha is None or not 0.0 < self.alpha < 1.0:
                raise ValidationError(f"cvar requires alpha in (0, 1), got {self.alpha}")
        if self.weights is not None:
            object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
            if any(w < 0 for w in self.weights):
                raise ValidationError("objective weights must be nonnegative")


def _survival_by_position(mset: MultiscenarioSet, plan, links) -> list[float]:
    survival = effective_survival(plan, links)
    return [survival[e] for e in mset.permutation]


def expected_length(mset: MultiscenarioSet, plan, links) -> float:
    """Exact expected realized length: sum of probability times length over
    the set's rows.  Summed with math.fsum so the result is permutation
    invariant to within product rounding (well under 1e-12)."""
    s = _survival_by_position(mset, plan, links)
    terms = []
    for row in mset.rows:
        prob = 1.0
        for pos, bit in row.assigned:
            prob *= s[pos] if bit else 1.0 - s[pos]
        terms.append(prob * row.length)
    return math.fsum(terms)


def length_distribution(mset: MultiscenarioSet, plan, links) -> list[tuple[float, float]]:
    """Aggregated (length, probability) atoms, sorted by length descending."""
    s = _survival_by_position(mset, plan, links)
    mass: dict[float, list[float]] = {}
    for row in mset.rows:
        prob = 1.0
        for pos, bit in row.assigned:
            prob *= s[pos] if bit else 1.0 - s[pos]
        mass.setdefault(row.length, []).append(prob)
    return [(length, math.fsum(probs)) for length, probs in
            sorted(mass.items(), key=lambda kv: -kv[0])]


def cvar(mset: MultiscenarioSet, plan, links, alpha: float) -> float:
    """Conditional value-at-risk of the length distribution at level alpha.

    Expected length within the worst (1-alpha) probability tail; the atom
    straddling the tail boundary contributes fractionally.
    """
    if not 0.0 < alpha < 1.0:
        raise ValidationError(f"alpha={alpha} outside (0, 1)")
    atoms = length_distribution(mset, plan, links)
    tail = 1.0 - alpha
    taken = 0.0
    total = 0.0
    for length, prob in atoms:
        if prob <= 0.0:
            continue
        chunk = min(prob, tail - taken)
        total += chunk * length
        taken += chunk
        if taken >= tail:
            return total / tail
    if taken <= 0.0:
        raise ValidationError("length distribution has zero total probability")
    # float shortfall: the whole distribution fits in the tail
    return total / taken


def pair_statistic(mset: MultiscenarioSet, plan, links, objective: Objective) -> float:
    if objective.kind == "cvar":
        return cvar(mset, plan, links, objective.alpha)
    return expected_length(mset, plan, links)


def objective_value(sets, plan, instance: Instance, objective: Objective | None = None) -> float:
    """Weighted sum of per-pair statistics for a feasible plan.

    ``sets`` must hold one MultiscenarioSet per instance pair, in pair order.
    Raises ValidationError for infeasible plans or mismatched sets.
    """
    if objective is None:
        objective = Objective()
    sets = list(sets)
    if len(sets) != len(instance.pairs):
        raise ValidationError(f"{len(sets)} sets for {len(instance.pairs)} pairs")
    for i, mset in enumerate(sets):
        if mset.pair_index != i:
            raise ValidationError(f"set {i} was built for pair {mset.pair_index}")
    vec = as_invest_vector(plan, instance.n_links)
    cost = plan_cost(vec, instance)
    if cost > instance.budget:
        raise ValidationError(f"plan cost {cost} exceeds budget {instance.budget}")
    weights = objective.weights
    if weights is None:
        weights = tuple(p.weight for p in instance.pairs)
    elif len(weights) != len(instance.pairs):
        raise ValidationError(f"{len(weights)} weights for {len(instance.pairs)} pairs")
    links = instance.sorted_links
    return math.fsum(w * pair_statistic(mset, vec, links, objective)
                     for w, mset in zip(weights, sets))


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def evaluation_report(instance: Instance, sets, plan, objective: Objective | None = None) -> str:
    """Human-readable fixed-column table plus machine-readable lines."""
    if objective is None:
        objective = Objective()
    vec = as_invest_vector(plan, instance.n_links)
    cost = plan_cost(vec, instance)
    if cost > instance.budget:
        raise ValidationError(f"plan cost {cost} exceeds budget {instance.budget}")
    links = instance.sorted_links
    weights = objective.weights or tuple(p.weight for p in instance.pairs)
    lines = [f"{'pair':>4}  {'source':>6}  {'sink':>4}  {'weight':>8}  {'value':>14}"]
    stats = []
    for i, (mset, w) in enumerate(zip(sets, weights)):
        stat = pair_statistic(mset, vec, links, objective)
        stats.append(stat)
        spec = instance.pairs[i]
        lines.append(f"{i:>4}  {spec.source:>6}  {spec.sink:>4}  {w:>8.4f}  {stat:>14.6f}")
    total = math.fsum(w * s for w, s in zip(weights, stats))
    lines.append("")
    lines.append(f"plan {''.join(str(b) for b in vec)}")
    lines.append(f"cost {_fmt(cost)}")
    lines.append(f"budget {_fmt(instance.budget)}")
    lines.append(f"slack {_fmt(instance.budget - cost)}")
    lines.append(f"objective_kind {objective.kind}" + (f" alpha {_fmt(objective.alpha)}" if objective.kind == "cvar" else ""))
    lines.append(f"objective {_fmt(total)}")
    return "\n".join(lines) + "\n"
