"""Genetic algorithm for choosing which links to reinforce under a budget.

Chromosomes are raw 0/1 gene strings, one gene per link.  A gene string is
turned into a feasible plan by scanning links in ascending id order and
keeping an investment only while the running cost stays within budget, so
every chromosome decodes to a feasible plan and crossover or mutation can
never produce an infeasible one.
"""
from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .evaluation import objective_value
from .model import Instance, InvestmentPlan, ValidationError


@dataclass(frozen=True)
class GaParams:
    population_size: int = 50
    generations: int = 200
    crossover_rate: float = 0.9
    mutation_rate: float | None = None  # None -> 1/|E|
    tournament_size: int = 3
    elitism: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.population_size < 2:
            raise ValidationError("population_size must be at least 2")
        if self.generations < 0:
            raise ValidationError("generations must be nonnegative")
        for name in ("crossover_rate", "mutation_rate"):
            value = getattr(self, name)
            if value is not None and not 0.0 <= value <= 1.0:
                raise ValidationError(f"{name} must lie in [0, 1]")
        if self.tournament_size < 1:
            raise ValidationError("tournament_size must be at least 1")
        if not 0 <= self.elitism < self.population_size:
            raise ValidationError("elitism must lie in [0, population_size)")


@dataclass(frozen=True)
class GaResult:
    best_plan: InvestmentPlan
    best_value: float
    history: tuple[float, ...]  # best objective after each generation


def decode(genes, instance: Instance) -> InvestmentPlan:
    """Repair a gene string into a feasible plan.

    Links are visited in ascending id order; a 1-gene is kept only if the
    cumulative cost of kept links stays within the budget.
    """
    genes = list(genes)
    if len(genes) != instance.n_links:
        raise ValidationError(
            f"chromosome has {len(genes)} genes, instance has {instance.n_links} links")
    invest = []
    spent = 0.0
    for gene, link in zip(genes, instance.sorted_links):
        if gene not in (0, 1):
            raise ValidationError(f"gene for link {link.id} is {gene!r}, expected 0 or 1")
        if gene and spent + link.cost <= instance.budget:
            invest.append(1)
            spent += link.cost
        else:
            invest.append(0)
    return InvestmentPlan(tuple(invest))


def fitness(genes, instance: Instance, sets, objective=None) -> float:
    """Objective value of the decoded plan (lower is better)."""
    return objective_value(sets, decode(genes, instance), instance, objective)


def run_ga(instance: Instance, sets, objective=None, params: GaParams | None = None,
           initial_population=None, jobs: int = 1) -> GaResult:
    """Minimize the weighted objective over budget-feasible plans.

    Deterministic for a fixed seed: all variation randomness for a generation
    is drawn before any fitness evaluation, so ``jobs`` (thread count for
    evaluating a generation) cannot change the result.  Evaluations are
    memoized on the decoded plan, so re-visiting a plan through a different
    chromosome is free.  initial_population, when given, seeds generation
    zero; chromosomes beyond population_size are ignored.
    """
    if params is None:
        params = GaParams()
    n = instance.n_links
    rng = random.Random(params.seed)
    mutation_rate = params.mutation_rate if params.mutation_rate is not None else 1.0 / n

    memo: dict[tuple[int, ...], float] = {}

    def evaluate(genes) -> float:
        plan = decode(genes, instance)
        key = plan.invest
        if key not in memo:
            memo[key] = objective_value(sets, plan, instance, objective)
        return memo[key]

    def evaluate_all(pop) -> list[float]:
        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                return list(pool.map(evaluate, pop))
        return [evaluate(genes) for genes in pop]

    population: list[list[int]] = []
    if initial_population is not None:
        for genes in initial_population:
            genes = list(genes)
            if len(genes) != n or any(g not in (0, 1) for g in genes):
                raise ValidationError("initial_population chromosomes must be 0/1 strings of link count")
            population.append(genes)
            if len(population) == params.population_size:
                break
    while len(population) < params.population_size:
        population.append([rng.randint(0, 1) for _ in range(n)])

    scores = evaluate_all(population)

    def best_index() -> int:
        return min(range(len(population)), key=lambda i: (scores[i], i))

    def tournament() -> list[int]:
        contenders = [rng.randrange(len(population)) for _ in range(params.tournament_size)]
        winner = min(contenders, key=lambda i: (scores[i], i))
        return population[winner]

    history = []
    i_best = best_index()
    best_genes, best_value = list(population[i_best]), scores[i_best]
    history.append(best_value)

    for _ in range(params.generations):
        order = sorted(range(len(population)), key=lambda i: (scores[i], i))
        next_pop = [list(population[i]) for i in order[: params.elitism]]
        while len(next_pop) < params.population_size:
            a = tournament()
            b = tournament()
            if rng.random() < params.crossover_rate:
                child = [a[j] if rng.random() < 0.5 else b[j] for j in range(n)]
            else:
                child = list(a)
            for j in range(n):
                if rng.random() < mutation_rate:
                    child[j] = 1 - child[j]
            next_pop.append(child)
        population = next_pop
        scores = evaluate_all(population)
        i_best = best_index()
        if scores[i_best] < best_value:
            best_genes, best_value = list(population[i_best]), scores[i_best]
        history.append(best_value)

    return GaResult(decode(best_genes, instance), best_value, tuple(history))
