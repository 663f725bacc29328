"""Estimator-style wrappers around the reduction, search, and GA pipelines.

These follow the scikit-learn protocol: constructor parameters are stored
verbatim, fit() computes trailing-underscore attributes from an Instance, and
fitted evaluators turn collections of plans into objective values.  The
functional API underneath (reduction, evaluation, permsearch, ga) stays the
primary interface; this layer exists for pipeline and grid-search ergonomics.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .evaluation import Objective, objective_value
from .ga import GaParams, run_ga
from .model import Instance, ValidationError
from .permsearch import PermSearchParams, optimize_permutation
from .reduction import reduce_pair
from .validation import as_invest_vector


def _as_instance(X) -> Instance:
    if not isinstance(X, Instance):
        raise ValidationError(f"expected an Instance, got {type(X).__name__}")
    return X


def _resolve_permutations(instance: Instance, permutations):
    """None -> numerical order for every pair; one permutation -> shared by
    all pairs; otherwise one permutation per pair."""
    n_pairs = len(instance.pairs)
    if permutations is None:
        return [instance.link_ids] * n_pairs
    perms = list(permutations)
    if perms and isinstance(perms[0], int):
        return [tuple(perms)] * n_pairs
    if len(perms) == 1:
        return [tuple(perms[0])] * n_pairs
    if len(perms) != n_pairs:
        raise ValidationError(
            f"got {len(perms)} permutations for {n_pairs} pairs")
    return [tuple(p) for p in perms]


class _PlanEvaluatorMixin:
    """transform/predict for any estimator that fits ``sets_``."""

    def _objective(self) -> Objective:
        return Objective(kind=self.objective, alpha=self.alpha)

    def transform(self, plans) -> np.ndarray:
        """Objective value for each plan (rows of 0/1, strings, or plans)."""
        check_is_fitted(self, "sets_")
        objective = self._objective()
        values = [objective_value(self.sets_, plan, self.instance_, objective)
                  for plan in plans]
        return np.asarray(values)

    def predict(self, plans) -> np.ndarray:
        return self.transform(plans)

    def score(self, plans, y=None) -> float:
        """Negated mean objective (higher is better, sklearn convention)."""
        return -float(self.transform(plans).mean())


class MultiscenarioReducer(_PlanEvaluatorMixin, BaseEstimator):
    """Compress each pair's scenario space, then evaluate plans exactly.

    Parameters
    ----------
    permutations : None, one permutation, or one per pair.
    objective : "expectation" or "cvar".
    alpha : CVaR level, used when objective="cvar".
    """

    def __init__(self, permutations=None, objective="expectation", alpha=0.9):
        self.permutations = permutations
        self.objective = objective
        self.alpha = alpha

    def fit(self, X, y=None):
        instance = _as_instance(X)
        self._objective()  # validates objective/alpha early
        perms = _resolve_permutations(instance, self.permutations)
        self.instance_ = instance
        self.permutations_ = [tuple(p) for p in perms]
        self.sets_ = [reduce_pair(instance, i, perm) for i, perm in enumerate(perms)]
        self.sizes_ = [len(s) for s in self.sets_]
        self.total_size_ = sum(self.sizes_)
        return self


class PermutationSearch(_PlanEvaluatorMixin, BaseEstimator):
    """Hill-climb a permutation per pair, keeping the reduced sets.

    Exposes the same fitted surface as MultiscenarioReducer plus the search
    traces, so it can drop into the same evaluation pipelines.
    """

    def __init__(self, seed=0, max_iterations=50_000, sideways_limit=None,
                 restarts=4, jobs=1, objective="expectation", alpha=0.9):
        self.seed = seed
        self.max_iterations = max_iterations
        self.sideways_limit = sideways_limit
        self.restarts = restarts
        self.jobs = jobs
        self.objective = objective
        self.alpha = alpha

    def fit(self, X, y=None):
        instance = _as_instance(X)
        self._objective()
        params = PermSearchParams(seed=self.seed, max_iterations=self.max_iterations,
                                  sideways_limit=self.sideways_limit, restarts=self.restarts)
        results = [optimize_permutation(instance, i, params, jobs=self.jobs)
                   for i in range(len(instance.pairs))]
        self.instance_ = instance
        self.results_ = results
        self.permutations_ = [r.permutation for r in results]
        self.sets_ = [r.multiscenarios for r in results]
        self.sizes_ = [r.size for r in results]
        self.initial_sizes_ = [r.initial_size for r in results]
        self.total_size_ = sum(self.sizes_)
        return self


class GeneticPlanOptimizer(_PlanEvaluatorMixin, BaseEstimator):
    """Reduce, then search investment plans with the genetic algorithm.

    After fit, ``best_plan_`` holds the best budget-feasible plan found and
    ``best_value_`` its exact objective; predict() evaluates arbitrary plans
    against the same fitted sets.
    """

    def __init__(self, permutations=None, objective="expectation", alpha=0.9,
                 population_size=50, generations=200, crossover_rate=0.9,
                 mutation_rate=None, tournament_size=3, elitism=1, seed=0, jobs=1):
        self.permutations = permutations
        self.objective = objective
        self.alpha = alpha
        self.population_size = population_size
        self.generations = generations
        self.crossover_rate = crossover_rate
        self.mutation_rate = mutation_rate
        self.tournament_size = tournament_size
        self.elitism = elitism
        self.seed = seed
        self.jobs = jobs

    def fit(self, X, y=None):
        instance = _as_instance(X)
        objective = self._objective()
        perms = _resolve_permutations(instance, self.permutations)
        params = GaParams(population_size=self.population_size, generations=self.generations,
                          crossover_rate=self.crossover_rate, mutation_rate=self.mutation_rate,
                          tournament_size=self.tournament_size, elitism=self.elitism,
                          seed=self.seed)
        self.instance_ = instance
        self.permutations_ = [tuple(p) for p in perms]
        self.sets_ = [reduce_pair(instance, i, perm) for i, perm in enumerate(perms)]
        result = run_ga(instance, self.sets_, objective, params, jobs=self.jobs)
        self.result_ = result
        self.best_plan_ = result.best_plan
        self.best_value_ = result.best_value
        self.history_ = result.history
        return self

    def best_invest_vector(self) -> tuple[int, ...]:
        check_is_fitted(self, "best_plan_")
        return as_invest_vector(self.best_plan_, self.instance_.n_links)
