"""Exact stochastic shortest-path objectives via multiscenario reduction.

A network's links survive or fail at random, with survival odds improved by
budget-limited investment.  This package compresses each source-sink pair's
scenario space into a small multiscenario set by merging conditionally
interchangeable link outcomes, evaluates investment plans exactly (expected
length or CVaR) on the compressed sets, and searches for good plans with a
genetic algorithm.  Brute-force and Monte-Carlo oracles certify the results.
"""
from .bundled import (bundled_instance, bundled_instance_text, bundled_overlay,
                      bundled_permutations, golden_text)
from .estimators import GeneticPlanOptimizer, MultiscenarioReducer, PermutationSearch
from .evaluation import (Objective, cvar, evaluation_report, expected_length,
                         length_distribution, objective_value, pair_statistic)
from .ga import GaParams, GaResult, decode, fitness, run_ga
from .model import (AllowedPath, FormatError, Graph, GraphEdge, Instance,
                    InvestmentPlan, Link, PairSpec, ValidationError,
                    apply_overlay, effective_survival, enumerate_allowed_paths,
                    instance_to_doc, is_feasible, load_instance,
                    load_instance_file, load_overlay, override_m_penalty,
                    plan_cost, serialize_instance, validate_instance)
from .oracle import (brute_force_distribution, brute_force_expected,
                     brute_force_objective, brute_force_optimal, certify,
                     monte_carlo_estimate)
from .pathlen import (FAIL, FREE, SURVIVE, PartialAssignment, bound_excluding,
                      bound_including, is_interchangeable, realized_length,
                      relevant_links)
from .permsearch import (PermSearchParams, PermSearchResult, exhaustive_best,
                         initial_permutation, optimize_permutation)
from .reduction import (Multiscenario, MultiscenarioSet, count_multiscenarios,
                        format_set, reduce_pair, row_probability, set_size,
                        write_set)
from .validation import as_invest_vector, check_permutation, check_probability

__version__ = "0.1.0"

__all__ = [
    "AllowedPath", "FAIL", "FREE", "FormatError", "GaParams", "GaResult",
    "GeneticPlanOptimizer", "Graph", "GraphEdge", "Instance", "InvestmentPlan",
    "Link", "Multiscenario", "MultiscenarioReducer", "MultiscenarioSet",
    "Objective", "PairSpec", "PartialAssignment", "PermSearchParams",
    "PermSearchResult", "PermutationSearch", "SURVIVE", "ValidationError",
    "apply_overlay", "as_invest_vector", "bound_excluding", "bound_including",
    "brute_force_distribution", "brute_force_expected", "brute_force_objective",
    "brute_force_optimal", "bundled_instance", "bundled_instance_text",
    "bundled_overlay", "bundled_permutations", "certify", "check_permutation",
    "check_probability", "count_multiscenarios", "cvar", "decode",
    "effective_survival", "enumerate_allowed_paths", "evaluation_report",
    "exhaustive_best", "expected_length", "fitness", "format_set",
    "golden_text", "initial_permutation", "instance_to_doc", "is_feasible",
    "is_interchangeable", "length_distribution", "load_instance",
    "load_instance_file", "load_overlay", "monte_carlo_estimate",
    "objective_value", "optimize_permutation", "override_m_penalty",
    "pair_statistic", "plan_cost", "realized_length", "reduce_pair",
    "relevant_links", "row_probability", "run_ga", "serialize_instance",
    "set_size", "validate_instance", "write_set",
]
