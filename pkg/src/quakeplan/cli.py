"""Command-line interface.

Instances are given as bundled names (small, istanbul, istanbul-overlay) or
file paths.  Plans are 0/1 strings in link-id order; permutations are
comma-separated link ids.  All randomized commands require --seed, and every
command produces byte-identical stdout for identical flags.
"""
from __future__ import annotations

import argparse
import difflib
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from .bundled import (GOLDEN_TARGETS, INSTANCE_NAMES, bundled_instance,
                      bundled_overlay, bundled_permutations, golden_text)
from .evaluation import Objective, evaluation_report, objective_value
from .ga import GaParams, run_ga
from .model import (FormatError, Instance, ValidationError, apply_overlay,
                    enumerate_allowed_paths, load_instance_file, load_overlay,
                    override_m_penalty, plan_cost, validate_instance)
from .oracle import brute_force_optimal, certify, monte_carlo_estimate
from .permsearch import PermSearchParams, optimize_permutation
from .reduction import format_set, reduce_pair
from .validation import as_invest_vector


def _load_instance_arg(name: str) -> Instance:
    if name in INSTANCE_NAMES and not os.path.exists(name):
        return bundled_instance(name)
    return load_instance_file(name)


def _resolve_instance(args) -> Instance:
    instance = _load_instance_arg(args.instance)
    overlay = getattr(args, "overlay", None)
    if overlay:
        if overlay == "istanbul-overlay" and not os.path.exists(overlay):
            instance = apply_overlay(instance, bundled_overlay())
        else:
            with open(overlay, encoding="utf-8") as fh:
                instance = apply_overlay(instance, load_overlay(fh.read()))
    if getattr(args, "m_penalty", None) is not None:
        instance = override_m_penalty(instance, args.m_penalty)
    return instance


def _parse_perm(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.replace(",", " ").split())
    except ValueError:
        raise ValidationError(f"bad permutation {text!r}: expected comma-separated link ids")


def _read_perm_file(path: str) -> list[tuple[int, ...]]:
    perms = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            perms.append(_parse_perm(line))
    if not perms:
        raise ValidationError(f"permutation file {path} holds no permutations")
    return perms


def _permutations_for(instance: Instance, args) -> list[tuple[int, ...]]:
    """One permutation per pair from --perm / --perm-file, numerical default."""
    n_pairs = len(instance.pairs)
    if getattr(args, "perm", None):
        return [_parse_perm(args.perm)] * n_pairs
    if getattr(args, "perm_file", None):
        perms = _read_perm_file(args.perm_file)
        if len(perms) == 1:
            return perms * n_pairs
        if len(perms) != n_pairs:
            raise ValidationError(
                f"permutation file has {len(perms)} permutations, instance has {n_pairs} pairs")
        return perms
    return [instance.link_ids] * n_pairs


def _build_sets(instance: Instance, perms, jobs: int = 1):
    indices = range(len(instance.pairs))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(lambda i: reduce_pair(instance, i, perms[i]), indices))
    return [reduce_pair(instance, i, perms[i]) for i in indices]


def _objective_from(args) -> Objective:
    kind = "cvar" if getattr(args, "objective", "exp") == "cvar" else "expectation"
    return Objective(kind=kind, alpha=getattr(args, "alpha", 0.9))


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands

def _cmd_validate(args) -> int:
    instance = _resolve_instance(args)
    validate_instance(instance)
    n_paths = sum(len(p.allowed_paths) for p in instance.pairs)
    print(f"instance {instance.name}: {instance.n_links} links, {len(instance.pairs)} pairs, "
          f"{n_paths} allowed paths, budget {instance.budget:g}")
    print("valid")
    return 0


def _cmd_paths(args) -> int:
    instance = _resolve_instance(args)
    pairs = range(len(instance.pairs)) if args.pair is None else [args.pair]
    for i in pairs:
        pair = instance.pairs[i]
        paths = enumerate_allowed_paths(instance, pair)
        print(f"pair {pair.source}-{pair.sink} m_allow {pair.m_allow:g}: {len(paths)} paths")
        for path in paths:
            ids = " ".join(str(e) for e in path.links)
            print(f"  {ids}  length {path.length:.12g}")
    return 0


def _cmd_reduce(args) -> int:
    instance = _resolve_instance(args)
    perms = _permutations_for(instance, args)
    mset = reduce_pair(instance, args.pair, perms[args.pair])
    probabilities = None
    if args.plan is not None:
        probabilities = mset.probabilities(args.plan, instance.sorted_links)
    text = format_set(mset, include_lengths=not args.no_lengths, probabilities=probabilities)
    _emit(text, args.out)
    return 0


def _cmd_perm_search(args) -> int:
    instance = _resolve_instance(args)
    params = PermSearchParams(seed=args.seed, max_iterations=args.iterations,
                              sideways_limit=args.sideways, restarts=args.restarts)
    result = optimize_permutation(instance, args.pair, params, jobs=args.jobs)
    print(" ".join(str(e) for e in result.permutation))
    print(f"size {result.size}")
    print(f"initial {result.initial_size}")
    if args.out:
        _emit(format_set(result.multiscenarios), args.out)
    return 0


def _cmd_eval(args) -> int:
    instance = _resolve_instance(args)
    perms = _permutations_for(instance, args)
    sets = _build_sets(instance, perms, args.jobs)
    objective = _objective_from(args)
    sys.stdout.write(evaluation_report(instance, sets, args.plan, objective))
    return 0


def _cmd_solve_ga(args) -> int:
    instance = _resolve_instance(args)
    perms = _permutations_for(instance, args)
    sets = _build_sets(instance, perms, args.jobs)
    objective = _objective_from(args)
    params = GaParams(population_size=args.pop, generations=args.gens,
                      crossover_rate=args.crossover, mutation_rate=args.mutation,
                      tournament_size=args.tournament, elitism=args.elitism, seed=args.seed)
    result = run_ga(instance, sets, objective, params, jobs=args.jobs)
    print(result.best_plan.to_string())
    sys.stdout.write(evaluation_report(instance, sets, result.best_plan, objective))
    return 0


def _cmd_solve_exact(args) -> int:
    instance = _resolve_instance(args)
    objective = _objective_from(args)
    plan, _value = brute_force_optimal(instance, objective)
    print(plan.to_string())
    perms = _permutations_for(instance, args)
    sets = _build_sets(instance, perms, args.jobs)
    sys.stdout.write(evaluation_report(instance, sets, plan, objective))
    return 0


def _cmd_mc_compare(args) -> int:
    instance = _resolve_instance(args)
    perms = _permutations_for(instance, args)
    sets = _build_sets(instance, perms, args.jobs)
    objective = _objective_from(args)
    exact = objective_value(sets, args.plan, instance, objective)
    estimate, stderr = monte_carlo_estimate(instance, args.plan, objective,
                                            samples=args.samples, seed=args.seed)
    z = 0.0 if stderr == 0 else (estimate - exact) / stderr
    print(f"exact {exact:.12g}")
    print(f"estimate {estimate:.12g}")
    print(f"stderr {stderr:.12g}")
    print(f"zscore {z:.6g}")
    print(f"samples {args.samples}")
    print(f"within-3se {'yes' if abs(estimate - exact) <= 3 * stderr or stderr == 0 else 'no'}")
    return 0


def _cmd_oracle_check(args) -> int:
    instance = _resolve_instance(args)
    perms = _permutations_for(instance, args)
    sets = _build_sets(instance, perms, args.jobs)
    results = certify(instance, sets, seed=args.seed, n_plans=args.plans,
                      mc_samples=args.samples)
    failures = 0
    for check in results:
        status = "PASS" if check.passed else "FAIL"
        failures += not check.passed
        print(f"{status} {check.name} - {check.detail}")
    print("all checks passed" if failures == 0 else f"{failures} checks failed")
    return 0 if failures == 0 else 1


def _render_table2() -> str:
    instance = bundled_instance("small")
    blocks = []
    for perm in ((3, 2, 4, 1), (1, 3, 2, 4), (1, 4, 2, 3)):
        mset = reduce_pair(instance, 0, perm)
        probs = mset.probabilities("0" * instance.n_links, instance.sorted_links)
        blocks.append(format_set(mset, include_lengths=False, probabilities=probs))
    return "\n".join(blocks)


def _render_table3() -> str:
    instance = bundled_instance("istanbul")
    perms = bundled_permutations()
    lines = []
    total = 0
    for i, pair in enumerate(instance.pairs):
        size = len(reduce_pair(instance, i, perms[i]))
        total += size
        lines.append(f"pair {pair.source}-{pair.sink} multiscenarios {size}")
    lines.append(f"total {total}")
    return "\n".join(lines) + "\n"


def _render_table4() -> str:
    instance = bundled_instance("istanbul")
    perm = bundled_permutations()[3]
    mset = reduce_pair(instance, 3, perm)
    lines = [" ".join(str(e) for e in mset.permutation)]
    for row in mset.sorted_rows():
        lines.append(" ".join(row.values))
    return "\n".join(lines) + "\n"


def _render_small_optimum() -> str:
    instance = bundled_instance("small")
    plan, value = brute_force_optimal(instance)
    lines = [f"exact plan {plan.to_string()} value {value:.12g}"]
    sets = _build_sets(instance, [instance.link_ids] * len(instance.pairs))
    result = run_ga(instance, sets, params=GaParams(seed=0))
    lines.append(f"ga plan {result.best_plan.to_string()} value {result.best_value:.12g}")
    return "\n".join(lines) + "\n"


_RENDERERS = {
    "table2": _render_table2,
    "table3": _render_table3,
    "table4": _render_table4,
    "small-optimum": _render_small_optimum,
}


def _cmd_reproduce(args) -> int:
    produced = _RENDERERS[args.target]()
    expected = golden_text(args.target)
    sys.stdout.write(produced)
    if produced == expected:
        return 0
    diff = difflib.unified_diff(expected.splitlines(keepends=True),
                                produced.splitlines(keepends=True),
                                fromfile=f"golden/{args.target}.txt",
                                tofile="produced")
    sys.stderr.writelines(diff)
    sys.stderr.write(f"reproduce {args.target}: output differs from golden\n")
    return 1


# ---------------------------------------------------------------------------
# parser

def _add_instance_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("instance", help="bundled instance name or instance file path")
    p.add_argument("--overlay", help="overlay file applied over the instance")
    p.add_argument("--m-penalty", type=float, dest="m_penalty",
                   help="override every pair's disconnection penalty")


def _add_perm_args(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group()
    group.add_argument("--perm", help="permutation as comma-separated link ids (all pairs)")
    group.add_argument("--perm-file", dest="perm_file",
                       help="file with one permutation per line (1 line or one per pair)")


def _add_jobs_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--jobs", type=int, default=1, help="worker threads (default 1)")


def _add_objective_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--objective", choices=("exp", "cvar"), default="exp")
    p.add_argument("--alpha", type=float, default=0.9, help="CVaR level (with --objective cvar)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quakeplan",
        description="Exact expected shortest-path objectives via multiscenario "
                    "reduction, with GA-based investment planning.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="load an instance and check every invariant")
    _add_instance_arg(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("paths", help="enumerate allowed paths from graph topology")
    _add_instance_arg(p)
    p.add_argument("--pair", type=int, help="pair index (default: all pairs)")
    p.set_defaults(func=_cmd_paths)

    p = sub.add_parser("reduce", help="build one pair's multiscenario set")
    _add_instance_arg(p)
    p.add_argument("--pair", type=int, required=True, help="pair index")
    _add_perm_args(p)
    p.add_argument("--plan", help="0/1 plan; appends a probability column")
    p.add_argument("--no-lengths", action="store_true", help="omit the length column")
    p.add_argument("--out", help="write the set file here instead of stdout")
    p.set_defaults(func=_cmd_reduce)

    p = sub.add_parser("perm-search", help="hill-climb a permutation for one pair")
    _add_instance_arg(p)
    p.add_argument("--pair", type=int, required=True, help="pair index")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--iterations", type=int, default=50_000, help="moves per restart")
    p.add_argument("--restarts", type=int, default=4)
    p.add_argument("--sideways", type=int, help="plateau cap (default 10*|E|)")
    p.add_argument("--out", help="write the best set file here")
    _add_jobs_arg(p)
    p.set_defaults(func=_cmd_perm_search)

    p = sub.add_parser("eval", help="exact objective report for a plan")
    _add_instance_arg(p)
    p.add_argument("--plan", required=True, help="0/1 string in link-id order")
    _add_perm_args(p)
    _add_objective_args(p)
    _add_jobs_arg(p)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("solve-ga", help="genetic search for the best plan")
    _add_instance_arg(p)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--pop", type=int, default=50)
    p.add_argument("--gens", type=int, default=200)
    p.add_argument("--mutation", type=float, help="per-gene flip rate (default 1/|E|)")
    p.add_argument("--crossover", type=float, default=0.9)
    p.add_argument("--tournament", type=int, default=3)
    p.add_argument("--elitism", type=int, default=1)
    _add_perm_args(p)
    _add_objective_args(p)
    _add_jobs_arg(p)
    p.set_defaults(func=_cmd_solve_ga)

    p = sub.add_parser("solve-exact", help="exhaustive plan search (guarded)")
    _add_instance_arg(p)
    _add_perm_args(p)
    _add_objective_args(p)
    _add_jobs_arg(p)
    p.set_defaults(func=_cmd_solve_exact)

    p = sub.add_parser("mc-compare", help="Monte-Carlo estimate vs exact value")
    _add_instance_arg(p)
    p.add_argument("--plan", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--samples", type=int, default=1_000_000)
    _add_perm_args(p)
    _add_objective_args(p)
    _add_jobs_arg(p)
    p.set_defaults(func=_cmd_mc_compare)

    p = sub.add_parser("oracle-check", help="run the certification suite")
    _add_instance_arg(p)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--plans", type=int, default=25, help="random plans to compare")
    p.add_argument("--samples", type=int, default=200_000, help="Monte-Carlo samples")
    _add_perm_args(p)
    _add_jobs_arg(p)
    p.set_defaults(func=_cmd_oracle_check)

    p = sub.add_parser("reproduce", help="re-derive a recorded table and diff against its golden file")
    p.add_argument("target", choices=GOLDEN_TARGETS)
    p.set_defaults(func=_cmd_reproduce)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
