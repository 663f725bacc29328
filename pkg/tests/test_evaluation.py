import itertools
import math
import random

import pytest

from quakeplan import (Objective, ValidationError, brute_force_distribution,
                       brute_force_expected, brute_force_objective, cvar,
                       evaluation_report, expected_length, instance_to_doc,
                       length_distribution, objective_value, reduce_pair)
from quakeplan.model import parse_instance

# invest link 1: 0.8 * 2 + 0.2 * (0.64 * 3 + 0.36 * 3.5) = 2.236 exactly
OPT = 2.236


def test_small_optimum_value(small, small_set):
    got = objective_value([small_set], "1000", small)
    assert abs(got - OPT) <= 1e-9


def test_small_no_invest_matches_brute_force(small, small_set):
    want = brute_force_objective(small, "0000")
    got = objective_value([small_set], "0000", small)
    assert abs(got - want) <= 1e-12
    assert abs(got - 2.4888) <= 1e-12


def test_investment_irrelevant_when_q_equals_p(small):
    doc = instance_to_doc(small)
    for link in doc["links"]:
        link["q"] = link["p"]
    flat = parse_instance(doc)
    sets = [reduce_pair(flat, 0, (1, 4, 2, 3))]
    none = objective_value(sets, "0000", flat)
    one = objective_value(sets, "1000", flat)
    assert abs(none - one) <= 1e-12


@pytest.mark.parametrize("name", ["small", "overlay"])
def test_objective_is_permutation_invariant(request, name):
    instance = request.getfixturevalue(name)
    rng = random.Random(7)
    baseline = None
    for trial in range(3):
        sets = []
        for i in range(len(instance.pairs)):
            perm = list(instance.link_ids)
            rng.shuffle(perm)
            sets.append(reduce_pair(instance, i, tuple(perm)))
        value = objective_value(sets, "0" * instance.n_links, instance)
        if baseline is None:
            baseline = value
        else:
            assert abs(value - baseline) <= 1e-12


def test_more_investment_never_hurts_a_pair(small, small_set):
    links = small.sorted_links
    for a in itertools.product((0, 1), repeat=4):
        for b in itertools.product((0, 1), repeat=4):
            if all(x <= y for x, y in zip(a, b)):
                assert expected_length(small_set, b, links) <= \
                    expected_length(small_set, a, links) + 1e-12


@pytest.mark.parametrize("alpha", [0.5, 0.9, 0.95])
def test_cvar_dominates_expectation(overlay, overlay_sets, alpha):
    links = overlay.sorted_links
    plan = [0] * overlay.n_links
    for mset in overlay_sets:
        assert cvar(mset, plan, links, alpha) >= expected_length(mset, plan, links) - 1e-12


def test_cvar_nondecreasing_in_alpha(small, small_set):
    links = small.sorted_links
    values = [cvar(small_set, "0000", links, a) for a in (0.1, 0.5, 0.9, 0.99)]
    assert all(lo <= hi + 1e-12 for lo, hi in zip(values, values[1:]))


def test_cvar_tends_to_expectation(small, small_set):
    links = small.sorted_links
    assert abs(cvar(small_set, "0000", links, 1e-9) -
               expected_length(small_set, "0000", links)) <= 1e-9


def test_cvar_small_tail_hits_penalty(small, small_set):
    # P(disconnect) = 0.2576 under no investment, so the worst 10% tail is
    # entirely at the penalty length
    assert cvar(small_set, "0000", small.sorted_links, 0.9) == 3.5


def test_cvar_on_degenerate_distribution(istanbul, stored_perms):
    # base network has p = q = 1, so every pair realizes its shortest path
    links = istanbul.sorted_links
    plan = "0" * istanbul.n_links
    for i, perm in enumerate(stored_perms):
        mset = reduce_pair(istanbul, i, perm)
        mean = expected_length(mset, plan, links)
        shortest = min(p.length for p in istanbul.pairs[i].allowed_paths)
        assert mean == shortest
        for alpha in (0.3, 0.9):
            assert cvar(mset, plan, links, alpha) == shortest


def test_cvar_rejects_bad_alpha(small, small_set):
    for alpha in (0.0, 1.0, -0.5, 2.0):
        with pytest.raises(ValidationError):
            cvar(small_set, "0000", small.sorted_links, alpha)


def test_distribution_matches_brute_force(overlay, overlay_sets):
    links = overlay.sorted_links
    plan = "1" * 10 + "0" * 20
    for i in (0, 3):
        atoms = length_distribution(overlay_sets[i], plan, links)
        assert abs(math.fsum(p for _, p in atoms) - 1.0) <= 1e-12
        assert [a for a, _ in atoms] == sorted({a for a, _ in atoms}, reverse=True)
        lengths, probs = brute_force_distribution(overlay.pairs[i], plan, links)
        engine = {length: p for length, p in atoms if p > 0}
        oracle = {float(a): float(b) for a, b in zip(lengths, probs) if b > 0}
        assert set(engine) == set(oracle)
        for length in engine:
            assert abs(engine[length] - oracle[length]) <= 1e-12


def test_expected_matches_brute_force_per_pair(overlay, overlay_sets):
    links = overlay.sorted_links
    plan = "111111111100000000000000000000"
    for i, mset in enumerate(overlay_sets):
        want = brute_force_expected(overlay.pairs[i], plan, links)
        assert abs(expected_length(mset, plan, links) - want) <= 1e-10


def test_objective_weight_override(small, small_set):
    doubled = objective_value([small_set], "0000", small,
                              Objective(weights=(2.0,)))
    base = objective_value([small_set], "0000", small)
    assert abs(doubled - 2 * base) <= 1e-12


def test_objective_rejects_infeasible_plan(small, small_set):
    with pytest.raises(ValidationError):
        objective_value([small_set], "1100", small)


def test_objective_rejects_mismatched_sets(small, overlay, small_set, overlay_sets):
    with pytest.raises(ValidationError):
        objective_value([small_set, small_set], "0000", small)
    with pytest.raises(ValidationError):
        objective_value(list(reversed(overlay_sets)), "0" * 30, overlay)
    with pytest.raises(ValidationError):
        objective_value([], "0000", small)


def test_objective_rejects_bad_weight_count(small, small_set):
    with pytest.raises(ValidationError):
        objective_value([small_set], "0000", small, Objective(weights=(1.0, 2.0)))


def test_objective_validation():
    with pytest.raises(ValidationError):
        Objective(kind="median")
    with pytest.raises(ValidationError):
        Objective(kind="cvar")
    with pytest.raises(ValidationError):
        Objective(kind="cvar", alpha=1.5)
    with pytest.raises(ValidationError):
        Objective(weights=(-1.0,))


def test_report_contents(small, small_set):
    text = evaluation_report(small, [small_set], "1000")
    assert "plan 1000" in text
    assert "cost 1" in text
    assert "budget 1" in text
    assert "slack 0" in text
    assert "objective_kind expectation" in text
    assert any(line.startswith("objective 2.236")
               for line in text.splitlines())


def test_report_rejects_infeasible_plan(small, small_set):
    with pytest.raises(ValidationError):
        evaluation_report(small, [small_set], "0110")


def test_report_cvar_mentions_alpha(small, small_set):
    text = evaluation_report(small, [small_set], "0000",
                             Objective(kind="cvar", alpha=0.9))
    assert "objective_kind cvar alpha 0.9" in text
    assert "objective 3.5" in text
