import math

import pytest

from quakeplan import (Objective, ValidationError, brute_force_expected,
                       brute_force_objective, brute_force_optimal, certify,
                       cvar, monte_carlo_estimate, reduce_pair, relevant_links)
from quakeplan.model import parse_instance
from quakeplan.oracle import brute_force_statistic


def inline_instance(n_links, paths, budget=1.0, p=0.5, q=1.0,
                    m_allow=100.0, m_penalty=None, name="inline"):
    """One-pair instance over links 1..n_links with the given allowed paths."""
    return parse_instance({
        "name": name,
        "budget": budget,
        "links": [{"id": i, "p": p, "q": q, "cost": 1.0}
                  for i in range(1, n_links + 1)],
        "pairs": [{
            "source": 1, "sink": 2, "weight": 1.0, "m_allow": m_allow,
            **({"m_penalty": m_penalty} if m_penalty is not None else {}),
            "allowed_paths": [{"links": list(links), "length": length}
                              for links, length in paths],
        }],
    })


def test_small_expectation(small):
    links = small.sorted_links
    assert abs(brute_force_expected(small.pairs[0], "1000", links) - 2.236) <= 1e-12
    assert abs(brute_force_objective(small, "1000") - 2.236) <= 1e-12


def test_single_link_pair_closed_form():
    instance = inline_instance(1, [((1,), 2.0)], m_allow=4.0, m_penalty=5.0)
    links = instance.sorted_links
    # survive with probability p = 0.5, else the disconnection penalty
    assert brute_force_expected(instance.pairs[0], "0", links) == 0.5 * 2.0 + 0.5 * 5.0
    assert brute_force_expected(instance.pairs[0], "1", links) == 2.0


def test_relevant_link_counts(istanbul):
    assert [len(relevant_links(p)) for p in istanbul.pairs] == [12, 11, 15, 10, 14]


def test_enumeration_guard_trips():
    paths = [((i,), float(i)) for i in range(1, 27)]
    wide = inline_instance(26, paths, m_allow=30.0)
    with pytest.raises(ValidationError):
        brute_force_expected(wide.pairs[0], "0" * 26, wide.sorted_links)


def test_optimal_small(small):
    plan, value = brute_force_optimal(small)
    assert plan.to_string() == "1000"
    assert abs(value - 2.236) <= 1e-12


def test_optimal_degenerate_budgets(small):
    from quakeplan.model import instance_to_doc
    doc = instance_to_doc(small)
    doc["budget"] = 0.0
    plan, value = brute_force_optimal(parse_instance(doc))
    assert plan.to_string() == "0000"
    assert abs(value - brute_force_objective(small, "0000")) <= 1e-12
    doc["budget"] = 4.0
    plan, _ = brute_force_optimal(parse_instance(doc))
    assert plan.to_string() == "1111"


def test_optimal_enumeration_guard(overlay, monkeypatch):
    # budget 10 over 30 unit costs: C(30, 10) maximal plans, far over the
    # limit; lowering it exercises the refusal without the long walk
    monkeypatch.setattr("quakeplan.oracle.PLAN_ENUMERATION_LIMIT", 2_000)
    with pytest.raises(ValidationError):
        brute_force_optimal(overlay)


def test_monte_carlo_zero_variance(istanbul):
    # deterministic base network: every sample realizes the same lengths
    plan = "0" * istanbul.n_links
    estimate, se = monte_carlo_estimate(istanbul, plan, samples=5_000, seed=4)
    assert se == 0.0
    assert abs(estimate - brute_force_objective(istanbul, plan)) <= 1e-9


def test_monte_carlo_brackets_exact(overlay):
    plan = "1" * 10 + "0" * 20
    exact = brute_force_objective(overlay, plan)
    estimate, se = monte_carlo_estimate(overlay, plan, samples=200_000, seed=0)
    assert se > 0.0
    assert abs(estimate - exact) <= 3.0 * se


def test_monte_carlo_deterministic(overlay):
    plan = "0" * 30
    a = monte_carlo_estimate(overlay, plan, samples=50_000, seed=9)
    b = monte_carlo_estimate(overlay, plan, samples=50_000, seed=9)
    assert a == b


def test_cvar_statistic_cross_checks(small, overlay, overlay_sets):
    objective = Objective(kind="cvar", alpha=0.9)
    links = overlay.sorted_links
    plan = "1" * 10 + "0" * 20
    for i in (1, 3):
        want = brute_force_statistic(overlay.pairs[i], plan, links, objective)
        got = cvar(overlay_sets[i], plan, links, 0.9)
        assert abs(got - want) <= 1e-10
    mset = reduce_pair(small, 0, (1, 4, 2, 3))
    want = brute_force_statistic(small.pairs[0], "0000", small.sorted_links, objective)
    assert want == 3.5
    assert cvar(mset, "0000", small.sorted_links, 0.9) == want


def test_certify_small(small, small_set):
    results = [certify(small, [small_set], seed=1, n_plans=8, mc_samples=20_000)]
    for checks in results:
        assert len(checks) == 5
        for check in checks:
            assert check.passed, f"{check.name}: {check.detail}"


def test_certify_overlay(overlay, overlay_sets):
    checks = certify(overlay, overlay_sets, seed=2, n_plans=6, mc_samples=50_000)
    names = [c.name for c in checks]
    assert len(names) == len(set(names))
    for check in checks:
        assert check.passed, f"{check.name}: {check.detail}"
