import random

import pytest

from quakeplan import bundled_instance, bundled_permutations, decode, reduce_pair

# one line per acceptance criterion, replayed at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def small():
    return bundled_instance("small")


@pytest.fixture(scope="session")
def istanbul():
    return bundled_instance("istanbul")


@pytest.fixture(scope="session")
def overlay():
    return bundled_instance("istanbul-overlay")


@pytest.fixture(scope="session")
def stored_perms():
    return bundled_permutations()


@pytest.fixture(scope="session")
def small_set(small):
    return reduce_pair(small, 0, (1, 4, 2, 3))


@pytest.fixture(scope="session")
def overlay_sets(overlay, stored_perms):
    return [reduce_pair(overlay, i, stored_perms[i]) for i in range(len(overlay.pairs))]


def random_feasible_plans(instance, n, seed):
    """Budget-feasible plans from random chromosomes through the decoder."""
    rng = random.Random(seed)
    plans = []
    for _ in range(n):
        genes = [rng.randint(0, 1) for _ in range(instance.n_links)]
        plans.append(decode(genes, instance))
    return plans
