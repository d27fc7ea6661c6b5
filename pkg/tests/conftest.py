import numpy as np
import pytest

from hybhuff.archive import select_side
from hybhuff.frequency import build_frequency_profile
from hybhuff.hypergraph import (
    from_hyperedges,
    generate_random_hypergraph,
    generate_zipfian_hypergraph,
)

ACCEPTANCE_RESULTS = []

# Zipfian fixture used by the U-shape and estimator checks: 1% of the
# vertices carry more than 30% of the incidences at this size.
ZIPF_FIXTURE = dict(n_v=10**4, n_h=5000, N=10**6, z=1.5, seed=7)


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: headline acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, status, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{status:<4} {name}: {detail}")


@pytest.fixture
def record_criterion():
    """Record one acceptance line; ``status`` is PASS, FAIL or SKIP."""

    def record(name, passed, detail, skipped=False):
        status = "SKIP" if skipped else ("PASS" if passed else "FAIL")
        ACCEPTANCE_RESULTS.append((name, status, detail))
        print(f"{status} {name}: {detail}")
        return passed

    return record


@pytest.fixture
def toy():
    """Two vertices, both in hyperedge 0."""
    return from_hyperedges([[0, 1]], num_vertices=2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def zipf_fixture():
    p = ZIPF_FIXTURE
    return generate_zipfian_hypergraph(p["n_v"], p["n_h"], p["N"], p["z"], seed=p["seed"])


@pytest.fixture(scope="session")
def zipf_fixture_profile(zipf_fixture):
    _, _, adjacency = select_side(zipf_fixture)
    return build_frequency_profile(adjacency)


def random_instances(seed, count, **limits):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        yield generate_random_hypergraph(rng, **limits)
