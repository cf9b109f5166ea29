import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from topodiag import description
from topodiag.netgraph import NetworkModel

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("dev", max_examples=15, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

EXAMPLE2_EDGES = ((1, 2), (2, 3), (3, 4), (2, 5), (4, 5), (5, 1))


@pytest.fixture(scope="session")
def ex1():
    return description.load("example1")


@pytest.fixture(scope="session")
def ex2():
    return description.load("example2")


@pytest.fixture(scope="session")
def ieee9():
    return description.load("ieee9")


@pytest.fixture(scope="session")
def single_int():
    return description.load("single_integrator")


@pytest.fixture
def ex2_graph():
    return NetworkModel(5, EXAMPLE2_EDGES, {}, frozenset({1}))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
