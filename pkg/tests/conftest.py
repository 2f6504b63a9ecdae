import sys
from pathlib import Path

import pytest

# Add project root to Python path
project_root = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(project_root))

from netmem.deployment import Deployment
from netmem.random_graph import Graph

# Two-hop chain: S - mu - C
SOURCE, MEMORY, CLIENT = 0, 1, 2

# Six-vertex branching topology: path S - C1 - C2 - mu - C3 with C4 hanging off mu
S, C1, C2, MU, C3, C4 = 0, 1, 2, 3, 4, 5
BRANCHING_EDGES = [(S, C1), (C1, C2), (C2, MU), (MU, C3), (MU, C4)]


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow Monte Carlo checks")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long Monte Carlo check, needs --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def two_hop_deployment() -> Deployment:
    """S - mu - C with gain 2 and only C demanding traffic."""
    graph = Graph.from_edges(3, [(SOURCE, MEMORY), (MEMORY, CLIENT)])
    return Deployment(graph, SOURCE, (MEMORY,), gain=2.0, flows=(0.0, 0.0, 1.0))


@pytest.fixture
def branching_graph() -> Graph:
    return Graph.from_edges(6, BRANCHING_EDGES)


@pytest.fixture
def branching_deployment(branching_graph) -> Deployment:
    """Six-vertex topology with g=4; the memory vertex itself carries no demand."""
    flows = tuple(0.0 if v == MU else 1.0 for v in range(6))
    return Deployment(branching_graph, S, (MU,), gain=4.0, flows=flows)
