import os
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from oimshil import Graph, kings_graph

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"

ACCEPTANCE_LINES = []


def small_corpus():
    """Twenty graphs with n <= 16: king's lattices and random weighted graphs."""
    out = []
    for i, (r, c) in enumerate([(1, 2), (2, 2), (2, 3), (3, 3), (3, 4), (4, 4), (2, 8), (4, 3)]):
        out.append(kings_graph(r, c, "all-ones" if i % 3 == 0 else "random-sign", seed=i))
    for i, (r, c) in enumerate([(3, 3), (3, 4), (4, 4), (4, 4)]):
        out.append(kings_graph(r, c, "random-sign", seed=50 + i))
    rng = np.random.default_rng(7)
    for n in (5, 7, 9, 10, 11, 12, 14, 16):
        edges = [(i, j, float(np.round(rng.uniform(-2, 3), 2)))
                 for i in range(n) for j in range(i + 1, n) if rng.random() < 0.4]
        out.append(Graph.from_edges(n, edges))
    return out


@pytest.fixture(scope="session")
def corpus():
    return small_corpus()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
