"""Shared fixtures: solved parameter sets and assembled towers.

Everything heavy is session-scoped so the correction-profile caches are
shared across the whole run.
"""

import pytest

from bubbletower.params import solve_full_system
from bubbletower.tower import build_tower


@pytest.fixture(scope="session")
def ps_k1_p100():
    return solve_full_system(1, 100.0)


@pytest.fixture(scope="session")
def ps_k2_p100():
    return solve_full_system(2, 100.0)


@pytest.fixture(scope="session")
def ps_k2_p200():
    return solve_full_system(2, 200.0)


@pytest.fixture(scope="session")
def tower_k2_p100(ps_k2_p100):
    return build_tower(ps_k2_p100)


@pytest.fixture(scope="session")
def tower_k2_p200(ps_k2_p200):
    return build_tower(ps_k2_p200)


@pytest.fixture(scope="session")
def towers_p150():
    return {k: build_tower(solve_full_system(k, 150.0)) for k in (1, 2, 3)}
