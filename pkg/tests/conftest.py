"""Shared test fixtures."""

from pathlib import Path

import pytest

from minkowski_sc.certificate import derive_constants
from minkowski_sc.curves import generate_greedy, make_curve
from minkowski_sc.norms import build_norm

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def euclid():
    return build_norm("euclid")


@pytest.fixture(scope="session")
def lp3():
    return build_norm("lp:3")


@pytest.fixture(scope="session")
def lp4():
    return build_norm("lp:4")


@pytest.fixture(scope="session")
def ellipse():
    return build_norm("alp:2:1,0,0,3")


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def monotone_curve():
    return make_curve([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])


@pytest.fixture
def backtracking_curve():
    return make_curve([[0.0, 0.0], [1.0, 0.0], [0.4, 0.0]])


@pytest.fixture(scope="session")
def bundles(euclid, lp3, lp4):
    return {
        "euclid": derive_constants(euclid),
        "lp:3": derive_constants(lp3),
        "lp:4": derive_constants(lp4),
    }


@pytest.fixture(scope="session")
def greedy_curves(euclid, lp3, lp4):
    """Twenty short greedy curves per norm."""
    norms = {"euclid": euclid, "lp:3": lp3, "lp:4": lp4}
    return {
        name: [generate_greedy(norm, 30, 0.1, seed).curve for seed in range(20)]
        for name, norm in norms.items()
    }


@pytest.fixture(scope="session")
def lp4_batch(lp4):
    """One hundred greedy lp:4 curves."""
    return [generate_greedy(lp4, 80, 0.1, seed).curve for seed in range(100)]
