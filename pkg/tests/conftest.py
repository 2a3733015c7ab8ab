"""
Shared economies and costs for the test suite.
"""
import numpy as np
import pytest

from csort.cost import PowerCostParams
from csort.distributions import DiscreteDistribution


class SquaredCost:
    """Convex comparison cost (z - x)^2"""
    def __call__(self, x: float, z: float) -> float:
        return (z - x) ** 2

    def pairwise(self, xs, zs) -> np.ndarray:
        return np.subtract.outer(np.asarray(xs, dtype=float), np.asarray(zs, dtype=float)) ** 2


@pytest.fixture(name="sqrt_cost")
def fixture_sqrt_cost() -> PowerCostParams:
    return PowerCostParams.symmetric(0.5, 1.0)


@pytest.fixture(name="squared_cost")
def fixture_squared_cost() -> SquaredCost:
    return SquaredCost()


@pytest.fixture(name="binomial_economy")
def fixture_binomial_economy() -> tuple[DiscreteDistribution, DiscreteDistribution]:
    """Workers B(4, 1/3) and jobs B(4, 2/3), counted out of 81"""
    F = DiscreteDistribution.from_pairs({0: 16, 1: 32, 2: 24, 3: 8, 4: 1})
    G = DiscreteDistribution.from_pairs({0: 1, 1: 8, 2: 24, 3: 32, 4: 16})
    return F, G


@pytest.fixture(name="mixture_economy")
def fixture_mixture_economy() -> tuple[DiscreteDistribution, DiscreteDistribution]:
    """3:1 mixture of B(4, 1/3) with a point mass at 4, and its reflection"""
    F = DiscreteDistribution.from_pairs({0: 16, 1: 32, 2: 24, 3: 8, 4: 28})
    G = DiscreteDistribution.from_pairs({0: 28, 1: 8, 2: 24, 3: 32, 4: 16})
    return F, G


@pytest.fixture(name="rng")
def fixture_rng() -> np.random.Generator:
    return np.random.default_rng(20250101)
