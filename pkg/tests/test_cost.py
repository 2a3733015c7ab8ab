"""
Power and Legendre mismatch costs, investments and effective output.
"""
import math

import numpy as np
import pytest

from csort.cost import (LEGENDRE_CACHE_SIZE, LegendreCost, PowerCostParams, ProductionSpec,
                        TabulatedFunction, TechnologyPrimitives,
                        effective_output, legendre_cost, mismatch_cost,
                        optimal_investment, power_params_from_primitives)
from csort.errors import DomainError, InvalidCost, InvestmentUndefined


def test_power_params_from_unit_primitives():
    params = power_params_from_primitives(TechnologyPrimitives(1, 1, 1, 1))
    assert params.zeta_p == pytest.approx(0.5)
    assert params.rho_p == pytest.approx(2.0)
    assert params.zeta_k == pytest.approx(0.5)
    assert params.rho_k == pytest.approx(2.0)


def test_power_params_near_linear():
    params = power_params_from_primitives(TechnologyPrimitives(1, 1e6, 1, 1e6))
    assert 0.999 < params.zeta_p < 1


def test_power_params_match_numeric_minimum():
    params = power_params_from_primitives(TechnologyPrimitives(4, 1, 4, 1))
    assert params.zeta_p == pytest.approx(0.5)
    assert params.rho_p == pytest.approx(4.0)

    L = LegendreCost(psi_p=lambda gamma: 4 / gamma)
    for d in (1, 4, 9):
        assert legendre_cost(L, d) == pytest.approx(4 * math.sqrt(d), abs=1e-8)


def test_power_params_consistent_with_legendre(rng):
    for _ in range(10):
        B, eta = float(rng.uniform(0.5, 3)), float(rng.uniform(0.3, 3))
        t = TechnologyPrimitives(B, eta, B, eta)
        params = power_params_from_primitives(t)
        L = LegendreCost(psi_p=t.psi_p, gamma_bounds=(1e-8, 1e8))
        d = float(rng.uniform(0.1, 10))
        assert legendre_cost(L, d) == pytest.approx(params.rho_p * d ** params.zeta_p, rel=1e-8)


@pytest.mark.parametrize("values", [(0, 1, 0.5, 1), (0.5, 1, 1.0, 1), (0.5, 0, 0.5, 1), (0.5, 1, 0.5, -2)])
def test_power_params_domain(values):
    with pytest.raises(DomainError):
        PowerCostParams(*values)


def test_primitives_domain():
    with pytest.raises(DomainError):
        TechnologyPrimitives(0, 1, 1, 1)


def test_mismatch_cost(sqrt_cost):
    assert mismatch_cost(sqrt_cost, 1, 4) == pytest.approx(math.sqrt(3))
    assert mismatch_cost(sqrt_cost, 4, 1) == pytest.approx(math.sqrt(3))
    assert mismatch_cost(sqrt_cost, 2.5, 2.5) == 0


def test_mismatch_cost_asymmetric():
    cost = PowerCostParams(zeta_p=0.5, rho_p=2.0, zeta_k=0.25, rho_k=1.0)
    assert cost(0, 4) == pytest.approx(4.0)
    assert cost(16, 0) == pytest.approx(2.0)


def test_pairwise_matches_scalar(rng):
    cost = PowerCostParams(0.4, 1.5, 0.7, 0.8)
    xs, zs = rng.uniform(0, 10, 6), rng.uniform(0, 10, 5)
    C = cost.pairwise(xs, zs)
    assert C.shape == (6, 5)
    for i, x in enumerate(xs):
        for j, z in enumerate(zs):
            assert C[i, j] == pytest.approx(cost(x, z))


def test_cost_concave_in_mismatch(rng):
    cost = PowerCostParams(0.35, 1.2, 0.8, 0.6)
    for _ in range(500):
        d1, d2 = sorted(rng.uniform(0, 20, 2))
        a = float(rng.uniform(0, 5))
        for sign in (1, -1):
            gain_small = cost(0, sign * (d1 + a)) - cost(0, sign * d1)
            gain_large = cost(0, sign * (d2 + a)) - cost(0, sign * d2)
            assert gain_small >= gain_large - 1e-12


def test_cost_triangle_inequality(rng):
    cost = PowerCostParams(0.6, 1.0, 0.45, 2.0)
    for _ in range(500):
        x, y, z = rng.uniform(-10, 10, 3)
        assert cost(x, y) + cost(y, z) >= cost(x, z) - 1e-12


def test_cost_increasing_on_each_branch(sqrt_cost):
    values = [sqrt_cost(0, d) for d in np.linspace(0, 5, 11)]
    assert all(b > a for a, b in zip(values, values[1:]))
    values = [sqrt_cost(d, 0) for d in np.linspace(0, 5, 11)]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_optimal_investment():
    t = TechnologyPrimitives(1, 1, 1, 1)
    assert optimal_investment(t, 0, 1) == pytest.approx((1.0, 1.0))
    assert optimal_investment(t, 0, 4) == pytest.approx((0.5, 2.0))
    assert optimal_investment(t, 4, 0) == pytest.approx((0.5, 2.0))

    gamma, _ = optimal_investment(TechnologyPrimitives(2, 2, 1, 1), 0, 1)
    assert gamma == pytest.approx(2 ** (1 / 3), abs=1e-9)
    grid = np.linspace(0.5, 2.5, 200001)
    assert gamma == pytest.approx(grid[np.argmin(grid + grid ** -2.0)], abs=1e-4)


def test_optimal_investment_shrinks_with_mismatch():
    t = TechnologyPrimitives(1.5, 0.8, 1, 1)
    gammas = [optimal_investment(t, 0, d)[0] for d in (0.5, 1, 2, 4)]
    assert all(b < a for a, b in zip(gammas, gammas[1:]))


def test_optimal_investment_undefined_when_matched():
    with pytest.raises(InvestmentUndefined):
        optimal_investment(TechnologyPrimitives(1, 1, 1, 1), 3, 3)


def test_effective_output(sqrt_cost):
    spec = ProductionSpec.identity([0, 4], sqrt_cost)
    assert effective_output(spec, 1, 4) == pytest.approx(5 - math.sqrt(3))
    assert effective_output(spec, 4, 1) == pytest.approx(5 - math.sqrt(3))
    assert effective_output(spec, 2, 2) == pytest.approx(4)
    with pytest.raises(DomainError):
        effective_output(spec, 5, 1)


def test_tabulated_function():
    g = TabulatedFunction((0.0, 1.0, 3.0), (1.0, 2.0, 2.0))
    assert g(0.5) == pytest.approx(1.5)
    assert list(g([0, 2])) == pytest.approx([1.0, 2.0])
    with pytest.raises(DomainError):
        TabulatedFunction((0.0, 1.0), (2.0, 1.0))
    with pytest.raises(DomainError):
        TabulatedFunction((1.0, 0.0), (0.0, 1.0))


def test_legendre_square_root():
    L = LegendreCost(psi_p=lambda gamma: 1 / gamma)
    assert legendre_cost(L, 1) == pytest.approx(2.0, abs=1e-9)
    assert legendre_cost(L, 4) == pytest.approx(4.0, abs=1e-9)
    assert legendre_cost(L, 0) == 0
    assert L(3, 2) == pytest.approx(2.0, abs=1e-9)


def test_legendre_against_dense_grid():
    L = LegendreCost(psi_p=lambda gamma: 0.5 * gamma ** -2)
    gammas = np.linspace(0.2, 5, 2000001)
    for d in (0.5, 1, 3):
        dense = float(np.min(gammas * d + 0.5 * gammas ** -2))
        assert legendre_cost(L, d) == pytest.approx(dense, abs=1e-7)
        assert legendre_cost(L, d) == pytest.approx(1.5 * d ** (2 / 3), abs=1e-9)


def test_legendre_is_concave():
    L = LegendreCost(psi_p=lambda gamma: 2 / gamma + 0.1 * gamma ** -2)
    values = [legendre_cost(L, d) for d in np.linspace(0.5, 10, 20)]
    steps = np.diff(values)
    assert np.all(steps > 0)
    assert np.all(np.diff(steps) < 1e-9)


def test_legendre_rejects_nonconvex():
    with pytest.raises(InvalidCost):
        LegendreCost(psi_p=lambda gamma: -gamma ** 2)
    with pytest.raises(InvalidCost):
        LegendreCost(psi_p=lambda gamma: gamma)


def test_legendre_negative_mismatch():
    L = LegendreCost(psi_p=lambda gamma: 1 / gamma)
    with pytest.raises(DomainError):
        legendre_cost(L, -1)


def test_legendre_cache_is_bounded():
    L = LegendreCost(psi_p=lambda gamma: 1 / gamma)
    for d in np.linspace(0.5, 50, LEGENDRE_CACHE_SIZE + 10):
        legendre_cost(L, d)
    assert L.cache_info().currsize == LEGENDRE_CACHE_SIZE

    legendre_cost(L, 50.0)
    assert L.cache_info().hits == 1
    assert L(0, 50) == pytest.approx(2 * math.sqrt(50), abs=1e-9)
