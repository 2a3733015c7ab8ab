"""
Brute force oracles, assignment and duality reports, randomized trials.
"""
import math

import numpy as np
import pytest

from csort.cost import PowerCostParams, ProductionSpec
from csort.distributions import DiscreteDistribution
from csort.dual import DualSolution, dual_from_assignment
from csort.enums import Flag, OracleMode
from csort.errors import InstanceTooLarge, PreconditionViolated
from csort.oracle import (UnitInstance, brute_force_min_cost,
                          check_assignment, check_duality, random_economy,
                          run_trials, verify_economy)
from csort.solver import Assignment, solve


def test_brute_force_two_units(sqrt_cost):
    total, pairing = brute_force_min_cost(UnitInstance((0.0, 1.0), (0.5, 2.0)), sqrt_cost)
    assert total == pytest.approx(math.sqrt(0.5) + 1)
    assert pairing == (0, 1)


def test_brute_force_identical(sqrt_cost):
    total, pairing = brute_force_min_cost(UnitInstance((1.0, 2.0, 3.0), (1.0, 2.0, 3.0)), sqrt_cost)
    assert total == 0
    assert pairing == (0, 1, 2)


@pytest.mark.parametrize("mode", [OracleMode.EXHAUSTIVE, OracleMode.MATCHING])
def test_brute_force_nested(sqrt_cost, mode):
    total, pairing = brute_force_min_cost(UnitInstance((0.0, 5.0), (4.5, 9.0)), sqrt_cost, mode)
    assert total == pytest.approx(3 + math.sqrt(0.5))
    assert pairing == (1, 0)


def test_brute_force_limits(sqrt_cost):
    units = tuple(float(i) for i in range(9))
    with pytest.raises(InstanceTooLarge):
        brute_force_min_cost(UnitInstance(units, units), sqrt_cost)
    assert brute_force_min_cost(UnitInstance(units, units), sqrt_cost, OracleMode.MATCHING)[0] == 0

    units = tuple(float(i) for i in range(201))
    with pytest.raises(InstanceTooLarge):
        brute_force_min_cost(UnitInstance(units, units), sqrt_cost, OracleMode.MATCHING)


def test_unit_instance_expands_atoms():
    F = DiscreteDistribution.from_pairs({0: 2, 3: 1})
    G = DiscreteDistribution.from_pairs({1: 3})
    inst = UnitInstance.from_distributions(F, G)
    assert inst.workers == (0.0, 0.0, 3.0)
    assert inst.jobs == (1.0, 1.0, 1.0)
    assert len(inst) == 3

    with pytest.raises(PreconditionViolated):
        UnitInstance((0.0,), (1.0, 2.0))


def test_oracle_modes_agree(rng):
    for _ in range(50):
        n = int(rng.integers(1, 9))
        workers = tuple(sorted(float(s) for s in rng.uniform(0, 10, n)))
        jobs = tuple(sorted(float(s) for s in rng.uniform(0, 10, n)))
        cost = PowerCostParams(float(rng.uniform(0.3, 0.95)), 1.0, float(rng.uniform(0.3, 0.95)), 1.5)
        exhaustive, _ = brute_force_min_cost(UnitInstance(workers, jobs), cost)
        matching, _ = brute_force_min_cost(UnitInstance(workers, jobs), cost, OracleMode.MATCHING)
        assert matching == pytest.approx(exhaustive, rel=1e-9, abs=1e-12)


def test_check_assignment_passes_on_solver_output(mixture_economy, sqrt_cost):
    F, G = mixture_economy
    report = check_assignment(solve(F, G, sqrt_cost), F, G, sqrt_cost)
    assert report.passed
    assert report.to_json()["flags"] == {}


def test_check_assignment_flags_crossing(sqrt_cost):
    F = DiscreteDistribution.from_pairs({0: 1, 1: 1})
    G = DiscreteDistribution.from_pairs({3: 1, 5: 1})
    report = check_assignment(Assignment.build([(0, 3, 1), (1, 5, 1)], 1, sqrt_cost), F, G, sqrt_cost)
    assert Flag.INTERSECTING_PAIRS in report.flags


def test_check_assignment_flags_missing_diagonal(sqrt_cost):
    F = DiscreteDistribution.from_pairs({0: 1, 1: 1})
    report = check_assignment(Assignment.build([(0, 1, 1), (1, 0, 1)], 1, sqrt_cost), F, F, sqrt_cost)
    assert Flag.SUBMAXIMAL_DIAGONAL in report.flags


def test_check_assignment_flags_marginals_and_cost(sqrt_cost):
    F = DiscreteDistribution.from_pairs({0: 1})
    G = DiscreteDistribution.from_pairs({4: 1})
    wrong = Assignment(((0.0, 3.0, 1),), 7.0, 1)
    report = check_assignment(wrong, F, G, sqrt_cost)
    assert Flag.MARGINAL_MISMATCH in report.flags
    assert Flag.COST_MISMATCH in report.flags


def test_check_duality_flags_perturbed_wage(sqrt_cost):
    assignment = Assignment.build([(1, 10, 1), (3, 4, 1), (7, 8, 1)], 1, sqrt_cost)
    spec = ProductionSpec.identity([1, 10], sqrt_cost)
    dualsol = dual_from_assignment(assignment, spec)
    assert check_duality(dualsol, assignment, spec).passed

    w = dict(dualsol.w)
    w[3.0] -= 1
    perturbed = DualSolution(dualsol.phi, dualsol.psi, w, dualsol.v)
    report = check_duality(perturbed, assignment, spec)
    assert not report.passed
    assert report.flags.keys() & {Flag.DUAL_INFEASIBLE, Flag.SLACKNESS_VIOLATED}
    assert report.worst_violation == pytest.approx(1.0)


def test_check_duality_missing_skill(sqrt_cost):
    assignment = Assignment.build([(0, 2, 1)], 1, sqrt_cost)
    spec = ProductionSpec.identity([0, 2], sqrt_cost)
    report = check_duality(DualSolution({}, {}, {}, {}), assignment, spec)
    assert Flag.DUAL_INFEASIBLE in report.flags


def test_random_economy_shapes(rng):
    for _ in range(50):
        F, G, cost = random_economy(rng, max_atoms=6)
        assert F.true_total == G.true_total
        assert 1 <= F.total <= 6
        assert 0.3 <= cost.zeta_p <= 0.95


def test_forty_unit_economy(rng):
    workers = np.round(rng.uniform(0, 20, 40), 2)
    jobs = np.round(rng.uniform(0, 20, 40), 2)
    F = DiscreteDistribution.from_pairs((float(s), 1) for s in workers)
    G = DiscreteDistribution.from_pairs((float(s), 1) for s in jobs)
    assert not verify_economy(F, G, PowerCostParams(0.45, 1.0, 0.8, 0.7))


def test_verify_economy_with_repeated_atoms():
    F = DiscreteDistribution.from_pairs({0: 2, 2: 1, 5: 1})
    G = DiscreteDistribution.from_pairs({1: 1, 2: 2, 4: 1})
    assert not verify_economy(F, G, PowerCostParams.symmetric(0.5))


def test_thousand_random_trials():
    assert run_trials(1000, seed=7) == []


def test_trials_are_reproducible():
    rng_a, rng_b = np.random.default_rng(3), np.random.default_rng(3)
    for _ in range(5):
        F_a, G_a, cost_a = random_economy(rng_a)
        F_b, G_b, cost_b = random_economy(rng_b)
        assert (F_a, G_a, cost_a) == (F_b, G_b, cost_b)
