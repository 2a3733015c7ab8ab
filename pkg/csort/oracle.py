"""
Independent checks of solver and dual output on small economies.

Brute force pairs unit masses directly, either over every permutation or
with a min-cost bipartite matching. The report checks look for crossing
pairs, missing diagonal mass, wrong marginals, dual infeasibility and a
primal-dual gap.
"""
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program. If not, see <http://www.gnu.org/licenses/>.
#
# Copyright (C) 2025 The csort authors
#
import functools
import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from csort.cost import MismatchCost, PowerCostParams, ProductionSpec
from csort.distributions import DiscreteDistribution, align, common_component
from csort.dual import DualSolution, dual_from_assignment, find_crossing
from csort.enums import EXHAUSTIVE_LIMIT, MATCHING_LIMIT, TOLERANCE, Flag, OracleMode
from csort.errors import CSortError, InstanceTooLarge, PreconditionViolated
from csort.solver import Assignment, recompute_cost, solve

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class UnitInstance:
    """One entry per unit of mass on each side, each unit worth 1/scale"""
    workers: tuple[float, ...]
    jobs: tuple[float, ...]
    scale: int = 1

    def __post_init__(self):
        if len(self.workers) != len(self.jobs):
            raise PreconditionViolated(f"{len(self.workers)} worker units but {len(self.jobs)} job units")
        if list(self.workers) != sorted(self.workers) or list(self.jobs) != sorted(self.jobs):
            raise PreconditionViolated("Unit skills must be sorted")

    @classmethod
    def from_distributions(cls, F: DiscreteDistribution, G: DiscreteDistribution) -> "UnitInstance":
        F, G = align(F, G)
        workers = tuple(x for x, mass in F.atoms for _ in range(mass))
        jobs = tuple(z for z, mass in G.atoms for _ in range(mass))
        return cls(workers, jobs, F.scale)

    def __len__(self) -> int:
        return len(self.workers)


@functools.lru_cache(maxsize=EXHAUSTIVE_LIMIT + 1)
def _permutations(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))), dtype=np.intp).reshape(-1, n)


def brute_force_min_cost(inst: UnitInstance, cost: MismatchCost, mode: OracleMode = OracleMode.EXHAUSTIVE) -> tuple[float, tuple[int, ...]]:
    """
    Minimal total cost over one-to-one pairings of units, and the pairing as
    a permutation: worker i takes job pairing[i]. Cost is per true mass.
    """
    n = len(inst)
    limit = EXHAUSTIVE_LIMIT if mode == OracleMode.EXHAUSTIVE else MATCHING_LIMIT
    if n > limit:
        raise InstanceTooLarge(f"{n} units exceed the {mode.name.lower()} oracle limit of {limit}")
    if n == 0:
        return 0.0, ()

    C = cost.pairwise(inst.workers, inst.jobs)
    if mode == OracleMode.EXHAUSTIVE:
        perms = _permutations(n)
        totals = C[np.arange(n), perms].sum(axis=1)
        pairing = tuple(int(k) for k in perms[int(np.argmin(totals))])
    else:
        rows, cols = linear_sum_assignment(C)
        pairing = tuple(int(k) for _, k in sorted(zip(rows, cols)))

    total = math.fsum(C[i, k] for i, k in enumerate(pairing))
    return total / inst.scale, pairing


@dataclass
class CheckReport:
    """Problems found by a check, empty when everything passed"""
    flags: dict[Flag, str] = field(default_factory=dict)
    worst_violation: float = 0.0
    gap: float|None = None

    @property
    def passed(self) -> bool:
        return not self.flags

    def flag(self, flag: Flag, detail: str):
        self.flags.setdefault(flag, detail)

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "flags": {flag.label: detail for flag, detail in sorted(self.flags.items())},
            "worst_violation": self.worst_violation,
            "gap": self.gap,
        }


def check_assignment(assignment: Assignment, F: DiscreteDistribution, G: DiscreteDistribution, cost: MismatchCost) -> CheckReport:
    """Marginals, crossing pairs, diagonal mass and recorded cost of an assignment"""
    report = CheckReport()
    workers, jobs = assignment.marginals()

    F_aligned, workers_aligned = align(F, workers)
    G_aligned, jobs_aligned = align(G, jobs)
    if F_aligned.atoms != workers_aligned.atoms:
        report.flag(Flag.MARGINAL_MISMATCH, "Worker marginal differs from the worker distribution")
    if G_aligned.atoms != jobs_aligned.atoms:
        report.flag(Flag.MARGINAL_MISMATCH, "Job marginal differs from the job distribution")

    pairs = assignment.off_diagonal
    crossing = find_crossing([(min(x, z), max(x, z)) for x, z, _ in pairs])
    if crossing:
        a, b = pairs[crossing[0]], pairs[crossing[1]]
        report.flag(Flag.INTERSECTING_PAIRS, f"Pairs ({a[0]}, {a[1]}) and ({b[0]}, {b[1]}) intersect")

    if F.true_total == G.true_total:
        common, _, _ = common_component(F, G)
        diagonal = assignment.diagonal_mass * common.scale
        available = common.total * assignment.scale
        if diagonal < available:
            report.flag(Flag.SUBMAXIMAL_DIAGONAL, f"Diagonal holds {assignment.diagonal_mass}/{assignment.scale} of {common.true_total} perfectly matchable mass")

    recomputed = recompute_cost(assignment.pairs, assignment.scale, cost)
    if abs(recomputed - assignment.total_cost) > TOLERANCE * max(1.0, abs(recomputed)):
        report.flag(Flag.COST_MISMATCH, f"Recorded cost {assignment.total_cost} but pairs cost {recomputed}")
    return report


def check_duality(dualsol: DualSolution, assignment: Assignment, spec: ProductionSpec) -> CheckReport:
    """
    Feasibility w(x) + v(z) >= y(x, z) over every pair of skills, equality
    on the assignment, and a relative primal-dual gap within tolerance.
    """
    report = CheckReport()
    F, G = assignment.marginals()
    S = sorted(set(F.skills) | set(G.skills))

    missing = [s for s in S if s not in dualsol.w or s not in dualsol.v]
    if missing:
        report.flag(Flag.DUAL_INFEASIBLE, f"No wage or firm value for skills {missing}")
        return report

    g = np.asarray(spec.g(S), dtype=float)
    h = np.asarray(spec.h(S), dtype=float)
    Y = g[:, None] + h[None, :] - spec.cost.pairwise(S, S)
    w = np.array([dualsol.w[s] for s in S])
    v = np.array([dualsol.v[s] for s in S])
    slack = w[:, None] + v[None, :] - Y

    worst = float(slack.min()) if slack.size else 0.0
    report.worst_violation = max(0.0, -worst)
    if worst < -TOLERANCE:
        i, j = np.unravel_index(int(np.argmin(slack)), slack.shape)
        report.flag(Flag.DUAL_INFEASIBLE, f"w({S[i]}) + v({S[j]}) falls short of y by {-worst:.3e}")

    position = {s: index for index, s in enumerate(S)}
    for x, z, _ in assignment.pairs:
        gap = slack[position[x], position[z]]
        report.worst_violation = max(report.worst_violation, abs(gap))
        if abs(gap) > TOLERANCE:
            report.flag(Flag.SLACKNESS_VIOLATED, f"Pair ({x}, {z}) is not tight: slack {gap:.3e}")

    primal = math.fsum(mass * Y[position[x], position[z]] for x, z, mass in assignment.pairs) / assignment.scale
    report.gap = dualsol.dual_value(F, G) - primal
    if abs(report.gap) > TOLERANCE * max(1.0, abs(primal)):
        report.flag(Flag.DUALITY_GAP, f"Dual value exceeds primal output by {report.gap:.3e}")
    return report


def random_economy(rng: np.random.Generator, max_atoms: int = 12) -> tuple[DiscreteDistribution, DiscreteDistribution, PowerCostParams]:
    """
    Unit-mass workers and jobs, between 1 and max_atoms per side. Half of the
    economies draw integer skills from a small range so that skills repeat
    and some mass is perfectly matched.
    """
    n = int(rng.integers(1, max_atoms + 1))
    if rng.random() < 0.5:
        draw = lambda: [float(s) for s in rng.integers(0, 2 * n + 1, size=n)]
    else:
        draw = lambda: [round(float(s), 3) for s in rng.uniform(0, 10, size=n)]

    F = DiscreteDistribution.from_pairs((x, 1) for x in draw())
    G = DiscreteDistribution.from_pairs((z, 1) for z in draw())
    cost = PowerCostParams(
        zeta_p=float(rng.uniform(0.3, 0.95)),
        rho_p=float(rng.uniform(0.5, 2.0)),
        zeta_k=float(rng.uniform(0.3, 0.95)),
        rho_k=float(rng.uniform(0.5, 2.0)),
    )
    return F, G, cost


def verify_economy(F: DiscreteDistribution, G: DiscreteDistribution, cost: PowerCostParams) -> list[str]:
    """Solve, dualize and cross-check one economy. Returns problems found."""
    problems = []
    assignment = solve(F, G, cost)

    inst = UnitInstance.from_distributions(F, G)
    mode = OracleMode.EXHAUSTIVE if len(inst) <= EXHAUSTIVE_LIMIT else OracleMode.MATCHING
    best, _ = brute_force_min_cost(inst, cost, mode)
    if abs(best - assignment.total_cost) > TOLERANCE * max(1.0, abs(best)):
        problems.append(f"solver cost {assignment.total_cost} differs from {mode.name.lower()} oracle cost {best}")

    report = check_assignment(assignment, F, G, cost)
    problems += [f"{flag.label}: {detail}" for flag, detail in report.flags.items()]

    skills = sorted(set(F.skills) | set(G.skills))
    spec = ProductionSpec.identity(skills, cost)
    try:
        dualsol = dual_from_assignment(assignment, spec)
    except CSortError as e:
        problems.append(f"dual construction failed: {e}")
    else:
        report = check_duality(dualsol, assignment, spec)
        problems += [f"{flag.label}: {detail}" for flag, detail in report.flags.items()]
    return problems


def run_trials(trials: int, seed: int, max_atoms: int = 12) -> list[dict]:
    """
    Verify seeded random economies. Each failure is returned as a JSON-ready
    dict that reproduces the economy.
    """
    rng = np.random.default_rng(seed)
    failures = []
    for trial in range(trials):
        F, G, cost = random_economy(rng, max_atoms)
        problems = verify_economy(F, G, cost)
        if problems:
            log.warning("Trial %d failed: %s", trial, "; ".join(problems))
            failures.append({
                "trial": trial,
                "seed": seed,
                "workers": F.to_json(),
                "jobs": G.to_json(),
                "cost": cost.to_json(),
                "problems": problems,
            })
    log.info("%d of %d trials passed", trials - len(failures), trials)
    return failures
