"""
Optimal assignment of workers to jobs under concave mismatch costs.

Perfectly matched mass is paired on the diagonal first, the rest is cut
into layers, and each layer is solved by an interval Bellman recursion
over its alternating points. Also provides the layered positive shortcut
for near-linear costs and rank-order sorting for convex costs.
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
import logging
import math
from collections.abc import Iterable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from csort.cost import MismatchCost
from csort.distributions import DiscreteDistribution, check_equal_mass, common_component
from csort.enums import Method, Side
from csort.errors import InputError, PreconditionViolated
from csort.layering import Layer, decompose_layers

log = logging.getLogger(__name__)

# Relative slack when two Bellman alternatives are compared for a tie
TIE_TOLERANCE = 1e-12

# Step of the downward scan for the near-linear threshold, and bisection precision
ZETA_SCAN_STEP = 1e-3
ZETA_PRECISION = 1e-6


@dataclass(frozen=True)
class Assignment:
    """
    Mass placed on (worker skill, job skill) pairs, in integer units over
    scale. Pairs are unique and sorted.
    """
    pairs: tuple[tuple[float, float, int], ...]
    total_cost: float
    scale: int = 1

    @classmethod
    def build(cls, pairs: Iterable[tuple[float, float, int]], scale: int, cost: MismatchCost) -> "Assignment":
        """Merge repeated pairs, drop empty ones and price the result"""
        merged: dict[tuple[float, float], int] = {}
        for x, z, mass in pairs:
            merged[(x, z)] = merged.get((x, z), 0) + int(mass)
        ordered = tuple((x, z, mass) for (x, z), mass in sorted(merged.items()) if mass > 0)
        return cls(ordered, recompute_cost(ordered, scale, cost), scale)

    @property
    def diagonal_mass(self) -> int:
        return sum(mass for x, z, mass in self.pairs if x == z)

    @property
    def off_diagonal(self) -> list[tuple[float, float, int]]:
        return [(x, z, mass) for x, z, mass in self.pairs if x != z]

    def marginals(self) -> tuple[DiscreteDistribution, DiscreteDistribution]:
        """Worker and job distributions implied by the pairs"""
        workers: dict[float, int] = {}
        jobs: dict[float, int] = {}
        for x, z, mass in self.pairs:
            workers[x] = workers.get(x, 0) + mass
            jobs[z] = jobs.get(z, 0) + mass
        return DiscreteDistribution.from_pairs(workers, self.scale), DiscreteDistribution.from_pairs(jobs, self.scale)

    def to_json(self, cost: MismatchCost|None = None) -> dict:
        pairs = []
        for x, z, mass in self.pairs:
            entry = {"x": x, "z": z, "mass": mass}
            if cost is not None:
                entry["unit_cost"] = cost(x, z)
            pairs.append(entry)
        return {"scale": self.scale, "pairs": pairs, "total_cost": self.total_cost}

    @classmethod
    def from_json(cls, data: dict) -> "Assignment":
        try:
            pairs = tuple(sorted((float(p["x"]), float(p["z"]), int(p["mass"])) for p in data["pairs"]))
            return cls(pairs, float(data["total_cost"]), int(data.get("scale", 1)))
        except (KeyError, TypeError, ValueError) as e:
            raise InputError(f"Malformed assignment: missing or invalid field {e}") from e


@dataclass
class ValueTable:
    """
    V[i, j] is the minimal cost of pairing points i..j of a layer (1-based),
    V[i, i - 1] = 0. Entries with an even number of points only; the rest
    are NaN. argmin holds the partner chosen for point i on [i, j] by the
    simple recursion.
    """
    V: np.ndarray
    argmin: dict[tuple[int, int], int]|None = None

    @property
    def size(self) -> int:
        """Number of points 2n"""
        return self.V.shape[1] - 1

    def value(self) -> float:
        """V[1, 2n]"""
        return float(self.V[1, self.size]) if self.size else 0.0


def recompute_cost(pairs: Iterable[tuple[float, float, int]], scale: int, cost: MismatchCost) -> float:
    return math.fsum(mass * cost(x, z) for x, z, mass in pairs if x != z) / scale


def _layer_costs(layer: Layer, cost: MismatchCost) -> np.ndarray:
    """C[i, k] = c(worker, job) for the points i and k of the layer (1-based)"""
    N = len(layer.points)
    workers = [i for i, (_, side) in enumerate(layer.points, start=1) if side == Side.WORKER]
    jobs = [k for k, (_, side) in enumerate(layer.points, start=1) if side == Side.JOB]
    skills = layer.skills

    C = np.full((N + 1, N + 1), np.nan)
    block = cost.pairwise([skills[i - 1] for i in workers], [skills[k - 1] for k in jobs])
    for a, i in enumerate(workers):
        for b, k in enumerate(jobs):
            C[i, k] = C[k, i] = block[a, b]
    return C


def _empty_table(N: int) -> np.ndarray:
    V = np.full((N + 2, N + 1), np.nan)
    for i in range(1, N + 2):
        V[i, i - 1] = 0.0
    return V


def _split_value(C: np.ndarray, V: np.ndarray, i: int, k: int, j: int) -> float:
    """Cost of pairing point i with k, then solving inside and to the right"""
    return C[i, k] + V[i + 1, k - 1] + V[k + 1, j]


def _simple_table(C: np.ndarray, N: int) -> ValueTable:
    V = _empty_table(N)
    argmin = {}
    for length in range(2, N + 1, 2):
        for i in range(1, N - length + 2):
            j = i + length - 1
            values = [(_split_value(C, V, i, k, j), k) for k in range(i + 1, j + 1, 2)]
            best = min(value for value, _ in values)
            limit = best + TIE_TOLERANCE * max(1.0, abs(best))
            V[i, j] = best
            argmin[(i, j)] = next(k for value, k in values if value <= limit)
    return ValueTable(V, argmin)


def _efficient_table(C: np.ndarray, N: int) -> ValueTable:
    V = _empty_table(N)
    for i in range(1, N):
        V[i, i + 1] = C[i, i + 1]
    for length in range(4, N + 1, 2):
        for i in range(1, N - length + 2):
            j = i + length - 1
            nested = C[i, j] + V[i + 1, j - 1]
            split = V[i, j - 2] + V[i + 2, j] - V[i + 2, j - 2]
            V[i, j] = min(nested, split)
    return ValueTable(V)


def _partner(C: np.ndarray, table: ValueTable, i: int, j: int) -> int:
    """Smallest k whose split reproduces V[i, j], for tables without stored argmins"""
    if table.argmin is not None:
        return table.argmin[(i, j)]
    target = table.V[i, j]
    limit = target + TIE_TOLERANCE * max(1.0, abs(target))
    candidates = [(_split_value(C, table.V, i, k, j), k) for k in range(i + 1, j + 1, 2)]
    for value, k in candidates:
        if value <= limit:
            return k
    return min(candidates)[1]


def _backtrack(C: np.ndarray, table: ValueTable, N: int) -> list[tuple[int, int]]:
    matches = []
    stack = [(1, N)]
    while stack:
        i, j = stack.pop()
        if j < i:
            continue
        k = _partner(C, table, i, j)
        matches.append((i, k))
        stack.append((i + 1, k - 1))
        stack.append((k + 1, j))
    return matches


def _fill(C: np.ndarray, N: int, method: Method) -> ValueTable:
    match method:
        case Method.SIMPLE:
            return _simple_table(C, N)
        case Method.EFFICIENT:
            return _efficient_table(C, N)
        case _:
            raise PreconditionViolated(f"Layers are solved with the simple or efficient method, not {method.label}")


def value_table(layer: Layer, cost: MismatchCost, method: Method = Method.EFFICIENT) -> ValueTable:
    """Fill the Bellman table of a layer with the simple or the efficient recursion"""
    return _fill(_layer_costs(layer, cost), len(layer.points), method)


def solve_layer(layer: Layer, cost: MismatchCost, method: Method = Method.EFFICIENT) -> tuple[Assignment, ValueTable]:
    """
    Optimal pairing of the points of one layer. The assignment carries the
    layer's mass on every pair.
    """
    C = _layer_costs(layer, cost)
    N = len(layer.points)
    table = _fill(C, N, method)

    pairs = []
    for i, k in _backtrack(C, table, N):
        a, b = layer.points[i - 1], layer.points[k - 1]
        worker, job = (a[0], b[0]) if a[1] == Side.WORKER else (b[0], a[0])
        pairs.append((worker, job, layer.mass))

    return Assignment.build(pairs, layer.scale, cost), table


def _diagonal(common: DiscreteDistribution) -> list[tuple[float, float, int]]:
    return [(skill, skill, mass) for skill, mass in common.atoms]


def solve(F: DiscreteDistribution, G: DiscreteDistribution, cost: MismatchCost, method: Method = Method.EFFICIENT, threads: int = 1) -> Assignment:
    """
    Optimal assignment of F to G: perfect pairs on the common component
    plus the per-layer optima of the remainder.
    """
    match method:
        case Method.LAYERED_POSITIVE:
            return layered_positive(F, G, cost)
        case Method.CONVEX_PAM:
            return positive_sorting_convex(F, G, cost)

    common, F_rem, G_rem = common_component(F, G)
    layers = decompose_layers(F_rem, G_rem)
    log.info("Solving %d layers (%d points) with %s recursion", len(layers), sum(len(l.points) for l in layers), method.label)

    if threads > 1 and len(layers) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda layer: solve_layer(layer, cost, method)[0], layers))
    else:
        results = [solve_layer(layer, cost, method)[0] for layer in layers]

    pairs = _diagonal(common)
    for result in results:
        pairs += result.pairs
    return Assignment.build(pairs, common.scale, cost)


def layered_positive(F: DiscreteDistribution, G: DiscreteDistribution, cost: MismatchCost) -> Assignment:
    """
    Pair the k-th worker with the k-th job inside every layer. Optimal once
    the cost exponent reaches zeta_threshold; this is not checked here.
    """
    common, F_rem, G_rem = common_component(F, G)
    pairs = _diagonal(common)
    for layer in decompose_layers(F_rem, G_rem):
        pairs += [(x, z, layer.mass) for x, z in zip(layer.workers, layer.jobs)]
    return Assignment.build(pairs, common.scale, cost)


def positive_sorting_convex(F: DiscreteDistribution, G: DiscreteDistribution, cost: MismatchCost) -> Assignment:
    """
    Quantile coupling: the k-th unit of worker mass goes to the k-th unit of
    job mass in skill order. Optimal for costs convex in the mismatch.
    """
    check_equal_mass(F, G)
    common, _, _ = common_component(F, G)
    scale = common.scale
    workers = [[x, m] for x, m in F.rescale(scale).atoms]
    jobs = [[z, m] for z, m in G.rescale(scale).atoms]

    pairs = []
    w = j = 0
    while w < len(workers) and j < len(jobs):
        mass = min(workers[w][1], jobs[j][1])
        pairs.append((workers[w][0], jobs[j][0], mass))
        workers[w][1] -= mass
        jobs[j][1] -= mass
        if workers[w][1] == 0:
            w += 1
        if jobs[j][1] == 0:
            j += 1
    return Assignment.build(pairs, scale, cost)


def _threshold_holds(zeta: float, small: np.ndarray, large: np.ndarray) -> bool:
    lhs = 2 ** (1 - zeta) * (large - small) ** zeta
    rhs = small ** zeta + large ** zeta
    return bool(np.all(lhs <= rhs * (1 + TIE_TOLERANCE)))


def zeta_threshold(F: DiscreteDistribution, G: DiscreteDistribution) -> float:
    """
    Smallest exponent from which layered positive sorting is optimal on
    this economy. With delta the smallest gap between mismatched skills,
    every pair of realized distances d < D with D - d > delta must satisfy
    2^(1-zeta) (D-d)^zeta <= d^zeta + D^zeta. Returns 0 when no pair
    constrains the exponent. The right side less the left grows with d, so
    only d = delta can bind.
    """
    _, F_rem, G_rem = common_component(F, G)
    support = sorted(set(F_rem.skills) | set(G_rem.skills))
    if len(support) < 2:
        return 0.0

    points = np.asarray(support, dtype=float)
    delta = float(np.min(np.diff(points)))
    distances = np.unique(np.subtract.outer(points, points))
    large = distances[distances - delta > delta]
    if large.size == 0:
        return 0.0
    small = np.full_like(large, delta)

    upper = 1.0
    steps = int(round(1 / ZETA_SCAN_STEP))
    for step in range(steps - 1, -1, -1):
        zeta = step * ZETA_SCAN_STEP
        if not _threshold_holds(zeta, small, large):
            lower = zeta
            break
        upper = zeta
    else:
        return 0.0

    while upper - lower > ZETA_PRECISION:
        middle = (lower + upper) / 2
        if _threshold_holds(middle, small, large):
            upper = middle
        else:
            lower = middle

    log.debug("Near-linear threshold %.6f from %d distances", upper, large.size)
    return upper
