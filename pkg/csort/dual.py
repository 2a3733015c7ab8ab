"""
Equilibrium wages and firm values from an optimal assignment.

The potential phi is first built on mismatched skills pair by pair, from
the innermost pairs outwards: each pair's direct subpairs are level
shifted against each other by a small difference-constraint system, then
the pair's own endpoints are placed. The result is extended to perfectly
matched skills by c-transforms. Wages are w = g - phi and firm values
v = h - psi with psi = -phi.
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
from dataclasses import dataclass, field

import numpy as np

from csort.cost import MismatchCost, ProductionSpec
from csort.distributions import DiscreteDistribution
from csort.enums import TOLERANCE
from csort.errors import InternalInvariantViolation, InvalidAssignment
from csort.solver import Assignment

log = logging.getLogger(__name__)


@dataclass
class SubpairNode:
    """An off-diagonal assignment pair and the pairs directly nested inside it"""
    x: float
    z: float
    children: list["SubpairNode"] = field(default_factory=list)

    @property
    def lo(self) -> float:
        return min(self.x, self.z)

    @property
    def hi(self) -> float:
        return max(self.x, self.z)

    def contains(self, other: "SubpairNode") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def to_json(self) -> dict:
        return {"x": self.x, "z": self.z, "children": [child.to_json() for child in self.children]}


@dataclass
class SubpairForest:
    """Maximal pairs, each with its nested subpairs ordered by left endpoint"""
    roots: list[SubpairNode]

    def post_order(self) -> list[SubpairNode]:
        """Every node after all of its descendants"""
        order = []
        stack = [(root, False) for root in reversed(self.roots)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            stack.append((node, True))
            stack.extend((child, False) for child in reversed(node.children))
        return order

    def __len__(self) -> int:
        return len(self.post_order())


@dataclass
class BetaSystem:
    """
    Level shifts between the p direct subpairs of a pair: for n < m,
    L[n, m] <= beta_(n+1) + ... + beta_m <= U[n, m]. solution holds
    beta_2 ... beta_p.
    """
    p: int
    L: dict[tuple[int, int], float]
    U: dict[tuple[int, int], float]
    solution: list[float] = field(default_factory=list)

    def prefix(self) -> list[float]:
        """S_1 ... S_p with S_1 = 0 and S_m = beta_2 + ... + beta_m"""
        sums = [0.0]
        for beta in self.solution:
            sums.append(sums[-1] + beta)
        return sums

    def violations(self, tol: float = TOLERANCE) -> list[tuple[int, int]]:
        S = self.prefix()
        return [(n, m) for (n, m), lower in self.L.items()
                if not lower - tol <= S[m - 1] - S[n - 1] <= self.U[(n, m)] + tol]


@dataclass
class DualSolution:
    """
    Potential phi on every skill of the economy, psi = -phi, wages
    w = g - phi and firm values v = h - psi.
    """
    phi: dict[float, float]
    psi: dict[float, float]
    w: dict[float, float]
    v: dict[float, float]

    def dual_value(self, F: DiscreteDistribution, G: DiscreteDistribution) -> float:
        """Sum of w dF + v dG"""
        total = sum(mass * self.w[x] for x, mass in F.atoms) / F.scale
        return total + sum(mass * self.v[z] for z, mass in G.atoms) / G.scale

    def to_json(self) -> dict:
        def keyed(values: dict[float, float]) -> dict[str, float]:
            return {repr(skill): values[skill] for skill in sorted(values)}
        return {"phi": keyed(self.phi), "w": keyed(self.w), "v": keyed(self.v)}


def find_crossing(intervals: list[tuple[float, float]]) -> tuple[int, int]|None:
    """Indices of two partially overlapping closed intervals, or None"""
    if len(intervals) < 2:
        return None
    lo = np.array([a for a, _ in intervals])
    hi = np.array([b for _, b in intervals])
    crossing = (lo[:, None] < lo[None, :]) & (lo[None, :] < hi[:, None]) & (hi[:, None] < hi[None, :])
    hits = np.argwhere(crossing)
    if len(hits) == 0:
        return None
    return int(hits[0][0]), int(hits[0][1])


def build_subpair_forest(assignment: Assignment) -> SubpairForest:
    """
    Arrange the distinct off-diagonal pairs so that each pair's children
    are the pairs directly nested inside it. Intervals may share endpoints
    but never partially overlap.
    """
    nodes = [SubpairNode(x, z) for x, z in sorted({(x, z) for x, z, _ in assignment.off_diagonal})]

    workers = {node.x for node in nodes}
    jobs = {node.z for node in nodes}
    if workers & jobs:
        raise InvalidAssignment(f"Skills {sorted(workers & jobs)} are both mismatched workers and mismatched jobs")

    crossing = find_crossing([(node.lo, node.hi) for node in nodes])
    if crossing:
        a, b = nodes[crossing[0]], nodes[crossing[1]]
        raise InvalidAssignment(f"Pairs ({a.x}, {a.z}) and ({b.x}, {b.z}) intersect")

    nodes.sort(key=lambda node: (node.lo, -node.hi))

    roots: list[SubpairNode] = []
    stack: list[SubpairNode] = []
    for node in nodes:
        while stack and not stack[-1].contains(node):
            stack.pop()
        if stack:
            stack[-1].children.append(node)
        else:
            roots.append(node)
        stack.append(node)

    return SubpairForest(roots)


def beta_bounds(children: list[SubpairNode], cost: MismatchCost, parent: SubpairNode|None = None) -> BetaSystem:
    """
    Bounds on partial sums of level shifts between consecutive subpairs.
    Without a parent pair only the branches between subpairs apply.
    """
    p = len(children)
    xs = [child.x for child in children]
    zs = [child.z for child in children]
    c = cost.pairwise(xs, zs)

    if parent is not None:
        c00 = cost(parent.x, parent.z)
        to_parent_job = [cost(x, parent.z) for x in xs]
        from_parent_worker = [cost(parent.x, z) for z in zs]

    L, U = {}, {}
    for n in range(p):
        for m in range(n + 1, p):
            lower = -c[m, n]
            upper = c[n, m]
            if parent is not None:
                lower = max(c00 - from_parent_worker[n] - to_parent_job[m], lower)
                upper = min(from_parent_worker[m] + to_parent_job[n] - c00, upper)
            L[(n + 1, m + 1)] = lower + c[n, n]
            U[(n + 1, m + 1)] = upper - c[m, m]
    return BetaSystem(p, L, U)


def _longest_paths(system: BetaSystem, tol: float = TOLERANCE) -> list[float]:
    """
    Least prefix sums S_2 ... S_p with S_1 = 0 by Bellman-Ford longest paths
    from node 1, over edges n -> m weighted L and m -> n weighted -U.
    """
    edges = []
    for (n, m), lower in system.L.items():
        edges.append((n, m, lower))
        edges.append((m, n, -system.U[(n, m)]))

    dist = [-np.inf] * (system.p + 1)
    dist[1] = 0.0
    for _ in range(system.p - 1):
        changed = False
        for u, v, weight in edges:
            if dist[u] + weight > dist[v]:
                dist[v] = dist[u] + weight
                changed = True
        if not changed:
            break

    for u, v, weight in edges:
        if dist[u] + weight > dist[v] + tol:
            raise InternalInvariantViolation("Level shift system is infeasible: the assignment is not optimal")
    if abs(dist[1]) > tol:
        raise InternalInvariantViolation("Level shift system is infeasible: the assignment is not optimal")
    return dist[1:]


def solve_beta_system(children: list[SubpairNode], cost: MismatchCost, parent: SubpairNode|None = None) -> BetaSystem:
    """
    Lexicographically smallest (beta_2, ..., beta_p). The longest path
    solution is the least solution in every prefix sum at once, so fixing
    S_2, then S_3 and so on yields the same vector as a single pass.
    """
    system = beta_bounds(children, cost, parent)
    if system.p < 2:
        return system

    S = _longest_paths(system)
    system.solution = [S[m] - S[m - 1] for m in range(1, system.p)]

    bad = system.violations()
    if bad:
        raise InternalInvariantViolation(f"Level shifts violate their bounds for subpair ranges {bad}")
    return system


def _join(children: list[SubpairNode], potentials: dict[int, dict[float, float]], cost: MismatchCost, parent: SubpairNode|None) -> dict[float, float]:
    """Shift the children's potentials so consecutive subpairs differ by beta"""
    if len(children) == 1:
        return potentials.pop(id(children[0]))

    S = solve_beta_system(children, cost, parent).prefix()
    last = children[-1]
    anchor = potentials[id(last)][last.x]

    phi: dict[float, float] = {}
    for i, child in enumerate(children):
        local = potentials.pop(id(child))
        shift = S[-1] - S[i] + anchor - local[child.x]
        for skill, value in local.items():
            phi[skill] = value + shift
    return phi


def local_potentials(forest: SubpairForest, cost: MismatchCost) -> dict[float, float]:
    """
    phi on every mismatched skill, with phi(x) - phi(z) <= c(x, z) between
    mismatched workers and jobs and equality on every pair of the forest.
    """
    potentials: dict[int, dict[float, float]] = {}

    for node in forest.post_order():
        c00 = cost(node.x, node.z)
        if not node.children:
            potentials[id(node)] = {node.z: 0.0, node.x: c00}
            continue

        children = node.children
        phi = _join(children, potentials, cost, node)
        if any(child.x == node.x for child in children):
            phi[node.z] = min(phi[child.z] + cost(node.x, child.z) for child in children) - c00
        else:
            phi[node.z] = max(phi[child.x] - cost(child.x, node.z) for child in children)
        phi[node.x] = phi[node.z] + c00
        potentials[id(node)] = phi

    if not forest.roots:
        return {}
    return _join(forest.roots, potentials, cost, None)


def _min_transform(C: np.ndarray, values: np.ndarray, axis: int) -> np.ndarray:
    """min over axis of C - values, with values broadcast along that axis"""
    if axis == 0:
        return np.min(C - values[:, None], axis=0)
    return np.min(C - values[None, :], axis=1)


def extend_duals(phi_mismatched: dict[float, float], assignment: Assignment, spec: ProductionSpec, normalize: bool = True) -> DualSolution:
    """
    Extend phi from the mismatched workers I and jobs J to every skill of
    the economy through successive c-transforms, then to the perfectly
    matched skills K. With normalize, phi is shifted so its largest value
    on worker skills is 0, which keeps every wage at or above g.
    """
    cost = spec.cost
    I = sorted({x for x, _, _ in assignment.off_diagonal})
    J = sorted({z for _, z, _ in assignment.off_diagonal})
    F, G = assignment.marginals()
    S = sorted(set(F.skills) | set(G.skills))
    IJ = sorted(set(I) | set(J))
    K = [s for s in S if s not in set(IJ)]

    missing = [s for s in IJ if s not in phi_mismatched]
    if missing:
        raise InvalidAssignment(f"No potential was built for mismatched skills {missing}")

    phi: dict[float, float] = {}
    if IJ:
        phi_I = np.array([phi_mismatched[x] for x in I])
        C_IJ = cost.pairwise(I, J)
        phi_I = _min_transform(C_IJ, _min_transform(C_IJ, phi_I, axis=0), axis=1)

        psi_tilde = _min_transform(cost.pairwise(I, IJ), phi_I, axis=0)
        phi_hat = _min_transform(cost.pairwise(IJ, IJ), psi_tilde, axis=1)
        psi_hat = _min_transform(cost.pairwise(IJ, J), phi_hat, axis=0)

        position = {s: index for index, s in enumerate(IJ)}
        for x in I:
            phi[x] = float(phi_hat[position[x]])
        for index, z in enumerate(J):
            phi[z] = -float(psi_hat[index])

        if K:
            psi_IJ = -np.array([phi[s] for s in IJ])
            phi_K = _min_transform(cost.pairwise(K, IJ), psi_IJ, axis=1)
            for index, s in enumerate(K):
                phi[s] = float(phi_K[index])
    else:
        phi = {s: 0.0 for s in K}

    if normalize and F.skills:
        top = max(phi[x] for x in F.skills)
        phi = {s: value - top for s, value in phi.items()}

    g = spec.g(S)
    h = spec.h(S)
    w = {s: float(g[i]) - phi[s] for i, s in enumerate(S)}
    v = {s: float(h[i]) + phi[s] for i, s in enumerate(S)}
    psi = {s: -phi[s] for s in S}
    return DualSolution(phi, psi, w, v)


def dual_from_assignment(assignment: Assignment, spec: ProductionSpec, normalize: bool = True) -> DualSolution:
    """Forest, local potentials and extension in one step"""
    forest = build_subpair_forest(assignment)
    phi = local_potentials(forest, spec.cost)
    log.debug("Built local potentials on %d mismatched skills from %d pairs", len(phi), len(forest))
    return extend_duals(phi, assignment, spec, normalize)
