"""
Mismatch cost functions and the production technology around them.

The closed form cost is rho * d ** zeta, with separate parameters for
underqualified workers (z > x, the "p" side) and overqualified workers
(x > z, the "k" side). It arises from firms investing gamma in technology
or amenities at a convex cost Psi(gamma); for general schedules Psi the
cost is the Legendre transform C(d) = min over gamma of gamma*d + Psi(gamma).
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
import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np
from scipy.optimize import minimize_scalar

from csort.errors import DomainError, InvalidCost, InvestmentUndefined

log = logging.getLogger(__name__)

# Indirect costs remembered per LegendreCost, per side
LEGENDRE_CACHE_SIZE = 1024


class MismatchCost(Protocol):
    """Anything that prices a (worker skill, job skill) pair"""
    def __call__(self, x: float, z: float) -> float: ...
    def pairwise(self, xs: Sequence[float], zs: Sequence[float]) -> np.ndarray: ...


@dataclass(frozen=True)
class PowerCostParams:
    """
    c(x, z) = rho_p * (z - x) ** zeta_p when z >= x,
              rho_k * (x - z) ** zeta_k otherwise.
    """
    zeta_p: float
    rho_p: float
    zeta_k: float
    rho_k: float

    def __post_init__(self):
        for name in ("zeta_p", "zeta_k"):
            value = getattr(self, name)
            if not 0 < value < 1:
                raise DomainError(f"{name} must lie strictly between 0 and 1, got {value}")
        for name in ("rho_p", "rho_k"):
            value = getattr(self, name)
            if not value > 0:
                raise DomainError(f"{name} must be positive, got {value}")

    @classmethod
    def symmetric(cls, zeta: float, rho: float = 1.0) -> "PowerCostParams":
        return cls(zeta, rho, zeta, rho)

    def __call__(self, x: float, z: float) -> float:
        if z >= x:
            return self.rho_p * (z - x) ** self.zeta_p
        return self.rho_k * (x - z) ** self.zeta_k

    def pairwise(self, xs: Sequence[float], zs: Sequence[float]) -> np.ndarray:
        """Matrix of c(xs[i], zs[j])"""
        diff = np.subtract.outer(np.asarray(zs, dtype=float), np.asarray(xs, dtype=float)).T
        under = self.rho_p * np.abs(diff) ** self.zeta_p
        over = self.rho_k * np.abs(diff) ** self.zeta_k
        return np.where(diff >= 0, under, over)

    def with_zeta(self, zeta: float) -> "PowerCostParams":
        """Same scale parameters, both exponents replaced"""
        return PowerCostParams(zeta, self.rho_p, zeta, self.rho_k)

    def to_json(self) -> dict:
        return {"zeta_p": self.zeta_p, "rho_p": self.rho_p, "zeta_k": self.zeta_k, "rho_k": self.rho_k}


@dataclass(frozen=True)
class TechnologyPrimitives:
    """Investment cost Psi(gamma) = (B / eta) * gamma ** -eta on each side"""
    B_p: float
    eta_p: float
    B_k: float
    eta_k: float

    def __post_init__(self):
        for name in ("B_p", "eta_p", "B_k", "eta_k"):
            value = getattr(self, name)
            if not value > 0 or not math.isfinite(value):
                raise DomainError(f"{name} must be positive and finite, got {value}")

    def psi_p(self, gamma: float) -> float:
        return self.B_p / self.eta_p * gamma ** -self.eta_p

    def psi_k(self, gamma: float) -> float:
        return self.B_k / self.eta_k * gamma ** -self.eta_k


def power_params_from_primitives(t: TechnologyPrimitives) -> PowerCostParams:
    """
    The Legendre transform of (B/eta) gamma^-eta is rho d^zeta with
    zeta = eta/(1+eta) and rho = B^(1/(1+eta)) / zeta.
    """
    zeta_p = t.eta_p / (1 + t.eta_p)
    zeta_k = t.eta_k / (1 + t.eta_k)
    return PowerCostParams(
        zeta_p=zeta_p,
        rho_p=t.B_p ** (1 / (1 + t.eta_p)) / zeta_p,
        zeta_k=zeta_k,
        rho_k=t.B_k ** (1 / (1 + t.eta_k)) / zeta_k,
    )


def mismatch_cost(params: MismatchCost, x: float, z: float) -> float:
    """Cost of employing a worker of skill x in a job of difficulty z"""
    return params(x, z)


def optimal_investment(t: TechnologyPrimitives, x: float, z: float) -> tuple[float, float]:
    """
    First order condition of min gamma*d + Psi(gamma): returns (gamma, Psi(gamma)).
    Technology is bought for underqualified workers, amenities for
    overqualified ones.
    """
    if x == z:
        raise InvestmentUndefined(f"Worker {x} matches job {z} exactly, no investment is needed")
    if z > x:
        gamma = ((z - x) / t.B_p) ** (-1 / (1 + t.eta_p))
        return gamma, t.psi_p(gamma)
    gamma = ((x - z) / t.B_k) ** (-1 / (1 + t.eta_k))
    return gamma, t.psi_k(gamma)


@dataclass(frozen=True)
class TabulatedFunction:
    """
    Nondecreasing function given by a table, linearly interpolated between
    knots. Evaluating outside the table is an error.
    """
    xs: tuple[float, ...]
    ys: tuple[float, ...]

    def __post_init__(self):
        if len(self.xs) != len(self.ys) or not self.xs:
            raise DomainError("A tabulated function needs matching, non-empty knot and value lists")
        if any(b <= a for a, b in zip(self.xs, self.xs[1:])):
            raise DomainError("Tabulated knots must be strictly increasing")
        if any(b < a for a, b in zip(self.ys, self.ys[1:])):
            raise DomainError("Tabulated values must be nondecreasing")

    @classmethod
    def identity(cls, lo: float, hi: float) -> "TabulatedFunction":
        if lo == hi:
            return cls((lo,), (lo,))
        return cls((lo, hi), (lo, hi))

    @classmethod
    def constant(cls, lo: float, hi: float, value: float = 0.0) -> "TabulatedFunction":
        if lo == hi:
            return cls((lo,), (value,))
        return cls((lo, hi), (value, value))

    @property
    def domain(self) -> tuple[float, float]:
        return self.xs[0], self.xs[-1]

    def __call__(self, x):
        values = np.asarray(x, dtype=float)
        lo, hi = self.domain
        if np.any(values < lo) or np.any(values > hi):
            raise DomainError(f"Skill {x} lies outside the tabulated domain [{lo}, {hi}]")
        result = np.interp(values, self.xs, self.ys)
        return float(result) if result.ndim == 0 else result

    def to_json(self) -> dict:
        return {"xs": list(self.xs), "ys": list(self.ys)}


@dataclass(frozen=True)
class ProductionSpec:
    """
    Output y(x, z) = g(x) + h(z) - c(x, z).
    """
    g: TabulatedFunction
    h: TabulatedFunction
    cost: MismatchCost

    @classmethod
    def identity(cls, skills: Sequence[float], cost: MismatchCost) -> "ProductionSpec":
        """g = h = identity over the range of skills"""
        lo, hi = min(skills), max(skills)
        return cls(TabulatedFunction.identity(lo, hi), TabulatedFunction.identity(lo, hi), cost)


def effective_output(spec: ProductionSpec, x: float, z: float) -> float:
    return spec.g(x) + spec.h(z) - spec.cost(x, z)


@dataclass
class LegendreCost:
    """
    C(d) = min over gamma > 0 of gamma*d + Psi(gamma), for a strictly convex,
    strictly decreasing investment cost Psi. psi_k defaults to psi_p.

    The minimum is located on a log spaced grid over gamma_bounds, then
    refined by golden section search in log(gamma).
    """
    psi_p: Callable[[float], float]
    psi_k: Callable[[float], float]|None = None
    gamma_bounds: tuple[float, float] = (1e-6, 1e6)
    tol: float = 1e-10
    samples: int = 241
    _indirect: Callable[[bool, float], float]|None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.psi_k is None:
            self.psi_k = self.psi_p
        lo, hi = self.gamma_bounds
        if not 0 < lo < hi:
            raise DomainError(f"gamma_bounds must satisfy 0 < lo < hi, got {self.gamma_bounds}")
        self._log_grid = np.linspace(math.log(lo), math.log(hi), self.samples)
        self._grid = np.exp(self._log_grid)
        self._check_convex(self.psi_p, "psi_p")
        if self.psi_k is not self.psi_p:
            self._check_convex(self.psi_k, "psi_k")
        self._indirect = functools.lru_cache(maxsize=LEGENDRE_CACHE_SIZE)(self._solve)

    def _check_convex(self, psi: Callable[[float], float], name: str):
        values = np.array([psi(gamma) for gamma in self._grid], dtype=float)
        if not np.all(np.isfinite(values)):
            raise InvalidCost(f"{name} is not finite on the gamma grid")
        slopes = np.diff(values) / np.diff(self._grid)
        if np.any(slopes >= 0):
            raise InvalidCost(f"{name} is not strictly decreasing on the gamma grid")
        if np.any(np.diff(slopes) <= 0):
            raise InvalidCost(f"{name} is not strictly convex on the gamma grid")

    def _minimize(self, psi: Callable[[float], float], d: float) -> float:
        def objective(t: float) -> float:
            gamma = math.exp(t)
            return gamma * d + psi(gamma)

        coarse = [objective(t) for t in self._log_grid]
        i = int(np.argmin(coarse))
        if i == 0 or i == len(coarse) - 1:
            raise InvalidCost(f"Optimal investment for mismatch {d} lies outside gamma_bounds {self.gamma_bounds}")

        bracket = (self._log_grid[i - 1], self._log_grid[i], self._log_grid[i + 1])
        result = minimize_scalar(objective, bracket=bracket, method="golden", tol=self.tol)
        return min(float(result.fun), coarse[i])

    def _solve(self, underqualified: bool, d: float) -> float:
        return self._minimize(self.psi_p if underqualified else self.psi_k, d)

    def cache_info(self):
        """Hits, misses and size of the indirect cost cache"""
        return self._indirect.cache_info()

    def __call__(self, x: float, z: float) -> float:
        if z >= x:
            return legendre_cost(self, z - x)
        return legendre_cost(self, x - z, underqualified=False)

    def pairwise(self, xs: Sequence[float], zs: Sequence[float]) -> np.ndarray:
        return np.array([[self(x, z) for z in zs] for x in xs], dtype=float)


def legendre_cost(L: LegendreCost, d: float, underqualified: bool = True) -> float:
    """Indirect cost of a mismatch of size d >= 0"""
    if d < 0:
        raise DomainError(f"Mismatch must be non-negative, got {d}")
    if d == 0:
        return 0.0

    return L._indirect(underqualified, float(d)) # pylint: disable=protected-access
