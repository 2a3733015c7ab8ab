"""
Slice the mismatched part of an economy into independent layers.

Each band between consecutive values of the underqualification measure H
collects the skills where H passes through it: rising skills are workers,
falling skills are jobs. The resulting points alternate between the two
sides and carry the same mass, the height of the band.
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
from dataclasses import dataclass

from csort.distributions import DiscreteDistribution, align, check_equal_mass, underqualification
from csort.enums import Side
from csort.errors import InternalInvariantViolation, PreconditionViolated

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Layer:
    """
    Alternating worker/job points, each carrying `mass` units over `scale`.
    level_interval is the band (lo, hi] of H in integer units.
    """
    mass: int
    points: tuple[tuple[float, Side], ...]
    level_interval: tuple[int, int]
    scale: int = 1

    def __post_init__(self):
        if self.mass <= 0:
            raise PreconditionViolated(f"Layer mass must be positive, got {self.mass}")
        skills = self.skills
        if any(b <= a for a, b in zip(skills, skills[1:])):
            raise PreconditionViolated("Layer skills must be strictly increasing")
        sides = self.sides
        if any(a == b for a, b in zip(sides, sides[1:])):
            raise PreconditionViolated("Layer points must alternate between workers and jobs")
        if len(self.points) % 2:
            raise PreconditionViolated("Layer must hold as many workers as jobs")

    @property
    def skills(self) -> list[float]:
        return [skill for skill, _ in self.points]

    @property
    def sides(self) -> list[Side]:
        return [side for _, side in self.points]

    @property
    def workers(self) -> list[float]:
        return [skill for skill, side in self.points if side == Side.WORKER]

    @property
    def jobs(self) -> list[float]:
        return [skill for skill, side in self.points if side == Side.JOB]

    @property
    def n(self) -> int:
        """Number of workers (equal to the number of jobs)"""
        return len(self.points) // 2

    def measures(self) -> tuple[DiscreteDistribution, DiscreteDistribution]:
        """Worker and job measures of this layer"""
        return (
            DiscreteDistribution.from_pairs(((x, self.mass) for x in self.workers), self.scale),
            DiscreteDistribution.from_pairs(((z, self.mass) for z in self.jobs), self.scale),
        )

    def to_json(self) -> dict:
        return {
            "mass": self.mass,
            "scale": self.scale,
            "points": [{"skill": skill, "side": side.label} for skill, side in self.points],
            "band": list(self.level_interval),
        }


def _crossing(jumps: list[tuple[float, int, int]], lo: int, hi: int) -> tuple[tuple[float, Side], ...]:
    points = []
    for skill, before, after in jumps:
        if before <= lo and after >= hi:
            points.append((skill, Side.WORKER))
        elif after <= lo and before >= hi:
            points.append((skill, Side.JOB))
    return tuple(points)


def decompose_layers(F_rem: DiscreteDistribution, G_rem: DiscreteDistribution) -> list[Layer]:
    """
    Split F_rem, G_rem (disjoint supports, equal mass) into layers whose
    measures sum back to F_rem and G_rem. Adjacent bands with the same
    points are merged into one layer.
    """
    check_equal_mass(F_rem, G_rem)
    F_rem, G_rem = align(F_rem, G_rem)
    shared = set(F_rem.skills) & set(G_rem.skills)
    if shared:
        raise PreconditionViolated(f"Worker and job supports overlap at skills {sorted(shared)}")

    H = underqualification(F_rem, G_rem)
    jumps = H.jumps()
    levels = sorted(set(H.values) | {0})

    bands: list[tuple[int, int, tuple]] = []
    for lo, hi in zip(levels, levels[1:]):
        points = _crossing(jumps, lo, hi)
        if not points:
            continue
        if bands and bands[-1][1] == lo and bands[-1][2] == points:
            bands[-1] = (bands[-1][0], hi, points)
        else:
            bands.append((lo, hi, points))

    try:
        layers = [Layer(hi - lo, points, (lo, hi), F_rem.scale) for lo, hi, points in bands]
    except PreconditionViolated as e:
        raise InternalInvariantViolation(f"Layer construction produced an invalid layer: {e}") from e

    log.debug("Decomposed %d mismatched atoms into %d layers", len(jumps), len(layers))
    return layers
