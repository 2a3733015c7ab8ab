"""
Finite atomic measures of worker skills and job difficulties.

Masses are kept as integers over a positive integer scale, so the true mass
of an atom is mass/scale. Two measures are compared after rescaling both to
the least common multiple of their scales, which keeps layer boundaries
exact.
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
import bisect
import csv
import logging
import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from fractions import Fraction

from csort.errors import InputError, MassMismatch, PreconditionViolated

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DiscreteDistribution:
    """
    Atoms are (skill, mass) with strictly increasing skills and positive
    integer masses. The empty distribution has no atoms.
    """
    atoms: tuple[tuple[float, int], ...]
    scale: int = 1

    def __post_init__(self):
        if not isinstance(self.scale, int) or self.scale <= 0:
            raise PreconditionViolated(f"Scale must be a positive integer, got {self.scale!r}")
        previous = None
        for skill, mass in self.atoms:
            if not isinstance(mass, int) or mass <= 0:
                raise PreconditionViolated(f"Atom at skill {skill} has non-positive or non-integer mass {mass!r}")
            if not math.isfinite(skill):
                raise PreconditionViolated(f"Skill {skill} is not finite")
            if previous is not None and skill <= previous:
                raise PreconditionViolated("Atom skills must be strictly increasing")
            previous = skill

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, int]]|Mapping[float, int], scale: int = 1, merge_tol: float = 0.0) -> "DiscreteDistribution":
        """
        Build from unsorted (skill, mass) pairs. Repeated skills are summed and
        zero masses dropped. With merge_tol > 0, skills within merge_tol of the
        first skill of a run are merged onto it.
        """
        if isinstance(pairs, Mapping):
            pairs = pairs.items()

        merged: list[list] = []
        for skill, mass in sorted((float(s), int(m)) for s, m in pairs):
            if mass < 0:
                raise PreconditionViolated(f"Negative mass {mass} at skill {skill}")
            if merged and skill - merged[-1][0] <= merge_tol:
                merged[-1][1] += mass
            else:
                merged.append([skill, mass])

        return cls(tuple((skill, mass) for skill, mass in merged if mass > 0), scale)

    @classmethod
    def from_fractions(cls, pairs: Iterable[tuple[float, Fraction]]|Mapping[float, Fraction]) -> "DiscreteDistribution":
        """Build from exact rational masses, using the lcm of denominators as scale"""
        if isinstance(pairs, Mapping):
            pairs = pairs.items()
        pairs = [(skill, Fraction(mass)) for skill, mass in pairs]
        scale = math.lcm(*(mass.denominator for _, mass in pairs)) if pairs else 1
        return cls.from_pairs(((skill, int(mass * scale)) for skill, mass in pairs), scale)

    @property
    def skills(self) -> list[float]:
        return [skill for skill, _ in self.atoms]

    @property
    def masses(self) -> list[int]:
        return [mass for _, mass in self.atoms]

    @property
    def total(self) -> int:
        """Total integer mass at the current scale"""
        return sum(self.masses)

    @property
    def true_total(self) -> Fraction:
        return Fraction(self.total, self.scale)

    def is_empty(self) -> bool:
        return not self.atoms

    def as_dict(self) -> dict[float, int]:
        return dict(self.atoms)

    def mass_at(self, skill: float) -> int:
        """Integer mass of the atom at skill, 0 if there is none"""
        index = bisect.bisect_left(self.skills, skill)
        if index < len(self.atoms) and self.atoms[index][0] == skill:
            return self.atoms[index][1]
        return 0

    def cdf(self, skill: float) -> int:
        """Integer mass at or below skill"""
        index = bisect.bisect_right(self.skills, skill)
        return sum(self.masses[:index])

    def cdf_below(self, skill: float) -> int:
        """Integer mass strictly below skill"""
        index = bisect.bisect_left(self.skills, skill)
        return sum(self.masses[:index])

    def rescale(self, scale: int) -> "DiscreteDistribution":
        """Express the same measure over a larger scale, which must be a multiple of the current one"""
        if scale % self.scale != 0:
            raise PreconditionViolated(f"Cannot rescale from {self.scale} to {scale}")
        factor = scale // self.scale
        return DiscreteDistribution(tuple((skill, mass * factor) for skill, mass in self.atoms), scale)

    def __add__(self, other: "DiscreteDistribution") -> "DiscreteDistribution":
        a, b = align(self, other)
        masses = a.as_dict()
        for skill, mass in b.atoms:
            masses[skill] = masses.get(skill, 0) + mass
        return DiscreteDistribution.from_pairs(masses, a.scale)

    def __sub__(self, other: "DiscreteDistribution") -> "DiscreteDistribution":
        a, b = align(self, other)
        masses = a.as_dict()
        for skill, mass in b.atoms:
            remaining = masses.get(skill, 0) - mass
            if remaining < 0:
                raise PreconditionViolated(f"Subtraction leaves negative mass at skill {skill}")
            masses[skill] = remaining
        return DiscreteDistribution.from_pairs(masses, a.scale)

    def to_json(self) -> dict:
        return {
            "scale": self.scale,
            "atoms": [{"skill": skill, "mass": mass} for skill, mass in self.atoms],
        }

    @classmethod
    def from_json(cls, data: dict) -> "DiscreteDistribution":
        try:
            return cls.from_pairs(((atom["skill"], atom["mass"]) for atom in data["atoms"]), int(data.get("scale", 1)))
        except (KeyError, TypeError, ValueError) as e:
            raise InputError(f"Malformed distribution: missing or invalid field {e}") from e


@dataclass(frozen=True)
class StepFunction:
    """
    Right-continuous piecewise constant function, 0 below the first
    breakpoint. Values are integer masses over scale.
    """
    breakpoints: tuple[tuple[float, int], ...]
    scale: int = 1

    def __call__(self, skill: float) -> int:
        index = bisect.bisect_right([s for s, _ in self.breakpoints], skill)
        if index == 0:
            return 0
        return self.breakpoints[index - 1][1]

    @property
    def skills(self) -> list[float]:
        return [skill for skill, _ in self.breakpoints]

    @property
    def values(self) -> list[int]:
        return [value for _, value in self.breakpoints]

    def jumps(self) -> list[tuple[float, int, int]]:
        """(skill, value before, value after) at every breakpoint"""
        result = []
        previous = 0
        for skill, value in self.breakpoints:
            result.append((skill, previous, value))
            previous = value
        return result

    def __neg__(self) -> "StepFunction":
        return StepFunction(tuple((skill, -value) for skill, value in self.breakpoints), self.scale)


def align(F: DiscreteDistribution, G: DiscreteDistribution) -> tuple[DiscreteDistribution, DiscreteDistribution]:
    """Rescale both distributions to the lcm of their scales"""
    scale = math.lcm(F.scale, G.scale)
    return F.rescale(scale), G.rescale(scale)


def check_equal_mass(F: DiscreteDistribution, G: DiscreteDistribution):
    """Raise MassMismatch unless F and G carry the same true mass"""
    if F.true_total != G.true_total:
        raise MassMismatch(f"Workers carry mass {F.true_total} but jobs carry {G.true_total}")


def common_component(F: DiscreteDistribution, G: DiscreteDistribution) -> tuple[DiscreteDistribution, DiscreteDistribution, DiscreteDistribution]:
    """
    Split F and G into the mass both share at identical skills and the
    remainders, which have disjoint supports. Returns (common, F_rem, G_rem).
    """
    check_equal_mass(F, G)
    F, G = align(F, G)
    jobs = G.as_dict()
    common = DiscreteDistribution.from_pairs(((skill, min(mass, jobs.get(skill, 0))) for skill, mass in F.atoms), F.scale)
    return common, F - common, G - common


def underqualification(F: DiscreteDistribution, G: DiscreteDistribution) -> StepFunction:
    """
    H = F - G as cumulative integer masses, evaluated at the union of
    supports. Breakpoints where H does not change are dropped.
    """
    check_equal_mass(F, G)
    F, G = align(F, G)
    workers = F.as_dict()
    jobs = G.as_dict()

    breakpoints = []
    value = 0
    for skill in sorted(set(workers) | set(jobs)):
        step = workers.get(skill, 0) - jobs.get(skill, 0)
        if step == 0:
            continue
        value += step
        breakpoints.append((skill, value))

    if value != 0:
        raise MassMismatch("Underqualification measure does not return to zero")
    return StepFunction(tuple(breakpoints), F.scale)


def read_csv(path: str) -> DiscreteDistribution:
    """
    Read a `skill,mass` file with a header row. Decimal masses are made
    exact and share a scale across the file.
    """
    pairs: list[tuple[float, Fraction]] = []
    try:
        with open(path, "r", encoding="utf-8", newline="") as f:
            reader = csv.DictReader(f)
            if reader.fieldnames is None or "skill" not in reader.fieldnames or "mass" not in reader.fieldnames:
                raise InputError(f"{path}: header must contain the columns 'skill' and 'mass'")
            for line, row in enumerate(reader, start=2):
                try:
                    skill = float(row["skill"])
                except (TypeError, ValueError) as e:
                    raise InputError(f"{path}:{line}: field 'skill' is not a number: {row['skill']!r}") from e
                try:
                    mass = Fraction(row["mass"].strip())
                except (AttributeError, ValueError, ZeroDivisionError) as e:
                    raise InputError(f"{path}:{line}: field 'mass' is not a decimal number: {row['mass']!r}") from e
                if not math.isfinite(skill):
                    raise InputError(f"{path}:{line}: field 'skill' must be finite")
                if mass < 0:
                    raise InputError(f"{path}:{line}: field 'mass' must not be negative")
                pairs.append((skill, mass))
    except OSError as e:
        raise InputError(f"Cannot read {path}: {e.strerror}") from e
    except UnicodeDecodeError as e:
        raise InputError(f"{path}: not UTF-8 text (byte {e.start})") from e

    distribution = DiscreteDistribution.from_fractions(pairs)
    log.debug("Read %d atoms from %s (scale %d)", len(distribution.atoms), path, distribution.scale)
    return distribution


def write_csv(path: str, distribution: DiscreteDistribution):
    """Write a distribution as `skill,mass` with true (possibly fractional) masses"""
    try:
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["skill", "mass"])
            for skill, mass in distribution.atoms:
                writer.writerow([repr(skill), str(Fraction(mass, distribution.scale))])
    except OSError as e:
        raise InputError(f"Cannot write {path}: {e.strerror}") from e
