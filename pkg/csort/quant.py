"""
Synthetic economies, wage calibration and within-job wage dispersion.

Occupations are job skills, or labelled bins of job skills read from a
map. For every occupation the wages of the workers assigned to it give a
mean and a variance of log wages; segments of occupations ranked by mean
wage are compared against data moments when those are supplied.
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
import csv
import json
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from csort.config import DEFAULT_RHO, DEFAULT_ZETA
from csort.cost import PowerCostParams, ProductionSpec, TabulatedFunction
from csort.distributions import DiscreteDistribution, check_equal_mass
from csort.dual import DualSolution
from csort.enums import DistributionKind
from csort.errors import CalibrationError, DomainError, InputError, ParamError
from csort.solver import Assignment

log = logging.getLogger(__name__)

# Rank intervals of occupations ordered by mean wage: all, bottom fifth, middle, top fifth
DEFAULT_SEGMENTS = ((0.0, 1.0), (0.0, 0.2), (0.2, 0.8), (0.8, 1.0))

# Illustrative earnings percentiles in thousands of dollars. Only the bottom
# and the median are anchored to published wage levels; the rest is smoothed.
DEFAULT_WAGE_PERCENTILES = (
    (0.0, 16.0),
    (0.1, 21.0),
    (0.2, 27.0),
    (0.3, 33.0),
    (0.4, 40.0),
    (0.5, 47.0),
    (0.6, 55.0),
    (0.7, 65.0),
    (0.8, 80.0),
    (0.9, 105.0),
    (1.0, 213.0),
)


@dataclass(frozen=True)
class EconomyFixture:
    """Workers, jobs and the technology pricing them"""
    F: DiscreteDistribution
    G: DiscreteDistribution
    spec: ProductionSpec
    label: str

    def __post_init__(self):
        check_equal_mass(self.F, self.G)


@dataclass(frozen=True)
class Segment:
    """Half-open interval [lo, hi) of skills holding `count` unit atoms"""
    lo: float
    hi: float
    count: int
    anchor: str = "left"

    def skills(self) -> list[float]:
        if self.count <= 0 or self.hi <= self.lo:
            raise ParamError(f"Segment [{self.lo}, {self.hi}] needs a positive width and atom count")
        if self.anchor not in ("left", "right"):
            raise ParamError(f"Segment anchor must be 'left' or 'right', got {self.anchor!r}")
        offset = 0 if self.anchor == "left" else 1
        lo, width = Fraction(self.lo), Fraction(self.hi) - Fraction(self.lo)
        return [float(lo + width * (k + offset) / self.count) for k in range(self.count)]


@dataclass
class OccupationMoments:
    """Log-wage moments of the workers employed in one occupation"""
    label: str
    jobs: list[float]
    mean_wage: float
    mean_log_wage: float
    var_log_wage: float
    abs_dev_log_wage: float
    employment_share: float
    worker_types: int
    rank: float = 0.0

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "jobs": self.jobs,
            "rank": self.rank,
            "mean_wage": self.mean_wage,
            "mean_log_wage": self.mean_log_wage,
            "var_log_wage": self.var_log_wage,
            "abs_dev_log_wage": self.abs_dev_log_wage,
            "employment_share": self.employment_share,
            "worker_types": self.worker_types,
        }


@dataclass
class SegmentMoments:
    """Employment-weighted model moments in a rank interval, and their share of the data"""
    lo: float
    hi: float
    model_sq: float
    model_abs: float
    explained_sq: float|None = None
    explained_abs: float|None = None

    def to_json(self) -> dict:
        return {
            "segment": [self.lo, self.hi],
            "model_sq": self.model_sq,
            "model_abs": self.model_abs,
            "explained_sq": self.explained_sq,
            "explained_abs": self.explained_abs,
        }


@dataclass
class DispersionReport:
    per_job: list[OccupationMoments] = field(default_factory=list)
    segments: list[SegmentMoments] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "per_job": [occupation.to_json() for occupation in self.per_job],
            "segments": [segment.to_json() for segment in self.segments],
        }

    def plot_rows(self) -> list[tuple[float, float, float, float]]:
        """(occupation_rank, mean_wage, var_log_wage, employment_share) sorted by rank"""
        return [(o.rank, o.mean_wage, o.var_log_wage, o.employment_share) for o in sorted(self.per_job, key=lambda o: o.rank)]

    def write_plot_csv(self, path: str):
        try:
            with open(path, "w", encoding="utf-8", newline="") as f:
                writer = csv.writer(f)
                writer.writerow(["occupation_rank", "mean_wage", "var_log_wage", "employment_share"])
                writer.writerows(self.plot_rows())
        except OSError as e:
            raise InputError(f"Cannot write {path}: {e.strerror}") from e


def _exact(p, precision: int|None) -> Fraction:
    if isinstance(p, Fraction):
        result = p
    elif isinstance(p, str):
        try:
            result = Fraction(p)
        except ValueError as e:
            raise ParamError(f"Parameter {p!r} is not a number") from e
    elif isinstance(p, int):
        result = Fraction(p)
    elif precision is None:
        raise ParamError(f"Parameter {p} is not exact; pass a fraction or a precision (largest denominator)")
    else:
        result = Fraction(p).limit_denominator(precision)
    return result


def _exact_probability(p, precision: int|None) -> Fraction:
    result = _exact(p, precision)
    if not 0 <= result <= 1:
        raise ParamError(f"Probability {result} must lie in [0, 1]")
    return result


def _binomial(n: int, p: Fraction) -> dict[float, Fraction]:
    return {float(k): math.comb(n, k) * p ** k * (1 - p) ** (n - k) for k in range(n + 1)}


def reflecting_binomial(n: int, p, precision: int|None = None) -> tuple[DiscreteDistribution, DiscreteDistribution]:
    """Workers B(n, p) and jobs B(n, 1 - p) on skills 0..n"""
    if n < 1:
        raise ParamError(f"n must be at least 1, got {n}")
    p = _exact_probability(p, precision)
    if not 0 < p < 1:
        raise ParamError(f"p must lie strictly between 0 and 1, got {p}")
    return DiscreteDistribution.from_fractions(_binomial(n, p)), DiscreteDistribution.from_fractions(_binomial(n, 1 - p))


def binomial_mixture(n: int, p, p_hat, ratio=3, precision: int|None = None) -> tuple[DiscreteDistribution, DiscreteDistribution]:
    """
    Workers ratio:1 mixture of B(n, p) and B(n, p_hat), jobs the reflected
    mixture of B(n, 1 - p) and B(n, 1 - p_hat).
    """
    if n < 1:
        raise ParamError(f"n must be at least 1, got {n}")
    p = _exact_probability(p, precision)
    p_hat = _exact_probability(p_hat, precision)
    ratio = _exact(ratio, precision)
    if ratio <= 0:
        raise ParamError(f"Mixture ratio must be positive, got {ratio}")

    weight = ratio / (1 + ratio)

    def mixture(a: Fraction, b: Fraction) -> dict[float, Fraction]:
        first, second = _binomial(n, a), _binomial(n, b)
        return {k: weight * first[k] + (1 - weight) * second[k] for k in first}

    return DiscreteDistribution.from_fractions(mixture(p, p_hat)), DiscreteDistribution.from_fractions(mixture(1 - p, 1 - p_hat))


def piecewise_uniform(workers: Sequence[Segment], jobs: Sequence[Segment], common: Sequence[Segment] = ()) -> tuple[DiscreteDistribution, DiscreteDistribution]:
    """
    Unit atoms spread evenly over segments. Common segments add the same
    atoms to both sides.
    """
    shared = [s for segment in common for s in segment.skills()]
    F = DiscreteDistribution.from_pairs([(s, 1) for segment in workers for s in segment.skills()] + [(s, 1) for s in shared])
    G = DiscreteDistribution.from_pairs([(s, 1) for segment in jobs for s in segment.skills()] + [(s, 1) for s in shared])
    check_equal_mass(F, G)
    return F, G


def gen_distribution(kind: DistributionKind, **params) -> tuple[DiscreteDistribution, DiscreteDistribution]:
    """Dispatch to one of the synthetic generators"""
    match kind:
        case DistributionKind.REFLECTING_BINOMIAL:
            return reflecting_binomial(**params)
        case DistributionKind.BINOMIAL_MIXTURE:
            return binomial_mixture(**params)
        case DistributionKind.PIECEWISE_UNIFORM:
            return piecewise_uniform(**params)
    raise ParamError(f"Unknown distribution kind {kind}")


def calibrate_g(wage_percentiles: Sequence[tuple[float, float]]) -> TabulatedFunction:
    """
    Map a worker's rank in [0, 1] to the wage at the same percentile, by
    linear interpolation. A single point gives a constant.
    """
    if not wage_percentiles:
        raise CalibrationError("At least one wage percentile is required")
    ranks = [float(rank) for rank, _ in wage_percentiles]
    wages = [float(wage) for _, wage in wage_percentiles]

    if any(not 0 <= rank <= 1 for rank in ranks):
        raise CalibrationError("Percentile ranks must lie in [0, 1]")
    if any(b <= a for a, b in zip(ranks, ranks[1:])):
        raise CalibrationError("Percentile ranks must be strictly increasing")
    if any(wage <= 0 for wage in wages):
        raise CalibrationError("Wages must be positive")
    if any(b < a for a, b in zip(wages, wages[1:])):
        raise CalibrationError("Wages must be sorted by rank (nondecreasing)")

    if len(ranks) == 1:
        return TabulatedFunction.constant(0.0, 1.0, wages[0])
    if ranks[0] > 0:
        ranks, wages = [0.0] + ranks, [wages[0]] + wages
    if ranks[-1] < 1:
        ranks, wages = ranks + [1.0], wages + [wages[-1]]
    return TabulatedFunction(tuple(ranks), tuple(wages))


def skill_ranks(F: DiscreteDistribution, skills: Sequence[float]) -> list[float]:
    """Share of workers strictly below each skill"""
    return [F.cdf_below(s) / F.total for s in skills]


def g_over_skills(F: DiscreteDistribution, G: DiscreteDistribution, wage_of_rank: TabulatedFunction) -> TabulatedFunction:
    """Worker output g on every skill of the economy from a rank calibration"""
    skills = sorted(set(F.skills) | set(G.skills))
    wages = wage_of_rank(skill_ranks(F, skills))
    wages = np.atleast_1d(wages)
    return TabulatedFunction(tuple(skills), tuple(float(w) for w in np.maximum.accumulate(wages)))


def calibrated_fixture(F: DiscreteDistribution, G: DiscreteDistribution, label: str, wage_percentiles=DEFAULT_WAGE_PERCENTILES, cost=None) -> EconomyFixture:
    """Square root cost on both sides, g calibrated to wages by rank and h = 0"""
    cost = cost or PowerCostParams.symmetric(DEFAULT_ZETA, DEFAULT_RHO)
    skills = sorted(set(F.skills) | set(G.skills))
    g = g_over_skills(F, G, calibrate_g(wage_percentiles))
    h = TabulatedFunction.constant(skills[0], skills[-1], 0.0)
    return EconomyFixture(F, G, ProductionSpec(g, h, cost), label)


def reflecting_binomial_fixture(**kwargs) -> EconomyFixture:
    F, G = reflecting_binomial(4, Fraction(1, 3))
    return calibrated_fixture(F, G, "reflecting-binomial", **kwargs)


def mixture_fixture(**kwargs) -> EconomyFixture:
    F, G = binomial_mixture(4, Fraction(1, 3), 1, 3)
    return calibrated_fixture(F, G, "mixture", **kwargs)


def regions_fixture(atoms: int = 100, overlap: bool = True, **kwargs) -> EconomyFixture:
    """
    Three regions over [0, 3000]: mismatched workers then jobs in the first
    and last, jobs then workers in the middle. With overlap, the half of
    each region's jobs farthest from its workers is matched by identical
    workers as well.
    """
    if atoms < 2 or atoms % 2:
        raise ParamError(f"Atoms per half region must be even and at least 2, got {atoms}")
    half = atoms // 2
    workers = [Segment(0, 500, atoms, "left"), Segment(1500, 2000, atoms, "right"), Segment(2000, 2500, atoms, "right")]
    jobs = [Segment(500, 1000, atoms, "right"), Segment(1000, 1500, atoms, "right"), Segment(2500, 3000, atoms, "right")]
    common = []
    if overlap:
        common = [Segment(750, 1000, half, "right"), Segment(1000, 1250, half, "right"), Segment(2750, 3000, half, "right")]
    F, G = piecewise_uniform(workers, jobs, common)
    return calibrated_fixture(F, G, "regions", **kwargs)


PRESETS = {
    "reflecting-binomial": reflecting_binomial_fixture,
    "mixture": mixture_fixture,
    "regions": regions_fixture,
}


def load_economy(path: str, wage_percentiles=DEFAULT_WAGE_PERCENTILES) -> EconomyFixture:
    """
    Read an economy from JSON: {label, workers, jobs, cost?, g?, h?}. Without
    a g table, g is calibrated from wage percentiles by worker rank.
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise InputError(f"Cannot read {path}: {e.strerror}") from e
    except UnicodeDecodeError as e:
        raise InputError(f"{path}: not UTF-8 text (byte {e.start})") from e
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: not valid JSON ({e.msg} at line {e.lineno})") from e

    for key in ("workers", "jobs"):
        if key not in data:
            raise InputError(f"{path}: missing field '{key}'")
    F = DiscreteDistribution.from_json(data["workers"])
    G = DiscreteDistribution.from_json(data["jobs"])
    try:
        cost = PowerCostParams(**data["cost"]) if "cost" in data else None
    except TypeError as e:
        raise InputError(f"{path}: invalid field 'cost' ({e})") from e

    fixture = calibrated_fixture(F, G, data.get("label", path), wage_percentiles, cost)
    if "g" in data or "h" in data:
        try:
            g = TabulatedFunction(tuple(data["g"]["xs"]), tuple(data["g"]["ys"])) if "g" in data else fixture.spec.g
            h = TabulatedFunction(tuple(data["h"]["xs"]), tuple(data["h"]["ys"])) if "h" in data else fixture.spec.h
        except (KeyError, TypeError) as e:
            raise InputError(f"{path}: tables 'g' and 'h' need 'xs' and 'ys' lists") from e
        fixture = EconomyFixture(F, G, ProductionSpec(g, h, fixture.spec.cost), fixture.label)
    return fixture


def _read_rows(path: str, columns: Sequence[str]) -> list[dict[str, str]]:
    try:
        with open(path, "r", encoding="utf-8", newline="") as f:
            reader = csv.DictReader(f)
            missing = [c for c in columns if c not in (reader.fieldnames or [])]
            if missing:
                raise InputError(f"{path}: header is missing the columns {missing}")
            return list(reader)
    except OSError as e:
        raise InputError(f"Cannot read {path}: {e.strerror}") from e
    except UnicodeDecodeError as e:
        raise InputError(f"{path}: not UTF-8 text (byte {e.start})") from e


def _number(path: str, line: int, row: dict[str, str], column: str) -> float:
    try:
        return float(row[column])
    except (TypeError, ValueError) as e:
        raise InputError(f"{path}:{line}: field '{column}' is not a number: {row[column]!r}") from e


def read_wage_percentiles(path: str) -> list[tuple[float, float]]:
    """`rank,wage` rows"""
    rows = _read_rows(path, ("rank", "wage"))
    return [(_number(path, line, row, "rank"), _number(path, line, row, "wage")) for line, row in enumerate(rows, start=2)]


def read_occupation_map(path: str) -> list[tuple[float, float, str]]:
    """`lo,hi,label` rows: job skills in [lo, hi) belong to the labelled occupation"""
    rows = _read_rows(path, ("lo", "hi", "label"))
    return [(_number(path, line, row, "lo"), _number(path, line, row, "hi"), row["label"]) for line, row in enumerate(rows, start=2)]


def read_data_moments(path: str) -> dict[tuple[float, float], tuple[float, float]]:
    """`lo,hi,var_log_wage,abs_dev_log_wage` rows per rank segment"""
    rows = _read_rows(path, ("lo", "hi", "var_log_wage", "abs_dev_log_wage"))
    moments = {}
    for line, row in enumerate(rows, start=2):
        segment = (_number(path, line, row, "lo"), _number(path, line, row, "hi"))
        moments[segment] = (_number(path, line, row, "var_log_wage"), _number(path, line, row, "abs_dev_log_wage"))
    return moments


def _occupation_of(z: float, occupation_map: Sequence[tuple[float, float, str]]|None) -> str:
    if occupation_map is None:
        return repr(z)
    for lo, hi, label in occupation_map:
        if lo <= z < hi:
            return label
    raise InputError(f"Job skill {z} is not covered by the occupation map")


def dispersion_report(economy: EconomyFixture, assignment: Assignment, dualsol: DualSolution, segments: Sequence[tuple[float, float]] = DEFAULT_SEGMENTS, occupation_map: Sequence[tuple[float, float, str]]|None = None, data_moments: dict[tuple[float, float], tuple[float, float]]|None = None) -> DispersionReport:
    """
    Log-wage moments per occupation, ranked by mean wage, and employment
    weighted averages per segment of ranks. explained_sq is the ratio of
    model to data variance, explained_abs the ratio of mean absolute
    deviations; both stay empty without data moments for the segment.
    """
    employed: dict[str, list[tuple[float, float, int]]] = {}
    for x, z, mass in assignment.pairs:
        employed.setdefault(_occupation_of(z, occupation_map), []).append((x, z, mass))

    if occupation_map is not None:
        for _, _, label in occupation_map:
            if label not in employed:
                log.warning("Occupation %s employs no workers and is skipped", label)

    total = sum(mass for _, _, mass in assignment.pairs)
    report = DispersionReport()
    for label, pairs in employed.items():
        mass = np.array([m for _, _, m in pairs], dtype=float)
        if mass.sum() == 0:
            log.warning("Occupation %s employs no workers and is skipped", label)
            continue
        wages = np.array([dualsol.w[x] for x, _, _ in pairs])
        if np.any(wages <= 0):
            raise DomainError(f"Occupation {label} pays a non-positive wage; log wages are undefined")

        logs = np.log(wages)
        mean_log = float(np.average(logs, weights=mass))
        report.per_job.append(OccupationMoments(
            label=label,
            jobs=sorted({z for _, z, _ in pairs}),
            mean_wage=float(np.average(wages, weights=mass)),
            mean_log_wage=mean_log,
            var_log_wage=float(np.average((logs - mean_log) ** 2, weights=mass)),
            abs_dev_log_wage=float(np.average(np.abs(logs - mean_log), weights=mass)),
            employment_share=float(mass.sum() / total),
            worker_types=len({x for x, _, _ in pairs}),
        ))

    cumulative = 0.0
    for occupation in sorted(report.per_job, key=lambda o: (o.mean_wage, o.jobs)):
        occupation.rank = cumulative + occupation.employment_share / 2
        cumulative += occupation.employment_share
    report.per_job.sort(key=lambda o: o.jobs)

    for lo, hi in segments:
        members = [o for o in report.per_job if lo <= o.rank < hi or (hi >= 1 and o.rank == hi)]
        weights = np.array([o.employment_share for o in members])
        if not members or weights.sum() == 0:
            log.warning("No occupations rank within segment [%s, %s)", lo, hi)
            continue
        segment = SegmentMoments(
            lo=lo,
            hi=hi,
            model_sq=float(np.average([o.var_log_wage for o in members], weights=weights)),
            model_abs=float(np.average([o.abs_dev_log_wage for o in members], weights=weights)),
        )
        if data_moments and (lo, hi) in data_moments:
            data_sq, data_abs = data_moments[(lo, hi)]
            segment.explained_sq = segment.model_sq / data_sq if data_sq > 0 else None
            segment.explained_abs = segment.model_abs / data_abs if data_abs > 0 else None
        report.segments.append(segment)

    return report
