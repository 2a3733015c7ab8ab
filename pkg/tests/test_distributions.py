"""
Exact atomic measures, the common component and the underqualification measure.
"""
from fractions import Fraction

import pytest

from csort.distributions import (DiscreteDistribution, common_component,
                                 read_csv, underqualification, write_csv)
from csort.errors import InputError, MassMismatch, PreconditionViolated
from csort.oracle import random_economy


def test_common_component_binomial(binomial_economy):
    F, G = binomial_economy
    common, F_rem, G_rem = common_component(F, G)
    assert common.as_dict() == {0: 1, 1: 8, 2: 24, 3: 8, 4: 1}
    assert F_rem.as_dict() == {0: 15, 1: 24}
    assert G_rem.as_dict() == {3: 24, 4: 15}


def test_common_component_mixture(mixture_economy):
    F, G = mixture_economy
    common, F_rem, G_rem = common_component(F, G)
    assert common.as_dict() == {0: 16, 1: 8, 2: 24, 3: 8, 4: 16}
    assert F_rem.as_dict() == {1: 24, 4: 12}
    assert G_rem.as_dict() == {0: 12, 3: 24}


def test_common_component_identical(binomial_economy):
    F, _ = binomial_economy
    common, F_rem, G_rem = common_component(F, F)
    assert common == F
    assert F_rem.is_empty()
    assert G_rem.is_empty()


def test_common_component_mass_mismatch():
    F = DiscreteDistribution.from_pairs({0: 2})
    G = DiscreteDistribution.from_pairs({1: 3})
    with pytest.raises(MassMismatch):
        common_component(F, G)


def test_common_component_reconstructs(rng):
    for _ in range(200):
        F, G, _ = random_economy(rng)
        common, F_rem, G_rem = common_component(F, G)
        assert common + F_rem == F
        assert common + G_rem == G
        assert not set(F_rem.skills) & set(G_rem.skills)


def test_mixed_scales_are_aligned():
    F = DiscreteDistribution.from_fractions({0: Fraction(1, 2), 1: Fraction(1, 2)})
    G = DiscreteDistribution.from_fractions({1: Fraction(1, 3), 2: Fraction(2, 3)})
    common, F_rem, G_rem = common_component(F, G)
    assert common.scale == 6
    assert common.as_dict() == {1: 2}
    assert F_rem.as_dict() == {0: 3, 1: 1}
    assert G_rem.as_dict() == {2: 4}


def test_underqualification_five_skill_economy():
    F = DiscreteDistribution.from_pairs({1: 1, 3: 4}, scale=5)
    G = DiscreteDistribution.from_pairs({2: 2, 4: 1, 5: 2}, scale=5)
    H = underqualification(F, G)
    assert H.skills == [1, 2, 3, 4, 5]
    assert H.values == [1, -1, 3, 2, 0]
    assert H(0.5) == 0
    assert H(3.5) == 3
    assert H(99) == 0


def test_underqualification_mixture_remainders():
    F_rem = DiscreteDistribution.from_pairs({1: 24, 4: 12})
    G_rem = DiscreteDistribution.from_pairs({0: 12, 3: 24})
    H = underqualification(F_rem, G_rem)
    assert H.skills == [0, 1, 3, 4]
    assert H.values == [-12, 12, -12, 0]


def test_underqualification_identical_is_zero(mixture_economy):
    F, _ = mixture_economy
    H = underqualification(F, F)
    assert not H.breakpoints
    assert H(2) == 0


def test_underqualification_antisymmetric(rng):
    for _ in range(100):
        F, G, _ = random_economy(rng)
        H, reverse = underqualification(F, G), underqualification(G, F)
        for skill in set(F.skills) | set(G.skills):
            assert H(skill) == -reverse(skill)
        assert H(max(H.skills, default=0) + 1) == 0


def test_invalid_atoms_rejected():
    with pytest.raises(PreconditionViolated):
        DiscreteDistribution(((1.0, 1), (0.0, 1)))
    with pytest.raises(PreconditionViolated):
        DiscreteDistribution(((0.0, 0),))
    with pytest.raises(PreconditionViolated):
        DiscreteDistribution.from_pairs({0: 1}).rescale(3).rescale(4)


def test_from_pairs_merges_repeated_skills():
    F = DiscreteDistribution.from_pairs([(1, 2), (0, 1), (1, 3), (2, 0)])
    assert F.atoms == ((0.0, 1), (1.0, 5))
    merged = DiscreteDistribution.from_pairs([(1.0, 1), (1.0004, 1)], merge_tol=1e-3)
    assert merged.atoms == ((1.0, 2),)


def test_read_csv_decimal_masses(tmp_path):
    path = tmp_path / "workers.csv"
    path.write_text("skill,mass\n0,0.5\n1,0.25\n2,0.25\n", encoding="utf-8")
    F = read_csv(str(path))
    assert F.scale == 4
    assert F.atoms == ((0.0, 2), (1.0, 1), (2.0, 1))
    assert F.true_total == 1


def test_read_csv_reports_line_and_field(tmp_path):
    path = tmp_path / "jobs.csv"
    path.write_text("skill,mass\n0,1\n1,abc\n", encoding="utf-8")
    with pytest.raises(InputError, match=r"jobs.csv:3: field 'mass'"):
        read_csv(str(path))

    path.write_text("skill,weight\n0,1\n", encoding="utf-8")
    with pytest.raises(InputError, match="header"):
        read_csv(str(path))

    with pytest.raises(InputError, match="Cannot read"):
        read_csv(str(tmp_path / "missing.csv"))


def test_read_csv_rejects_binary_content(tmp_path):
    path = tmp_path / "workers.csv"
    path.write_bytes(b"skill,mass\n0,1\n\xff\xfe,2\n")
    with pytest.raises(InputError, match="workers.csv: not UTF-8"):
        read_csv(str(path))


def test_write_csv_into_missing_folder(tmp_path):
    F = DiscreteDistribution.from_pairs({0: 1})
    with pytest.raises(InputError, match="Cannot write"):
        write_csv(str(tmp_path / "missing" / "workers.csv"), F)


def test_write_csv_keeps_exact_masses(tmp_path):
    F = DiscreteDistribution.from_fractions({0: Fraction(1, 3), 2.5: Fraction(2, 3)})
    path = tmp_path / "workers.csv"
    write_csv(str(path), F)
    assert read_csv(str(path)) == F
