"""
Layer decomposition of the mismatched part of an economy.
"""
import pytest

from csort.distributions import DiscreteDistribution, common_component
from csort.enums import Side
from csort.errors import PreconditionViolated
from csort.layering import Layer, decompose_layers
from csort.oracle import random_economy

W, J = Side.WORKER, Side.JOB


def test_five_skill_economy_bands():
    F = DiscreteDistribution.from_pairs({1: 1, 3: 4}, scale=5)
    G = DiscreteDistribution.from_pairs({2: 2, 4: 1, 5: 2}, scale=5)
    layers = decompose_layers(F, G)

    assert [layer.level_interval for layer in layers] == [(-1, 0), (0, 1), (1, 2), (2, 3)]
    assert [layer.points for layer in layers] == [
        ((2.0, J), (3.0, W)),
        ((1.0, W), (2.0, J), (3.0, W), (5.0, J)),
        ((3.0, W), (5.0, J)),
        ((3.0, W), (4.0, J)),
    ]
    assert all(layer.mass == 1 and layer.scale == 5 for layer in layers)


def test_binomial_layers():
    F_rem = DiscreteDistribution.from_pairs({0: 15, 1: 24})
    G_rem = DiscreteDistribution.from_pairs({3: 24, 4: 15})
    bottom, top = decompose_layers(F_rem, G_rem)
    assert bottom.mass == 15
    assert bottom.points == ((0.0, W), (4.0, J))
    assert top.mass == 24
    assert top.points == ((1.0, W), (3.0, J))


def test_mixture_layers():
    F_rem = DiscreteDistribution.from_pairs({1: 24, 4: 12})
    G_rem = DiscreteDistribution.from_pairs({0: 12, 3: 24})
    bottom, top = decompose_layers(F_rem, G_rem)
    assert bottom.mass == 12
    assert bottom.points == ((0.0, J), (1.0, W), (3.0, J), (4.0, W))
    assert top.mass == 12
    assert top.points == ((1.0, W), (3.0, J))


def test_identical_bands_are_merged():
    F_rem = DiscreteDistribution.from_pairs({0: 3})
    G_rem = DiscreteDistribution.from_pairs({1: 3})
    (layer,) = decompose_layers(F_rem, G_rem)
    assert layer.mass == 3
    assert layer.level_interval == (0, 3)


def test_empty_remainders():
    empty = DiscreteDistribution(())
    assert not decompose_layers(empty, empty)


def test_overlapping_supports_rejected(binomial_economy):
    F, G = binomial_economy
    with pytest.raises(PreconditionViolated):
        decompose_layers(F, G)


def test_layer_validation():
    with pytest.raises(PreconditionViolated):
        Layer(1, ((0.0, W), (1.0, W)), (0, 1))
    with pytest.raises(PreconditionViolated):
        Layer(1, ((1.0, W), (0.0, J)), (0, 1))
    with pytest.raises(PreconditionViolated):
        Layer(1, ((0.0, W), (1.0, J), (2.0, W)), (0, 1))
    with pytest.raises(PreconditionViolated):
        Layer(0, ((0.0, W), (1.0, J)), (0, 0))


def test_layer_json():
    layer = Layer(2, ((0.0, J), (1.5, W)), (-2, 0), 3)
    assert layer.to_json() == {
        "mass": 2,
        "scale": 3,
        "points": [{"skill": 0.0, "side": "job"}, {"skill": 1.5, "side": "worker"}],
        "band": [-2, 0],
    }


def test_random_layers_alternate_and_reconstruct(rng):
    for _ in range(300):
        F, G, _ = random_economy(rng, max_atoms=10)
        _, F_rem, G_rem = common_component(F, G)
        layers = decompose_layers(F_rem, G_rem)

        workers = DiscreteDistribution((), F_rem.scale)
        jobs = DiscreteDistribution((), G_rem.scale)
        for layer in layers:
            sides = layer.sides
            assert all(a != b for a, b in zip(sides, sides[1:]))
            assert len(layer.workers) == len(layer.jobs)
            F_layer, G_layer = layer.measures()
            workers, jobs = workers + F_layer, jobs + G_layer

        assert workers == F_rem
        assert jobs == G_rem

        bands = [layer.level_interval for layer in layers]
        assert all(lo < hi for lo, hi in bands)
        assert len(set(bands)) == len(bands)
