import itertools
import math

import pytest
from scipy.stats import chisquare

from qssim.photonics import (
    NOISELESS,
    ChannelModel,
    make_signal,
    multi_fire_enumerated,
    multi_fire_probability,
    registering_leaves,
    split,
    split_tree,
    transmit,
)
from qssim.qubit import Basis, StateLabel, prob_of, state_of
from qssim.stats import within_sigmas


def test_make_signal():
    signal = make_signal(state_of(StateLabel.ONE), 4, 7)
    assert len(signal) == 4
    assert signal.origin_index == 7
    with pytest.raises(ValueError):
        make_signal(state_of(StateLabel.ONE), 0)


def test_split_conserves_photons(rng):
    signal = make_signal(state_of(StateLabel.U), 6)
    for _ in range(50):
        a, b = split(signal, rng)
        assert len(a) + len(b) == 6


@pytest.mark.parametrize("depth", [1, 2, 3])
def test_split_tree_leaves(rng, depth):
    leaves = split_tree(make_signal(state_of(StateLabel.ZERO), 5), depth, rng)
    assert len(leaves) == 2**depth
    assert sum(len(leaf) for leaf in leaves) == 5
    assert 1 <= registering_leaves(leaves) <= 5


def test_split_tree_depth_must_be_positive(rng):
    with pytest.raises(ValueError):
        split_tree(make_signal(state_of(StateLabel.ZERO), 2), 0, rng)


def test_single_photon_leaf_is_uniform(rng):
    counts = [0, 0, 0, 0]
    for _ in range(4000):
        leaves = split_tree(make_signal(state_of(StateLabel.ZERO), 1), 2, rng)
        counts[[len(leaf) for leaf in leaves].index(1)] += 1
    assert chisquare(counts).pvalue > 0.001


def test_four_photon_leaf_occupancy_is_multinomial(rng):
    trials = 20000
    patterns = [p for p in itertools.product(range(5), repeat=4) if sum(p) == 4]
    counts = dict.fromkeys(patterns, 0)
    for _ in range(trials):
        leaves = split_tree(make_signal(state_of(StateLabel.U), 4), 2, rng)
        counts[tuple(len(leaf) for leaf in leaves)] += 1
    expected = [
        trials
        * math.factorial(4)
        / math.prod(math.factorial(k) for k in p)
        / 4**4
        for p in patterns
    ]
    assert len(patterns) == 35
    assert chisquare([counts[p] for p in patterns], expected).pvalue > 0.001


def test_multi_fire_probability():
    assert multi_fire_probability(4, 1) == 7 / 8
    assert multi_fire_probability(1, 3) == 0.0
    assert multi_fire_probability(2, 2) == 3 / 4
    for n in range(1, 11):
        assert math.isclose(multi_fire_probability(n, 1), multi_fire_enumerated(n, 1))
    for n in range(1, 6):
        for depth in (2, 3):
            assert math.isclose(
                multi_fire_probability(n, depth), multi_fire_enumerated(n, depth)
            )


def test_multi_fire_frequency(rng):
    trials = 10000
    fired = sum(
        registering_leaves(split_tree(make_signal(state_of(StateLabel.D), 4), 1, rng)) >= 2
        for _ in range(trials)
    )
    assert abs(fired / trials - 7 / 8) <= 3 * math.sqrt(7 / 8 * 1 / 8 / trials)


def test_transmit(rng):
    signal = make_signal(state_of(StateLabel.ZERO), 3)
    assert transmit(signal, NOISELESS, rng) is signal
    flipped = transmit(signal, ChannelModel(1.0), rng)
    assert all(p.fidelity(state_of(StateLabel.ONE)) > 1 - 1e-12 for p in flipped.photons)
    with pytest.raises(ValueError):
        ChannelModel(1.5)


def test_transmit_flips_at_the_channel_rate(rng):
    trials = 100000
    signal = transmit(make_signal(state_of(StateLabel.ZERO), trials), ChannelModel(0.1), rng)
    ones = sum(1 for p in signal.photons if prob_of(p, Basis.Z, 1) > 0.5)
    assert within_sigmas(ones / trials, 0.1, trials)
