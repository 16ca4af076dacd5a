"""Physical layer: multi-photon signals, 50/50 photon number splitters and
the quantum channel between parties.

Photons are routed independently by a splitter (no bosonic interference),
and a leaf of a splitter tree "registers" when its detector sees at least
one photon.
"""

import itertools
import logging as log
from collections import namedtuple
from dataclasses import dataclass

from qssim.qubit import GateOp, PureState, RandomStream, apply


@dataclass(frozen=True)
class PhotonSignal:
    """One logical pulse: the polarization states of its photons"""

    photons: tuple = ()
    origin_index: int = 0

    def __len__(self):
        return len(self.photons)

    def with_photons(self, photons) -> "PhotonSignal":
        return PhotonSignal(tuple(photons), self.origin_index)

    def transformed(self, gate: GateOp) -> "PhotonSignal":
        """Every photon passes the same unitary"""
        return self.with_photons(apply(gate, p) for p in self.photons)


SplitResult = namedtuple("SplitResult", ("arm_a", "arm_b"))


@dataclass(frozen=True)
class ChannelModel:
    """Per-photon probability of a bit flip (sigma_x) in transit"""

    flip_probability: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.flip_probability <= 1.0:
            raise ValueError(
                "flip_probability must be in [0, 1], not %r" % self.flip_probability
            )

    @property
    def noiseless(self) -> bool:
        return self.flip_probability == 0.0


NOISELESS = ChannelModel()


def make_signal(state: PureState, n: int, origin_index: int = 0) -> PhotonSignal:
    if n < 1:
        raise ValueError("A signal needs at least one photon, not %d" % n)
    return PhotonSignal((state,) * n, origin_index)


def split(signal: PhotonSignal, rng: RandomStream) -> SplitResult:
    if len(signal) == 0:
        return SplitResult(signal, signal)
    routes = rng.bits(len(signal))
    arm_a = [p for p, r in zip(signal.photons, routes) if r == 0]
    arm_b = [p for p, r in zip(signal.photons, routes) if r == 1]
    return SplitResult(signal.with_photons(arm_a), signal.with_photons(arm_b))


def split_tree(signal: PhotonSignal, depth: int, rng: RandomStream) -> list:
    """Cascade of splitters; returns the 2**depth leaf signals, left to right"""
    if depth < 1:
        raise ValueError("Splitter tree depth must be at least 1, not %d" % depth)
    leaves = [signal]
    for _ in range(depth):
        next_level = []
        for leaf in leaves:
            next_level.extend(split(leaf, rng))
        leaves = next_level
    return leaves


def registering_leaves(leaves) -> int:
    return sum(1 for leaf in leaves if len(leaf) > 0)


def multi_fire_probability(n: int, depth: int) -> float:
    """Probability that an n-photon signal fires at least two of the
    2**depth detectors behind a splitter tree"""
    if depth < 1:
        raise ValueError("Splitter tree depth must be at least 1, not %d" % depth)
    if n <= 1:
        return 0.0
    leaves = 2**depth
    return 1.0 - float(leaves) ** (1 - n)


def transmit(
    signal: PhotonSignal, channel: ChannelModel, rng: RandomStream
) -> PhotonSignal:
    if channel.noiseless:
        return signal
    photons = []
    for photon in signal.photons:
        if rng.random() < channel.flip_probability:
            log.debug("Channel flipped a photon of signal %d" % signal.origin_index)
            photon = apply(GateOp.PAULI_X, photon)
        photons.append(photon)
    return signal.with_photons(photons)


def multi_fire_enumerated(n: int, depth: int) -> float:
    """multi_fire_probability by listing every routing of n photons through
    the tree; exponential in n, meant for small checks"""
    if depth < 1:
        raise ValueError("Splitter tree depth must be at least 1, not %d" % depth)
    leaves = 2**depth
    multi = 0
    total = 0
    for routing in itertools.product(range(leaves), repeat=n):
        total += 1
        if len(set(routing)) >= 2:
            multi += 1
    return multi / total
