"""Adversaries against the secret sharing runs.

TrojanBob is a dishonest agent who prepares n identical photons instead
of one, keeps the extra copies after Charlie's encryption and measures
them behind a splitter tree to learn Charlie's operation. Knowing the
label and the operation he reads Alice's encoding on the way back to
Charlie without disturbing it.

InterceptResendEve is an outsider who measures every photon on one leg of
the channel in a random basis and resends what she saw.
"""

import itertools
import logging as log
import math
from collections import OrderedDict, namedtuple
from dataclasses import dataclass
from enum import Enum
from typing import ClassVar, Optional

import numpy as np

from qssim.photonics import PhotonSignal, make_signal, split_tree
from qssim.protocols import (
    LABELS,
    Adversary,
    OpSet,
    RunResult,
    SecretMessage,
    basis_after,
    expected_bit,
)
from qssim.qubit import (
    Basis,
    GateOp,
    PureState,
    RandomStream,
    StateLabel,
    apply,
    basis_of,
    bit_of,
    label_of,
    measure,
    prob_of,
    state_of,
)
from qssim.utils import cache


class Segment(Enum):
    BOB_TO_CHARLIE = "bob-to-charlie"
    CHARLIE_TO_ALICE = "charlie-to-alice"
    ALICE_TO_CHARLIE = "alice-to-charlie"


@dataclass(frozen=True)
class InferenceResult:
    guessed_op: GateOp
    candidates: tuple
    correct: Optional[bool]
    ambiguous: Optional[bool]
    outcome_pattern: tuple

    @property
    def misidentified(self) -> Optional[bool]:
        """The guess was wrong; None when the true operation is unknown"""
        return None if self.correct is None else not self.correct

    def to_dict(self) -> OrderedDict:
        return OrderedDict(
            [
                ("guessed_op", self.guessed_op.value),
                ("candidates", [op.value for op in self.candidates]),
                ("correct", self.correct),
                ("ambiguous", self.ambiguous),
                ("misidentified", self.misidentified),
                (
                    "outcome_pattern",
                    ["%s%d" % (basis.value, bit) for basis, bit in self.outcome_pattern],
                ),
            ]
        )


@dataclass(frozen=True)
class AttackReport:
    inferences: tuple
    recovered_bits: Optional[SecretMessage]
    recovery_rate: float
    detected: bool

    @property
    def ambiguous_count(self) -> int:
        return sum(1 for i in self.inferences if i.ambiguous)

    @property
    def misidentified_count(self) -> int:
        return sum(1 for i in self.inferences if i.misidentified)


def default_tree_depth(n_photons: int) -> int:
    return max(1, math.ceil(math.log2(n_photons))) if n_photons > 1 else 1


@dataclass(frozen=True)
class AttackStrategy:
    """No attack; the subclasses describe the adversaries"""

    name: ClassVar[str] = "none"

    def engage(self, op_set: OpSet) -> Adversary:
        """Fresh adversary state for one run"""
        return Adversary(op_set)

    def to_dict(self) -> OrderedDict:
        return OrderedDict([("attack", self.name)])


NO_ATTACK = AttackStrategy()


@dataclass(frozen=True)
class TrojanBob(AttackStrategy):
    name: ClassVar[str] = "trojan"

    n_photons: int = 4
    forward_one: bool = True
    tree_depth: Optional[int] = None

    def __post_init__(self):
        # n_photons = 1 is Bob behaving honestly, kept as a control
        if self.n_photons < 1:
            raise ValueError("n_photons must be at least 1, not %d" % self.n_photons)
        if self.tree_depth is None:
            object.__setattr__(self, "tree_depth", default_tree_depth(self.n_photons))
        if self.tree_depth < 1:
            raise ValueError("tree_depth must be at least 1, not %d" % self.tree_depth)

    @property
    def measured_photons(self) -> int:
        return self.n_photons - 1 if self.forward_one else self.n_photons

    def engage(self, op_set: OpSet) -> Adversary:
        return _TrojanAdversary(self, op_set)

    def to_dict(self) -> OrderedDict:
        data = super().to_dict()
        data["photons"] = self.n_photons
        data["forward_one"] = self.forward_one
        data["tree_depth"] = self.tree_depth
        return data


@dataclass(frozen=True)
class InterceptResendEve(AttackStrategy):
    name: ClassVar[str] = "eve"

    segment: Segment = Segment.BOB_TO_CHARLIE

    def engage(self, op_set: OpSet) -> Adversary:
        return _EveAdversary(self.segment, op_set)

    def to_dict(self) -> OrderedDict:
        data = super().to_dict()
        data["segment"] = self.segment.value
        return data


def trojan_prepare(label: StateLabel, n: int, origin_index: int = 0) -> PhotonSignal:
    if n < 2:
        raise ValueError("A Trojan signal needs at least 2 photons, not %d" % n)
    return make_signal(state_of(label), n, origin_index)


def measurement_bases(label: StateLabel, op_set: OpSet, measured: int) -> tuple:
    """Bob's basis for each measured photon.

    Against {I, U, H} all photons are read in the preparation basis. Against
    four operations the first half (rounded up) is read in the preparation
    basis and the rest in the conjugate basis.
    """
    own = basis_of(label)
    if op_set is OpSet.THREE_OP:
        return (own,) * measured
    first = math.ceil(measured / 2)
    return (own,) * first + (own.conjugate,) * (measured - first)


@cache
def _zero_probabilities(label: StateLabel, op: GateOp, bases: tuple) -> tuple:
    state = apply(op, state_of(label))
    # Every entry is 0, 1/2 or 1; rounding makes ties between operations exact
    return tuple(round(prob_of(state, basis, 0), 12) for basis in bases)


def _likelihood(label, op, pattern) -> float:
    bases = tuple(basis for basis, _ in pattern)
    likelihood = 1.0
    for p0, (_, bit) in zip(_zero_probabilities(label, op, bases), pattern):
        likelihood *= p0 if bit == 0 else 1.0 - p0
    return likelihood


def classify(label: StateLabel, op_set: OpSet, pattern) -> tuple:
    """Bob's decision on an outcome pattern: (guess, consistent operations).

    The guess is the most likely operation; ties go to the first one in
    op_set order, so unanimous outcomes are read as I or U.
    """
    likelihoods = [(op, _likelihood(label, op, pattern)) for op in op_set.ops]
    candidates = tuple(op for op, lk in likelihoods if lk > 0.0)
    best = max(lk for _, lk in likelihoods)
    guess = next(op for op, lk in likelihoods if lk == best)
    return guess, candidates


def trojan_infer(
    signal: PhotonSignal,
    label: StateLabel,
    op_set: OpSet,
    forward_one: bool,
    tree_depth: int,
    rng: RandomStream,
    true_op: GateOp = None,
):
    """Measure the retained photons and guess Charlie's operation.

    Returns the InferenceResult and the untouched photon to forward (None
    when forward_one is off). `true_op` only scores the guess: without it
    `correct`, `misidentified` and `ambiguous` (the outcomes fit several
    operations and the guess is wrong) are None.
    """
    photons = signal.photons
    forwarded = None
    if forward_one:
        forwarded = signal.with_photons(photons[:1])
        photons = photons[1:]
    if len(photons) < 1:
        raise ValueError("Bob has no photon left to measure")

    measured = []
    for leaf in split_tree(signal.with_photons(photons), tree_depth, rng):
        measured.extend(leaf.photons)
    bases = measurement_bases(label, op_set, len(measured))
    pattern = tuple(
        (basis, measure(photon, basis, rng)[0]) for photon, basis in zip(measured, bases)
    )
    guess, candidates = classify(label, op_set, pattern)
    correct = None if true_op is None else guess is true_op
    result = InferenceResult(
        guessed_op=guess,
        candidates=candidates,
        correct=correct,
        ambiguous=None if correct is None else len(candidates) > 1 and not correct,
        outcome_pattern=pattern,
    )
    return result, forwarded


def final_intercept(
    encoded_photon: PureState, label: StateLabel, inferred_op: GateOp, rng: RandomStream
):
    """Bob reads Alice's bit on the way back to Charlie; returns
    (stolen_bit, resent photon)"""
    bit, resent = measure(encoded_photon, basis_after(label, inferred_op), rng)
    stolen = int(bit != expected_bit(label, inferred_op, GateOp.I))
    return stolen, resent


def pe_paper(n: int) -> float:
    if n < 1:
        raise ValueError("n must be at least 1, not %d" % n)
    return (1.0 / 3.0) * 0.5**n


@cache
def _pe_enumerated(op_set: OpSet, measured: int) -> float:
    total = 0.0
    weight = 1.0 / (len(LABELS) * len(op_set.ops))
    for label in LABELS:
        bases = measurement_bases(label, op_set, measured)
        for op in op_set.ops:
            for bits in itertools.product((0, 1), repeat=measured):
                pattern = tuple(zip(bases, bits))
                probability = _likelihood(label, op, pattern)
                if probability == 0.0:
                    continue
                guess, _ = classify(label, op_set, pattern)
                if guess is not op:
                    total += weight * probability
    return total


def pe_exact(n: int, op_set: OpSet = OpSet.THREE_OP, measured_photons: int = None) -> float:
    """Probability that Bob misidentifies Charlie's operation, by enumerating
    every label, operation and outcome pattern"""
    if n < 1:
        raise ValueError("n must be at least 1, not %d" % n)
    measured = n if measured_photons is None else measured_photons
    if measured < 1:
        raise ValueError("measured_photons must be at least 1, not %d" % measured)
    return _pe_enumerated(op_set, measured)


BatchInference = namedtuple("BatchInference", ("trials", "misidentified"))


def infer_batch(measured: int, op_set: OpSet, trials: int, rng: RandomStream) -> BatchInference:
    """Single-signal inference experiments, vectorized.

    Draws a uniform label and operation per trial, the outcome of every
    measured photon, and applies the same decision rule as classify().
    """
    if measured < 1:
        raise ValueError("measured must be at least 1, not %d" % measured)
    if trials < 1:
        return BatchInference(0, 0)
    ops = op_set.ops
    p0 = np.array(
        [
            [_zero_probabilities(label, op, measurement_bases(label, op_set, measured)) for op in ops]
            for label in LABELS
        ]
    )  # shape (labels, ops, measured)
    generator = rng.generator
    labels = generator.integers(len(LABELS), size=trials)
    truth = generator.integers(len(ops), size=trials)
    ones = generator.random((trials, measured)) >= p0[labels, truth]
    per_op = p0[labels]  # (trials, ops, measured)
    likelihood = np.where(ones[:, None, :], 1.0 - per_op, per_op).prod(axis=2)
    guesses = likelihood.argmax(axis=1)  # first maximum, op_set order
    return BatchInference(trials, int(np.count_nonzero(guesses != truth)))


def eve_intercept_resend(photon: PureState, rng: RandomStream):
    """Returns (resent, eve_bit, eve_basis)"""
    basis = rng.choice((Basis.Z, Basis.X))
    bit, resent = measure(photon, basis, rng)
    return resent, bit, basis


def intercept_resend_error_exact() -> float:
    """Error rate intercept-resend causes on a sample read in its
    preparation basis, over all states, Eve bases and Eve outcomes"""
    total = 0.0
    for label in LABELS:
        state = state_of(label)
        for basis in (Basis.Z, Basis.X):
            for eve_bit in (0, 1):
                p_eve = prob_of(state, basis, eve_bit) * 0.5
                if p_eve == 0.0:
                    continue
                resent = state_of(label_of(basis, eve_bit))
                wrong = prob_of(resent, basis_of(label), 1 - bit_of(label))
                total += p_eve * wrong / len(LABELS)
    return total


def _recovery(result: RunResult, message: SecretMessage, stolen: dict):
    carriers = [
        r for r in result.transcript if r.message_position is not None
    ]
    if not carriers or len(message) == 0:
        return None, 0.0
    carriers.sort(key=lambda r: r.message_position)
    bits = [stolen.get(r.index) for r in carriers]
    if any(b is None for b in bits):
        return None, 0.0
    recovered = SecretMessage.from_bits(bits)
    right = sum(1 for i, b in enumerate(bits) if b == message[i])
    return recovered, right / len(message)


class _TrojanAdversary(Adversary):
    def __init__(self, strategy: TrojanBob, op_set: OpSet):
        super().__init__(op_set)
        self.strategy = strategy
        self.inferences = OrderedDict()
        self.stolen = {}

    def prepare(self, label, index, rng):
        if self.strategy.n_photons < 2:
            return super().prepare(label, index, rng)
        return trojan_prepare(label, self.strategy.n_photons, index)

    def charlie_to_alice(self, signal, record, rng):
        if record.bob_label is None or len(signal) < 2:
            return signal
        inference, forwarded = trojan_infer(
            signal,
            record.bob_label,
            self.op_set,
            self.strategy.forward_one,
            self.strategy.tree_depth,
            rng,
            true_op=record.charlie_op,
        )
        self.inferences[record.index] = inference
        if forwarded is None:
            # Bob resends one photon in the state he believes Charlie produced
            guess = apply(inference.guessed_op, state_of(record.bob_label))
            forwarded = signal.with_photons((guess,))
        return forwarded

    def alice_to_charlie(self, signal, record, rng):
        inference = self.inferences.get(record.index)
        if inference is None or len(signal) == 0:
            return signal
        stolen, resent = final_intercept(
            signal.photons[0], record.bob_label, inference.guessed_op, rng
        )
        self.stolen[record.index] = stolen
        return signal.with_photons((resent,) + signal.photons[1:])

    def report(self, result, message):
        recovered, rate = _recovery(result, message, self.stolen)
        log.debug(
            "Trojan Bob: %d inferences, recovery %s"
            % (len(self.inferences), rate)
        )
        return AttackReport(
            inferences=tuple(self.inferences.values()),
            recovered_bits=recovered,
            recovery_rate=rate,
            detected=result.aborted,
        )


class _EveAdversary(Adversary):
    def __init__(self, segment: Segment, op_set: OpSet):
        super().__init__(op_set)
        self.segment = segment
        self.intercepted = 0

    def _intercept(self, signal, rng):
        photons = []
        for photon in signal.photons:
            resent, _, _ = eve_intercept_resend(photon, rng)
            photons.append(resent)
        self.intercepted += len(photons)
        return signal.with_photons(photons)

    def bob_to_charlie(self, signal, record, rng):
        if self.segment is Segment.BOB_TO_CHARLIE:
            return self._intercept(signal, rng)
        return signal

    def charlie_to_alice(self, signal, record, rng):
        if self.segment is Segment.CHARLIE_TO_ALICE:
            return self._intercept(signal, rng)
        return signal

    def alice_to_charlie(self, signal, record, rng):
        if self.segment is Segment.ALICE_TO_CHARLIE:
            return self._intercept(signal, rng)
        return signal

    def report(self, result, message):
        return AttackReport(
            inferences=(),
            recovered_bits=None,
            recovery_rate=0.0,
            detected=result.aborted,
        )
