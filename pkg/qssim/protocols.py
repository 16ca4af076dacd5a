"""Three-party quantum secret sharing runs.

Bob prepares single photons, Charlie encrypts them, Alice (the boss)
checks a sample, encodes her message with I/U and returns the photons to
Charlie, who decodes with the initial states Bob announces. Neither agent
alone can read the message.

`run_original` is the batch protocol with Charlie's operations {I, U, H}.
`run_improved` adds Charlie's photon-number check on a sample of Bob's
signals, encryption with {I, U, H, Hbar}, Pauli check samples (S_C) and
optional decoy photons.

Adversaries plug in through the `Adversary` hooks; an `AttackStrategy`
from qssim.attacks creates one per run.
"""

import logging as log
from collections import OrderedDict, namedtuple
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from qssim.photonics import (
    NOISELESS,
    ChannelModel,
    PhotonSignal,
    make_signal,
    split_tree,
    transmit,
)
from qssim.qubit import (
    CERTAIN,
    Basis,
    GateOp,
    RandomStream,
    StateLabel,
    apply,
    basis_of,
    bit_of,
    measure,
    prob_of,
    state_of,
)
from qssim.utils import ProgrammerError, cache, round_half_up


class OpSet(Enum):
    THREE_OP = "three-op"
    FOUR_OP = "four-op"

    @property
    def ops(self) -> tuple:
        if self is OpSet.THREE_OP:
            return (GateOp.I, GateOp.U, GateOp.H)
        return (GateOp.I, GateOp.U, GateOp.H, GateOp.HBAR)


class Role(Enum):
    MESSAGE_CARRIER = "message-carrier"
    CHARLIE_PNS_SAMPLE = "charlie-pns-sample"
    ALICE_SAMPLE = "alice-sample"
    CHARLIE_CHECK_SAMPLE = "charlie-check-sample"
    DECOY = "decoy"
    RETURN_SAMPLE = "return-sample"


class Verdict(Enum):
    PASS = "pass"
    ABORT_ERROR_RATE = "abort-error-rate"
    ABORT_MULTIPHOTON = "abort-multiphoton"


class AnnounceOrder(Enum):
    BOB_FIRST = "bob-first"
    CHARLIE_FIRST = "charlie-first"


LABELS = tuple(StateLabel)
ENCODING_OPS = (GateOp.I, GateOp.U)  # bit 0, bit 1
PAULI_OPS = (GateOp.PAULI_X, GateOp.PAULI_Z)

ALICE = "alice"
BOB = "bob"
CHARLIE = "charlie"

POSITION = "sample position"
INITIAL_STATE = "initial state"
OPERATION = "operation"
ENCODE = "encode"
MEASURE = "measure"
DECOY_POSITION = "decoy position"
DECOY_STATE = "decoy state"

Announcement = namedtuple("Announcement", ("party", "content"))


@dataclass(frozen=True)
class SecretMessage:
    """Alice's message M_A as a string of '0' and '1'"""

    bits: str = ""

    def __post_init__(self):
        if any(c not in "01" for c in self.bits):
            raise ValueError("A message is a string of 0 and 1, not '%s'" % self.bits)

    @classmethod
    def from_bits(cls, bits) -> "SecretMessage":
        return cls("".join(str(int(b)) for b in bits))

    @classmethod
    def random(cls, length: int, rng: RandomStream) -> "SecretMessage":
        return cls.from_bits(rng.bits(length))

    def __len__(self):
        return len(self.bits)

    def __getitem__(self, position) -> int:
        return int(self.bits[position])

    def __str__(self):
        return self.bits


def portion(fraction: float, count: int) -> int:
    """Number of positions a party samples out of `count`"""
    return min(count, round_half_up(fraction * count))


@dataclass(frozen=True)
class ProtocolConfig:
    num_signals: int = 200
    charlie_sample_fraction: float = 0.25
    alice_sample_fraction: float = 0.25
    error_threshold: float = 0.1
    multiphoton_threshold: float = 0.02
    op_set: OpSet = OpSet.THREE_OP
    pns_check_depth: int = 1
    decoys_enabled: bool = False
    decoy_fraction: float = 0.1
    message: SecretMessage = SecretMessage()
    sc_fraction: float = 0.1
    announce_order: AnnounceOrder = AnnounceOrder.BOB_FIRST
    channel: ChannelModel = NOISELESS

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise ValueError("Invalid protocol configuration: " + "; ".join(problems))

    @classmethod
    def original(cls, **kwargs) -> "ProtocolConfig":
        kwargs.setdefault("num_signals", 200)
        return cls(op_set=OpSet.THREE_OP, **kwargs)

    @classmethod
    def improved(cls, **kwargs) -> "ProtocolConfig":
        kwargs.setdefault("num_signals", 400)
        return cls(op_set=OpSet.FOUR_OP, **kwargs)

    @property
    def is_improved(self) -> bool:
        return self.op_set is OpSet.FOUR_OP

    def problems(self) -> list:
        problems = []
        if self.num_signals < 1:
            problems.append("num_signals must be at least 1")
        for name in ("charlie_sample_fraction", "alice_sample_fraction"):
            if not 0.0 < getattr(self, name) < 1.0:
                problems.append("%s must be strictly between 0 and 1" % name)
        for name in ("sc_fraction", "decoy_fraction"):
            if not 0.0 <= getattr(self, name) < 1.0:
                problems.append("%s must be in [0, 1)" % name)
        for name in ("error_threshold", "multiphoton_threshold"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                problems.append("%s must be in [0, 1]" % name)
        if self.pns_check_depth < 1:
            problems.append("pns_check_depth must be at least 1")
        if not problems and carrier_budget(self) < len(self.message):
            problems.append(
                "%d signals leave %d message carriers, the message needs %d"
                % (self.num_signals, carrier_budget(self), len(self.message))
            )
        return problems


def sample_plan(config: ProtocolConfig) -> OrderedDict:
    """How many of the num_signals photons end up in each role"""
    plan = OrderedDict()
    remaining = config.num_signals
    if config.is_improved:
        plan["charlie_samples"] = portion(config.charlie_sample_fraction, remaining)
        remaining -= plan["charlie_samples"]
        plan["sc_samples"] = portion(config.sc_fraction, remaining)
        remaining -= plan["sc_samples"]
    plan["alice_samples"] = portion(config.alice_sample_fraction, remaining)
    remaining -= plan["alice_samples"]
    plan["return_samples"] = portion(config.alice_sample_fraction, remaining)
    remaining -= plan["return_samples"]
    plan["carriers"] = remaining
    return plan


def carrier_budget(config: ProtocolConfig) -> int:
    return sample_plan(config)["carriers"]


@dataclass(frozen=True)
class CheckReport:
    error_rate: float
    multiphoton_rate: float
    samples_used: int
    verdict: Verdict
    mismatches: int = 0
    compared: int = 0
    multiphoton: int = 0

    @classmethod
    def evaluate(
        cls, comparisons, samples_used: int, multiphoton: int, config: ProtocolConfig
    ) -> "CheckReport":
        error_rate = estimate_error_rate(comparisons) if comparisons else 0.0
        multiphoton_rate = multiphoton / samples_used if samples_used else 0.0
        if multiphoton_rate > config.multiphoton_threshold:
            verdict = Verdict.ABORT_MULTIPHOTON
        elif error_rate > config.error_threshold:
            verdict = Verdict.ABORT_ERROR_RATE
        else:
            verdict = Verdict.PASS
        return cls(
            error_rate=error_rate,
            multiphoton_rate=multiphoton_rate,
            samples_used=samples_used,
            verdict=verdict,
            mismatches=sum(1 for expected, measured in comparisons if expected != measured),
            compared=len(comparisons),
            multiphoton=multiphoton,
        )

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS

    def to_dict(self) -> OrderedDict:
        return OrderedDict(
            [
                ("error_rate", self.error_rate),
                ("multiphoton_rate", self.multiphoton_rate),
                ("samples_used", self.samples_used),
                ("compared", self.compared),
                ("mismatches", self.mismatches),
                ("multiphoton", self.multiphoton),
                ("verdict", self.verdict.value),
            ]
        )


@dataclass
class SignalRecord:
    """Bookkeeping for one transmitted signal during a run"""

    index: int
    bob_label: Optional[StateLabel]
    charlie_op: Optional[GateOp] = None
    alice_op: Optional[GateOp] = None
    role: Optional[Role] = None
    announcements: list = field(default_factory=list)
    final_bit: Optional[int] = None
    message_position: Optional[int] = None
    decoy_label: Optional[StateLabel] = None
    photons_sent: int = 1

    def announce(self, party: str, content: str):
        self.announcements.append(Announcement(party, content))

    def assign(self, role: Role):
        if self.role is not None:
            raise ProgrammerError(
                "Signal %d already has role %s, cannot become %s"
                % (self.index, self.role.value, role.value)
            )
        self.role = role

    def to_dict(self) -> OrderedDict:
        def value(enum_or_none):
            return None if enum_or_none is None else enum_or_none.value

        return OrderedDict(
            [
                ("index", self.index),
                ("role", value(self.role)),
                ("bob_label", value(self.bob_label)),
                ("decoy_label", value(self.decoy_label)),
                ("photons_sent", self.photons_sent),
                ("charlie_op", value(self.charlie_op)),
                ("alice_op", value(self.alice_op)),
                ("message_position", self.message_position),
                ("final_bit", self.final_bit),
                (
                    "announcements",
                    ["%s: %s" % (a.party, a.content) for a in self.announcements],
                ),
            ]
        )


@dataclass
class RunResult:
    decoded: Optional[SecretMessage]
    alice_check: Optional[CheckReport]
    transcript: list
    charlie_check: Optional[CheckReport] = None
    decoy_check: Optional[CheckReport] = None
    return_check: Optional[CheckReport] = None
    attacker_view: object = None
    announce_order: AnnounceOrder = AnnounceOrder.BOB_FIRST
    # Carrier photons as Charlie received them, by signal index
    received: dict = field(default_factory=dict, repr=False)

    @property
    def checks(self) -> list:
        checks = (self.charlie_check, self.decoy_check, self.alice_check, self.return_check)
        return [c for c in checks if c is not None]

    @property
    def verdict(self) -> Verdict:
        for check in self.checks:
            if not check.passed:
                return check.verdict
        return Verdict.PASS

    @property
    def aborted(self) -> bool:
        return self.verdict is not Verdict.PASS

    def records(self, role: Role) -> list:
        return [r for r in self.transcript if r.role is role]


class Adversary:
    """Hooks on every leg of the quantum channel.

    The base class is the honest case: Bob prepares single photons and
    nobody touches them in flight.
    """

    def __init__(self, op_set: OpSet = OpSet.THREE_OP):
        self.op_set = op_set

    def prepare(self, label: StateLabel, index: int, rng: RandomStream) -> PhotonSignal:
        return make_signal(state_of(label), 1, index)

    def bob_to_charlie(self, signal, record, rng):
        return signal

    def charlie_to_alice(self, signal, record, rng):
        return signal

    def alice_to_charlie(self, signal, record, rng):
        return signal

    def report(self, result: RunResult, message: SecretMessage):
        return None


def _engage(attack, op_set: OpSet) -> Adversary:
    if attack is None:
        return Adversary(op_set)
    return attack.engage(op_set)


@cache
def basis_after(label: StateLabel, charlie_op: GateOp) -> Basis:
    """The basis in which Charlie's encrypted photon is an eigenstate"""
    state = apply(charlie_op, state_of(label))
    for basis in (Basis.Z, Basis.X):
        if max(prob_of(state, basis, 0), prob_of(state, basis, 1)) >= CERTAIN:
            return basis
    raise ProgrammerError(
        "%s applied to |%s> is not an eigenstate of Z or X"
        % (charlie_op.value, label.value)
    )


@cache
def expected_bit(label: StateLabel, charlie_op: GateOp, alice_op: GateOp) -> int:
    """The certain outcome of reading a photon prepared in `label`, encrypted
    with `charlie_op` and encoded with `alice_op`, in basis_after(label, charlie_op)"""
    if alice_op not in ENCODING_OPS:
        raise ValueError("Alice encodes with I or U, not %s" % alice_op.value)
    state = apply(alice_op, apply(charlie_op, state_of(label)))
    basis = basis_after(label, charlie_op)
    p0 = prob_of(state, basis, 0)
    if p0 >= CERTAIN:
        return 0
    if p0 <= 1.0 - CERTAIN:
        return 1
    raise ProgrammerError("Encoded photon is not an eigenstate of %s" % basis.value)


def decode_bit(label: StateLabel, charlie_op: GateOp, measured: int) -> int:
    """Alice's bit: she applied I iff the reading equals the unencoded outcome"""
    return int(measured != expected_bit(label, charlie_op, GateOp.I))


def estimate_error_rate(samples) -> float:
    """Fraction of (expected bit, measured bit) pairs that disagree"""
    samples = list(samples)
    if not samples:
        raise ValueError("Cannot estimate an error rate from zero samples")
    return sum(1 for expected, measured in samples if expected != measured) / len(samples)


def _detect(signal: PhotonSignal, basis: Basis, rng: RandomStream):
    """Single-photon detector reading, None when no photon arrived"""
    if len(signal) == 0:
        return None
    bit, _ = measure(signal.photons[0], basis, rng)
    return bit


def pns_measure(signal: PhotonSignal, depth: int, rng: RandomStream) -> list:
    """Charlie's splitter check on one signal.

    Every leaf of the splitter tree is measured in its own random basis.
    Returns (basis, bit) for each leaf that registered a photon.
    """
    outcomes = []
    for leaf in split_tree(signal, depth, rng):
        basis = rng.choice((Basis.Z, Basis.X))
        if len(leaf) == 0:
            continue
        bits = [measure(photon, basis, rng)[0] for photon in leaf.photons]
        outcomes.append((basis, bits[0]))
    return outcomes


def insert_decoys(sequence, fraction: float, rng: RandomStream):
    """Interleave single-photon decoys in random states at random positions.

    Returns the augmented sequence and the registry mapping each decoy
    position to its state label.
    """
    if not 0.0 <= fraction < 1.0:
        raise ValueError("Decoy fraction must be in [0, 1), not %r" % fraction)
    sequence = list(sequence)
    count = round_half_up(fraction * len(sequence))
    total = len(sequence) + count
    positions = set(rng.sample(total, count))
    registry = OrderedDict()
    augmented = []
    originals = iter(sequence)
    for position in range(total):
        if position in positions:
            label = rng.choice(LABELS)
            registry[position] = label
            augmented.append(make_signal(state_of(label), 1, -len(registry)))
        else:
            augmented.append(next(originals))
    return augmented, registry


def _decoy_comparisons(returned, registry, rng, records=None) -> list:
    if not registry:
        raise ValueError("Decoy check needs a non-empty decoy registry")
    comparisons = []
    for position, label in registry.items():
        measured = _detect(returned[position], basis_of(label), rng)
        if records is not None:
            record = records[position]
            record.announce(CHARLIE, DECOY_POSITION)
            record.announce(CHARLIE, DECOY_STATE)
            record.final_bit = measured
        comparisons.append((bit_of(label), measured))
    return comparisons


def check_decoys(returned, registry, rng: RandomStream, records=None) -> float:
    """Error rate on decoys, each measured in its preparation basis.

    `records` optionally maps decoy positions to the SignalRecords that log
    Charlie's announcements of position and state.
    """
    return estimate_error_rate(_decoy_comparisons(returned, registry, rng, records))


def charlie_blind_decode(result: RunResult, rng: RandomStream) -> SecretMessage:
    """Charlie's reading of the message when Bob withholds the initial states.

    Charlie knows his own operation but has to guess the label.
    """
    carriers = sorted(
        (r for r in result.records(Role.MESSAGE_CARRIER) if r.message_position is not None),
        key=lambda r: r.message_position,
    )
    bits = []
    for record in carriers:
        guess = rng.choice(LABELS)
        measured, _ = measure(
            result.received[record.index], basis_after(guess, record.charlie_op), rng
        )
        bits.append(decode_bit(guess, record.charlie_op, measured))
    return SecretMessage.from_bits(bits)


def _bob_sends(config: ProtocolConfig, adversary: Adversary, rng: RandomStream):
    records, flight = [], []
    for index in range(config.num_signals):
        label = rng.choice(LABELS)
        record = SignalRecord(index, label)
        signal = adversary.prepare(label, index, rng)
        record.photons_sent = len(signal)
        signal = transmit(signal, config.channel, rng)
        signal = adversary.bob_to_charlie(signal, record, rng)
        records.append(record)
        flight.append((record, signal))
    return records, flight


def _encrypt(record: SignalRecord, signal: PhotonSignal, op: GateOp) -> PhotonSignal:
    record.charlie_op = op
    return signal.transformed(op)


def _charlie_sends(config, flight, adversary, rng) -> list:
    sent = []
    for record, signal in flight:
        signal = transmit(signal, config.channel, rng)
        sent.append((record, adversary.charlie_to_alice(signal, record, rng)))
    return sent


def _charlie_pns_check(config: ProtocolConfig, flight, rng: RandomStream):
    picked = set(rng.sample(len(flight), portion(config.charlie_sample_fraction, len(flight))))
    comparisons, multiphoton, kept = [], 0, []
    for position, (record, signal) in enumerate(flight):
        if position not in picked:
            kept.append((record, signal))
            continue
        record.assign(Role.CHARLIE_PNS_SAMPLE)
        record.announce(CHARLIE, MEASURE)
        outcomes = pns_measure(signal, config.pns_check_depth, rng)
        record.announce(BOB, INITIAL_STATE)
        if len(outcomes) >= 2:
            multiphoton += 1
            continue
        if not outcomes:
            continue
        basis, bit = outcomes[0]
        record.final_bit = bit
        # Sifting: only samples read in Bob's preparation basis count
        if basis is basis_of(record.bob_label):
            comparisons.append((bit_of(record.bob_label), bit))
    check = CheckReport.evaluate(comparisons, len(picked), multiphoton, config)
    log.debug(
        "Charlie's check: P_m = %s, error rate = %s, %s"
        % (check.multiphoton_rate, check.error_rate, check.verdict.value)
    )
    return check, kept


def _announce_alice_sample(record: SignalRecord, order: AnnounceOrder):
    record.announce(ALICE, POSITION)
    if order is AnnounceOrder.BOB_FIRST:
        record.announce(BOB, INITIAL_STATE)
        record.announce(CHARLIE, OPERATION)
    else:
        record.announce(CHARLIE, OPERATION)
        record.announce(BOB, INITIAL_STATE)


def _compare_unencoded(record: SignalRecord, signal: PhotonSignal, rng: RandomStream):
    basis = basis_after(record.bob_label, record.charlie_op)
    expected = expected_bit(record.bob_label, record.charlie_op, GateOp.I)
    record.final_bit = _detect(signal, basis, rng)
    return expected, record.final_bit


def _alice_check(config: ProtocolConfig, flight, rng: RandomStream, comparisons=()):
    """Alice samples the photons nobody has claimed yet and checks them
    against the announced states and operations"""
    comparisons = list(comparisons)
    pool = [(r, s) for r, s in flight if r.role is None]
    picked = set(rng.sample(len(pool), portion(config.alice_sample_fraction, len(pool))))
    stored = []
    for position, (record, signal) in enumerate(pool):
        if position not in picked:
            stored.append((record, signal))
            continue
        record.assign(Role.ALICE_SAMPLE)
        _announce_alice_sample(record, config.announce_order)
        comparisons.append(_compare_unencoded(record, signal, rng))
    check = CheckReport.evaluate(comparisons, len(comparisons), 0, config)
    log.debug(
        "Alice's check: error rate = %s over %d samples, %s"
        % (check.error_rate, check.compared, check.verdict.value)
    )
    return check, stored


def _encode_and_decode(config, stored, adversary, rng, result: RunResult):
    """Alice encodes S'' and sends it to Charlie, who checks the return leg
    and then reads the message with Bob's labels"""
    message = config.message
    picked = set(rng.sample(len(stored), portion(config.alice_sample_fraction, len(stored))))
    carriers = 0
    returned = []
    for position, (record, signal) in enumerate(stored):
        if position in picked:
            record.assign(Role.RETURN_SAMPLE)
            alice_op = rng.choice(ENCODING_OPS)
        else:
            record.assign(Role.MESSAGE_CARRIER)
            if carriers < len(message):
                record.message_position = carriers
                alice_op = ENCODING_OPS[message[carriers]]
            else:
                alice_op = rng.choice(ENCODING_OPS)
            carriers += 1
        record.alice_op = alice_op
        record.announce(ALICE, ENCODE)
        signal = transmit(signal.transformed(alice_op), config.channel, rng)
        returned.append((record, adversary.alice_to_charlie(signal, record, rng)))

    comparisons = []
    for record, signal in returned:
        if record.role is not Role.RETURN_SAMPLE:
            if len(signal) > 0:
                result.received[record.index] = signal.photons[0]
            continue
        record.announce(ALICE, POSITION)
        record.announce(ALICE, OPERATION)
        record.announce(BOB, INITIAL_STATE)
        basis = basis_after(record.bob_label, record.charlie_op)
        expected = expected_bit(record.bob_label, record.charlie_op, record.alice_op)
        record.final_bit = _detect(signal, basis, rng)
        comparisons.append((expected, record.final_bit))
    result.return_check = CheckReport.evaluate(comparisons, len(comparisons), 0, config)
    if not result.return_check.passed:
        log.debug("Return leg check failed, message withheld")
        return

    bits = [None] * len(message)
    for record, signal in returned:
        if record.role is not Role.MESSAGE_CARRIER:
            continue
        record.announce(BOB, INITIAL_STATE)
        record.announce(CHARLIE, MEASURE)
        measured = _detect(signal, basis_after(record.bob_label, record.charlie_op), rng)
        if measured is None:
            measured = rng.bit()  # no click, Charlie guesses
        record.final_bit = measured
        if record.message_position is not None:
            bits[record.message_position] = decode_bit(
                record.bob_label, record.charlie_op, measured
            )
    result.decoded = SecretMessage.from_bits(bits)


def run_original(
    config: ProtocolConfig, attack=None, rng: RandomStream = None
) -> RunResult:
    if config.op_set is not OpSet.THREE_OP:
        raise ValueError("The original protocol encrypts with {I, U, H} (THREE_OP)")
    if config.decoys_enabled:
        raise ValueError("Decoy photons are only part of the improved protocol")
    if rng is None:
        raise ValueError("A RandomStream is required")
    adversary = _engage(attack, config.op_set)

    records, flight = _bob_sends(config, adversary, rng)
    flight = [(r, _encrypt(r, s, rng.choice(config.op_set.ops))) for r, s in flight]
    flight = _charlie_sends(config, flight, adversary, rng)

    alice_check, stored = _alice_check(config, flight, rng)
    result = RunResult(
        decoded=None,
        alice_check=alice_check,
        transcript=records,
        announce_order=config.announce_order,
    )
    if alice_check.passed:
        _encode_and_decode(config, stored, adversary, rng, result)
    result.attacker_view = adversary.report(result, config.message)
    return result


def run_improved(
    config: ProtocolConfig, attack=None, rng: RandomStream = None
) -> RunResult:
    if config.op_set is not OpSet.FOUR_OP:
        raise ValueError("The improved protocol encrypts with {I, U, H, Hbar} (FOUR_OP)")
    if rng is None:
        raise ValueError("A RandomStream is required")
    adversary = _engage(attack, config.op_set)

    # (a)-(c): Bob sends S, Charlie splits and measures a sample
    records, flight = _bob_sends(config, adversary, rng)
    charlie_check, flight = _charlie_pns_check(config, flight, rng)
    result = RunResult(
        decoded=None,
        alice_check=None,
        transcript=records,
        charlie_check=charlie_check,
        announce_order=config.announce_order,
    )
    if not charlie_check.passed:
        result.attacker_view = adversary.report(result, config.message)
        return result

    # (d): encryption, S_C samples get sigma_x or sigma_z
    sc_positions = set(rng.sample(len(flight), portion(config.sc_fraction, len(flight))))
    encrypted = []
    for position, (record, signal) in enumerate(flight):
        if position in sc_positions:
            record.assign(Role.CHARLIE_CHECK_SAMPLE)
            op = rng.choice(PAULI_OPS)
        else:
            op = rng.choice(config.op_set.ops)
        encrypted.append((record, _encrypt(record, signal, op)))

    decoy_records = OrderedDict()
    if config.decoys_enabled:
        signals, registry = insert_decoys([s for _, s in encrypted], config.decoy_fraction, rng)
        pairs = iter(encrypted)
        encrypted = []
        for position, signal in enumerate(signals):
            if position not in registry:
                encrypted.append(next(pairs))
                continue
            record = SignalRecord(
                config.num_signals + len(decoy_records),
                None,
                role=Role.DECOY,
                decoy_label=registry[position],
            )
            records.append(record)
            decoy_records[position] = record
            encrypted.append((record, signal))

    # (e)-(f): Charlie names S_C and decoy positions, Alice checks
    flight = _charlie_sends(config, encrypted, adversary, rng)
    comparisons = []
    for record, signal in flight:
        if record.role is Role.CHARLIE_CHECK_SAMPLE:
            record.announce(CHARLIE, POSITION)
            record.announce(BOB, INITIAL_STATE)
            record.announce(CHARLIE, OPERATION)
            comparisons.append(_compare_unencoded(record, signal, rng))
    if decoy_records:
        registry = OrderedDict((p, r.decoy_label) for p, r in decoy_records.items())
        decoy_comparisons = _decoy_comparisons(
            [s for _, s in flight], registry, rng, decoy_records
        )
        result.decoy_check = CheckReport.evaluate(
            decoy_comparisons, len(decoy_comparisons), 0, config
        )
    result.alice_check, stored = _alice_check(config, flight, rng, comparisons)

    # (g)-(h)
    if not result.aborted:
        _encode_and_decode(config, stored, adversary, rng, result)
    result.attacker_view = adversary.report(result, config.message)
    return result


def run_protocol(config: ProtocolConfig, attack=None, rng: RandomStream = None) -> RunResult:
    if config.is_improved:
        return run_improved(config, attack, rng)
    return run_original(config, attack, rng)


_ALICE_SAMPLE_ORDER = {
    AnnounceOrder.BOB_FIRST: ((ALICE, POSITION), (BOB, INITIAL_STATE), (CHARLIE, OPERATION)),
    AnnounceOrder.CHARLIE_FIRST: ((ALICE, POSITION), (CHARLIE, OPERATION), (BOB, INITIAL_STATE)),
}

_DECLARED_ORDER = {
    Role.CHARLIE_PNS_SAMPLE: ((CHARLIE, MEASURE), (BOB, INITIAL_STATE)),
    Role.CHARLIE_CHECK_SAMPLE: ((CHARLIE, POSITION), (BOB, INITIAL_STATE), (CHARLIE, OPERATION)),
    Role.DECOY: ((CHARLIE, DECOY_POSITION), (CHARLIE, DECOY_STATE)),
    Role.RETURN_SAMPLE: ((ALICE, ENCODE), (ALICE, POSITION), (ALICE, OPERATION), (BOB, INITIAL_STATE)),
    Role.MESSAGE_CARRIER: ((ALICE, ENCODE), (BOB, INITIAL_STATE), (CHARLIE, MEASURE)),
}


def announcement_violations(record: SignalRecord, order: AnnounceOrder = None) -> list:
    """Problems with the order of one record's announcements.

    Announcements must follow the declared sequence for the record's role,
    possibly cut short by an abort. For Alice's samples either order of
    Bob's and Charlie's answers is accepted unless `order` is given.
    """
    made = tuple(record.announcements)
    if record.role is None:
        allowed = [()]
    elif record.role is Role.ALICE_SAMPLE:
        orders = [order] if order is not None else list(AnnounceOrder)
        allowed = [_ALICE_SAMPLE_ORDER[o] for o in orders]
    else:
        allowed = [_DECLARED_ORDER[record.role]]
    for sequence in allowed:
        if made == sequence[: len(made)]:
            return []
    return [
        "Signal %d (%s): announcements %s do not follow %s"
        % (
            record.index,
            record.role.value if record.role else "no role",
            [tuple(a) for a in made],
            [list(s) for s in allowed],
        )
    ]


def transcript_violations(result: RunResult, strict_order: bool = True) -> list:
    order = result.announce_order if strict_order else None
    problems = []
    for record in result.transcript:
        problems.extend(announcement_violations(record, order))
    pre_encoding = (result.charlie_check, result.decoy_check, result.alice_check)
    if any(c is not None and not c.passed for c in pre_encoding):
        for record in result.transcript:
            if Announcement(ALICE, ENCODE) in record.announcements:
                problems.append(
                    "Signal %d: Alice encoded after a failed check" % record.index
                )
    if result.aborted and result.decoded is not None:
        problems.append("A message was decoded in an aborted run")
    return problems
