import math

import pytest

from qssim.attacks import (
    NO_ATTACK,
    InterceptResendEve,
    Segment,
    TrojanBob,
    eve_intercept_resend,
)
from qssim.photonics import ChannelModel, make_signal, transmit
from qssim.protocols import (
    ALICE,
    BOB,
    CHARLIE,
    ENCODE,
    ENCODING_OPS,
    INITIAL_STATE,
    LABELS,
    OPERATION,
    PAULI_OPS,
    POSITION,
    AnnounceOrder,
    OpSet,
    ProtocolConfig,
    Role,
    SecretMessage,
    SignalRecord,
    Verdict,
    announcement_violations,
    basis_after,
    carrier_budget,
    charlie_blind_decode,
    check_decoys,
    decode_bit,
    estimate_error_rate,
    expected_bit,
    insert_decoys,
    pns_measure,
    run_improved,
    run_original,
    sample_plan,
    transcript_violations,
)
from qssim.qubit import Basis, GateOp, RandomStream, StateLabel, state_of
from qssim.stats import within_sigmas


def _message(seed, length=64):
    return SecretMessage.random(length, RandomStream(seed).child(1000))


@pytest.mark.parametrize(
    "op, same_basis",
    [
        (GateOp.I, True),
        (GateOp.U, True),
        (GateOp.H, False),
        (GateOp.HBAR, False),
        (GateOp.PAULI_X, True),
        (GateOp.PAULI_Z, True),
    ],
)
def test_basis_after(op, same_basis):
    for label in LABELS:
        basis = basis_after(label, op)
        own = Basis.Z if label in (StateLabel.ZERO, StateLabel.ONE) else Basis.X
        assert (basis is own) == same_basis


def test_encoding_round_trips_for_every_case():
    for label in LABELS:
        for op in OpSet.FOUR_OP.ops + PAULI_OPS:
            assert expected_bit(label, op, GateOp.U) == 1 - expected_bit(label, op, GateOp.I)
            for bit, alice_op in enumerate(ENCODING_OPS):
                assert decode_bit(label, op, expected_bit(label, op, alice_op)) == bit


def test_alice_only_encodes_with_i_or_u():
    with pytest.raises(ValueError):
        expected_bit(StateLabel.ZERO, GateOp.I, GateOp.H)


def test_estimate_error_rate():
    assert estimate_error_rate([(0, 0), (1, 0)]) == 0.5
    assert estimate_error_rate([(1, 1)]) == 0.0
    with pytest.raises(ValueError):
        estimate_error_rate([])


def test_secret_message():
    message = SecretMessage("0110")
    assert len(message) == 4
    assert message[1] == 1
    assert SecretMessage.from_bits([0, 1, 1, 0]) == message
    with pytest.raises(ValueError):
        SecretMessage("012")


def test_sample_plan():
    assert sample_plan(ProtocolConfig.original()) == {
        "alice_samples": 50,
        "return_samples": 38,
        "carriers": 112,
    }
    plan = sample_plan(ProtocolConfig.improved())
    assert plan["charlie_samples"] == 100
    assert plan["sc_samples"] == 30
    assert plan["alice_samples"] == 68
    assert plan["return_samples"] == 51
    assert carrier_budget(ProtocolConfig.improved()) == plan["carriers"] == 151


def test_config_validation():
    with pytest.raises(ValueError, match="charlie_sample_fraction"):
        ProtocolConfig(charlie_sample_fraction=1.0)
    with pytest.raises(ValueError, match="num_signals"):
        ProtocolConfig(num_signals=0)
    with pytest.raises(ValueError, match="message carriers"):
        ProtocolConfig(num_signals=20, message=SecretMessage("0" * 64))


def test_protocols_check_their_op_set():
    with pytest.raises(ValueError):
        run_improved(ProtocolConfig.original(), None, RandomStream(0))
    with pytest.raises(ValueError):
        run_original(ProtocolConfig.improved(), None, RandomStream(0))
    with pytest.raises(ValueError):
        run_original(ProtocolConfig.original(decoys_enabled=True), None, RandomStream(0))


@pytest.mark.parametrize("seed", range(25))
def test_original_honest_run_decodes_the_message(seed):
    message = _message(seed)
    config = ProtocolConfig.original(message=message)
    result = run_original(config, None, RandomStream(seed))
    assert result.verdict is Verdict.PASS
    assert result.alice_check.error_rate == 0.0
    assert result.return_check.error_rate == 0.0
    assert result.decoded == message
    assert transcript_violations(result) == []
    plan = sample_plan(config)
    assert len(result.records(Role.ALICE_SAMPLE)) == plan["alice_samples"]
    assert len(result.records(Role.RETURN_SAMPLE)) == plan["return_samples"]
    assert len(result.records(Role.MESSAGE_CARRIER)) == plan["carriers"]


@pytest.mark.parametrize("seed", range(10))
def test_improved_honest_run_decodes_the_message(seed):
    message = _message(seed)
    config = ProtocolConfig.improved(message=message, decoys_enabled=True)
    result = run_improved(config, NO_ATTACK, RandomStream(seed))
    assert result.verdict is Verdict.PASS
    assert result.charlie_check.multiphoton_rate == 0.0
    assert result.charlie_check.error_rate == 0.0
    assert result.decoy_check.error_rate == 0.0
    assert result.alice_check.error_rate == 0.0
    assert result.decoded == message
    assert transcript_violations(result) == []
    assert len(result.records(Role.DECOY)) == 30
    assert all(r.charlie_op in PAULI_OPS for r in result.records(Role.CHARLIE_CHECK_SAMPLE))


def test_charlie_first_order_is_recorded():
    config = ProtocolConfig.original(announce_order=AnnounceOrder.CHARLIE_FIRST)
    result = run_original(config, None, RandomStream(3))
    sample = result.records(Role.ALICE_SAMPLE)[0]
    assert [tuple(a) for a in sample.announcements] == [
        (ALICE, POSITION),
        (CHARLIE, OPERATION),
        (BOB, INITIAL_STATE),
    ]
    assert transcript_violations(result) == []


def test_announcement_violations():
    record = SignalRecord(0, StateLabel.ZERO, role=Role.ALICE_SAMPLE)
    record.announce(BOB, INITIAL_STATE)
    record.announce(ALICE, POSITION)
    assert announcement_violations(record)
    record = SignalRecord(1, StateLabel.ZERO, role=Role.ALICE_SAMPLE)
    record.announce(ALICE, POSITION)
    record.announce(CHARLIE, OPERATION)
    assert announcement_violations(record) == []
    assert announcement_violations(record, AnnounceOrder.BOB_FIRST)
    record = SignalRecord(2, StateLabel.ONE)
    record.announce(ALICE, ENCODE)
    assert announcement_violations(record)


def test_insert_decoys(rng):
    sequence = [make_signal(state_of(StateLabel.ZERO), 1, i) for i in range(40)]
    augmented, registry = insert_decoys(sequence, 0.25, rng)
    assert len(registry) == 10
    assert len(augmented) == 50
    originals = [s for p, s in enumerate(augmented) if p not in registry]
    assert originals == sequence
    for position, label in registry.items():
        assert augmented[position].photons[0] == state_of(label)
        assert augmented[position].origin_index < 0
    assert check_decoys(augmented, registry, rng) == 0.0
    with pytest.raises(ValueError):
        check_decoys(augmented, {}, rng)
    with pytest.raises(ValueError):
        insert_decoys(sequence, 1.0, rng)


def _decoys(rng, count=10000):
    # 10000 decoys among 2500 signals
    sequence = [make_signal(state_of(StateLabel.ZERO), 1, i) for i in range(count // 4)]
    augmented, registry = insert_decoys(sequence, 0.8, rng)
    assert len(registry) == count
    return augmented, registry


def test_decoys_after_a_flipping_channel(rng):
    augmented, registry = _decoys(rng)
    flipped = [transmit(s, ChannelModel(1.0), rng) for s in augmented]
    # sigma_x flips the Z basis decoys and leaves the X basis ones alone
    assert within_sigmas(check_decoys(flipped, registry, rng), 0.5, len(registry))


def test_decoys_after_intercept_resend(rng):
    augmented, registry = _decoys(rng)
    intercepted = [
        s.with_photons([eve_intercept_resend(p, rng)[0] for p in s.photons])
        for s in augmented
    ]
    assert within_sigmas(check_decoys(intercepted, registry, rng), 0.25, len(registry))


def test_pns_measure_single_photon(rng):
    outcomes = pns_measure(make_signal(state_of(StateLabel.ONE), 1), 2, rng)
    assert len(outcomes) == 1


def test_trojan_horse_is_invisible_to_the_original_protocol():
    recovered = 0
    bits = 0
    misidentified = 0
    inferences = 0
    for seed in range(60):
        message = _message(seed, 100)
        config = ProtocolConfig.original(message=message)
        result = run_original(config, TrojanBob(4, forward_one=True), RandomStream(seed))
        assert result.alice_check.error_rate == 0.0
        report = result.attacker_view
        assert report.recovered_bits is not None
        recovered += sum(report.recovered_bits[i] == message[i] for i in range(len(message)))
        bits += len(message)
        misidentified += report.misidentified_count
        inferences += len(report.inferences)
    assert recovered / bits >= 0.95
    # Only wrong guesses measured in the wrong basis lose a bit
    assert within_sigmas(recovered / bits, 1 - (1 / 12) / 2, bits)
    # Three measured photons: Bob guesses wrong on 1/12 of the signals
    assert within_sigmas(misidentified / inferences, 1 / 12, inferences)


def test_trojan_without_forwarding_disturbs_alice():
    mismatches = 0
    for seed in range(20):
        result = run_original(
            ProtocolConfig.original(), TrojanBob(4, forward_one=False), RandomStream(seed)
        )
        mismatches += result.alice_check.mismatches
    assert mismatches > 0


def test_single_photon_bob_learns_nothing():
    message = _message(4)
    result = run_original(
        ProtocolConfig.original(message=message), TrojanBob(1), RandomStream(4)
    )
    assert result.decoded == message
    assert result.attacker_view.inferences == ()
    assert result.attacker_view.recovery_rate == 0.0


@pytest.mark.parametrize("seed", range(10))
def test_improved_protocol_catches_the_trojan_horse(seed):
    result = run_improved(ProtocolConfig.improved(), TrojanBob(4), RandomStream(seed))
    assert result.verdict is Verdict.ABORT_MULTIPHOTON
    assert result.charlie_check.samples_used == 100
    assert result.charlie_check.multiphoton_rate > 0.5
    assert result.alice_check is None
    assert result.decoded is None
    assert result.attacker_view.detected
    assert transcript_violations(result) == []
    assert all((ALICE, ENCODE) not in r.announcements for r in result.transcript)


def test_splitter_check_flags_seven_of_eight_trojan_signals():
    flagged = 0
    samples = 0
    config = ProtocolConfig.improved(pns_check_depth=1)
    for seed in range(100):
        result = run_improved(config, TrojanBob(4), RandomStream(seed))
        flagged += result.charlie_check.multiphoton
        samples += result.charlie_check.samples_used
    assert samples == 10000
    assert within_sigmas(flagged / samples, 7 / 8, samples)


def test_honest_signals_are_never_flagged():
    for seed in range(5):
        result = run_improved(ProtocolConfig.improved(), None, RandomStream(seed))
        assert result.charlie_check.multiphoton == 0
        assert result.charlie_check.multiphoton_rate == 0.0


def test_outsider_error_rate_in_the_improved_protocol():
    mismatches = compared = 0
    # About half of Charlie's 100 samples survive sifting
    for seed in range(240):
        result = run_improved(ProtocolConfig.improved(), InterceptResendEve(), RandomStream(seed))
        mismatches += result.charlie_check.mismatches
        compared += result.charlie_check.compared
    assert compared > 10000
    assert within_sigmas(mismatches / compared, 0.25, compared)


@pytest.mark.parametrize("segment", list(Segment))
def test_outsider_error_rate_is_a_quarter(segment):
    mismatches = compared = 0
    for seed in range(40):
        result = run_original(
            ProtocolConfig.original(), InterceptResendEve(segment), RandomStream(seed)
        )
        check = result.alice_check if segment is not Segment.ALICE_TO_CHARLIE else result.return_check
        if check is None:
            continue
        mismatches += check.mismatches
        compared += check.compared
    assert compared > 500
    assert within_sigmas(mismatches / compared, 0.25, compared)


@pytest.mark.parametrize("protocol", ["original", "improved"])
def test_outsider_is_always_detected(protocol):
    for seed in range(30):
        if protocol == "original":
            config = ProtocolConfig.original(error_threshold=0.0)
            result = run_original(config, InterceptResendEve(), RandomStream(seed))
        else:
            config = ProtocolConfig.improved(error_threshold=0.0)
            result = run_improved(config, InterceptResendEve(), RandomStream(seed))
        assert result.verdict is Verdict.ABORT_ERROR_RATE
        assert result.decoded is None


def test_charlie_alone_reads_half_the_bits():
    right = 0
    bits = 0
    for seed in range(20):
        message = _message(seed)
        rng = RandomStream(seed)
        result = run_original(ProtocolConfig.original(message=message), None, rng)
        guess = charlie_blind_decode(result, rng)
        right += sum(guess[i] == message[i] for i in range(len(message)))
        bits += len(message)
    assert within_sigmas(right / bits, 0.5, bits)
