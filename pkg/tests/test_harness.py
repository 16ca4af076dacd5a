import math

import pytest

from qssim import harness
from qssim.attacks import pe_exact, pe_paper
from qssim.experiment_config import load_config
from qssim.harness import (
    binomial_tail_above,
    detection_curve,
    run_trials,
    sweep_photon_count,
)
from qssim.protocols import OpSet
from qssim.stats import Proportion, binomial_sigma, wilson_interval, within_sigmas


def test_wilson_interval():
    low, high = wilson_interval(0, 10)
    assert low == 0.0
    assert 0.0 < high < 0.35
    low, high = wilson_interval(5, 10)
    assert math.isclose(0.5 - low, high - 0.5)
    assert wilson_interval(0, 0) == (0.0, 1.0)
    with pytest.raises(ValueError):
        wilson_interval(11, 10)


def test_binomial_sigma():
    assert math.isclose(binomial_sigma(0.5, 100), 0.05)
    assert Proportion(3, 4).mean == 0.75
    assert (Proportion(1, 2) + Proportion(2, 3)) == Proportion(3, 5)


def test_honest_trials():
    config = load_config(overrides={"trials": 12, "seed": 3})
    stats, records = run_trials(config)
    assert [r.trial for r in records] == list(range(12))
    assert stats.trials == 12
    assert stats.epsilon_r.successes == 0
    assert stats.epsilon_r.trials == 12 * 50
    assert stats.decoded_ok.successes == 12
    assert stats.detection.successes == 0
    assert all(r.epsilon_r == 0.0 for r in records)


def test_trials_do_not_depend_on_workers(monkeypatch):
    monkeypatch.setattr(harness, "TRIALS_PER_JOB", 2)
    config = load_config(overrides={"trials": 6, "attack": "trojan", "seed": 11})
    _, serial = run_trials(config)
    _, parallel = run_trials(config.with_overrides(workers=3))
    assert [r.to_dict() for r in serial] == [r.to_dict() for r in parallel]


def test_improved_trials_detect_the_trojan_horse():
    config = load_config(overrides={"protocol": "improved", "attack": "trojan", "trials": 5})
    stats, records = run_trials(config)
    assert stats.detection.successes == 5
    assert all(r.verdict == "abort-multiphoton" for r in records)
    assert stats.p_m.mean > 0.5


def test_trojan_trials_pool_misidentifications():
    config = load_config(overrides={"attack": "trojan", "trials": 10, "seed": 5})
    stats, records = run_trials(config)
    assert stats.ambiguity.trials == sum(r.inferences for r in records) > 0
    assert stats.ambiguity.successes == sum(r.misidentified_count for r in records)
    # Three photons measured per signal
    assert within_sigmas(stats.ambiguity.mean, 1 / 12, stats.ambiguity.trials)
    assert stats.epsilon_r.successes == 0


def test_transcripts_are_kept_on_request():
    config = load_config(overrides={"trials": 2, "save-transcripts": True})
    _, records = run_trials(config)
    assert len(records[0].transcript) == 200
    _, records = run_trials(config.with_overrides(save_transcripts=False))
    assert records[0].transcript is None


def test_sweep_photon_count():
    config = load_config(overrides={"trials": 200000, "seed": 8})
    rows = sweep_photon_count(config, [1, 2, 4, 10])
    assert [row.n for row in rows] == [1, 2, 4, 10]
    for row in rows:
        assert row.pe_paper == pe_paper(row.n)
        assert row.pe_exact == pe_exact(row.n, OpSet.THREE_OP, row.n)
        assert within_sigmas(row.monte_carlo.mean, row.pe_exact, row.monte_carlo.trials)
    assert math.isclose(rows[0].pe_exact, 1 / 3)
    assert math.isclose(rows[2].pe_paper, 1 / 48)
    assert math.isclose(rows[2].pe_exact, 1 / 24)
    with pytest.raises(ValueError):
        sweep_photon_count(config, [])


def test_sweep_uses_four_operations_for_the_improved_protocol():
    config = load_config(overrides={"trials": 100000, "protocol": "improved"})
    (row,) = sweep_photon_count(config, [4])
    assert row.pe_exact == 0.25
    assert within_sigmas(row.monte_carlo.mean, 0.25, row.monte_carlo.trials)


def test_sweep_batches_are_reproducible(monkeypatch):
    monkeypatch.setattr(harness, "BATCH_SIZE", 1000)
    config = load_config(overrides={"trials": 3500, "seed": 2})
    first = sweep_photon_count(config, [2, 4])
    second = sweep_photon_count(config.with_overrides(workers=2), [2, 4])
    assert first == second


def test_detection_curve():
    config = load_config(overrides={"trials": 10000, "seed": 4})
    rows = detection_curve(config, [1, 4], [1, 2])
    assert [(r.n, r.depth) for r in rows] == [(1, 1), (1, 2), (4, 1), (4, 2)]
    assert rows[0].monte_carlo.successes == 0
    assert math.isclose(rows[0].run_abort, 0.0, abs_tol=1e-15)
    four = rows[2]
    assert four.exact == 7 / 8
    assert within_sigmas(four.monte_carlo.mean, 7 / 8, 10000)
    assert four.samples_per_run == 100
    assert four.run_abort > 0.999999
    assert rows[3].exact == 1 - 4.0**-3


def test_binomial_tail_above():
    assert math.isclose(binomial_tail_above(2, 0.5, 0.5), 0.75)
    assert math.isclose(binomial_tail_above(10, 0.0, 2), 0.0, abs_tol=1e-15)
    assert math.isclose(binomial_tail_above(100, 7 / 8, 2), 1.0)
