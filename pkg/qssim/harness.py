"""Seeded Monte Carlo experiments over the protocol runs.

Trial t of an experiment with seed s draws everything from the child
stream (s, t). Sweeps and detection curves work in fixed size batches,
batch b for parameter value v drawing from (s, v, b). Work is spread over
a process pool and results are folded in index order, so output depends
only on the configuration and never on the number of workers.
"""

import logging as log
import math
from collections import OrderedDict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from scipy.stats import binom

from qssim.attacks import infer_batch, pe_exact, pe_paper
from qssim.experiment_config import ExperimentConfig
from qssim.photonics import multi_fire_probability
from qssim.protocols import RunResult, run_protocol, sample_plan
from qssim.qubit import RandomStream
from qssim.stats import Proportion

BATCH_SIZE = 100_000
TRIALS_PER_JOB = 25


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    protocol: str
    attack: str
    verdict: str
    signals: int
    epsilon_r: float
    p_m: float
    recovery_rate: float
    ambiguous_count: int
    decoded_ok: bool
    misidentified_count: int = 0
    checks: OrderedDict = field(default_factory=OrderedDict)
    # Counts pooled into SummaryStats
    alice_mismatches: int = 0
    alice_compared: int = 0
    multiphoton: int = 0
    charlie_samples: int = 0
    recovered_right: int = 0
    message_bits: int = 0
    inferences: int = 0
    transcript: Optional[list] = None

    def to_dict(self) -> OrderedDict:
        return OrderedDict(
            [
                ("trial", self.trial),
                ("protocol", self.protocol),
                ("attack", self.attack),
                ("verdict", self.verdict),
                ("signals", self.signals),
                ("epsilon_r", self.epsilon_r),
                ("p_m", self.p_m),
                ("checks", self.checks),
                ("recovery_rate", self.recovery_rate),
                ("ambiguous_count", self.ambiguous_count),
                ("misidentified_count", self.misidentified_count),
                ("decoded_ok", self.decoded_ok),
            ]
        )


@dataclass(frozen=True)
class SummaryStats:
    trials: int
    epsilon_r: Proportion
    p_m: Proportion
    recovery_rate: Proportion
    ambiguity: Proportion
    detection: Proportion
    decoded_ok: Proportion

    @classmethod
    def fold(cls, records) -> "SummaryStats":
        records = list(records)
        return cls(
            trials=len(records),
            epsilon_r=Proportion(
                sum(r.alice_mismatches for r in records),
                sum(r.alice_compared for r in records),
            ),
            p_m=Proportion(
                sum(r.multiphoton for r in records),
                sum(r.charlie_samples for r in records),
            ),
            recovery_rate=Proportion(
                sum(r.recovered_right for r in records),
                sum(r.message_bits for r in records),
            ),
            ambiguity=Proportion(
                sum(r.misidentified_count for r in records),
                sum(r.inferences for r in records),
            ),
            detection=Proportion(sum(1 for r in records if r.verdict != "pass"), len(records)),
            decoded_ok=Proportion(sum(1 for r in records if r.decoded_ok), len(records)),
        )

    def to_dict(self) -> OrderedDict:
        data = OrderedDict([("trials", self.trials)])
        for name in ("epsilon_r", "p_m", "recovery_rate", "ambiguity", "detection", "decoded_ok"):
            data[name] = getattr(self, name).to_dict()
        return data


def _map(func, jobs, workers: int) -> list:
    """func over jobs, results in job order"""
    jobs = list(jobs)
    if workers <= 1 or len(jobs) <= 1:
        return [func(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, jobs))


def summarize_trial(trial: int, config: ExperimentConfig, message, result: RunResult) -> TrialRecord:
    checks = OrderedDict()
    for name in ("charlie_check", "decoy_check", "alice_check", "return_check"):
        check = getattr(result, name)
        if check is not None:
            checks[name.replace("_check", "")] = check.to_dict()
    first = result.alice_check or result.charlie_check
    report = result.attacker_view
    right = 0
    if report is not None and report.recovered_bits is not None:
        right = sum(1 for i in range(len(message)) if report.recovered_bits[i] == message[i])
    return TrialRecord(
        trial=trial,
        protocol=config.protocol,
        attack=config["attack"],
        verdict=result.verdict.value,
        signals=config["signals"],
        epsilon_r=first.error_rate,
        p_m=result.charlie_check.multiphoton_rate if result.charlie_check else 0.0,
        recovery_rate=report.recovery_rate if report is not None else 0.0,
        ambiguous_count=report.ambiguous_count if report is not None else 0,
        misidentified_count=report.misidentified_count if report is not None else 0,
        decoded_ok=result.decoded == message,
        checks=checks,
        alice_mismatches=result.alice_check.mismatches if result.alice_check else 0,
        alice_compared=result.alice_check.compared if result.alice_check else 0,
        multiphoton=result.charlie_check.multiphoton if result.charlie_check else 0,
        charlie_samples=result.charlie_check.samples_used if result.charlie_check else 0,
        recovered_right=right,
        message_bits=len(message) if report is not None else 0,
        inferences=len(report.inferences) if report is not None else 0,
        transcript=[r.to_dict() for r in result.transcript] if config.save_transcripts else None,
    )


def run_trial(config: ExperimentConfig, trial: int) -> TrialRecord:
    rng = RandomStream(config.seed).child(trial)
    message = config.message_for(rng)
    result = run_protocol(config.protocol_config(message), config.attack_strategy(), rng)
    log.debug("Trial %d: %s" % (trial, result.verdict.value))
    return summarize_trial(trial, config, message, result)


def _run_trial_range(job) -> list:
    config, start, stop = job
    return [run_trial(config, t) for t in range(start, stop)]


def run_trials(config: ExperimentConfig):
    """Returns (SummaryStats, per-trial records in trial order)"""
    jobs = [
        (config, start, min(start + TRIALS_PER_JOB, config.trials))
        for start in range(0, config.trials, TRIALS_PER_JOB)
    ]
    log.info(
        "Running %d trials of the %s protocol (attack: %s) on %d worker(s)"
        % (config.trials, config.protocol, config["attack"], config.workers)
    )
    records = [r for batch in _map(_run_trial_range, jobs, config.workers) for r in batch]
    return SummaryStats.fold(records), records


def _batches(trials: int) -> list:
    return [(b, min(BATCH_SIZE, trials - b * BATCH_SIZE)) for b in range(math.ceil(trials / BATCH_SIZE))]


@dataclass(frozen=True)
class SweepRow:
    n: int
    pe_paper: float
    pe_exact: float
    monte_carlo: Proportion

    def to_dict(self) -> OrderedDict:
        low, high = self.monte_carlo.interval
        return OrderedDict(
            [
                ("n", self.n),
                ("pe_paper", self.pe_paper),
                ("pe_exact", self.pe_exact),
                ("monte_carlo", self.monte_carlo.mean),
                ("ci95_low", low),
                ("ci95_high", high),
                ("misidentified", self.monte_carlo.successes),
                ("trials", self.monte_carlo.trials),
            ]
        )


def _sweep_batch(job) -> int:
    seed, n, op_set, batch, size = job
    rng = RandomStream(seed).child(n).child(batch)
    return infer_batch(n, op_set, size, rng).misidentified


def sweep_photon_count(config: ExperimentConfig, n_values) -> list:
    """Single-signal inference experiments, `trials` per photon count.

    Bob measures all n photons and Charlie picks uniformly from the op set
    of the configured protocol.
    """
    n_values = list(n_values)
    if not n_values:
        raise ValueError("n_values must not be empty")
    jobs = [
        (config.seed, n, config.op_set, batch, size)
        for n in n_values
        for batch, size in _batches(config.trials)
    ]
    counts = iter(_map(_sweep_batch, jobs, config.workers))
    rows = []
    for n in n_values:
        misidentified = sum(next(counts) for _ in _batches(config.trials))
        row = SweepRow(
            n=n,
            pe_paper=pe_paper(n),
            pe_exact=pe_exact(n, config.op_set, n),
            monte_carlo=Proportion(misidentified, config.trials),
        )
        log.info("Sweep n=%d: %d/%d misidentified" % (n, misidentified, config.trials))
        rows.append(row)
    return rows


def binomial_tail_above(k: int, p: float, limit: float) -> float:
    """P(X > limit) for X ~ Binomial(k, p)"""
    return float(binom.sf(math.floor(limit), k, p))


@dataclass(frozen=True)
class DetectionRow:
    n: int
    depth: int
    exact: float
    monte_carlo: Proportion
    samples_per_run: int
    any_flagged: float
    run_abort: float

    def to_dict(self) -> OrderedDict:
        low, high = self.monte_carlo.interval
        return OrderedDict(
            [
                ("n", self.n),
                ("depth", self.depth),
                ("exact", self.exact),
                ("monte_carlo", self.monte_carlo.mean),
                ("ci95_low", low),
                ("ci95_high", high),
                ("flagged", self.monte_carlo.successes),
                ("trials", self.monte_carlo.trials),
                ("samples_per_run", self.samples_per_run),
                ("any_flagged", self.any_flagged),
                ("run_abort", self.run_abort),
            ]
        )


def _detect_batch(job) -> int:
    seed, n, depth, batch, size = job
    if n <= 1:
        return 0
    rng = RandomStream(seed).child(n).child(depth).child(batch)
    # Each photon independently ends in one of the 2**depth leaves
    leaves = rng.generator.integers(2**depth, size=(size, n))
    return int((leaves != leaves[:, :1]).any(axis=1).sum())


def detection_curve(config: ExperimentConfig, n_values, depth_values) -> list:
    """How often Charlie's splitter check flags an n-photon signal, per
    (n, depth), and what that means for a whole run"""
    protocol = config.with_overrides(protocol="improved")
    k = sample_plan(protocol.protocol_config())["charlie_samples"]
    threshold = config["multiphoton-threshold"]
    grid = [(n, depth) for n in n_values for depth in depth_values]
    if not grid:
        raise ValueError("n_values and depth_values must not be empty")
    jobs = [
        (config.seed, n, depth, batch, size)
        for n, depth in grid
        for batch, size in _batches(config.trials)
    ]
    counts = iter(_map(_detect_batch, jobs, config.workers))
    rows = []
    for n, depth in grid:
        flagged = sum(next(counts) for _ in _batches(config.trials))
        p = multi_fire_probability(n, depth)
        rows.append(
            DetectionRow(
                n=n,
                depth=depth,
                exact=p,
                monte_carlo=Proportion(flagged, config.trials),
                samples_per_run=k,
                any_flagged=1.0 - (1.0 - p) ** k,
                run_abort=binomial_tail_above(k, p, threshold * k),
            )
        )
        log.info("Detection n=%d depth=%d: %d/%d flagged" % (n, depth, flagged, config.trials))
    return rows
