"""
Functions ending in "_command" are registered with @qssim_command and
listed by name in the help output.
"""
from collections import OrderedDict

from qssim.attacks import intercept_resend_error_exact, pe_exact, pe_paper
from qssim.experiment_config import ExperimentConfig
from qssim.harness import detection_curve, run_trials, sweep_photon_count
from qssim.protocols import OpSet, sample_plan
from qssim.report import transcript_path, write_report
from qssim.stats import Proportion
from qssim.utils import pad_left, pad_right

_commands = OrderedDict()


# Decorator to specify that a function is a command (verb in the CLI)
# Adds the name + function pair to the global dict of commands
# Does not modify/wrap the function it decorates.
def qssim_command(name):
    def inner(function):
        global _commands
        _commands[name] = function
        return function

    return inner


def get_command_names():
    global _commands
    names = _commands.keys()
    return names


def get_command(name):
    return _commands[name]


def _print_proportion(name: str, proportion: Proportion):
    low, high = proportion.interval
    print(
        "%s %s  95%% CI [%.6g, %.6g]  (%d/%d)"
        % (
            pad_right(name + ":", 16),
            pad_left("%.6g" % proportion.mean, 10),
            low,
            high,
            proportion.successes,
            proportion.trials,
        )
    )


@qssim_command("run")
def run_command(config: ExperimentConfig) -> int:
    stats, records = run_trials(config)
    plan = sample_plan(config.protocol_config())
    print(
        "%d trials of the %s protocol, attack: %s, %d signals (%d message carriers)"
        % (config.trials, config.protocol, config["attack"], config["signals"], plan["carriers"])
    )
    _print_proportion("epsilon_r", stats.epsilon_r)
    if config.protocol == "improved":
        _print_proportion("P_m", stats.p_m)
    if config["attack"] != "none":
        _print_proportion("recovery", stats.recovery_rate)
    if config["attack"] == "trojan":
        _print_proportion("ambiguity", stats.ambiguity)
    _print_proportion("aborted", stats.detection)
    _print_proportion("decoded", stats.decoded_ok)

    path = write_report(
        stats,
        records,
        config.output_format,
        config.output_path,
        config_echo=config.to_dict(),
        command="run",
        save_transcripts=config.save_transcripts,
    )
    print("Report written to '%s'" % path)
    if config.save_transcripts:
        print("Transcripts written to '%s'" % transcript_path(path))
    return 0


@qssim_command("sweep")
def sweep_command(config: ExperimentConfig) -> int:
    rows = sweep_photon_count(config, config["photon-values"])
    print("Misidentification of Charlie's operation, %d trials per n" % config.trials)
    print(
        "%s %s %s %s %s"
        % (
            pad_left("n", 4),
            pad_left("pe_paper", 14),
            pad_left("pe_exact", 14),
            pad_left("monte_carlo", 14),
            "95% CI",
        )
    )
    for row in rows:
        low, high = row.monte_carlo.interval
        print(
            "%s %s %s %s [%.6g, %.6g]"
            % (
                pad_left(str(row.n), 4),
                pad_left("%.6g" % row.pe_paper, 14),
                pad_left("%.6g" % row.pe_exact, 14),
                pad_left("%.6g" % row.monte_carlo.mean, 14),
                low,
                high,
            )
        )
    path = write_report(
        None,
        (),
        config.output_format,
        config.output_path,
        config_echo=config.to_dict(),
        command="sweep",
        rows=rows,
    )
    print("Report written to '%s'" % path)
    return 0


@qssim_command("detect")
def detect_command(config: ExperimentConfig) -> int:
    rows = detection_curve(config, config["photon-values"], config["depth-values"])
    print("Charlie's splitter check on n-photon signals, %d trials per point" % config.trials)
    print(
        "%s %s %s %s %s"
        % (
            pad_left("n", 4),
            pad_left("depth", 6),
            pad_left("exact", 12),
            pad_left("monte_carlo", 12),
            pad_left("run_abort", 12),
        )
    )
    for row in rows:
        print(
            "%s %s %s %s %s"
            % (
                pad_left(str(row.n), 4),
                pad_left(str(row.depth), 6),
                pad_left("%.6g" % row.exact, 12),
                pad_left("%.6g" % row.monte_carlo.mean, 12),
                pad_left("%.6g" % row.run_abort, 12),
            )
        )
    path = write_report(
        None,
        (),
        config.output_format,
        config.output_path,
        config_echo=config.to_dict(),
        command="detect",
        rows=rows,
    )
    print("Report written to '%s'" % path)
    return 0


@qssim_command("oracle")
def oracle_command(config: ExperimentConfig) -> int:
    print(
        "%s %s %s %s"
        % (
            pad_left("n", 4),
            pad_left("pe_paper", 14),
            pad_left("pe_exact(3op)", 14),
            pad_left("pe_exact(4op)", 14),
        )
    )
    for n in config["photon-values"]:
        print(
            "%s %s %s %s"
            % (
                pad_left(str(n), 4),
                pad_left("%.6g" % pe_paper(n), 14),
                pad_left("%.6g" % pe_exact(n, OpSet.THREE_OP, n), 14),
                pad_left("%.6g" % pe_exact(n, OpSet.FOUR_OP, n), 14),
            )
        )
    print("Intercept-resend error rate on checked samples: %.6g" % intercept_resend_error_exact())
    return 0

