import argparse

from qssim import commands
from qssim.utils import cache

# Flags that are also config file keys. They default to None, so only the
# flags actually given override the file.
CONFIG_FLAGS = (
    "protocol",
    "attack",
    "photons",
    "forward_one",
    "tree_depth",
    "eve_segment",
    "signals",
    "trials",
    "seed",
    "sample_fraction",
    "charlie_sample_fraction",
    "alice_sample_fraction",
    "sc_fraction",
    "error_threshold",
    "multiphoton_threshold",
    "pns_depth",
    "decoys",
    "decoy_fraction",
    "announce_order",
    "channel_flip",
    "message",
    "message_length",
    "format",
    "out",
    "save_transcripts",
    "workers",
    "photon_values",
    "depth_values",
)


def get_args():
    parser = _get_arg_parser()
    args = parser.parse_args()
    return args


def print_help():
    parser = _get_arg_parser()
    parser.print_help()


def config_overrides(args) -> dict:
    """The config keys given on the command line"""
    return {
        flag.replace("_", "-"): getattr(args, flag)
        for flag in CONFIG_FLAGS
        if getattr(args, flag, None) is not None
    }


@cache
def _get_arg_parser():
    command_list = list(commands.get_command_names()) + ["help"]
    parser = argparse.ArgumentParser(
        description="Quantum secret sharing simulator: the batch protocol, "
        "a Trojan horse attack by a dishonest agent and its defense."
    )
    parser.add_argument(
        "command",
        metavar="cmd",
        type=str,
        nargs="?",
        help="The command to perform ({})".format(", ".join(command_list)),
    )
    parser.add_argument(
        "--loglevel",
        "-l",
        help="Set log level for more/less detailed output",
        type=str,
        default="warning",
    )
    parser.add_argument(
        "--version", "-V", help="Print version number", action="store_true"
    )
    parser.add_argument(
        "--config", "-c", help="Read settings from a key = value file", type=str
    )

    parser.add_argument("--protocol", choices=("original", "improved"))
    parser.add_argument("--attack", choices=("none", "trojan", "eve"))
    parser.add_argument("--photons", type=str, help="Photons per Trojan signal")
    parser.add_argument(
        "--forward-one",
        choices=("on", "off"),
        help="Bob forwards one untouched photon instead of resending a guess",
    )
    parser.add_argument(
        "--tree-depth", type=str, help="Depth of Bob's splitter tree"
    )
    parser.add_argument(
        "--eve-segment",
        choices=("bob-to-charlie", "charlie-to-alice", "alice-to-charlie"),
        help="Where the intercept-resend eavesdropper sits",
    )
    parser.add_argument("--signals", type=str, help="Signals Bob sends per run")
    parser.add_argument("--trials", type=str, help="Number of trials")
    parser.add_argument("--seed", type=str, help="Root seed (64-bit unsigned)")
    parser.add_argument(
        "--sample-fraction",
        type=str,
        help="Sets both the Charlie and the Alice sample fraction",
    )
    parser.add_argument("--charlie-sample-fraction", type=str)
    parser.add_argument("--alice-sample-fraction", type=str)
    parser.add_argument(
        "--sc-fraction", type=str, help="Fraction of Charlie's Pauli check samples"
    )
    parser.add_argument("--error-threshold", type=str)
    parser.add_argument("--multiphoton-threshold", type=str)
    parser.add_argument(
        "--pns-depth", type=str, help="Depth of Charlie's splitter tree"
    )
    parser.add_argument("--decoys", choices=("on", "off"))
    parser.add_argument("--decoy-fraction", type=str)
    parser.add_argument(
        "--announce-order",
        choices=("bob-first", "charlie-first"),
        help="Who answers first for Alice's samples",
    )
    parser.add_argument(
        "--channel-flip", type=str, help="Per-photon bit flip probability"
    )
    parser.add_argument(
        "--message", type=str, help="Alice's message as 0/1 (default: random)"
    )
    parser.add_argument("--message-length", type=str)
    parser.add_argument("--format", choices=("json", "csv"))
    parser.add_argument("--out", type=str, help="Report path")
    parser.add_argument(
        "--save-transcripts",
        action="store_true",
        default=None,
        help="Also write every SignalRecord to a sidecar file",
    )
    parser.add_argument("--workers", type=str, help="Worker processes")
    parser.add_argument(
        "--photon-values", type=str, help="Comma separated photon counts"
    )
    parser.add_argument(
        "--depth-values", type=str, help="Comma separated splitter tree depths"
    )
    return parser
