#!/usr/bin/env python3
"""Quantum secret sharing simulator"""

import logging as log

from qssim.version import string as version
from qssim.utils import EXIT_CONFIG_ERROR, EXIT_IO_ERROR, user_error
from qssim.experiment_config import ConfigError, load_config
from qssim.report import ReportIOError
from qssim import commands
from qssim.args import config_overrides, get_args, print_help


def init_logging(level):
    # Warning: logging.basicConfig() cannot be called multiple times to set
    #          different parameters. We have to set both format and level in
    #          the same call
    format = "%(levelname)s: %(message)s"
    level = level.strip().lower()
    levels = {
        "critical": log.CRITICAL,
        "error": log.ERROR,
        "warning": log.WARNING,
        "info": log.INFO,
        "debug": log.DEBUG,
    }
    if level not in levels:
        raise ValueError("Unknown log level: {}".format(level))
    log.basicConfig(level=levels[level], format=format)


def main() -> int:
    args = get_args()
    init_logging(args.loglevel)

    if args.version:
        print("qssim %s" % version())
        return 0

    if not args.command:
        print_help()
        print("")
        user_error("No command given")

    if args.command == "help":
        print_help()
        return 0

    if args.command not in commands.get_command_names():
        print_help()
        user_error("Command '%s' not found" % args.command)

    try:
        config = load_config(args.config, config_overrides(args))
    except ConfigError as e:
        user_error(str(e), EXIT_CONFIG_ERROR)

    try:
        return commands.get_command(args.command)(config)
    except ReportIOError as e:
        user_error(str(e), EXIT_IO_ERROR)
