"""Validation of experiment configurations.

Every key is parsed and range checked, and all problems are reported
together. Values may come from a config file or the command line (as
strings) or from Python code (already typed).
"""

import logging as log
from collections import OrderedDict

from qssim.attacks import default_tree_depth
from qssim.protocols import OpSet, ProtocolConfig, carrier_budget
from qssim.utils import parse_bool, parse_int_list

PROTOCOLS = ("original", "improved")
ATTACKS = ("none", "trojan", "eve")
SEGMENTS = ("bob-to-charlie", "charlie-to-alice", "alice-to-charlie")
ANNOUNCE_ORDERS = ("bob-first", "charlie-first")
FORMATS = ("json", "csv")

MAX_SEED = 2**64 - 1

# Keys in the order they are echoed into reports. None means the default
# depends on other keys.
DEFAULTS = OrderedDict(
    [
        ("protocol", "original"),
        ("attack", "none"),
        ("photons", 4),
        ("forward-one", True),
        ("tree-depth", None),
        ("eve-segment", "bob-to-charlie"),
        ("signals", None),
        ("trials", 100),
        ("seed", 0),
        ("sample-fraction", None),
        ("charlie-sample-fraction", 0.25),
        ("alice-sample-fraction", 0.25),
        ("sc-fraction", 0.1),
        ("error-threshold", 0.1),
        ("multiphoton-threshold", 0.02),
        ("pns-depth", 1),
        ("decoys", False),
        ("decoy-fraction", 0.1),
        ("announce-order", "bob-first"),
        ("channel-flip", 0.0),
        ("message", ""),
        ("message-length", 64),
        ("format", "json"),
        ("out", "qssim-report.json"),
        ("save-transcripts", False),
        ("workers", 1),
        ("photon-values", [2, 4, 6, 8, 10]),
        ("depth-values", [1, 2, 3]),
    ]
)

DEFAULT_SIGNALS = {"original": 200, "improved": 400}


class ConfigError(Exception):
    """A configuration could not be read"""


class ConfigValidationError(ConfigError):
    def __init__(self, errors) -> None:
        assert errors
        self.errors = list(errors)
        super().__init__("\n".join(_describe(key, message) for key, message in self.errors))


def _describe(key, message) -> str:
    if key is None:
        return "Error in configuration: " + message
    return "Error in configuration for key '%s': " % key + message


def normalize_key(key: str) -> str:
    return key.strip().lower().replace("_", "-")


def _choice(*choices):
    def parse(value):
        text = str(value).strip().lower()
        if text not in choices:
            raise ValueError("must be one of %s, not '%s'" % (", ".join(choices), value))
        return text

    return parse


def _integer(low, high=None):
    def parse(value):
        if isinstance(value, bool):
            raise ValueError("must be an integer, not %r" % value)
        try:
            number = int(str(value).strip()) if isinstance(value, str) else int(value)
        except ValueError:
            raise ValueError("must be an integer, not '%s'" % value)
        if number < low or (high is not None and number > high):
            if high is None:
                raise ValueError("must be at least %d, not %d" % (low, number))
            raise ValueError("must be in [%d, %d], not %d" % (low, high, number))
        return number

    return parse


def _real(low, high, low_open=False, high_open=False):
    brackets = ("(" if low_open else "[") + "%g, %g" % (low, high) + (")" if high_open else "]")

    def parse(value):
        if isinstance(value, bool):
            raise ValueError("must be a number in %s, not %r" % (brackets, value))
        try:
            number = float(value)
        except ValueError:
            raise ValueError("must be a number in %s, not '%s'" % (brackets, value))
        too_low = number <= low if low_open else number < low
        too_high = number >= high if high_open else number > high
        if number != number or too_low or too_high:
            raise ValueError("must be in %s, not %s" % (brackets, value))
        return number

    return parse


def _boolean(value):
    try:
        return parse_bool(value)
    except ValueError:
        raise ValueError("must be on or off, not '%s'" % value)


def _optional(parse):
    def parse_optional(value):
        if value is None or str(value).strip() == "":
            return None
        return parse(value)

    return parse_optional


def _bit_string(value):
    text = str(value).strip()
    if any(c not in "01" for c in text):
        raise ValueError("must be a string of 0 and 1, not '%s'" % value)
    return text


def _path(value):
    text = str(value).strip()
    if not text:
        raise ValueError("must be a non-empty path")
    return text


def _positive_list(value):
    try:
        numbers = parse_int_list(value)
    except ValueError:
        raise ValueError("must be a comma separated list of integers, not '%s'" % value)
    if not numbers:
        raise ValueError("must list at least one value")
    if any(n < 1 for n in numbers):
        raise ValueError("values must be at least 1, not %s" % numbers)
    return numbers


_PARSERS = {
    "protocol": _choice(*PROTOCOLS),
    "attack": _choice(*ATTACKS),
    "photons": _integer(1),
    "forward-one": _boolean,
    "tree-depth": _optional(_integer(1)),
    "eve-segment": _choice(*SEGMENTS),
    "signals": _optional(_integer(1)),
    "trials": _integer(1),
    "seed": _integer(0, MAX_SEED),
    "sample-fraction": _optional(_real(0.0, 1.0, low_open=True, high_open=True)),
    "charlie-sample-fraction": _real(0.0, 1.0, low_open=True, high_open=True),
    "alice-sample-fraction": _real(0.0, 1.0, low_open=True, high_open=True),
    "sc-fraction": _real(0.0, 1.0, high_open=True),
    "error-threshold": _real(0.0, 1.0),
    "multiphoton-threshold": _real(0.0, 1.0),
    "pns-depth": _integer(1),
    "decoys": _boolean,
    "decoy-fraction": _real(0.0, 1.0, high_open=True),
    "announce-order": _choice(*ANNOUNCE_ORDERS),
    "channel-flip": _real(0.0, 1.0),
    "message": _bit_string,
    "message-length": _integer(0),
    "format": _choice(*FORMATS),
    "out": _path,
    "save-transcripts": _boolean,
    "workers": _integer(1),
    "photon-values": _positive_list,
    "depth-values": _positive_list,
}

assert set(_PARSERS) == set(DEFAULTS)


def _resolve_dependent_defaults(raw, values):
    if values["signals"] is None:
        values["signals"] = DEFAULT_SIGNALS[values["protocol"]]
    if values["tree-depth"] is None:
        values["tree-depth"] = default_tree_depth(values["photons"])
    if values["sample-fraction"] is not None:
        for key in ("charlie-sample-fraction", "alice-sample-fraction"):
            if key not in raw:
                values[key] = values["sample-fraction"]


def _cross_check(values, errors):
    if values["protocol"] == "original" and values["decoys"]:
        log.warning("Decoy photons are part of the improved protocol, ignoring 'decoys'")
        values["decoys"] = False
    if values["channel-flip"] > 0.0:
        log.warning(
            "Noisy channel (flip probability %s), honest runs may abort"
            % values["channel-flip"]
        )
    op_set = OpSet.FOUR_OP if values["protocol"] == "improved" else OpSet.THREE_OP
    try:
        config = ProtocolConfig(
            num_signals=values["signals"],
            charlie_sample_fraction=values["charlie-sample-fraction"],
            alice_sample_fraction=values["alice-sample-fraction"],
            op_set=op_set,
            sc_fraction=values["sc-fraction"],
        )
    except ValueError as e:
        errors.append(("signals", str(e)))
        return
    carriers = carrier_budget(config)
    length = len(values["message"]) or values["message-length"]
    if length > carriers:
        errors.append(
            (
                "message-length" if not values["message"] else "message",
                "a %d bit message needs at least %d message carriers, "
                "%d signals leave only %d" % (length, length, values["signals"], carriers),
            )
        )


def validate_config(raw) -> OrderedDict:
    """Parse and check a raw configuration.

    `raw` maps keys (as in the config file) to values. Returns every key of
    DEFAULTS with its effective, typed value. Raises ConfigValidationError
    listing all problems.
    """
    errors = []
    raw = OrderedDict((normalize_key(k), v) for k, v in raw.items())
    for key in raw:
        if key not in DEFAULTS:
            errors.append((key, "unknown key"))

    values = OrderedDict()
    for key, default in DEFAULTS.items():
        if key not in raw:
            values[key] = list(default) if isinstance(default, list) else default
            continue
        try:
            values[key] = _PARSERS[key](raw[key])
        except ValueError as e:
            errors.append((key, str(e)))
            values[key] = default
    if errors:
        raise ConfigValidationError(errors)

    _resolve_dependent_defaults(raw, values)
    _cross_check(values, errors)
    if errors:
        raise ConfigValidationError(errors)
    return values
