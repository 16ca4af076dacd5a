"""Experiment configuration: defaults < config file < command line flags.

A config file is flat UTF-8 text, one `key = value` per line, keys named
like the long command line flags. `#` starts a comment.
"""

from collections import OrderedDict
from copy import deepcopy
import logging as log

from qssim.attacks import NO_ATTACK, InterceptResendEve, Segment, TrojanBob
from qssim.photonics import ChannelModel
from qssim.protocols import AnnounceOrder, OpSet, ProtocolConfig, SecretMessage
from qssim.qubit import RandomStream
from qssim.utils import read_file
from qssim.validate import (
    ConfigError,
    ConfigValidationError,
    normalize_key,
    validate_config,
)

__all__ = [
    "ConfigError",
    "ConfigValidationError",
    "ExperimentConfig",
    "load_config",
    "parse_config_text",
]


def parse_config_text(text: str, path: str = "<config>") -> OrderedDict:
    data = OrderedDict()
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(
                "%s:%d: expected 'key = value', got '%s'" % (path, number, line)
            )
        key, value = line.split("=", 1)
        key = normalize_key(key)
        if not key:
            raise ConfigError("%s:%d: missing key before '='" % (path, number))
        if key in data:
            log.info("%s:%d: '%s' given again, the last value wins" % (path, number, key))
        data[key] = value.strip()
    return data


def read_config_file(path: str) -> OrderedDict:
    try:
        text = read_file(path)
    except (OSError, UnicodeDecodeError) as e:
        raise ConfigError("Cannot read config file '%s': %s" % (path, e))
    if text is None:
        raise ConfigError("Config file '%s' not found" % path)
    return parse_config_text(text, path)


class ExperimentConfig:
    def __init__(self, raw_data=None, values=None):
        self._raw = OrderedDict(raw_data or {})
        self._values = values if values is not None else validate_config(self._raw)

    @property
    def raw_data(self):
        """Read-only access to what the user gave, for validation purposes"""
        return deepcopy(self._raw)

    def __getitem__(self, key):
        return self._values[normalize_key(key)]

    def get(self, key, default=None):
        return self._values.get(normalize_key(key), default)

    @property
    def protocol(self) -> str:
        return self["protocol"]

    @property
    def trials(self) -> int:
        return self["trials"]

    @property
    def seed(self) -> int:
        return self["seed"]

    @property
    def workers(self) -> int:
        return self["workers"]

    @property
    def output_format(self) -> str:
        return self["format"]

    @property
    def output_path(self) -> str:
        return self["out"]

    @property
    def save_transcripts(self) -> bool:
        return self["save-transcripts"]

    @property
    def op_set(self) -> OpSet:
        return OpSet.FOUR_OP if self.protocol == "improved" else OpSet.THREE_OP

    @property
    def fixed_message(self):
        """The configured message, or None when each trial draws its own"""
        if self["message"]:
            return SecretMessage(self["message"])
        return None

    def message_for(self, rng: RandomStream) -> SecretMessage:
        fixed = self.fixed_message
        if fixed is not None:
            return fixed
        return SecretMessage.random(self["message-length"], rng)

    def attack_strategy(self):
        if self["attack"] == "trojan":
            return TrojanBob(
                n_photons=self["photons"],
                forward_one=self["forward-one"],
                tree_depth=self["tree-depth"],
            )
        if self["attack"] == "eve":
            return InterceptResendEve(Segment(self["eve-segment"]))
        return NO_ATTACK

    def protocol_config(self, message: SecretMessage = None) -> ProtocolConfig:
        return ProtocolConfig(
            num_signals=self["signals"],
            charlie_sample_fraction=self["charlie-sample-fraction"],
            alice_sample_fraction=self["alice-sample-fraction"],
            error_threshold=self["error-threshold"],
            multiphoton_threshold=self["multiphoton-threshold"],
            op_set=self.op_set,
            pns_check_depth=self["pns-depth"],
            decoys_enabled=self["decoys"],
            decoy_fraction=self["decoy-fraction"],
            message=message if message is not None else SecretMessage(),
            sc_fraction=self["sc-fraction"],
            announce_order=AnnounceOrder(self["announce-order"]),
            channel=ChannelModel(self["channel-flip"]),
        )

    def with_overrides(self, **overrides) -> "ExperimentConfig":
        raw = self.raw_data
        for key, value in overrides.items():
            raw[normalize_key(key)] = value
        return ExperimentConfig(raw)

    def to_dict(self) -> OrderedDict:
        """The fully resolved configuration, defaults included"""
        return OrderedDict(
            (key, list(value) if isinstance(value, list) else value)
            for key, value in self._values.items()
        )


def load_config(path: str = None, overrides=None) -> ExperimentConfig:
    """Read `path` (if given), apply `overrides` on top and validate.

    Overrides with the value None were not given and are skipped.
    """
    raw = OrderedDict()
    if path is not None:
        raw.update(read_config_file(path))
    for key, value in (overrides or {}).items():
        if value is not None:
            raw[normalize_key(key)] = value
    return ExperimentConfig(raw)
