import math
from collections import OrderedDict
from dataclasses import dataclass

# Two-sided 95% normal quantile
Z_95 = 1.959963984540054


def wilson_interval(successes: int, trials: int, z: float = Z_95) -> tuple:
    """Wilson score interval (low, high) for a binomial proportion.

    For trials <= 0 the interval is the whole of [0, 1].
    """
    if trials <= 0:
        return (0.0, 1.0)
    if not 0 <= successes <= trials:
        raise ValueError("successes must be in [0, %d], not %d" % (trials, successes))
    phat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = phat + z2 / (2.0 * trials)
    radius = z * math.sqrt(max(0.0, phat * (1.0 - phat) / trials + z2 / (4.0 * trials * trials)))
    return (max(0.0, (center - radius) / denom), min(1.0, (center + radius) / denom))


def binomial_sigma(p: float, trials: int) -> float:
    """Standard deviation of a success frequency over `trials` draws"""
    if trials <= 0:
        raise ValueError("trials must be positive, not %d" % trials)
    return math.sqrt(p * (1.0 - p) / trials)


def within_sigmas(observed: float, expected: float, trials: int, sigmas: float = 3.0) -> bool:
    sigma = binomial_sigma(expected, trials)
    # A certain event has zero spread; allow one count of slack
    return abs(observed - expected) <= max(sigmas * sigma, 1.0 / trials)


@dataclass(frozen=True)
class Proportion:
    """A pooled proportion with its Wilson 95% interval"""

    successes: int
    trials: int

    @property
    def mean(self) -> float:
        return self.successes / self.trials if self.trials else 0.0

    @property
    def standard_error(self) -> float:
        return binomial_sigma(self.mean, self.trials) if self.trials else 0.0

    @property
    def interval(self) -> tuple:
        return wilson_interval(self.successes, self.trials)

    def __add__(self, other: "Proportion") -> "Proportion":
        return Proportion(self.successes + other.successes, self.trials + other.trials)

    def to_dict(self) -> OrderedDict:
        low, high = self.interval
        return OrderedDict(
            [
                ("mean", self.mean),
                ("standard_error", self.standard_error),
                ("ci95_low", low),
                ("ci95_high", high),
                ("successes", self.successes),
                ("trials", self.trials),
                ("method", "wilson"),
            ]
        )
