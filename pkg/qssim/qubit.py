"""Single-qubit state algebra for polarization-encoded photons

The four preparation states are the eigenstates of the rectilinear (Z) and
diagonal (X) bases. Six fixed unitaries act on them. States are compared by
fidelity, never componentwise, since U and Hbar introduce global signs.

All randomness comes from an explicit RandomStream argument.
"""

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

# Tolerance for algebraic identities (all matrix entries are 0, +-1, +-1/sqrt(2))
TOLERANCE = 1e-12
# A probability at least this large is treated as a certain outcome
CERTAIN = 1.0 - 1e-9

_SQRT2_INV = 1 / math.sqrt(2)


class Basis(Enum):
    Z = "Z"
    X = "X"

    @property
    def conjugate(self):
        return Basis.X if self is Basis.Z else Basis.Z


class StateLabel(Enum):
    ZERO = "0"
    ONE = "1"
    U = "u"
    D = "d"


class GateOp(Enum):
    I = "I"
    U = "U"
    H = "H"
    HBAR = "Hbar"
    PAULI_X = "X"
    PAULI_Z = "Z"


def basis_of(label: StateLabel) -> Basis:
    return Basis.Z if label in (StateLabel.ZERO, StateLabel.ONE) else Basis.X


def bit_of(label: StateLabel) -> int:
    return 0 if label in (StateLabel.ZERO, StateLabel.U) else 1


def label_of(basis: Basis, bit: int) -> StateLabel:
    if bit not in (0, 1):
        raise ValueError("Bit must be 0 or 1, not %r" % (bit,))
    if basis is Basis.Z:
        return StateLabel.ONE if bit else StateLabel.ZERO
    return StateLabel.D if bit else StateLabel.U


@dataclass(frozen=True)
class PureState:
    """Polarization state a0|0> + a1|1> of one photon"""

    a0: complex
    a1: complex

    def __post_init__(self):
        for amplitude in (self.a0, self.a1):
            if not cmath.isfinite(amplitude):
                raise ValueError("Amplitudes must be finite, got %r" % (amplitude,))
        norm = abs(self.a0) ** 2 + abs(self.a1) ** 2
        if abs(norm - 1.0) > TOLERANCE:
            raise ValueError("State is not normalized (|a0|^2 + |a1|^2 = %r)" % norm)

    @classmethod
    def from_vector(cls, vector) -> "PureState":
        return cls(complex(vector[0]), complex(vector[1]))

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.a0, self.a1], dtype=complex)

    def fidelity(self, other: "PureState") -> float:
        """|<other|self>|^2, insensitive to global phase"""
        return float(abs(np.vdot(other.vector, self.vector)) ** 2)


_STATES = {
    StateLabel.ZERO: PureState(1.0, 0.0),
    StateLabel.ONE: PureState(0.0, 1.0),
    StateLabel.U: PureState(_SQRT2_INV, _SQRT2_INV),
    StateLabel.D: PureState(_SQRT2_INV, -_SQRT2_INV),
}


def _frozen(rows):
    matrix = np.array(rows, dtype=complex)
    matrix.flags.writeable = False
    return matrix


_GATES = {
    GateOp.I: _frozen([[1, 0], [0, 1]]),
    GateOp.U: _frozen([[0, 1], [-1, 0]]),
    GateOp.H: _frozen([[_SQRT2_INV, _SQRT2_INV], [_SQRT2_INV, -_SQRT2_INV]]),
    GateOp.HBAR: _frozen([[_SQRT2_INV, -_SQRT2_INV], [-_SQRT2_INV, -_SQRT2_INV]]),
    GateOp.PAULI_X: _frozen([[0, 1], [1, 0]]),
    GateOp.PAULI_Z: _frozen([[1, 0], [0, -1]]),
}


def state_of(label: StateLabel) -> PureState:
    return _STATES[label]


def eigenstate(basis: Basis, bit: int) -> PureState:
    return _STATES[label_of(basis, bit)]


def gate_matrix(gate: GateOp) -> np.ndarray:
    """The fixed 2x2 unitary of `gate` (read-only array)"""
    return _GATES[gate]


def apply(gate: GateOp, state: PureState) -> PureState:
    return PureState.from_vector(_GATES[gate] @ state.vector)


def prob_of(state: PureState, basis: Basis, bit: int) -> float:
    """Born-rule probability of reading `bit` when measuring `state` in `basis`"""
    p = state.fidelity(eigenstate(basis, bit))
    return min(1.0, max(0.0, p))


def measure(state: PureState, basis: Basis, rng: "RandomStream"):
    """Projective measurement; returns (bit, collapsed eigenstate).

    Certain outcomes do not consume a random draw.
    """
    p0 = prob_of(state, basis, 0)
    if p0 >= CERTAIN:
        bit = 0
    elif p0 <= 1.0 - CERTAIN:
        bit = 1
    else:
        bit = 0 if rng.random() < p0 else 1
    return bit, eigenstate(basis, bit)


class RandomStream:
    """Seeded random source with deterministic child streams.

    Child streams are derived with numpy's SeedSequence: the child with
    index k of a stream with spawn key (a, b) has spawn key (a, b, k) under
    the same root seed. SeedSequence hashes (seed, spawn key) into the
    generator state, so children are independent and stable across runs,
    platforms and execution order.
    """

    def __init__(self, seed: int, spawn_key=()):
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise ValueError("Seed must be an integer, not %r" % (seed,))
        if not 0 <= seed < 2**64:
            raise ValueError("Seed must be a 64-bit unsigned integer, not %d" % seed)
        self.seed = seed
        self.spawn_key = tuple(spawn_key)
        sequence = np.random.SeedSequence(seed, spawn_key=self.spawn_key)
        self.generator = np.random.Generator(np.random.PCG64(sequence))

    def child(self, index: int) -> "RandomStream":
        return RandomStream(self.seed, self.spawn_key + (index,))

    def random(self) -> float:
        return float(self.generator.random())

    def bit(self) -> int:
        return int(self.generator.integers(2))

    def bits(self, count: int) -> list:
        return [int(b) for b in self.generator.integers(2, size=count)]

    def below(self, n: int) -> int:
        return int(self.generator.integers(n))

    def choice(self, items):
        return items[self.below(len(items))]

    def sample(self, population: int, k: int) -> list:
        """k distinct positions out of range(population), in ascending order"""
        if k == 0:
            return []
        picked = self.generator.choice(population, size=k, replace=False)
        return sorted(int(p) for p in picked)

    def __repr__(self):
        return "RandomStream(seed=%d, spawn_key=%r)" % (self.seed, self.spawn_key)
