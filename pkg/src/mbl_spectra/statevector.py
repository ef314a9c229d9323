"""Dense statevector simulation for the Rx / Rz / H / XX gate set.

Amplitudes live in a flat complex array indexed by the basis integer, with
qubit 0 as the least significant bit.  Gate conventions::

    Rx(theta) = exp(-i theta X / 2)
    Rz(theta) = exp(-i theta Z / 2)
    XX(chi)   = exp(+i chi X (x) X)
    H         = (X + Z) / sqrt(2)

The kernels accept either a single state of shape ``(2**n,)`` or a batch of
column states of shape ``(2**n, k)``; :func:`circuit_unitary` uses the latter
to build the dense matrix of a circuit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidArgumentError

MAX_QUBITS = 24

GATE_KINDS = ("RX", "RZ", "H", "XX")
_ARITY = {"RX": 1, "RZ": 1, "H": 1, "XX": 2}

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "targets", tuple(int(q) for q in self.targets))
        if kind not in _ARITY:
            raise InvalidArgumentError(f"unknown gate kind {self.kind!r}")
        if len(self.targets) != _ARITY[kind]:
            raise InvalidArgumentError(f"{kind} takes {_ARITY[kind]} target(s), got {self.targets}")
        if any(q < 0 for q in self.targets):
            raise InvalidArgumentError(f"negative qubit index in {self.targets}")
        if kind == "XX" and self.targets[0] == self.targets[1]:
            raise InvalidArgumentError("XX targets must be distinct")
        if kind == "H":
            if self.angle is not None:
                raise InvalidArgumentError("H takes no angle")
        elif self.angle is None:
            raise InvalidArgumentError(f"{kind} requires an angle")
        else:
            object.__setattr__(self, "angle", float(self.angle))

    @property
    def arity(self) -> int:
        return _ARITY[self.kind]

    def inverse(self) -> "Gate":
        if self.kind == "H":
            return self
        return Gate(self.kind, self.targets, -self.angle)

    def matrix(self) -> np.ndarray:
        """Dense matrix on the gate's own qubits (first target = low bit for XX)."""
        if self.kind == "H":
            return _H.copy()
        c, s = math.cos(self.angle / 2), math.sin(self.angle / 2)
        if self.kind == "RX":
            return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
        if self.kind == "RZ":
            return np.array([[c - 1j * s, 0], [0, c + 1j * s]], dtype=complex)
        c, s = math.cos(self.angle), math.sin(self.angle)
        return c * np.eye(4, dtype=complex) + 1j * s * np.fliplr(np.eye(4, dtype=complex))

    def to_line(self) -> str:
        qs = " ".join(str(q) for q in self.targets)
        if self.angle is None:
            return f"{self.kind} {qs}"
        return f"{self.kind} {qs} {self.angle!r}"


def Rx(q: int, theta: float) -> Gate:
    return Gate("RX", (q,), theta)


def Rz(q: int, theta: float) -> Gate:
    return Gate("RZ", (q,), theta)


def H(q: int) -> Gate:
    return Gate("H", (q,))


def XX(q1: int, q2: int, chi: float) -> Gate:
    return Gate("XX", (q1, q2), chi)


@dataclass
class Circuit:
    n: int
    gates: list[Gate] = field(default_factory=list)

    def __post_init__(self):
        if self.n < 1:
            raise InvalidArgumentError("circuit needs at least one qubit")
        for g in self.gates:
            self._check(g)

    def _check(self, gate: Gate):
        if max(gate.targets) >= self.n:
            raise InvalidArgumentError(f"gate {gate.to_line()} addresses qubit >= {self.n}")

    def append(self, gate: Gate):
        self._check(gate)
        self.gates.append(gate)

    def extend(self, gates: Iterable[Gate]):
        for g in gates:
            self.append(g)

    def inverse(self) -> "Circuit":
        return Circuit(self.n, [g.inverse() for g in reversed(self.gates)])

    def __len__(self):
        return len(self.gates)

    def to_text(self) -> str:
        return "".join(g.to_line() + "\n" for g in self.gates)

    @classmethod
    def from_text(cls, n: int, text: str) -> "Circuit":
        gates = []
        for lineno, line in enumerate(text.splitlines(), 1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            kind = parts[0].upper()
            if kind not in _ARITY:
                raise InvalidArgumentError(f"line {lineno}: unknown gate {parts[0]!r}")
            k = _ARITY[kind]
            expected = k + (0 if kind == "H" else 1)
            if len(parts) - 1 != expected:
                raise InvalidArgumentError(f"line {lineno}: expected {expected} fields after {kind}")
            targets = tuple(int(p) for p in parts[1:1 + k])
            angle = None if kind == "H" else float(parts[1 + k])
            gates.append(Gate(kind, targets, angle))
        return cls(n, gates)


@dataclass
class StateVector:
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (2 ** self.n,):
            raise InvalidArgumentError(
                f"expected {2 ** self.n} amplitudes, got shape {self.amplitudes.shape}")

    def copy(self) -> "StateVector":
        return StateVector(self.n, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def _check_n(n: int):
    if not 1 <= n <= MAX_QUBITS:
        raise InvalidArgumentError(f"qubit count must lie in [1, {MAX_QUBITS}], got {n}")


def init_plus_state(n: int) -> StateVector:
    _check_n(n)
    return StateVector(n, np.full(2 ** n, 2.0 ** (-n / 2), dtype=complex))


def basis_state(n: int, index: int = 0) -> StateVector:
    _check_n(n)
    amps = np.zeros(2 ** n, dtype=complex)
    amps[index] = 1.0
    return StateVector(n, amps)


# -- kernels -----------------------------------------------------------------

def _apply_1q(amps: np.ndarray, n: int, q: int, u: np.ndarray) -> np.ndarray:
    batch = amps.shape[1:]
    view = amps.reshape((2 ** (n - q - 1), 2, 2 ** q) + batch)
    out = np.empty_like(view)
    a0, a1 = view[:, 0], view[:, 1]
    out[:, 0] = u[0, 0] * a0 + u[0, 1] * a1
    out[:, 1] = u[1, 0] * a0 + u[1, 1] * a1
    return out.reshape(amps.shape)


def _apply_xx(amps: np.ndarray, n: int, q1: int, q2: int, chi: float) -> np.ndarray:
    lo, hi = sorted((q1, q2))
    batch = amps.shape[1:]
    shape = (2 ** (n - hi - 1), 2, 2 ** (hi - lo - 1), 2, 2 ** lo) + batch
    view = amps.reshape(shape)
    flipped = view[:, ::-1, :, ::-1]
    out = math.cos(chi) * view + 1j * math.sin(chi) * flipped
    return out.reshape(amps.shape)


def _apply(amps: np.ndarray, n: int, gate: Gate) -> np.ndarray:
    if gate.kind == "XX":
        return _apply_xx(amps, n, gate.targets[0], gate.targets[1], gate.angle)
    return _apply_1q(amps, n, gate.targets[0], gate.matrix())


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Return ``U @ state``; the input is left untouched."""
    if max(gate.targets) >= state.n:
        raise InvalidArgumentError(f"gate {gate.to_line()} addresses qubit >= {state.n}")
    return StateVector(state.n, _apply(state.amplitudes, state.n, gate))


def run_circuit(state: StateVector, circuit: Circuit) -> StateVector:
    if circuit.n != state.n:
        raise InvalidArgumentError(f"circuit on {circuit.n} qubits, state on {state.n}")
    amps = state.amplitudes
    for g in circuit.gates:
        amps = _apply(amps, state.n, g)
    return StateVector(state.n, amps if amps is not state.amplitudes else amps.copy())


def apply_gates_batch(amps: np.ndarray, n: int, gates: Sequence[Gate]) -> np.ndarray:
    """Apply ``gates`` to every column of a ``(2**n, k)`` array."""
    for g in gates:
        amps = _apply(amps, n, g)
    return amps


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    dim = 2 ** circuit.n
    return apply_gates_batch(np.eye(dim, dtype=complex), circuit.n, circuit.gates)


def embed_gate(gate: Gate, n: int) -> np.ndarray:
    """Full 2**n matrix of one gate built by Kronecker products.

    Independent of the strided kernels; used as a test oracle.
    """
    eye = np.eye(2, dtype=complex)
    if gate.kind == "XX":
        x = np.array([[0, 1], [1, 0]], dtype=complex)
        ops = [x if k in gate.targets else eye for k in range(n)]
        xx = _kron_lsb(ops)
        return math.cos(gate.angle) * np.eye(2 ** n) + 1j * math.sin(gate.angle) * xx
    u = gate.matrix()
    return _kron_lsb([u if k == gate.targets[0] else eye for k in range(n)])


def _kron_lsb(ops: Sequence[np.ndarray]) -> np.ndarray:
    # ops[k] acts on qubit k; qubit 0 is the least significant bit
    out = np.eye(1, dtype=complex)
    for op in reversed(ops):
        out = np.kron(out, op)
    return out


# -- measurement ---------------------------------------------------------------

def _z_signs(n: int, site: int) -> np.ndarray:
    return 1.0 - 2.0 * ((np.arange(2 ** n) >> site) & 1)


def expectation_z(state: StateVector, site: int) -> float:
    if not 0 <= site < state.n:
        raise InvalidArgumentError(f"site {site} out of range for {state.n} qubits")
    return float(np.dot(state.probabilities(), _z_signs(state.n, site)))


def expectation_z_all(state: StateVector) -> np.ndarray:
    probs = state.probabilities()
    return np.array([np.dot(probs, _z_signs(state.n, i)) for i in range(state.n)])


def sample_bitstrings(probs: np.ndarray, shots: int, seed) -> np.ndarray:
    if shots < 1:
        raise InvalidArgumentError("shots must be >= 1")
    rng = np.random.default_rng(seed)
    p = np.clip(probs, 0.0, None)
    cdf = np.cumsum(p)
    cdf /= cdf[-1]
    idx = np.searchsorted(cdf, rng.random(shots), side="right")
    return np.minimum(idx, len(p) - 1)


def z_estimates_from_bitstrings(samples: np.ndarray, n: int) -> np.ndarray:
    bits = (samples[:, None] >> np.arange(n)) & 1
    shots = len(samples)
    ones = bits.sum(axis=0)
    return (shots - 2 * ones) / shots


def sample_shots(state: StateVector, shots: int, seed) -> np.ndarray:
    """Per-site <Z_i> estimates from ``shots`` full z-basis readouts.

    Every site is estimated from the same shot record, so each estimate is a
    multiple of ``2 / shots``.
    """
    samples = sample_bitstrings(state.probabilities(), shots, seed)
    return z_estimates_from_bitstrings(samples, state.n)
