"""Fixed-step-count Trotter circuits for the disordered Heisenberg chain.

Each step applies, for k = 0, 1, ..., n-1 in turn: the Heisenberg block on
(k, k+1) when k+1 exists, then Rx(2 w hx_k delta), then Rz(2 w hz_k delta).
The block is three XX gates whose frames are rotated to X, Y and Z by
single-qubit gates, 4 per qubit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .model import DisorderRealization, ModelParams
from .statevector import (
    Circuit,
    Gate,
    H,
    Rx,
    Rz,
    XX,
    apply_gates_batch,
    init_plus_state,
)


@dataclass(frozen=True)
class TrotterPlan:
    params: ModelParams
    dis: DisorderRealization
    t: float
    m: int = 6
    skip_first_interaction: bool = True

    def __post_init__(self):
        if self.m < 1:
            raise InvalidArgumentError("m must be >= 1")
        if self.t < 0:
            raise InvalidArgumentError("t must be >= 0")
        if self.dis.n != self.params.n:
            raise InvalidArgumentError("disorder realization size does not match the model")

    @property
    def delta(self) -> float:
        return self.t / self.m


def two_body_block(J: float, delta: float, q1: int, q2: int) -> list[Gate]:
    """exp(-i J delta (XX + YY + ZZ)) on (q1, q2), exact up to global phase.

    Time order: XX term, then Rz(-pi/2) conjugation for YY, then Hadamard
    conjugation for ZZ.  The adjacent Rz(+pi/2) and H of the YY/ZZ seam are
    kept separate, giving 3 two-qubit and 8 single-qubit gates.
    """
    if q1 == q2:
        raise InvalidArgumentError("block qubits must differ")
    chi = -J * delta
    half = math.pi / 2
    return [
        XX(q1, q2, chi),
        Rz(q1, -half), Rz(q2, -half),
        XX(q1, q2, chi),
        Rz(q1, half), Rz(q2, half),
        H(q1), H(q2),
        XX(q1, q2, chi),
        H(q1), H(q2),
    ]


def trotter_step(plan: TrotterPlan, step_index: int) -> list[Gate]:
    if not 0 <= step_index < plan.m:
        raise InvalidArgumentError(f"step {step_index} outside [0, {plan.m})")
    n, J, w = plan.params.n, plan.params.J, plan.params.w
    d = plan.delta
    skip = plan.skip_first_interaction and step_index == 0
    gates: list[Gate] = []
    for k in range(n):
        if k + 1 < n and not skip:
            gates.extend(two_body_block(J, d, k, k + 1))
        gates.append(Rx(k, 2.0 * w * plan.dis.hx[k] * d))
        gates.append(Rz(k, 2.0 * w * plan.dis.hz[k] * d))
    return gates


def build_evolution_circuit(plan: TrotterPlan) -> Circuit:
    circ = Circuit(plan.params.n)
    for s in range(plan.m):
        circ.extend(trotter_step(plan, s))
    return circ


def gate_counts(circuit: Circuit) -> tuple[int, int]:
    two = sum(1 for g in circuit.gates if g.arity == 2)
    return two, len(circuit.gates) - two


def circuit_census(n: int, m: int, skip_first_interaction: bool = True) -> tuple[int, int]:
    """Gate counts of :func:`build_evolution_circuit` without building it."""
    blocks = (n - 1) * (m - (1 if skip_first_interaction else 0))
    return 3 * blocks, 8 * blocks + 2 * n * m


def step_unitary(plan: TrotterPlan, step_index: int) -> np.ndarray:
    n = plan.params.n
    return apply_gates_batch(np.eye(2 ** n, dtype=complex), n, trotter_step(plan, step_index))


def evolve_plus_state(plan: TrotterPlan) -> np.ndarray:
    """Amplitudes of the circuit output on |+>^n, via dense step matrices.

    Interior steps share one unitary, so the m-1 repetitions are taken as a
    matrix power.  Equal to running :func:`build_evolution_circuit` gate by
    gate, but much faster for large m.
    """
    psi = init_plus_state(plan.params.n).amplitudes
    psi = step_unitary(plan, 0) @ psi
    if plan.m > 1:
        U = step_unitary(plan, 1)
        psi = np.linalg.matrix_power(U, plan.m - 1) @ psi
    return psi
