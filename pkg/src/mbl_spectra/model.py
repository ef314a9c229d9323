"""Disordered Heisenberg chain and its exact-diagonalization oracle.

    H = J sum_{i<n} sigma_i . sigma_{i+1} + w sum_i (hx_i X_i + hz_i Z_i)

on an open chain, with hx, hz drawn uniformly from [-1, 1].
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CapacityError, InvalidArgumentError
from .statevector import StateVector

ORACLE_MAX_SITES = 12

# Power applied to |<phi_l|a|phi_k>| in the spectral-function weight.  The
# defining formula prints the first power; set to 2 for the conventional
# squared matrix element.
MATRIX_ELEMENT_EXPONENT = 1

MERGE_TOL = 1e-9


@dataclass(frozen=True)
class ModelParams:
    n: int
    J: float
    w: float = 1.0

    def __post_init__(self):
        if self.n < 2:
            raise InvalidArgumentError("chain needs n >= 2 sites")
        if self.J < 0 or self.w < 0:
            raise InvalidArgumentError("J and w must be non-negative")


@dataclass(frozen=True)
class DisorderRealization:
    hx: np.ndarray
    hz: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        hx = np.asarray(self.hx, dtype=float)
        hz = np.asarray(self.hz, dtype=float)
        if hx.shape != hz.shape or hx.ndim != 1:
            raise InvalidArgumentError("hx and hz must be 1-D arrays of equal length")
        if np.any(np.abs(hx) > 1) or np.any(np.abs(hz) > 1):
            raise InvalidArgumentError("disorder fields must lie in [-1, 1]")
        object.__setattr__(self, "hx", hx)
        object.__setattr__(self, "hz", hz)

    @property
    def n(self) -> int:
        return len(self.hx)

    def single_site_frequencies(self, w: float = 1.0) -> np.ndarray:
        """Precession frequencies 2 w |h_i| of the decoupled spins."""
        return 2.0 * w * np.hypot(self.hx, self.hz)

    def to_json(self) -> str:
        return json.dumps({
            "n": self.n,
            "seed": self.seed,
            "hx": [float(f"{v:.17g}") for v in self.hx],
            "hz": [float(f"{v:.17g}") for v in self.hz],
        })

    @classmethod
    def from_json(cls, text: str) -> "DisorderRealization":
        d = json.loads(text)
        dis = cls(np.array(d["hx"]), np.array(d["hz"]), d.get("seed"))
        if dis.n != d["n"]:
            raise InvalidArgumentError("field arrays disagree with n")
        return dis


@dataclass
class EigenSystem:
    energies: np.ndarray
    states: np.ndarray  # columns are eigenvectors

    @property
    def dim(self) -> int:
        return len(self.energies)


@dataclass
class DeltaSpectrum:
    omegas: np.ndarray
    weights: np.ndarray

    def weight_at(self, omega: float, tol: float = MERGE_TOL) -> float:
        return float(self.weights[np.abs(self.omegas - omega) < tol].sum())

    def nonzero(self, tol: float = MERGE_TOL) -> "DeltaSpectrum":
        keep = np.abs(self.omegas) >= tol
        return DeltaSpectrum(self.omegas[keep], self.weights[keep])


def sample_disorder(n: int, seed) -> DisorderRealization:
    if n < 1:
        raise InvalidArgumentError("n must be >= 1")
    rng = np.random.default_rng(seed)
    hx = rng.uniform(-1.0, 1.0, n)
    hz = rng.uniform(-1.0, 1.0, n)
    tag = seed if isinstance(seed, (int, np.integer)) else None
    return DisorderRealization(hx, hz, None if tag is None else int(tag))


def pauli_z(n: int, site: int) -> np.ndarray:
    """Dense sigma^z on ``site`` (qubit 0 = least significant bit)."""
    if not 0 <= site < n:
        raise InvalidArgumentError(f"site {site} out of range")
    return np.diag(1.0 - 2.0 * ((np.arange(2 ** n) >> site) & 1)).astype(complex)


def build_hamiltonian(params: ModelParams, dis: DisorderRealization) -> np.ndarray:
    n = params.n
    if n > ORACLE_MAX_SITES:
        raise CapacityError(f"dense oracle capped at {ORACLE_MAX_SITES} sites, got {n}")
    if dis.n != n:
        raise InvalidArgumentError(f"realization has {dis.n} sites, model has {n}")
    dim = 2 ** n
    idx = np.arange(dim)
    bits = (idx[:, None] >> np.arange(n)) & 1
    z = 1 - 2 * bits  # z[b, i] = eigenvalue of Z_i on basis state b
    H = np.zeros((dim, dim), dtype=complex)

    diag = params.w * (z @ dis.hz)
    for i in range(n - 1):
        diag = diag + params.J * z[:, i] * z[:, i + 1]
        # XX + YY flips an anti-aligned pair with amplitude 2
        anti = bits[:, i] != bits[:, i + 1]
        src = idx[anti]
        H[src ^ (3 << i), src] += 2.0 * params.J
    H[idx, idx] += diag
    for i in range(n):
        H[idx ^ (1 << i), idx] += params.w * dis.hx[i]
    return H


def diagonalize(H: np.ndarray, tol: float = 1e-10) -> EigenSystem:
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise InvalidArgumentError("matrix must be square")
    if np.max(np.abs(H - H.conj().T), initial=0.0) > tol:
        raise InvalidArgumentError("matrix is not Hermitian")
    energies, states = np.linalg.eigh(H)
    return EigenSystem(energies, states)


def _merge(omegas: np.ndarray, weights: np.ndarray, tol: float = MERGE_TOL) -> DeltaSpectrum:
    if len(omegas) == 0:
        return DeltaSpectrum(np.zeros(0), np.zeros(0))
    order = np.argsort(omegas, kind="stable")
    om, wt = omegas[order], weights[order]
    # a new cluster starts wherever consecutive gaps exceed tol
    starts = np.concatenate([[True], np.diff(om) > tol])
    label = np.cumsum(starts) - 1
    total = np.bincount(label, weights=wt)
    count = np.bincount(label)
    center = np.bincount(label, weights=om) / count
    return DeltaSpectrum(center, total)


def _operator_in_eigenbasis(eig: EigenSystem, a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    if a.shape != (eig.dim, eig.dim):
        raise InvalidArgumentError(f"observable shape {a.shape} does not match dimension {eig.dim}")
    V = eig.states
    return V.conj().T @ a @ V  # [l, k] = <phi_l|a|phi_k>


def _gaps(eig: EigenSystem) -> np.ndarray:
    E = eig.energies
    return E[None, :] - E[:, None]  # [l, k] = E_k - E_l


def exact_spectral_function(eig: EigenSystem, a: np.ndarray, cutoff: float = 1e-12) -> DeltaSpectrum:
    """Weights |a_lk|**MATRIX_ELEMENT_EXPONENT at omega = E_k - E_l."""
    A = np.abs(_operator_in_eigenbasis(eig, a))
    keep = A > cutoff
    return _merge(_gaps(eig)[keep], A[keep] ** MATRIX_ELEMENT_EXPONENT)


def _coefficients(eig: EigenSystem, initial: StateVector | np.ndarray) -> np.ndarray:
    psi = initial.amplitudes if isinstance(initial, StateVector) else np.asarray(initial, dtype=complex)
    if psi.shape != (eig.dim,):
        raise InvalidArgumentError("initial state dimension mismatch")
    return eig.states.conj().T @ psi


def exact_expectation_series(eig: EigenSystem, a: np.ndarray, initial, times: Sequence[float]) -> np.ndarray:
    A = _operator_in_eigenbasis(eig, a)
    c = _coefficients(eig, initial)
    times = np.asarray(times, dtype=float)
    phases = np.exp(-1j * np.outer(times, eig.energies))  # [t, k]
    ct = phases * c[None, :]
    vals = np.einsum("tl,lk,tk->t", ct.conj(), A, ct)
    if np.max(np.abs(vals.imag), initial=0.0) > 1e-10:
        raise InvalidArgumentError("observable is not Hermitian: complex expectation values")
    return vals.real


def weighted_delta_spectrum(eig: EigenSystem, a: np.ndarray, initial, cutoff: float = 1e-14) -> DeltaSpectrum:
    """Weights |c_k c_l^* a_kl| at omega = E_k - E_l."""
    A = _operator_in_eigenbasis(eig, a)
    c = _coefficients(eig, initial)
    W = np.abs(np.outer(c.conj(), c) * A)  # [l, k]
    keep = W > cutoff
    return _merge(_gaps(eig)[keep], W[keep])


def exact_time_evolution(eig: EigenSystem, state: StateVector, t: float) -> StateVector:
    c = _coefficients(eig, state)
    amps = eig.states @ (np.exp(-1j * eig.energies * t) * c)
    return StateVector(state.n, amps)
