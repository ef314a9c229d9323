"""Time series of local <Z_i(t)> and their discrete Fourier spectra."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidArgumentError
from .model import DisorderRealization, ModelParams
from .noise import NoiseModel, depolarized_probabilities
from .statevector import (
    StateVector,
    expectation_z_all,
    init_plus_state,
    run_circuit,
    sample_bitstrings,
    z_estimates_from_bitstrings,
)
from .trotter import TrotterPlan, build_evolution_circuit, evolve_plus_state

_SPACING_TOL = 1e-9


@dataclass
class TimeSeries:
    times: np.ndarray
    values: np.ndarray  # shape (len(times), n_sites)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim == 1:
            self.values = self.values[:, None]
        if self.values.shape[0] != len(self.times):
            raise InvalidArgumentError("values and times disagree in length")
        if np.any(np.diff(self.times) <= 0):
            raise InvalidArgumentError("times must be strictly increasing")

    @property
    def n_sites(self) -> int:
        return self.values.shape[1]


@dataclass
class SpectrumSeries:
    omegas: np.ndarray
    magnitudes: np.ndarray  # (len(omegas),) or (len(omegas), n_sites)
    metadata: dict = field(default_factory=dict)

    def per_site(self) -> list["SpectrumSeries"]:
        if self.magnitudes.ndim == 1:
            return [self]
        return [
            SpectrumSeries(self.omegas, self.magnitudes[:, i], {**self.metadata, "site": i})
            for i in range(self.magnitudes.shape[1])
        ]

    def nonnegative(self) -> "SpectrumSeries":
        keep = self.omegas >= -1e-12
        return SpectrumSeries(self.omegas[keep], self.magnitudes[keep], dict(self.metadata))

    def value_at(self, omega: float):
        i = int(np.argmin(np.abs(self.omegas - omega)))
        return self.magnitudes[i]


def time_grid(t_max: float = 10.0, samples: int = 10) -> np.ndarray:
    """The ``samples`` measured instants in (0, t_max] with t = 0 prepended."""
    if samples < 1:
        raise InvalidArgumentError("samples must be >= 1")
    if t_max <= 0:
        raise InvalidArgumentError("t_max must be positive")
    return np.concatenate([[0.0], t_max * np.arange(1, samples + 1) / samples])


def generate_series(
    params: ModelParams,
    dis: DisorderRealization,
    times: Sequence[float],
    m: int = 6,
    noise: NoiseModel | None = None,
    shots: int | None = None,
    seed=None,
    skip_first_interaction: bool = True,
    method: str = "unitary",
) -> TimeSeries:
    """Per-site <Z_i(t)> from one Trotter circuit per nonzero time.

    Every circuit uses the same ``m``.  The t = 0 row is set to 0 without
    simulation.  ``method="gates"`` runs each circuit gate by gate;
    ``"unitary"`` uses dense step matrices (same result, faster for large m).
    With ``shots``, full bitstrings are drawn from the (depolarized) output
    distribution and every site is estimated from that one record.
    """
    times = np.asarray(times, dtype=float)
    n = params.n
    values = np.zeros((len(times), n))
    seeds = np.random.SeedSequence(seed).spawn(len(times)) if shots is not None else None
    for s, t in enumerate(times):
        if t == 0.0:
            continue
        plan = TrotterPlan(params, dis, float(t), m, skip_first_interaction)
        if method == "unitary":
            state = StateVector(n, evolve_plus_state(plan))
        elif method == "gates":
            state = run_circuit(init_plus_state(n), build_evolution_circuit(plan))
        else:
            raise InvalidArgumentError(f"unknown method {method!r}")
        if shots is None:
            clean = expectation_z_all(state)
            values[s] = clean if noise is None else noise.epsilon * clean
        else:
            probs = depolarized_probabilities(state.probabilities(), noise)
            samples = sample_bitstrings(probs, shots, seeds[s])
            values[s] = z_estimates_from_bitstrings(samples, n)
    return TimeSeries(times, values)


def dft_frequencies(n_samples: int, dt: float) -> np.ndarray:
    half = n_samples // 2
    return 2 * np.pi * np.arange(-half, half + 1) / (n_samples * dt)


def dft_magnitude(series: TimeSeries, pad_to: int | None = None) -> SpectrumSeries:
    """Unnormalized |sum_s v_s exp(-i omega_k s dt)| on omega_k = 2 pi k / (N dt).

    k runs over -floor(N/2) .. floor(N/2).  ``pad_to`` appends zeros to the
    series before transforming, refining the grid.
    """
    t = series.times
    if len(t) < 2:
        raise InvalidArgumentError("need at least two samples")
    steps = np.diff(t)
    dt = steps[0]
    if np.max(np.abs(steps - dt)) > _SPACING_TOL * max(1.0, dt):
        raise InvalidArgumentError("DFT requires uniformly spaced samples")
    N = len(t) if pad_to is None else int(pad_to)
    if N < len(t):
        raise InvalidArgumentError("pad_to shorter than the series")
    omegas = dft_frequencies(N, dt)
    s = np.arange(len(t))
    kernel = np.exp(-1j * np.outer(omegas, s * dt))
    mags = np.abs(kernel @ series.values)
    if mags.shape[1] == 1:
        mags = mags[:, 0]
    return SpectrumSeries(omegas, mags, {"N": N, "dt": float(dt)})


def average_spectra(spectra: Sequence[SpectrumSeries]) -> SpectrumSeries:
    """Pointwise mean over every spectrum (and every site column) given."""
    if not spectra:
        raise InvalidArgumentError("nothing to average")
    grid = spectra[0].omegas
    cols = []
    for sp in spectra:
        if sp.omegas.shape != grid.shape or np.max(np.abs(sp.omegas - grid)) > 1e-12:
            raise InvalidArgumentError("frequency grids differ")
        m = sp.magnitudes
        cols.append(m[:, None] if m.ndim == 1 else m)
    stacked = np.concatenate(cols, axis=1)
    meta = {k: v for k, v in spectra[0].metadata.items() if k not in ("site", "realization")}
    meta["ensemble_size"] = stacked.shape[1]
    return SpectrumSeries(grid.copy(), stacked.mean(axis=1), meta)
