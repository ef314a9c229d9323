"""Spectral functions of local operators in the disordered Heisenberg chain,
from Trotterized statevector simulation with depolarizing-noise mitigation."""

from .errors import (
    CapacityError,
    DegenerateNormalizationError,
    InvalidArgumentError,
    UndefinedStatisticError,
)
from .model import (
    DeltaSpectrum,
    DisorderRealization,
    EigenSystem,
    ModelParams,
    build_hamiltonian,
    diagonalize,
    exact_expectation_series,
    exact_spectral_function,
    exact_time_evolution,
    sample_disorder,
    weighted_delta_spectrum,
)
from .noise import NoiseModel, depolarize_expectation, noisy_series, normalize_spectrum
from .spectral import (
    SpectrumSeries,
    TimeSeries,
    average_spectra,
    dft_magnitude,
    generate_series,
    time_grid,
)
from .statevector import (
    Circuit,
    Gate,
    StateVector,
    apply_gate,
    expectation_z,
    init_plus_state,
    run_circuit,
    sample_shots,
)
from .trotter import TrotterPlan, build_evolution_circuit, gate_counts, trotter_step, two_body_block

__version__ = "0.1.0"
