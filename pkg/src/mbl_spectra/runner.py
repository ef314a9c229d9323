"""End-to-end experiment orchestration: seeded sweeps, outputs, manifest, oracle check."""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import peaks, spectral
from .config import ConfigError, RunConfig
from .model import (
    DisorderRealization,
    ModelParams,
    build_hamiltonian,
    diagonalize,
    exact_expectation_series,
    exact_spectral_function,
    pauli_z,
    sample_disorder,
)
from .noise import NoiseModel, normalize_spectrum
from .statevector import init_plus_state
from .trotter import TrotterPlan, build_evolution_circuit, circuit_census, two_body_block

log = logging.getLogger(__name__)

# oracle-check thresholds
MITIGATION_TOL = 1e-12
EIGEN_TOL = 1e-9
BLOCK_TOL = 1e-10
SKIP_TOL = 1e-10
PEAK_PASS_FRACTION = 0.9
TROTTER_CHECK_M = 2000
TROTTER_CHECK_TOL = 1e-2


def _seed_int(*key: int) -> int:
    return int(np.random.SeedSequence(key[0], spawn_key=key[1:]).generate_state(1)[0])


def disorder_seed(base_seed: int, realization: int) -> int:
    """Seed of realization r; shared by every J so the sweeps see one ensemble."""
    return _seed_int(base_seed, 0, realization)


def shot_seed(base_seed: int, j_index: int, realization: int, w_index: int = 0) -> int:
    return _seed_int(base_seed, 1, j_index, realization, w_index)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_csv(path: Path, header: list[str], columns) -> None:
    cols = [np.asarray(c, dtype=float) for c in columns]
    lines = [",".join(header)]
    for row in zip(*cols):
        lines.append(",".join(_fmt(v) for v in row))
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")


def write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _tag(x: float) -> str:
    return f"{x:g}"


@dataclass(frozen=True)
class _Task:
    j_index: int
    J: float
    w_index: int
    w: float
    realization: int
    n: int
    m: int
    times: tuple[float, ...]
    shots: int | None
    noise_p: float | None
    base_seed: int
    skip: bool


@dataclass
class RealizationResult:
    task: _Task
    seed: int
    hx: np.ndarray
    hz: np.ndarray
    series: spectral.TimeSeries
    spectrum: spectral.SpectrumSeries


def _run_task(task: _Task) -> RealizationResult:
    seed = disorder_seed(task.base_seed, task.realization)
    dis = sample_disorder(task.n, seed)
    params = ModelParams(task.n, task.J, task.w)
    noise = None if task.noise_p is None else NoiseModel(task.noise_p, task.m)
    series = spectral.generate_series(
        params, dis, task.times, task.m, noise=noise, shots=task.shots,
        seed=shot_seed(task.base_seed, task.j_index, task.realization, task.w_index),
        skip_first_interaction=task.skip,
    )
    spec = spectral.dft_magnitude(series)
    spec.metadata.update(J=task.J, w=task.w, realization=task.realization)
    return RealizationResult(task, seed, dis.hx, dis.hz, series, spec)


def _map(tasks: list[_Task], workers: int) -> list[RealizationResult]:
    if workers <= 1 or len(tasks) < 2:
        results = [_run_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    results.sort(key=lambda r: (r.task.j_index, r.task.w_index, r.task.realization))
    return results


def _times(cfg: RunConfig, w: float) -> np.ndarray:
    if cfg.mode == "appendixB":
        return spectral.time_grid(cfg.t_max / w, cfg.samples)
    return spectral.time_grid(cfg.t_max, cfg.samples)


def sweep(cfg: RunConfig) -> list[RealizationResult]:
    ws = cfg.w_list if cfg.mode == "appendixB" else (cfg.w,)
    tasks = [
        _Task(j, J, wi, w, r, cfg.n, cfg.m, tuple(_times(cfg, w)), cfg.shots, cfg.noise_p,
              cfg.base_seed, cfg.skip_first_interaction)
        for j, J in enumerate(cfg.J_list)
        for wi, w in enumerate(ws)
        for r in range(cfg.realizations)
    ]
    return _map(tasks, cfg.workers)


def group_results(results: list[RealizationResult]) -> dict[tuple[float, float], list[RealizationResult]]:
    groups: dict[tuple[float, float], list[RealizationResult]] = {}
    for r in results:
        groups.setdefault((r.task.J, r.task.w), []).append(r)
    return groups


def averaged_spectrum(group: list[RealizationResult], per_realization_norm: bool = False) -> spectral.SpectrumSeries:
    specs = [r.spectrum for r in group]
    if per_realization_norm:
        specs = [normalize_spectrum(s) for sp in specs for s in sp.per_site()]
    return spectral.average_spectra(specs).nonnegative()


def group_linewidths(group: list[RealizationResult], cfg: RunConfig) -> np.ndarray:
    gammas = []
    for r in group:
        for site_spec in r.spectrum.per_site():
            gammas.extend(p.gamma for p in peaks.spectrum_peaks(
                site_spec, cfg.resolution, cfg.ripple, cfg.interpolation))
    return np.array(gammas)


def _manifest_rows(cfg: RunConfig, results: list[RealizationResult]) -> list[dict]:
    two, one = circuit_census(cfg.n, cfg.m, cfg.skip_first_interaction)
    rows = []
    for r in results:
        for t in r.series.times:
            executed = bool(t != 0.0)
            rows.append({
                "J": r.task.J, "w": r.task.w, "realization": r.task.realization,
                "disorder_seed": r.seed, "t": float(t), "executed": executed,
                "two_qubit": two if executed else 0, "single_qubit": one if executed else 0,
            })
    return rows


def _sidecar(cfg: RunConfig, J: float, w: float, ensemble: int) -> dict:
    return {
        "J": J, "w": w, "n": cfg.n, "m": cfg.m, "realizations": cfg.realizations,
        "ensemble_size": ensemble, "shots": cfg.shots, "noise_p": cfg.noise_p, "seed": cfg.base_seed,
    }


def _check_out(out: Path) -> None:
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise ConfigError(f"output directory {out} is not writable: {exc}") from exc


@dataclass
class RunResult:
    out: Path
    manifest: dict
    files: list[Path] = field(default_factory=list)
    report: dict | None = None

    @property
    def passed(self) -> bool:
        return self.report is None or bool(self.report.get("passed"))


def run_experiment(cfg: RunConfig) -> RunResult:
    cfg.validate()
    out = Path(cfg.out)
    _check_out(out)
    if cfg.mode == "oracle-check":
        report = oracle_check(cfg)
        path = out / "oracle_report.json"
        write_json(path, report)
        return RunResult(out, {"config": cfg.to_dict()}, [path], report)

    log.info("sweep: mode=%s n=%d J=%s realizations=%d", cfg.mode, cfg.n, cfg.J_list, cfg.realizations)
    results = sweep(cfg)
    groups = group_results(results)
    files: list[Path] = []
    summary: dict = {}

    if cfg.dump_circuit:
        files += _dump_circuits(cfg, results, out / "circuits")

    for (J, w), group in groups.items():
        for r in group:
            path = out / "series" / f"J{_tag(J)}_w{_tag(w)}_r{r.task.realization:03d}.csv"
            header = ["t"] + [f"z_site{i}" for i in range(cfg.n)]
            write_csv(path, header, [r.series.times] + list(r.series.values.T))
            files.append(path)

    if cfg.mode == "figure2":
        files += _emit_figure2(cfg, groups, out)
    elif cfg.mode in ("figure3", "figure4"):
        files += _emit_figure3(cfg, groups, out, summary)
        if cfg.mode == "figure4":
            files += _emit_figure4(cfg, groups, out, summary)
    elif cfg.mode == "appendixB":
        files += _emit_appendix_b(cfg, groups, out, summary)

    rows = _manifest_rows(cfg, results)
    manifest = {
        "config": cfg.to_dict(),
        "circuits": rows,
        "executed_circuits": sum(r["executed"] for r in rows),
        "analytic_points": sum(not r["executed"] for r in rows),
        "total_rows": len(rows),
        "summary": summary,
    }
    path = out / "manifest.json"
    write_json(path, manifest)
    files.append(path)
    return RunResult(out, manifest, files)


def _dump_circuits(cfg: RunConfig, results: list[RealizationResult], root: Path) -> list[Path]:
    files = []
    for r in results:
        dis = DisorderRealization(r.hx, r.hz, r.seed)
        params = ModelParams(cfg.n, r.task.J, r.task.w)
        for t in r.series.times:
            if t == 0.0:
                continue
            circ = build_evolution_circuit(TrotterPlan(params, dis, float(t), cfg.m, cfg.skip_first_interaction))
            path = root / f"J{_tag(r.task.J)}_w{_tag(r.task.w)}_r{r.task.realization:03d}_t{_tag(t)}.txt"
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(circ.to_text())
            files.append(path)
    return files


def _emit_figure2(cfg, groups, out: Path) -> list[Path]:
    files = []
    for (J, w), group in groups.items():
        for r in group:
            for site, sp in enumerate(r.spectrum.per_site()):
                path = out / "spectra" / f"J{_tag(J)}_r{r.task.realization:03d}_site{site}.csv"
                write_csv(path, ["omega", "magnitude"], [sp.omegas, sp.magnitudes])
                files.append(path)
    if cfg.figures:
        from . import plotting

        files.append(plotting.plot_realization_spectra(groups, out / "figures" / "figure2.png"))
    return files


def _emit_figure3(cfg, groups, out: Path, summary: dict) -> list[Path]:
    files = []
    curves = {}
    for (J, w), group in groups.items():
        avg = averaged_spectrum(group, cfg.per_realization_norm)
        norm = normalize_spectrum(avg)
        for kind, sp in (("avg", avg), ("norm", norm)):
            path = out / "figure3" / f"{kind}_J{_tag(J)}.csv"
            write_csv(path, ["omega", "magnitude"], [sp.omegas, sp.magnitudes])
            files.append(path)
        side = out / "figure3" / f"avg_J{_tag(J)}.json"
        write_json(side, _sidecar(cfg, J, w, avg.metadata["ensemble_size"]))
        files.append(side)
        curves[J] = (avg, norm)
        summary.setdefault("figure3", {})[_tag(J)] = {
            "A_omega1": float(avg.magnitudes[1]),
            "A_omega0": float(avg.magnitudes[0]),
            "normalized_omega1": float(norm.magnitudes[1]),
        }
    if cfg.figures:
        from . import plotting

        files.append(plotting.plot_averaged_spectra(curves, out / "figures" / "figure3.png"))
    return files


def _emit_figure4(cfg, groups, out: Path, summary: dict) -> list[Path]:
    files = []
    stats = {}
    for (J, w), group in groups.items():
        gammas = group_linewidths(group, cfg)
        path = out / "figure4" / f"gammas_J{_tag(J)}.csv"
        write_csv(path, ["gamma"], [gammas])
        files.append(path)
        st = peaks.linewidth_stats(gammas)
        stats[J] = st
        path = out / "figure4" / f"linewidths_J{_tag(J)}.json"
        write_json(path, {"J": J, **st.to_dict()})
        files.append(path)
        log.info("J=%g: %d peaks, gamma_bar=%.4f, Sk1=%.4f", J, st.count, st.gamma_bar, st.sk1)
        summary.setdefault("figure4", {})[_tag(J)] = {
            "gamma_bar": st.gamma_bar, "sk1": st.sk1, "count": st.count}
    if cfg.figures:
        from . import plotting

        files.append(plotting.plot_linewidth_histograms(stats, out / "figures" / "figure4.png"))
    return files


def collapse_deviation(curves: dict[float, spectral.SpectrumSeries], x_min: float = 2.0) -> dict[float, float]:
    """Relative L2 distance of each omega/w-rescaled curve from the mean curve on omega/w > x_min.

    All curves must share one omega/w grid.
    """
    ws = sorted(curves)
    x = curves[ws[0]].omegas / ws[0]
    for w in ws[1:]:
        if np.max(np.abs(curves[w].omegas / w - x)) > 1e-9:
            raise ConfigError("rescaled frequency grids differ")
    tail = x > x_min
    stack = np.array([curves[w].magnitudes[tail] for w in ws])
    mean = stack.mean(axis=0)
    return {w: float(np.linalg.norm(stack[i] - mean) / np.linalg.norm(mean)) for i, w in enumerate(ws)}


def _emit_appendix_b(cfg, groups, out: Path, summary: dict) -> list[Path]:
    files = []
    curves = {}
    for (J, w), group in groups.items():
        avg = averaged_spectrum(group, cfg.per_realization_norm)
        curves[w] = avg
        path = out / "appendixB" / f"avg_J{_tag(J)}_w{_tag(w)}.csv"
        write_csv(path, ["omega", "magnitude"], [avg.omegas, avg.magnitudes])
        files.append(path)
        path = out / "appendixB" / f"scaled_J{_tag(J)}_w{_tag(w)}.csv"
        write_csv(path, ["omega_over_w", "magnitude"], [avg.omegas / w, avg.magnitudes])
        files.append(path)
        side = out / "appendixB" / f"avg_J{_tag(J)}_w{_tag(w)}.json"
        write_json(side, _sidecar(cfg, J, w, avg.metadata["ensemble_size"]))
        files.append(side)
    if len(curves) > 1:
        summary["collapse_deviation"] = {_tag(w): d for w, d in collapse_deviation(curves).items()}
    if cfg.figures:
        from . import plotting

        files.append(plotting.plot_scaling_collapse(curves, out / "figures" / "appendixB.png"))
    return files


# -- oracle cross-check ----------------------------------------------------------

def _block_deviation(samples: int = 20, seed: int = 0) -> float:
    from scipy.linalg import expm

    from .statevector import apply_gates_batch

    rng = np.random.default_rng(seed)
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    y = np.array([[0, -1j], [1j, 0]])
    z = np.diag([1.0, -1.0]).astype(complex)
    heis = sum(np.kron(p, p) for p in (x, y, z))
    worst = 0.0
    for _ in range(samples):
        J, d = rng.uniform(0, 1), rng.uniform(0, 2)
        U = apply_gates_batch(np.eye(4, dtype=complex), 2, two_body_block(J, d, 0, 1))
        worst = max(worst, phase_aligned_distance(U, expm(-1j * J * d * heis)))
    return worst


def phase_aligned_distance(A: np.ndarray, B: np.ndarray) -> float:
    """max |A - e^{i phi} B| with phi chosen to align the largest entry of B."""
    k = np.argmax(np.abs(B))
    ph = A.flat[k] / B.flat[k]
    ph /= abs(ph)
    return float(np.max(np.abs(A - ph * B)))


def oracle_check(cfg: RunConfig) -> dict:
    """Cross-validate the circuit pipeline against exact diagonalization."""
    checks = []

    def add(name, value, threshold, passed, **extra):
        checks.append({"name": name, "value": value, "threshold": threshold, "passed": bool(passed), **extra})

    # two-site Heisenberg singlet/triplet
    e = diagonalize(build_hamiltonian(ModelParams(2, 1.0, 0.0), sample_disorder(2, 0))).energies
    dev = float(np.max(np.abs(e - np.array([-3.0, 1.0, 1.0, 1.0]))))
    add("two_site_eigenvalues", dev, EIGEN_TOL, dev < EIGEN_TOL)

    dev = _block_deviation()
    add("block_exactness", dev, BLOCK_TOL, dev < BLOCK_TOL)

    n = min(cfg.n, 6)
    times = spectral.time_grid(cfg.t_max, cfg.samples)
    J_probe = max(cfg.J_list)

    # fixed-m first-block elision
    worst = 0.0
    for r in range(3):
        dis = sample_disorder(n, disorder_seed(cfg.base_seed, r))
        p = ModelParams(n, J_probe, cfg.w)
        a = spectral.generate_series(p, dis, times, cfg.m, skip_first_interaction=True).values
        b = spectral.generate_series(p, dis, times, cfg.m, skip_first_interaction=False).values
        worst = max(worst, float(np.max(np.abs(a - b))))
    add("skip_first_block", worst, SKIP_TOL, worst < SKIP_TOL)

    # Trotter vs exact
    dis = sample_disorder(n, disorder_seed(cfg.base_seed, 0))
    p = ModelParams(n, J_probe, cfg.w)
    eig = diagonalize(build_hamiltonian(p, dis))
    exact = np.column_stack([
        exact_expectation_series(eig, pauli_z(n, i), init_plus_state(n), times) for i in range(n)])
    at_m = float(np.max(np.abs(spectral.generate_series(p, dis, times, cfg.m).values - exact)))
    fine = float(np.max(np.abs(spectral.generate_series(p, dis, times, TROTTER_CHECK_M).values - exact)))
    add("trotter_vs_exact", fine, TROTTER_CHECK_TOL, fine < TROTTER_CHECK_TOL,
        m=TROTTER_CHECK_M, deviation_at_config_m=at_m)

    # mitigation identity over a small ensemble
    base = replace(cfg, mode="figure3", n=n, shots=None, realizations=min(cfg.realizations, 24),
                   J_list=(J_probe,), workers=1)
    clean = sweep(replace(base, noise_p=None))
    noisy = sweep(replace(base, noise_p=0.9))
    a = normalize_spectrum(averaged_spectrum(clean))
    b = normalize_spectrum(averaged_spectrum(noisy))
    dev = float(np.max(np.abs(a.magnitudes - b.magnitudes)))
    add("mitigation_identity", dev, MITIGATION_TOL, dev < MITIGATION_TOL)

    # decoupled spins: exact deltas and dominant DFT bins
    hits = np.zeros(n)
    delta_dev = 0.0
    trials = 100
    half_bin = math.pi / (len(times) * (times[1] - times[0]))
    for r in range(trials):
        dis = sample_disorder(n, disorder_seed(cfg.base_seed, 10_000 + r))
        eig = diagonalize(build_hamiltonian(ModelParams(n, 0.0, cfg.w), dis))
        freqs = dis.single_site_frequencies(cfg.w)
        vals = []
        for i in range(n):
            zi = pauli_z(n, i)
            sf = exact_spectral_function(eig, zi).nonzero()
            delta_dev = max(delta_dev, float(np.max(np.abs(np.abs(sf.omegas) - freqs[i]), initial=0.0)))
            vals.append(exact_expectation_series(eig, zi, init_plus_state(n), times))
        sp = spectral.dft_magnitude(spectral.TimeSeries(times, np.column_stack(vals))).nonnegative()
        k = 1 + np.argmax(sp.magnitudes[1:], axis=0)
        hits += np.abs(sp.omegas[k] - freqs) <= half_bin
    add("decoupled_delta_positions", delta_dev, EIGEN_TOL, delta_dev < EIGEN_TOL)
    frac = float(np.min(hits) / trials)
    add("decoupled_dft_peaks", frac, PEAK_PASS_FRACTION, frac >= PEAK_PASS_FRACTION)

    return {"checks": checks, "passed": all(c["passed"] for c in checks)}
