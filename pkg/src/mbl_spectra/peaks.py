"""Linewidth extraction and statistics for per-realization spectra.

Procedure: interpolate each spectrum onto a dense grid, locate its peaks,
and take each peak's full width at half its topographic prominence.  The
widths are then histogrammed in unit bins with binomial error bars and
summarized by their mean and Pearson's first skewness coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.interpolate import BarycentricInterpolator, CubicSpline

from .errors import InvalidArgumentError, UndefinedStatisticError

# Peaks below this fraction of the curve maximum are treated as interpolation ripple.
RIPPLE_FRACTION = 0.02
DEFAULT_RESOLUTION = 200  # dense-grid points per unit frequency
TIE_RTOL = 1e-9  # terrain within this (relative to the curve maximum) of a peak counts as level


@dataclass
class DenseCurve:
    omegas: np.ndarray
    values: np.ndarray

    @property
    def step(self) -> float:
        return float(self.omegas[1] - self.omegas[0])


@dataclass(frozen=True)
class PeakRecord:
    center: float
    height: float
    prominence: float
    gamma: float
    index: int = -1


@dataclass
class Histogram:
    edges: np.ndarray
    counts: np.ndarray
    probabilities: np.ndarray
    errors: np.ndarray

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    def rows(self) -> list[dict]:
        return [
            {"bin_lo": float(lo), "bin_hi": float(hi), "p": float(p), "err": float(e)}
            for lo, hi, p, e in zip(self.edges[:-1], self.edges[1:], self.probabilities, self.errors)
        ]


@dataclass
class LinewidthStats:
    histogram: Histogram
    gamma_bar: float
    sk1: float
    count: int
    gammas: np.ndarray = field(repr=False, default_factory=lambda: np.zeros(0))

    def to_dict(self) -> dict:
        return {
            "gamma_bar": self.gamma_bar,
            "sk1": self.sk1,
            "count": self.count,
            "histogram": self.histogram.rows(),
        }


def interpolate_spectrum(spec, resolution: float = DEFAULT_RESOLUTION, method: str = "spline") -> DenseCurve:
    """Smooth curve through every (omega_k, magnitude_k) on a uniform dense grid.

    ``method="spline"`` is a C2 piecewise cubic (not-a-knot ends);
    ``"polynomial"`` is the single global interpolating polynomial.
    """
    x = np.asarray(spec.omegas, dtype=float)
    y = np.asarray(spec.magnitudes, dtype=float)
    if y.ndim != 1:
        raise InvalidArgumentError("interpolate one spectrum at a time")
    if len(x) < 4:
        raise InvalidArgumentError("need at least 4 samples to interpolate")
    span = x[-1] - x[0]
    cells = max(int(np.ceil(span * resolution)), len(x) - 1)
    # put every knot on the dense grid when the knots are uniform
    knot_cells = len(x) - 1
    cells = knot_cells * max(1, int(np.ceil(cells / knot_cells)))
    grid = np.linspace(x[0], x[-1], cells + 1)
    if method == "spline":
        f = CubicSpline(x, y)
    elif method == "polynomial":
        f = BarycentricInterpolator(x, y)
    else:
        raise InvalidArgumentError(f"unknown interpolation method {method!r}")
    return DenseCurve(grid, np.asarray(f(grid), dtype=float))


def _crossing(x0: float, x1: float, y0: float, y1: float, level: float) -> float:
    if y1 == y0:
        return x0
    return x0 + (level - y0) * (x1 - x0) / (y1 - y0)


def find_peaks(curve: DenseCurve) -> list[PeakRecord]:
    """Every strict interior local maximum with prominence and half-prominence width.

    Terrain equal to the peak height within ``TIE_RTOL`` does not stop the
    base search, so mirror-image twins of a symmetric spectrum get the same
    prominence whichever one roundoff happens to favour.
    """
    x, y = curve.omegas, curve.values
    n = len(y)
    tie = TIE_RTOL * float(np.max(np.abs(y), initial=0.0))
    out = []
    for i in range(1, n - 1):
        if not (y[i] > y[i - 1] and y[i] > y[i + 1]):
            continue
        h = y[i]
        top = h + tie
        # walk outwards until terrain rises above the peak; track the lowest point
        j = i - 1
        left_min, left_base = y[i - 1], i - 1
        while j >= 0 and y[j] <= top:
            if y[j] < left_min:
                left_min, left_base = y[j], j
            j -= 1
        j = i + 1
        right_min, right_base = y[i + 1], i + 1
        while j < n and y[j] <= top:
            if y[j] < right_min:
                right_min, right_base = y[j], j
            j += 1
        prom = h - max(left_min, right_min)
        level = h - prom / 2
        j = i
        while j > left_base and y[j] > level:
            j -= 1
        xl = _crossing(x[j], x[j + 1], y[j], y[j + 1], level)
        j = i
        while j < right_base and y[j] > level:
            j += 1
        xr = _crossing(x[j - 1], x[j], y[j - 1], y[j], level)
        out.append(PeakRecord(float(x[i]), float(h), float(prom), float(xr - xl), i))
    return out


def spectrum_peaks(
    spec,
    resolution: float = DEFAULT_RESOLUTION,
    ripple: float = RIPPLE_FRACTION,
    method: str = "spline",
    positive_only: bool = True,
) -> list[PeakRecord]:
    """Peaks of one spectrum after the ripple cut, optionally only omega > 0."""
    curve = interpolate_spectrum(spec, resolution, method)
    peaks = find_peaks(curve)
    floor = ripple * float(np.max(curve.values))
    keep = [p for p in peaks if p.prominence >= floor]
    if positive_only:
        keep = [p for p in keep if p.center > 0]
    return keep


def linewidth_histogram(gammas: Sequence[float], bin_width: float = 1.0) -> Histogram:
    g = np.asarray(gammas, dtype=float)
    if g.size == 0:
        raise InvalidArgumentError("no linewidths to histogram")
    if np.any(g < 0):
        raise InvalidArgumentError("linewidths must be non-negative")
    nbins = int(np.floor(g.max() / bin_width)) + 1
    edges = bin_width * np.arange(nbins + 1)
    idx = np.minimum((g // bin_width).astype(int), nbins - 1)
    counts = np.bincount(idx, minlength=nbins)
    N = g.size
    p = counts / N
    err = np.sqrt(p * (1 - p) / N)
    return Histogram(edges, counts, p, err)


def histogram_mode(gammas: Sequence[float], bin_width: float = 1.0) -> float:
    """Center of the most populated bin; ties go to the lower bin."""
    hist = linewidth_histogram(gammas, bin_width)
    return float(hist.centers[int(np.argmax(hist.counts))])


def skewness_sk1(gammas: Sequence[float], bin_width: float = 1.0) -> float:
    """Pearson's first skewness coefficient (mean - mode) / sample std."""
    g = np.asarray(gammas, dtype=float)
    if g.size < 2:
        raise UndefinedStatisticError("need at least two values")
    std = g.std(ddof=1)
    if std == 0:
        raise UndefinedStatisticError("zero variance")
    return float((g.mean() - histogram_mode(g, bin_width)) / std)


def mean_linewidth(gammas: Sequence[float]) -> float:
    g = np.asarray(gammas, dtype=float)
    if g.size == 0:
        raise InvalidArgumentError("no linewidths")
    return float(g.mean())


def linewidth_stats(gammas: Sequence[float], bin_width: float = 1.0) -> LinewidthStats:
    g = np.asarray(gammas, dtype=float)
    return LinewidthStats(
        histogram=linewidth_histogram(g, bin_width),
        gamma_bar=mean_linewidth(g),
        sk1=skewness_sk1(g, bin_width),
        count=int(g.size),
        gammas=g,
    )


@dataclass
class SplitTreeSpectrum:
    deltas: list[tuple[float, float]]
    xi: float
    depth: int
    parents: list[float] = field(default_factory=list)
    leaf_parent: list[int] = field(default_factory=list)

    @property
    def omegas(self) -> np.ndarray:
        return np.array([d[0] for d in self.deltas])

    @property
    def weights(self) -> np.ndarray:
        return np.array([d[1] for d in self.deltas])


def splitting_tree_spectrum(J: float, w: float, xi: float, depth: int, hx, hz) -> SplitTreeSpectrum:
    """Schematic localized-phase spectrum: each decoupled line branches binarily.

    Level d = 1..depth splits every line into two equal-weight lines
    J exp(-d / xi) apart, centred on the parent.
    """
    if xi <= 0:
        raise InvalidArgumentError("xi must be positive")
    if depth < 0:
        raise InvalidArgumentError("depth must be >= 0")
    base = 2.0 * w * np.hypot(np.asarray(hx, float), np.asarray(hz, float))
    parents = [float(s * b) for b in base for s in (1.0, -1.0)]
    deltas, owner = [], []
    for pi, f in enumerate(parents):
        lines = [(f, 1.0)]
        for d in range(1, depth + 1):
            half = 0.5 * J * np.exp(-d / xi)
            lines = [(c + s * half, wt / 2) for c, wt in lines for s in (-1.0, 1.0)]
        deltas.extend(lines)
        owner.extend([pi] * len(lines))
    return SplitTreeSpectrum(deltas, xi, depth, parents, owner)
