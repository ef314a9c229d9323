"""Matplotlib renderings of the run outputs, written next to the CSV data."""

from __future__ import annotations

from contextlib import contextmanager
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_STYLE = {
    "font.size": 8,
    "axes.labelsize": 9,
    "axes.titlesize": 9,
    "legend.fontsize": 7,
    "xtick.labelsize": 7,
    "ytick.labelsize": 7,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "lines.linewidth": 1.2,
    "savefig.dpi": 150,
    "figure.dpi": 100,
}


@contextmanager
def publication_style():
    with plt.rc_context(_STYLE):
        yield


def _save(fig, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    # fixed metadata keeps the PNG bytes reproducible
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return path


def plot_realization_spectra(groups: dict, path: Path, max_realizations: int = 2) -> Path:
    """Per-site spectra, one column per J, one row per realization."""
    Js = sorted({J for J, _ in groups})
    rows = min(max_realizations, min(len(g) for g in groups.values()))
    with publication_style():
        fig, axes = plt.subplots(rows, len(Js), figsize=(2.4 * len(Js), 1.9 * rows),
                                 squeeze=False, sharex=True)
        for c, J in enumerate(Js):
            group = next(g for (j, _), g in groups.items() if j == J)
            for r in range(rows):
                ax = axes[r, c]
                for site, sp in enumerate(group[r].spectrum.per_site()):
                    ax.plot(sp.omegas, sp.magnitudes, marker="o", ms=2.5, label=f"site {site}")
                ax.set_title(f"J={J:g}, realization {group[r].task.realization}")
                if r == rows - 1:
                    ax.set_xlabel(r"$\omega$")
                if c == 0:
                    ax.set_ylabel(r"$|\mathcal{F}\{\langle\sigma^z_i\rangle\}|$")
        axes[0, 0].legend(frameon=False)
        return _save(fig, path)


def plot_averaged_spectra(curves: dict, path: Path) -> Path:
    """Top row: averaged spectra; bottom row: divided by the omega = 0 value."""
    Js = sorted(curves)
    with publication_style():
        fig, axes = plt.subplots(2, len(Js), figsize=(2.2 * len(Js), 3.6), squeeze=False)
        for c, J in enumerate(Js):
            avg, norm = curves[J]
            axes[0, c].plot(avg.omegas, avg.magnitudes, "o-", ms=3)
            axes[0, c].set_title(f"J={J:g}")
            axes[1, c].plot(norm.omegas, norm.magnitudes, "o-", ms=3, color="C1")
            axes[1, c].set_xlabel(r"$\omega$")
        axes[0, 0].set_ylabel(r"$\bar{A}(\omega)$")
        axes[1, 0].set_ylabel(r"$\bar{A}(\omega)/\bar{A}(0)$")
        return _save(fig, path)


def plot_linewidth_histograms(stats: dict, path: Path) -> Path:
    Js = sorted(stats)
    with publication_style():
        fig, ax = plt.subplots(figsize=(3.4, 2.6))
        width = 0.8 / len(Js)
        for i, J in enumerate(Js):
            h = stats[J].histogram
            x = h.centers - 0.4 + width * (i + 0.5)
            ax.bar(x, h.probabilities, width=width, yerr=h.errors, capsize=1.5,
                   label=f"J={J:g}", error_kw={"linewidth": 0.6})
        ax.set_xlabel(r"$\Gamma$")
        ax.set_ylabel(r"$P(\Gamma)$")
        ax.legend(frameon=False, loc="upper right")
        inset = ax.inset_axes([0.45, 0.35, 0.3, 0.3])
        gb = [stats[J].gamma_bar for J in Js]
        sk = [stats[J].sk1 for J in Js]
        inset.plot(Js, gb, "o-", ms=3, label=r"$\bar\Gamma$")
        inset.plot(Js, sk, "s-", ms=3, label="Sk1")
        inset.set_xlabel("J", fontsize=6)
        inset.tick_params(labelsize=5)
        inset.legend(fontsize=5, frameon=False)
        return _save(fig, path)


def plot_scaling_collapse(curves: dict, path: Path) -> Path:
    ws = sorted(curves)
    with publication_style():
        fig, (a, b) = plt.subplots(1, 2, figsize=(6.0, 2.4))
        for w in ws:
            sp = curves[w]
            a.plot(sp.omegas, sp.magnitudes, label=f"w={w:g}")
            b.plot(sp.omegas / w, sp.magnitudes, label=f"w={w:g}")
        a.set_xlabel(r"$\omega$")
        b.set_xlabel(r"$\omega/w$")
        a.set_ylabel(r"$\bar{A}(\omega)$")
        a.legend(frameon=False)
        return _save(fig, path)


def plot_split_tree(tree, path: Path) -> Path:
    """Stick plot of the schematic branching spectrum (positive lines only)."""
    om, wt = tree.omegas, tree.weights
    keep = om > 0
    with publication_style():
        fig, ax = plt.subplots(figsize=(3.4, 2.0))
        ax.vlines(om[keep], 0, wt[keep], linewidth=0.8)
        parents = np.array(tree.parents)
        ax.plot(parents[parents > 0], np.full((parents > 0).sum(), 1.05), "v", ms=3, color="C3")
        ax.set_xlabel(r"$\omega$")
        ax.set_ylabel("weight")
        ax.set_title(rf"depth {tree.depth}, $\xi$={tree.xi:g}")
        return _save(fig, path)
