"""The five figure styles regenerated from benchmark CSVs.

Every figure is a pure function of its input files: the style is pinned, SVG
output carries no timestamp, and the hash salt is fixed, so identical CSVs
produce identical image bytes.
"""

from __future__ import annotations

import warnings
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .loading import (
    MissingInputError,
    load_hybrid_summaries,
    load_hybrid_trajectories,
    load_spectra,
    load_trotter_summaries,
    load_trotter_trajectories,
)

LOG_FLOOR = 1e-16

_STYLE = {
    "figure.dpi": 100,
    "font.family": "DejaVu Sans",
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "svg.hashsalt": "figkit",
    "svg.fonttype": "path",
}

_COLORS = {"AD": "tab:blue", "CD": "tab:orange",
           "havqds": "tab:green", "avqds": "tab:red"}


def _color(series: str) -> str:
    return _COLORS.get(series, "tab:gray")


def _save(fig, out_dir: Path, name: str) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{name}.svg"
    fig.savefig(path, metadata={"Date": None})
    plt.close(fig)
    return path


def _mean_std(rows, value, keys):
    """Group rows by the key columns; mean and std of a float column each."""
    groups: dict[tuple, list[float]] = {}
    for row in rows:
        groups.setdefault(tuple(row[k] for k in keys), []).append(
            float(row[value])
        )
    return {
        key: (float(np.mean(vals)), float(np.std(vals)))
        for key, vals in groups.items()
    }


def _series_over_t(rows, label_column, value):
    """label -> (sorted T array, mean array, std array)."""
    stats = _mean_std(rows, value, (label_column, "T"))
    out = {}
    for label in sorted({r[label_column] for r in rows}):
        ts = sorted(
            {float(t) for lbl, t in stats if lbl == label}
        )
        means = np.array([stats[(label, _t_key(rows, t))][0] for t in ts])
        stds = np.array([stats[(label, _t_key(rows, t))][1] for t in ts])
        out[label] = (np.array(ts), means, stds)
    return out


def _t_key(rows, t: float) -> str:
    for row in rows:
        if float(row["T"]) == t:
            return row["T"]
    raise KeyError(t)


def clamp_log(values: np.ndarray, context: str) -> np.ndarray:
    """Clamp nonpositive values before a log axis, warning once."""
    values = np.asarray(values, dtype=float)
    bad = values <= 0.0
    if np.any(bad):
        warnings.warn(
            f"{context}: {int(np.sum(bad))} nonpositive value(s) clamped to "
            f"{LOG_FLOOR:g} for the log scale"
        )
        values = np.where(bad, LOG_FLOOR, values)
    return values


def quadratic_fit(sizes, means) -> tuple[float, float, float]:
    """Unweighted least-squares fit a*n^2 + b*n; returns (a, b, R^2)."""
    sizes = np.asarray(sizes, dtype=float)
    means = np.asarray(means, dtype=float)
    if len(sizes) < 2:
        raise ValueError("quadratic fit needs at least two sizes")
    design = np.column_stack([sizes ** 2, sizes])
    coeffs, *_ = np.linalg.lstsq(design, means, rcond=None)
    predicted = design @ coeffs
    ss_res = float(np.sum((means - predicted) ** 2))
    ss_tot = float(np.sum((means - np.mean(means)) ** 2))
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(coeffs[0]), float(coeffs[1]), r_squared


# ---------------------------------------------------------------------------
# Figures
# ---------------------------------------------------------------------------

def fig1(csv_dir: Path, out_dir: Path) -> Path:
    """Final approximation ratio vs total time, AD/CD, mean with error bars."""
    rows = load_trotter_summaries(csv_dir)
    if not rows:
        raise MissingInputError(f"fig1: no Trotter summary rows under {csv_dir}")
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(4.2, 3.2))
        for label, (ts, means, stds) in _series_over_t(
            rows, "protocol", "r_final"
        ).items():
            ax.errorbar(ts, means, yerr=stds, marker="o", capsize=3,
                        color=_color(label), label=label)
        ax.set_xlabel("total time T")
        ax.set_ylabel("approximation ratio r")
        ax.legend()
        fig.tight_layout()
        return _save(fig, out_dir, "fig1")


def _ratio_curves(rows, label_column):
    """(label, T) -> (s array, mean ratio, std ratio) averaged over seeds."""
    curves = {}
    for label in sorted({r[label_column] for r in rows}):
        for t in sorted({r["T"] for r in rows if r[label_column] == label},
                        key=float):
            subset = [r for r in rows if r[label_column] == label and r["T"] == t]
            stats = _mean_std(subset, "ratio", ("step",))
            steps = sorted(stats, key=lambda k: int(k[0]))
            s_of_step = {r["step"]: float(r["s"]) for r in subset}
            s = np.array([s_of_step[k[0]] for k in steps])
            means = np.array([stats[k][0] for k in steps])
            stds = np.array([stats[k][1] for k in steps])
            curves[(label, t)] = (s, means, stds)
    return curves


def fig2(csv_dir: Path, out_dir: Path) -> Path:
    """Ratio along the schedule per protocol, plus E0..E4 level curves."""
    rows = load_trotter_trajectories(csv_dir)
    if not rows:
        raise MissingInputError(
            f"fig2: no Trotter trajectory rows under {csv_dir}"
        )
    spectra = load_spectra(csv_dir)
    panels = 2 if spectra else 1
    with plt.rc_context(_STYLE):
        fig, axes = plt.subplots(1, panels, figsize=(4.2 * panels, 3.2),
                                 squeeze=False)
        ax = axes[0][0]
        for (label, t), (s, means, stds) in _ratio_curves(
            rows, "protocol"
        ).items():
            line, = ax.plot(s, means, color=_color(label),
                            label=f"{label}, T={float(t):g}")
            ax.fill_between(s, means - stds, means + stds,
                            color=line.get_color(), alpha=0.2, linewidth=0)
        ax.set_xlabel("schedule s")
        ax.set_ylabel("approximation ratio r")
        ax.legend()
        if spectra:
            ax = axes[0][1]
            for level in range(5):
                stats = _mean_std(spectra, f"E{level}", ("s",))
                svals = sorted(stats, key=lambda k: float(k[0]))
                s = np.array([float(k[0]) for k in svals])
                means = np.array([stats[k][0] for k in svals])
                stds = np.array([stats[k][1] for k in svals])
                line, = ax.plot(s, means, label=f"E{level}")
                ax.fill_between(s, means - stds, means + stds,
                                color=line.get_color(), alpha=0.2, linewidth=0)
            ax.set_xlabel("schedule s")
            ax.set_ylabel("energy")
            ax.legend(fontsize=7)
        fig.tight_layout()
        return _save(fig, out_dir, "fig2")


def fig3(csv_dir: Path, out_dir: Path) -> Path:
    """Approximation error 1 - r and CNOT count vs total time, log scales."""
    trotter = load_trotter_summaries(csv_dir)
    hybrid = load_hybrid_summaries(csv_dir)
    if not trotter and not hybrid:
        raise MissingInputError(f"fig3: no summary rows under {csv_dir}")
    series = {}
    if trotter:
        series.update(_series_over_t(trotter, "protocol", "r_final"))
    if hybrid:
        series.update(_series_over_t(hybrid, "method", "r_final"))
    cnots = {}
    if trotter:
        cnots.update(_series_over_t(trotter, "protocol", "cnot_total"))
    if hybrid:
        cnots.update(_series_over_t(hybrid, "method", "cnot_total"))
    with plt.rc_context(_STYLE):
        fig, (ax_err, ax_cnot) = plt.subplots(1, 2, figsize=(8.4, 3.2))
        for label, (ts, means, _stds) in series.items():
            err = clamp_log(1.0 - means, f"fig3 1-r series {label}")
            ax_err.plot(ts, err, marker="o", color=_color(label), label=label)
        ax_err.set_xscale("log")
        ax_err.set_yscale("log")
        ax_err.set_xlabel("total time T")
        ax_err.set_ylabel("1 - r")
        ax_err.legend()
        for label, (ts, means, _stds) in cnots.items():
            ax_cnot.plot(ts, clamp_log(means, f"fig3 CNOT series {label}"),
                         marker="s", color=_color(label), label=label)
        ax_cnot.set_xscale("log")
        ax_cnot.set_yscale("log")
        ax_cnot.set_xlabel("total time T")
        ax_cnot.set_ylabel("CNOT count")
        ax_cnot.legend()
        fig.tight_layout()
        return _save(fig, out_dir, "fig3")


def fig4(csv_dir: Path, out_dir: Path) -> Path:
    """Grid of hybrid r(s) curves, one panel per system size."""
    rows = load_hybrid_trajectories(csv_dir)
    if not rows:
        raise MissingInputError(
            f"fig4: no hybrid trajectory rows under {csv_dir}"
        )
    sizes = sorted({int(r["n"]) for r in rows})
    cols = min(len(sizes), 3)
    nrows = (len(sizes) + cols - 1) // cols
    with plt.rc_context(_STYLE):
        fig, axes = plt.subplots(nrows, cols,
                                 figsize=(3.0 * cols, 2.4 * nrows),
                                 squeeze=False, sharex=True, sharey=True)
        for k, n in enumerate(sizes):
            ax = axes[k // cols][k % cols]
            subset = [r for r in rows if int(r["n"]) == n]
            for (label, t), (s, means, stds) in _ratio_curves(
                subset, "method"
            ).items():
                line, = ax.plot(s, means, color=_color(label),
                                label=f"{label}, T={float(t):g}")
                ax.fill_between(s, means - stds, means + stds,
                                color=line.get_color(), alpha=0.2,
                                linewidth=0)
            ax.set_title(f"n = {n}")
            if k // cols == nrows - 1:
                ax.set_xlabel("schedule s")
            if k % cols == 0:
                ax.set_ylabel("r")
        axes[0][0].legend(fontsize=7)
        for k in range(len(sizes), nrows * cols):
            axes[k // cols][k % cols].set_visible(False)
        fig.tight_layout()
        return _save(fig, out_dir, "fig4")


def fig5(csv_dir: Path, out_dir: Path) -> Path:
    """Mean CNOT count vs system size with the two-term quadratic fit."""
    rows = load_hybrid_summaries(csv_dir)
    if not rows:
        raise MissingInputError(f"fig5: no hybrid summary rows under {csv_dir}")
    stats = _mean_std(rows, "cnot_total", ("n",))
    sizes = np.array(sorted(int(k[0]) for k in stats), dtype=float)
    means = np.array([stats[(str(int(n)),)][0] for n in sizes])
    stds = np.array([stats[(str(int(n)),)][1] for n in sizes])
    a, b, r_squared = quadratic_fit(sizes, means)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(4.2, 3.2))
        ax.errorbar(sizes, means, yerr=stds, fmt="o", capsize=3,
                    color="tab:green", label="mean CNOTs")
        grid = np.linspace(sizes[0], sizes[-1], 200)
        ax.plot(grid, a * grid ** 2 + b * grid, color="black",
                label=f"fit {a:.2f} n$^2$ {b:+.2f} n (R$^2$={r_squared:.3f})")
        ax.set_xlabel("system size n")
        ax.set_ylabel("CNOT count")
        ax.legend()
        fig.tight_layout()
        return _save(fig, out_dir, "fig5")


_FIGURES = {
    "fig1": fig1,
    "fig2": fig2,
    "fig3": fig3,
    "fig4": fig4,
    "fig5": fig5,
}


def make_figures(csv_dir, out_dir, only=None) -> list[Path]:
    """Render the requested figures (all five by default) from csv_dir."""
    names = list(_FIGURES) if only is None else list(only)
    unknown = [n for n in names if n not in _FIGURES]
    if unknown:
        raise ValueError(f"unknown figure name(s): {', '.join(unknown)}")
    return [_FIGURES[name](Path(csv_dir), Path(out_dir)) for name in names]
