"""Figures for ensemble time series, app-usage sweeps and R0 calibration."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

COLORS = {"S": "tab:blue", "E": "tab:orange", "I": "tab:red", "R": "tab:green",
          "Q": "tab:purple", "T": "tab:brown", "U": "tab:gray"}


def plot_series(agg, path, title=None, keys=("S", "E", "I", "R", "Q", "T")):
    """Mean compartment and quarantine counts against day."""
    fig, ax = plt.subplots(figsize=(7, 4))
    for k in keys:
        y = np.asarray(agg.mean_series[k])
        ax.plot(np.arange(y.size), y, label=k, color=COLORS.get(k), lw=1.5)
    ax.set_xlabel("day")
    ax.set_ylabel("people")
    ax.set_xlim(0, len(agg.mean_series["S"]) - 1)
    ax.legend(ncol=2, fontsize=8, frameon=False, loc="center right")
    if title:
        ax.set_title(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_sweep(rows, path, title=None):
    """Mean infections against app usage; ``rows`` are ``(proportion, infected, ...)``."""
    x = np.array([r[0] for r in rows]) * 100
    y = np.array([r[1] for r in rows])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(x, y, "o-", color="tab:red", ms=4)
    ax.set_xlabel("app users (%)")
    ax.set_ylabel("mean infected")
    ax.set_ylim(bottom=0)
    if title:
        ax.set_title(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_r0(curve, path, target=2.8):
    """Calibrated R0 against the transmission constant p."""
    p = np.array([c[0] for c in curve])
    r0 = np.array([c[1] for c in curve])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(p, r0, color="tab:blue", lw=1.5)
    if target is not None:
        ax.axhline(target, color="0.5", ls="--", lw=1)
    ax.set_xlabel("p")
    ax.set_ylabel("R0")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_costs(rows, path):
    """Bar chart of total cost per report row."""
    labels = [f"S{r['scenario']} {float(r['app_proportion']):.0%}/{float(r['asymptomatic_ratio']):.0%}"
              for r in rows]
    cost = np.array([float(r["total_cost"]) for r in rows]) / 1e6
    fig, ax = plt.subplots(figsize=(max(6, 0.45 * len(rows)), 4))
    ax.bar(np.arange(len(rows)), cost, color="tab:green")
    ax.set_xticks(np.arange(len(rows)))
    ax.set_xticklabels(labels, rotation=60, ha="right", fontsize=7)
    ax.set_ylabel("total cost (million USD)")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
