"""Matplotlib rendering for the CLI report path.

Figures are written to files next to the delimited output; nothing is shown
interactively.
"""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def plot_success_curve(rows: Sequence[dict], path: str, title: str = "") -> None:
    """rows: dicts with m, p_hat, stderr, phase_model."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    by_model: dict[str, list[dict]] = {}
    for r in rows:
        by_model.setdefault(r["phase_model"], []).append(r)
    for model, pts in by_model.items():
        ms = [p["m"] for p in pts]
        ps = [p["p_hat"] for p in pts]
        errs = [p["stderr"] for p in pts]
        ax.errorbar(ms, ps, yerr=errs, marker="o", capsize=3, label=model)
    ax.set_xscale("log")
    ax.set_xlabel("pairs per experiment m")
    ax.set_ylabel("success probability")
    ax.set_ylim(-0.02, 1.02)
    if title:
        ax.set_title(title)
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_bell_scan(a1_vals: np.ndarray, b1_vals: np.ndarray, b_grid: np.ndarray,
                   best: tuple[float, float, float], path: str, title: str = "") -> None:
    """Heatmap of the coarse CHSH grid with the refined optimum marked.

    best = (a1, b1, chsh_value).
    """
    fig, ax = plt.subplots(figsize=(5.4, 4.4))
    im = ax.pcolormesh(a1_vals, b1_vals, b_grid.T, shading="nearest", cmap="viridis")
    fig.colorbar(im, ax=ax, label="CHSH value")
    cs = ax.contour(a1_vals, b1_vals, b_grid.T, levels=[2.0], colors="white", linewidths=1.0)
    ax.clabel(cs, fmt="B=2")
    ax.plot([best[0]], [best[1]], "r*", markersize=12,
            label=f"best B = {best[2]:.4f}")
    ax.set_xlabel("Alice setting a1")
    ax.set_ylabel("Bob setting b1")
    if title:
        ax.set_title(title)
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_state_diagonal(diag: Sequence[float], path: str, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    ax.bar(range(len(diag)), diag, width=0.8)
    ax.set_xlabel("basis index")
    ax.set_ylabel("weight")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
