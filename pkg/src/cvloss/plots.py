"""Figure rendering for the CLI report paths.

One PNG per report next to the CSV/JSON data.  All rendering goes through
the Agg backend so runs work headless.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_NEG_COLOR = "#c63d3d"


def render_sweep(path, records):
    """Wigner origin value against transmitted-energy fraction, per squeezing."""
    ns = sorted({rec["n"] for rec in records})
    fig, axes = plt.subplots(len(ns), 1, figsize=(5.2, 3.4 * len(ns)), squeeze=False)
    for ax, n in zip(axes[:, 0], ns):
        for s_db in sorted({rec["s_db"] for rec in records}):
            pts = [r for r in records if r["n"] == n and r["s_db"] == s_db]
            pts.sort(key=lambda r: r["tau"])
            ax.plot([r["tau"] for r in pts], [r["w_origin"] for r in pts], label=f"{s_db:g} dB")
        ax.axhline(0.0, color="k", lw=0.8)
        ax.axvspan(0.0, 0.5, color="0.92")
        ax.set_xlabel(r"$e^{-2\xi}$")
        ax.set_ylabel("W(0)")
        ax.set_title(f"thermal n = {n:g}")
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_graph_demo(path, grids, kappas, order, xi):
    """One row of per-vertex marginal Wigner maps with their kurtosis."""
    m = len(grids)
    fig, axes = plt.subplots(1, m, figsize=(3.0 * m, 3.0), squeeze=False)
    vmax = max(np.abs(g["w"]).max() for g in grids)
    for k, (ax, g) in enumerate(zip(axes[0], grids)):
        im = ax.pcolormesh(
            g["x"], g["p"], g["w"].T, cmap="RdBu_r", vmin=-vmax, vmax=vmax, shading="auto"
        )
        ax.set_title(f"vertex {k + 1}\n" + r"$\kappa_{\min}$ = " + f"{kappas[k]:.4f}", fontsize=9)
        ax.set_xlabel("x")
        if k == 0:
            ax.set_ylabel("p")
        ax.set_aspect("equal")
    fig.colorbar(im, ax=axes[0].tolist(), shrink=0.85)
    fig.suptitle(f"{order}, xi = {xi:g}", fontsize=10)
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_kurtosis(path, xis, kappa_by_vertex, order):
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    for k, kappas in enumerate(kappa_by_vertex):
        ax.plot(xis, kappas, marker="o", label=f"vertex {k + 1}")
    ax.axhline(0.0, color="k", lw=0.8)
    ax.set_xlabel(r"$\xi$")
    ax.set_ylabel(r"$\kappa_{\min}$")
    ax.set_title(order)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_threshold(path, xis, witness_values, xi_star=None):
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.plot(xis, witness_values, color="C0")
    ax.axhline(2.0, color="k", lw=0.8, ls="--", label="negativity threshold")
    if xi_star is not None:
        ax.axvline(xi_star, color=_NEG_COLOR, lw=1.0, label=r"$\xi^*$")
    ax.set_xlabel(r"$\xi$")
    ax.set_ylabel("witness trace")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_subtract_map(path, rows, m):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8.4, 3.4))
    xis = [r["xi"] for r in rows]
    for j in range(2 * m):
        comps = [r["components"][j] for r in rows]
        if max(abs(c) for c in comps) > 1e-12:
            ax1.plot(xis, comps, label=f"c{j}")
    ax1.set_xlabel(r"$\xi$")
    ax1.set_ylabel("drifted-mode components")
    ax1.legend(fontsize=7)
    ax2.plot(xis, [r["angle_to_start"] for r in rows], label="to subtraction mode")
    ax2.plot(xis, [r["angle_to_loss"] for r in rows], label="to dominant loss mode")
    ax2.set_xlabel(r"$\xi$")
    ax2.set_ylabel("angle (rad)")
    ax2.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
