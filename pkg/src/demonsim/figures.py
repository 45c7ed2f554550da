"""Matplotlib figure rendering for the sweep and tomography reports.

Figures are written next to the delimited output so a sweep leaves both the
numbers and something a human can look at.  Everything uses the Agg backend;
nothing here ever opens a window.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .channels import CHI_LABELS_1Q, ChiMatrix


def _axis_values(rows, attr):
    return sorted({getattr(r, attr) for r in rows})


def _grid(rows, attr):
    """Rows reshaped to a (kt, phi) grid of one column attribute."""
    kts = _axis_values(rows, "kt_pev")
    phis = _axis_values(rows, "phi_rad")
    table = {(r.kt_pev, r.phi_rad): getattr(r, attr) for r in rows}
    return kts, phis, np.array([[table[(kt, phi)] for phi in phis] for kt in kts])


def render_sweep_figures(rows, csv_path: str):
    """Entropy-production map, bound curves and information terms as PNGs."""
    stem, _ = os.path.splitext(csv_path)
    written = []

    kts, phis, sigma = _grid(rows, "sigma_nats")
    p01 = [float(np.sin(phi / 2.0) ** 2) for phi in phis]

    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    if len(kts) > 1 and len(phis) > 1:
        mesh = ax.pcolormesh(p01, kts, sigma, shading="nearest", cmap="RdBu_r",
                             vmin=-np.max(np.abs(sigma)), vmax=np.max(np.abs(sigma)))
        fig.colorbar(mesh, ax=ax, label="entropy production (nats)")
        try:
            contour = ax.contour(p01, kts, sigma, levels=[0.0], colors="k", linewidths=1.0)
            ax.clabel(contour, fmt="sigma = 0")
        except ValueError:
            pass  # the zero level can be empty on small grids
        ax.set_ylabel("temperature (peV)")
        ax.set_xlabel("feedback error probability p(0|1)")
    elif len(phis) > 1:
        ax.plot(p01, sigma[0], "o-")
        ax.axhline(0.0, color="k", lw=0.8)
        ax.set_xlabel("feedback error probability p(0|1)")
        ax.set_ylabel("entropy production (nats)")
    else:
        ax.plot(kts, sigma[:, 0], "o-")
        ax.axhline(0.0, color="k", lw=0.8)
        ax.set_xlabel("temperature (peV)")
        ax.set_ylabel("entropy production (nats)")
    ax.set_title("Average entropy production")
    fig.tight_layout()
    path = f"{stem}_entropy_production.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)

    # entropy production against its two information bounds at the smallest mismatch
    phi0 = phis[0]
    at_phi0 = sorted((r for r in rows if r.phi_rad == phi0), key=lambda r: r.kt_pev)
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    ax.plot([r.kt_pev for r in at_phi0], [r.sigma_nats for r in at_phi0], "o-",
            label="entropy production")
    ax.plot([r.kt_pev for r in at_phi0], [-r.i_gain_nats for r in at_phi0], "s--",
            label="-(information gain)")
    ax.plot([r.kt_pev for r in at_phi0], [-r.mutual_info_nats for r in at_phi0], "^--",
            label="-(mutual information)")
    ax.axhline(0.0, color="k", lw=0.8)
    ax.set_xlabel("temperature (peV)")
    ax.set_ylabel("nats")
    ax.set_title(f"Bounds at p(0|1) = {np.sin(phi0 / 2.0) ** 2:.3f}")
    ax.legend()
    fig.tight_layout()
    path = f"{stem}_bounds.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)

    # trade-off terms against mismatch at the coldest temperature
    kt0 = kts[0]
    at_kt0 = sorted((r for r in rows if r.kt_pev == kt0), key=lambda r: r.phi_rad)
    if len(at_kt0) > 1:
        fig, ax = plt.subplots(figsize=(6.0, 4.2))
        x = [r.p01 for r in at_kt0]
        ax.plot(x, [r.i_gain_nats for r in at_kt0], "o-", label="information gain")
        ax.plot(x, [r.avg_kl_nats for r in at_kt0], "s-", label="average relative entropy")
        ax.plot(x, [r.delta_s_f_nats for r in at_kt0], "^-", label="feedback entropy change")
        ax.plot(x, [r.sigma_nats for r in at_kt0], "k--", label="entropy production")
        ax.set_xlabel("feedback error probability p(0|1)")
        ax.set_ylabel("nats")
        ax.set_title(f"Trade-off terms at kT = {kt0:g} peV")
        ax.legend()
        fig.tight_layout()
        path = f"{stem}_tradeoff_terms.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)

    return written


def render_chi_figure(chi: ChiMatrix, title: str, path: str):
    """Real and imaginary parts of a one-qubit process matrix as heatmaps."""
    labels = CHI_LABELS_1Q
    fig, axes = plt.subplots(1, 2, figsize=(8.0, 3.6))
    for ax, part, name in ((axes[0], chi.matrix.real, "real"),
                           (axes[1], chi.matrix.imag, "imag")):
        image = ax.imshow(part, cmap="RdBu_r", vmin=-0.6, vmax=0.6)
        ax.set_xticks(range(len(labels)), labels)
        ax.set_yticks(range(len(labels)), labels)
        ax.set_title(f"{title} ({name})")
        for i in range(part.shape[0]):
            for j in range(part.shape[1]):
                ax.text(j, i, f"{part[i, j]:.2f}", ha="center", va="center", fontsize=8)
        fig.colorbar(image, ax=ax, fraction=0.046)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_distance_figure(phis, deltas, marked_phi, marked_delta, path: str):
    """Process distance to the mismatch-free run as the mismatch grows."""
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    p01 = [float(np.sin(phi / 2.0) ** 2) for phi in phis]
    ax.plot(p01, deltas, "o-", label="ideal")
    ax.plot([float(np.sin(marked_phi / 2.0) ** 2)], [marked_delta], "r*",
            markersize=14, label="requested point")
    ax.set_xlabel("feedback error probability p(0|1)")
    ax.set_ylabel("process distance to the mismatch-free map")
    ax.set_title("Protocol process distance")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
