"""Figure rendering for scenario reports (file output only)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def save_heatmap(path, field, extent, title, cbar_label=""):
    """2D field as a pcolor-style image; ``extent`` is (x1min,x1max,x2min,x2max)."""
    fig, ax = plt.subplots(figsize=(5.0, 4.2))
    im = ax.imshow(np.asarray(field).T, origin="lower", extent=extent,
                   aspect="equal", cmap="RdBu_r")
    fig.colorbar(im, ax=ax, label=cbar_label)
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_time_series(path, rows, title):
    """psi and dissipation against time from time-series rows."""
    rows = np.asarray(rows, float)
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(5.0, 5.4), sharex=True)
    ax1.plot(rows[:, 0], rows[:, 1], "-", color="tab:blue")
    ax1.set_ylabel("free energy")
    ax2.plot(rows[:, 0], rows[:, 2], "-", color="tab:red")
    ax2.set_ylabel("dissipation / step")
    ax2.set_xlabel("t")
    ax1.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_convergence(path, hs, errors, title, slope_ref=None):
    """log-log error vs step size with an optional reference slope line."""
    hs = np.asarray(hs, float)
    errors = np.asarray(errors, float)
    fig, ax = plt.subplots(figsize=(4.6, 4.0))
    ax.loglog(hs, errors, "o-", label="measured")
    if slope_ref is not None:
        ref = errors[0] * (hs / hs[0]) ** slope_ref
        ax.loglog(hs, ref, "--", color="gray", label=f"slope {slope_ref}")
    ax.set_xlabel("h")
    ax.set_ylabel("residual")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_curves(path, curve_snapshots, title):
    """Overlay of polyline curves (projected to the x1-x2 plane) over time."""
    fig, ax = plt.subplots(figsize=(4.6, 4.4))
    n = max(len(curve_snapshots) - 1, 1)
    for i, (t, curve) in enumerate(curve_snapshots):
        v = curve.vertices
        pts = np.vstack([v, v[:1]]) if curve.closed else v
        ax.plot(pts[:, 0], pts[:, 1], "-",
                color=plt.cm.viridis(i / n), lw=1.2,
                label=f"t={t:.3g}" if i in (0, len(curve_snapshots) - 1) else None)
    ax.set_aspect("equal")
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.set_title(title)
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_profiles(path, x, profiles, labels, title, xlabel="x1"):
    """Line profiles (e.g. slip fronts at several times)."""
    fig, ax = plt.subplots(figsize=(5.0, 3.8))
    n = max(len(profiles) - 1, 1)
    for i, (p, lab) in enumerate(zip(profiles, labels)):
        ax.plot(x, p, color=plt.cm.viridis(i / n), lw=1.2, label=lab)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("slip")
    ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
