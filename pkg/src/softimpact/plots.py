"""Figure rendering for the CLI report path (PNG files next to the CSV output)."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .model import WedgeModel, Window


def _draw_wedge(ax, model: WedgeModel, x_max: float) -> None:
    tb = model.tan_half
    xs = np.array([0.0, x_max])
    ax.plot(xs, xs * tb, "k-", lw=1.2)
    ax.plot(xs, -xs * tb, "k-", lw=1.2)


def _draw_background_levels(ax, model: WedgeModel, window: Window, n_levels: int = 14) -> None:
    xs = np.linspace(window.x_min, window.x_max, 160)
    ys = np.linspace(window.y_min, window.y_max, 160)
    u1, u2 = np.meshgrid(xs, ys, indexing="ij")
    u = 0.5 * model.omega**2 * (u1 - model.u1s) ** 2 - 0.5 * model.lam**2 * (u2 - model.u2s) ** 2
    ax.contour(u1, u2, u, levels=n_levels, colors="0.75", linewidths=0.5)


def save_trajectory_figure(path, model: WedgeModel, samples: np.ndarray, title: str) -> None:
    """Configuration-space path with the wedge walls and background level lines."""
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    u1, u2 = samples[:, 1], samples[:, 2]
    pad = 0.6
    window = Window(
        min(0.0, float(u1.min()) - pad),
        float(u1.max()) + pad,
        float(u2.min()) - pad,
        float(u2.max()) + pad,
    )
    _draw_background_levels(ax, model, window)
    _draw_wedge(ax, model, window.x_max)
    ax.plot(u1, u2, "b-", lw=1.0)
    ax.plot(u1[:1], u2[:1], "go", ms=5)
    ax.set_xlabel("u1")
    ax.set_ylabel("u2")
    ax.set_title(title)
    ax.set_xlim(window.x_min, window.x_max)
    ax.set_ylim(window.y_min, window.y_max)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def save_hill_figure(path, model: WedgeModel, impact_region, smooth_regions, title: str) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    window = impact_region.window
    _draw_wedge(ax, model, window.x_max)
    for poly in impact_region.boundary:
        color = "tab:red" if poly.tag == "interior" else "tab:orange"
        ax.plot(poly.points[:, 0], poly.points[:, 1], color=color, lw=1.6)
    cmap = plt.get_cmap("viridis")
    for i, region in enumerate(smooth_regions):
        c = cmap(0.15 + 0.7 * i / max(1, len(smooth_regions) - 1))
        for poly in region.boundary:
            ax.plot(poly.points[:, 0], poly.points[:, 1], color=c, lw=0.9,
                    label=f"eps={region.epsilon:g}" if poly is region.boundary[0] else None)
    for corner in impact_region.corners:
        ax.plot(*corner.point, "ks", ms=4)
    ax.set_xlim(window.x_min, window.x_max)
    ax.set_ylim(window.y_min, window.y_max)
    ax.set_xlabel("u1")
    ax.set_ylabel("u2")
    ax.set_title(title)
    ax.legend(fontsize=7, loc="upper right")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def save_cloud_figure(path, clouds: dict, fixed_points: dict, title: str) -> None:
    """Panel grid of section return clouds keyed by steepness."""
    n = len(clouds)
    cols = min(3, max(1, n))
    rows = (n + cols - 1) // cols
    fig, axes = plt.subplots(rows, cols, figsize=(3.4 * cols, 3.0 * rows), squeeze=False)
    for k, (eps, pts) in enumerate(sorted(clouds.items())):
        ax = axes[k // cols][k % cols]
        if len(pts):
            ax.plot(pts[:, 2], pts[:, 3], ".", ms=1.2, color="tab:blue")
        fp = fixed_points.get(eps)
        if fp is not None:
            ax.plot([fp[0]], [fp[1]], "r+", ms=9)
        ax.set_title(f"eps = {eps:g}", fontsize=9)
        ax.set_xlabel("u1")
        ax.set_ylabel("v1")
    for k in range(n, rows * cols):
        axes[k // cols][k % cols].axis("off")
    fig.suptitle(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def save_bifurcation_figure(path, curves, title: str) -> None:
    """u_c against the frequency ratio for one or more steepness values."""
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for curve in curves:
        ok = [not math.isnan(u) for u in curve.u_c]
        xs = [r for r, good in zip(curve.ratios, ok) if good]
        ys = [u for u, good in zip(curve.u_c, ok) if good]
        ax.plot(xs, ys, "o-", ms=4, label=f"eps={curve.epsilon:g}")
    ax.set_xlabel("omega / lambda")
    ax.set_ylabel("u_c")
    ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def save_decay_figure(path, pairs, xlabel: str, ylabel: str, title: str, extra_pairs=None) -> None:
    """Log-log decay plot (sup distances, steepness diagnostics)."""
    fig, ax = plt.subplots(figsize=(5.4, 4.0))
    xs = [p[0] for p in pairs]
    ys = [p[1] for p in pairs]
    ax.loglog(xs, ys, "o-", color="tab:blue", label=ylabel)
    if extra_pairs:
        ax.loglog([p[0] for p in extra_pairs], [p[1] for p in extra_pairs], "s--",
                  color="tab:orange", label="filtered")
        ax.legend(fontsize=8)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def save_continuation_figure(path, model: WedgeModel, orbits, trajectories, title: str) -> None:
    """Orbit family summary: v20 and |trace| against steepness, plus orbit paths."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.6, 4.0))
    eps = [max(o.epsilon, 1e-6) for o in orbits]
    ax1.semilogx(eps, [o.v20 for o in orbits], "o-", color="tab:blue", label="v20")
    ax1b = ax1.twinx()
    ax1b.semilogx(eps, [abs(o.trace) for o in orbits], "s--", color="tab:red", label="|trace|")
    ax1b.axhline(2.0, color="0.6", lw=0.8)
    ax1.set_xlabel("epsilon (0 shown at 1e-6)")
    ax1.set_ylabel("v20", color="tab:blue")
    ax1b.set_ylabel("|trace|", color="tab:red")
    for samples, label in trajectories:
        ax2.plot(samples[:, 1], samples[:, 2], lw=1.0, label=label)
    if trajectories:
        x_max = max(float(s[:, 1].max()) for s, _ in trajectories) + 0.5
        _draw_wedge(ax2, model, x_max)
        ax2.legend(fontsize=7)
    ax2.set_xlabel("u1")
    ax2.set_ylabel("u2")
    fig.suptitle(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
