"""Figure rendering for the CLI report path (written next to CSV/JSON output)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

DPI = 150


def save_field_heatmap(field, path, title=None):
    d = field.domain
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    vals = np.where(d.in_mask, field.values, np.nan)
    mesh = ax.pcolormesh(d.xs, d.ts, vals.T, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="g")
    ax.set_xlabel("x")
    ax.set_ylabel("t")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def save_gradient_heatmap(field, path, title=None):
    d = field.domain
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    mesh = ax.pcolormesh(d.xs, d.ts, field.gradient_norm().T,
                         shading="nearest", cmap="magma")
    fig.colorbar(mesh, ax=ax, label="|Dg|")
    ax.set_xlabel("x")
    ax.set_ylabel("t")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def save_convergence_plot(rows, path, title=None):
    """rows: (h, error, order-or-nan) triples from a grid-doubling study."""
    hs = [r[0] for r in rows]
    errs = [r[1] for r in rows]
    fig, ax = plt.subplots(figsize=(5.6, 4.2))
    ax.loglog(hs, errs, "o-", label="max error")
    ref = [errs[0] * (h / hs[0]) ** 2 for h in hs]
    ax.loglog(hs, ref, "k--", label="order 2 reference")
    ax.set_xlabel("grid spacing h")
    ax.set_ylabel("max error")
    ax.legend()
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def save_continuation_gaps(gaps, path, title=None):
    """gaps: (eps, max-norm gap) pairs of the eps descent."""
    eps = [max(e, 1e-300) for e, _ in gaps]
    vals = [g for _, g in gaps]
    fig, ax = plt.subplots(figsize=(5.6, 4.2))
    ax.loglog(eps, vals, "o-")
    ax.set_xlabel("eps")
    ax.set_ylabel("max-norm gap to previous solution")
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
