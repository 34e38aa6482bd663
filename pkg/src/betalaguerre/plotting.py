"""Static SVG overlays of eigenvalue histograms on limiting densities."""

from __future__ import annotations

import numpy as np
from numpy.polynomial.legendre import leggauss


def bin_averaged_density(density, edges, n=16):
    """Mean of ``density`` over each histogram bin (Gauss-Legendre per bin)."""
    t, w = leggauss(n)
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    x = 0.5 * (hi + lo)[:, None] + half[:, None] * t[None, :]
    return 0.5 * np.sum(w[None, :] * density(x), axis=1)


def sup_discrepancy(samples, density, bins=60, support=None):
    """Largest gap between normalized histogram heights and bin-averaged density."""
    samples = np.asarray(samples).ravel()
    lo, hi = support if support is not None else (samples.min(), samples.max())
    heights, edges = np.histogram(samples, bins=bins, range=(lo, hi))
    heights = heights / (len(samples) * np.diff(edges))
    return float(np.max(np.abs(heights - bin_averaged_density(density, edges)))), heights, edges


def density_overlay_svg(path, samples, density, grid, title, bins=60):
    """Write an SVG with a sample histogram, the density curve and the sup gap in the caption."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "betalaguerre"
    sup, heights, edges = sup_discrepancy(samples, density, bins, (grid[0], grid[-1]))
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.stairs(heights, edges, fill=True, alpha=0.4, label="Monte Carlo")
    ax.plot(grid, density(grid), lw=1.5, label="limit density")
    ax.set_xlabel("x")
    ax.set_ylabel("density")
    ax.set_title(title)
    ax.legend()
    fig.text(0.5, 0.01, f"sup |histogram - density| = {sup:.4g}", ha="center", fontsize=8)
    fig.tight_layout(rect=(0, 0.04, 1, 1))
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return sup
