"""Render figure datasets to image files.

The CSV/JSON tables are the primary output; these renderers give a quick
visual check without any downstream tooling.  Coincidence-matrix datasets
(columns m, n, ...) become heatmap panels, everything else becomes line
plots against the first column.
"""

from __future__ import annotations

import numpy as np

from .experiments import FigureDataset


def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    return plt


def render(ds: FigureDataset, path) -> None:
    """Write a PNG (or any savefig-supported format) for the dataset."""
    plt = _pyplot()
    if len(ds.columns) >= 3 and ds.columns[0] == "m" and ds.columns[1] == "n":
        fig = _render_matrix(plt, ds)
    else:
        fig = _render_lines(plt, ds)
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _render_matrix(plt, ds: FigureDataset):
    m = ds.column("m").astype(int)
    size = int(m.max())
    value_cols = ds.columns[2:]
    fig, axes = plt.subplots(
        1, len(value_cols), figsize=(4.2 * len(value_cols), 4.0), squeeze=False
    )
    for ax, name in zip(axes[0], value_cols):
        grid = ds.column(name).reshape(size, size)
        im = ax.imshow(
            grid, origin="lower", extent=(1, size, 1, size), cmap="viridis"
        )
        ax.set_title(name)
        ax.set_xlabel("n")
        ax.set_ylabel("m")
        fig.colorbar(im, ax=ax, fraction=0.046)
    fig.suptitle(ds.figure)
    fig.tight_layout()
    return fig


def _render_lines(plt, ds: FigureDataset):
    x = ds.column(ds.columns[0])
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for name in ds.columns[1:]:
        y = ds.column(name)
        finite = np.isfinite(y)
        ax.plot(x[finite], y[finite], label=name, linewidth=1.2)
    ax.set_xlabel(ds.columns[0])
    ax.set_title(ds.figure)
    if len(ds.columns) > 2:
        ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return fig
