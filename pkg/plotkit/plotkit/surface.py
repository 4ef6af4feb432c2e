"""3-D surface plot of a Wigner or Husimi grid CSV.

Usage: plotkit-surface husimi_t77.csv -o q_surface.png
"""

from __future__ import annotations

import argparse

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from ._io import common_digest, save_figure
from .heatmap import _grid_arrays


def render(csv_path: str, out_path: str) -> str:
    re, im, grid, head = _grid_arrays(csv_path)
    digest = common_digest([csv_path])
    kind = head.get("kind", "wigner")
    X, Y = np.meshgrid(re, im)
    fig = plt.figure(figsize=(5.6, 4.6))
    ax = fig.add_subplot(projection="3d")
    if kind == "wigner":
        bound = float(np.max(np.abs(grid)))
        ax.plot_surface(X, Y, grid, cmap="RdBu_r", vmin=-bound, vmax=bound,
                        rcount=120, ccount=120, linewidth=0)
    else:
        ax.plot_surface(X, Y, grid, cmap="viridis", vmin=0.0,
                        rcount=120, ccount=120, linewidth=0)
    ax.set_xlabel(r"$\mathrm{Re}\,\beta$")
    ax.set_ylabel(r"$\mathrm{Im}\,\beta$")
    ax.set_title(f"{kind}  ($\\omega t$ = {head.get('t', '?')})", fontsize=10)
    save_figure(fig, out_path, digest)
    plt.close(fig)
    return out_path


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv")
    ap.add_argument("-o", "--out", default="surface.png")
    args = ap.parse_args(argv)
    render(args.csv, args.out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
