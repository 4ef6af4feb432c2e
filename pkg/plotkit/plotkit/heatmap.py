"""Filled-contour plot of a Wigner or Husimi grid CSV.

Wigner grids use a diverging colormap fixed symmetric about zero so negative
interference regions are visible.  Usage: plotkit-heatmap wigner_t228.csv -o w.png
"""

from __future__ import annotations

import argparse

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from ._io import SchemaError, common_digest, load_header, load_table, save_figure


def _grid_arrays(csv_path: str):
    table = load_table(csv_path, required=("re_beta", "im_beta", "value"))
    head = load_header(csv_path)
    res = int(head.get("resolution", 0))
    vals = np.array(table["value"], dtype=float)
    if res <= 0 or vals.size != res * res:
        raise SchemaError(f"{csv_path}: {vals.size} rows do not fill a {res}x{res} grid")
    re = np.array(table["re_beta"][:res])
    im = np.array(table["im_beta"][::res])
    return re, im, vals.reshape(res, res), head


def render(csv_path: str, out_path: str) -> str:
    re, im, grid, head = _grid_arrays(csv_path)
    digest = common_digest([csv_path])
    kind = head.get("kind", "wigner")
    fig, ax = plt.subplots(figsize=(5.2, 4.4))
    if kind == "wigner":
        bound = float(np.max(np.abs(grid)))
        cs = ax.contourf(re, im, grid, levels=41, cmap="RdBu_r", vmin=-bound, vmax=bound)
    else:
        cs = ax.contourf(re, im, grid, levels=41, cmap="viridis", vmin=0.0)
    fig.colorbar(cs, ax=ax, shrink=0.9)
    ax.set_xlabel(r"$\mathrm{Re}\,\beta$")
    ax.set_ylabel(r"$\mathrm{Im}\,\beta$")
    ax.set_title(f"{kind}  ($\\omega t$ = {head.get('t', '?')})", fontsize=10)
    ax.set_aspect("equal")
    fig.tight_layout()
    save_figure(fig, out_path, digest)
    plt.close(fig)
    return out_path


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv")
    ap.add_argument("-o", "--out", default="heatmap.png")
    args = ap.parse_args(argv)
    render(args.csv, args.out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
