"""Heatmap of F_Q^max/N^2 over detuning and evolution time (qfi_scan CSV)."""

from __future__ import annotations

import sys

import numpy as np

from .common import new_axes, panel_main, save

REQUIRED = ["delta_over_Nchi", "chi_t", "fq_over_N2"]


def render(table: dict, out: str) -> None:
    cols = table["columns"]
    deltas = np.unique(cols["delta_over_Nchi"])
    times = np.unique(cols["chi_t"])
    grid = np.full((len(times), len(deltas)), np.nan)
    d_index = {v: i for i, v in enumerate(deltas)}
    t_index = {v: i for i, v in enumerate(times)}
    for d, t, f in zip(cols["delta_over_Nchi"], cols["chi_t"], cols["fq_over_N2"]):
        grid[t_index[t], d_index[d]] = f
    fig, ax = new_axes(width=4.6)
    mesh = ax.pcolormesh(deltas, times, grid, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label=r"$F_Q^{\max}/N^2$")
    idx = np.nanargmax(grid)
    it, idl = np.unravel_index(idx, grid.shape)
    ax.plot(deltas[idl], times[it], "r+", markersize=10)
    ax.set_xlabel(r"$\delta/(N\chi)$")
    ax.set_ylabel(r"$\chi t$")
    save(fig, out)


def main(argv=None) -> int:
    return panel_main(argv, __doc__, REQUIRED, render)


if __name__ == "__main__":
    sys.exit(main())
