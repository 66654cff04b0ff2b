"""Optimal preparation time versus particle number (scaling_vs_n CSV)."""

from __future__ import annotations

import sys

import numpy as np

from .common import new_axes, panel_main, save

REQUIRED = ["n", "chi_t_opt"]


def render(table: dict, out: str) -> None:
    cols = table["columns"]
    fig, ax = new_axes()
    ax.plot(cols["n"], cols["chi_t_opt"], "o", color="tab:blue", ms=4, label="scan optimum")
    n_fine = np.linspace(min(cols["n"]), max(cols["n"]), 200)
    ax.plot(
        n_fine,
        3.0 * (1.9 + 0.55 * np.log(n_fine)) / n_fine,
        "k--",
        lw=1,
        label=r"$3(1.9+0.55\ln N)/N$",
    )
    ax.set_xlabel(r"$N$")
    ax.set_ylabel(r"$\chi t_{\rm opt}$")
    ax.legend(fontsize=7, frameon=False)
    save(fig, out)


def main(argv=None) -> int:
    return panel_main(argv, __doc__, REQUIRED, render)


if __name__ == "__main__":
    sys.exit(main())
