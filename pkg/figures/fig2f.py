"""Optimal QFI versus particle number on log-log axes (scaling_vs_n CSV)."""

from __future__ import annotations

import sys

import numpy as np

from .common import new_axes, panel_main, save

REQUIRED = ["n", "fq_opt_over_N2"]

_SC_PREFACTOR = 0.9706  # semi-classical separatrix estimate, reference line


def render(table: dict, out: str) -> None:
    cols = table["columns"]
    n = cols["n"]
    fq = cols["fq_opt_over_N2"] * n**2
    fig, ax = new_axes()
    ax.loglog(n, fq, "o", color="tab:blue", ms=4, label="scan optimum")
    slope, intercept = np.polyfit(np.log(n), np.log(fq), 1)
    n_fine = np.linspace(min(n), max(n), 100)
    ax.loglog(
        n_fine,
        np.exp(intercept) * n_fine**slope,
        "-",
        color="tab:blue",
        lw=1,
        label=f"fit: slope {slope:.2f}, prefactor {np.exp(intercept):.2f}",
    )
    ax.loglog(
        n_fine,
        _SC_PREFACTOR * n_fine**2,
        "k--",
        lw=1,
        label=f"semi-classical {_SC_PREFACTOR}$N^2$",
    )
    ax.set_xlabel(r"$N$")
    ax.set_ylabel(r"$F_Q^{\rm opt}$")
    ax.legend(fontsize=7, frameon=False)
    save(fig, out)


def main(argv=None) -> int:
    return panel_main(argv, __doc__, REQUIRED, render)


if __name__ == "__main__":
    sys.exit(main())
