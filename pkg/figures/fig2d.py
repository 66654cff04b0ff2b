"""Optimal detuning versus particle number (scaling_vs_n CSV)."""

from __future__ import annotations

import sys

from .common import new_axes, panel_main, save

REQUIRED = ["n", "delta_opt_over_Nchi"]

_SC_DELTA = 0.3135  # semi-classical prediction, axis reference only


def render(table: dict, out: str) -> None:
    cols = table["columns"]
    fig, ax = new_axes()
    ax.plot(cols["n"], cols["delta_opt_over_Nchi"], "o", color="tab:blue", ms=4)
    ax.axhline(_SC_DELTA, color="k", ls="--", lw=1, label=f"semi-classical {_SC_DELTA}")
    ax.set_xlabel(r"$N$")
    ax.set_ylabel(r"$\delta_{\rm opt}/(N\chi)$")
    ax.legend(fontsize=7, frameon=False)
    save(fig, out)


def main(argv=None) -> int:
    return panel_main(argv, __doc__, REQUIRED, render)


if __name__ == "__main__":
    sys.exit(main())
