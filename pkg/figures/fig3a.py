"""Echo-readout precision versus preparation time per protocol (readout_scan CSV)."""

from __future__ import annotations

import sys

import numpy as np

from .common import new_axes, panel_main, save

REQUIRED = ["protocol", "t", "delta_phi", "qcrb"]

_COLORS = {
    "OAT": "tab:gray",
    "OATNT": "tab:orange",
    "TAT": "tab:green",
    "TATNT": "tab:blue",
}


def render(table: dict, out: str) -> None:
    cols = table["columns"]
    protocols = list(dict.fromkeys(cols["protocol"]))
    fig, ax = new_axes(width=4.6)
    for protocol in protocols:
        mask = cols["protocol"] == protocol
        color = _COLORS.get(str(protocol), None)
        t = cols["t"][mask].astype(float)
        ax.semilogy(t, cols["delta_phi"][mask].astype(float), "o-", ms=3, lw=1.2,
                    color=color, label=str(protocol))
        ax.semilogy(t, cols["qcrb"][mask].astype(float), "--", lw=0.9, color=color, alpha=0.6)
    ax.set_xlabel(r"$\chi t$")
    ax.set_ylabel(r"$\Delta\phi$")
    ax.legend(fontsize=7, frameon=False, ncol=2)
    save(fig, out)


def main(argv=None) -> int:
    return panel_main(argv, __doc__, REQUIRED, render)


if __name__ == "__main__":
    sys.exit(main())
