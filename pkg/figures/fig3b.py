"""Metrological gain versus detection noise per protocol (noise_scan CSV)."""

from __future__ import annotations

import sys

from .common import new_axes, panel_main, save

REQUIRED = ["protocol", "sigma", "gain_db"]

_STYLES = {
    "optimal_readout": ("tab:green", "--", "optimal readout"),
    "parity_tatnt": ("tab:green", "-.", "parity (twist-and-turn state)"),
    "parity_ghz": ("tab:olive", ":", "parity (cat from plain twisting)"),
}


def render(table: dict, out: str) -> None:
    cols = table["columns"]
    fig, ax = new_axes(width=4.6)
    for protocol in dict.fromkeys(cols["protocol"]):
        mask = cols["protocol"] == protocol
        color, style, label = _STYLES.get(
            str(protocol), ("tab:blue", "-", str(protocol))
        )
        ax.plot(
            cols["sigma"][mask].astype(float),
            cols["gain_db"][mask].astype(float),
            style,
            color=color,
            lw=1.4,
            label=label,
        )
    ax.axhline(0.0, color="k", lw=1)
    ax.set_xlabel(r"detection noise $\sigma$")
    ax.set_ylabel("gain (dB)")
    ax.legend(fontsize=7, frameon=False)
    save(fig, out)


def main(argv=None) -> int:
    return panel_main(argv, __doc__, REQUIRED, render)


if __name__ == "__main__":
    sys.exit(main())
