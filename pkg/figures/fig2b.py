"""Maximum QFI versus time for every protocol (qfi_vs_time CSV)."""

from __future__ import annotations

import sys

from .common import new_axes, panel_main, save

REQUIRED = ["chi_t", "fq_oat", "fq_oatnt", "fq_tat", "fq_tatnt", "fq_driven"]

_STYLES = (
    ("fq_oat", "OAT", "tab:gray", "-"),
    ("fq_oatnt", "OAT-and-turn", "tab:orange", "-"),
    ("fq_tat", "TAT", "tab:green", "-"),
    ("fq_tatnt", "TAT-and-turn", "tab:blue", "-"),
    ("fq_driven", "driven (Floquet)", "tab:red", "--"),
)


def render(table: dict, out: str) -> None:
    cols = table["columns"]
    fig, ax = new_axes(width=4.6)
    for column, label, color, style in _STYLES:
        ax.plot(cols["chi_t"], cols[column], style, color=color, label=label, lw=1.4)
    ax.set_xlabel(r"$\chi t$")
    ax.set_ylabel(r"$F_Q^{\max}/N^2$")
    ax.legend(fontsize=7, frameon=False)
    save(fig, out)


def main(argv=None) -> int:
    return panel_main(argv, __doc__, REQUIRED, render)


if __name__ == "__main__":
    sys.exit(main())
