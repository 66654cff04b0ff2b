"""Projection distribution of the optimal state with a Husimi inset.

Consumes the two companion tables the qfi_scan experiment writes:
`<hash>_ydist.csv` (columns m,P) and `<hash>_husimi.csv` (theta,phi,Q).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .common import EXIT_OK, EXIT_SCHEMA, SchemaError, new_axes, read_table, save


def render(dist: dict, husimi: dict, out: str) -> None:
    cols = dist["columns"]
    fig, ax = new_axes(width=4.6, height=3.4)
    ax.bar(cols["m"], cols["P"], width=1.0, color="tab:blue")
    ax.set_xlabel(r"$m_y$")
    ax.set_ylabel(r"$P_{m_y}$")

    h = husimi["columns"]
    theta = np.unique(h["theta"])
    phi = np.unique(h["phi"])
    q = np.full((len(theta), len(phi)), np.nan)
    t_index = {v: i for i, v in enumerate(theta)}
    p_index = {v: i for i, v in enumerate(phi)}
    for th, ph, value in zip(h["theta"], h["phi"], h["Q"]):
        q[t_index[th], p_index[ph]] = value
    inset = ax.inset_axes([0.62, 0.55, 0.36, 0.4])
    inset.pcolormesh(phi, theta, q, shading="nearest", cmap="magma")
    inset.set_xlabel(r"$\varphi$", fontsize=6)
    inset.set_ylabel(r"$\theta$", fontsize=6)
    inset.tick_params(labelsize=5)
    save(fig, out)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csv", help="the <hash>_ydist.csv companion table")
    parser.add_argument("--husimi", default=None, help="the <hash>_husimi.csv table")
    parser.add_argument("--out", default=None)
    parser.add_argument("--check", action="store_true")
    args = parser.parse_args(argv)
    husimi_path = args.husimi or str(Path(args.csv).with_name(
        Path(args.csv).name.replace("_ydist", "_husimi")
    ))
    try:
        dist = read_table(args.csv, ["m", "P"])
        husimi = read_table(husimi_path, ["theta", "phi", "Q"])
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    if args.check:
        print(f"ok: {args.csv} + {husimi_path}")
        return EXIT_OK
    out = args.out or (Path(args.csv).stem + ".png")
    render(dist, husimi, out)
    print(out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
