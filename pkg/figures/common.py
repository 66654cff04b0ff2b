"""Shared CSV loading, schema validation, and CLI plumbing for the panels."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SCHEMA = 2


class SchemaError(Exception):
    def __init__(self, message: str, column: str | None = None):
        super().__init__(message)
        self.column = column


def read_table(path, required: list[str]) -> dict:
    """Load a result CSV; hard-fails on a missing hash line or column.

    Returns {"config_hash": str, "columns": {name: array}}; numeric columns
    come back as float arrays, anything else as object arrays of strings.
    """
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"input file not found: {path}")
    lines = path.read_text().splitlines()
    if not lines or not lines[0].startswith("# config_hash="):
        raise SchemaError(f"{path}: missing '# config_hash=' provenance line")
    config_hash = lines[0].split("=", 1)[1].strip()
    if not config_hash:
        raise SchemaError(f"{path}: empty config hash")
    if len(lines) < 2:
        raise SchemaError(f"{path}: no header line")
    header = lines[1].split(",")
    for column in required:
        if column not in header:
            raise SchemaError(f"{path}: missing column {column!r}", column=column)
    raw: dict[str, list[str]] = {name: [] for name in header}
    for line in lines[2:]:
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != len(header):
            raise SchemaError(f"{path}: ragged row {line!r}")
        for name, cell in zip(header, cells):
            raw[name].append(cell)
    columns: dict[str, np.ndarray] = {}
    for name, cells in raw.items():
        try:
            columns[name] = np.array([float(c) for c in cells])
        except ValueError:
            columns[name] = np.array(cells, dtype=object)
    return {"config_hash": config_hash, "columns": columns}


def panel_main(argv, description: str, required: list[str], render) -> int:
    """Common CLI: <csv> [--out image] [--check]; render(table, out_path)."""
    parser = argparse.ArgumentParser(description=description)
    parser.add_argument("csv", help="result CSV written by the sweep CLI")
    parser.add_argument("--out", default=None, help="output image path (.png/.svg)")
    parser.add_argument("--check", action="store_true", help="validate the schema and exit")
    args = parser.parse_args(argv)
    try:
        table = read_table(args.csv, required)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    if args.check:
        print(f"ok: {args.csv} (config_hash={table['config_hash']})")
        return EXIT_OK
    out = args.out or (Path(args.csv).stem + ".png")
    render(table, out)
    print(out)
    return EXIT_OK


def new_axes(width=4.2, height=3.2):
    fig, ax = plt.subplots(figsize=(width, height), dpi=160)
    ax.tick_params(direction="in")
    return fig, ax


def save(fig, out) -> None:
    fig.tight_layout()
    fig.savefig(out)
    plt.close(fig)
