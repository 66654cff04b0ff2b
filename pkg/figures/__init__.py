"""Standalone figure scripts: render PNG/SVG panels from persisted result CSVs.

Each module is runnable as `python -m figures.<panel> <csv> --out <image>` and
only ever reads the CSV files the sweep CLI wrote; nothing here recomputes
physics.  A `--check` flag validates the input schema without rendering.
"""
