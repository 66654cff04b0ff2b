"""Secondary-component tests: every panel renders from persisted CSVs only.

Fixture data comes from real (small-N) sweep CLI runs, exercised through the
public command-line interface; the figure scripts never import the simulation
package.
"""

import hashlib
import json
import subprocess
import sys
from pathlib import Path

import pytest

from figures import fig2a, fig2b, fig2c, fig2d, fig2e, fig2f, fig3a, fig3b

_DELTA_OPT = 0.3135


def _cli(config: dict, out_dir: Path, tmp: Path, name: str) -> Path:
    cfg_path = tmp / f"{name}.json"
    cfg_path.write_text(json.dumps(config))
    result = subprocess.run(
        [sys.executable, "-m", "spinforge.cli", "run", str(cfg_path), "--out", str(out_dir)],
        capture_output=True,
        text=True,
        check=True,
    )
    return Path(result.stdout.strip().splitlines()[-1])


def _base(experiment: str, grids: dict) -> dict:
    return {
        "experiment": experiment,
        "model": {"kind": "TATNT", "chi": 1.0, "delta": 0.0, "omega0": 0.0, "omega": 0.0, "alpha": 0.0},
        "grids": grids,
        "settings": {},
        "output_path": None,
    }


@pytest.fixture(scope="session")
def results(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("figdata")
    out = tmp / "results"
    paths = {}
    paths["qfi_scan"] = _cli(
        _base("qfi_scan", {"n": [16], "delta": [0.24, 0.30, 0.36], "times": [0.2, 0.4, 0.6]}),
        out, tmp, "qfi_scan",
    )
    paths["ydist"] = paths["qfi_scan"].with_name(paths["qfi_scan"].stem + "_ydist.csv")
    paths["husimi"] = paths["qfi_scan"].with_name(paths["qfi_scan"].stem + "_husimi.csv")
    paths["qfi_vs_time"] = _cli(
        _base(
            "qfi_vs_time",
            {"n": [12], "times": [0.0, 0.3, 0.6], "delta": [_DELTA_OPT], "omega0": [40.0]},
        ),
        out, tmp, "qfi_vs_time",
    )
    paths["scaling"] = _cli(_base("scaling_vs_n", {"n": [10, 14, 18]}), out, tmp, "scaling")
    paths["readout"] = _cli(
        _base(
            "readout_scan",
            {"n": [10], "times": [0.1, 0.3], "phi": [1e-3], "delta": [_DELTA_OPT]},
        ),
        out, tmp, "readout",
    )
    paths["noise"] = _cli(
        _base(
            "noise_scan",
            {"n": [12], "sigma": [0.0, 1.0], "phi": [1e-3], "times": [0.3], "delta": [_DELTA_OPT]},
        ),
        out, tmp, "noise",
    )
    return paths


_PANELS = [
    ("fig2a", fig2a, "qfi_scan"),
    ("fig2b", fig2b, "qfi_vs_time"),
    ("fig2c", fig2c, "ydist"),
    ("fig2d", fig2d, "scaling"),
    ("fig2e", fig2e, "scaling"),
    ("fig2f", fig2f, "scaling"),
    ("fig3a", fig3a, "readout"),
    ("fig3b", fig3b, "noise"),
]


def _sha(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


@pytest.mark.parametrize("name,module,key", _PANELS)
def test_panel_check_and_render(results, tmp_path, name, module, key):
    csv_path = results[key]
    before = _sha(csv_path)
    assert module.main([str(csv_path), "--check"]) == 0
    out = tmp_path / f"{name}.png"
    assert module.main([str(csv_path), "--out", str(out)]) == 0
    assert out.exists() and out.stat().st_size > 1000
    # rendering must leave the inputs untouched
    assert _sha(csv_path) == before


def test_missing_column_exits_two(results, tmp_path, capsys):
    lines = results["scaling"].read_text().splitlines()
    header = lines[1].split(",")
    header.remove("chi_t_opt")
    keep = [i for i, name in enumerate(lines[1].split(",")) if name in header]
    broken = tmp_path / "broken.csv"
    broken.write_text(
        "\n".join(
            [lines[0], ",".join(header)]
            + [",".join(line.split(",")[i] for i in keep) for line in lines[2:]]
        )
        + "\n"
    )
    assert fig2e.main([str(broken), "--check"]) == 2
    assert "chi_t_opt" in capsys.readouterr().err


def test_missing_hash_line_fails_loudly(results, tmp_path, capsys):
    lines = results["scaling"].read_text().splitlines()
    stripped = tmp_path / "nohash.csv"
    stripped.write_text("\n".join(lines[1:]) + "\n")
    assert fig2d.main([str(stripped), "--check"]) == 2
    assert "config_hash" in capsys.readouterr().err


def test_missing_file_fails(tmp_path):
    assert fig2a.main([str(tmp_path / "nope.csv"), "--check"]) == 2


def test_fig2c_finds_husimi_companion(results, tmp_path):
    out = tmp_path / "fig2c_explicit.png"
    code = fig2c.main(
        [str(results["ydist"]), "--husimi", str(results["husimi"]), "--out", str(out)]
    )
    assert code == 0 and out.exists()
