"""Parameter-sweep engine, experiment configs, and result persistence.

Every experiment works in chi = 1 units with the dimensionless ratios the
figures use directly: detunings as delta/(N chi), times as chi t, drive
amplitudes as Omega0/(2 pi N chi).  Grid points are pure computations, so a
worker pool may evaluate them concurrently; rows are always assembled in grid
order, which keeps re-runs of the same config byte-identical.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from . import __version__
from .dynamics import (
    PropagationSettings,
    driven_spec_for_ratio,
    evolve_driven,
    evolve_static,
    floquet_convergence_scan,
)
from .metrology import (
    axis_distribution,
    husimi,
    metrological_gain,
    qfim,
)
from .models import HamiltonianKind, HamiltonianSpec, build_hamiltonian, solve_tat_ratio, tat_k0
from .readout import (
    NoiseModel,
    ReadoutPlan,
    final_state,
    moment_precision,
    optimal_measurement,
    parity_expectation,
    parity_precision,
    response_matrices,
)
from .semiclassical import (
    SQRT2_MINUS_1,
    BlochPoint,
    FlowParams,
    integrate_flow,
    optimal_detuning_sc,
    optimal_time_sc,
)
from .spincore import DickeState, Direction, build_collective_ops, rotate, spin_coherent_state

EXPERIMENTS = (
    "qfi_scan",
    "qfi_vs_time",
    "scaling_vs_n",
    "readout_scan",
    "noise_scan",
    "floquet_convergence",
    "semiclassical",
)

_GRID_KEYS = {"delta", "times", "n", "sigma", "phi", "omega0", "protocols"}


class ConfigError(ValueError):
    """Invalid sweep configuration."""


@dataclass(frozen=True)
class SweepConfig:
    experiment: str
    model: HamiltonianSpec
    grids: dict
    settings: PropagationSettings = PropagationSettings()
    output_path: str | None = None

    def __post_init__(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        unknown = set(self.grids) - _GRID_KEYS
        if unknown:
            raise ConfigError(f"unknown grid keys: {sorted(unknown)}")
        for key, values in self.grids.items():
            if not isinstance(values, (list, tuple)) or len(values) == 0:
                raise ConfigError(f"grid {key!r} must be a non-empty list")

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "model": self.model.to_dict(),
            "grids": {k: list(v) for k, v in self.grids.items()},
            "settings": {
                "steps_per_period": self.settings.steps_per_period,
                "convergence_doublings": self.settings.convergence_doublings,
                "unitarity_tol": self.settings.unitarity_tol,
            },
            "output_path": self.output_path,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        allowed = {"experiment", "model", "grids", "settings", "output_path"}
        unknown = set(data) - allowed
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        missing = {"experiment", "model", "grids"} - set(data)
        if missing:
            raise ConfigError(f"missing config keys: {sorted(missing)}")
        try:
            model = HamiltonianSpec.from_dict(data["model"])
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad model: {exc}") from exc
        settings_data = data.get("settings") or {}
        try:
            settings = PropagationSettings(**settings_data)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad settings: {exc}") from exc
        return cls(
            experiment=data["experiment"],
            model=model,
            grids=data["grids"],
            settings=settings,
            output_path=data.get("output_path"),
        )

    @classmethod
    def from_json_file(cls, path) -> "SweepConfig":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(data)

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class ResultTable:
    schema: list[str]
    rows: list[tuple]
    provenance: dict = field(default_factory=dict)

    def to_csv_text(self) -> str:
        lines = [f"# config_hash={self.provenance.get('config_hash', '')}"]
        lines.append(",".join(self.schema))
        for row in self.rows:
            lines.append(",".join(_format_cell(v) for v in row))
        return "\n".join(lines) + "\n"

    def to_json_text(self) -> str:
        payload = {
            "config_hash": self.provenance.get("config_hash", ""),
            "schema": self.schema,
            "rows": [list(row) for row in self.rows],
        }
        return json.dumps(payload, sort_keys=True) + "\n"

    def write(self, path, fmt: str = "csv") -> None:
        text = self.to_csv_text() if fmt == "csv" else self.to_json_text()
        Path(path).write_text(text)

    def column(self, name: str) -> np.ndarray:
        idx = self.schema.index(name)
        return np.array([row[idx] for row in self.rows])


def _format_cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    return repr(v)


def thread_count(requested: int | None = None) -> int:
    env = os.environ.get("SPINFORGE_THREADS")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"bad SPINFORGE_THREADS value {env!r}") from exc
    return max(1, requested or 1)


def _map_ordered(fn: Callable, items: Sequence, threads: int) -> list:
    """Evaluate fn over items, results in input order regardless of pool size."""
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


class _RowGuard:
    """Per-row failure capture: a failing grid point yields NaNs, not an abort."""

    def __init__(self, table_errors: list):
        self.errors = table_errors

    def run(self, label, fn: Callable[[], tuple], fallback: tuple) -> tuple:
        try:
            return fn()
        except Exception as exc:  # noqa: BLE001 - recorded, run continues
            self.errors.append({"row": label, "error": f"{type(exc).__name__}: {exc}"})
            return fallback


# ---------------------------------------------------------------------------
# experiment implementations


def _pole_state(n: int) -> DickeState:
    return spin_coherent_state(n, 0.0)


def _tatnt_spec(model: HamiltonianSpec, n: int, delta_ratio: float) -> HamiltonianSpec:
    return HamiltonianSpec(
        kind=HamiltonianKind.TATNT,
        chi=model.chi,
        delta=delta_ratio * n * model.chi,
        alpha=model.alpha,
    )


def _fq_of_time_grid(
    h: np.ndarray, times: Sequence[float], state: DickeState, ops
) -> list[float]:
    return [qfim(evolve_static(h, t, state), ops).f_q_max for t in times]


def _run_qfi_scan(config: SweepConfig, threads: int) -> ResultTable:
    n = int(config.grids["n"][0])
    deltas = [float(d) for d in config.grids["delta"]]
    times = [float(t) for t in config.grids["times"]]
    chi = config.model.chi
    ops = build_collective_ops(n)
    pole = _pole_state(n)

    def column(delta_ratio: float) -> list[float]:
        h = build_hamiltonian(_tatnt_spec(config.model, n, delta_ratio), ops)
        return _fq_of_time_grid(h, [t / chi for t in times], pole, ops)

    columns = _map_ordered(column, deltas, threads)
    rows = []
    best = (-math.inf, 0, 0)
    for i, delta_ratio in enumerate(deltas):
        for k, chi_t in enumerate(times):
            fq = columns[i][k]
            rows.append((delta_ratio, chi_t, fq / n**2))
            if fq > best[0]:
                best = (fq, i, k)
    table = ResultTable(schema=["delta_over_Nchi", "chi_t", "fq_over_N2"], rows=rows)
    best_delta, best_t = deltas[best[1]], times[best[2]]
    table.provenance["optimum"] = {
        "delta_over_Nchi": best_delta,
        "chi_t": best_t,
        "fq_over_N2": best[0] / n**2,
    }

    # Companion tables for the optimal state: its distribution along y and
    # its Husimi field (the state-snapshot panel of the scan figure).
    h_best = build_hamiltonian(_tatnt_spec(config.model, n, best_delta), ops)
    state_best = evolve_static(h_best, best_t / chi, pole)
    dist = axis_distribution(state_best, Direction.y())
    dist_rows = [
        (float(m), float(p)) for m, p in zip(dist.m_values(), dist.probabilities)
    ]
    field_h = husimi(state_best, (48, 96))
    husimi_rows = [
        (float(th), float(ph), float(field_h.values[i, k]))
        for i, th in enumerate(field_h.theta)
        for k, ph in enumerate(field_h.phi)
    ]
    table.provenance["aux_tables"] = {
        "ydist": ResultTable(schema=["m", "P"], rows=dist_rows),
        "husimi": ResultTable(schema=["theta", "phi", "Q"], rows=husimi_rows),
    }
    return table


def _optimize_oatnt_amplitude(
    n: int, chi: float, alpha: float, times: Sequence[float], ops
) -> float:
    """Drive amplitude (units of N chi) maximizing the windowed peak QFI.

    The comparison protocols' turn strengths are not pinned by the protocol
    family itself, so the turn-and-twist curve is shown at its own best
    working point; a golden-section pass refines a coarse bracket around the
    classical instability optimum Omega ~ N chi / 2.
    """
    xpole = spin_coherent_state(n, math.pi / 2.0, 0.0)

    def peak(amp_ratio: float) -> float:
        spec = HamiltonianSpec(
            kind=HamiltonianKind.OATNT, chi=chi, omega0=amp_ratio * n * chi, alpha=alpha
        )
        h = build_hamiltonian(spec, ops)
        return max(_fq_of_time_grid(h, times, xpole, ops))

    coarse = np.linspace(0.2, 1.2, 11)
    values = [peak(a) for a in coarse]
    i = int(np.argmax(values))
    lo = coarse[max(0, i - 1)]
    hi = coarse[min(len(coarse) - 1, i + 1)]
    best_x, best_f = _golden_max(peak, lo, hi, tol=1e-3)
    if values[i] > best_f:
        best_x = coarse[i]
    return float(best_x)


def _run_qfi_vs_time(config: SweepConfig, threads: int) -> ResultTable:
    n = int(config.grids["n"][0])
    times = [float(t) for t in config.grids["times"]]
    chi = config.model.chi
    delta_ratio = float(
        config.grids.get("delta", [SQRT2_MINUS_1 / (3.0 * tat_k0())])[0]
    )
    omega0_factor = float(config.grids.get("omega0", [100.0])[0])
    ops = build_collective_ops(n)
    pole = _pole_state(n)
    xpole = spin_coherent_state(n, math.pi / 2.0, 0.0)
    t_phys = [t / chi for t in times]

    oatnt_ratio = _optimize_oatnt_amplitude(n, chi, config.model.alpha, t_phys, ops)

    h_oat = build_hamiltonian(HamiltonianSpec(kind=HamiltonianKind.OAT, chi=chi), ops)
    h_oatnt = build_hamiltonian(
        HamiltonianSpec(
            kind=HamiltonianKind.OATNT,
            chi=chi,
            omega0=oatnt_ratio * n * chi,
            alpha=config.model.alpha,
        ),
        ops,
    )
    h_tat = build_hamiltonian(HamiltonianSpec(kind=HamiltonianKind.TAT, chi=chi), ops)
    h_tatnt = build_hamiltonian(_tatnt_spec(config.model, n, delta_ratio), ops)

    curves = {
        "fq_oat": _fq_of_time_grid(h_oat, t_phys, xpole, ops),
        "fq_oatnt": _fq_of_time_grid(h_oatnt, t_phys, xpole, ops),
        "fq_tat": _fq_of_time_grid(h_tat, t_phys, pole, ops),
        "fq_tatnt": _fq_of_time_grid(h_tatnt, t_phys, pole, ops),
    }

    omega = 2.0 * math.pi * omega0_factor * n * chi / solve_tat_ratio()
    spec_fe = driven_spec_for_ratio(
        omega, chi=chi, delta=delta_ratio * n * chi, alpha=config.model.alpha
    )
    sample = [t for t in t_phys if t > 0.0]
    driven_fq: dict[float, float] = {0.0: qfim(pole, ops).f_q_max}
    if sample:
        result = evolve_driven(spec_fe, sample[-1], pole, config.settings, sample_times=sample)
        for t, snap in zip(sample, result.snapshots):
            driven_fq[t] = qfim(snap, ops).f_q_max
    curves["fq_driven"] = [driven_fq[t] for t in t_phys]

    schema = ["chi_t", "fq_oat", "fq_oatnt", "fq_tat", "fq_tatnt", "fq_driven"]
    rows = []
    for k, chi_t in enumerate(times):
        rows.append(
            (
                chi_t,
                curves["fq_oat"][k] / n**2,
                curves["fq_oatnt"][k] / n**2,
                curves["fq_tat"][k] / n**2,
                curves["fq_tatnt"][k] / n**2,
                curves["fq_driven"][k] / n**2,
            )
        )
    table = ResultTable(schema=schema, rows=rows)
    table.provenance["oatnt_omega0_over_nchi"] = oatnt_ratio
    return table


def _golden_max(fn: Callable[[float], float], lo: float, hi: float, tol: float) -> tuple[float, float]:
    """Golden-section maximization; returns the best point actually evaluated."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fn(c), fn(d)
    best = (c, fc) if fc >= fd else (d, fd)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fn(d)
        for x, f in ((c, fc), (d, fd)):
            if f > best[1]:
                best = (x, f)
    return best


def optimize_tatnt(
    n: int,
    chi: float = 1.0,
    alpha: float = 0.0,
    delta_window: tuple[float, float] = (0.20, 0.45),
    n_delta: int = 11,
    n_times: int = 13,
    rounds: int = 2,
) -> tuple[float, float, float]:
    """Best (delta/(N chi), chi t, F_Q^opt) by coarse grid + golden refinement.

    Coordinate-wise golden-section refinement never returns a point worse
    than the best coarse-grid sample.
    """
    ops = build_collective_ops(n)
    pole = _pole_state(n)
    t_center = optimal_time_sc(n)
    t_lo, t_hi = 0.6 * t_center, 1.6 * t_center
    deltas = np.linspace(delta_window[0], delta_window[1], n_delta)
    times = np.linspace(t_lo, t_hi, n_times)

    def fq(delta_ratio: float, chi_t: float) -> float:
        spec = HamiltonianSpec(
            kind=HamiltonianKind.TATNT, chi=chi, delta=delta_ratio * n * chi, alpha=alpha
        )
        h = build_hamiltonian(spec, ops)
        return qfim(evolve_static(h, chi_t / chi, pole), ops).f_q_max

    best = (-math.inf, 0.0, 0.0)
    for d in deltas:
        spec = HamiltonianSpec(kind=HamiltonianKind.TATNT, chi=chi, delta=d * n * chi, alpha=alpha)
        h = build_hamiltonian(spec, ops)
        for t, value in zip(times, _fq_of_time_grid(h, times / chi, pole, ops)):
            if value > best[0]:
                best = (value, float(d), float(t))
    f_best, d_best, t_best = best
    d_cur, t_cur = d_best, t_best
    dd = deltas[1] - deltas[0]
    dt = times[1] - times[0]
    for _ in range(rounds):
        t_cur, f_t = _golden_max(lambda t: fq(d_cur, t), t_cur - dt, t_cur + dt, tol=1e-4 * t_center)
        if f_t > f_best:
            f_best, d_best, t_best = f_t, d_cur, t_cur
        d_cur, f_d = _golden_max(lambda d: fq(d, t_cur), d_cur - dd, d_cur + dd, tol=1e-4)
        if f_d > f_best:
            f_best, d_best, t_best = f_d, d_cur, t_cur
    return d_best, t_best, f_best


def _run_scaling_vs_n(config: SweepConfig, threads: int) -> ResultTable:
    n_values = [int(v) for v in config.grids["n"]]
    chi = config.model.chi

    def point(n: int) -> tuple:
        d_opt, t_opt, f_opt = optimize_tatnt(n, chi=chi, alpha=config.model.alpha)
        return (n, d_opt, t_opt, f_opt / n**2)

    rows = _map_ordered(point, n_values, threads)
    table = ResultTable(
        schema=["n", "delta_opt_over_Nchi", "chi_t_opt", "fq_opt_over_N2"], rows=rows
    )
    logn = np.log([r[0] for r in rows])
    logf = np.log([r[3] * r[0] ** 2 for r in rows])
    slope, intercept = np.polyfit(logn, logf, 1)
    table.provenance["loglog_slope"] = float(slope)
    table.provenance["prefactor"] = float(np.exp(intercept))
    return table


_READOUT_PROTOCOLS = ("OAT", "OATNT", "TAT", "TATNT")


def _protocol_prep(
    protocol: str, n: int, chi: float, delta_ratio: float, oatnt_ratio: float
) -> tuple[HamiltonianSpec, DickeState]:
    """Preparation Hamiltonian and its canonical initial state."""
    if protocol == "OAT":
        return (
            HamiltonianSpec(kind=HamiltonianKind.OAT, chi=chi),
            spin_coherent_state(n, math.pi / 2.0, 0.0),
        )
    if protocol == "OATNT":
        return (
            HamiltonianSpec(
                kind=HamiltonianKind.OATNT, chi=chi, omega0=oatnt_ratio * n * chi
            ),
            spin_coherent_state(n, math.pi / 2.0, 0.0),
        )
    if protocol == "TAT":
        return HamiltonianSpec(kind=HamiltonianKind.TAT, chi=chi), _pole_state(n)
    if protocol == "TATNT":
        return (
            HamiltonianSpec(kind=HamiltonianKind.TATNT, chi=chi, delta=delta_ratio * n * chi),
            _pole_state(n),
        )
    raise ConfigError(f"unknown readout protocol {protocol!r}")


def _run_readout_scan(config: SweepConfig, threads: int) -> ResultTable:
    n = int(config.grids["n"][0])
    times = [float(t) for t in config.grids["times"]]
    phi = float(config.grids.get("phi", [1e-3])[0])
    chi = config.model.chi
    delta_ratio = float(
        config.grids.get("delta", [SQRT2_MINUS_1 / (3.0 * tat_k0())])[0]
    )
    protocols = [str(p) for p in config.grids.get("protocols", list(_READOUT_PROTOCOLS))]
    ops = build_collective_ops(n)

    def point(item: tuple[str, float]) -> tuple:
        protocol, chi_t = item
        prep_spec, initial = _protocol_prep(protocol, n, chi, delta_ratio, 0.5)
        t = chi_t / chi
        if t == 0.0:
            prepared = initial
        else:
            prepared = evolve_static(build_hamiltonian(prep_spec, ops), t, initial)
        result = qfim(prepared, ops)
        qcrb = 1.0 / math.sqrt(result.f_q_max)
        if protocol == "TATNT":
            readout_spec = HamiltonianSpec(
                kind=HamiltonianKind.TATNT,
                chi=chi,
                delta=-delta_ratio * n * chi,
                alpha=math.pi / 2.0,
            )
        else:
            readout_spec = prep_spec.negated()
        plan = ReadoutPlan(
            prep_spec=prep_spec,
            readout_spec=readout_spec,
            prep_time=t,
            readout_time=t,
            sensing_dir=result.n_max,
            phase=phi,
            settings=config.settings,
        )
        opt = optimal_measurement(response_matrices(initial, plan), result.n_max)
        return (
            protocol,
            chi_t,
            opt.delta_phi,
            qcrb,
            metrological_gain(opt.delta_phi, n),
            0.0,
        )

    items = [(p, t) for p in protocols for t in times]
    errors: list = []
    guard = _RowGuard(errors)

    def safe_point(item: tuple[str, float]) -> tuple:
        protocol, chi_t = item
        return guard.run(
            item,
            lambda: point(item),
            (protocol, chi_t, math.nan, math.nan, math.nan, 0.0),
        )

    rows = _map_ordered(safe_point, items, threads)
    table = ResultTable(
        schema=["protocol", "t", "delta_phi", "qcrb", "gain_db", "sigma"],
        rows=rows,
    )
    if errors:
        table.provenance["row_errors"] = errors
    return table


def _orthonormal_pair(direction: Direction) -> tuple[np.ndarray, np.ndarray]:
    nvec = direction.as_array()
    seed = np.array([0.0, 0.0, 1.0]) if abs(nvec[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    e1 = seed - (seed @ nvec) * nvec
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(nvec, e1)


def tune_parity_axis(
    dist_at: Callable[[Direction, float], "object"],
    encode_dir: Direction,
    n_particles: int,
    phi: float,
    n_angles: int = 64,
) -> Direction:
    """Axis in the plane orthogonal to the encoding direction with the
    steepest noiseless parity fringe at the operating phase.

    Rotating the parity axis within that plane shifts the fringe offset, so
    this is the operating-point adjustment of an interferometer.
    """
    e1, e2 = _orthonormal_pair(encode_dir)
    step = abs(phi) / 10.0
    none = NoiseModel(0.0)
    best: tuple[Direction | None, float] = (None, 0.0)
    for xi in np.linspace(0.0, 2.0 * math.pi / max(n_particles, 4), n_angles, endpoint=False):
        axis = Direction.from_vector(math.cos(xi) * e1 + math.sin(xi) * e2)
        upper = parity_expectation(dist_at(axis, phi + step), none)
        lower = parity_expectation(dist_at(axis, phi - step), none)
        slope = (upper - lower) / (2.0 * step)
        if abs(slope) > abs(best[1]):
            best = (axis, slope)
    if best[0] is None:
        raise ConfigError("no parity axis with a nonzero fringe slope")
    return best[0]


def _run_noise_scan(config: SweepConfig, threads: int) -> ResultTable:
    n = int(config.grids["n"][0])
    sigmas = [float(s) for s in config.grids["sigma"]]
    phi = float(config.grids.get("phi", [1e-3])[0])
    chi_t = float(config.grids.get("times", [0.12])[0])
    chi = config.model.chi
    delta_ratio = float(
        config.grids.get("delta", [SQRT2_MINUS_1 / (3.0 * tat_k0())])[0]
    )
    ops = build_collective_ops(n)
    pole = _pole_state(n)
    t = chi_t / chi
    phis = (phi - phi / 10.0, phi, phi + phi / 10.0)

    # Non-Gaussian probe prepared by twist-and-turn.
    prep_spec = HamiltonianSpec(kind=HamiltonianKind.TATNT, chi=chi, delta=delta_ratio * n * chi)
    h_prep = build_hamiltonian(prep_spec, ops)
    prepared = evolve_static(h_prep, t, pole)
    probe = qfim(prepared, ops)

    # Protocol 1: echo readout, mean of J along the optimal direction.
    readout_spec = HamiltonianSpec(
        kind=HamiltonianKind.TATNT, chi=chi, delta=-delta_ratio * n * chi, alpha=math.pi / 2.0
    )
    plan = ReadoutPlan(
        prep_spec=prep_spec,
        readout_spec=readout_spec,
        prep_time=t,
        readout_time=t,
        sensing_dir=probe.n_max,
        phase=phi,
        settings=config.settings,
    )
    m_opt = optimal_measurement(response_matrices(pole, plan), probe.n_max).direction
    echo_dists = {
        p: axis_distribution(final_state(pole, replace(plan, phase=p)), m_opt) for p in phis
    }

    # Protocol 2: direct parity on the same probe state.
    def tatnt_dist(axis: Direction, p: float):
        return axis_distribution(rotate(prepared, probe.n_max, p), axis)

    ax_tatnt = tune_parity_axis(tatnt_dist, probe.n_max, n, phi)
    tatnt_dists = {p: tatnt_dist(ax_tatnt, p) for p in phis}

    # Protocol 3: direct parity on the cat state from plain twisting.
    xpole = spin_coherent_state(n, math.pi / 2.0, 0.0)
    h_oat = build_hamiltonian(HamiltonianSpec(kind=HamiltonianKind.OAT, chi=chi), ops)
    ghz = evolve_static(h_oat, (math.pi / 2.0) / chi, xpole)
    ghz_dir = qfim(ghz, ops).n_max

    def ghz_dist(axis: Direction, p: float):
        return axis_distribution(rotate(ghz, ghz_dir, p), axis)

    ax_ghz = tune_parity_axis(ghz_dist, ghz_dir, n, phi)
    ghz_dists = {p: ghz_dist(ax_ghz, p) for p in phis}

    rows = []
    errors: list = []
    guard = _RowGuard(errors)
    families = {
        "optimal_readout": (moment_precision, lambda p: echo_dists[p]),
        "parity_tatnt": (parity_precision, lambda p: tatnt_dists[p]),
        "parity_ghz": (parity_precision, lambda p: ghz_dists[p]),
    }
    for sigma in sigmas:
        noise = NoiseModel(sigma)
        for name, (estimator, family) in families.items():

            def row(estimator=estimator, family=family, name=name) -> tuple:
                d = estimator(family, phi, noise)
                return (name, sigma, d, metrological_gain(d, n))

            rows.append(
                guard.run((name, sigma), row, (name, sigma, math.nan, math.nan))
            )
    table = ResultTable(schema=["protocol", "sigma", "delta_phi", "gain_db"], rows=rows)
    if errors:
        table.provenance["row_errors"] = errors
    table.provenance["qcrb_gain_db"] = metrological_gain(
        1.0 / math.sqrt(probe.f_q_max), n
    )
    return table


def _run_floquet_convergence(config: SweepConfig, threads: int) -> ResultTable:
    n = int(config.grids["n"][0])
    factors = [float(f) for f in config.grids["omega0"]]
    chi = config.model.chi
    delta_ratio = float(
        config.grids.get("delta", [SQRT2_MINUS_1 / (3.0 * tat_k0())])[0]
    )
    chi_t = float(config.grids.get("times", [optimal_time_sc(n)])[0])
    ratio = solve_tat_ratio()
    omegas = [2.0 * math.pi * f * n * chi / ratio for f in factors]
    pole = _pole_state(n)
    scan = floquet_convergence_scan(
        omegas,
        chi_t / chi,
        pole,
        chi=chi,
        delta=delta_ratio * n * chi,
        alpha=config.model.alpha,
        settings=config.settings,
    )
    rows = [
        (factor, omega, qfi_gap, fid_gap)
        for factor, (omega, qfi_gap, fid_gap) in zip(factors, scan)
    ]
    return ResultTable(
        schema=["omega0_over_2pi_Nchi", "omega", "qfi_gap", "fidelity_gap"], rows=rows
    )


def _run_semiclassical(config: SweepConfig, threads: int) -> ResultTable:
    n = int(config.grids["n"][0])
    chi = config.model.chi
    chi_t_final = float(config.grids.get("times", [5.0 * 3.0 / n])[0])
    delta_ratio = float(config.grids.get("delta", [SQRT2_MINUS_1 / (3.0 * tat_k0())])[0])
    chi_eff = chi / 3.0
    params = FlowParams(
        n_particles=n, chi_eff=chi_eff, delta_eff=tat_k0() * delta_ratio * n * chi
    )
    start = BlochPoint(1e-4, 1e-4, math.sqrt(1.0 - 2e-8))
    dt = 0.005 / abs(params.rate)
    traj = integrate_flow(start, params, chi_t_final / chi, dt)
    stride = max(1, len(traj.times) // 2000)
    rows = [
        (float(traj.times[i]), *map(float, traj.points[i]), float(traj.energies[i]))
        for i in range(0, len(traj.times), stride)
    ]
    return ResultTable(schema=["t", "A", "B", "Z", "E"], rows=rows)


_RUNNERS = {
    "qfi_scan": _run_qfi_scan,
    "qfi_vs_time": _run_qfi_vs_time,
    "scaling_vs_n": _run_scaling_vs_n,
    "readout_scan": _run_readout_scan,
    "noise_scan": _run_noise_scan,
    "floquet_convergence": _run_floquet_convergence,
    "semiclassical": _run_semiclassical,
}

_REQUIRED_GRIDS = {
    "qfi_scan": ("n", "delta", "times"),
    "qfi_vs_time": ("n", "times"),
    "scaling_vs_n": ("n",),
    "readout_scan": ("n", "times"),
    "noise_scan": ("n", "sigma"),
    "floquet_convergence": ("n", "omega0"),
    "semiclassical": ("n",),
}


def run_experiment(config: SweepConfig, threads: int | None = None) -> ResultTable:
    """Dispatch one experiment; provenance carries the config hash."""
    for key in _REQUIRED_GRIDS[config.experiment]:
        if key not in config.grids:
            raise ConfigError(
                f"experiment {config.experiment!r} requires grid {key!r}"
            )
    table = _RUNNERS[config.experiment](config, thread_count(threads))
    table.provenance.setdefault("config_hash", config.config_hash())
    table.provenance.setdefault("code_version", __version__)
    for aux in table.provenance.get("aux_tables", {}).values():
        aux.provenance.setdefault("config_hash", config.config_hash())
    return table


def write_results(
    table: ResultTable, config: SweepConfig, out_dir, fmt: str = "csv"
) -> Path:
    """Persist to <out>/<experiment>/<hash>.<fmt>; aux tables sit alongside."""
    ext = "csv" if fmt == "csv" else "json"
    directory = Path(out_dir) / config.experiment
    directory.mkdir(parents=True, exist_ok=True)
    main_path = directory / f"{config.config_hash()}.{ext}"
    table.write(main_path, fmt)
    for name, aux in table.provenance.get("aux_tables", {}).items():
        aux.write(directory / f"{config.config_hash()}_{name}.{ext}", fmt)
    return main_path


# ---------------------------------------------------------------------------
# default configs mirroring the reference parameter choices


def default_config(experiment: str, n: int = 100, **overrides) -> SweepConfig:
    model = HamiltonianSpec(kind=HamiltonianKind.TATNT, chi=1.0, delta=0.0, alpha=0.0)
    delta_opt = SQRT2_MINUS_1 / (3.0 * tat_k0())
    grids: dict
    if experiment == "qfi_scan":
        grids = {
            "n": [n],
            "delta": [round(v, 10) for v in np.arange(-0.8, 0.8 + 1e-9, 0.02)],
            "times": [round(v, 10) for v in np.arange(0.0, 0.25 + 1e-9, 0.002)],
        }
    elif experiment == "qfi_vs_time":
        grids = {
            "n": [n],
            "times": [round(v, 10) for v in np.arange(0.0, 0.25 + 1e-9, 0.005)],
            "delta": [delta_opt],
            "omega0": [100.0],
        }
    elif experiment == "scaling_vs_n":
        grids = {"n": list(range(20, 201, 20))}
    elif experiment == "readout_scan":
        grids = {
            "n": [n],
            "times": [round(v, 10) for v in np.arange(0.0, 0.15 + 1e-9, 0.01)],
            "phi": [1e-3],
            "delta": [delta_opt],
        }
    elif experiment == "noise_scan":
        grids = {
            "n": [n],
            "sigma": [0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0],
            "phi": [1e-3],
            "times": [0.12],
            "delta": [delta_opt],
        }
    elif experiment == "floquet_convergence":
        grids = {
            "n": [n],
            "omega0": [10.0, 18.0, 32.0, 56.0, 100.0],
            "delta": [delta_opt],
            "times": [optimal_time_sc(n)],
        }
    elif experiment == "semiclassical":
        grids = {"n": [n], "times": [5.0 * 3.0 / n], "delta": [delta_opt]}
    else:
        raise ConfigError(f"unknown experiment {experiment!r}")
    data = {
        "experiment": experiment,
        "model": model.to_dict(),
        "grids": grids,
        "settings": {},
        "output_path": None,
    }
    data.update(overrides)
    return SweepConfig.from_dict(data)


# ---------------------------------------------------------------------------
# oracle validation suite (used by the `validate` CLI subcommand)


def run_validation(verbose: bool = True) -> list[tuple[str, float, bool]]:
    """Cross-check the Dicke pipeline against the 2^N product-space oracle."""
    from . import exactsmall as ex

    checks: list[tuple[str, float, bool]] = []

    def record(name: str, err: float, tol: float) -> None:
        ok = err < tol
        checks.append((name, err, ok))
        if verbose:
            print(f"{'PASS' if ok else 'FAIL'}  {name}: err={err:.3e} tol={tol:.1e}")

    for n in (2, 3, 4):
        ops = build_collective_ops(n)
        state = spin_coherent_state(n, 1.1, 0.4)
        full = ex.symmetric_embed(state)
        back, leak = ex.project_back(full)
        record(f"N={n} embed round-trip", 1.0 - back.fidelity(state), 1e-12)
        record(f"N={n} embed leakage", abs(leak), 1e-12)

        specs = [
            HamiltonianSpec(kind=HamiltonianKind.OAT, chi=1.0),
            HamiltonianSpec(kind=HamiltonianKind.OATNT, chi=1.0, omega0=0.7, alpha=0.3),
            HamiltonianSpec(kind=HamiltonianKind.TAT, chi=1.0),
            HamiltonianSpec(kind=HamiltonianKind.TATNT, chi=1.0, delta=0.4, alpha=0.2),
            HamiltonianSpec(kind=HamiltonianKind.ANTI_TATNT, chi=1.0, delta=0.4, alpha=0.2),
        ]
        t = 0.3
        for spec in specs:
            h = build_hamiltonian(spec, ops)
            evolved = evolve_static(h, t, state)
            full_ev = ex.full_evolve(ex.full_hamiltonian(spec, n), t, full)
            projected, leak = ex.project_back(full_ev)
            record(
                f"N={n} {spec.kind.value} evolution",
                1.0 - projected.fidelity(evolved),
                1e-10,
            )
            record(f"N={n} {spec.kind.value} leakage", abs(leak), 1e-12)

        f_dicke = qfim(state, ops).matrix
        f_full = ex.full_qfim(full)
        record(
            f"N={n} QFIM",
            float(np.max(np.abs(f_dicke - f_full)) / max(1.0, np.max(np.abs(f_full)))),
            1e-8,
        )

        tat_spec = HamiltonianSpec(kind=HamiltonianKind.TATNT, chi=1.0, delta=0.4, alpha=0.0)
        anti = HamiltonianSpec(kind=HamiltonianKind.TATNT, chi=1.0, delta=-0.4, alpha=math.pi / 2.0)
        sensing = Direction.y()
        plan = ReadoutPlan(
            prep_spec=tat_spec,
            readout_spec=anti,
            prep_time=t,
            readout_time=t,
            sensing_dir=sensing,
            phase=1e-2,
        )
        opt = optimal_measurement(response_matrices(state, plan), sensing)
        oracle_dphi = ex.full_readout_delta_phi(full, tat_spec, anti, t, t, sensing, 1e-2)
        record(
            f"N={n} readout delta_phi",
            abs(opt.delta_phi - oracle_dphi) / oracle_dphi,
            1e-8,
        )
    return checks
