import math

import numpy as np
import pytest

from spinforge.models import tat_k0
from spinforge.semiclassical import (
    SQRT2_MINUS_1,
    BlochPoint,
    FlowParams,
    energy,
    fixed_points,
    flow_jacobian,
    flow_rhs,
    integrate_flow,
    lyapunov_saddle,
    optimal_detuning_sc,
    optimal_time_quadrature,
    optimal_time_sc,
    sc_qfi_prediction,
    separatrix_curves,
)


@pytest.fixture
def params():
    n = 100
    return FlowParams(n_particles=n, chi_eff=1.0 / 3.0, delta_eff=SQRT2_MINUS_1 * n / 3.0)


def test_pole_is_stationary(params):
    assert flow_rhs(BlochPoint(0.0, 0.0, 1.0), params) == (0.0, 0.0, 0.0)


def test_diagonal_great_circles_invariant_without_detuning():
    # at zero detuning the flow preserves the A = +-B great circles (the
    # separatrix planes); velocity stays tangent to them
    params0 = FlowParams(100, 1.0 / 3.0, 0.0)
    for sign in (1.0, -1.0):
        u, z = 0.6, 0.8
        scale = 1.0 / math.sqrt(2 * u * u + z * z)
        p = BlochPoint(u * scale, sign * u * scale, z * scale)
        da, db, _ = flow_rhs(p, params0)
        assert abs(da - sign * db) < 1e-12 * params0.rate


def test_flow_conserves_radius(params):
    rng = np.random.default_rng(2)
    for _ in range(20):
        v = rng.normal(size=3)
        v /= np.linalg.norm(v)
        p = BlochPoint(*v)
        assert abs(np.dot(v, flow_rhs(p, params))) < 1e-12 * params.rate


def test_params_regime_validation():
    with pytest.raises(ValueError):
        FlowParams(100, 1.0 / 3.0, 101.0 / 3.0)
    with pytest.raises(ValueError):
        FlowParams(100, 0.0, 0.0)


def test_integration_stays_at_fixed_point(params):
    traj = integrate_flow(BlochPoint(0.0, 0.0, 1.0), params, 1.0 / params.rate, 0.005 / params.rate)
    assert np.max(np.linalg.norm(traj.points - [0.0, 0.0, 1.0], axis=1)) < 1e-9


def test_integration_norm_and_energy(params):
    start = BlochPoint(1e-4, 1e-4, math.sqrt(1.0 - 2e-8))
    traj = integrate_flow(start, params, 5.0 / params.rate, 0.005 / params.rate)
    norms = np.linalg.norm(traj.points, axis=1)
    assert np.max(np.abs(norms - 1.0)) < 1e-9
    scale = max(np.max(np.abs(traj.energies)), 1e-30)
    assert np.max(np.abs(traj.energies - traj.energies[0])) / scale < 1e-6


def test_lyapunov_growth_rate_fit():
    params0 = FlowParams(100, 1.0 / 3.0, 0.0)
    start = BlochPoint(1e-4, 1e-4, math.sqrt(1.0 - 2e-8))
    traj = integrate_flow(start, params0, 2.0 / params0.rate, 0.004 / params0.rate)
    disp = np.sqrt(traj.points[:, 0] ** 2 + traj.points[:, 1] ** 2)
    mask = (disp > 3e-4) & (disp < 3e-2)
    slope = np.polyfit(traj.times[mask], np.log(disp[mask]), 1)[0]
    assert abs(slope - params0.rate) / params0.rate < 0.03


def test_step_size_guard(params):
    with pytest.raises(ValueError):
        integrate_flow(BlochPoint(0.0, 0.0, 1.0), params, 1.0, 0.02 / params.rate)


def test_fixed_points_inventory(params):
    points = fixed_points(params)
    assert len(points) == 6
    tags = {}
    for p, tag in points:
        assert np.linalg.norm(flow_rhs(p, params)) < 1e-12 * params.rate
        tags[(round(p.a, 6), round(p.b, 6), round(p.z, 6))] = tag
    d = params.detuning_ratio
    assert tags[(0.0, 0.0, 1.0)] == "saddle"
    assert tags[(0.0, 0.0, -1.0)] == "saddle"
    root = round(math.sqrt(1 - d * d), 6)
    assert tags[(0.0, root, round(d, 6))] == "stable"
    assert tags[(root, 0.0, round(-d, 6))] == "stable"


def test_fixed_points_zero_detuning_on_equator():
    params0 = FlowParams(50, 1.0 / 3.0, 0.0)
    stable = [p for p, tag in fixed_points(params0) if tag == "stable"]
    for p in stable:
        assert abs(p.z) < 1e-12
        assert abs(abs(p.a) + abs(p.b) - 1.0) < 1e-12


def test_saddle_jacobian_spectrum(params):
    lam = lyapunov_saddle(params)
    eig = np.linalg.eigvals(flow_jacobian(BlochPoint(0.0, 0.0, 1.0), params))
    eig = np.sort_complex(eig)
    assert abs(eig[0].real + lam) < 1e-10
    assert abs(eig[-1].real - lam) < 1e-10
    assert min(abs(eig.real)) < 1e-12


def test_lyapunov_closed_form():
    n = 100
    params0 = FlowParams(n, 1.0 / 3.0, 0.0)
    assert abs(lyapunov_saddle(params0) - params0.rate) < 1e-12
    params_opt = FlowParams(n, 1.0 / 3.0, SQRT2_MINUS_1 * n / 3.0)
    # evaluated closed form: sqrt(1 - (sqrt(2)-1)^2) = 0.910178...
    assert abs(lyapunov_saddle(params_opt) - 0.9101797211244547 * params_opt.rate) < 1e-10


def test_numeric_jacobian_matches_analytic(params):
    rng = np.random.default_rng(3)
    h = 1e-6
    for _ in range(100):
        v = rng.normal(size=3)
        v /= np.linalg.norm(v)
        analytic = flow_jacobian(BlochPoint(*v), params)
        numeric = np.zeros((3, 3))
        for k in range(3):
            plus = v.copy()
            plus[k] += h
            minus = v.copy()
            minus[k] -= h
            fp = np.array(_rhs_free(plus, params))
            fm = np.array(_rhs_free(minus, params))
            numeric[:, k] = (fp - fm) / (2 * h)
        assert np.max(np.abs(numeric - analytic)) < 1e-6 * max(1.0, params.rate)


def _rhs_free(v, params):
    # rhs evaluated off the sphere, matching the Jacobian's domain
    nx, d = params.rate, params.delta_eff
    return (
        nx * v[1] * v[2] - d * v[1],
        nx * v[0] * v[2] + d * v[0],
        -2.0 * nx * v[0] * v[1],
    )


def test_optimal_detuning():
    k0 = tat_k0()
    opt = optimal_detuning_sc(100, 1.0, k0)
    assert abs(opt.bare[0] / 100.0 - 0.3135) < 5e-4
    assert opt.bare[1] == -opt.bare[0]
    assert abs(opt.effective[0] / (100.0 / 3.0) - SQRT2_MINUS_1) < 1e-14
    assert opt.effective[1] == -opt.effective[0]


def test_optimal_time_values():
    assert abs(optimal_time_sc(100) - 0.1330) < 5e-4
    # frozen from the formula itself: 3 (1.9 + 0.55 ln 400) / 400
    assert abs(optimal_time_sc(400) - 0.0389648) < 5e-6
    ratio = optimal_time_sc(200) / optimal_time_sc(100)
    expected = (1.9 + 0.55 * math.log(200)) / (2 * (1.9 + 0.55 * math.log(100)))
    assert abs(ratio - expected) < 1e-12
    with pytest.raises(ValueError):
        optimal_time_sc(1)


@pytest.mark.parametrize("n", [50, 100, 400])
def test_quadrature_cross_check(n):
    assert abs(optimal_time_quadrature(n) - optimal_time_sc(n)) / optimal_time_sc(n) < 0.02


def test_sc_qfi_prediction():
    assert abs(sc_qfi_prediction(100) / 100**2 - 0.9706) < 1e-3


def test_separatrix_contains_saddles(params):
    north = separatrix_curves(params, "north", 101)
    assert np.min(np.linalg.norm(north - [0.0, 0.0, 1.0], axis=1)) < 1e-7
    south = separatrix_curves(params, "south", 101)
    assert np.min(np.linalg.norm(south - [0.0, 0.0, -1.0], axis=1)) < 1e-7
    with pytest.raises(ValueError):
        separatrix_curves(params, "equator")


def test_separatrix_energies(params):
    for branch, sign in (("north", 1.0), ("south", -1.0)):
        pts = separatrix_curves(params, branch, 87)
        for row in pts:
            assert abs(energy(row, params) - sign * params.delta_eff) < 1e-10


def test_separatrix_zero_detuning_great_circles():
    params0 = FlowParams(40, 1.0 / 3.0, 0.0)
    pts = separatrix_curves(params0, "north", 51)
    # d = 0: |A| = |B| everywhere, the two diagonal great circles through the poles
    assert np.max(np.abs(np.abs(pts[:, 0]) - np.abs(pts[:, 1]))) < 1e-12


def test_flow_stays_on_separatrix(params):
    pts = separatrix_curves(params, "north", 201)
    start = pts[len(pts) // 3]
    if abs(np.linalg.norm(start) - 1.0) > 1e-12:
        start = start / np.linalg.norm(start)
    traj = integrate_flow(BlochPoint(*start), params, 3.0 / params.rate, 0.004 / params.rate)
    e_saddle = params.delta_eff
    assert np.max(np.abs(traj.energies - e_saddle)) < 1e-5


def test_trajectory_csv(tmp_path, params):
    traj = integrate_flow(BlochPoint(0.0, 0.0, 1.0), params, 0.1 / params.rate, 0.005 / params.rate)
    path = tmp_path / "flow.csv"
    traj.to_csv(path)
    assert path.read_text().splitlines()[0] == "t,A,B,Z,E"
