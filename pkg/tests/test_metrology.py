import math

import numpy as np
import pytest

from spinforge.dynamics import evolve_static
from spinforge.metrology import (
    axis_distribution,
    cat_qfi_estimate,
    husimi,
    metrological_gain,
    qfi_along,
    qfim,
)
from spinforge.models import HamiltonianKind, HamiltonianSpec, build_hamiltonian, tat_k0
from spinforge.semiclassical import SQRT2_MINUS_1, optimal_time_sc
from spinforge.spincore import (
    DickeState,
    Direction,
    build_collective_ops,
    rotate,
    spin_coherent_state,
)


def _ghz(n):
    amps = np.zeros(n + 1, dtype=complex)
    amps[0] = amps[-1] = 1.0 / math.sqrt(2.0)
    return DickeState(n, amps)


def _tatnt_state(n, chi_t=None):
    ops = build_collective_ops(n)
    delta = SQRT2_MINUS_1 / (3.0 * tat_k0()) * n
    h = build_hamiltonian(HamiltonianSpec(kind=HamiltonianKind.TATNT, chi=1.0, delta=delta), ops)
    t = optimal_time_sc(n) if chi_t is None else chi_t
    return evolve_static(h, t, spin_coherent_state(n, 0.0)), ops


def test_qfim_pole_state():
    n = 24
    res = qfim(spin_coherent_state(n, 0.0))
    assert abs(res.f_q_max - n) < 1e-8
    assert res.degenerate  # transverse directions are equivalent


def test_qfim_ghz():
    n = 20
    res = qfim(_ghz(n))
    assert abs(res.f_q_max - n * n) < 1e-8
    assert abs(abs(res.n_max.nz) - 1.0) < 1e-8


def test_qfim_matrix_properties():
    n = 30
    state, ops = _tatnt_state(n, chi_t=0.2)
    res = qfim(state, ops)
    f = res.matrix
    assert np.max(np.abs(f - f.T)) < 1e-10
    assert np.min(np.linalg.eigvalsh(f)) > -1e-8
    assert res.f_q_max <= n * n + 1e-6
    # trace identity: tr F = 4 (J(J+1) - |<J>|^2)
    j = n / 2
    mean = np.array(
        [
            np.vdot(state.amplitudes, np.asarray(op) @ state.amplitudes).real
            for op in (ops.jx, ops.jy, ops.jz)
        ]
    )
    expected_trace = 4.0 * (j * (j + 1) - float(mean @ mean))
    assert abs(np.trace(f) - expected_trace) < 1e-8


def test_qfi_along_consistency():
    n = 16
    state, ops = _tatnt_state(n, chi_t=0.3)
    res = qfim(state, ops)
    assert abs(qfi_along(state, res.n_max) - res.f_q_max) < 1e-8
    for direction, f_diag in zip((Direction.x(), Direction.y(), Direction.z()), np.diag(res.matrix)):
        assert abs(qfi_along(state, direction) - f_diag) < 1e-10
    pole = spin_coherent_state(n, 0.0)
    assert abs(qfi_along(pole, Direction.z())) < 1e-10
    assert abs(qfi_along(pole, Direction.x()) - n) < 1e-10


def _rodrigues(axis, angle):
    k = axis / np.linalg.norm(axis)
    kx = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + math.sin(angle) * kx + (1 - math.cos(angle)) * (kx @ kx)


def test_qfim_rotation_invariance():
    n = 18
    state, ops = _tatnt_state(n, chi_t=0.25)
    res = qfim(state, ops)
    rng = np.random.default_rng(11)
    for _ in range(5):
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        angle = rng.uniform(0.2, 2.8)
        rotated = rotate(state, Direction.from_vector(axis), angle)
        res_rot = qfim(rotated, ops)
        assert abs(res_rot.f_q_max - res.f_q_max) < 1e-8 * res.f_q_max
        o = _rodrigues(axis, angle)
        overlap = abs(res_rot.n_max.as_array() @ (o @ res.n_max.as_array()))
        assert abs(overlap - 1.0) < 1e-8


def test_axis_distribution_basics():
    n = 12
    pole = spin_coherent_state(n, 0.0)
    dist = axis_distribution(pole, Direction.z())
    assert abs(dist.probabilities[0] - 1.0) < 1e-12
    south = axis_distribution(pole, Direction(0.0, 0.0, -1.0))
    assert abs(south.probabilities[-1] - 1.0) < 1e-12
    state, _ = _tatnt_state(10, chi_t=0.4)
    for axis in (Direction.x(), Direction.y(), Direction.from_vector([1, 1, 1])):
        d = axis_distribution(state, axis)
        assert abs(d.probabilities.sum() - 1.0) < 1e-10
        assert np.all(d.probabilities >= -1e-12)


def test_axis_distribution_x_matches_rotated_pole():
    n = 8
    xpole = spin_coherent_state(n, math.pi / 2, 0.0)
    dist = axis_distribution(xpole, Direction.x())
    assert abs(dist.probabilities[0] - 1.0) < 1e-10


def test_optimal_state_is_bimodal_along_y():
    n = 100
    state, _ = _tatnt_state(n, chi_t=0.132)
    dist = axis_distribution(state, Direction.y())
    p = dist.probabilities
    lobe = max(p[: n // 4].max(), p[-n // 4 :].max())
    center = p[2 * n // 5 : 3 * n // 5 + 1].max()
    assert center * 10.0 < lobe


def test_husimi_pole_and_ghz():
    n = 14
    field = husimi(spin_coherent_state(n, 0.0), (17, 16))
    assert np.all(field.values >= 0.0) and np.all(field.values <= 1.0 + 1e-12)
    i, k = np.unravel_index(np.argmax(field.values), field.values.shape)
    assert field.theta[i] == 0.0
    field_ghz = husimi(_ghz(n), (17, 16))
    top = np.sort(field_ghz.values.max(axis=1))[-2:]
    assert field_ghz.values[0].max() > 0.4 and field_ghz.values[-1].max() > 0.4
    assert np.all(top > 0.4)
    with pytest.raises(ValueError):
        husimi(spin_coherent_state(4, 0.0), (8, 8))


def test_husimi_cat_lobes_on_y_axis():
    n = 60
    state, _ = _tatnt_state(n)
    field = husimi(state, (33, 64))
    values = field.values.copy()
    i1, k1 = np.unravel_index(np.argmax(values), values.shape)
    assert abs(field.theta[i1] - math.pi / 2) < 0.25
    assert min(abs(field.phi[k1] - math.pi / 2), abs(field.phi[k1] - 3 * math.pi / 2)) < 0.25


def test_cat_qfi_estimate_ghz():
    n = 22
    assert abs(cat_qfi_estimate(_ghz(n)) - n * n) < 1e-9


def test_cat_qfi_estimate_half_spin_length():
    # equal weight on m = +-J/2 gives Zbar = 1/2 exactly
    n = 8
    amps = np.zeros(n + 1, dtype=complex)
    amps[2] = amps[-3] = 1.0 / math.sqrt(2.0)  # m = +-2 for J = 4
    state = DickeState(n, amps)
    assert abs(cat_qfi_estimate(state) - n * n / 4.0) < 1e-9


@pytest.mark.parametrize("n", [20, 60, 100])
def test_cat_qfi_estimate_tracks_true_qfi(n):
    state, ops = _tatnt_state(n)
    true = qfim(state, ops).f_q_max
    approx = cat_qfi_estimate(state, rotate_lobes_to_z=True)
    assert abs(approx - true) / true < 0.10


def test_metrological_gain():
    n = 100
    assert abs(metrological_gain(1.0 / math.sqrt(n), n)) < 1e-12
    # Heisenberg limit at N = 100: 20 log10(sqrt(N)) = 20 dB
    assert abs(metrological_gain(1.0 / n, n) - 20.0) < 1e-12
    assert abs(metrological_gain(2.0 / math.sqrt(n), n) + 6.0206) < 1e-3
    with pytest.raises(ValueError):
        metrological_gain(0.0, n)


def test_distribution_csv_round_trip(tmp_path):
    state, _ = _tatnt_state(10, chi_t=0.3)
    dist = axis_distribution(state, Direction.y())
    path = tmp_path / "dist.csv"
    dist.to_csv(path)
    header, *rows = path.read_text().strip().splitlines()
    assert header == "m,P"
    assert len(rows) == 11
    field = husimi(state, (16, 16))
    hpath = tmp_path / "husimi.csv"
    field.to_csv(hpath)
    assert hpath.read_text().splitlines()[0] == "theta,phi,Q"
