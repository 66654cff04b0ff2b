import math

import numpy as np
import pytest

from spinforge import exactsmall as ex
from spinforge.metrology import qfim
from spinforge.models import HamiltonianKind, HamiltonianSpec
from spinforge.spincore import Direction, build_collective_ops, rotate, spin_coherent_state


def test_single_particle_ops_are_half_paulis():
    assert np.allclose(ex.full_collective_op(1, "z"), np.diag([0.5, -0.5]))
    assert np.allclose(ex.full_collective_op(1, "x"), [[0, 0.5], [0.5, 0]])


def test_three_particle_jz_spectrum():
    eig = np.sort(np.linalg.eigvalsh(ex.full_collective_op(3, "z")))
    assert np.allclose(eig, [-1.5, -0.5, -0.5, -0.5, 0.5, 0.5, 0.5, 1.5])


def test_size_guard():
    with pytest.raises(ValueError):
        ex.full_collective_op(13, "z")


@pytest.mark.parametrize("n", [2, 3, 4])
def test_symmetric_restriction_reproduces_dicke_ops(n):
    ops = build_collective_ops(n)
    groups, weights = ex._sector_indices(n)
    dim = n + 1
    basis = np.zeros((2**n, dim), dtype=complex)
    for k in range(dim):
        basis[groups[k], k] = 1.0 / weights[k]
    for mu, dicke in (("x", ops.jx), ("y", ops.jy), ("z", ops.jz)):
        restricted = basis.conj().T @ ex.full_collective_op(n, mu) @ basis
        assert np.max(np.abs(restricted - dicke)) < 1e-12


def test_pole_state_maps_to_all_up():
    n = 5
    full = ex.symmetric_embed(spin_coherent_state(n, 0.0))
    assert abs(full.amplitudes[0] - 1.0) < 1e-12
    assert np.all(np.abs(full.amplitudes[1:]) < 1e-12)


def test_embed_round_trip():
    n = 6
    state = spin_coherent_state(n, 1.2, 0.7)
    back, leakage = ex.project_back(ex.symmetric_embed(state))
    assert back.fidelity(state) > 1 - 1e-12
    assert abs(leakage) < 1e-12


def test_full_evolution_projects_onto_dicke_evolution():
    from spinforge.dynamics import evolve_static
    from spinforge.models import build_hamiltonian

    n = 4
    spec = HamiltonianSpec(kind=HamiltonianKind.TATNT, chi=1.0, delta=0.4 * n, alpha=0.1)
    state = spin_coherent_state(n, 0.4, 0.9)
    full = ex.full_evolve(ex.full_hamiltonian(spec, n), 0.7, ex.symmetric_embed(state))
    projected, leakage = ex.project_back(full)
    dicke = evolve_static(build_hamiltonian(spec, build_collective_ops(n)), 0.7, state)
    assert projected.fidelity(dicke) > 1 - 1e-10
    assert leakage < 1e-12


def test_rotation_convention_against_oracle():
    n = 5
    rng = np.random.default_rng(9)
    state = spin_coherent_state(n, 0.8, 0.3)
    for _ in range(5):
        axis = Direction.from_vector(rng.normal(size=3))
        angle = rng.uniform(0.1, 3.0)
        dicke = rotate(state, axis, angle)
        full = ex.full_rotate(ex.symmetric_embed(state), axis, angle)
        projected, leakage = ex.project_back(full)
        assert projected.fidelity(dicke) > 1 - 1e-12
        assert leakage < 1e-12


def test_full_qfim_matches_dicke():
    n = 4
    state = spin_coherent_state(n, 1.0, 0.2)
    f_full = ex.full_qfim(ex.symmetric_embed(state))
    f_dicke = qfim(state, build_collective_ops(n)).matrix
    assert np.max(np.abs(f_full - f_dicke)) < 1e-8
