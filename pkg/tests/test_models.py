import json
import math

import numpy as np
import pytest
from scipy.special import jv

from spinforge.models import (
    FloquetCoefficients,
    HamiltonianKind,
    HamiltonianSpec,
    bessel_j,
    build_hamiltonian,
    floquet_coefficients,
    fourier_component,
    interaction_picture_hamiltonian,
    solve_tat_ratio,
    tat_k0,
)
from spinforge.spincore import Direction, build_collective_ops, j_axis


def _series_j0(x: float) -> float:
    # independent power-series evaluation used only as a test oracle
    term, total = 1.0, 1.0
    for k in range(1, 60):
        term *= -(x * x / 4.0) / (k * k)
        total += term
    return total


def test_bessel_trivial_values():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(3, 0.0) == 0.0


def test_bessel_first_zero():
    # bracket the first root of the independent series, then compare
    lo, hi = 2.0, 3.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _series_j0(mid) > 0:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    assert abs(root - 2.404826) < 1e-5
    assert abs(bessel_j(0, 2.404826)) < 1e-5


def test_bessel_tat_working_point():
    assert abs(bessel_j(0, 3.2524) + 1.0 / 3.0) < 2e-3


def test_bessel_against_reference_table():
    xs = np.concatenate([np.linspace(0.0, 11.5, 24), np.linspace(12.0, 100.0, 23)])
    for order in range(0, 21, 2):
        for x in xs:
            assert abs(bessel_j(order, float(x)) - jv(order, x)) < 1e-12


def test_bessel_negative_argument_parity():
    assert abs(bessel_j(1, -3.0) + bessel_j(1, 3.0)) < 1e-14
    assert abs(bessel_j(2, -3.0) - bessel_j(2, 3.0)) < 1e-14


def test_bessel_rejects_out_of_range():
    with pytest.raises(ValueError):
        bessel_j(21, 1.0)
    with pytest.raises(ValueError):
        bessel_j(-1, 1.0)
    with pytest.raises(ValueError):
        bessel_j(0, 101.0)


def test_tat_ratio():
    r = solve_tat_ratio()
    assert abs(r - 1.6262) < 5e-4
    assert abs(bessel_j(0, 2 * r) + 1.0 / 3.0) < 1e-9
    # evaluated at the working point; the K0 value the detuning map uses
    assert abs(tat_k0() - 0.4404) < 1e-3


def test_floquet_coefficients_invariants():
    c = floquet_coefficients(chi=1.0, delta=2.0)
    assert abs(c.chi_eff - 1.0 / 3.0) < 1e-15
    assert abs(c.delta_eff - c.k0 * 2.0) < 1e-15
    assert -0.4028 <= c.l0 <= 1.0
    with pytest.raises(ValueError):
        floquet_coefficients(1.0, 0.0, ratio=2.5)
    with pytest.raises(ValueError):
        FloquetCoefficients(ratio=0.5, l0=1.5, k0=0.9, chi_eff=1 / 3, delta_eff=0.0)


def test_spec_validation():
    with pytest.raises(ValueError):
        HamiltonianSpec(kind=HamiltonianKind.DRIVEN_FE, omega=0.0, omega0=1.0)
    with pytest.raises(ValueError):
        HamiltonianSpec(kind=HamiltonianKind.DRIVEN_FE, omega=1.0, omega0=-1.0)
    with pytest.raises(ValueError):
        HamiltonianSpec(kind=HamiltonianKind.OAT, delta=0.5)
    with pytest.raises(ValueError):
        HamiltonianSpec(kind=HamiltonianKind.TAT, omega0=0.5)


def test_spec_json_round_trip():
    spec = HamiltonianSpec(
        kind=HamiltonianKind.DRIVEN_FE, chi=1.0, delta=31.35, omega0=400.0, omega=250.0, alpha=0.1
    )
    data = json.loads(spec.to_json())
    assert set(data) == {"kind", "chi", "delta", "omega0", "omega", "alpha"}
    assert data["kind"] == "DRIVEN_FE"
    assert HamiltonianSpec.from_json(spec.to_json()) == spec
    with pytest.raises(ValueError):
        HamiltonianSpec.from_dict({"kind": "OAT", "bogus": 1})


@pytest.fixture(scope="module")
def ops12():
    return build_collective_ops(12)


def test_tatnt_reduces_to_tat(ops12):
    tat = build_hamiltonian(HamiltonianSpec(kind=HamiltonianKind.TAT, chi=1.0), ops12)
    tatnt = build_hamiltonian(
        HamiltonianSpec(kind=HamiltonianKind.TATNT, chi=1.0, delta=0.0), ops12
    )
    assert np.array_equal(tat, tatnt)


def test_anti_tatnt_is_exact_negation(ops12):
    spec = HamiltonianSpec(kind=HamiltonianKind.TATNT, chi=1.0, delta=3.0, alpha=0.4)
    anti = HamiltonianSpec(kind=HamiltonianKind.ANTI_TATNT, chi=1.0, delta=3.0, alpha=0.4)
    assert np.array_equal(
        build_hamiltonian(anti, ops12), -build_hamiltonian(spec, ops12)
    )


def test_tatnt_effective_couplings(ops12):
    delta = 2.7
    h = build_hamiltonian(
        HamiltonianSpec(kind=HamiltonianKind.TATNT, chi=1.0, delta=delta), ops12
    )
    jb = j_axis(ops12, Direction.y())
    ja = j_axis(ops12, Direction.x())
    expected = (1.0 / 3.0) * (jb @ jb - ja @ ja) + tat_k0() * delta * np.asarray(ops12.jz)
    assert np.max(np.abs(h - expected)) < 1e-12


def test_static_hamiltonians_hermitian(ops12):
    specs = [
        HamiltonianSpec(kind=HamiltonianKind.OAT, chi=1.0),
        HamiltonianSpec(kind=HamiltonianKind.OATNT, chi=1.0, omega0=2.0, alpha=0.3),
        HamiltonianSpec(kind=HamiltonianKind.TAT, chi=1.0),
        HamiltonianSpec(kind=HamiltonianKind.TATNT, chi=1.0, delta=1.0, alpha=0.3),
        HamiltonianSpec(kind=HamiltonianKind.ANTI_TATNT, chi=1.0, delta=1.0),
        HamiltonianSpec(
            kind=HamiltonianKind.EFFECTIVE_H0I, chi=1.0, delta=1.0, omega0=16.3, omega=10.0
        ),
    ]
    for spec in specs:
        h = build_hamiltonian(spec, ops12)
        assert np.max(np.abs(h - h.conj().T)) < 1e-12


def test_driven_limits(ops12):
    # drive off: the time-dependent model is plain twisting plus detuning
    spec = HamiltonianSpec(kind=HamiltonianKind.DRIVEN_FE, chi=1.0, delta=0.7, omega0=0.0, omega=5.0)
    h_t = build_hamiltonian(spec, ops12)
    static = np.asarray(ops12.jz) @ ops12.jz + 0.7 * np.asarray(ops12.jz)
    for t in (0.0, 0.3, 1.7):
        assert np.max(np.abs(h_t(t) - static)) < 1e-12
    # zero detuning at the cosine peak reproduces twist-and-turn
    spec2 = HamiltonianSpec(kind=HamiltonianKind.DRIVEN_FE, chi=1.0, omega0=2.0, omega=5.0, alpha=0.2)
    oatnt = build_hamiltonian(
        HamiltonianSpec(kind=HamiltonianKind.OATNT, chi=1.0, omega0=2.0, alpha=0.2), ops12
    )
    assert np.max(np.abs(build_hamiltonian(spec2, ops12)(0.0) - oatnt)) < 1e-12


@pytest.fixture(scope="module")
def driven_spec():
    ratio = solve_tat_ratio()
    omega = 2.0 * math.pi * 150.0
    return HamiltonianSpec(
        kind=HamiltonianKind.DRIVEN_FE,
        chi=1.0,
        delta=3.7,
        omega0=ratio * omega,
        omega=omega,
        alpha=0.0,
    )


def test_fourier_component_symmetries(ops12, driven_spec):
    h0 = fourier_component(0, driven_spec, ops12)
    h0i = build_hamiltonian(
        HamiltonianSpec(
            kind=HamiltonianKind.EFFECTIVE_H0I,
            chi=driven_spec.chi,
            delta=driven_spec.delta,
            omega0=driven_spec.omega0,
            omega=driven_spec.omega,
        ),
        ops12,
    )
    assert np.max(np.abs(h0 - h0i)) < 1e-12
    h1 = fourier_component(1, driven_spec, ops12)
    hm1 = fourier_component(-1, driven_spec, ops12)
    assert np.max(np.abs(hm1 + h1)) < 1e-12  # odd order: H_-1 = -H_1
    h2 = fourier_component(2, driven_spec, ops12)
    hm2 = fourier_component(-2, driven_spec, ops12)
    assert np.max(np.abs(hm2 - h2)) < 1e-12  # even order: H_-2 = H_2
    for n in (1, 2, 3):
        hn = fourier_component(n, driven_spec, ops12)
        hmn = fourier_component(-n, driven_spec, ops12)
        assert np.max(np.abs(hmn - hn.conj().T)) < 1e-12
    with pytest.raises(ValueError):
        fourier_component(11, driven_spec, ops12)


def test_fourier_reconstruction(ops12, driven_spec):
    # Components through |n| = 10 rebuild the rotating-frame Hamiltonian to
    # 1e-3 relative; at the twisting working point the Bessel tail above
    # |n| = 5 is still at the percent level, so the cap matters.
    comps = {n: fourier_component(n, driven_spec, ops12) for n in range(-10, 11)}
    for k in range(16):
        t = k / 16.0 * 2.0 * math.pi / driven_spec.omega
        exact = interaction_picture_hamiltonian(driven_spec, ops12, t)
        series = sum(comps[n] * np.exp(1j * n * driven_spec.omega * t) for n in comps)
        err = np.linalg.norm(series - exact) / np.linalg.norm(exact)
        assert err < 1e-3
