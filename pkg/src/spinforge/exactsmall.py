"""Brute-force oracle in the full 2^N product space (N <= 12).

Everything here is rebuilt from single-particle Pauli operators and evolved
with scipy's scaling-and-squaring matrix exponential, a numerically
independent route from the Dicke-basis pipeline (eigendecomposition), so the
two can validate each other.  Performance is explicitly not a goal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from .models import HamiltonianKind, HamiltonianSpec, floquet_coefficients
from .spincore import DickeState, Direction, _readonly

MAX_FULL_PARTICLES = 12

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class FullState:
    """State over all 2^N product configurations; bit j set = particle j down."""

    n_particles: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if not 1 <= self.n_particles <= MAX_FULL_PARTICLES:
            raise ValueError(f"full simulation supports 1 <= N <= {MAX_FULL_PARTICLES}")
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (2**self.n_particles,):
            raise ValueError("amplitude vector must have length 2^N")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state is not normalized: |psi| = {norm!r}")
        object.__setattr__(self, "amplitudes", _readonly(amps))


@lru_cache(maxsize=64)
def full_collective_op(n_particles: int, mu: str) -> np.ndarray:
    """J_mu = (1/2) sum_k sigma_mu^(k) assembled from Kronecker products."""
    if not 1 <= n_particles <= MAX_FULL_PARTICLES:
        raise ValueError(f"full simulation supports 1 <= N <= {MAX_FULL_PARTICLES}")
    sigma = _PAULI[mu]
    eye = np.eye(2, dtype=complex)
    total = np.zeros((2**n_particles, 2**n_particles), dtype=complex)
    for site in range(n_particles):
        op = np.array([[1.0 + 0j]])
        for k in range(n_particles):
            op = np.kron(op, sigma if k == site else eye)
        total += 0.5 * op
    return _readonly(total)


def full_axis_op(n_particles: int, direction: Direction) -> np.ndarray:
    return (
        direction.nx * full_collective_op(n_particles, "x")
        + direction.ny * full_collective_op(n_particles, "y")
        + direction.nz * full_collective_op(n_particles, "z")
    )


@lru_cache(maxsize=32)
def _sector_indices(n_particles: int) -> tuple[tuple[np.ndarray, ...], np.ndarray]:
    """Product-basis indices grouped by flip count k, and sqrt(C(N,k))."""
    counts = np.array([bin(s).count("1") for s in range(2**n_particles)])
    groups = tuple(np.flatnonzero(counts == k) for k in range(n_particles + 1))
    weights = np.array(
        [math.sqrt(math.comb(n_particles, k)) for k in range(n_particles + 1)]
    )
    return groups, weights


def symmetric_embed(state: DickeState) -> FullState:
    """Expand |J, m> into the equal-weight superposition over its permutations."""
    n = state.n_particles
    groups, weights = _sector_indices(n)
    amps = np.zeros(2**n, dtype=complex)
    for k in range(n + 1):
        amps[groups[k]] = state.amplitudes[k] / weights[k]
    return FullState(n, amps)


def project_back(full: FullState) -> tuple[DickeState, float]:
    """Project onto the symmetric sector; returns (state, leaked norm^2).

    Collective Hamiltonians preserve permutation symmetry exactly, so any
    leakage beyond roundoff flags a bug in the evolution.
    """
    n = full.n_particles
    groups, weights = _sector_indices(n)
    dicke = np.array(
        [np.sum(full.amplitudes[groups[k]]) / weights[k] for k in range(n + 1)]
    )
    leakage = float(np.linalg.norm(full.amplitudes) ** 2 - np.linalg.norm(dicke) ** 2)
    dicke = dicke / np.linalg.norm(dicke)
    return DickeState(n, dicke), leakage


def full_hamiltonian(spec: HamiltonianSpec, n_particles: int) -> np.ndarray:
    """Static-model matrix in the product space.

    Assembled here from Pauli sums, deliberately not shared with the
    Dicke-basis builder, so formula transcription errors surface.
    """
    kind = HamiltonianKind(spec.kind)
    jz = full_collective_op(n_particles, "z")
    ja = full_axis_op(n_particles, Direction.equatorial(spec.alpha))
    if kind is HamiltonianKind.OAT:
        return spec.chi * (jz @ jz)
    if kind is HamiltonianKind.OATNT:
        return spec.chi * (jz @ jz) + spec.omega0 * ja
    jb = full_axis_op(n_particles, Direction.equatorial(spec.alpha + math.pi / 2.0))
    if kind in (HamiltonianKind.TAT, HamiltonianKind.TATNT, HamiltonianKind.ANTI_TATNT):
        coeff = floquet_coefficients(spec.chi, spec.delta)
        h = coeff.chi_eff * (jb @ jb - ja @ ja) + coeff.delta_eff * jz
        return -h if kind is HamiltonianKind.ANTI_TATNT else h
    raise ValueError(f"oracle supports static kinds only, got {spec.kind!r}")


def full_evolve(h: np.ndarray, t: float, state: FullState) -> FullState:
    """exp(-iHt)|psi> via scipy's Pade scaling-and-squaring path."""
    u = expm(-1j * t * np.asarray(h))
    return FullState(state.n_particles, u @ state.amplitudes)


def full_rotate(state: FullState, axis: Direction, angle: float) -> FullState:
    return full_evolve(full_axis_op(state.n_particles, axis), angle, state)


def full_qfim(state: FullState) -> np.ndarray:
    """3x3 quantum Fisher information matrix from the product-space operators."""
    psi = state.amplitudes
    jpsi = [full_collective_op(state.n_particles, mu) @ psi for mu in "xyz"]
    first = np.array([np.vdot(psi, v).real for v in jpsi])
    f = np.empty((3, 3))
    for a in range(3):
        for b in range(3):
            f[a, b] = 4.0 * np.vdot(jpsi[a], jpsi[b]).real - 4.0 * first[a] * first[b]
    return f


def full_readout_delta_phi(
    initial: FullState,
    prep_spec: HamiltonianSpec,
    readout_spec: HamiltonianSpec,
    prep_time: float,
    readout_time: float,
    sensing_dir: Direction,
    phase: float,
) -> float:
    """Optimal-direction phase uncertainty of the echo chain, all in 2^N space."""
    n = initial.n_particles
    u1 = expm(-1j * prep_time * full_hamiltonian(prep_spec, n))
    u2 = expm(-1j * readout_time * full_hamiltonian(readout_spec, n))
    r = expm(-1j * phase * full_axis_op(n, sensing_dir))
    w = u2 @ r @ u1
    psi = initial.amplitudes
    j_ops = [np.asarray(full_collective_op(n, mu)) for mu in "xyz"]
    a_vecs = [u1.conj().T @ (j @ (u1 @ psi)) for j in j_ops]
    b_vecs = [w.conj().T @ (j @ (w @ psi)) for j in j_ops]
    m = np.empty((3, 3))
    q = np.empty((3, 3))
    moments = np.array([np.vdot(psi, b).real for b in b_vecs])
    for a in range(3):
        for b in range(3):
            m[a, b] = -2.0 * np.vdot(a_vecs[a], b_vecs[b]).imag
            q[a, b] = np.vdot(b_vecs[a], b_vecs[b]).real - moments[a] * moments[b]
    q = 0.5 * (q + q.T)
    w_q, v_q = np.linalg.eigh(q)
    keep = w_q > 1e-10 * np.trace(q)
    q_pinv = (v_q[:, keep] / w_q[keep]) @ v_q[:, keep].T
    k = m @ q_pinv @ m.T
    nvec = sensing_dir.as_array()
    return 1.0 / math.sqrt(float(nvec @ k @ nvec))
