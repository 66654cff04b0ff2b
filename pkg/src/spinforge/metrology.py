"""Quantum Fisher information and state characterization tools.

For a pure state the QFI along direction n is 4 Var(J_n); collecting the
second moments over the three generators gives the 3x3 QFI matrix whose top
eigenpair is the full metrological potential F_Q^max and the optimal sensing
direction.  Also provides projection distributions along arbitrary axes, the
Husimi function on the Bloch sphere, the spin-cat approximation of the QFI,
and the dB metrological gain relative to the standard quantum limit.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .spincore import (
    CollectiveOps,
    DickeState,
    Direction,
    build_collective_ops,
    j_axis,
    rotate,
)

_DEGENERACY_GAP = 1e-9


@dataclass(frozen=True)
class QfimResult:
    """Eigensystem of the QFI matrix, eigenvalues descending."""

    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: tuple[Direction, Direction, Direction]
    f_q_max: float
    n_max: Direction
    degenerate: bool


@dataclass(frozen=True)
class AxisDistribution:
    """Probabilities over the J_axis eigenstates, m descending from +J."""

    axis: Direction
    probabilities: np.ndarray

    def __post_init__(self) -> None:
        p = np.asarray(self.probabilities, dtype=float)
        if np.any(p < -1e-12):
            raise ValueError("negative probability")
        if abs(p.sum() - 1.0) > 1e-10:
            raise ValueError(f"probabilities sum to {p.sum()!r}")
        p = np.ascontiguousarray(p)
        p.flags.writeable = False
        object.__setattr__(self, "probabilities", p)

    @property
    def n_particles(self) -> int:
        return len(self.probabilities) - 1

    def m_values(self) -> np.ndarray:
        j = self.n_particles / 2.0
        return j - np.arange(self.n_particles + 1)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["m", "P"])
            for m, p in zip(self.m_values(), self.probabilities):
                writer.writerow([repr(float(m)), repr(float(p))])


@dataclass(frozen=True)
class HusimiField:
    """Q(theta, phi) = |<theta,phi|psi>|^2 sampled on a rectangular grid."""

    theta: np.ndarray
    phi: np.ndarray
    values: np.ndarray

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["theta", "phi", "Q"])
            for i, th in enumerate(self.theta):
                for k, ph in enumerate(self.phi):
                    writer.writerow(
                        [repr(float(th)), repr(float(ph)), repr(float(self.values[i, k]))]
                    )


def _fix_sign(vec: np.ndarray) -> np.ndarray:
    mags = np.abs(vec)
    candidates = np.flatnonzero(mags >= mags.max() - 1e-12)
    lead = vec[candidates[0]]
    return -vec if lead < 0 else vec


def qfim(state: DickeState, ops: CollectiveOps | None = None) -> QfimResult:
    """QFI matrix F_ab = 2<{J_a, J_b}> - 4<J_a><J_b> and its eigensystem.

    The top eigenvector's sign is fixed (largest-magnitude component positive;
    ties resolve to the first) so parameter sweeps stay reproducible; a top
    gap below 1e-9 * F_Q^max raises the ``degenerate`` flag.
    """
    if ops is None:
        ops = build_collective_ops(state.n_particles)
    psi = state.amplitudes
    jpsi = [np.asarray(op) @ psi for op in (ops.jx, ops.jy, ops.jz)]
    first = np.array([np.vdot(psi, v).real for v in jpsi])
    f = np.empty((3, 3))
    for a in range(3):
        for b in range(a, 3):
            f[a, b] = f[b, a] = (
                4.0 * np.vdot(jpsi[a], jpsi[b]).real - 4.0 * first[a] * first[b]
            )
    w, v = np.linalg.eigh(f)
    order = np.argsort(w)[::-1]
    w = w[order]
    vecs = tuple(
        Direction.from_vector(_fix_sign(v[:, idx])) for idx in order
    )
    degenerate = (w[0] - w[1]) < _DEGENERACY_GAP * max(w[0], 1e-300)
    return QfimResult(
        matrix=f,
        eigenvalues=w,
        eigenvectors=vecs,
        f_q_max=float(w[0]),
        n_max=vecs[0],
        degenerate=bool(degenerate),
    )


def qfi_along(state: DickeState, direction: Direction) -> float:
    """4 Var(J_n) for one sensing direction; equals n^T F n."""
    ops = build_collective_ops(state.n_particles)
    jn = j_axis(ops, direction)
    vec = jn @ state.amplitudes
    mean = np.vdot(state.amplitudes, vec).real
    return float(4.0 * (np.vdot(vec, vec).real - mean * mean))


def axis_distribution(state: DickeState, axis: Direction) -> AxisDistribution:
    """Populations over the eigenstates of J_axis.

    The state is rotated so the requested axis lands on +z (about the
    normalized axis x z cross product; a pi rotation about x for axis = -z),
    after which the Dicke amplitudes are the sought projections.
    """
    cross = np.cross(axis.as_array(), [0.0, 0.0, 1.0])
    norm = np.linalg.norm(cross)
    if norm < 1e-12:
        if axis.nz > 0:
            rotated = state
        else:
            rotated = rotate(state, Direction.x(), math.pi)
    else:
        angle = math.acos(max(-1.0, min(1.0, axis.nz)))
        rotated = rotate(state, Direction.from_vector(cross), angle)
    return AxisDistribution(axis, np.abs(rotated.amplitudes) ** 2)


def husimi(state: DickeState, grid_resolution: int | tuple[int, int] = 64) -> HusimiField:
    """Husimi distribution on a uniform (theta, phi) grid, resolution >= 16x16.

    Overlaps use log-space binomial amplitudes so large N stays stable; the
    phi sum is one matrix product over the azimuthal phase factors.
    """
    if isinstance(grid_resolution, int):
        n_theta = n_phi = grid_resolution
    else:
        n_theta, n_phi = grid_resolution
    if n_theta < 16 or n_phi < 16:
        raise ValueError("grid resolution must be at least 16x16")
    n = state.n_particles
    k = np.arange(n + 1)
    log_binom = np.array(
        [
            0.5 * (math.lgamma(n + 1) - math.lgamma(i + 1) - math.lgamma(n - i + 1))
            for i in range(n + 1)
        ]
    )
    theta = np.linspace(0.0, math.pi, n_theta)
    phi = np.linspace(0.0, 2.0 * math.pi, n_phi, endpoint=False)
    c = np.cos(theta / 2.0)
    s = np.sin(theta / 2.0)
    with np.errstate(divide="ignore"):
        log_mag = (
            log_binom[None, :]
            + (n - k)[None, :] * np.log(np.where(c > 0, c, 1.0))[:, None]
            + k[None, :] * np.log(np.where(s > 0, s, 1.0))[:, None]
        )
    mag = np.exp(log_mag)
    mag[c <= 0, :] = 0.0
    mag[c <= 0, n] = 1.0
    mag[s <= 0, :] = 0.0
    mag[s <= 0, 0] = 1.0
    # <SCS(theta,phi)|psi> = sum_k mag_k e^{-ik phi} psi_k
    phase = np.exp(-1j * np.outer(k, phi))
    overlap = mag @ (state.amplitudes[:, None] * phase)
    return HusimiField(theta=theta, phi=phi, values=np.abs(overlap) ** 2)


def cat_qfi_estimate(state: DickeState, rotate_lobes_to_z: bool = False) -> float:
    """Spin-cat approximation N^2 Zbar^2 with Zbar = (2/N) sum |m| P_m.

    Expects the superposition lobes along +-z; pass ``rotate_lobes_to_z`` for
    raw twisting output with lobes on the y-axis, which applies the
    exp(-i Jx pi/2) alignment rotation first.
    """
    if rotate_lobes_to_z:
        state = rotate(state, Direction.x(), math.pi / 2.0)
    n = state.n_particles
    p = np.abs(state.amplitudes) ** 2
    zbar = (2.0 / n) * float(np.sum(np.abs(state.m_values()) * p))
    return n * n * zbar * zbar


def metrological_gain(delta_phi: float, n_particles: int) -> float:
    """Gain in dB over the standard quantum limit, 20 log10((1/sqrt N)/dphi)."""
    if delta_phi <= 0.0:
        raise ValueError("delta_phi must be positive")
    return 20.0 * math.log10((1.0 / math.sqrt(n_particles)) / delta_phi)
