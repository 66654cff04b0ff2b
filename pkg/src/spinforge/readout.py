"""Interaction-based readout: echo chains, response matrices, detection noise.

The measured chain is U2 R_n(phi) U1 |psi_i>, with U2 ideally the exact
negation of U1 (the twist-and-turn pair at alpha and alpha + pi/2 with
flipped detuning).  Sensitivity for a measurement along m after the chain
follows from the response matrix M and covariance Q of the Heisenberg-picture
operators; maximizing over m gives delta_phi = 1/sqrt(n^T M Q^-1 M^T n) with
the optimum at m ~ Q^-1 M^T n.  Detection noise is the row-normalized
Gaussian kernel over the outcome window m in [-J, J].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dynamics import PropagationSettings, evolve_driven, evolve_static
from .metrology import AxisDistribution
from .models import HamiltonianKind, HamiltonianSpec, build_hamiltonian
from .spincore import (
    CollectiveOps,
    DickeState,
    Direction,
    build_collective_ops,
    hermitian_eigensystem,
    j_axis,
    rotate,
)


class DegenerateReadoutError(RuntimeError):
    """Covariance matrix has no informative directions."""


class ZeroResponseError(RuntimeError):
    """The chain produces no first-order signal along the sensing direction."""


@dataclass(frozen=True)
class ReadoutPlan:
    prep_spec: HamiltonianSpec
    readout_spec: HamiltonianSpec
    prep_time: float
    readout_time: float
    sensing_dir: Direction
    phase: float
    settings: PropagationSettings = PropagationSettings()

    def __post_init__(self) -> None:
        if self.phase == 0.0:
            raise ValueError("phase must be nonzero; the response loses the sensing direction at phi = 0")
        if self.prep_time < 0.0 or self.readout_time < 0.0:
            raise ValueError("evolution times must be non-negative")


@dataclass(frozen=True)
class ResponseMatrices:
    m_matrix: np.ndarray
    q_matrix: np.ndarray
    k_matrix: np.ndarray

    def __post_init__(self) -> None:
        q = np.asarray(self.q_matrix)
        if np.max(np.abs(q - q.T)) > 1e-9:
            raise ValueError("covariance matrix must be symmetric")


@dataclass(frozen=True)
class NoiseModel:
    """Gaussian detection noise of width sigma, in units of the outcome m."""

    sigma: float = 0.0

    def __post_init__(self) -> None:
        if self.sigma < 0.0:
            raise ValueError("sigma must be non-negative")


@dataclass(frozen=True)
class OptimalMeasurement:
    direction: Direction
    delta_phi: float
    delta_phi_error_propagation: float


@dataclass(frozen=True)
class PulseSequence:
    """x/y pulse pair turning a Jz generator into J_target."""

    theta_pulse: float
    phi_pulse: float
    target: Direction

    def __post_init__(self) -> None:
        # Closed-form axis realized by e^{i theta Jx} e^{i phi Jy} Jz e^{-...}.
        reconstructed = np.array(
            [
                -math.sin(self.phi_pulse),
                math.sin(self.theta_pulse) * math.cos(self.phi_pulse),
                math.cos(self.theta_pulse) * math.cos(self.phi_pulse),
            ]
        )
        if np.linalg.norm(reconstructed - self.target.as_array()) > 1e-9:
            raise ValueError("pulse angles do not reproduce the target axis")


def _apply_spec(
    spec: HamiltonianSpec,
    t: float,
    state: DickeState,
    ops: CollectiveOps,
    settings: PropagationSettings,
    inverse: bool = False,
) -> DickeState:
    if HamiltonianKind(spec.kind) is HamiltonianKind.DRIVEN_FE:
        if inverse:
            raise NotImplementedError("inverse driven propagation is not needed here")
        return evolve_driven(spec, t, state, settings).final_state
    h = build_hamiltonian(spec, ops)
    return evolve_static(h, -t if inverse else t, state)


def final_state(initial: DickeState, plan: ReadoutPlan) -> DickeState:
    """U2 R_n(phi) U1 |psi_i> with the plan's propagators."""
    ops = build_collective_ops(initial.n_particles)
    psi = _apply_spec(plan.prep_spec, plan.prep_time, initial, ops, plan.settings)
    psi = rotate(psi, plan.sensing_dir, plan.phase)
    return _apply_spec(plan.readout_spec, plan.readout_time, psi, ops, plan.settings)


def _unitary_matrix(
    spec: HamiltonianSpec, t: float, ops: CollectiveOps, settings: PropagationSettings
) -> np.ndarray:
    """Dense propagator for a plan leg.

    Static legs use the cached eigensystem.  Driven legs propagate the full
    identity column-by-column through the split-step scheme, which is exact
    but costly; acceptance-scale chains only need static legs.
    """
    if HamiltonianKind(spec.kind) is HamiltonianKind.DRIVEN_FE:
        dim = ops.n_particles + 1
        cols = []
        for i in range(dim):
            e = np.zeros(dim, dtype=complex)
            e[i] = 1.0
            cols.append(
                evolve_driven(spec, t, DickeState(ops.n_particles, e), settings)
                .final_state.amplitudes
            )
        return np.column_stack(cols)
    w, v = hermitian_eigensystem(build_hamiltonian(spec, ops))
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def response_matrices(initial: DickeState, plan: ReadoutPlan) -> ResponseMatrices:
    """Response M, covariance Q, and K = M Q^-1 M^T for the readout chain.

    Heisenberg-picture operators are built by explicit matrix conjugation
    with the dense chain unitaries, exact for any nonzero encoding phase.
    Q is inverted through its eigensystem with eigenvalues below
    1e-10 * tr(Q) clipped (pseudo-inverse); if nothing survives the clip the
    readout is degenerate and an error is raised.
    """
    ops = build_collective_ops(initial.n_particles)
    u1 = _unitary_matrix(plan.prep_spec, plan.prep_time, ops, plan.settings)
    u2 = _unitary_matrix(plan.readout_spec, plan.readout_time, ops, plan.settings)
    w_r, v_r = hermitian_eigensystem(j_axis(ops, plan.sensing_dir))
    r = (v_r * np.exp(-1j * w_r * plan.phase)) @ v_r.conj().T
    w = u2 @ r @ u1

    psi = initial.amplitudes
    j_ops = (np.asarray(ops.jx), np.asarray(ops.jy), np.asarray(ops.jz))
    a_vecs = [u1.conj().T @ (j @ (u1 @ psi)) for j in j_ops]
    b_vecs = [w.conj().T @ (j @ (w @ psi)) for j in j_ops]
    moments = []
    for b in b_vecs:
        val = complex(np.vdot(psi, b))
        if abs(val.imag) >= 1e-9:
            raise ValueError(f"readout expectation not real: {val!r}")
        moments.append(val.real)
    m = np.empty((3, 3))
    q = np.empty((3, 3))
    for a in range(3):
        for b in range(3):
            m[a, b] = -2.0 * complex(np.vdot(a_vecs[a], b_vecs[b])).imag
            q[a, b] = complex(np.vdot(b_vecs[a], b_vecs[b])).real - moments[a] * moments[b]
    q = 0.5 * (q + q.T)
    k = m @ _clipped_pinv(q) @ m.T
    return ResponseMatrices(m_matrix=m, q_matrix=q, k_matrix=k)


def _clipped_pinv(q: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(q)
    keep = w > 1e-10 * np.trace(q)
    if not np.any(keep):
        raise DegenerateReadoutError("covariance matrix has no informative directions")
    return (v[:, keep] / w[keep]) @ v[:, keep].T


def optimal_measurement(
    matrices: ResponseMatrices, sensing_dir: Direction
) -> OptimalMeasurement:
    """Best measurement direction m ~ Q^-1 M^T n and its phase uncertainty.

    Also evaluates the raw error-propagation uncertainty at that direction,
    which saturates the Cauchy-Schwarz bound and must agree with
    1/sqrt(n^T K n).
    """
    n = sensing_dir.as_array()
    signal = matrices.m_matrix.T @ n
    if np.linalg.norm(signal) < 1e-14:
        raise ZeroResponseError("no first-order signal along the sensing direction")
    v = _clipped_pinv(matrices.q_matrix) @ signal
    m_opt = Direction.from_vector(v)
    nkn = float(n @ matrices.k_matrix @ n)
    if nkn <= 0.0:
        raise ZeroResponseError("sensing direction carries no inverse variance")
    delta_phi = 1.0 / math.sqrt(nkn)
    m_vec = m_opt.as_array()
    slope = float(n @ matrices.m_matrix @ m_vec)
    variance = float(m_vec @ matrices.q_matrix @ m_vec)
    delta_phi_ep = math.sqrt(variance) / abs(slope)
    return OptimalMeasurement(
        direction=m_opt, delta_phi=delta_phi, delta_phi_error_propagation=delta_phi_ep
    )


def error_propagation(matrices: ResponseMatrices, sensing_dir: Direction, measure_dir: Direction) -> float:
    """delta_phi for an arbitrary measurement direction (no optimization)."""
    n = sensing_dir.as_array()
    m_vec = measure_dir.as_array()
    slope = float(n @ matrices.m_matrix @ m_vec)
    if slope == 0.0:
        raise ZeroResponseError("no first-order signal for this measurement direction")
    variance = float(m_vec @ matrices.q_matrix @ m_vec)
    return math.sqrt(max(variance, 0.0)) / abs(slope)


def _noise_kernel(n_outcomes: int, sigma: float) -> np.ndarray:
    if sigma == 0.0:
        return np.eye(n_outcomes)
    idx = np.arange(n_outcomes)
    g = np.exp(-((idx[:, None] - idx[None, :]) ** 2) / (2.0 * sigma * sigma))
    return g / g.sum(axis=0, keepdims=True)


def noisy_distribution(dist: AxisDistribution, noise: NoiseModel) -> AxisDistribution:
    """Convolve with the truncated, column-normalized Gaussian kernel."""
    kernel = _noise_kernel(len(dist.probabilities), noise.sigma)
    return AxisDistribution(dist.axis, kernel @ dist.probabilities)


def noisy_observable(dist: AxisDistribution, noise: NoiseModel) -> float:
    """Mean outcome sum_m m P_m(phi | sigma); sigma = 0 is the ideal mean."""
    blurred = noisy_distribution(dist, noise)
    return float(np.sum(blurred.m_values() * blurred.probabilities))


def parity_expectation(dist: AxisDistribution, noise: NoiseModel) -> float:
    """<Pi> = sum_m (-1)^(J-m) P_m(phi | sigma), noise applied first."""
    blurred = noisy_distribution(dist, noise)
    signs = (-1.0) ** np.arange(len(blurred.probabilities))
    return float(np.sum(signs * blurred.probabilities))


DistributionFamily = Callable[[float], AxisDistribution]


def parity_precision(
    dist_at: DistributionFamily,
    phi: float,
    noise: NoiseModel,
    step: float | None = None,
) -> float:
    """Phase uncertainty of the parity signal by central differences.

    Slope uses the three-point stencil phi -+ step with step = phi/10 by
    default; the state family must therefore be evaluable at three points.
    """
    if step is None:
        step = abs(phi) / 10.0
    if step <= 0.0:
        raise ValueError("need a positive differencing step")
    center = parity_expectation(dist_at(phi), noise)
    upper = parity_expectation(dist_at(phi + step), noise)
    lower = parity_expectation(dist_at(phi - step), noise)
    slope = (upper - lower) / (2.0 * step)
    if abs(slope) < 1e-12:
        raise ZeroResponseError("parity slope vanishes at this operating point")
    spread = math.sqrt(max(0.0, 1.0 - center * center))
    return spread / abs(slope)


def moment_precision(
    dist_at: DistributionFamily,
    phi: float,
    noise: NoiseModel,
    step: float | None = None,
) -> float:
    """Phase uncertainty of the mean-outcome signal under detection noise."""
    if step is None:
        step = abs(phi) / 10.0
    if step <= 0.0:
        raise ValueError("need a positive differencing step")
    blurred = noisy_distribution(dist_at(phi), noise)
    m = blurred.m_values()
    mean = float(np.sum(m * blurred.probabilities))
    second = float(np.sum(m * m * blurred.probabilities))
    variance = max(0.0, second - mean * mean)
    upper = noisy_observable(dist_at(phi + step), noise)
    lower = noisy_observable(dist_at(phi - step), noise)
    slope = (upper - lower) / (2.0 * step)
    if abs(slope) < 1e-12:
        raise ZeroResponseError("signal slope vanishes at this operating point")
    return math.sqrt(variance) / abs(slope)


def pulse_angles(target: Direction) -> PulseSequence:
    """x/y pulse angles realizing J_target from Jz.

    theta = atan2(n_y, n_z) stays quadrant-correct for n_z < 0; at the
    poles of the map (target = +-x) theta is free and pinned to 0.
    """
    phi_pulse = -math.asin(max(-1.0, min(1.0, target.nx)))
    theta_pulse = math.atan2(target.ny, target.nz)
    return PulseSequence(theta_pulse=theta_pulse, phi_pulse=phi_pulse, target=target)


def paper_echo_plan(
    n_particles: int,
    chi_t: float,
    phase: float,
    delta_over_nchi: float,
    sensing_dir: Direction,
    chi: float = 1.0,
    alpha: float = 0.0,
) -> ReadoutPlan:
    """Twist-and-turn echo: U1 at (alpha, +delta), U2 at (alpha + pi/2, -delta).

    The second leg equals the exact negation of the first, so no interaction
    sign flip is ever required.
    """
    delta = delta_over_nchi * n_particles * chi
    prep = HamiltonianSpec(
        kind=HamiltonianKind.TATNT, chi=chi, delta=delta, alpha=alpha
    )
    readout = HamiltonianSpec(
        kind=HamiltonianKind.TATNT, chi=chi, delta=-delta, alpha=alpha + math.pi / 2.0
    )
    t = chi_t / chi
    return ReadoutPlan(
        prep_spec=prep,
        readout_spec=readout,
        prep_time=t,
        readout_time=t,
        sensing_dir=sensing_dir,
        phase=phase,
    )
