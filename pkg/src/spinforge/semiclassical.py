"""Mean-field phase-space analysis of twist-and-turn dynamics.

In the thermodynamic limit the normalized spin expectation R = (A, B, Z)
obeys the flow

    dA/dt = N chi_eff B Z - delta_eff B
    dB/dt = N chi_eff A Z + delta_eff A
    dZ/dt = -2 N chi_eff A B

which conserves |R| and the energy density E = delta_eff Z -
(N chi_eff / 2)(A^2 - B^2).  The poles are saddle points whose local
Lyapunov exponent sets the entanglement generation rate, and closed forms
exist for the optimal detuning, the optimal preparation time, and the
separatrix through each saddle.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

SQRT2_MINUS_1 = math.sqrt(2.0) - 1.0


@dataclass(frozen=True)
class BlochPoint:
    a: float
    b: float
    z: float

    def __post_init__(self) -> None:
        n2 = self.a * self.a + self.b * self.b + self.z * self.z
        if abs(n2 - 1.0) > 1e-9:
            raise ValueError(f"point must lie on the unit sphere, |R|^2 = {n2!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.z])


@dataclass(frozen=True)
class FlowParams:
    n_particles: int
    chi_eff: float
    delta_eff: float

    def __post_init__(self) -> None:
        if self.n_particles < 1:
            raise ValueError("need at least one particle")
        if self.chi_eff == 0.0:
            raise ValueError("chi_eff must be nonzero")
        if abs(self.detuning_ratio) >= 1.0:
            raise ValueError(
                "operating regime requires |delta_eff / (N chi_eff)| < 1, "
                f"got {self.detuning_ratio!r}"
            )

    @property
    def rate(self) -> float:
        """N chi_eff, the natural frequency scale of the flow."""
        return self.n_particles * self.chi_eff

    @property
    def detuning_ratio(self) -> float:
        return self.delta_eff / (self.n_particles * self.chi_eff)


@dataclass(frozen=True)
class FlowTrajectory:
    times: np.ndarray
    points: np.ndarray  # shape (len(times), 3)
    energies: np.ndarray

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "A", "B", "Z", "E"])
            for t, (a, b, z), e in zip(self.times, self.points, self.energies):
                writer.writerow([repr(float(v)) for v in (t, a, b, z, e)])


def flow_rhs(p: BlochPoint, params: FlowParams) -> tuple[float, float, float]:
    nx = params.rate
    d = params.delta_eff
    return (
        nx * p.b * p.z - d * p.b,
        nx * p.a * p.z + d * p.a,
        -2.0 * nx * p.a * p.b,
    )


def flow_jacobian(p: BlochPoint, params: FlowParams) -> np.ndarray:
    nx = params.rate
    d = params.delta_eff
    return np.array(
        [
            [0.0, nx * p.z - d, nx * p.b],
            [nx * p.z + d, 0.0, nx * p.a],
            [-2.0 * nx * p.b, -2.0 * nx * p.a, 0.0],
        ]
    )


def energy(point, params: FlowParams) -> float:
    """Classical energy density delta_eff Z - (N chi_eff / 2)(A^2 - B^2)."""
    a, b, z = (point.a, point.b, point.z) if isinstance(point, BlochPoint) else point
    return params.delta_eff * z - 0.5 * params.rate * (a * a - b * b)


def _rhs_array(r: np.ndarray, params: FlowParams) -> np.ndarray:
    nx = params.rate
    d = params.delta_eff
    return np.array(
        [
            nx * r[1] * r[2] - d * r[1],
            nx * r[0] * r[2] + d * r[0],
            -2.0 * nx * r[0] * r[1],
        ]
    )


def integrate_flow(
    p0: BlochPoint, params: FlowParams, t_final: float, dt: float
) -> FlowTrajectory:
    """Classical RK4 with renormalization to the unit sphere after every step."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if dt > 0.01 / abs(params.rate):
        raise ValueError(f"step too large: dt must be <= 0.01/(N chi_eff) = {0.01 / abs(params.rate)!r}")
    n_steps = max(1, math.ceil(t_final / dt))
    h = t_final / n_steps
    r = p0.as_array().astype(float)
    times = np.empty(n_steps + 1)
    points = np.empty((n_steps + 1, 3))
    times[0] = 0.0
    points[0] = r
    for i in range(n_steps):
        k1 = _rhs_array(r, params)
        k2 = _rhs_array(r + 0.5 * h * k1, params)
        k3 = _rhs_array(r + 0.5 * h * k2, params)
        k4 = _rhs_array(r + h * k3, params)
        r = r + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        r /= np.linalg.norm(r)
        times[i + 1] = (i + 1) * h
        points[i + 1] = r
    energies = params.delta_eff * points[:, 2] - 0.5 * params.rate * (
        points[:, 0] ** 2 - points[:, 1] ** 2
    )
    return FlowTrajectory(times=times, points=points, energies=energies)


def fixed_points(params: FlowParams) -> list[tuple[BlochPoint, str]]:
    """The six stationary points, classified from the Jacobian spectrum."""
    d = params.detuning_ratio
    root = math.sqrt(1.0 - d * d)
    candidates = [
        BlochPoint(0.0, 0.0, 1.0),
        BlochPoint(0.0, 0.0, -1.0),
        BlochPoint(0.0, root, d),
        BlochPoint(0.0, -root, d),
        BlochPoint(root, 0.0, -d),
        BlochPoint(-root, 0.0, -d),
    ]
    out = []
    for point in candidates:
        eigvals = np.linalg.eigvals(flow_jacobian(point, params))
        tag = "saddle" if np.max(eigvals.real) > 1e-8 * abs(params.rate) else "stable"
        out.append((point, tag))
    return out


def lyapunov_saddle(params: FlowParams) -> float:
    """Local Lyapunov exponent at the poles, N chi_eff sqrt(1 - d^2)."""
    d = params.detuning_ratio
    return abs(params.rate) * math.sqrt(1.0 - d * d)


@dataclass(frozen=True)
class DetuningOptimum:
    """Optimal detunings; both signs work by the flow's mirror symmetry."""

    bare: tuple[float, float]
    effective: tuple[float, float]


def optimal_detuning_sc(n_particles: int, chi: float, k0: float) -> DetuningOptimum:
    """Semi-classical optimum: delta_eff = (sqrt 2 - 1) N chi_eff.

    The bare drive detuning follows by undoing chi_eff = chi/3 and
    delta_eff = K0 delta, giving delta/(N chi) = (sqrt 2 - 1)/(3 K0) ~ 0.3135.
    """
    delta_eff = SQRT2_MINUS_1 * n_particles * (chi / 3.0)
    delta_bare = delta_eff / k0
    return DetuningOptimum(
        bare=(delta_bare, -delta_bare), effective=(delta_eff, -delta_eff)
    )


def optimal_time_sc(n_particles: int) -> float:
    """Optimal preparation time (chi t units): 3 (1.9 + 0.55 ln N) / N."""
    if n_particles < 2:
        raise ValueError("timescale estimate needs N >= 2")
    return 3.0 * (1.9 + 0.55 * math.log(n_particles)) / n_particles


def optimal_time_quadrature(n_particles: int, d: float = SQRT2_MINUS_1) -> float:
    """Preparation time from the full separatrix integral (chi t units).

    Integrates dZ / ((1 - Z) sqrt((1 + Z)^2 - (2d)^2)) from the uncertainty-
    patch edge Z0 = sqrt(1 - 1/(2N)) down to the turning point Z1 = 2d - 1,
    substituting Z = Z1 + u^2 to remove the square-root singularity.  A
    cross-check for the logarithmic closed form, not a replacement.
    """
    if n_particles < 2:
        raise ValueError("timescale estimate needs N >= 2")
    z0 = math.sqrt(1.0 - 1.0 / (2.0 * n_particles))
    u_max = math.sqrt(z0 - (2.0 * d - 1.0))

    def integrand(u: float) -> float:
        return 2.0 / ((2.0 - 2.0 * d - u * u) * math.sqrt(u * u + 4.0 * d))

    value, _ = quad(integrand, 0.0, u_max, limit=200)
    # value = N chi_eff t, and chi_eff = chi/3
    return 3.0 * value / n_particles


def sc_qfi_prediction(n_particles: int) -> float:
    """Semi-classical QFI at the separatrix critical point, ~0.97 N^2."""
    d = SQRT2_MINUS_1
    z_star = 2.0 * d - 1.0
    return 0.5 * n_particles**2 * (1.0 - z_star) * (1.0 + z_star + 2.0 * d)


def separatrix_curves(
    params: FlowParams, branch: str, n_samples: int = 201
) -> np.ndarray:
    """Sampled points (A, B, Z) on the constant-energy curve through a saddle.

    ``branch`` selects the saddle: "north" for (0,0,+1), "south" for (0,0,-1).
    On the north branch A^2 = (1-Z)(1+Z-2d)/2 and B^2 = (1-Z)(1+Z+2d)/2 over
    the Z range where both are non-negative; all four sign quadrants are
    returned stacked.  Every sample matches the saddle energy to 1e-10.
    """
    if branch not in ("north", "south"):
        raise ValueError("branch must be 'north' or 'south'")
    if n_samples < 2:
        raise ValueError("need at least two samples")
    d = params.detuning_ratio
    if branch == "north":
        z = np.linspace(-1.0 + 2.0 * abs(d), 1.0, n_samples)
        a2 = 0.5 * (1.0 - z) * (1.0 + z - 2.0 * d)
        b2 = 0.5 * (1.0 - z) * (1.0 + z + 2.0 * d)
    else:
        z = np.linspace(-1.0, 1.0 - 2.0 * abs(d), n_samples)
        a2 = 0.5 * (1.0 + z) * (1.0 - z + 2.0 * d)
        b2 = 0.5 * (1.0 + z) * (1.0 - z - 2.0 * d)
    if np.any(a2 < -1e-12) or np.any(b2 < -1e-12):
        raise ValueError("branch undefined: negative radicand inside sampled range")
    a = np.sqrt(np.clip(a2, 0.0, None))
    b = np.sqrt(np.clip(b2, 0.0, None))
    quadrants = [
        np.column_stack([sa * a, sb * b, z])
        for sa in (1.0, -1.0)
        for sb in (1.0, -1.0)
    ]
    return np.vstack(quadrants)
