"""Hamiltonian specifications and construction.

Covers every model in the protocol family: plain one-axis twisting (OAT),
OAT-and-turn, two-axis twisting (TAT), TAT-and-turn and its exact negation,
the periodically driven Hamiltonian chi*Jz^2 + delta*Jz + Omega0 cos(wt)*Jalpha,
and the leading time-independent term of its high-frequency expansion.

Bessel functions of the first kind are evaluated with an in-house routine
(power series for small argument, normalized downward recurrence beyond) so
the core carries no opaque numeric dependency; tests cross-check against an
independent table.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, replace
from enum import Enum
from functools import lru_cache
from typing import Callable, Union

import numpy as np

from .spincore import CollectiveOps, Direction, j_axis

_MAX_ORDER = 20
_MAX_ARG = 100.0
# J0 reaches its first minimum ~-0.4028 at x ~ 3.8317; ratios past x/2 leave
# the monotonic branch the TAT working point lives on.
_MAX_RATIO = 3.8317059702075125 / 2.0


def bessel_j(order: int, x: float) -> float:
    """Bessel function of the first kind J_order(x), |error| < 1e-12.

    Power series below |x| = 12; normalized downward (Miller) recurrence with
    the identity J0 + 2*sum J_{2k} = 1 beyond, where the series cancels badly.
    """
    if not isinstance(order, (int, np.integer)) or order < 0 or order > _MAX_ORDER:
        raise ValueError(f"order must be an integer in [0, {_MAX_ORDER}], got {order!r}")
    x = float(x)
    if not math.isfinite(x) or abs(x) > _MAX_ARG:
        raise ValueError(f"argument must satisfy |x| <= {_MAX_ARG}, got {x!r}")
    sign = -1.0 if (x < 0.0 and order % 2 == 1) else 1.0
    x = abs(x)
    if x == 0.0:
        return 1.0 if order == 0 else 0.0
    if x < 12.0:
        return sign * _bessel_series(order, x)
    return sign * _bessel_miller(order, x)


def _bessel_series(order: int, x: float) -> float:
    half = x / 2.0
    term = half**order / math.factorial(order)
    total = term
    for k in range(1, 200):
        term *= -(half * half) / (k * (order + k))
        total += term
        if abs(term) < 1e-18 * max(1.0, abs(total)) and k > half:
            break
    return total


def _bessel_miller(order: int, x: float) -> float:
    # Start well above the turning point; values decay superexponentially there.
    start = int(x + 15.0 * x ** (1.0 / 3.0) + 30.0)
    start += start % 2  # even start keeps the normalization bookkeeping simple
    jp1 = 0.0
    jj = 1e-30
    result = 0.0
    norm = 0.0
    for k in range(start, 0, -1):
        jm1 = (2.0 * k / x) * jj - jp1
        jp1, jj = jj, jm1
        if abs(jj) > 1e100:
            jj *= 1e-100
            jp1 *= 1e-100
            result *= 1e-100
            norm *= 1e-100
        if k - 1 == order:
            result = jj
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * jj
    norm += jj  # jj now holds (unnormalized) J_0
    if order == 0:
        result = jj
    return result / norm


@lru_cache(maxsize=1)
def solve_tat_ratio() -> float:
    """Drive ratio r = Omega0/omega with J0(2r) = -1/3, by bisection to 1e-10."""
    lo, hi = 1.2, 1.9
    flo = bessel_j(0, 2.0 * lo) + 1.0 / 3.0
    fhi = bessel_j(0, 2.0 * hi) + 1.0 / 3.0
    if flo <= 0.0 or fhi >= 0.0:
        raise AssertionError("bisection bracket lost")  # mathematically guaranteed
    while hi - lo > 1e-10:
        mid = 0.5 * (lo + hi)
        if bessel_j(0, 2.0 * mid) + 1.0 / 3.0 > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def tat_k0() -> float:
    """K0 = J0(r*) at the TAT working point (~0.4404, computed, never hard-coded)."""
    return bessel_j(0, solve_tat_ratio())


@dataclass(frozen=True)
class FloquetCoefficients:
    """Leading Jacobi-Anger weights of the driven model at ratio = Omega0/omega."""

    ratio: float
    l0: float
    k0: float
    chi_eff: float
    delta_eff: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.ratio <= _MAX_RATIO:
            raise ValueError(f"ratio outside the monotonic J0 branch: {self.ratio!r}")
        if not -0.4028 <= self.l0 <= 1.0:
            raise ValueError(f"l0 = {self.l0!r} outside the attainable range")


def floquet_coefficients(chi: float, delta: float, ratio: float | None = None) -> FloquetCoefficients:
    """Coefficients for a drive at the given ratio (default: the TAT working point)."""
    if ratio is None:
        ratio = solve_tat_ratio()
    l0 = bessel_j(0, 2.0 * ratio)
    k0 = bessel_j(0, ratio)
    return FloquetCoefficients(
        ratio=ratio, l0=l0, k0=k0, chi_eff=chi / 3.0, delta_eff=k0 * delta
    )


class HamiltonianKind(str, Enum):
    OAT = "OAT"
    OATNT = "OATNT"
    TAT = "TAT"
    TATNT = "TATNT"
    ANTI_TATNT = "ANTI_TATNT"
    DRIVEN_FE = "DRIVEN_FE"
    EFFECTIVE_H0I = "EFFECTIVE_H0I"


@dataclass(frozen=True)
class HamiltonianSpec:
    """Declarative model description; rates in rad/time, alpha in radians."""

    kind: HamiltonianKind
    chi: float = 1.0
    delta: float = 0.0
    omega0: float = 0.0
    omega: float = 0.0
    alpha: float = 0.0

    def __post_init__(self) -> None:
        kind = HamiltonianKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is HamiltonianKind.DRIVEN_FE:
            if not self.omega > 0.0:
                raise ValueError("DRIVEN_FE requires omega > 0")
            if self.omega0 < 0.0:
                raise ValueError("DRIVEN_FE requires omega0 >= 0")
        if kind in (HamiltonianKind.OAT, HamiltonianKind.TAT):
            if self.delta != 0.0 or self.omega0 != 0.0:
                raise ValueError(f"{kind.value} ignores delta/omega0; set them to 0")

    def negated(self) -> "HamiltonianSpec":
        """Spec whose Hamiltonian is the exact negation (the time-reversal pair)."""
        if self.kind is HamiltonianKind.TATNT:
            return replace(self, kind=HamiltonianKind.ANTI_TATNT)
        if self.kind is HamiltonianKind.ANTI_TATNT:
            return replace(self, kind=HamiltonianKind.TATNT)
        if self.kind in (HamiltonianKind.OAT, HamiltonianKind.TAT):
            return replace(self, chi=-self.chi)
        if self.kind is HamiltonianKind.OATNT:
            return replace(self, chi=-self.chi, omega0=-self.omega0)
        raise ValueError(f"no static negation defined for {self.kind.value}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["kind"] = self.kind.value
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "HamiltonianSpec":
        allowed = {"kind", "chi", "delta", "omega0", "omega", "alpha"}
        unknown = set(data) - allowed
        if unknown:
            raise ValueError(f"unknown HamiltonianSpec fields: {sorted(unknown)}")
        if "kind" not in data:
            raise ValueError("HamiltonianSpec requires a 'kind' field")
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "HamiltonianSpec":
        return cls.from_dict(json.loads(text))


HamiltonianLike = Union[np.ndarray, Callable[[float], np.ndarray]]


def build_hamiltonian(spec: HamiltonianSpec, ops: CollectiveOps) -> HamiltonianLike:
    """Matrix for static kinds, or t -> H(t) for the driven model.

    TATNT with alpha uses the beta = alpha + pi/2 twisting pair
    chi_eff (Jb^2 - Ja^2) + delta_eff Jz with chi_eff = chi/3 and
    delta_eff = K0 * delta at the TAT working point.
    """
    kind = HamiltonianKind(spec.kind)
    ja = j_axis(ops, Direction.equatorial(spec.alpha))
    jz = ops.jz

    if kind is HamiltonianKind.OAT:
        return spec.chi * (jz @ jz)
    if kind is HamiltonianKind.OATNT:
        return spec.chi * (jz @ jz) + spec.omega0 * ja

    jb = j_axis(ops, Direction.equatorial(spec.alpha + math.pi / 2.0))
    if kind in (HamiltonianKind.TAT, HamiltonianKind.TATNT, HamiltonianKind.ANTI_TATNT):
        coeff = floquet_coefficients(spec.chi, spec.delta)
        h = coeff.chi_eff * (jb @ jb - ja @ ja) + coeff.delta_eff * jz
        if kind is HamiltonianKind.ANTI_TATNT:
            h = -h
        return h
    if kind is HamiltonianKind.EFFECTIVE_H0I:
        coeff = floquet_coefficients(spec.chi, spec.delta, ratio=spec.omega0 / spec.omega)
        return (spec.chi / 2.0) * (
            (1.0 + coeff.l0) * (jz @ jz) + (1.0 - coeff.l0) * (jb @ jb)
        ) + coeff.k0 * spec.delta * jz
    if kind is HamiltonianKind.DRIVEN_FE:
        static = spec.chi * (jz @ jz) + spec.delta * jz

        def h_of_t(t: float) -> np.ndarray:
            return static + spec.omega0 * math.cos(spec.omega * t) * ja

        return h_of_t
    raise ValueError(f"unknown Hamiltonian kind {spec.kind!r}")


def fourier_component(n: int, spec: HamiltonianSpec, ops: CollectiveOps) -> np.ndarray:
    """n-th Fourier component of the driven model in the drive's rotating frame.

    Built from the ladder pair J_{1,2} = Jz +- i*Jb with Bessel weights
    L_n = J_n(2 Omega0/omega) and K_n = J_n(Omega0/omega); the n = 0 term is
    the effective high-frequency Hamiltonian.
    """
    if abs(n) > 10:
        raise ValueError("Fourier components are capped at |n| = 10")
    if HamiltonianKind(spec.kind) is not HamiltonianKind.DRIVEN_FE:
        raise ValueError("Fourier components are defined for the DRIVEN_FE kind")
    ratio = spec.omega0 / spec.omega
    jz = np.asarray(ops.jz)
    jb = j_axis(ops, Direction.equatorial(spec.alpha + math.pi / 2.0))
    if n == 0:
        l0 = bessel_j(0, 2.0 * ratio)
        k0 = bessel_j(0, ratio)
        return (spec.chi / 2.0) * (
            (1.0 + l0) * (jz @ jz) + (1.0 - l0) * (jb @ jb)
        ) + k0 * spec.delta * jz
    j1 = jz + 1j * jb
    j2 = jz - 1j * jb
    order = abs(n)
    ln = bessel_j(order, 2.0 * ratio)
    kn = bessel_j(order, ratio)
    parity = (-1.0) ** order
    if n > 0:
        quad = parity * (j1 @ j1) + j2 @ j2
        lin = parity * j1 + j2
    else:
        quad = j1 @ j1 + parity * (j2 @ j2)
        lin = j1 + parity * j2
    return (spec.chi / 4.0) * ln * quad + (spec.delta / 2.0) * kn * lin


def interaction_picture_hamiltonian(spec: HamiltonianSpec, ops: CollectiveOps, t: float) -> np.ndarray:
    """Exact rotating-frame Hamiltonian at time t, via the tilt angle directly.

    With g = (Omega0/omega) sin(wt) the frame transformation maps Jz to
    cos(g) Jz + sin(g) Jb, giving chi (.)^2 + delta (.); used as the
    reference the Fourier reconstruction is checked against.
    """
    if HamiltonianKind(spec.kind) is not HamiltonianKind.DRIVEN_FE:
        raise ValueError("interaction picture is defined for the DRIVEN_FE kind")
    gamma = (spec.omega0 / spec.omega) * math.sin(spec.omega * t)
    jb = j_axis(ops, Direction.equatorial(spec.alpha + math.pi / 2.0))
    tilted = math.cos(gamma) * np.asarray(ops.jz) + math.sin(gamma) * jb
    return spec.chi * (tilted @ tilted) + spec.delta * tilted
