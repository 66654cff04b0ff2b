"""Dicke-basis representation of collective spin states and operators.

An ensemble of N spin-1/2 particles restricted to the permutation-symmetric
sector behaves as a single spin J = N/2.  States live in the (N+1)-dimensional
Dicke basis |J, m> with m listed in descending order m = J, J-1, ..., -J, so
index 0 holds m = +J and the stretched state |up>^N is ``amplitudes[0] = 1``.

All containers are immutable after construction and every operation is a pure
function, so values can be shared freely across threads.
"""

from __future__ import annotations

import hashlib
import math
import threading
from dataclasses import dataclass

import numpy as np

# Dense complex storage caps memory at ~64 MB per operator; raise deliberately
# if larger ensembles are ever needed.
MAX_PARTICLES = 2048

_NORM_TOL = 1e-10
_UNIT_TOL = 1e-12


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Direction:
    """Unit vector on the generalized Bloch sphere."""

    nx: float
    ny: float
    nz: float

    def __post_init__(self) -> None:
        n2 = self.nx * self.nx + self.ny * self.ny + self.nz * self.nz
        if abs(n2 - 1.0) > _UNIT_TOL:
            raise ValueError(f"direction must be a unit vector, got |n|^2 = {n2!r}")

    @classmethod
    def from_vector(cls, v) -> "Direction":
        v = np.asarray(v, dtype=float)
        norm = np.linalg.norm(v)
        if norm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        v = v / norm
        return cls(float(v[0]), float(v[1]), float(v[2]))

    @classmethod
    def x(cls) -> "Direction":
        return cls(1.0, 0.0, 0.0)

    @classmethod
    def y(cls) -> "Direction":
        return cls(0.0, 1.0, 0.0)

    @classmethod
    def z(cls) -> "Direction":
        return cls(0.0, 0.0, 1.0)

    @classmethod
    def equatorial(cls, alpha: float) -> "Direction":
        """In-plane axis (cos a, sin a, 0); the drive axis for phase ``alpha``."""
        return cls.from_vector([math.cos(alpha), math.sin(alpha), 0.0])

    def as_array(self) -> np.ndarray:
        return np.array([self.nx, self.ny, self.nz])


@dataclass(frozen=True)
class DickeState:
    """Pure symmetric state; ``amplitudes[i]`` is the coefficient of m = J - i."""

    n_particles: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.n_particles < 1:
            raise ValueError("need at least one particle")
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.n_particles + 1,):
            raise ValueError(
                f"amplitude vector must have length N+1 = {self.n_particles + 1}, "
                f"got shape {amps.shape}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > _NORM_TOL:
            raise ValueError(f"state is not normalized: |psi| = {norm!r}")
        object.__setattr__(self, "amplitudes", _readonly(amps))

    @property
    def j(self) -> float:
        return self.n_particles / 2.0

    def m_values(self) -> np.ndarray:
        return self.j - np.arange(self.n_particles + 1)

    def overlap(self, other: "DickeState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "DickeState") -> float:
        """|<self|other>|^2; global phase never enters comparisons."""
        return abs(self.overlap(other)) ** 2


@dataclass(frozen=True)
class CollectiveOps:
    """Angular-momentum matrices Jx, Jy, Jz for spin J = N/2, Dicke ordering."""

    n_particles: int
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray

    def __post_init__(self) -> None:
        dim = self.n_particles + 1
        for name in ("jx", "jy", "jz"):
            mat = np.asarray(getattr(self, name), dtype=complex)
            if mat.shape != (dim, dim):
                raise ValueError(f"{name} must be {dim}x{dim}")
            object.__setattr__(self, name, _readonly(mat))

    @property
    def j(self) -> float:
        return self.n_particles / 2.0


_ops_cache: dict[int, CollectiveOps] = {}
_ops_lock = threading.Lock()


def build_collective_ops(n_particles: int) -> CollectiveOps:
    """Standard spin-J matrices: <m|Jz|m> = m, <m+-1|J+-|m> = sqrt(J(J+1)-m(m+-1))."""
    if n_particles < 1:
        raise ValueError("empty ensemble: N must be >= 1")
    if n_particles > MAX_PARTICLES:
        raise ValueError(f"N = {n_particles} exceeds MAX_PARTICLES = {MAX_PARTICLES}")
    with _ops_lock:
        cached = _ops_cache.get(n_particles)
    if cached is not None:
        return cached

    j = n_particles / 2.0
    m = j - np.arange(n_particles + 1)
    jz = np.diag(m).astype(complex)
    # J+ raises m by one: couples index i (m_i) to index i-1 (m_i + 1).
    raise_elem = np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1))
    jplus = np.zeros((n_particles + 1, n_particles + 1), dtype=complex)
    jplus[np.arange(n_particles), np.arange(1, n_particles + 1)] = raise_elem
    jminus = jplus.conj().T
    jx = (jplus + jminus) / 2.0
    jy = (jplus - jminus) / 2.0j
    ops = CollectiveOps(n_particles, jx, jy, jz)
    with _ops_lock:
        _ops_cache.setdefault(n_particles, ops)
    return ops


def j_axis(ops: CollectiveOps, direction: Direction) -> np.ndarray:
    """Generator along an arbitrary unit direction, nx*Jx + ny*Jy + nz*Jz."""
    return _readonly(
        direction.nx * ops.jx + direction.ny * ops.jy + direction.nz * ops.jz
    )


def spin_coherent_state(n_particles: int, polar: float, azimuth: float = 0.0) -> DickeState:
    """Spin coherent state pointing along (sin t cos p, sin t sin p, cos t).

    Amplitudes c_m = sqrt(C(N, J-m)) cos(t/2)^(J+m) sin(t/2)^(J-m) e^{i(J-m)p};
    binomials are evaluated in log space so N > 60 does not overflow.
    """
    if n_particles < 1:
        raise ValueError("empty ensemble: N must be >= 1")
    if n_particles > MAX_PARTICLES:
        raise ValueError(f"N = {n_particles} exceeds MAX_PARTICLES = {MAX_PARTICLES}")
    n = n_particles
    c = math.cos(polar / 2.0)
    s = math.sin(polar / 2.0)
    amps = np.zeros(n + 1, dtype=complex)
    if s == 0.0:
        amps[0] = 1.0
    elif c == 0.0:
        amps[n] = np.exp(1j * n * azimuth) * math.copysign(1.0, s) ** n
    else:
        k = np.arange(n + 1)  # number of flipped spins, m = J - k
        log_binom = np.array(
            [
                0.5 * (math.lgamma(n + 1) - math.lgamma(i + 1) - math.lgamma(n - i + 1))
                for i in range(n + 1)
            ]
        )
        log_mag = log_binom + (n - k) * math.log(abs(c)) + k * math.log(abs(s))
        sign = np.sign(c) ** (n - k) * np.sign(s) ** k
        amps = sign * np.exp(log_mag) * np.exp(1j * k * azimuth)
    amps = amps / np.linalg.norm(amps)
    return DickeState(n, amps)


def expectation(state: DickeState, op: np.ndarray) -> float:
    """<psi|O|psi> for Hermitian O; the residual imaginary part is discarded."""
    op = np.asarray(op)
    dim = state.n_particles + 1
    if op.shape != (dim, dim):
        raise ValueError(f"operator shape {op.shape} does not match dimension {dim}")
    value = complex(np.vdot(state.amplitudes, op @ state.amplitudes))
    if abs(value.imag) >= 1e-10:
        raise ValueError(f"non-negligible imaginary part {value.imag!r}; operator not Hermitian?")
    return value.real


# Eigendecompositions of Hermitian generators are reused across rotations and
# propagations; insertion is idempotent, so a lost race only recomputes.
_EIGH_CACHE_MAX = 128
_eigh_cache: dict[str, tuple[np.ndarray, np.ndarray]] = {}
_eigh_lock = threading.Lock()


def _matrix_key(matrix: np.ndarray) -> str:
    h = hashlib.sha256()
    h.update(str(matrix.shape).encode())
    h.update(np.ascontiguousarray(matrix).tobytes())
    return h.hexdigest()


def hermitian_eigensystem(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cached (eigenvalues, eigenvectors) of a Hermitian matrix.

    Raises ValueError for visibly non-Hermitian input; content-hash keyed so
    repeated propagations with the same generator skip the decomposition.
    """
    matrix = np.asarray(matrix, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(matrix))))
    if np.max(np.abs(matrix - matrix.conj().T)) > 1e-12 * scale:
        raise ValueError("matrix is not Hermitian")
    key = _matrix_key(matrix)
    with _eigh_lock:
        hit = _eigh_cache.get(key)
    if hit is not None:
        return hit
    w, v = np.linalg.eigh(matrix)
    w = _readonly(w.astype(float))
    v = _readonly(v)
    with _eigh_lock:
        if len(_eigh_cache) >= _EIGH_CACHE_MAX:
            _eigh_cache.pop(next(iter(_eigh_cache)))
        _eigh_cache.setdefault(key, (w, v))
    return w, v


def rotate(state: DickeState, axis: Direction, angle: float) -> DickeState:
    """Apply exp(-i * angle * J_axis) through the cached eigensystem of J_axis."""
    ops = build_collective_ops(state.n_particles)
    w, v = hermitian_eigensystem(j_axis(ops, axis))
    phases = np.exp(-1j * angle * w)
    amps = v @ (phases * (v.conj().T @ state.amplitudes))
    return DickeState(state.n_particles, amps)
