"""Spin-1/2 state representations, canonical constants and state functionals.

Basis ordering is fixed throughout the package: spin-up ``|+>`` is index 0 and
spin-down ``|->`` is index 1, so two spins are ordered ``|++>, |+->, |-+>, |-->``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DimensionError, NotHermitianError, RangeError

SQRT2 = math.sqrt(2.0)

IDENTITY2 = np.eye(2, dtype=np.complex128)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

UP = np.array([1, 0], dtype=np.complex128)
DOWN = np.array([0, 1], dtype=np.complex128)
PROJ_UP = np.outer(UP, UP.conj())
PROJ_DOWN = np.outer(DOWN, DOWN.conj())

POSITIVITY_TOL = 1e-10
TRACE_TOL = 1e-10


class BellState(enum.Enum):
    PSI_MINUS = "psi-"
    PSI_PLUS = "psi+"
    PHI_MINUS = "phi-"
    PHI_PLUS = "phi+"

    @property
    def vector(self) -> np.ndarray:
        return _BELL_VECTORS[self].copy()

    @property
    def projector(self) -> np.ndarray:
        v = _BELL_VECTORS[self]
        return np.outer(v, v.conj())


_BELL_VECTORS = {
    BellState.PSI_MINUS: np.array([0, 1, -1, 0], dtype=np.complex128) / SQRT2,
    BellState.PSI_PLUS: np.array([0, 1, 1, 0], dtype=np.complex128) / SQRT2,
    BellState.PHI_MINUS: np.array([1, 0, 0, -1], dtype=np.complex128) / SQRT2,
    BellState.PHI_PLUS: np.array([1, 0, 0, 1], dtype=np.complex128) / SQRT2,
}

SINGLET = _BELL_VECTORS[BellState.PSI_MINUS]


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian positive semidefinite matrix with trace in (0, 1].

    Subnormalized matrices are allowed on purpose: after a filtering step the
    trace is the probability that the step succeeded.  Use :meth:`renormalized`
    to divide it out.
    """

    mat: np.ndarray

    def __post_init__(self):
        m = linalg.as_matrix(self.mat)
        if m.shape[0] != m.shape[1] or m.shape[0] < 2:
            raise DimensionError(f"density matrix must be square with dimension >= 2, got {m.shape}")
        if not linalg.is_hermitian(m, linalg.HERMITIAN_TOL):
            raise NotHermitianError("density matrix is not Hermitian")
        tr = float(np.trace(m).real)
        if not (0.0 < tr <= 1.0 + TRACE_TOL):
            raise RangeError(f"density matrix trace {tr!r} is outside (0, 1]")
        lo = linalg.min_eigenvalue(m)
        if lo < -POSITIVITY_TOL:
            raise RangeError(f"density matrix has negative eigenvalue {lo:.3e}")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.mat).real)

    def renormalized(self) -> "DensityMatrix":
        return DensityMatrix(self.mat / self.trace)

    def is_normalized(self, atol: float = TRACE_TOL) -> bool:
        return abs(self.trace - 1.0) <= atol

    def to_json(self) -> dict:
        return matrix_to_json(self.mat)

    @classmethod
    def from_json(cls, data: dict) -> "DensityMatrix":
        try:
            re = np.asarray(data["re"], dtype=float)
            im = np.asarray(data["im"], dtype=float)
            dim = int(data["dim"])
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed density matrix JSON: {exc}") from exc
        if re.shape != (dim, dim) or im.shape != (dim, dim):
            raise DimensionError(f"JSON arrays do not match dim={dim}")
        return cls(re + 1j * im)

    @classmethod
    def from_pure(cls, psi) -> "DensityMatrix":
        v = psi.vec if isinstance(psi, PureState) else np.asarray(psi, dtype=np.complex128)
        return cls(np.outer(v, v.conj()))


def matrix_to_json(m) -> dict:
    """``{"dim": d, "re": [[...]], "im": [[...]]}``, row-major."""
    m = np.asarray(m)
    return {"dim": int(m.shape[0]), "re": m.real.tolist(), "im": m.imag.tolist()}


@dataclass(frozen=True, eq=False)
class PureState:
    vec: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        v = np.asarray(self.vec, dtype=np.complex128).reshape(-1)
        if v.size < 2:
            raise DimensionError("pure state needs dimension >= 2")
        if not np.all(np.isfinite(v)):
            raise ValueError("state vector has non-finite entries")
        if self.normalized and abs(np.linalg.norm(v) - 1.0) > 1e-10:
            raise RangeError(f"state flagged normalized has norm {np.linalg.norm(v)!r}")
        v.setflags(write=False)
        object.__setattr__(self, "vec", v)

    @property
    def dim(self) -> int:
        return self.vec.size

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vec))

    def density(self) -> np.ndarray:
        return np.outer(self.vec, self.vec.conj())


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    @property
    def norm(self) -> float:
        return math.sqrt(self.x**2 + self.y**2 + self.z**2)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "BlochVector":
        return cls(math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta))


def pure_from_angles(theta: float, phi: float) -> PureState:
    """Spin state whose Bloch vector has polar angle ``theta`` and azimuth ``phi``."""
    return PureState(np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)]))


def density_from_bloch(p: BlochVector) -> DensityMatrix:
    """rho = (1 + P.sigma) / 2."""
    if p.norm > 1.0 + 1e-10:
        raise RangeError(f"Bloch vector norm {p.norm!r} exceeds 1")
    return DensityMatrix(0.5 * (IDENTITY2 + p.x * SIGMA_X + p.y * SIGMA_Y + p.z * SIGMA_Z))


def bloch_from_density(rho, normalized: bool = False) -> BlochVector:
    """Polarization vector of a 2x2 density matrix.

    By default the trace is *not* divided out, so filtered (subnormalized)
    states give shortened vectors.  Pass ``normalized=True`` to get the Bloch
    vector of the renormalized state.
    """
    m = rho.mat if isinstance(rho, DensityMatrix) else linalg.as_matrix(rho)
    if m.shape != (2, 2):
        raise DimensionError(f"Bloch vectors need a 2x2 matrix, got {m.shape}")
    x = (m[0, 1] + m[1, 0]).real
    y = (1j * (m[0, 1] - m[1, 0])).real
    z = (m[0, 0] - m[1, 1]).real
    if normalized:
        tr = float(np.trace(m).real)
        x, y, z = x / tr, y / tr, z / tr
    return BlochVector(float(x), float(y), float(z))


def overlap(a: PureState, b: PureState) -> float:
    """|<a|b>|, clipped to [0, 1]."""
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return float(min(1.0, abs(np.vdot(a.vec, b.vec))))


def fidelity_singlet(rho) -> float:
    """Singlet fraction <psi-| rho |psi-> of the renormalized state."""
    m = rho.mat if isinstance(rho, DensityMatrix) else linalg.as_matrix(rho)
    if m.shape != (4, 4):
        raise DimensionError(f"singlet fidelity needs a 4x4 matrix, got {m.shape}")
    m = m / np.trace(m).real
    f = float(np.vdot(SINGLET, m @ SINGLET).real)
    return min(1.0, max(0.0, f))


def werner(f: float) -> DensityMatrix:
    """Singlet mixed with isotropic noise so that the singlet fidelity equals ``f``."""
    if not (0.0 <= f <= 1.0):
        raise RangeError(f"Werner fidelity must lie in [0, 1], got {f!r}")
    p = BellState.PSI_MINUS.projector
    return DensityMatrix(f * p + (1.0 - f) / 3.0 * (np.eye(4) - p))
