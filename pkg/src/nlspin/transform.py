"""Nonlinear state maps built from two copies, a two-spin unitary and a filter.

The literal procedure is: take ``rho (x) rho``, apply a unitary that couples
the source and target spins, keep the run only if the target is found
spin-down, and read off the source.  With the XOR gate the source ends up in
the state whose matrix elements are the squares of the input's elements.
:func:`pipeline` runs the literal tensor computation; :func:`square_elements`
is the closed form.  Tests hold them equal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List

import numpy as np

from . import linalg
from .errors import DimensionError, RangeError, VerificationError
from .states import (
    IDENTITY2,
    PROJ_DOWN,
    SIGMA_X,
    SIGMA_Z,
    BlochVector,
    DensityMatrix,
    PureState,
    bloch_from_density,
    pure_from_angles,
)

FACTOR_TOL = 1e-10
CLOSED_FORM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class TwoQubitGate:
    u: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        u = linalg.as_matrix(self.u)
        if u.shape != (4, 4):
            raise DimensionError(f"two-qubit gate must be 4x4, got {u.shape}")
        if not linalg.is_unitary(u, 1e-10):
            raise ValueError("gate matrix is not unitary")
        u = u.copy()
        u.setflags(write=False)
        object.__setattr__(self, "u", u)


@dataclass(frozen=True)
class TransformResult:
    """Filtered source state and the probability that the filter passed.

    ``success_probability`` is conditional on the input trace, i.e.
    ``trace(rho_out) / trace(rho_in) ** copies``; for normalized inputs it is
    simply ``trace(rho_out)``.  ``factored`` is False when the projected
    two-spin state is not a product with the target projector.
    """

    rho_out: DensityMatrix
    success_probability: float
    factored: bool = True


def block_gate(top_left: np.ndarray) -> np.ndarray:
    u = np.zeros((4, 4), dtype=np.complex128)
    u[:2, :2] = top_left
    u[2:, 2:] = IDENTITY2
    return u


def xor_gate() -> TwoQubitGate:
    """Controlled-NOT: flips the target iff the source is spin-up (index 0)."""
    return TwoQubitGate(block_gate(SIGMA_X), name="xor")


def exp_zx_gate(angle: float = math.pi / 8) -> TwoQubitGate:
    """``exp(i * angle * sigma_z (x) sigma_x)``; the default angle deforms the sphere non-trivially."""
    return TwoQubitGate(linalg.expi_hermitian(angle * linalg.tensor(SIGMA_Z, SIGMA_X)), name="exp-zx")


def _as_density(rho) -> DensityMatrix:
    return rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho)


def _require_qubit(rho: DensityMatrix) -> None:
    if rho.dim != 2:
        raise DimensionError(f"expected a single spin-1/2 (2x2) state, got dimension {rho.dim}")


def pipeline(rho, gate: TwoQubitGate | None = None) -> TransformResult:
    """Two copies, gate, target projected onto spin-down, source extracted.

    Computes ``(1 (x) P-) U (rho (x) rho) U^dag (1 (x) P-)`` at dimension 4 and
    checks that it factors as ``rho_out (x) P-``.
    """
    rho = _as_density(rho)
    _require_qubit(rho)
    gate = gate or xor_gate()
    u = gate.u
    big = u @ linalg.tensor(rho.mat, rho.mat) @ linalg.dagger(u)
    k = linalg.tensor(IDENTITY2, PROJ_DOWN)
    projected = k @ big @ k
    out = linalg.partial_trace(projected, [2, 2], keep=[0])
    factored = linalg.allclose(projected, linalg.tensor(out, PROJ_DOWN), FACTOR_TOL)
    tr_in = rho.trace
    return TransformResult(DensityMatrix(out), float(np.trace(out).real) / tr_in**2, factored)


def square_elements(rho) -> TransformResult:
    """Closed form of the XOR pipeline: every matrix element squared."""
    rho = _as_density(rho)
    _require_qubit(rho)
    out = rho.mat**2
    return TransformResult(DensityMatrix(out), float(np.trace(out).real) / rho.trace**2)


def generalized_xor(n_targets: int) -> np.ndarray:
    """Permutation flipping all ``n_targets`` target spins iff the source is spin-up."""
    dim = 2 ** (n_targets + 1)
    n_t = 2**n_targets
    u = np.zeros((dim, dim), dtype=np.complex128)
    for col in range(dim):
        source, target = divmod(col, n_t)
        if source == 0:
            target ^= n_t - 1
        u[source * n_t + target, col] = 1.0
    return u


def generalized_pipeline(rho, n: int) -> TransformResult:
    """``n + 1`` copies, generalized XOR, all ``n`` targets projected onto spin-down."""
    rho = _as_density(rho)
    _require_qubit(rho)
    if n < 1:
        raise RangeError(f"need at least one target copy, got n={n}")
    copies = [rho.mat] * (n + 1)
    big = linalg.tensor(*copies)
    u = generalized_xor(n)
    big = u @ big @ linalg.dagger(u)
    target_proj = linalg.tensor(*([PROJ_DOWN] * n)) if n > 1 else PROJ_DOWN
    k = linalg.tensor(IDENTITY2, target_proj)
    projected = k @ big @ k
    out = linalg.partial_trace(projected, [2] * (n + 1), keep=[0])
    factored = linalg.allclose(projected, linalg.tensor(out, target_proj), FACTOR_TOL)
    return TransformResult(DensityMatrix(out), float(np.trace(out).real) / rho.trace ** (n + 1), factored)


MAX_VERIFIED_TARGETS = 3


def power_transform(rho, n: int, verify: bool = True) -> TransformResult:
    """Raise every matrix element to the power ``n + 1``.

    For ``n <= 3`` the closed form is checked against the explicit
    ``2**(n+1)``-dimensional generalized-XOR pipeline unless ``verify`` is off.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise RangeError(f"n must be a positive integer, got {n!r}")
    rho = _as_density(rho)
    _require_qubit(rho)
    out = rho.mat ** (n + 1)
    result = TransformResult(DensityMatrix(out), float(np.trace(out).real) / rho.trace ** (n + 1))
    if verify and n <= MAX_VERIFIED_TARGETS:
        oracle = generalized_pipeline(rho, n)
        if not (oracle.factored and linalg.allclose(oracle.rho_out.mat, out, CLOSED_FORM_TOL)):
            raise VerificationError("element power disagrees with generalized-XOR pipeline")
    return result


def qudit_permutation(d: int) -> np.ndarray:
    """Involution on ``C^d (x) C^d`` swapping basis states ``(i, i)`` and ``(i, d-1)``."""
    u = np.eye(d * d, dtype=np.complex128)
    for i in range(d - 1):
        a, b = i * d + i, i * d + (d - 1)
        u[[a, b]] = u[[b, a]]
    return u


def qudit_square(psi: PureState) -> PureState:
    """Square each amplitude of a pure qudit state via two copies and a filter.

    The product state is permuted so that ``psi_i**2`` lands on ``(i, d-1)``,
    and the target is projected onto its last level.  The returned state is
    subnormalized; its squared norm is the success probability.
    """
    if not psi.normalized:
        raise RangeError("qudit_square expects a normalized input state")
    d = psi.dim
    product = np.kron(psi.vec, psi.vec)
    rotated = qudit_permutation(d) @ product
    out = rotated.reshape(d, d)[:, d - 1]
    if not linalg.allclose(out, psi.vec**2, CLOSED_FORM_TOL):
        raise VerificationError("qudit filter output differs from component-wise squaring")
    return PureState(out, normalized=False)


@dataclass(frozen=True)
class SpherePoint:
    theta: float
    phi: float
    bloch_in: BlochVector
    bloch_out: BlochVector
    bloch_out_normalized: BlochVector
    success_probability: float


def sphere_grid(n_theta: int, n_phi: int):
    """Polar angles span [0, pi] inclusive; azimuths are ``2 pi j / n_phi``."""
    if n_theta < 2 or n_phi < 2:
        raise RangeError("grid counts must be at least 2")
    thetas = [math.pi * i / (n_theta - 1) for i in range(n_theta)]
    phis = [2.0 * math.pi * j / n_phi for j in range(n_phi)]
    return thetas, phis


def sphere_map(gate: TwoQubitGate, n_theta: int, n_phi: int) -> List[SpherePoint]:
    """Push a grid of pure states through :func:`pipeline`; rows are theta-major."""
    thetas, phis = sphere_grid(n_theta, n_phi)
    points = []
    for theta in thetas:
        for phi in phis:
            rho = DensityMatrix.from_pure(pure_from_angles(theta, phi))
            res = pipeline(rho, gate)
            points.append(
                SpherePoint(
                    theta=theta,
                    phi=phi,
                    bloch_in=bloch_from_density(rho),
                    bloch_out=bloch_from_density(res.rho_out),
                    bloch_out_normalized=bloch_from_density(res.rho_out, normalized=True),
                    success_probability=res.success_probability,
                )
            )
    return points
