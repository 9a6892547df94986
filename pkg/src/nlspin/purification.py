"""Entanglement purification of mixed spin pairs towards the singlet.

Alice and Bob share two copies of a two-spin state.  Each applies a
controlled gate from their source spin to their target spin (Bob's with a
sign flip), both targets are measured, and the source pair is kept on a
matching outcome.  A bilateral pi/2 rotation about x then reshuffles the Bell
components before the next round.

Subsystem order of the doubled state is ``(A1, B1, A2, B2)``: the first pair
is the source, the second the target.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from . import linalg
from .errors import DimensionError, RangeError, VerificationError
from .states import (
    IDENTITY2,
    PROJ_DOWN,
    PROJ_UP,
    SIGMA_X,
    SIGMA_Y,
    DensityMatrix,
    fidelity_singlet,
    werner,
)
from .transform import TwoQubitGate, block_gate

CLOSED_FORM_TOL = 1e-12


class Branch(enum.Enum):
    MINUS_MINUS = "--"
    PLUS_PLUS = "++"


class Variant(enum.Enum):
    MINUS_ONLY = "minus-only"
    BOTH = "both"


def alice_bob_gates() -> Tuple[TwoQubitGate, TwoQubitGate]:
    """``U_A = [[-i sigma_y, 0], [0, 1]]`` and ``U_B = [[i sigma_y, 0], [0, 1]]`` on (source, target)."""
    return (
        TwoQubitGate(block_gate(-1j * SIGMA_Y), name="U_A"),
        TwoQubitGate(block_gate(1j * SIGMA_Y), name="U_B"),
    )


def bilateral_gate() -> np.ndarray:
    """``U_A (x) U_B`` acting on the doubled state in ``(A1, B1, A2, B2)`` order."""
    ua, ub = alice_bob_gates()
    # tensor(ua, ub) acts on (A1, A2, B1, B2)
    return linalg.permute_subsystems(linalg.tensor(ua.u, ub.u), [2, 2, 2, 2], [0, 2, 1, 3])


_SIGNS = np.array([[(-1) ** (i + j) for j in range(4)] for i in range(4)], dtype=float)


def signed_square(rho) -> np.ndarray:
    """Closed form of the ``--`` branch: entry ``(I, J)`` becomes ``(-1)**(I+J) * rho_IJ**2``."""
    m = rho.mat if isinstance(rho, DensityMatrix) else linalg.as_matrix(rho)
    if m.shape != (4, 4):
        raise DimensionError(f"expected a 4x4 two-spin state, got {m.shape}")
    return _SIGNS * m**2


@dataclass(frozen=True)
class PurifyStepResult:
    rho_out: DensityMatrix
    yield_probability: float
    branch: Branch


def branch_pipeline(rho, branch: Branch) -> Tuple[np.ndarray, bool]:
    """Literal 16-dimensional gate-and-filter computation for one outcome branch.

    Returns the (subnormalized) source-pair matrix and whether the projected
    state factored as ``rho_out (x) P_tt``.
    """
    m = rho.mat if isinstance(rho, DensityMatrix) else linalg.as_matrix(rho)
    if m.shape != (4, 4):
        raise DimensionError(f"expected a 4x4 two-spin state, got {m.shape}")
    proj = PROJ_DOWN if branch is Branch.MINUS_MINUS else PROJ_UP
    u = bilateral_gate()
    big = u @ linalg.tensor(m, m) @ linalg.dagger(u)
    k = linalg.tensor(IDENTITY2, IDENTITY2, proj, proj)
    projected = k @ big @ k
    out = linalg.partial_trace(projected, [2, 2, 2, 2], keep=[0, 1])
    factored = linalg.allclose(projected, linalg.tensor(out, proj, proj), 1e-10)
    return out, factored


def purify_step(rho, branch: Branch = Branch.MINUS_MINUS) -> PurifyStepResult:
    """One filtering round on two copies of ``rho``.

    The ``--`` branch is cross-checked against :func:`signed_square`.  The
    ``++`` branch has no such simple form (its entries mix ``rho_IJ`` with
    the bit-flipped entry), so only the tensor result is used.
    """
    rho = rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho)
    if rho.dim != 4:
        raise DimensionError(f"expected a 4x4 two-spin state, got dimension {rho.dim}")
    out, factored = branch_pipeline(rho, branch)
    if not factored:
        raise VerificationError("target pair was not left in the selected product state")
    if branch is Branch.MINUS_MINUS and not linalg.allclose(out, signed_square(rho), CLOSED_FORM_TOL):
        raise VerificationError("signed element squaring disagrees with the 16-dim pipeline")
    y = float(np.trace(out).real) / rho.trace**2
    return PurifyStepResult(DensityMatrix(out), y, branch)


def bilateral_rotation_matrix() -> np.ndarray:
    """``R (x) R`` with ``R = exp(-i pi/4 sigma_x)``."""
    r = linalg.expi_hermitian(-math.pi / 4 * SIGMA_X)
    return linalg.tensor(r, r)


def bilateral_rotation(rho) -> DensityMatrix:
    rho = rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho)
    if rho.dim != 4:
        raise DimensionError(f"expected a 4x4 two-spin state, got dimension {rho.dim}")
    rr = bilateral_rotation_matrix()
    return DensityMatrix(rr @ rho.mat @ linalg.dagger(rr))


@dataclass(frozen=True)
class TrajectoryStep:
    iteration: int
    fidelity: float
    yield_probability: float
    cumulative_yield: float


@dataclass(frozen=True)
class Trajectory:
    """Singlet fidelity after each round.

    Row 0 is the input (yield 1).  ``cumulative_yield`` is the product of the
    per-round success probabilities; the number of surviving pairs per
    initial pair is that times ``2**-iteration``.
    """

    f0: float
    variant: Variant
    steps: List[TrajectoryStep]
    final_state: DensityMatrix = field(compare=False)

    @property
    def fidelities(self) -> List[float]:
        return [s.fidelity for s in self.steps]


def purify_round(rho: DensityMatrix, variant: Variant) -> Tuple[DensityMatrix, float]:
    """Filter, renormalize and rotate once; returns the new state and the round's yield."""
    mm = purify_step(rho, Branch.MINUS_MINUS)
    out = mm.rho_out.mat
    y = mm.yield_probability
    if variant is Variant.BOTH:
        pp = purify_step(rho, Branch.PLUS_PLUS)
        out = out + pp.rho_out.mat
        y += pp.yield_probability
    out = out / np.trace(out).real
    return bilateral_rotation(out), y


def iterate(f0: float, k: int, variant: Variant | str = Variant.MINUS_ONLY, initial: DensityMatrix | None = None) -> Trajectory:
    """Run ``k`` purification rounds starting from a Werner state of fidelity ``f0``.

    ``initial`` replaces the Werner input when given (``f0`` is then only
    recorded).
    """
    variant = Variant(variant)
    if not (0.0 <= f0 <= 1.0):
        raise RangeError(f"f0 must lie in [0, 1], got {f0!r}")
    if int(k) != k or k < 1:
        raise RangeError(f"iteration count must be a positive integer, got {k!r}")
    rho = initial.renormalized() if initial is not None else werner(f0)
    cumulative = 1.0
    steps = [TrajectoryStep(0, fidelity_singlet(rho), 1.0, 1.0)]
    for i in range(1, int(k) + 1):
        rho, y = purify_round(rho, variant)
        cumulative *= y
        steps.append(TrajectoryStep(i, fidelity_singlet(rho), y, cumulative))
    return Trajectory(f0=f0, variant=variant, steps=steps, final_state=rho)
