"""Nonlinear two-copy transformations of spin-1/2 states.

Element squaring by a controlled-NOT and filter, unambiguous discrimination
of non-orthogonal states, and singlet purification of mixed spin pairs.
"""

from .errors import (
    DegenerateError,
    DimensionError,
    NlspinError,
    NotHermitianError,
    RangeError,
    VerificationError,
)
from .states import BellState, BlochVector, DensityMatrix, PureState, werner
from .transform import TransformResult, TwoQubitGate, pipeline, square_elements, xor_gate

__version__ = "0.1.0"
