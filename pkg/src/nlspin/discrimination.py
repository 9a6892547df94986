"""Unambiguous discrimination of two non-orthogonal spin-1/2 states.

Four zero-error strategies are provided, all evaluated from the actual states
and measurement operators rather than from formulas:

* ``nonlinear``    two copies, element-squaring filter, then a von Neumann
                   measurement along the filtered state's Bloch axis
* ``lige2``        a loss-induced generalized (LIGe) measurement on each copy
* ``lige-product`` one LIGe measurement on the two-copy product state
* ``povm``         the optimal three-outcome POVM (on two copies by default)

:func:`simulate_trials` samples any of them with a counter-based generator so
that trial ``i`` depends only on ``(seed, i)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Tuple

import numpy as np

from . import linalg
from .errors import DegenerateError, RangeError
from .states import (
    DensityMatrix,
    PureState,
    bloch_from_density,
    density_from_bloch,
    overlap,
)
from .transform import square_elements

ZERO_TOL = 1e-12


class Outcome(enum.Enum):
    STATE1 = "State1"
    STATE2 = "State2"
    INCONCLUSIVE = "Inconclusive"


Distribution = Dict[Outcome, float]


def _report_for(which: int) -> Outcome:
    if which not in (1, 2):
        raise ValueError(f"'which' must be 1 or 2, got {which!r}")
    return Outcome.STATE1 if which == 1 else Outcome.STATE2


def correct_probability(dist: Mapping[Outcome, float], which: int) -> float:
    return dist[_report_for(which)]


def wrong_probability(dist: Mapping[Outcome, float], which: int) -> float:
    return dist[_report_for(3 - which)]


# -- the constrained pair -----------------------------------------------------


@dataclass(frozen=True)
class DiscriminationPair:
    """Two pure states with polar angles ``theta``, ``theta + pi`` and azimuths ``phi``, ``phi + pi/2``.

    Under element squaring these become orthogonal.  ``degenerate`` marks the
    endpoints ``theta in {0, pi}`` where the inputs are already orthogonal.
    """

    theta: float
    phi: float
    psi1: PureState
    psi2: PureState
    rho1: DensityMatrix
    rho2: DensityMatrix
    degenerate: bool = False

    @property
    def overlap(self) -> float:
        return overlap(self.psi1, self.psi2)


def build_pair(theta: float, phi: float = 0.0) -> DiscriminationPair:
    if not (0.0 <= theta <= math.pi):
        raise RangeError(f"theta must lie in [0, pi], got {theta!r}")
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    psi1 = PureState(np.array([c, np.exp(1j * phi) * s]))
    psi2 = PureState(np.array([s, -1j * np.exp(1j * phi) * c]))
    degenerate = math.sin(theta) < 1e-15
    return DiscriminationPair(
        theta=theta,
        phi=phi,
        psi1=psi1,
        psi2=psi2,
        rho1=DensityMatrix.from_pure(psi1),
        rho2=DensityMatrix.from_pure(psi2),
        degenerate=degenerate,
    )


def pair_overlap(theta: float) -> float:
    return math.sin(theta) / math.sqrt(2.0)


def nonlinear_measurement(pair: DiscriminationPair) -> Tuple[np.ndarray, np.ndarray]:
    """Projectors of the von Neumann measurement used after filtering.

    The first projects onto the Bloch direction of the filtered state 1, the
    second onto its antipode.
    """
    out1 = square_elements(pair.rho1).rho_out
    axis = bloch_from_density(out1, normalized=True)
    pi1 = density_from_bloch(axis).mat
    return pi1, np.eye(2) - pi1


def discriminate_nonlinear(pair: DiscriminationPair, which: int) -> Distribution:
    """Outcome distribution when the unknown state is ``pair.rho<which>``."""
    _report_for(which)
    rho = pair.rho1 if which == 1 else pair.rho2
    out = square_elements(rho).rho_out.mat
    pi1, pi2 = nonlinear_measurement(pair)
    p1 = float(np.trace(pi1 @ out).real)
    p2 = float(np.trace(pi2 @ out).real)
    return {Outcome.STATE1: p1, Outcome.STATE2: p2, Outcome.INCONCLUSIVE: 1.0 - p1 - p2}


def nonlinear_success(pair: DiscriminationPair) -> float:
    return 0.5 * sum(correct_probability(discriminate_nonlinear(pair, w), w) for w in (1, 2))


# -- LIGe ---------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LigeConstruction:
    """LIGe measurement for a pair of pure states.

    The states are embedded in one extra dimension (the loss mode ``phi0``,
    the last basis index).  Writing them as ``cos(a/2) w +- sin(a/2) u`` with
    ``cos a`` their overlap, a rotation about ``u`` by the angle whose cosine
    is ``tan(a/2)`` tilts ``w`` into ``phi0``.  Afterwards the measurement
    directions ``phi1 = (w + u)/sqrt2`` and ``phi2 = (w - u)/sqrt2`` each
    receive only one of the two states.
    """

    alpha: float
    rotation_angle: float
    phi0: np.ndarray
    phi1: np.ndarray
    phi2: np.ndarray
    axis: np.ndarray
    rotation: np.ndarray
    inputs: Tuple[np.ndarray, np.ndarray]
    outputs: Tuple[np.ndarray, np.ndarray]

    @property
    def dim(self) -> int:
        return self.rotation.shape[0]

    def distribution(self, which: int) -> Distribution:
        _report_for(which)
        out = self.outputs[which - 1]
        p1 = abs(np.vdot(self.phi1, out)) ** 2
        p2 = abs(np.vdot(self.phi2, out)) ** 2
        return {Outcome.STATE1: float(p1), Outcome.STATE2: float(p2), Outcome.INCONCLUSIVE: float(1.0 - p1 - p2)}

    def success(self) -> float:
        return 0.5 * sum(correct_probability(self.distribution(w), w) for w in (1, 2))


def _check_alpha(alpha: float) -> None:
    if not (0.0 < alpha <= math.pi / 2):
        raise RangeError(f"alpha must lie in (0, pi/2] so that tan(alpha/2) <= 1, got {alpha!r}")


def plane_rotation(w: np.ndarray, v: np.ndarray, angle: float) -> np.ndarray:
    """Rotate ``w`` towards ``v`` by ``angle`` (orthonormal real-plane Givens rotation), identity elsewhere."""
    dim = w.size
    pw = np.outer(w, w.conj())
    pv = np.outer(v, v.conj())
    return (
        np.eye(dim, dtype=np.complex128)
        + (math.cos(angle) - 1.0) * (pw + pv)
        + math.sin(angle) * (np.outer(v, w.conj()) - np.outer(w, v.conj()))
    )


def lige_construction(psi1, psi2) -> LigeConstruction:
    """Build the LIGe measurement for two normalized states of any dimension."""
    a = np.asarray(psi1.vec if isinstance(psi1, PureState) else psi1, dtype=np.complex128)
    b = np.asarray(psi2.vec if isinstance(psi2, PureState) else psi2, dtype=np.complex128)
    if a.shape != b.shape:
        raise ValueError("states must have the same dimension")
    g = np.vdot(a, b)
    s = abs(g)
    if s >= 1.0 - 1e-12:
        raise DegenerateError("states are identical up to phase")
    # global phase on the second state does not change any probability
    b_aligned = b * (np.conj(g) / s) if s > 0 else b
    alpha = math.acos(min(1.0, s))
    _check_alpha(alpha)

    d = a.size
    embed = lambda v: np.concatenate([v, [0.0]])  # noqa: E731
    w = embed((a + b_aligned) / (2.0 * math.cos(alpha / 2)))
    u = embed((a - b_aligned) / (2.0 * math.sin(alpha / 2)))
    phi0 = np.zeros(d + 1, dtype=np.complex128)
    phi0[d] = 1.0

    angle = math.acos(min(1.0, math.tan(alpha / 2)))
    rot = plane_rotation(w, phi0, angle)
    ins = (embed(a), embed(b_aligned))
    outs = (rot @ ins[0], rot @ ins[1])
    return LigeConstruction(
        alpha=alpha,
        rotation_angle=angle,
        phi0=phi0,
        phi1=(w + u) / math.sqrt(2.0),
        phi2=(w - u) / math.sqrt(2.0),
        axis=u,
        rotation=rot,
        inputs=ins,
        outputs=outs,
    )


def lige_canonical_states(alpha: float) -> Tuple[PureState, PureState]:
    """Qubit states ``cos(a/2) w +- sin(a/2) u`` with ``w, u = (1, +-1)/sqrt2``; overlap ``cos(alpha)``.

    Once embedded, the measurement directions ``(w +- u)/sqrt2`` are exactly
    the first two basis vectors.
    """
    _check_alpha(alpha)
    w = np.array([1.0, 1.0]) / math.sqrt(2.0)
    u = np.array([1.0, -1.0]) / math.sqrt(2.0)
    c, s = math.cos(alpha / 2), math.sin(alpha / 2)
    return PureState(c * w + s * u), PureState(c * w - s * u)


def lige_single_construction(alpha: float) -> LigeConstruction:
    psi1, psi2 = lige_canonical_states(alpha)
    return lige_construction(psi1, psi2)


def lige_single(alpha: float, which: int) -> Distribution:
    """Single-copy LIGe outcome distribution for the canonical pair with overlap ``cos(alpha)``."""
    return lige_single_construction(alpha).distribution(which)


def lige_closed_form_outputs(alpha: float) -> Tuple[np.ndarray, np.ndarray]:
    """Rotated states in the (phi1, phi2, phi0) ordering used by the embedding."""
    a = math.sqrt(2.0) * math.sin(alpha / 2)
    b = math.sqrt(math.cos(alpha))
    return np.array([a, 0.0, b], dtype=np.complex128), np.array([0.0, a, b], dtype=np.complex128)


def _two_independent(d: Distribution, which: int) -> Distribution:
    """Measure each copy separately; stop at the first conclusive answer."""
    inc = d[Outcome.INCONCLUSIVE]
    return {
        Outcome.STATE1: d[Outcome.STATE1] * (1.0 + inc),
        Outcome.STATE2: d[Outcome.STATE2] * (1.0 + inc),
        Outcome.INCONCLUSIVE: inc * inc,
    }


def lige_two_copies(alpha: float) -> float:
    """Success probability of two independent single-copy LIGe measurements."""
    con = lige_single_construction(alpha)
    return 0.5 * sum(correct_probability(_two_independent(con.distribution(w), w), w) for w in (1, 2))


def product_states(psi1: PureState, psi2: PureState) -> Tuple[PureState, PureState]:
    return PureState(np.kron(psi1.vec, psi1.vec)), PureState(np.kron(psi2.vec, psi2.vec))


def lige_product_construction(alpha: float) -> LigeConstruction:
    psi1, psi2 = product_states(*lige_canonical_states(alpha))
    return lige_construction(psi1, psi2)


def lige_product(alpha: float) -> float:
    """Success of one LIGe measurement on the two-copy product state (embedding dimension 5)."""
    return lige_product_construction(alpha).success()


# -- optimal POVM -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Povm:
    elements: List[Tuple[Outcome, np.ndarray]]
    x: float
    overlap: float

    def element(self, label: Outcome) -> np.ndarray:
        for lab, m in self.elements:
            if lab is label:
                return m
        raise KeyError(label)

    def completeness_residual(self) -> float:
        total = sum(m for _, m in self.elements)
        return float(np.max(np.abs(total - np.eye(total.shape[0]))))

    def min_eigenvalue(self) -> float:
        return min(linalg.min_eigenvalue(m) for _, m in self.elements)

    def distribution(self, psi) -> Distribution:
        v = psi.vec if isinstance(psi, PureState) else np.asarray(psi)
        return {lab: float(np.vdot(v, m @ v).real) for lab, m in self.elements}


def _span_projector(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    e1 = a / np.linalg.norm(a)
    r = b - np.vdot(e1, b) * e1
    e2 = r / np.linalg.norm(r)
    return np.outer(e1, e1.conj()) + np.outer(e2, e2.conj())


def optimal_povm(psi1: PureState, psi2: PureState) -> Povm:
    """Optimal unambiguous POVM for two equiprobable pure states.

    ``A1 = x (1 - |psi2><psi2|)``, ``A2 = x (1 - |psi1><psi1|)`` and
    ``A? = 1 - A1 - A2`` with ``x = 1 / (1 + |<psi1|psi2>|)``.  In more than
    two dimensions the identity inside ``A1`` and ``A2`` is the projector onto
    the span of the two states; with the full identity ``A?`` would be
    negative on the orthogonal complement.
    """
    s = overlap(psi1, psi2)
    if s <= 0.0 or s >= 1.0:
        raise DegenerateError(f"optimal POVM needs 0 < overlap < 1, got {s!r}")
    x = 1.0 / (1.0 + s)
    d = psi1.dim
    span = np.eye(d, dtype=np.complex128) if d == 2 else _span_projector(psi1.vec, psi2.vec)
    a1 = x * (span - psi2.density())
    a2 = x * (span - psi1.density())
    a_inc = np.eye(d) - a1 - a2
    return Povm(
        elements=[(Outcome.STATE1, a1), (Outcome.STATE2, a2), (Outcome.INCONCLUSIVE, a_inc)],
        x=x,
        overlap=s,
    )


def povm_success(povm: Povm, psi1: PureState, psi2: PureState) -> float:
    return 0.5 * (povm.distribution(psi1)[Outcome.STATE1] + povm.distribution(psi2)[Outcome.STATE2])


# -- Monte Carlo --------------------------------------------------------------

STRATEGIES = ("nonlinear", "lige2", "lige-product", "povm")
GENERATOR_NAME = "philox4x64-10"
_WORDS_PER_TRIAL = 4  # one Philox counter block
_U53 = 2.0**-53


def pair_for(params: Mapping) -> Tuple[PureState, PureState]:
    """Input states from ``params``: the constrained pair for ``theta``/``phi`` or the canonical pair for ``alpha``."""
    if "alpha" in params:
        return lige_canonical_states(float(params["alpha"]))
    pair = build_pair(float(params["theta"]), float(params.get("phi", 0.0)))
    return pair.psi1, pair.psi2


def strategy_distributions(strategy: str, params: Mapping) -> Tuple[Distribution, Distribution]:
    """Outcome distributions for input state 1 and input state 2."""
    if strategy == "nonlinear":
        if "theta" not in params:
            raise ValueError("the nonlinear strategy needs 'theta'")
        pair = build_pair(float(params["theta"]), float(params.get("phi", 0.0)))
        return discriminate_nonlinear(pair, 1), discriminate_nonlinear(pair, 2)
    psi1, psi2 = pair_for(params)
    if strategy == "lige2":
        con = lige_construction(psi1, psi2)
        return _two_independent(con.distribution(1), 1), _two_independent(con.distribution(2), 2)
    if strategy == "lige-product":
        con = lige_construction(*product_states(psi1, psi2))
        return con.distribution(1), con.distribution(2)
    if strategy == "povm":
        copies = int(params.get("copies", 2))
        if copies == 2:
            psi1, psi2 = product_states(psi1, psi2)
        elif copies != 1:
            raise RangeError(f"povm supports 1 or 2 copies, got {copies}")
        povm = optimal_povm(psi1, psi2)
        return povm.distribution(psi1), povm.distribution(psi2)
    raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")


def analytic_success(strategy: str, params: Mapping) -> float:
    d1, d2 = strategy_distributions(strategy, params)
    return 0.5 * (d1[Outcome.STATE1] + d2[Outcome.STATE2])


@dataclass(frozen=True)
class TrialStats:
    strategy: str
    n_trials: int
    counts: Dict[str, int]
    empirical_success: float
    analytic_success: float
    seed: int
    overlap: float = math.nan
    generator: str = GENERATOR_NAME
    params: Dict[str, float] = field(default_factory=dict)

    def binomial_sigma(self) -> float:
        p = self.analytic_success
        return math.sqrt(max(p * (1.0 - p), 0.0) / self.n_trials)


def trial_uniforms(seed: int, start: int, stop: int) -> np.ndarray:
    """Uniform draws for trials ``start..stop-1``, shape ``(stop - start, 4)``.

    Trial ``i`` reads Philox counter block ``i`` under key ``seed``, so any
    chunking of the trial range gives the same numbers.
    """
    bg = np.random.Philox(key=seed)
    bg.advance(start)
    raw = bg.random_raw(_WORDS_PER_TRIAL * (stop - start)).reshape(-1, _WORDS_PER_TRIAL)
    return (raw >> np.uint64(11)).astype(np.float64) * _U53


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not (0 <= seed < 2**64):
        raise RangeError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def simulate_trials(
    strategy: str,
    params: Mapping,
    n_trials: int,
    seed: int,
    chunk_size: int | None = None,
) -> TrialStats:
    """Sample ``n_trials`` equiprobable inputs and the strategy's outcomes.

    Per trial: draw 0 picks the input (state 1 if < 1/2), draw 1 picks the
    outcome by inverting the cumulative distribution in the order
    State1, State2, Inconclusive.
    """
    if n_trials < 1:
        raise RangeError(f"n_trials must be >= 1, got {n_trials}")
    seed = _check_seed(seed)
    d1, d2 = strategy_distributions(strategy, params)
    order = (Outcome.STATE1, Outcome.STATE2, Outcome.INCONCLUSIVE)
    cdf = np.array([np.cumsum([d[o] for o in order]) for d in (d1, d2)])

    chunk = chunk_size or n_trials
    correct = wrong = inconclusive = 0
    for start in range(0, n_trials, chunk):
        stop = min(n_trials, start + chunk)
        u = trial_uniforms(seed, start, stop)
        which = (u[:, 0] >= 0.5).astype(np.int64)  # 0 -> state 1, 1 -> state 2
        reported = np.where(u[:, 1] < cdf[which, 0], 0, np.where(u[:, 1] < cdf[which, 1], 1, 2))
        inconclusive += int(np.count_nonzero(reported == 2))
        conclusive = reported != 2
        hits = int(np.count_nonzero(conclusive & (reported == which)))
        correct += hits
        wrong += int(np.count_nonzero(conclusive)) - hits

    return TrialStats(
        strategy=strategy,
        n_trials=n_trials,
        counts={"correct": correct, "wrong": wrong, "inconclusive": inconclusive},
        empirical_success=correct / n_trials,
        analytic_success=0.5 * (d1[Outcome.STATE1] + d2[Outcome.STATE2]),
        seed=seed,
        overlap=overlap(*pair_for(params)),
        params={k: float(v) for k, v in params.items()},
    )
