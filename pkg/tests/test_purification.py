import itertools
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from nlspin import linalg
from nlspin.errors import DimensionError, RangeError
from nlspin.purification import (
    Branch,
    Variant,
    alice_bob_gates,
    bilateral_rotation,
    bilateral_rotation_matrix,
    branch_pipeline,
    iterate,
    purify_round,
    purify_step,
    signed_square,
)
from nlspin.states import BellState, DensityMatrix, SIGMA_X, fidelity_singlet, werner

from conftest import random_density

PSI_M, PSI_P, PHI_M, PHI_P = (b.projector for b in BellState)

# single-spin actions on the target, keyed by the source being up (index 0)
ALICE_FLIP = {0: (1, 1.0), 1: (0, -1.0)}  # -i sigma_y: |+> -> |->, |-> -> -|+>
BOB_FLIP = {0: (1, -1.0), 1: (0, 1.0)}  # i sigma_y: |+> -> -|->, |-> -> |+>


def _gate_action(a1, b1, a2, b2):
    """Image of basis ket |a1 b1 a2 b2> as (a2', b2', coefficient)."""
    coeff = 1.0
    if a1 == 0:
        a2, c = ALICE_FLIP[a2]
        coeff *= c
    if b1 == 0:
        b2, c = BOB_FLIP[b2]
        coeff *= c
    return a2, b2, coeff


def brute_force_branch(rho, keep):
    """Source-pair matrix after both targets read ``keep``, summed ket by ket."""
    out = np.zeros((4, 4), dtype=complex)
    bits = list(itertools.product(range(2), repeat=2))
    for (a1, b1), (a1p, b1p) in itertools.product(bits, repeat=2):
        total = 0j
        for (a2, b2), (a2p, b2p) in itertools.product(bits, repeat=2):
            ta, tb, c = _gate_action(a1, b1, a2, b2)
            tap, tbp, cp = _gate_action(a1p, b1p, a2p, b2p)
            if (ta, tb) == (keep, keep) and (tap, tbp) == (keep, keep):
                total += c * cp * rho[2 * a1 + b1, 2 * a1p + b1p] * rho[2 * a2 + b2, 2 * a2p + b2p]
        out[2 * a1 + b1, 2 * a1p + b1p] = total
    return out


def bell_recurrence(weights):
    """Bell-diagonal weights (psi-, psi+, phi-, phi+) after one filter-and-rotate round; also the yield."""
    a, b, c, d = weights
    n = (a + b) ** 2 + (c + d) ** 2
    return np.array([a * a + b * b, 2 * c * d, c * c + d * d, 2 * a * b]) / n, n / 2


def bell_weights(rho):
    m = rho.mat if isinstance(rho, DensityMatrix) else rho
    return np.array([np.vdot(b.vector, m @ b.vector).real for b in BellState])


# -- gates --


def test_gate_actions():
    ua, ub = alice_bob_gates()
    e = np.eye(4)
    pp, pm, mp, mm = e
    assert_allclose(ua.u @ pp, pm)
    assert_allclose(ub.u @ pp, -pm)
    assert_allclose(ua.u @ mp, mp)
    assert_allclose(ua.u @ mm, mm)
    assert_allclose(ub.u @ mm, mm)
    for g in (ua, ub):
        assert linalg.is_unitary(g.u, 1e-12)


# -- one filtering round --


def test_signed_square_against_brute_force(rng):
    for _ in range(100):
        rho = random_density(rng, 4)
        oracle = brute_force_branch(rho, keep=1)
        assert linalg.allclose(signed_square(rho), oracle, 1e-12)
        assert linalg.allclose(purify_step(rho).rho_out.mat, oracle, 1e-12)


def test_plus_branch_against_brute_force(rng):
    for _ in range(30):
        rho = random_density(rng, 4)
        out, factored = branch_pipeline(rho, Branch.PLUS_PLUS)
        assert factored
        assert linalg.allclose(out, brute_force_branch(rho, keep=0), 1e-12)


def test_plus_branch_is_not_signed_square(rng):
    rho = random_density(rng, 4)
    assert not linalg.allclose(purify_step(rho, Branch.PLUS_PLUS).rho_out.mat, signed_square(rho), 1e-6)


def test_singlet_step():
    res = purify_step(PSI_M)
    assert_allclose(res.rho_out.mat, 0.5 * PSI_M, atol=1e-12)
    assert res.yield_probability == pytest.approx(0.5, abs=1e-12)


def test_maximally_mixed_step():
    res = purify_step(np.eye(4) / 4)
    assert_allclose(res.rho_out.mat, np.eye(4) / 16, atol=1e-15)
    assert res.yield_probability == pytest.approx(0.25)


def test_step_output_positive(rng):
    for _ in range(30):
        rho = random_density(rng, 4)
        for branch in Branch:
            res = purify_step(rho, branch)
            assert linalg.is_hermitian(res.rho_out.mat, 1e-12)
            assert linalg.min_eigenvalue(res.rho_out.mat) >= -1e-10
            assert 0.0 <= res.yield_probability <= 1.0


def test_step_dimension():
    with pytest.raises(DimensionError):
        purify_step(np.eye(2) / 2)


# -- bilateral rotation --


def test_rotation_matrix_closed_form():
    r = (np.eye(2) - 1j * SIGMA_X) / math.sqrt(2)
    assert_allclose(bilateral_rotation_matrix(), np.kron(r, r), atol=1e-15)


def test_rotation_permutes_bell_projectors():
    assert_allclose(bilateral_rotation(PSI_P).mat, PHI_P, atol=1e-12)
    assert_allclose(bilateral_rotation(PHI_P).mat, PSI_P, atol=1e-12)
    assert_allclose(bilateral_rotation(PSI_M).mat, PSI_M, atol=1e-12)
    assert_allclose(bilateral_rotation(PHI_M).mat, PHI_M, atol=1e-12)


def test_rotation_involution_on_bell_diagonal(rng):
    for _ in range(20):
        w = rng.dirichlet(np.ones(4))
        rho = sum(x * p for x, p in zip(w, (PSI_M, PSI_P, PHI_M, PHI_P)))
        assert_allclose(bilateral_rotation(bilateral_rotation(rho)).mat, rho, atol=1e-12)


def test_rotation_preserves_trace_and_singlet_weights(rng):
    for _ in range(20):
        rho = random_density(rng, 4)
        out = bilateral_rotation(rho)
        assert out.trace == pytest.approx(1.0, abs=1e-12)
        assert bell_weights(out)[0] == pytest.approx(bell_weights(rho)[0], abs=1e-12)
        assert bell_weights(out)[2] == pytest.approx(bell_weights(rho)[2], abs=1e-12)


# -- trajectories --


def test_round_matches_bell_recurrence(rng):
    for _ in range(20):
        w = rng.dirichlet(np.ones(4))
        rho = DensityMatrix(sum(x * p for x, p in zip(w, (PSI_M, PSI_P, PHI_M, PHI_P))))
        out, y = purify_round(rho, Variant.MINUS_ONLY)
        expected, expected_yield = bell_recurrence(w)
        assert_allclose(bell_weights(out), expected, atol=1e-12)
        assert y == pytest.approx(expected_yield, abs=1e-12)


def test_trajectory_against_recurrence():
    traj = iterate(0.51, 15)
    w = bell_weights(werner(0.51))
    for step in traj.steps[1:]:
        w, _ = bell_recurrence(w)
        assert step.fidelity == pytest.approx(w[0], abs=1e-10)


def test_trajectory_reference_values():
    f = iterate(0.51, 15).fidelities
    assert len(f) == 16
    assert f[10] == pytest.approx(0.809, abs=0.02)
    assert f[15] >= 0.999
    assert f[15] == pytest.approx(0.99997, abs=1e-5)


def test_trajectory_structure():
    traj = iterate(0.51, 5)
    assert [s.iteration for s in traj.steps] == list(range(6))
    assert traj.steps[0].fidelity == pytest.approx(0.51)
    assert traj.steps[0].yield_probability == 1.0
    cumulative = 1.0
    for s in traj.steps[1:]:
        cumulative *= s.yield_probability
        assert s.cumulative_yield == pytest.approx(cumulative, rel=1e-14)
        assert 0.0 <= s.fidelity <= 1.0


def test_singlet_fixed_point():
    traj = iterate(1.0, 6)
    for s in traj.steps:
        assert s.fidelity == pytest.approx(1.0, abs=1e-12)
    for s in traj.steps[1:]:
        assert s.yield_probability == pytest.approx(0.5, abs=1e-12)


def test_maximally_mixed_fixed_point():
    traj = iterate(0.25, 6)
    for s in traj.steps:
        assert s.fidelity == pytest.approx(0.25, abs=1e-12)
    assert_allclose(traj.final_state.mat, np.eye(4) / 4, atol=1e-12)


@pytest.mark.parametrize("f0", [0.6, 0.75])
def test_convergence_above_half(f0):
    assert iterate(f0, 15).fidelities[-1] > 0.99


def test_f06_regression():
    # pinned from this implementation; the first value also follows from the recurrence by hand
    f = iterate(0.6, 10).fidelities
    assert f[1] == pytest.approx(0.6204379562043794, abs=1e-12)
    assert f[3] == pytest.approx(0.7719304398676659, abs=1e-12)
    assert f[10] == pytest.approx(0.9999999930772793, abs=1e-12)
    assert f[10] > 0.6


def test_eventual_improvement():
    # step-wise monotonicity is not part of the contract, only the end point
    traj = iterate(0.51, 15)
    assert traj.fidelities[-1] > traj.fidelities[0]


@pytest.mark.parametrize("f0", [0.51, 0.6, 0.9])
def test_both_variant_yield_not_lower(f0):
    minus = iterate(f0, 8, Variant.MINUS_ONLY)
    both = iterate(f0, 8, Variant.BOTH)
    for a, b in zip(minus.steps, both.steps):
        assert b.yield_probability >= a.yield_probability - 1e-15


def test_both_variant_on_werner_matches_fidelity():
    # on Werner inputs the ++ branch is Bell-equivalent to the -- branch
    assert_allclose(iterate(0.51, 15, "both").fidelities, iterate(0.51, 15).fidelities, atol=1e-12)


def test_custom_initial_state(rng):
    rho = DensityMatrix(random_density(rng, 4))
    traj = iterate(0.0, 3, initial=rho)
    assert traj.steps[0].fidelity == pytest.approx(fidelity_singlet(rho), abs=1e-14)


def test_iterate_ranges():
    with pytest.raises(RangeError):
        iterate(1.5, 3)
    with pytest.raises(RangeError):
        iterate(0.5, 0)
