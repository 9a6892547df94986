"""Small dense complex linear algebra.

Matrices are plain ``numpy`` complex arrays. Everything here is written for the
dimensions this package needs (2 through 16), where clarity beats speed.

Tensor products use the "left factor most significant" convention: in
``tensor(a, b)`` the row index ``(i_a, i_b)`` maps to ``i_a * rows_b + i_b``.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, NotHermitianError

ATOL = 1e-12
HERMITIAN_TOL = 1e-10


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a finite 2-d complex128 array."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] == 0 or a.shape[1] == 0:
        raise DimensionError(f"expected a non-empty 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.transpose(m))


def allclose(a, b, atol: float = ATOL) -> bool:
    """Entry-wise absolute comparison; no relative slack."""
    a = np.asarray(a)
    b = np.asarray(b)
    return a.shape == b.shape and bool(np.all(np.abs(a - b) <= atol))


def tensor(*mats) -> np.ndarray:
    """Kronecker product of one or more matrices, left factor most significant."""
    if not mats:
        raise ValueError("tensor needs at least one operand")
    out = as_matrix(mats[0])
    for m in mats[1:]:
        b = as_matrix(m)
        ra, ca = out.shape
        rb, cb = b.shape
        out = (out[:, None, :, None] * b[None, :, None, :]).reshape(ra * rb, ca * cb)
    return out


def _check_dims(m: np.ndarray, dims: Sequence[int]) -> None:
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"matrix must be square, got {m.shape}")
    if any(int(d) < 1 for d in dims) or math.prod(dims) != m.shape[0]:
        raise DimensionError(f"subsystem dims {list(dims)} do not match matrix dimension {m.shape[0]}")


def partial_trace(m, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    Kept subsystems stay in their original relative order.
    """
    m = as_matrix(m)
    dims = [int(d) for d in dims]
    _check_dims(m, dims)
    keep = sorted(set(keep))
    n = len(dims)
    if any(k < 0 or k >= n for k in keep):
        raise DimensionError(f"keep indices {keep} out of range for {n} subsystems")
    if len(keep) == n:
        return m.copy()

    t = m.reshape(dims + dims)
    traced = [k for k in range(n) if k not in keep]
    # trace the highest axes first so lower axis numbers stay valid
    for k in sorted(traced, reverse=True):
        n_now = t.ndim // 2
        t = np.trace(t, axis1=k, axis2=k + n_now)
    d_keep = math.prod(dims[k] for k in keep) if keep else 1
    return t.reshape(d_keep, d_keep)


def permute_subsystems(m, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors: subsystem ``perm[k]`` of the input becomes subsystem ``k``."""
    m = as_matrix(m)
    dims = [int(d) for d in dims]
    _check_dims(m, dims)
    n = len(dims)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"{perm} is not a permutation of {n} subsystems")
    t = m.reshape(dims + dims)
    t = t.transpose(list(perm) + [p + n for p in perm])
    return t.reshape(m.shape)


def is_hermitian(m, atol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and allclose(m, dagger(m), atol)


def _require_hermitian(m, atol: float) -> np.ndarray:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"matrix must be square, got {m.shape}")
    if not is_hermitian(m, atol):
        dev = float(np.max(np.abs(m - dagger(m))))
        raise NotHermitianError(f"matrix is not Hermitian (max |M - M^dag| = {dev:.3e})")
    return m


def jacobi_eigh(m, tol: float = ATOL, max_sweeps: int = 100, herm_tol: float = HERMITIAN_TOL):
    """Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Each pivot ``(p, q)`` first removes the phase of ``a_pq`` with a diagonal
    unitary, then annihilates the now-real off-diagonal entry with a plane
    rotation.  Sweeps stop once the off-diagonal Frobenius norm falls below
    ``tol`` times ``max(1, ||m||_F)``.

    Returns
    -------
    values : ndarray of float, ascending
    vectors : ndarray, columns are the matching orthonormal eigenvectors
    """
    a = _require_hermitian(m, herm_tol)
    a = 0.5 * (a + dagger(a))
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    threshold = tol * max(1.0, float(np.linalg.norm(a)))
    off_mask = ~np.eye(n, dtype=bool)

    for _ in range(max_sweeps):
        off = float(np.linalg.norm(a[off_mask]))
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                phase = apq / mag
                app = a[p, p].real
                aqq = a[q, q].real
                theta = 0.5 * math.atan2(2.0 * mag, app - aqq)
                c, s = math.cos(theta), math.sin(theta)
                # W = diag(1, conj(phase)) @ [[c, -s], [s, c]]
                w = np.array([[c, -s], [np.conj(phase) * s, np.conj(phase) * c]], dtype=np.complex128)
                idx = [p, q]
                a[:, idx] = a[:, idx] @ w
                a[idx, :] = dagger(w) @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ w
    else:
        raise ArithmeticError(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps")

    values = np.real(np.diag(a)).copy()
    order = np.argsort(values, kind="stable")
    return values[order], v[:, order]


def eigvals_hermitian(m, herm_tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix."""
    values, _ = jacobi_eigh(m, herm_tol=herm_tol)
    return values


def expi_hermitian(h, herm_tol: float = HERMITIAN_TOL) -> np.ndarray:
    """``exp(i h)`` for Hermitian ``h``, built from its eigen-decomposition."""
    values, vectors = jacobi_eigh(h, herm_tol=herm_tol)
    return (vectors * np.exp(1j * values)) @ dagger(vectors)


def is_unitary(u, atol: float = 1e-10) -> bool:
    u = np.asarray(u)
    return u.ndim == 2 and u.shape[0] == u.shape[1] and allclose(u @ dagger(u), np.eye(u.shape[0]), atol)


def min_eigenvalue(m) -> float:
    return float(eigvals_hermitian(m)[0])
