"""Symmetric-definite generalized eigenvalue decomposition.

Solves A v = lambda B v for A symmetric positive semi-definite and B
symmetric positive definite, by the standard reduction: factor B = L L^T,
eigendecompose C = L^-1 A L^-T (symmetrized), and back-transform the
eigenvectors by L^-T.  The returned basis is B-orthonormal and eigenvalues
are sorted in non-increasing order.

``pencil_solve`` is the direct counterpart used as an oracle for Tikhonov
filtering: x = (A + lam*B)^-1 rhs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.linalg.lapack import dpotrf

from .errors import InvalidArgumentError, NumericalConsistencyError, SingularPencilError

_JITTER_EPS = 1e-10


def spectral_norm_estimate(M: np.ndarray, iters: int = 12) -> float:
    """Power-iteration estimate of ||M||_2 for symmetric M, deterministic start."""
    p = M.shape[0]
    v = np.ones(p) / np.sqrt(p)
    est = 0.0
    for _ in range(iters):
        w = M @ v
        est = float(np.linalg.norm(w))
        if est == 0.0:
            return 0.0
        v = w / est
    return est


def _inverse_norm_estimate(L: np.ndarray, iters: int = 12) -> float:
    """Power-iteration estimate of ||B^-1||_2 given the Cholesky factor B = L L^T."""
    p = L.shape[0]
    v = np.ones(p) / np.sqrt(p)
    est = 0.0
    for _ in range(iters):
        w = sla.solve_triangular(L, v, lower=True, check_finite=False)
        w = sla.solve_triangular(L, w, lower=True, trans="T", check_finite=False)
        est = float(np.linalg.norm(w))
        if est == 0.0:
            return 0.0
        v = w / est
    return est


@dataclass(frozen=True)
class PencilDecomposition:
    """Generalized eigenpairs of (A, B): eigenvalues non-increasing, column i of
    ``eigenvectors`` paired with ``eigenvalues[i]``, basis B-orthonormal.

    ``jitter`` records the diagonal shift added to B when its Cholesky
    factorization needed a retry (0.0 in the usual case).
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    jitter: float = field(default=0.0)


def _check_symmetric(M: np.ndarray, name: str) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidArgumentError(f"{name} must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidArgumentError(f"{name} contains non-finite entries")
    scale = np.linalg.norm(M)
    asym = np.linalg.norm(M - M.T)
    if asym > 1e-8 * max(scale, np.finfo(float).tiny):
        raise InvalidArgumentError(
            f"{name} is asymmetric beyond tolerance: ||M-M^T||={asym:.3e}, ||M||={scale:.3e}"
        )
    return (M + M.T) / 2.0


def _cholesky_with_jitter(B: np.ndarray) -> tuple[np.ndarray, float]:
    """Lower Cholesky factor of B, retrying once with a small diagonal shift.

    Returns (L, jitter).  Raises SingularPencilError naming the failing pivot
    if B is not positive definite even after the jitter pass.
    """
    L, info = dpotrf(B, lower=1, clean=1, overwrite_a=0)
    if info == 0:
        return L, 0.0
    if info < 0:
        raise InvalidArgumentError(f"illegal value in Cholesky argument {-info}")
    p = B.shape[0]
    jitter = _JITTER_EPS * (np.trace(B) / p)
    if jitter <= 0:
        raise SingularPencilError(
            f"B is not positive definite: Cholesky failed at pivot {info} "
            "and the matrix has non-positive trace",
            pivot=int(info),
        )
    L, info2 = dpotrf(B + jitter * np.eye(p), lower=1, clean=1, overwrite_a=0)
    if info2 != 0:
        raise SingularPencilError(
            f"B is not positive definite even after jitter {jitter:.3e}: "
            f"Cholesky failed at pivot {info2}",
            pivot=int(info2),
        )
    return L, float(jitter)


def gevd(A: np.ndarray, B: np.ndarray) -> PencilDecomposition:
    """Generalized eigendecomposition of the symmetric-definite pencil (A, B).

    A must be symmetric PSD (small negative eigenvalues are clamped to 0), B
    symmetric positive definite up to one jitter pass.
    """
    A = _check_symmetric(A, "A")
    B = _check_symmetric(B, "B")
    if A.shape != B.shape:
        raise InvalidArgumentError(f"shape mismatch: A {A.shape} vs B {B.shape}")

    L, jitter = _cholesky_with_jitter(B)
    M = sla.solve_triangular(L, A, lower=True, check_finite=False)
    C = sla.solve_triangular(L, M.T, lower=True, check_finite=False).T
    C = (C + C.T) / 2.0
    w, Q = np.linalg.eigh(C)

    # eigh returns ascending order; reverse for non-increasing eigenvalues
    w = w[::-1].copy()
    Q = Q[:, ::-1]
    V = sla.solve_triangular(L, Q, lower=True, trans="T", check_finite=False)

    # Clamp tolerance: the Cholesky reduction perturbs eigenvalues by about
    # eps * cond(B) * ||A||, so the PSD check must widen with B's
    # conditioning; the 1e-8 * ||A|| floor applies for well-behaved B.
    norm_a = max(spectral_norm_estimate(A), np.finfo(float).tiny)
    cond_b = spectral_norm_estimate(B) * _inverse_norm_estimate(L)
    tol = norm_a * max(1e-8, 64.0 * np.finfo(float).eps * cond_b)
    if w[-1] < -tol:
        raise NumericalConsistencyError(
            f"pencil eigenvalue {w[-1]:.6e} is negative beyond tolerance {tol:.3e}; "
            "A is not positive semi-definite in the B-metric"
        )
    np.clip(w, 0.0, None, out=w)
    return PencilDecomposition(eigenvalues=w, eigenvectors=np.ascontiguousarray(V), jitter=jitter)


def pencil_solve(A: np.ndarray, B: np.ndarray, lam: float, rhs: np.ndarray) -> np.ndarray:
    """Solve (A + lam*B) x = rhs by Cholesky, with one iterative-refinement pass.

    This is the closed form of Tikhonov regularization over the pencil and is
    used as the independent oracle for spectral filtering with the
    1/(x + lam) filter.
    """
    A = _check_symmetric(A, "A")
    B = _check_symmetric(B, "B")
    if not (np.isfinite(lam) and lam > 0):
        raise InvalidArgumentError(f"lam must be a positive finite real, got {lam!r}")
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape != (A.shape[0],):
        raise InvalidArgumentError(
            f"rhs has shape {rhs.shape}, expected ({A.shape[0]},)"
        )
    M = A + lam * B
    L, info = dpotrf(M, lower=1, clean=1, overwrite_a=0)
    if info != 0:
        raise SingularPencilError(
            f"A + lam*B is not positive definite: Cholesky failed at pivot {info}",
            pivot=int(info),
        )
    def solve(v):
        y = sla.solve_triangular(L, v, lower=True, check_finite=False)
        return sla.solve_triangular(L, y, lower=True, trans="T", check_finite=False)

    x = solve(rhs)
    x = x + solve(rhs - M @ x)  # one refinement step tightens the residual
    resid = np.linalg.norm(M @ x - rhs)
    bound = 1e-8 * np.linalg.norm(rhs)
    if resid > bound and bound > 0:
        raise NumericalConsistencyError(
            f"pencil solve residual {resid:.3e} exceeds bound {bound:.3e}"
        )
    return x
