"""Comparison methods: transductive harmonic label propagation on a dense
Gaussian-weighted graph, and kernel ridge regression on the labeled points.

The graph baseline uses the classical formulation: all-pairs Gaussian edge
weights with zero diagonal, unnormalized combinatorial Laplacian, and the
harmonic solution f_u = (D_uu - W_uu)^-1 W_ul y_l on the unlabeled block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.linalg.lapack import dpotrf

from .errors import InvalidArgumentError, SingularPencilError
from .estimator import LANDMARK_KERNEL, FittedModel
from .kernel import GaussianKernel, Kernel, _sqdist_matrix


@dataclass(frozen=True)
class GraphConfig:
    """Gaussian edge-weight bandwidth for the graph baseline."""

    sigma: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise InvalidArgumentError(f"sigma must be a positive finite real, got {self.sigma!r}")


@dataclass(frozen=True)
class HarmonicResult:
    """Propagated values on the unlabeled points; ``jittered`` flags a
    regularized fallback solve of a (numerically) singular unlabeled block."""

    values: np.ndarray
    jittered: bool


def graph_bandwidth(n: int, d: int) -> float:
    """Theoretically suggested graph bandwidth n^(-1/(d+4)) * ln(n)."""
    if not (isinstance(n, (int, np.integer)) and n >= 2):
        raise InvalidArgumentError(f"n must be an integer >= 2, got {n!r}")
    if not (isinstance(d, (int, np.integer)) and d >= 1):
        raise InvalidArgumentError(f"d must be an integer >= 1, got {d!r}")
    return float(n) ** (-1.0 / (d + 4)) * math.log(n)


def harmonic_propagate(ds, config: GraphConfig) -> HarmonicResult:
    """Harmonic (transductive) solution on the unlabeled nodes.

    Weights W_ij = exp(-||X_i - X_j||^2 / (2 sigma^2)) for i != j, zero
    diagonal; D = diag of row sums.  Solves (D_uu - W_uu) f_u = W_ul y_l.
    """
    n, n_l = ds.n, ds.n_labeled
    if n <= n_l:
        raise InvalidArgumentError("harmonic propagation needs at least one unlabeled point")
    X, y = ds.inputs, ds.labels
    W = np.exp(-_sqdist_matrix(X, X) / (2.0 * config.sigma**2))
    np.fill_diagonal(W, 0.0)
    D = W.sum(axis=1)
    L_uu = np.diag(D[n_l:]) - W[n_l:, n_l:]
    rhs = W[n_l:, :n_l] @ y

    jittered = False
    L_factor, info = dpotrf(L_uu, lower=1, clean=1, overwrite_a=0)
    if info != 0:
        jittered = True
        L_uu = L_uu + 1e-10 * np.trace(L_uu) * np.eye(n - n_l)
        L_factor, info = dpotrf(L_uu, lower=1, clean=1, overwrite_a=0)
        if info != 0:
            raise SingularPencilError(
                f"unlabeled graph block is singular even after jitter (pivot {info})",
                pivot=int(info),
            )
    half = sla.solve_triangular(L_factor, rhs, lower=True, check_finite=False)
    f_u = sla.solve_triangular(L_factor, half, lower=True, trans="T", check_finite=False)
    return HarmonicResult(values=f_u, jittered=jittered)


def krr_fit(inputs: np.ndarray, labels: np.ndarray, kernel: Kernel, ridge: float) -> FittedModel:
    """Kernel ridge regression on labeled data: (K + n_l*ridge*I) c = y."""
    X = np.asarray(inputs, dtype=float)
    y = np.asarray(labels, dtype=float)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise InvalidArgumentError("inputs must be (n_l, d) with matching label vector")
    if not (math.isfinite(ridge) and ridge > 0):
        raise InvalidArgumentError(f"ridge must be a positive finite real, got {ridge!r}")
    n_l = X.shape[0]
    M = kernel.gram(X, X) + n_l * ridge * np.eye(n_l)
    L_factor, info = dpotrf(M, lower=1, clean=1, overwrite_a=0)
    if info != 0:
        M = M + 1e-10 * np.trace(M) * np.eye(n_l)
        L_factor, info = dpotrf(M, lower=1, clean=1, overwrite_a=0)
        if info != 0:
            raise SingularPencilError(
                f"ridge system is singular even after jitter (pivot {info})",
                pivot=int(info),
            )
    half = sla.solve_triangular(L_factor, y, lower=True, check_finite=False)
    coef = sla.solve_triangular(L_factor, half, lower=True, trans="T", check_finite=False)
    return FittedModel(
        kernel=kernel,
        basis_coordinates=X,
        coefficients=coef,
        basis_kind=LANDMARK_KERNEL,
    )
