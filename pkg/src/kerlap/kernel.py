"""Gaussian kernel with the first- and cross-derivative evaluations used by
the derivative feature maps.

The kernel interface is deliberately small: a kernel must provide pointwise
``eval``, ``grad1`` (gradient in the first argument) and ``cross_hessian``
(mixed second derivatives, one per argument).  Batched variants have generic
loop fallbacks so additional twice-differentiable kernels only need the three
pointwise operations; the Gaussian kernel overrides them with vectorized
implementations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError

# Above this input dimension squared distances switch to compensated (Kahan)
# accumulation: the derivative Gram matrices feed an eigensolver that is
# sensitive to symmetry loss from rounding.
_KAHAN_DIM = 64


def _as_point(x, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 1:
        raise InvalidArgumentError(f"{name} must be a 1-d vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InvalidArgumentError(f"{name} contains non-finite entries")
    return x


def _check_pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    x = _as_point(x, "x")
    y = _as_point(y, "y")
    if x.shape != y.shape:
        raise InvalidArgumentError(
            f"dimension mismatch: x has d={x.size}, y has d={y.size}"
        )
    return x, y


def _sqdist(x: np.ndarray, y: np.ndarray) -> float:
    diff = x - y
    if x.size > _KAHAN_DIM:
        return math.fsum(float(t) for t in diff * diff)
    return float(diff @ diff)


def _sqdist_matrix(X: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """All-pairs squared distances, coordinate-wise.

    Computed as sums of (x_j - z_j)^2 rather than via the Gram expansion
    ||x||^2 + ||z||^2 - 2<x, z>, which cancels badly for nearby points.
    Kahan compensation over the coordinate axis for d > _KAHAN_DIM.
    """
    n, d = X.shape
    m = Z.shape[0]
    if d <= _KAHAN_DIM:
        diff = X[:, None, :] - Z[None, :, :]
        return np.einsum("ijk,ijk->ij", diff, diff)
    total = np.zeros((n, m))
    comp = np.zeros((n, m))
    for j in range(d):
        term = (X[:, j, None] - Z[None, :, j]) ** 2
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


class Kernel:
    """Twice-differentiable kernel interface.

    Subclasses implement ``eval``, ``grad1`` and ``cross_hessian``; the batch
    methods have generic fallbacks.
    """

    def eval(self, x, y) -> float:
        raise NotImplementedError

    def grad1(self, x, y) -> np.ndarray:
        """Gradient of k(x, y) with respect to the coordinates of x."""
        raise NotImplementedError

    def cross_hessian(self, x, y) -> np.ndarray:
        """Matrix of mixed partials d^2 k / dx_i dy_j, shape (d, d)."""
        raise NotImplementedError

    # Batched fallbacks -----------------------------------------------------

    def gram(self, X: np.ndarray, Z: np.ndarray) -> np.ndarray:
        """k(X[i], Z[j]) for all pairs, shape (n, m)."""
        return np.array([[self.eval(x, z) for z in Z] for x in X])

    def grad1_gram(self, X: np.ndarray, Z: np.ndarray) -> np.ndarray:
        """d/dX[l]_j k(X[l], Z[i]) for all pairs, shape (n, d, m)."""
        out = np.empty((X.shape[0], X.shape[1], Z.shape[0]))
        for l, x in enumerate(X):
            for i, z in enumerate(Z):
                out[l, :, i] = self.grad1(x, z)
        return out

    def cross_hessian_gram(self, X: np.ndarray, Z: np.ndarray) -> np.ndarray:
        """d^2 k / dX[l]_j dZ[i]_j' for all pairs, shape (n, d, m, d)."""
        out = np.empty((X.shape[0], X.shape[1], Z.shape[0], Z.shape[1]))
        for l, x in enumerate(X):
            for i, z in enumerate(Z):
                out[l, :, i, :] = self.cross_hessian(x, z)
        return out


@dataclass(frozen=True)
class GaussianKernel(Kernel):
    """k(x, y) = exp(-||x - y||^2 / (2 sigma^2)).

    Closed-form derivatives:

        d k / dx_i          = -(x_i - y_i) / sigma^2 * k(x, y)
        d^2 k / dx_i dy_j   = -(x_i - y_i)(x_j - y_j) / sigma^4 * k(x, y)   (i != j)
        d^2 k / dx_i dy_i   = (1/sigma^2 - (x_i - y_i)^2 / sigma^4) * k(x, y)

    exp of large negative arguments underflows to 0.0 silently; this is
    harmless for positive semi-definiteness.
    """

    sigma: float

    def __post_init__(self):
        s = self.sigma
        if not (isinstance(s, (int, float)) and math.isfinite(s) and s > 0):
            raise InvalidArgumentError(f"sigma must be a positive finite real, got {s!r}")
        object.__setattr__(self, "sigma", float(s))

    def eval(self, x, y) -> float:
        x, y = _check_pair(x, y)
        return math.exp(-_sqdist(x, y) / (2.0 * self.sigma**2))

    def grad1(self, x, y) -> np.ndarray:
        x, y = _check_pair(x, y)
        k = math.exp(-_sqdist(x, y) / (2.0 * self.sigma**2))
        return -(x - y) / self.sigma**2 * k

    def cross_hessian(self, x, y) -> np.ndarray:
        x, y = _check_pair(x, y)
        s2 = self.sigma**2
        k = math.exp(-_sqdist(x, y) / (2.0 * s2))
        diff = x - y
        H = -np.outer(diff, diff) / s2**2 * k
        H[np.diag_indices_from(H)] += k / s2
        return H

    # Vectorized batch forms ------------------------------------------------

    def gram(self, X: np.ndarray, Z: np.ndarray) -> np.ndarray:
        return np.exp(-_sqdist_matrix(X, Z) / (2.0 * self.sigma**2))

    def grad1_gram(self, X: np.ndarray, Z: np.ndarray) -> np.ndarray:
        K = self.gram(X, Z)
        diff = X[:, None, :] - Z[None, :, :]  # (n, m, d)
        out = -diff / self.sigma**2 * K[:, :, None]
        return np.ascontiguousarray(out.transpose(0, 2, 1))  # (n, d, m)

    def cross_hessian_gram(self, X: np.ndarray, Z: np.ndarray) -> np.ndarray:
        s2 = self.sigma**2
        K = self.gram(X, Z)
        diff = X[:, None, :] - Z[None, :, :]  # (n, m, d)
        out = -np.einsum("lmi,lmj,lm->limj", diff, diff, K) / s2**2
        d = X.shape[1]
        idx = np.arange(d)
        # advanced indexing on axes 1 and 3 yields a (d, n, m) view target
        out[:, idx, :, idx] += (K / s2)[None, :, :]
        return out
