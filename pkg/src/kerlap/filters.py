"""Spectral filter functions applied to pencil eigenvalues.

Two filters are provided: the Tikhonov filter x -> 1/(x + lam) and the
eigenvalue cutoff x -> (1/x) * [x > lam] (strict inequality, so the value at
exactly x = lam is 0).  The enum is closed; adding a filter means extending
``apply`` and the CLI choices together.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .pencil import PencilDecomposition

TIKHONOV = "tikhonov"
CUTOFF = "cutoff"
FILTER_KINDS = (TIKHONOV, CUTOFF)


@dataclass(frozen=True)
class FilterSpec:
    kind: str
    lam: float

    def __post_init__(self):
        if self.kind not in FILTER_KINDS:
            raise InvalidArgumentError(
                f"unknown filter kind {self.kind!r}; expected one of {FILTER_KINDS}"
            )
        if not (isinstance(self.lam, (int, float)) and math.isfinite(self.lam) and self.lam > 0):
            raise InvalidArgumentError(f"lam must be a positive finite real, got {self.lam!r}")
        object.__setattr__(self, "lam", float(self.lam))


def apply(f: FilterSpec, x) -> np.ndarray | float:
    """Evaluate the filter at non-negative x (scalar or array)."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise InvalidArgumentError("filter argument must be non-negative")
    if f.kind == TIKHONOV:
        out = 1.0 / (arr + f.lam)
    else:
        out = np.zeros_like(arr)
        mask = arr > f.lam
        np.divide(1.0, arr, out=out, where=mask)
    return out if arr.ndim else float(out)


def filter_coefficients(dec: PencilDecomposition, f: FilterSpec, b: np.ndarray) -> np.ndarray:
    """c = sum_i psi(lambda_i) v_i (v_i^T b), linear in b."""
    b = np.asarray(b, dtype=float)
    p = dec.eigenvalues.size
    if b.shape != (p,):
        raise InvalidArgumentError(f"b has shape {b.shape}, expected ({p},)")
    weights = apply(f, dec.eigenvalues)
    return dec.eigenvectors @ (weights * (dec.eigenvectors.T @ b))
