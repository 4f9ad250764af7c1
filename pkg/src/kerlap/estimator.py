"""End-to-end estimators: the landmark-compressed spectral-filtering fit, the
exact dense-basis oracle, prediction, binary sign decoding, and the
theoretical hyperparameter schedule.

The landmark fit runs:  select landmarks -> assemble (A, B, b) ->
generalized eigendecomposition of (A, B) -> spectral filtering of b,
producing coefficients c that define g(x) = sum_i c_i k(x, M_i).

The dense oracle minimizes the regularized empirical risk over the full
n*(d+1) representer basis by a direct solve of (A + lam*B) c = b and is the
quality/correctness reference for the landmark path.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, SingularPencilError
from .filters import FilterSpec, filter_coefficients
from .kernel import GaussianKernel, Kernel
from .operators import (
    OperatorBundle,
    SemiDataset,
    assemble,
    assemble_dense,
    select_landmarks,
    DEFAULT_DENSE_CAP,
)
from .pencil import gevd, pencil_solve

LANDMARK_KERNEL = "landmark_kernel"
DENSE_REPRESENTER = "dense_representer"

_QUERY_CHUNK = 512


@dataclass(frozen=True)
class FittedModel:
    """Prediction rule g(x) defined by basis coordinates and coefficients.

    ``landmark_kernel`` models predict g(x) = sum_i c_i k(x, M_i) with one
    coefficient per basis point.  ``dense_representer`` models carry
    n*(d+1) coefficients: the first n multiply kernel features k_{X_i}, the
    remaining n*d (point-major, coordinate-minor) multiply derivative
    features d_j k_{X_i}.  Predictions are clipped to [-clip_bound,
    clip_bound] when a bound is set.
    """

    kernel: Kernel
    basis_coordinates: np.ndarray
    coefficients: np.ndarray
    basis_kind: str
    clip_bound: float | None = None

    def __post_init__(self):
        coords = np.array(self.basis_coordinates, dtype=float, copy=True)
        coef = np.array(self.coefficients, dtype=float, copy=True)
        if coords.ndim != 2:
            raise InvalidArgumentError("basis_coordinates must be a 2-d array")
        m, d = coords.shape
        if self.basis_kind == LANDMARK_KERNEL:
            expected = m
        elif self.basis_kind == DENSE_REPRESENTER:
            expected = m * (d + 1)
        else:
            raise InvalidArgumentError(f"unknown basis kind {self.basis_kind!r}")
        if coef.shape != (expected,):
            raise InvalidArgumentError(
                f"coefficients have shape {coef.shape}, expected ({expected},)"
            )
        if not (np.all(np.isfinite(coords)) and np.all(np.isfinite(coef))):
            raise InvalidArgumentError("model parameters contain non-finite entries")
        if self.clip_bound is not None and not (
            math.isfinite(self.clip_bound) and self.clip_bound >= 0
        ):
            raise InvalidArgumentError("clip_bound must be a non-negative finite real")
        coords.setflags(write=False)
        coef.setflags(write=False)
        object.__setattr__(self, "basis_coordinates", coords)
        object.__setattr__(self, "coefficients", coef)


@dataclass(frozen=True)
class ScheduleParams:
    """Constants of the theoretical regularization schedule.

    ``decay`` is the eigenvalue-decay exponent in (0, 1] that sets the
    subsampling exponent s = max(1/2, 1/(4*decay)).
    """

    lambda0: float = 1.0
    mu0: float = 1.0
    p0: float = 1.0
    decay: float = 1.0

    def __post_init__(self):
        for name in ("lambda0", "mu0", "p0"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise InvalidArgumentError(f"{name} must be a positive finite real, got {v!r}")
        if not (math.isfinite(self.decay) and 0 < self.decay <= 1):
            raise InvalidArgumentError(f"decay must lie in (0, 1], got {self.decay!r}")


def schedule(n: int, sp: ScheduleParams = ScheduleParams()) -> tuple[float, float, int]:
    """(lam, mu, p) for sample size n: lam = lambda0 * n^(-1/4),
    mu = mu0 * n^(-1/4), p = min(n, ceil(p0 * n^s * ln n)) with
    s = max(1/2, 1/(4*decay)).  Natural logarithm throughout."""
    if not (isinstance(n, (int, np.integer)) and n >= 2):
        raise InvalidArgumentError(f"n must be an integer >= 2, got {n!r}")
    lam = sp.lambda0 * n ** (-0.25)
    mu = sp.mu0 * n ** (-0.25)
    s = max(0.5, 1.0 / (4.0 * sp.decay))
    p = min(int(n), math.ceil(sp.p0 * n**s * math.log(n)))
    return lam, mu, p


def fit(
    ds: SemiDataset,
    kernel: Kernel,
    p: int,
    mu: float,
    filter_spec: FilterSpec,
    seed: int,
    sigma_over_labeled: bool = False,
    clip: bool = False,
    low_memory: bool = False,
) -> FittedModel:
    """Landmark-compressed spectral-filtering fit.

    Work is O(p^2 n d) assembly plus O(p^3) eigendecomposition; nothing is
    formed beyond the requested (n x p) and (n*d x p) evaluation matrices.
    """
    landmarks = select_landmarks(ds, p, seed)
    bundle = assemble(
        ds, kernel, landmarks, mu,
        sigma_over_labeled=sigma_over_labeled, low_memory=low_memory,
    )
    dec = gevd(bundle.A, bundle.B)
    coef = filter_coefficients(dec, filter_spec, bundle.b)
    return FittedModel(
        kernel=kernel,
        basis_coordinates=landmarks.coordinates,
        coefficients=coef,
        basis_kind=LANDMARK_KERNEL,
        clip_bound=float(np.abs(ds.labels).max()) if clip else None,
    )


def fit_exact(
    ds: SemiDataset,
    kernel: Kernel,
    lam: float,
    mu: float,
    dense_cap: int = DEFAULT_DENSE_CAP,
    clip: bool = False,
) -> FittedModel:
    """Exact empirical risk minimizer over the full n*(d+1) representer basis.

    The data-fit term averages over the labeled points (the exact ERM
    normalization), so this is the reference the landmark fit approximates.
    Solved directly as (A + lam*B) c = b when that system is numerically
    positive definite; the redundant dense basis often makes it singular at
    machine precision, in which case the equivalent eigendecomposition-plus-
    filtering route (which tolerates a semi-definite B) is used.
    """
    if not (math.isfinite(lam) and lam > 0):
        raise InvalidArgumentError(f"lam must be a positive finite real, got {lam!r}")
    bundle = assemble_dense(ds, kernel, mu, dense_cap=dense_cap, sigma_over_labeled=True)
    try:
        coef = pencil_solve(bundle.A, bundle.B, lam, bundle.b)
    except SingularPencilError:
        dec = gevd(bundle.A, bundle.B)
        coef = filter_coefficients(dec, FilterSpec(kind="tikhonov", lam=lam), bundle.b)
    return FittedModel(
        kernel=kernel,
        basis_coordinates=ds.inputs,
        coefficients=coef,
        basis_kind=DENSE_REPRESENTER,
        clip_bound=float(np.abs(ds.labels).max()) if clip else None,
    )


def predict(model: FittedModel, queries: np.ndarray) -> np.ndarray:
    """Evaluate the fitted function at query rows, clipping if configured."""
    Q = np.asarray(queries, dtype=float)
    if Q.ndim != 2:
        raise InvalidArgumentError(f"queries must be (q, d), got shape {Q.shape}")
    if not np.all(np.isfinite(Q)):
        raise InvalidArgumentError("queries contain non-finite entries")
    coords = model.basis_coordinates
    m, d = coords.shape
    if Q.shape[1] != d:
        raise InvalidArgumentError(
            f"query dimension {Q.shape[1]} does not match model dimension {d}"
        )
    k = model.kernel
    out = np.empty(Q.shape[0])
    if model.basis_kind == LANDMARK_KERNEL:
        for start in range(0, Q.shape[0], _QUERY_CHUNK):
            stop = min(Q.shape[0], start + _QUERY_CHUNK)
            out[start:stop] = k.gram(Q[start:stop], coords) @ model.coefficients
    else:
        c0 = model.coefficients[:m]
        c1 = model.coefficients[m:]
        for start in range(0, Q.shape[0], _QUERY_CHUNK):
            stop = min(Q.shape[0], start + _QUERY_CHUNK)
            Qc = Q[start:stop]
            vals = k.gram(Qc, coords) @ c0
            # derivative features are taken at the basis points, so evaluate
            # the gradient with the basis point as the differentiated argument
            Zq = k.grad1_gram(coords, Qc).reshape(m * d, Qc.shape[0])
            out[start:stop] = vals + Zq.T @ c1
    if model.clip_bound is not None:
        np.clip(out, -model.clip_bound, model.clip_bound, out=out)
    return out


def decode_sign(values) -> np.ndarray:
    """Binary decoding of real scores: +1 where the value is >= 0, else -1."""
    v = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(v)):
        raise InvalidArgumentError("scores contain non-finite entries")
    return np.where(v >= 0, 1, -1).astype(np.int64)


# Model serialization: one JSON document, value-exact for finite doubles
# (repr round-trips IEEE doubles through decimal exactly).

def model_to_json(model: FittedModel) -> str:
    if not isinstance(model.kernel, GaussianKernel):
        raise InvalidArgumentError("only Gaussian-kernel models are serializable")
    doc = {
        "kernel_sigma": model.kernel.sigma,
        "basis_kind": model.basis_kind,
        "clip_bound": model.clip_bound,
        "coordinates": [[float(v) for v in row] for row in model.basis_coordinates],
        "coefficients": [float(v) for v in model.coefficients],
    }
    return json.dumps(doc)


def model_from_json(text: str) -> FittedModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidArgumentError(f"malformed model JSON: {exc}") from None
    try:
        return FittedModel(
            kernel=GaussianKernel(sigma=doc["kernel_sigma"]),
            basis_coordinates=np.array(doc["coordinates"], dtype=float),
            coefficients=np.array(doc["coefficients"], dtype=float),
            basis_kind=doc["basis_kind"],
            clip_bound=doc["clip_bound"],
        )
    except KeyError as exc:
        raise InvalidArgumentError(f"model JSON missing field {exc}") from None
