"""Assembly of the landmark-compressed empirical operator matrices.

Given n data points (the first n_labeled of which carry labels), a kernel k
and p landmark points, the training pencil is built from

    Knp[l, i] = k(X_l, M_i)                       (n x p)
    Znp[l*d + j, i] = d/dX_l_j k(X_l, M_i)        (n*d x p)

    A = Knp^T Knp / n            covariance compression
    B = Znp^T Znp / n + mu*Kpp   Dirichlet-energy compression + mu * landmark Gram
    b = Knp[:n_labeled]^T y / n_labeled

``assemble_dense`` builds the same objects over the exact n*(d+1)-dimensional
representer basis {k_{X_i}} + {d_j k_{X_i}} instead of a landmark subset, for
use by the dense oracle estimator.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, NumericalConsistencyError, ResourceLimitError
from .kernel import Kernel

DEFAULT_DENSE_CAP = 2000

# rows per chunk are sized so a (chunk, d, p) derivative block stays small
_CHUNK_BUDGET = 4_000_000


@dataclass(frozen=True)
class SemiDataset:
    """n input points with labels attached to the first n_labeled rows."""

    inputs: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        X = np.array(self.inputs, dtype=float, copy=True)
        y = np.atleast_1d(np.array(self.labels, dtype=float, copy=True))
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise InvalidArgumentError(f"inputs must be (n, d) with n,d >= 1, got {X.shape}")
        if not np.all(np.isfinite(X)):
            raise InvalidArgumentError("inputs contain non-finite entries")
        if y.ndim != 1 or not 1 <= y.size <= X.shape[0]:
            raise InvalidArgumentError(
                f"labels must be a vector with 1 <= n_labeled <= n, got {y.size} for n={X.shape[0]}"
            )
        if not np.all(np.isfinite(y)):
            raise InvalidArgumentError("labels contain non-finite entries")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "inputs", X)
        object.__setattr__(self, "labels", y)

    @property
    def n(self) -> int:
        return self.inputs.shape[0]

    @property
    def d(self) -> int:
        return self.inputs.shape[1]

    @property
    def n_labeled(self) -> int:
        return self.labels.size


@dataclass(frozen=True)
class LandmarkSet:
    """Distinct dataset row indices plus copies of the selected coordinates."""

    indices: np.ndarray
    coordinates: np.ndarray

    def __post_init__(self):
        idx = np.array(self.indices, dtype=np.int64, copy=True)
        coords = np.array(self.coordinates, dtype=float, copy=True)
        if idx.ndim != 1 or idx.size < 1:
            raise InvalidArgumentError("landmark indices must be a non-empty vector")
        if np.unique(idx).size != idx.size:
            raise InvalidArgumentError("landmark indices must be distinct")
        if coords.shape[0] != idx.size:
            raise InvalidArgumentError("coordinates rows must match the number of indices")
        idx.setflags(write=False)
        coords.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "coordinates", coords)

    @property
    def p(self) -> int:
        return self.indices.size


@dataclass(frozen=True)
class OperatorBundle:
    """Compressed empirical operators: pencil matrices (A, B) and moment vector b.

    For landmark assembly ``knp``/``znp`` hold the kernel and derivative
    evaluation matrices and ``kpp`` the landmark Gram block.  For dense
    assembly the same slots hold the evaluations against the full representer
    basis (``znp`` additionally carries the cross-derivative columns) and
    ``kpp`` the extended basis Gram.  ``znp`` is None in low-memory mode.
    """

    knp: np.ndarray | None
    znp: np.ndarray | None
    A: np.ndarray
    B: np.ndarray
    b: np.ndarray
    mu: float
    kpp: np.ndarray
    lambda_weight: float | None = field(default=None)


def select_landmarks(ds: SemiDataset, p: int, seed: int) -> LandmarkSet:
    """Draw p distinct row indices uniformly without replacement (seeded)."""
    if not 1 <= p <= ds.n:
        raise InvalidArgumentError(f"p must satisfy 1 <= p <= n={ds.n}, got {p}")
    rng = np.random.default_rng(seed)
    idx = rng.choice(ds.n, size=p, replace=False)
    return LandmarkSet(indices=idx, coordinates=ds.inputs[idx])


def _check_block_finite(block: np.ndarray, row_offset: int, what: str):
    if np.all(np.isfinite(block)):
        return
    bad = np.argwhere(~np.isfinite(block))
    r, c = bad[0][0], bad[0][-1]
    raise NumericalConsistencyError(
        f"non-finite {what} value at data row {row_offset + int(r)}, landmark {int(c)}"
    )


def assemble(
    ds: SemiDataset,
    kernel: Kernel,
    landmarks: LandmarkSet,
    mu: float,
    sigma_over_labeled: bool = False,
    low_memory: bool = False,
) -> OperatorBundle:
    """Build the landmark-compressed operator bundle.

    ``sigma_over_labeled`` switches the covariance compression A from the
    default average over all n points to an average over the labeled points
    only (the exact empirical-risk-minimization normalization).

    ``low_memory`` accumulates Znp^T Znp chunk by chunk and drops Znp from
    the returned bundle.
    """
    if not (np.isfinite(mu) and mu > 0):
        raise InvalidArgumentError(f"mu must be a positive finite real, got {mu!r}")
    if landmarks.indices.max() >= ds.n or landmarks.indices.min() < 0:
        raise InvalidArgumentError("landmark indices out of range for the dataset")
    X, y = ds.inputs, ds.labels
    n, d = X.shape
    p = landmarks.p
    coords = landmarks.coordinates

    chunk = max(1, _CHUNK_BUDGET // max(1, p * d))
    knp = np.empty((n, p))
    znp = None if low_memory else np.empty((n * d, p))
    ztz = np.zeros((p, p))
    for start in range(0, n, chunk):
        stop = min(n, start + chunk)
        kb = kernel.gram(X[start:stop], coords)
        _check_block_finite(kb, start, "kernel")
        knp[start:stop] = kb
        zb = kernel.grad1_gram(X[start:stop], coords).reshape((stop - start) * d, p)
        _check_block_finite(zb, start, "kernel derivative")
        if low_memory:
            ztz += zb.T @ zb
        else:
            znp[start * d : stop * d] = zb
    if not low_memory:
        ztz = znp.T @ znp

    n_l = ds.n_labeled
    if sigma_over_labeled:
        A = knp[:n_l].T @ knp[:n_l] / n_l
    else:
        A = knp.T @ knp / n
    A = (A + A.T) / 2.0

    kpp = knp[landmarks.indices, :]
    B = ztz / n + mu * kpp
    B = (B + B.T) / 2.0
    b = knp[:n_l].T @ y / n_l
    return OperatorBundle(knp=knp, znp=znp, A=A, B=B, b=b, mu=float(mu), kpp=kpp)


def assemble_dense(
    ds: SemiDataset,
    kernel: Kernel,
    mu: float,
    dense_cap: int = DEFAULT_DENSE_CAP,
    sigma_over_labeled: bool = False,
) -> OperatorBundle:
    """Build the exact operator bundle over the full n*(d+1) representer basis.

    Basis layout: entries 0..n-1 are the kernel features k_{X_i}; entry
    n + l*d + j is the derivative feature d_j k_{X_l}.  The bundle's ``knp``
    holds the point evaluations of the basis (n x m), ``znp`` the gradient
    evaluations (n*d x m) and ``kpp`` the extended basis Gram (m x m).
    """
    if not (np.isfinite(mu) and mu >= 0):
        raise InvalidArgumentError(f"mu must be a non-negative finite real, got {mu!r}")
    X, y = ds.inputs, ds.labels
    n, d = X.shape
    m = n * (d + 1)
    if m > dense_cap:
        raise ResourceLimitError(
            f"dense basis size n*(d+1) = {m} exceeds the cap {dense_cap}; "
            "use the landmark assembly instead"
        )

    K = kernel.gram(X, X)
    Z = kernel.grad1_gram(X, X).reshape(n * d, n)
    H = kernel.cross_hessian_gram(X, X).reshape(n * d, n * d)
    _check_block_finite(K, 0, "kernel")
    _check_block_finite(Z, 0, "kernel derivative")
    _check_block_finite(H, 0, "kernel cross derivative")

    phi = np.hstack([K, Z.T])      # <k_{X_i}, basis_a>, rows over points
    psi = np.hstack([Z, H])        # <d_j k_{X_l}, basis_a>, rows over (l, j)
    gram = np.vstack([phi, psi])   # extended basis Gram
    gram = (gram + gram.T) / 2.0

    n_l = ds.n_labeled
    if sigma_over_labeled:
        A = phi[:n_l].T @ phi[:n_l] / n_l
    else:
        A = phi.T @ phi / n
    A = (A + A.T) / 2.0
    B = psi.T @ psi / n + mu * gram
    B = (B + B.T) / 2.0
    b = phi[:n_l].T @ y / n_l
    return OperatorBundle(knp=phi, znp=psi, A=A, B=B, b=b, mu=float(mu), kpp=gram)


# Dataset CSV format (shared repo-wide): header x0,...,x{d-1},y with the y
# cell left empty on unlabeled rows.

def save_dataset_csv(ds: SemiDataset, path) -> None:
    n, d = ds.inputs.shape
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{j}" for j in range(d)] + ["y"])
        for i in range(n):
            row = [repr(float(v)) for v in ds.inputs[i]]
            row.append(repr(float(ds.labels[i])) if i < ds.n_labeled else "")
            writer.writerow(row)


def load_dataset_csv(path) -> SemiDataset:
    """Read the shared CSV format, stably partitioning labeled rows to the front."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InvalidArgumentError(f"{path}: empty file") from None
        d = len(header) - 1
        if d < 1 or header[:d] != [f"x{j}" for j in range(d)] or header[d] != "y":
            raise InvalidArgumentError(
                f"{path}: malformed header {header!r}; expected x0,...,x{{d-1}},y"
            )
        labeled_x, labeled_y, unlabeled_x = [], [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != d + 1:
                raise InvalidArgumentError(
                    f"{path}:{lineno}: expected {d + 1} cells, got {len(row)}"
                )
            try:
                coords = [float(v) for v in row[:d]]
                label = float(row[d]) if row[d].strip() != "" else None
            except ValueError as exc:
                raise InvalidArgumentError(f"{path}:{lineno}: {exc}") from None
            if label is None:
                unlabeled_x.append(coords)
            else:
                labeled_x.append(coords)
                labeled_y.append(label)
    if not labeled_y:
        raise InvalidArgumentError(f"{path}: no labeled rows")
    inputs = np.array(labeled_x + unlabeled_x, dtype=float)
    return SemiDataset(inputs=inputs, labels=np.array(labeled_y, dtype=float))
