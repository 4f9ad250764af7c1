"""Benchmark harness: seeded error-vs-n sweeps, fit-time measurements and
generalized-eigenvector exports, with CSV record output.

Reproducibility contract: a configuration plus its master seed determine
every record's error field exactly.  The per-trial seed is
``master_seed XOR splitmix64((n & 0xFFFFFFFF) << 32 | (trial & 0xFFFFFFFF))``
with the splitmix64 finalizer given below; this derivation is part of the
stable interface.  Trials use independent RNG streams, so execution order
cannot change results.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .baselines import GraphConfig, graph_bandwidth, harmonic_propagate, krr_fit
from .errors import InvalidArgumentError, KerlapError
from .estimator import decode_sign, fit, fit_exact, predict
from .filters import FILTER_KINDS, FilterSpec
from .kernel import GaussianKernel
from .operators import SemiDataset, assemble, select_landmarks
from .pencil import gevd
from .synthdata import (
    CirclesSpec,
    GaussianMixSpec,
    gen_circles_with_truth,
    gen_gaussian_mix_with_truth,
)

METHODS = ("kernel_laplacian", "graph", "krr", "exact")
FAMILIES = ("circles", "gauss2")
RECORD_HEADER = [
    "method", "n", "n_labeled", "trial", "error",
    "fit_seconds", "predict_seconds", "seed",
]

_MASK64 = (1 << 64) - 1


def splitmix64(z: int) -> int:
    """SplitMix64 finalizer (public-domain constants)."""
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def trial_seed(master_seed: int, n: int, trial: int) -> int:
    """Deterministic per-trial seed; stable across versions."""
    packed = ((n & 0xFFFFFFFF) << 32) | (trial & 0xFFFFFFFF)
    return (master_seed ^ splitmix64(packed)) & _MASK64


@dataclass(frozen=True)
class BenchRecord:
    method: str
    n: int
    n_labeled: int
    trial: int
    error: float          # classification error in [0,1] or RMSE; NaN marks a failed fit
    fit_seconds: float
    predict_seconds: float
    seed: int


@dataclass
class ExperimentConfig:
    """One benchmark run: dataset family and method plus hyperparameters.

    ``mu`` is a float or the string "1/n"; ``p`` is an int, "n", or
    "sqrt-log" (ceil(sqrt(n) * ln n)); ``graph_sigma`` is a float or "auto"
    (the n^(-1/(d+4)) * ln n rule).
    """

    family: str = "gauss2"
    method: str = "kernel_laplacian"
    n_grid: list[int] = field(default_factory=lambda: [100])
    trials: int = 1
    label_ratio: float | None = 0.1
    n_labeled: int | None = None
    d: int = 10
    separation: float = 3.0
    num_circles: int = 4
    inner_radius: float = 1.0
    radius_step: float | None = None
    angles: str = "uniform"
    allocation: str = "equal"
    kernel_sigma: float = 1.0
    lam: float = 1.0
    mu: float | str = "1/n"
    p: int | str = 50
    filter_kind: str = "tikhonov"
    sigma_over_labeled: bool = False
    graph_sigma: float | str = "auto"
    ridge: float = 1e-3
    dense_cap: int = 2000
    metric: str = "classification"
    inductive_test: int = 0
    clip: bool = False
    low_memory: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidArgumentError(f"unknown family {self.family!r}")
        if self.method not in METHODS:
            raise InvalidArgumentError(f"unknown method {self.method!r}")
        if not self.n_grid or any(m <= 0 for m in self.n_grid) or (
            sorted(self.n_grid) != list(self.n_grid)
        ):
            raise InvalidArgumentError("n_grid must be a non-empty ascending list of counts")
        if self.trials < 1:
            raise InvalidArgumentError("trials must be >= 1")
        if self.n_labeled is None:
            if self.label_ratio is None or not 0 < self.label_ratio <= 1:
                raise InvalidArgumentError("label_ratio must lie in (0, 1]")
        if self.filter_kind not in FILTER_KINDS:
            raise InvalidArgumentError(f"unknown filter kind {self.filter_kind!r}")
        if self.metric not in ("classification", "rmse"):
            raise InvalidArgumentError(f"unknown metric {self.metric!r}")
        if self.method == "graph" and self.inductive_test:
            raise InvalidArgumentError("the graph baseline has no out-of-sample extension")

    def resolve_n_labeled(self, n: int) -> int:
        if self.n_labeled is not None:
            return self.n_labeled
        return max(1, round(self.label_ratio * n))

    def resolve_mu(self, n: int) -> float:
        if isinstance(self.mu, str):
            if self.mu != "1/n":
                raise InvalidArgumentError(f"mu must be a float or '1/n', got {self.mu!r}")
            return 1.0 / n
        return float(self.mu)

    def resolve_p(self, n: int) -> int:
        if isinstance(self.p, str):
            if self.p == "n":
                return n
            if self.p == "sqrt-log":
                return min(n, math.ceil(math.sqrt(n) * math.log(n)))
            raise InvalidArgumentError(f"p must be an int, 'n' or 'sqrt-log', got {self.p!r}")
        return min(int(self.p), n)

    def resolve_graph_sigma(self, n: int, d: int) -> float:
        if isinstance(self.graph_sigma, str):
            if self.graph_sigma != "auto":
                raise InvalidArgumentError(
                    f"graph_sigma must be a float or 'auto', got {self.graph_sigma!r}"
                )
            return graph_bandwidth(n, d)
        return float(self.graph_sigma)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidArgumentError(f"malformed config JSON: {exc}") from None
        known = set(cls.__dataclass_fields__)
        extra = set(doc) - known
        if extra:
            raise InvalidArgumentError(f"unknown config fields: {sorted(extra)}")
        return cls(**doc)


# Named presets for the benchmark figures.  The circle geometry, the
# equispaced angular grid and the gauss2 kernel bandwidth are documented
# assumptions: the originals are not published.
PRESETS = {
    "fig1": ExperimentConfig(
        family="circles",
        method="kernel_laplacian",
        n_grid=[2000],
        trials=1,
        n_labeled=4,
        label_ratio=None,
        num_circles=4,
        inner_radius=1.0,
        angles="equispaced",
        allocation="equal",
        kernel_sigma=0.2,      # 0.2 * inner radius
        lam=1.0,
        mu="1/n",
        p="n",
        filter_kind="tikhonov",
    ),
    "fig2": ExperimentConfig(
        family="gauss2",
        method="kernel_laplacian",
        n_grid=[25, 50, 100, 200, 400],
        trials=50,
        label_ratio=0.1,
        d=10,
        separation=3.0,
        kernel_sigma=3.0,      # of the order of the class separation
        lam=1.0,
        mu="1/n",
        p=50,
        filter_kind="tikhonov",
        sigma_over_labeled=True,
        graph_sigma="auto",
    ),
}


def preset(name: str) -> ExperimentConfig:
    if name not in PRESETS:
        raise InvalidArgumentError(f"unknown preset {name!r}; available: {sorted(PRESETS)}")
    return replace(PRESETS[name])


def generate_instance(cfg: ExperimentConfig, n: int, seed: int) -> tuple[SemiDataset, np.ndarray]:
    n_labeled = cfg.resolve_n_labeled(n)
    if cfg.family == "circles":
        spec = CirclesSpec(
            n=n, n_labeled=n_labeled, num_circles=cfg.num_circles,
            inner_radius=cfg.inner_radius, radius_step=cfg.radius_step,
            angles=cfg.angles, allocation=cfg.allocation, seed=seed,
        )
        return gen_circles_with_truth(spec)
    spec = GaussianMixSpec(
        n=n, n_labeled=n_labeled, d=cfg.d, separation=cfg.separation, seed=seed,
    )
    return gen_gaussian_mix_with_truth(spec)


def _score(cfg, predictions: np.ndarray, truth: np.ndarray) -> float:
    if cfg.metric == "rmse":
        return float(np.sqrt(np.mean((predictions - truth) ** 2)))
    return float((decode_sign(predictions) != truth).mean())


def _run_one(cfg: ExperimentConfig, n: int, trial: int) -> BenchRecord:
    seed = trial_seed(cfg.seed, n, trial)
    ds, truth = generate_instance(cfg, n, seed)
    n_l = ds.n_labeled
    kernel = GaussianKernel(cfg.kernel_sigma)
    mu = cfg.resolve_mu(n)

    t0 = time.perf_counter()
    try:
        if cfg.method == "graph":
            config = GraphConfig(cfg.resolve_graph_sigma(n, ds.d))
            t0 = time.perf_counter()
            result = harmonic_propagate(ds, config)
            t1 = time.perf_counter()
            error = _score(cfg, result.values, truth[n_l:])
            return BenchRecord(cfg.method, n, n_l, trial, error, t1 - t0, 0.0, seed)

        t0 = time.perf_counter()
        if cfg.method == "kernel_laplacian":
            model = fit(
                ds, kernel, cfg.resolve_p(n), mu,
                FilterSpec(cfg.filter_kind, cfg.lam), seed,
                sigma_over_labeled=cfg.sigma_over_labeled,
                clip=cfg.clip, low_memory=cfg.low_memory,
            )
        elif cfg.method == "krr":
            model = krr_fit(ds.inputs[:n_l], ds.labels, kernel, cfg.ridge)
        else:
            model = fit_exact(ds, kernel, cfg.lam, mu, dense_cap=cfg.dense_cap, clip=cfg.clip)
        t1 = time.perf_counter()

        if cfg.inductive_test:
            test_ds, test_truth = generate_instance(
                cfg, cfg.inductive_test, splitmix64(seed ^ 0xDEADBEEF)
            )
            queries, target = test_ds.inputs, test_truth
        else:
            queries, target = ds.inputs[n_l:], truth[n_l:]
        predictions = predict(model, queries)
        t2 = time.perf_counter()
        error = _score(cfg, predictions, target)
        return BenchRecord(cfg.method, n, n_l, trial, error, t1 - t0, t2 - t1, seed)
    except KerlapError:
        return BenchRecord(cfg.method, n, n_l, trial, float("nan"),
                           time.perf_counter() - t0, 0.0, seed)


def run_error_curve(cfg: ExperimentConfig) -> list[BenchRecord]:
    """Fit and score the configured method for each (n, trial) pair.

    Failures surface as records with a NaN error; the sweep continues.
    Records are sorted by (method, n, trial) regardless of execution order.
    """
    records = [
        _run_one(cfg, n, trial)
        for n in cfg.n_grid
        for trial in range(cfg.trials)
    ]
    records.sort(key=lambda r: (r.method, r.n, r.trial))
    return records


def run_timing(cfg: ExperimentConfig) -> list[BenchRecord]:
    """Same sweep as ``run_error_curve``; kept separate so timing runs can
    use their own configs (e.g. a raised dense cap for the exact method)."""
    return run_error_curve(cfg)


def write_records_csv(records: list[BenchRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RECORD_HEADER)
        for r in records:
            writer.writerow([
                r.method, r.n, r.n_labeled, r.trial, repr(r.error),
                repr(r.fit_seconds), repr(r.predict_seconds), r.seed,
            ])


def load_records_csv(path) -> list[BenchRecord]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InvalidArgumentError(f"{path}: empty records file") from None
        if header != RECORD_HEADER:
            raise InvalidArgumentError(
                f"{path}:1: bad header {header!r}, expected {RECORD_HEADER!r}"
            )
        out = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(RECORD_HEADER):
                raise InvalidArgumentError(
                    f"{path}:{lineno}: expected {len(RECORD_HEADER)} cells, got {len(row)}"
                )
            try:
                out.append(BenchRecord(
                    method=row[0], n=int(row[1]), n_labeled=int(row[2]),
                    trial=int(row[3]), error=float(row[4]),
                    fit_seconds=float(row[5]), predict_seconds=float(row[6]),
                    seed=int(row[7]),
                ))
            except ValueError as exc:
                raise InvalidArgumentError(f"{path}:{lineno}: {exc}") from None
        return out


def export_eigenvectors(
    ds: SemiDataset,
    kernel: GaussianKernel,
    p: int,
    mu: float,
    count: int,
    grid: np.ndarray,
    seed: int = 0,
    path=None,
) -> np.ndarray:
    """Evaluate the top generalized eigenvectors at grid points.

    Returns a (q, count) array; column j is the j-th eigenfunction
    x -> sum_i v_ji k(x, M_i), sign-normalized so its first entry larger
    than 1e-12 * max|column| is positive.  When ``path`` is given the grid
    coordinates and eigenvector columns are written as CSV (header only if
    count == 0).
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 2 or grid.shape[1] != ds.d:
        raise InvalidArgumentError(f"grid must be (q, {ds.d}), got {grid.shape}")
    if not 0 <= count <= p:
        raise InvalidArgumentError(f"count must satisfy 0 <= count <= p, got {count}")

    if count == 0:
        values = np.zeros((grid.shape[0], 0))
    else:
        landmarks = select_landmarks(ds, p, seed)
        bundle = assemble(ds, kernel, landmarks, mu)
        dec = gevd(bundle.A, bundle.B)
        values = kernel.gram(grid, landmarks.coordinates) @ dec.eigenvectors[:, :count]
        for j in range(count):
            col = values[:, j]
            nz = np.flatnonzero(np.abs(col) > 1e-12 * max(np.abs(col).max(), 1e-300))
            if nz.size and col[nz[0]] < 0:
                values[:, j] = -col

    if path is not None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([f"x{j}" for j in range(ds.d)] + [f"e{j+1}" for j in range(count)])
            if count > 0:
                for i in range(grid.shape[0]):
                    writer.writerow(
                        [repr(float(v)) for v in grid[i]]
                        + [repr(float(v)) for v in values[i]]
                    )
    return values
