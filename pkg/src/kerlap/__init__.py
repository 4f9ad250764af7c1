"""Semi-supervised kernel regression with Laplacian regularization.

The estimator minimizes a least-squares data term plus a Dirichlet-energy
penalty (the expected squared gradient norm over the data) inside an RKHS,
computed by spectral filtering of the generalized eigendecomposition of the
compressed covariance/penalty operator pencil.  Landmark (Nystrom-style)
compression keeps training at O(p^2 n d); an exact dense-basis solver
provides the reference the compressed path is checked against.
"""

from .baselines import GraphConfig, HarmonicResult, graph_bandwidth, harmonic_propagate, krr_fit
from .errors import (
    InvalidArgumentError,
    KerlapError,
    NumericalConsistencyError,
    ResourceLimitError,
    SingularPencilError,
)
from .estimator import (
    DENSE_REPRESENTER,
    LANDMARK_KERNEL,
    FittedModel,
    ScheduleParams,
    decode_sign,
    fit,
    fit_exact,
    model_from_json,
    model_to_json,
    predict,
    schedule,
)
from .filters import CUTOFF, TIKHONOV, FilterSpec, filter_coefficients
from .filters import apply as apply_filter
from .kernel import GaussianKernel, Kernel
from .operators import (
    LandmarkSet,
    OperatorBundle,
    SemiDataset,
    assemble,
    assemble_dense,
    load_dataset_csv,
    save_dataset_csv,
    select_landmarks,
)
from .pencil import PencilDecomposition, gevd, pencil_solve
from .synthdata import (
    CirclesSpec,
    GaussianMixSpec,
    bayes_error,
    gen_circles,
    gen_circles_with_truth,
    gen_gaussian_mix,
    gen_gaussian_mix_with_truth,
)

__version__ = "0.1.0"

__all__ = [
    "CUTOFF",
    "CirclesSpec",
    "DENSE_REPRESENTER",
    "FilterSpec",
    "FittedModel",
    "GaussianKernel",
    "GaussianMixSpec",
    "GraphConfig",
    "HarmonicResult",
    "InvalidArgumentError",
    "Kernel",
    "KerlapError",
    "LANDMARK_KERNEL",
    "LandmarkSet",
    "NumericalConsistencyError",
    "OperatorBundle",
    "PencilDecomposition",
    "ResourceLimitError",
    "ScheduleParams",
    "SemiDataset",
    "SingularPencilError",
    "apply_filter",
    "assemble",
    "assemble_dense",
    "bayes_error",
    "decode_sign",
    "filter_coefficients",
    "fit",
    "fit_exact",
    "gen_circles",
    "gen_circles_with_truth",
    "gen_gaussian_mix",
    "gen_gaussian_mix_with_truth",
    "gevd",
    "graph_bandwidth",
    "harmonic_propagate",
    "krr_fit",
    "load_dataset_csv",
    "model_from_json",
    "model_to_json",
    "pencil_solve",
    "predict",
    "save_dataset_csv",
    "schedule",
    "select_landmarks",
]
