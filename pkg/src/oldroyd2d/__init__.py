"""Pseudo-spectral tools for a 2D viscoelastic flow model with fractional
dissipation, plus a dyadic-analysis toolkit for checking the inequalities
that drive its energy estimates."""

__version__ = "0.1.0"

from .errors import (
    BlowUpError,
    GridMismatchError,
    PartitionValidationError,
    UnsupportedConfigurationError,
)
from .fields import SpectralScalar, SpectralSymTensor, SpectralVector
from .grid import TorusGrid
from .system import State, SystemParams
from .littlewood_paley import (
    BesovSpec,
    NormRequest,
    NormResult,
    besov_norm,
    block,
    build_partition,
    evaluate_norm,
    lp_norm,
    sobolev_norm,
)
from .integrator import (
    DiagnosticRecord,
    InitialCondition,
    RunConfig,
    RunResult,
    run,
)
from .verifier import ESTIMATE_IDS, EstimateReport, run_default_suites

__all__ = [
    "BesovSpec",
    "BlowUpError",
    "DiagnosticRecord",
    "ESTIMATE_IDS",
    "EstimateReport",
    "GridMismatchError",
    "InitialCondition",
    "NormRequest",
    "NormResult",
    "PartitionValidationError",
    "RunConfig",
    "RunResult",
    "SpectralScalar",
    "SpectralSymTensor",
    "SpectralVector",
    "State",
    "SystemParams",
    "TorusGrid",
    "UnsupportedConfigurationError",
    "besov_norm",
    "block",
    "build_partition",
    "evaluate_norm",
    "lp_norm",
    "run",
    "run_default_suites",
    "sobolev_norm",
    "__version__",
]
