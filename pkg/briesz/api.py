"""
Public API for briesz.
"""

from .specfun import SpecialFunctions, bessel_j, bessel_ratio, bessel_zeros, gamma
from .field import (
    GridFunction,
    convolve_direct,
    lp_norm,
    modulus_curve,
    modulus_of_continuity,
    read_grid_function,
    sample,
    shift,
    write_grid_function,
)
from .spectral import (
    Symbol,
    apply_multiplier,
    bochner_riesz_spectral,
    convolve_spectral,
    dual_grid,
    forward_ft,
    gaussian_limit_operator,
    inverse_ft,
    radial_inverse_ft,
)
from .kernel import (
    bochner_riesz_direct,
    kernel_eval,
    kernel_lq_norm,
    kernel_sample,
    key_estimate,
    omega_bound_term,
)
from .gls import (
    BoundParams,
    beckner_constant,
    gls_norm,
    golden_section,
    nu_of,
    psi_eval,
    qn_lower_search,
    theta,
    w_coeff,
    young_bound,
)
from .experiments import ExperimentRunner, run_batch, run_experiment
from .report import Report, write_report
from .models import (
    ExperimentConfig,
    GeneratingFunction,
    Grid,
    KernelSpec,
    SpecFunConfig,
    TestFunctionSpec,
    load_config_from_file,
)
from .exceptions import (
    AdmissibilityError,
    BrieszError,
    ConfigurationError,
    DomainError,
    EmptyIntervalError,
    GridFunctionFormatError,
    GridMismatchError,
    NumericalGuardError,
    NyquistError,
    ScalingRelationError,
)
from .__init__ import __version__, __author__, __email__

__all__ = [
    # Core classes
    "ExperimentRunner",
    "GridFunction",
    "Symbol",
    "SpecialFunctions",
    "BoundParams",
    "Report",
    # Configuration classes
    "ExperimentConfig",
    "GeneratingFunction",
    "Grid",
    "KernelSpec",
    "SpecFunConfig",
    "TestFunctionSpec",
    "load_config_from_file",
    # Special functions
    "gamma",
    "bessel_j",
    "bessel_ratio",
    "bessel_zeros",
    # Grid functions
    "sample",
    "lp_norm",
    "shift",
    "modulus_of_continuity",
    "modulus_curve",
    "convolve_direct",
    "read_grid_function",
    "write_grid_function",
    # Operators
    "forward_ft",
    "inverse_ft",
    "dual_grid",
    "apply_multiplier",
    "bochner_riesz_spectral",
    "bochner_riesz_direct",
    "gaussian_limit_operator",
    "convolve_spectral",
    "radial_inverse_ft",
    # Kernel
    "kernel_eval",
    "kernel_sample",
    "kernel_lq_norm",
    "key_estimate",
    "omega_bound_term",
    # Bounds
    "w_coeff",
    "psi_eval",
    "gls_norm",
    "golden_section",
    "nu_of",
    "beckner_constant",
    "young_bound",
    "theta",
    "qn_lower_search",
    # Experiments
    "run_experiment",
    "run_batch",
    "write_report",
    # Exceptions
    "BrieszError",
    "DomainError",
    "EmptyIntervalError",
    "ScalingRelationError",
    "GridMismatchError",
    "NumericalGuardError",
    "NyquistError",
    "AdmissibilityError",
    "ConfigurationError",
    "GridFunctionFormatError",
    # Metadata
    "__version__",
    "__author__",
    "__email__",
]
