"""
Pydantic models for briesz configuration and input validation.
"""

import json
import math
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union, get_args

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# Default half extent L and points per axis M, by dimension.
DEFAULT_GRIDS: Dict[int, Tuple[float, int]] = {1: (16.0, 1024), 2: (8.0, 256), 3: (6.0, 64)}

ExperimentKind = Literal[
    "kernel",
    "apply",
    "norms",
    "young",
    "converge",
    "uconverge",
    "gls",
    "gauss-limit",
    "bounds",
    "lowerbound",
]
EXPERIMENT_KINDS = get_args(ExperimentKind)


class SpecFunConfig(BaseModel):
    """Configuration for special function evaluation."""

    series_tol: float = Field(
        1e-17, description="Relative truncation tolerance of the Bessel power series", gt=0
    )
    crossover_x: float = Field(
        20.0, description="Argument where the power series hands off to the asymptotic expansion", gt=0
    )


class Grid(BaseModel):
    """Uniform sampling lattice of the box [-L_1, L_1) x ... x [-L_n, L_n)."""

    model_config = ConfigDict(frozen=True)

    dim: int = Field(..., description="Spatial dimension n", ge=1, le=3)
    half_extent: Tuple[float, ...] = Field(..., description="Half side L_i per axis")
    points: Tuple[int, ...] = Field(..., description="Number of samples M_i per axis")

    @model_validator(mode="before")
    @classmethod
    def broadcast_scalars(cls, data: Any) -> Any:
        if isinstance(data, dict):
            dim = data.get("dim")
            for key in ("half_extent", "points"):
                if dim is not None and isinstance(data.get(key), (int, float)):
                    data = {**data, key: [data[key]] * dim}
        return data

    @field_validator("half_extent")
    @classmethod
    def validate_half_extent(cls, v: Tuple[float, ...]) -> Tuple[float, ...]:
        if any(not (L > 0 and math.isfinite(L)) for L in v):
            raise ValueError("half_extent entries must be positive and finite")
        return v

    @field_validator("points")
    @classmethod
    def validate_points(cls, v: Tuple[int, ...]) -> Tuple[int, ...]:
        if any(M < 8 or M % 2 for M in v):
            raise ValueError("points entries must be even and at least 8")
        return v

    @model_validator(mode="after")
    def validate_lengths(self) -> "Grid":
        if len(self.half_extent) != self.dim or len(self.points) != self.dim:
            raise ValueError(f"half_extent and points must both have length dim={self.dim}")
        return self

    @classmethod
    def default(cls, dim: int) -> "Grid":
        """Default grid for a dimension."""
        if dim not in DEFAULT_GRIDS:
            raise ValueError(f"No default grid for dim={dim}")
        L, M = DEFAULT_GRIDS[dim]
        return cls(dim=dim, half_extent=[L] * dim, points=[M] * dim)

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(self.points)

    @property
    def size(self) -> int:
        return int(np.prod(self.points))

    @property
    def spacing(self) -> Tuple[float, ...]:
        return tuple(2.0 * L / M for L, M in zip(self.half_extent, self.points))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def origin_index(self) -> Tuple[int, ...]:
        return tuple(M // 2 for M in self.points)

    def axes(self) -> List[np.ndarray]:
        """Sample coordinates x_j = -L + j*h along each axis."""
        return [-L + h * np.arange(M) for L, h, M in zip(self.half_extent, self.spacing, self.points)]

    def mesh(self) -> List[np.ndarray]:
        return np.meshgrid(*self.axes(), indexing="ij")

    def radii(self) -> np.ndarray:
        """Euclidean norm of every node, shaped like the grid."""
        return np.sqrt(sum(x * x for x in self.mesh()))

    def refined(self, factor: int = 2) -> "Grid":
        """Same box sampled with ``factor`` times as many points per axis."""
        return Grid(dim=self.dim, half_extent=self.half_extent, points=[M * factor for M in self.points])

    def padded(self, factor: int) -> "Grid":
        """Box enlarged ``factor`` times at the same spacing."""
        return Grid(
            dim=self.dim,
            half_extent=[L * factor for L in self.half_extent],
            points=[M * factor for M in self.points],
        )


class TestFunctionSpec(BaseModel):
    """Closed-form test function sampled onto a grid."""

    __test__ = False  # not a pytest class

    kind: Literal["gaussian", "box_indicator", "smooth_bump", "cosine_packet"] = Field(
        "gaussian", description="Function family"
    )
    c1: Optional[float] = Field(
        None, description="Gaussian amplitude; None gives (2*pi)^(-n/2), the standard normal density", gt=0
    )
    c2: float = Field(0.5, description="Gaussian rate in c1*exp(-c2*|x|^2)", gt=0)
    corner: Optional[List[float]] = Field(None, description="Lower corner of the box indicator (origin if unset)")
    side: float = Field(1.0, description="Side length of the box indicator", gt=0)
    radius: float = Field(1.0, description="Support radius of the smooth bump", gt=0)
    frequency: float = Field(1.0, description="Carrier frequency of the cosine packet along the first axis", gt=0)
    width: float = Field(1.0, description="Gaussian envelope width of the cosine packet", gt=0)
    center: Optional[List[float]] = Field(None, description="Translation applied to the function (origin if unset)")


class KernelSpec(BaseModel):
    """Bochner-Riesz kernel parameters with derived exponents."""

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(..., description="Bochner-Riesz order alpha", gt=-1)
    dim: int = Field(..., description="Spatial dimension n", ge=1, le=3)
    R: float = Field(1.0, description="Multiplier radius", gt=0)

    @model_validator(mode="after")
    def validate_lambda(self) -> "KernelSpec":
        if self.lambda_ < 0:
            raise ValueError(
                f"lambda = alpha + n/2 = {self.lambda_} is negative; Bessel orders below zero are unsupported"
            )
        return self

    @property
    def lambda_(self) -> float:
        return self.alpha + self.dim / 2.0

    @property
    def alpha0(self) -> float:
        """Critical index (n - 1)/2."""
        return (self.dim - 1) / 2.0

    @property
    def q0(self) -> float:
        """Exponent n/((n+1)/2 + alpha) where the kernel Lq norm blows up."""
        return self.dim / ((self.dim + 1) / 2.0 + self.alpha)

    @property
    def decay(self) -> float:
        """Kernel decay exponent (n+1)/2 + alpha."""
        return (self.dim + 1) / 2.0 + self.alpha

    @property
    def norm_const(self) -> float:
        """c(alpha, n) = 2^alpha Gamma(alpha+1) (2 pi)^(-n/2)."""
        from .specfun import gamma

        return 2.0**self.alpha * gamma(self.alpha + 1.0) * (2.0 * math.pi) ** (-self.dim / 2.0)

    def with_radius(self, R: float) -> "KernelSpec":
        return KernelSpec(alpha=self.alpha, dim=self.dim, R=R)


class GeneratingFunction(BaseModel):
    """Generating function psi of a Grand Lebesgue Space on (a, b)."""

    kind: Literal["power", "iwaniec_sbordone", "tabulated", "single_point"] = Field(
        "power", description="Generating function family"
    )
    a: float = Field(1.0, description="Left end of the support", ge=1)
    b: float = Field(math.inf, description="Right end of the support (may be infinite)")
    m: float = Field(2.0, description="Exponent of psi(p) = p^(1/m)", gt=0)
    alpha_exp: float = Field(1.0, description="Left pole exponent of the Iwaniec-Sbordone function", ge=0)
    beta_exp: float = Field(0.0, description="Right pole exponent of the Iwaniec-Sbordone function", ge=0)
    p_values: Optional[List[float]] = Field(None, description="Abscissae of a tabulated psi")
    psi_values: Optional[List[float]] = Field(None, description="Values of a tabulated psi")
    point: Optional[float] = Field(None, description="Exponent r of the single-point function", ge=1)
    scale: float = Field(1.0, description="Constant factor multiplying psi", gt=0)

    @model_validator(mode="after")
    def validate_kind(self) -> "GeneratingFunction":
        if not self.a < self.b:
            raise ValueError(f"support (a, b) = ({self.a}, {self.b}) is empty")
        if self.kind == "tabulated":
            if not self.p_values or not self.psi_values or len(self.p_values) != len(self.psi_values):
                raise ValueError("tabulated psi needs p_values and psi_values of equal nonzero length")
            if len(self.p_values) < 2 or any(np.diff(self.p_values) <= 0):
                raise ValueError("tabulated p_values must be strictly increasing with at least two entries")
            if min(self.psi_values) <= 0:
                raise ValueError("tabulated psi_values must be positive")
            if self.p_values[0] < self.a or self.p_values[-1] > self.b:
                raise ValueError("tabulated p_values must lie inside the support")
        if self.kind == "single_point" and self.point is None:
            raise ValueError("single_point psi needs the exponent 'point'")
        if self.kind == "iwaniec_sbordone" and self.beta_exp > 0 and not math.isfinite(self.b):
            raise ValueError("iwaniec_sbordone with beta_exp > 0 needs a finite b")
        return self

    @property
    def support_sup(self) -> float:
        """Largest exponent carried by psi: the point itself for single_point, b otherwise."""
        if self.kind == "single_point":
            return float(self.point)
        return self.b


class GridConfig(BaseModel):
    """Grid parameters of an experiment (same extent and resolution on every axis)."""

    dim: int = Field(1, description="Spatial dimension n", ge=1, le=3)
    half_extent: Optional[float] = Field(None, description="Half side L; dimension default if unset", gt=0)
    points: Optional[int] = Field(None, description="Points per axis M; dimension default if unset")

    def to_grid(self) -> Grid:
        L, M = DEFAULT_GRIDS[self.dim]
        return Grid(
            dim=self.dim,
            half_extent=self.half_extent if self.half_extent is not None else L,
            points=self.points if self.points is not None else M,
        )


class OperatorConfig(BaseModel):
    """Bochner-Riesz operator parameters."""

    alpha: float = Field(0.5, description="Bochner-Riesz order", gt=-1)
    R: List[float] = Field(default_factory=lambda: [2.0, 4.0, 8.0, 16.0, 32.0], description="Multiplier radii")
    method: Literal["spectral", "direct"] = Field("spectral", description="Operator implementation")
    pad_factor: int = Field(1, description="Zero-padding factor of spectral operators", ge=1)

    @field_validator("R")
    @classmethod
    def validate_R(cls, v: List[float]) -> List[float]:
        if not v or any(R <= 0 for R in v):
            raise ValueError("R must be a nonempty list of positive radii")
        return v


class NormConfig(BaseModel):
    """Lebesgue and Grand Lebesgue norm parameters."""

    p: float = Field(2.0, description="Lebesgue exponent p (inf allowed)", ge=1)
    r: List[float] = Field(default_factory=lambda: [4.0], description="Target exponents r")
    psi: GeneratingFunction = Field(default_factory=GeneratingFunction, description="Generating function")
    p_samples: int = Field(64, description="Number of sampled exponents in Grand Lebesgue norms", ge=16)
    p_max: float = Field(64.0, description="Cap of the sampled exponents for unbounded supports", gt=1)


class YoungConfig(BaseModel):
    """Randomized Young inequality trials."""

    trials: int = Field(200, description="Number of randomized trials", ge=1)
    components: int = Field(3, description="Gaussian components per random function", ge=2)
    center_range: float = Field(3.0, description="Component centers are drawn from [-c, c]", gt=0)
    variance_range: Tuple[float, float] = Field((0.2, 2.0), description="Component variance interval")
    gaussian_triples: List[Tuple[float, float, float]] = Field(
        default_factory=lambda: [(4 / 3, 4 / 3, 2.0), (1.5, 1.25, 15 / 7), (2.0, 1.5, 6.0)],
        description="(p, q, r) triples for the Gaussian equality checks",
    )


class SearchConfig(BaseModel):
    """Grid of the lower-bound search over (alpha, R)."""

    alpha_min: float = Field(0.05, description="Smallest alpha", gt=0)
    alpha_max: float = Field(20.0, description="Largest alpha", gt=0)
    alpha_points: int = Field(400, description="Number of alpha values", ge=1)
    R_min: float = Field(1.0, description="Smallest R", gt=0)
    R_max: float = Field(100.0, description="Largest R", gt=0)
    R_points: int = Field(200, description="Number of R values (log spaced)", ge=1)

    @model_validator(mode="after")
    def validate_ranges(self) -> "SearchConfig":
        if self.alpha_min > self.alpha_max or self.R_min > self.R_max:
            raise ValueError("search ranges must satisfy min <= max")
        return self

    def alpha_grid(self) -> np.ndarray:
        return np.linspace(self.alpha_min, self.alpha_max, self.alpha_points)

    def R_grid(self) -> np.ndarray:
        return np.geomspace(self.R_min, self.R_max, self.R_points)


class KernelTableConfig(BaseModel):
    """Kernel tabulation parameters."""

    r_max: float = Field(20.0, description="Largest tabulated radius", gt=0)
    r_points: int = Field(201, description="Number of tabulated radii", ge=2)
    q: List[float] = Field(default_factory=lambda: [1.2, 1.5, 2.0, 3.0], description="Exponents of the Lq norms")


class BoundsConfig(BaseModel):
    """Bound table exponents."""

    p: List[float] = Field(default_factory=lambda: [1.5, 2.0, 3.0], description="Exponents p")
    r: List[float] = Field(default_factory=lambda: [2.0, 4.0, 8.0], description="Exponents r")


class OutputConfig(BaseModel):
    """Report destination."""

    path: Optional[str] = Field(None, description="Output file; stdout when unset")
    format: Literal["csv", "json"] = Field("csv", description="Report format")


class ExperimentConfig(BaseModel):
    """Main configuration for a briesz experiment."""

    kind: ExperimentKind = Field("converge", description="Experiment to run")
    grid: GridConfig = Field(default_factory=GridConfig, description="Grid configuration")
    operator: OperatorConfig = Field(default_factory=OperatorConfig, description="Operator configuration")
    norms: NormConfig = Field(default_factory=NormConfig, description="Norm configuration")
    function: TestFunctionSpec = Field(default_factory=TestFunctionSpec, description="Input test function")
    functions: Optional[List[TestFunctionSpec]] = Field(
        None, description="Test function family (gls); default family when unset"
    )
    young: YoungConfig = Field(default_factory=YoungConfig, description="Young trial configuration")
    search: SearchConfig = Field(default_factory=SearchConfig, description="Lower-bound search grid")
    kernel_table: KernelTableConfig = Field(default_factory=KernelTableConfig, description="Kernel table configuration")
    bounds: BoundsConfig = Field(default_factory=BoundsConfig, description="Bound table configuration")
    output: OutputConfig = Field(default_factory=OutputConfig, description="Output configuration")
    input_path: Optional[str] = Field(None, description="GridFunction JSON input (apply, norms)")
    seed: int = Field(0, description="Seed of the PCG64 generator for randomized trials", ge=0)

    @classmethod
    def for_kind(cls, kind: str, **overrides: Any) -> "ExperimentConfig":
        """Default configuration of an experiment kind."""
        if kind not in EXPERIMENT_KINDS:
            raise ValueError(f"kind must be one of {', '.join(EXPERIMENT_KINDS)}")
        defaults: Dict[str, Any] = {"kind": kind}
        if kind in ("converge", "uconverge"):
            defaults["grid"] = {"dim": 2}
            defaults["function"] = {"kind": "smooth_bump", "radius": 2.0}
            defaults["norms"] = {"p": math.inf if kind == "uconverge" else 2.0}
        elif kind == "gls":
            defaults["grid"] = {"dim": 2}
            defaults["operator"] = {"alpha": 0.5, "R": [4.0]}
            defaults["norms"] = {
                "r": [4.0, 6.0, 8.0],
                "psi": {"kind": "iwaniec_sbordone", "a": 1.0, "b": 3.0, "alpha_exp": 1.0, "beta_exp": 0.0},
            }
        elif kind == "gauss-limit":
            defaults["operator"] = {"R": [2.0, 4.0, 8.0]}
        elif kind in ("kernel", "bounds"):
            defaults["grid"] = {"dim": 2}
            defaults["operator"] = {"alpha": 0.5, "R": [1.0]}
        elif kind == "lowerbound":
            defaults["grid"] = {"dim": 2}
            defaults["norms"] = {"p": 2.0, "r": [4.0]}
        elif kind == "apply":
            defaults["operator"] = {"alpha": 0.5, "R": [4.0]}
        defaults.update(overrides)
        return cls(**defaults)

    @classmethod
    def from_yaml_file(cls, config_path: Union[str, Path]) -> "ExperimentConfig":
        """Load configuration from YAML file."""
        path = Path(config_path)
        if not path.exists():
            raise FileNotFoundError(f"Configuration file {config_path} not found")

        with open(path, "r") as f:
            config_dict = yaml.safe_load(f)

        return cls(**config_dict)

    @classmethod
    def from_json_file(cls, config_path: Union[str, Path]) -> "ExperimentConfig":
        """Load configuration from JSON file."""
        path = Path(config_path)
        if not path.exists():
            raise FileNotFoundError(f"Configuration file {config_path} not found")

        with open(path, "r") as f:
            config_dict = json.load(f)

        return cls(**config_dict)

    def to_dict(self) -> Dict[str, Any]:
        """Plain dict of builtins (tuples as lists, infinities kept as floats)."""
        return json.loads(json.dumps(self.model_dump()))

    def to_yaml_file(self, config_path: Union[str, Path]) -> None:
        """Save configuration to YAML file."""
        with open(Path(config_path), "w") as f:
            yaml.safe_dump(self.to_dict(), f, default_flow_style=False)

    def to_json_file(self, config_path: Union[str, Path]) -> None:
        """Save configuration to JSON file."""
        with open(Path(config_path), "w") as f:
            json.dump(self.to_dict(), f, indent=2)


def load_config_from_file(config_path: Union[str, Path]) -> ExperimentConfig:
    """Load an experiment configuration from a YAML or JSON file."""
    path = Path(config_path)
    if not path.exists():
        raise FileNotFoundError(f"Configuration file {config_path} not found")

    with open(path, "r") as f:
        if path.suffix.lower() in [".yml", ".yaml"]:
            config_dict = yaml.safe_load(f)
        elif path.suffix.lower() == ".json":
            config_dict = json.load(f)
        else:
            raise ValueError("Configuration file must be YAML or JSON")

    return ExperimentConfig(**config_dict)
