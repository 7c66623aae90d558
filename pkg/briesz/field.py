"""
Sampled functions on uniform grids: sampling, Lebesgue norms, translations,
the Lp modulus of continuity and direct quadrature convolution.
"""

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np
from pydantic import ValidationError
from scipy import signal

from .exceptions import DomainError, GridFunctionFormatError, GridMismatchError
from .models import Grid, TestFunctionSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Complex samples of a function on a :class:`Grid`, stored read-only."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=complex, copy=True)
        if values.size != self.grid.size:
            raise GridMismatchError(f"{values.size} values do not fit a grid of {self.grid.size} points")
        values = np.ascontiguousarray(values.reshape(self.grid.shape))
        if not np.all(np.isfinite(values)):
            raise DomainError("GridFunction values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def _check_grid(self, other: "GridFunction") -> None:
        if self.grid != other.grid:
            raise GridMismatchError(f"grids differ: {self.grid} vs {other.grid}")

    def __add__(self, other: "GridFunction") -> "GridFunction":
        self._check_grid(other)
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        self._check_grid(other)
        return GridFunction(self.grid, self.values - other.values)

    def __mul__(self, scalar: complex) -> "GridFunction":
        return GridFunction(self.grid, self.values * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "GridFunction":
        return GridFunction(self.grid, -self.values)

    def integral(self) -> complex:
        """Riemann sum of the samples."""
        return complex(np.sum(self.values) * self.grid.cell_volume)

    def real(self) -> "GridFunction":
        return GridFunction(self.grid, self.values.real)

    def at_origin(self) -> complex:
        return complex(self.values[self.grid.origin_index])

    def coordinates(self) -> list:
        """Node coordinates per axis, each shaped like ``values``."""
        return self.grid.mesh()

    def radii(self) -> np.ndarray:
        return self.grid.radii()


def _center(spec: TestFunctionSpec, grid: Grid) -> np.ndarray:
    center = np.zeros(grid.dim) if spec.center is None else np.asarray(spec.center, dtype=float)
    if center.shape != (grid.dim,):
        raise DomainError(f"center must have {grid.dim} components, got {spec.center}")
    return center


def sample(spec: TestFunctionSpec, grid: Grid) -> GridFunction:
    """
    Evaluate a closed-form test function at the grid nodes.

    Args:
        spec: Function family and parameters
        grid: Sampling lattice

    Returns:
        The sampled GridFunction

    Raises:
        DomainError: If a box or bump does not fit inside the grid box
    """
    center = _center(spec, grid)
    coords = [x - c for x, c in zip(grid.mesh(), center)]
    r2 = sum(x * x for x in coords)
    L_min = min(grid.half_extent)

    if spec.kind == "gaussian":
        c1 = spec.c1 if spec.c1 is not None else (2.0 * math.pi) ** (-grid.dim / 2.0)
        values = c1 * np.exp(-spec.c2 * r2)
    elif spec.kind == "box_indicator":
        corner = np.zeros(grid.dim) if spec.corner is None else np.asarray(spec.corner, dtype=float)
        if corner.shape != (grid.dim,):
            raise DomainError(f"corner must have {grid.dim} components, got {spec.corner}")
        lower = corner + center
        upper = lower + spec.side
        L = np.asarray(grid.half_extent)
        if np.any(lower < -L) or np.any(upper > L):
            raise DomainError(f"box [{lower}, {upper}) is not contained in the grid box")
        inside = np.ones(grid.shape, dtype=bool)
        for x, lo, hi, h in zip(grid.mesh(), lower, upper, grid.spacing):
            eps = 1e-9 * h
            inside &= (x >= lo - eps) & (x < hi - eps)
        values = inside.astype(float)
    elif spec.kind == "smooth_bump":
        if spec.radius + np.max(np.abs(center)) >= L_min:
            raise DomainError(f"bump of radius {spec.radius} is not contained in the grid box")
        rho2 = r2 / spec.radius**2
        values = np.zeros(grid.shape)
        inside = rho2 < 1.0
        values[inside] = np.exp(1.0 - 1.0 / (1.0 - rho2[inside]))
    elif spec.kind == "cosine_packet":
        values = np.cos(spec.frequency * coords[0]) * np.exp(-r2 / (2.0 * spec.width**2))
    else:
        raise DomainError(f"Unknown test function kind {spec.kind}")

    logger.debug(f"Sampled {spec.kind} on grid {grid.shape}")
    return GridFunction(grid, values)


def lp_norm(f: GridFunction, p: float) -> float:
    """
    Riemann-sum Lebesgue norm (cell * sum |f|^p)^(1/p), or max |f| for p = inf.

    The samples are scaled by their maximum before raising to p.
    """
    if not p >= 1:
        raise DomainError(f"lp_norm requires p >= 1, got {p}")
    modulus = np.abs(f.values)
    peak = float(np.max(modulus))
    if math.isinf(p):
        return peak
    if peak == 0.0:
        return 0.0
    total = np.sum((modulus / peak) ** p) * f.grid.cell_volume
    return float(peak * total ** (1.0 / p))


def _shift_cells(values: np.ndarray, cells: int, axis: int) -> np.ndarray:
    """out[j] = values[j - cells] along ``axis``, zero outside."""
    out = np.zeros_like(values)
    M = values.shape[axis]
    if abs(cells) >= M:
        return out
    src = [slice(None)] * values.ndim
    dst = [slice(None)] * values.ndim
    if cells >= 0:
        dst[axis] = slice(cells, M)
        src[axis] = slice(0, M - cells)
    else:
        dst[axis] = slice(0, M + cells)
        src[axis] = slice(-cells, M)
    out[tuple(dst)] = values[tuple(src)]
    return out


def shift(f: GridFunction, h: Sequence[float]) -> GridFunction:
    """
    Translate f by the vector h, T_h f(t) = f(t - h).

    Off-lattice shifts are interpolated linearly along each axis; samples
    drawn from outside the box are zero.
    """
    h = np.asarray(h, dtype=float).reshape(-1)
    if h.shape != (f.grid.dim,):
        raise DomainError(f"shift vector must have {f.grid.dim} components, got {h.size}")
    values = f.values
    for axis, (h_i, step) in enumerate(zip(h, f.grid.spacing)):
        cells = h_i / step
        nearest = round(cells)
        if abs(cells - nearest) <= 1e-9 * max(1.0, abs(cells)):
            cells = float(nearest)
        k = math.floor(cells)
        theta = cells - k
        shifted = _shift_cells(values, k, axis)
        if theta > 0.0:
            shifted = (1.0 - theta) * shifted + theta * _shift_cells(values, k + 1, axis)
        values = shifted
    return GridFunction(f.grid, values)


# Ratio of the fixed geometric radius ladder used for random directions.
LADDER_RATIO = 1.1


def _random_directions(dim: int, directions: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    random = rng.normal(size=(directions, dim))
    return random / np.linalg.norm(random, axis=1, keepdims=True)


def _check_delta(f: GridFunction, delta: float) -> None:
    if not 0 <= delta < min(f.grid.half_extent):
        raise DomainError(f"delta must lie in [0, {min(f.grid.half_extent)}), got {delta}")


def _sampled_moduli(f: GridFunction, p: float, deltas: np.ndarray, directions: int, seed: int) -> np.ndarray:
    """
    Sampled modulus at each delta.

    The shift set of a radius contains the set of every smaller radius except
    for the axis shifts of length exactly delta. Those lie between two lattice
    shifts on the same axis, where the interpolated shift is affine in its
    length and the norm is convex, so the result is nondecreasing in delta.
    """
    if directions < 1:
        raise DomainError(f"directions must be at least 1, got {directions}")
    out = np.zeros(len(deltas))
    if len(deltas) == 0 or float(np.max(deltas)) == 0.0:
        return out
    d_max = float(np.max(deltas))
    dim = f.grid.dim

    # Lattice shifts along each axis: running max over k cells in both directions.
    lattice = []
    for axis, step in enumerate(f.grid.spacing):
        k_max = int(math.floor(d_max / step * (1.0 + 1e-12)))
        norms = np.zeros(k_max + 1)
        for k in range(1, k_max + 1):
            forward = GridFunction(f.grid, _shift_cells(f.values, k, axis)) - f
            backward = GridFunction(f.grid, _shift_cells(f.values, -k, axis)) - f
            norms[k] = max(lp_norm(forward, p), lp_norm(backward, p))
        lattice.append((step, np.maximum.accumulate(norms)))

    h_min = min(f.grid.spacing)
    radii = np.empty(0)
    if d_max >= h_min:
        radii = h_min * LADDER_RATIO ** np.arange(int(math.log(d_max / h_min) / math.log(LADDER_RATIO)) + 2)
        radii = radii[radii <= d_max]
    units = _random_directions(dim, directions, seed)
    ray = np.zeros(len(radii))
    for j, t in enumerate(radii):
        ray[j] = max(lp_norm(shift(f, t * u) - f, p) for u in units)
    ray = np.maximum.accumulate(ray) if len(ray) else ray

    for i, delta in enumerate(deltas):
        if delta == 0.0:
            continue
        best = 0.0
        for axis, (step, norms) in enumerate(lattice):
            k = min(int(math.floor(delta / step * (1.0 + 1e-12))), len(norms) - 1)
            best = max(best, norms[k])
            e = np.zeros(dim)
            e[axis] = delta
            best = max(best, lp_norm(shift(f, e) - f, p), lp_norm(shift(f, -e) - f, p))
        count = int(np.searchsorted(radii, delta, side="right"))
        if count:
            best = max(best, ray[count - 1])
        out[i] = best
    return out


def modulus_of_continuity(
    f: GridFunction,
    p: float,
    delta: float,
    directions: int = 8,
    seed: int = 0,
) -> float:
    """
    Sampled Lp modulus of continuity, max ||T_h f - f||_p over |h| <= delta.

    The shifts are the axis vectors of every lattice length up to delta and
    of length delta, plus ``directions`` seeded random unit vectors scaled to
    a fixed geometric ladder of radii up to delta. The sets grow with delta,
    so the result is nondecreasing in delta and a lower bound of the true
    supremum.

    Args:
        f: Function
        p: Lebesgue exponent, 1 <= p <= inf
        delta: Shift radius, 0 <= delta < min L_i
        directions: Number of random directions
        seed: Seed of the direction generator

    Returns:
        The sampled modulus
    """
    _check_delta(f, delta)
    return float(_sampled_moduli(f, p, np.array([float(delta)]), directions, seed)[0])


def modulus_curve(
    f: GridFunction,
    p: float,
    deltas: Iterable[float],
    directions: int = 8,
    seed: int = 0,
) -> np.ndarray:
    """Modulus of continuity along nondecreasing radii, sharing the shifted norms."""
    deltas = np.asarray(list(deltas), dtype=float)
    if np.any(np.diff(deltas) < 0):
        raise DomainError("deltas must be nondecreasing")
    for delta in deltas:
        _check_delta(f, float(delta))
    return _sampled_moduli(f, p, deltas, directions, seed)


def convolve_direct(f: GridFunction, g: GridFunction) -> GridFunction:
    """
    Quadrature convolution (f*g)(t_j) = cell * sum_s f(t_j - s) g(s).

    Both functions are zero outside the box. The sum is evaluated directly,
    at a cost quadratic in the number of nodes.
    """
    if f.grid != g.grid:
        raise GridMismatchError(f"convolve_direct needs a common grid: {f.grid} vs {g.grid}")
    full = signal.convolve(f.values, g.values, mode="full", method="direct")
    window = tuple(slice(M // 2, M // 2 + M) for M in f.grid.points)
    return GridFunction(f.grid, full[window] * f.grid.cell_volume)


def to_json_dict(f: GridFunction) -> dict:
    """GridFunction as a JSON-ready dict with row-major values."""
    flat = f.values.reshape(-1)
    return {
        "dim": f.grid.dim,
        "half_extent": list(f.grid.half_extent),
        "points": list(f.grid.points),
        "values_re": flat.real.tolist(),
        "values_im": flat.imag.tolist(),
    }


def from_json_dict(data: dict) -> GridFunction:
    """Build a GridFunction from its JSON dict, rejecting malformed input."""
    missing = {"dim", "half_extent", "points", "values_re", "values_im"} - set(data)
    if missing:
        raise GridFunctionFormatError(f"GridFunction document lacks {sorted(missing)}")
    try:
        grid = Grid(dim=data["dim"], half_extent=data["half_extent"], points=data["points"])
    except ValidationError as e:
        raise GridFunctionFormatError(f"Invalid grid in GridFunction document: {e}") from e
    re = np.asarray(data["values_re"], dtype=float)
    im = np.asarray(data["values_im"], dtype=float)
    if re.size != grid.size or im.size != grid.size:
        raise GridFunctionFormatError(
            f"GridFunction document has {re.size} real and {im.size} imaginary values for {grid.size} points"
        )
    return GridFunction(grid, re + 1j * im)


def write_grid_function(f: GridFunction, path: Union[str, Path]) -> None:
    """Write a GridFunction JSON document."""
    with open(Path(path), "w") as fh:
        json.dump(to_json_dict(f), fh)


def read_grid_function(path: Union[str, Path]) -> GridFunction:
    """Read a GridFunction JSON document."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"GridFunction file {path} not found")
    try:
        with open(path, "r") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as e:
        raise GridFunctionFormatError(f"{path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise GridFunctionFormatError(f"{path} does not hold a JSON object")
    return from_json_dict(data)
