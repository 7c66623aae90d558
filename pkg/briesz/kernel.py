"""
The Bochner-Riesz kernel K^R(z) = R^n c(alpha, n) J_lambda(R|z|) / (R|z|)^lambda.

Besides pointwise evaluation this module computes Lq norms of the kernel by
radial quadrature: Gauss-Legendre panels between consecutive zeros of
J_lambda up to a cutoff, plus an envelope estimate of the tail beyond it.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from .exceptions import DomainError, GridMismatchError, NumericalGuardError
from .field import GridFunction, convolve_direct, lp_norm, modulus_curve
from .models import Grid, KernelSpec
from .specfun import bessel_ratio, bessel_zeros, gamma

logger = logging.getLogger(__name__)

# Largest grid handed to the quadratic-cost direct convolution.
MAX_DIRECT_NODES = 2**20


def sphere_area(dim: int) -> float:
    """Surface measure of the unit sphere in R^n, 2 pi^(n/2) / Gamma(n/2)."""
    return 2.0 * math.pi ** (dim / 2.0) / gamma(dim / 2.0)


def _mean_abs_cos_power(q: float) -> float:
    """Average of |cos t|^q over a period."""
    return gamma((q + 1.0) / 2.0) / (math.sqrt(math.pi) * gamma(q / 2.0 + 1.0))


def kernel_radial(spec: KernelSpec, r: np.ndarray) -> np.ndarray:
    """Kernel values at distances ``r`` from the origin."""
    r = np.abs(np.asarray(r, dtype=float))
    return spec.R**spec.dim * spec.norm_const * np.asarray(bessel_ratio(spec.lambda_, spec.R * r))


def kernel_eval(spec: KernelSpec, z) -> float:
    """
    Evaluate K^R at a point z of R^n, finite at the origin.

    Args:
        spec: Kernel parameters
        z: Point with n coordinates

    Returns:
        The kernel value
    """
    z = np.asarray(z, dtype=float).reshape(-1)
    if z.size != spec.dim:
        raise DomainError(f"point must have {spec.dim} coordinates, got {z.size}")
    return float(kernel_radial(spec, np.linalg.norm(z)))


def kernel_sample(spec: KernelSpec, grid: Grid) -> GridFunction:
    """Kernel sampled at every grid node."""
    if grid.dim != spec.dim:
        raise GridMismatchError(f"kernel dimension {spec.dim} differs from grid dimension {grid.dim}")
    return GridFunction(grid, kernel_radial(spec, grid.radii()))


def kernel_envelope(spec: KernelSpec, r_min: float = 5.0, r_max: float = 500.0, samples: int = 4000) -> float:
    """
    Envelope constant max |K^R(r)| r^((n+1)/2 + alpha) over [r_min, r_max].

    A bounded value across ranges is the numerical form of the kernel's decay law.
    """
    if not 0 < r_min < r_max:
        raise DomainError(f"need 0 < r_min < r_max, got {r_min}, {r_max}")
    r = np.geomspace(r_min, r_max, samples)
    return float(np.max(np.abs(kernel_radial(spec, r)) * r**spec.decay))


def _integrate_panels(
    func: Callable[[np.ndarray], np.ndarray],
    edges: np.ndarray,
    order: int = 16,
    rtol: float = 1e-10,
    max_depth: int = 12,
) -> Tuple[float, float, int]:
    """
    Gauss-Legendre quadrature over consecutive panels with bisection refinement.

    Each panel is integrated at ``order`` and ``2 * order`` nodes; panels
    whose two values disagree beyond ``rtol`` are halved.

    Returns:
        (integral, error estimate, number of accepted panels)
    """
    x_lo, w_lo = leggauss(order)
    x_hi, w_hi = leggauss(2 * order)
    a, b = edges[:-1].astype(float), edges[1:].astype(float)
    total, error, accepted = 0.0, 0.0, 0
    for depth in range(max_depth + 1):
        mid = 0.5 * (a + b)[:, None]
        half = 0.5 * (b - a)
        lo = func(mid + half[:, None] * x_lo) @ w_lo * half
        hi = func(mid + half[:, None] * x_hi) @ w_hi * half
        diff = np.abs(hi - lo)
        ok = (diff <= rtol * np.abs(hi)) | (diff < 1e-300) | (depth == max_depth)
        total += float(np.sum(hi[ok]))
        error += float(np.sum(diff[ok]))
        accepted += int(np.count_nonzero(ok))
        if np.all(ok):
            break
        centre = mid[~ok, 0]
        a, b = np.concatenate([a[~ok], centre]), np.concatenate([centre, b[~ok]])
    return total, error, accepted


@dataclass
class LqNormResult:
    """Kernel Lq norm with its quadrature breakdown."""

    value: float
    error: float
    panel_part: float
    tail_part: float
    u_cut: float
    envelope: float
    panels: int
    q: float
    q0: float


def kernel_lq_norm(spec: KernelSpec, q: float, u_cut: Optional[float] = None, order: int = 16) -> LqNormResult:
    """
    Lq norm of K^R by radial quadrature.

    The unit-radius kernel is integrated, normalized by its peak K(0), and
    scaled back with ||K^R||_q = R^(n - n/q) ||K^1||_q.

    Args:
        spec: Kernel parameters
        q: Exponent, q > q0 (q = inf gives the peak value)
        u_cut: Quadrature cutoff; max(200, 50/(q - q0)) when omitted
        order: Gauss-Legendre order of the coarse rule

    Returns:
        LqNormResult with value, error estimate and the panel/tail split
        of the normalized integral

    Raises:
        DomainError: If q <= q0, where the norm is infinite
    """
    q0 = spec.q0
    peak = abs(float(kernel_radial(spec.with_radius(1.0), 0.0)))
    scale = spec.R ** (spec.dim - (0.0 if math.isinf(q) else spec.dim / q))
    if math.isinf(q):
        return LqNormResult(peak * scale, 0.0, 1.0, 0.0, 0.0, 0.0, 0, q, q0)
    if not q > q0:
        raise DomainError(f"the kernel Lq norm is infinite for q <= q0 = {q0:.6g}, got q = {q}")

    lam, dim, beta = spec.lambda_, spec.dim, spec.decay
    u_cut = u_cut if u_cut is not None else max(200.0, 50.0 / (q - q0))
    sigma = sphere_area(dim)
    ratio0 = float(bessel_ratio(lam, 0.0))

    def integrand(u: np.ndarray) -> np.ndarray:
        return np.abs(np.asarray(bessel_ratio(lam, u)) / ratio0) ** q * u ** (dim - 1)

    edges = np.concatenate([[0.0], bessel_zeros(lam, u_cut), [u_cut]])
    edges = np.unique(edges)
    panel_part, quad_error, panels = _integrate_panels(integrand, edges, order=order)
    panel_part *= sigma
    quad_error *= sigma

    # envelope |K/K(0)| <= C u^(-beta), fitted on the last stretch before the cutoff
    u_fit = np.linspace(0.5 * u_cut, u_cut, 512)
    fitted = float(np.max(np.abs(np.asarray(bessel_ratio(lam, u_fit)) / ratio0) * u_fit**beta))
    asymptotic = math.sqrt(2.0 / math.pi) / ratio0
    envelope = max(fitted, asymptotic)
    tail_part = sigma * envelope**q * _mean_abs_cos_power(q) * u_cut ** (dim - beta * q) / (beta * q - dim)

    integral = panel_part + tail_part
    value = peak * integral ** (1.0 / q) * scale
    error = value * (quad_error + tail_part) / (q * integral)
    logger.debug(
        f"||K||_{q} for alpha={spec.alpha}, n={dim}: {panels} panels to u={u_cut:.4g}, "
        f"panel part {panel_part:.6g}, tail {tail_part:.3g}"
    )
    return LqNormResult(value, error, panel_part, tail_part, u_cut, envelope * peak, panels, q, q0)


def bochner_riesz_direct(f: GridFunction, spec: KernelSpec) -> GridFunction:
    """
    Bochner-Riesz mean as the quadrature convolution f * K^R.

    Raises:
        NumericalGuardError: If the grid has more than 2^20 nodes
    """
    if f.grid.size > MAX_DIRECT_NODES:
        raise NumericalGuardError(
            f"direct convolution refuses grids above {MAX_DIRECT_NODES} nodes, got {f.grid.size}"
        )
    return convolve_direct(f, kernel_sample(spec, f.grid))


@dataclass
class OmegaLadder:
    """Sampled modulus of continuity on increasing radii, capped at 2||f||_p."""

    deltas: np.ndarray
    values: np.ndarray
    cap: float

    def __call__(self, delta: np.ndarray) -> np.ndarray:
        return np.minimum(np.interp(delta, self.deltas, self.values, right=self.cap), self.cap)


def omega_ladder(f: GridFunction, p: float, rungs: int = 24, directions: int = 8, seed: int = 0) -> OmegaLadder:
    """Modulus of continuity of f on a geometric ladder of radii."""
    h_min = min(f.grid.spacing)
    deltas = np.concatenate([[0.0], np.geomspace(h_min, 0.9 * min(f.grid.half_extent), rungs)])
    values = modulus_curve(f, p, deltas, directions=directions, seed=seed)
    cap = 2.0 * lp_norm(f, p)
    return OmegaLadder(deltas, np.minimum(values, cap), cap)


@dataclass
class OmegaBound:
    """Value of the modulus-weighted kernel integral."""

    value: float
    truncated: bool
    u_cut: float
    tail_part: float = field(default=0.0)


def omega_bound_term(
    f: GridFunction,
    spec: KernelSpec,
    p: float,
    ladder: Optional[OmegaLadder] = None,
    u_cut: float = 200.0,
) -> OmegaBound:
    """
    Convergence bound term, integral of omega_p[f](|v|/R) |K(v)| dv.

    The modulus is interpolated on a ladder of radii and capped at
    2||f||_p beyond it. For alpha <= (n-1)/2 the kernel is not absolutely
    integrable: the integral is cut at ``u_cut`` and flagged truncated.

    Args:
        f: Function whose modulus of continuity enters
        spec: Kernel parameters; R sets the argument scaling
        p: Lebesgue exponent
        ladder: Precomputed modulus ladder (computed from f when omitted)
        u_cut: Radial cutoff of the quadrature

    Returns:
        OmegaBound with the value and the truncation flag
    """
    ladder = ladder if ladder is not None else omega_ladder(f, p)
    unit = spec.with_radius(1.0)
    lam, dim, beta = unit.lambda_, unit.dim, unit.decay
    sigma = sphere_area(dim)

    def integrand(u: np.ndarray) -> np.ndarray:
        return ladder(u / spec.R) * np.abs(kernel_radial(unit, u)) * u ** (dim - 1)

    edges = np.unique(np.concatenate([[0.0], bessel_zeros(lam, u_cut), [u_cut]]))
    value, _, _ = _integrate_panels(integrand, edges, rtol=1e-8)
    value *= sigma

    truncated = spec.alpha <= unit.alpha0
    tail = 0.0
    if not truncated:
        envelope = max(kernel_envelope(unit, 0.5 * u_cut, u_cut), unit.norm_const * math.sqrt(2.0 / math.pi))
        tail = sigma * ladder.cap * envelope * (2.0 / math.pi) * u_cut ** (dim - beta) / (beta - dim)
        value += tail
    return OmegaBound(value, truncated, u_cut, tail)


@dataclass
class KeyEstimate:
    """Both sides of ||B f||_r <= ||K^R||_q ||f||_p with q = q(p, r)."""

    p: float
    r: float
    q: float
    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs * (1.0 + 1e-6)


def key_estimate(
    f: GridFunction,
    spec: KernelSpec,
    p: float,
    r: float,
    pad_factor: int = 1,
    kernel_norm: Optional[float] = None,
) -> KeyEstimate:
    """
    Evaluate the Young-type kernel estimate for one function.

    ``kernel_norm`` reuses a precomputed ||K^R||_q.
    """
    from .gls import q_of
    from .spectral import bochner_riesz_spectral

    q = q_of(p, r)
    if kernel_norm is None:
        kernel_norm = kernel_lq_norm(spec, q).value
    lhs = lp_norm(bochner_riesz_spectral(f, spec.alpha, spec.R, pad_factor=pad_factor), r)
    rhs = kernel_norm * lp_norm(f, p)
    return KeyEstimate(p, r, q, lhs, rhs)
