"""
Grand Lebesgue Space machinery and the exponent bookkeeping of the
Lp -> Lr bounds for Bochner-Riesz means.

Exponents follow the Young relation 1 + 1/r = 1/p + 1/q. For an operator of
order alpha in dimension n the kernel has finite Lq norm exactly when
q > q0 = n / ((n+1)/2 + alpha), which yields the derived thresholds

    r0(p) = p q0 / (p + q0 - p q0)        smallest admissible r for p
    p0    = q0 / (q0 - 1)                 largest admissible p (q0 > 1 only)
    s(r)  = min(b, r q0 / (r q0 + q0 - r))  largest admissible p for r
    d     = r0(b)                         smallest r for a support (a, b)

A nonpositive denominator in any of these means the bound is infinite.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Sequence, Tuple, Union

import numpy as np

from .exceptions import AdmissibilityError, DomainError, EmptyIntervalError, ScalingRelationError
from .field import GridFunction, lp_norm
from .kernel import kernel_lq_norm
from .models import GeneratingFunction, KernelSpec

logger = logging.getLogger(__name__)

PHI_RATIO = 2.0 / (1.0 + math.sqrt(5.0))

# Open intervals are sampled at this distance from their ends.
ENDPOINT_CLAMP = 1e-6

ArrayLike = Union[float, np.ndarray]


def q0_of(alpha: float, n: int) -> float:
    return n / ((n + 1) / 2.0 + alpha)


def q_of(p: float, r: float) -> float:
    """Kernel exponent q(p, r) = p r / (p r + p - r) from the Young relation."""
    if math.isinf(r):
        return p / (p - 1.0) if p > 1 else math.inf
    den = p * r + p - r
    return p * r / den if den > 0 else math.inf


def r0_of(p: float, q0: float) -> float:
    if math.isinf(p):
        return q0 / (1.0 - q0) if q0 < 1 else math.inf
    den = p + q0 - p * q0
    return p * q0 / den if den > 0 else math.inf


def p0_of(q0: float) -> float:
    """Dual exponent of q0; infinite when q0 <= 1 (no upper constraint on p)."""
    return q0 / (q0 - 1.0) if q0 > 1 else math.inf


def s_of(b: float, r: float, q0: float) -> float:
    den = r * q0 + q0 - r
    return min(b, r * q0 / den) if den > 0 else b


def d_of(b: float, q0: float) -> float:
    return r0_of(b, q0)


@dataclass
class BoundParams:
    """Exponent bundle of the Lp -> Lr bound."""

    p: float
    r: float
    alpha: float
    n: int
    b: float = math.inf
    q: float = field(init=False)
    q0: float = field(init=False)
    r0: float = field(init=False)
    p0: float = field(init=False)
    s: float = field(init=False)
    d: float = field(init=False)

    def __post_init__(self) -> None:
        if not (self.p >= 1 and self.r >= 1):
            raise DomainError(f"exponents must be at least 1, got p={self.p}, r={self.r}")
        self.q0 = q0_of(self.alpha, self.n)
        self.q = q_of(self.p, self.r)
        self.r0 = r0_of(self.p, self.q0)
        self.p0 = p0_of(self.q0)
        self.s = s_of(self.b, self.r, self.q0)
        self.d = d_of(self.b, self.q0)

    def violations(self) -> List[str]:
        """Broken admissibility constraints, in checking order."""
        out = []
        if self.r <= self.p:
            out.append(f"r <= p (r={self.r}, p={self.p})")
        if not self.q > self.q0 * (1.0 + 1e-12):
            out.append(f"q <= q0 (q={self.q:.6g}, q0={self.q0:.6g})")
        if self.q0 > 1 and self.p > self.p0:
            out.append(f"p > p0 (p={self.p}, p0={self.p0:.6g})")
        if self.r <= self.r0:
            out.append(f"r <= r0 (r={self.r}, r0={self.r0:.6g})")
        return out

    @property
    def admissible(self) -> bool:
        return not self.violations()


def w_coeff(alpha: float, n: int, R: float, p: float, r: float) -> float:
    """
    Bound coefficient W = R^(n(1/p - 1/r)) (q - q0)^(1/p - 1 - 1/r).

    Raises:
        AdmissibilityError: Naming the first violated constraint
    """
    if not R > 0:
        raise DomainError(f"R must be positive, got {R}")
    params = BoundParams(p=p, r=r, alpha=alpha, n=n)
    violations = params.violations()
    if violations:
        raise AdmissibilityError(f"inadmissible exponents: {violations[0]}")
    inv_r = 0.0 if math.isinf(r) else 1.0 / r
    return R ** (n * (1.0 / p - inv_r)) * (params.q - params.q0) ** (1.0 / p - 1.0 - inv_r)


def psi_eval(gf: GeneratingFunction, p: ArrayLike) -> ArrayLike:
    """
    Generating function value, +inf outside the support (a, b).

    Args:
        gf: Generating function
        p: Exponent(s)

    Returns:
        psi(p), a float for scalar input
    """
    p_arr = np.asarray(p, dtype=float)
    out = np.full(p_arr.shape, np.inf)
    if gf.kind == "single_point":
        hit = np.isclose(p_arr, gf.point, rtol=1e-12, atol=0.0)
        out[hit] = 1.0
    else:
        inside = (p_arr > gf.a) & (p_arr < gf.b)
        x = p_arr[inside]
        if gf.kind == "power":
            out[inside] = x ** (1.0 / gf.m)
        elif gf.kind == "iwaniec_sbordone":
            right = (gf.b - x) ** (-gf.beta_exp) if gf.beta_exp > 0 else 1.0
            out[inside] = (x - gf.a) ** (-gf.alpha_exp) * right
        else:
            table = np.asarray(gf.p_values)
            within = (x >= table[0]) & (x <= table[-1])
            vals = np.full(x.shape, np.inf)
            vals[within] = np.interp(x[within], table, gf.psi_values)
            out[inside] = vals
    out = gf.scale * out
    return float(out) if np.ndim(p) == 0 else out


@dataclass
class NormReport:
    """Grand Lebesgue norm with the sampled exponent trace."""

    value: float
    p_grid: np.ndarray
    ratios: np.ndarray
    argmax: float
    stabilized: bool


def gls_p_grid(gf: GeneratingFunction, p_samples: int = 64, p_max: float = 64.0) -> np.ndarray:
    """Exponents sampled for a sup over the support of psi."""
    if gf.kind == "single_point":
        return np.array([float(gf.point)])
    lo, hi = gf.a, gf.b
    if gf.kind == "tabulated":
        lo, hi = max(lo, gf.p_values[0]), min(hi, gf.p_values[-1])
    lo += ENDPOINT_CLAMP
    if math.isinf(hi):
        return np.geomspace(lo, max(p_max, 2.0 * lo), p_samples)
    return np.linspace(lo, hi - ENDPOINT_CLAMP, p_samples)


def gls_norm_from_table(p_grid: np.ndarray, norms: np.ndarray, psi: Callable[[np.ndarray], np.ndarray]) -> NormReport:
    """Sup of norms / psi over a sampled exponent grid."""
    p_grid = np.asarray(p_grid, dtype=float)
    weights = np.asarray(psi(p_grid), dtype=float)
    ratios = np.where(np.isfinite(weights), np.asarray(norms) / weights, 0.0)
    i = int(np.argmax(ratios))
    stabilized = len(p_grid) == 1 or i < int(0.75 * len(p_grid))
    return NormReport(float(ratios[i]), p_grid, ratios, float(p_grid[i]), stabilized)


def gls_norm(f: GridFunction, gf: GeneratingFunction, p_samples: int = 64, p_max: float = 64.0) -> NormReport:
    """
    Grand Lebesgue norm sup_p ||f||_p / psi(p), sampled.

    Unbounded supports are sampled on a log-spaced grid capped at p_max; the
    report flags whether the running sup settled before the last quarter of
    the grid. The value is a lower bound of the true norm.
    """
    if p_samples < 16:
        raise DomainError(f"p_samples must be at least 16, got {p_samples}")
    p_grid = gls_p_grid(gf, p_samples, p_max)
    norms = np.array([lp_norm(f, p) for p in p_grid])
    report = gls_norm_from_table(p_grid, norms, lambda p: psi_eval(gf, p))
    if math.isinf(gf.b) and gf.kind != "single_point" and not report.stabilized:
        logger.warning(f"G_psi sup for {gf.kind} psi did not stabilize below p_max={p_max}")
    return report


@dataclass
class GoldenResult:
    argmin: float
    minimum: float
    iterations: int
    converged: bool


def golden_section(
    f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-8, max_iterations: int = 200
) -> GoldenResult:
    """Golden-section minimization on [lo, hi] to relative tolerance ``tol`` in x."""
    x1 = hi - PHI_RATIO * (hi - lo)
    x2 = lo + PHI_RATIO * (hi - lo)
    f1, f2 = f(x1), f(x2)
    iteration = 0
    while iteration < max_iterations and abs(hi - lo) > tol * max(abs(lo), abs(hi), 1.0):
        if f2 > f1:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - PHI_RATIO * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + PHI_RATIO * (hi - lo)
            f2 = f(x2)
        iteration += 1
    argmin, minimum = (x1, f1) if f1 <= f2 else (x2, f2)
    return GoldenResult(argmin, minimum, iteration, iteration < max_iterations)


def nu_interval(
    gf: GeneratingFunction, alpha: float, n: int, r: float, p_max: float = 64.0
) -> Tuple[float, float, float]:
    """
    Clamped exponent range searched by ``nu_of``.

    Raises:
        DomainError: If r <= d
        EmptyIntervalError: If (a, s) is empty
    """
    q0 = q0_of(alpha, n)
    d = d_of(gf.support_sup, q0)
    if not r > d:
        raise DomainError(f"r={r} must exceed d={d:.6g}")
    a, b = (1.0, math.inf) if gf.kind == "single_point" else (gf.a, gf.b)
    s = s_of(b, r, q0)
    if not s > a:
        raise EmptyIntervalError(f"(a, s) = ({a}, {s:.6g}) is empty for r={r}")
    hi = min(s, r, p0_of(q0), p_max)
    return a + ENDPOINT_CLAMP, hi - ENDPOINT_CLAMP, s


def nu_objective(gf: GeneratingFunction, alpha: float, n: int, R: float, r: float) -> Callable[[float], float]:
    """p -> W(alpha, n, R; p, r) psi(p), +inf where inadmissible."""

    def objective(p: float) -> float:
        weight = psi_eval(gf, p)
        if math.isinf(weight):
            return math.inf
        try:
            return w_coeff(alpha, n, R, p, r) * weight
        except AdmissibilityError:
            return math.inf

    return objective


def nu_of(
    gf: GeneratingFunction,
    alpha: float,
    n: int,
    R: float,
    r: float,
    brackets: int = 200,
    tol: float = 1e-8,
    p_max: float = 64.0,
) -> float:
    """
    Transferred generating function nu(r) = inf over p in (a, s) of W psi(p).

    The range is scanned on ``brackets`` log-spaced exponents, then the
    winning bracket is refined by golden-section search.

    Args:
        gf: Generating function psi
        alpha: Bochner-Riesz order
        n: Dimension
        R: Multiplier radius
        r: Target exponent, r > d
        brackets: Number of scan points
        tol: Relative tolerance in p
        p_max: Cap of the range for unbounded supports

    Returns:
        nu(r), +inf when no exponent is admissible
    """
    lo, hi, s = nu_interval(gf, alpha, n, r, p_max=p_max)
    objective = nu_objective(gf, alpha, n, R, r)
    if gf.kind == "single_point":
        p_star = float(gf.point)
        return objective(p_star) if 1.0 < p_star < s else math.inf
    if not hi > lo:
        return math.inf

    grid = np.geomspace(lo, hi, brackets)
    values = np.array([objective(p) for p in grid])
    if not np.any(np.isfinite(values)):
        logger.warning(f"nu({r}) is infinite: no admissible exponent in ({lo:.6g}, {hi:.6g})")
        return math.inf
    i = int(np.argmin(values))
    left, right = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    refined = golden_section(objective, left, right, tol=tol)
    logger.debug(f"nu({r}): bracket [{left:.6g}, {right:.6g}], argmin {refined.argmin:.8g}")
    return float(min(refined.minimum, values[i]))


def beckner_constant(m: float) -> float:
    """Sharp Young constant C_m = (m^(1/m) / m'^(1/m'))^(1/2), with C_1 = C_inf = 1."""
    if not m >= 1:
        raise DomainError(f"beckner_constant requires m >= 1, got {m}")
    if m == 1 or math.isinf(m):
        return 1.0
    dual = m / (m - 1.0)
    return math.sqrt(m ** (1.0 / m) / dual ** (1.0 / dual))


def young_bound(p: float, q: float, r: float, n: int) -> float:
    """
    Sharp Young constant (C_p C_q / C_r)^n.

    Raises:
        ScalingRelationError: If 1 + 1/r differs from 1/p + 1/q by more than 1e-12
    """
    if not (p >= 1 and q >= 1 and r >= 1):
        raise DomainError(f"exponents must be at least 1, got {p}, {q}, {r}")
    inv = lambda x: 0.0 if math.isinf(x) else 1.0 / x  # noqa: E731
    gap = 1.0 + inv(r) - inv(p) - inv(q)
    if abs(gap) > 1e-12:
        raise ScalingRelationError(f"1 + 1/r = 1/p + 1/q fails by {gap:.3g} for (p, q, r) = ({p}, {q}, {r})")
    return (beckner_constant(p) * beckner_constant(q) / beckner_constant(r)) ** n


def theta(n: int, p: float) -> float:
    """Gaussian lower bound (2 pi)^(n(1-p)/(2p)) p^(-n/(2p))."""
    if n < 1 or not p >= 1:
        raise DomainError(f"theta requires n >= 1 and p >= 1, got n={n}, p={p}")
    return (2.0 * math.pi) ** (n * (1.0 - p) / (2.0 * p)) * p ** (-n / (2.0 * p))


@dataclass
class LowerBoundReport:
    """Result of the W maximization over an (alpha, R) grid."""

    max_w: float
    alpha: float
    R: float
    theta_reference: float
    exceeds_theta: bool
    on_r_boundary: bool
    admissible: int
    total: int


def qn_lower_search(
    n: int, p: float, r: float, alpha_grid: Sequence[float], R_grid: Sequence[float]
) -> LowerBoundReport:
    """
    Maximize W(alpha, n, R; p, r) over a grid of (alpha, R).

    Ties go to the lexicographically smallest (alpha, R). The report compares
    the maximum with theta(n, q(p, r)) and flags a maximum on the largest R,
    which is evidence that the supremum is infinite.

    Raises:
        AdmissibilityError: If no grid cell is admissible
    """
    alphas = np.unique(np.asarray(alpha_grid, dtype=float))
    radii = np.unique(np.asarray(R_grid, dtype=float))
    if alphas.size == 0 or radii.size == 0:
        raise DomainError("alpha_grid and R_grid must be nonempty")
    q = q_of(p, r)
    q0 = n / ((n + 1) / 2.0 + alphas)
    p0 = np.where(q0 > 1, q0 / np.where(q0 > 1, q0 - 1.0, 1.0), np.inf)
    ok_alpha = (r > p) & (q > q0 * (1.0 + 1e-12)) & (p <= p0)
    inv_r = 0.0 if math.isinf(r) else 1.0 / r

    A, Rg = np.meshgrid(alphas, radii, indexing="ij")
    ok = np.broadcast_to(ok_alpha[:, None], A.shape)
    gap = np.where(ok, q - q0[:, None], 1.0)
    w = np.where(ok, Rg ** (n * (1.0 / p - inv_r)) * gap ** (1.0 / p - 1.0 - inv_r), -np.inf)
    admissible = int(np.count_nonzero(ok))
    if admissible == 0:
        raise AdmissibilityError(f"no admissible (alpha, R) cell for n={n}, p={p}, r={r}")

    flat = int(np.argmax(w))
    i, j = np.unravel_index(flat, w.shape)
    reference = theta(n, q)
    max_w = float(w[i, j])
    logger.info(f"Q_{n}({p}, {r}) search: max W {max_w:.6g} at alpha={alphas[i]:.6g}, R={radii[j]:.6g}")
    return LowerBoundReport(
        max_w=max_w,
        alpha=float(alphas[i]),
        R=float(radii[j]),
        theta_reference=reference,
        exceeds_theta=max_w >= reference,
        on_r_boundary=bool(j == radii.size - 1),
        admissible=admissible,
        total=int(w.size),
    )


def gaussian_equality_pair(p: float, q: float, n: int, c: float = 0.5) -> Dict[str, float]:
    """
    Rates of the Gaussians exp(-a|x|^2), exp(-b|x|^2) attaining equality in
    the sharp Young inequality: a = c p', b = c q'.
    """
    dual = lambda m: m / (m - 1.0)  # noqa: E731
    if not (p > 1 and q > 1):
        raise DomainError(f"Gaussian extremals need p, q > 1, got {p}, {q}")
    return {"a": c * dual(p), "b": c * dual(q)}


def empirical_lr_ratio(
    fs: Sequence[GridFunction], alpha: float, R: float, p: float, r: float, pad_factor: int = 1
) -> float:
    """Max over functions of ||B_R^alpha f||_r / (W ||f||_p)."""
    from .spectral import bochner_riesz_spectral

    if not fs:
        raise DomainError("empirical_lr_ratio needs at least one function")
    n = fs[0].grid.dim
    w = w_coeff(alpha, n, R, p, r)
    ratios = [lp_norm(bochner_riesz_spectral(f, alpha, R, pad_factor=pad_factor), r) / (w * lp_norm(f, p)) for f in fs]
    return float(max(ratios))


def normalized_blowup_product(spec: KernelSpec, q: float) -> float:
    """(||K||_q / ||K||_inf)^q (q - q0), bounded as q decreases to q0."""
    peak = kernel_lq_norm(spec, math.inf).value
    return (kernel_lq_norm(spec, q).value / peak) ** q * (q - spec.q0)
