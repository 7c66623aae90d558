"""
Special functions for briesz: Gamma and Bessel functions of the first kind.

Bessel functions of real order nu >= 0 are evaluated with the ascending power
series below ``crossover_x`` and with the Hankel large-argument expansion
above it. The alternating series is accumulated in ``numpy.longdouble`` so
that its cancellation near the crossover stays below the working tolerance on
platforms with an extended long double.
"""

import logging
import math
from typing import Optional, Union

import numpy as np

from .exceptions import DomainError
from .models import SpecFunConfig

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# Lanczos approximation, g = 7, nine coefficients.
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)

_MAX_SERIES_TERMS = 500
_MAX_ASYMPTOTIC_TERMS = 200


def _to_output(result: np.ndarray, original: ArrayLike) -> ArrayLike:
    """Return a Python float for scalar input, an array otherwise."""
    if np.ndim(original) == 0:
        return float(result)
    return np.asarray(result, dtype=float)


class SpecialFunctions:
    """Gamma and Bessel J evaluations driven by a :class:`SpecFunConfig`."""

    def __init__(self, config: Optional[SpecFunConfig] = None):
        """
        Initialize the evaluator.

        Args:
            config: Series tolerance and series/asymptotic crossover
        """
        self.config = config or SpecFunConfig()

    def gamma(self, x: ArrayLike) -> ArrayLike:
        """
        Gamma function for positive real arguments.

        Args:
            x: Argument(s), all strictly positive

        Returns:
            Gamma(x), a float for scalar input
        """
        arr = np.asarray(x, dtype=float)
        if not np.all(arr > 0):
            raise DomainError(f"gamma requires x > 0, got {x}")

        # Gamma(x) = Gamma(x + 1) / x below 1/2
        small = arr < 0.5
        z = np.where(small, arr + 1.0, arr) - 1.0
        series = np.full_like(z, _LANCZOS_COEFFS[0])
        for k, coeff in enumerate(_LANCZOS_COEFFS[1:], start=1):
            series = series + coeff / (z + k)
        t = z + _LANCZOS_G + 0.5
        # split the power so that t**(z + 1/2) does not overflow before exp(-t)
        half = t ** ((z + 0.5) / 2.0)
        result = _SQRT_2PI * half * (half * np.exp(-t)) * series
        result = np.where(small, result / arr, result)
        return _to_output(result, x)

    def bessel_j(self, order: float, x: ArrayLike) -> ArrayLike:
        """
        Bessel function of the first kind J_order(x).

        Args:
            order: Real order, nonnegative
            x: Argument(s), nonnegative

        Returns:
            J_order(x), a float for scalar input
        """
        arr = self._check_domain(order, x)
        result = np.empty_like(arr)
        below = arr < self.config.crossover_x
        if np.any(below):
            xs = arr[below]
            result[below] = self._series_ratio(order, xs) * xs**order
        if np.any(~below):
            result[~below] = self._asymptotic_j(order, arr[~below])
        return _to_output(result, x)

    def bessel_ratio(self, order: float, x: ArrayLike) -> ArrayLike:
        """
        Radial profile J_order(x) / x**order, continuous at x = 0.

        Args:
            order: Real order, nonnegative
            x: Argument(s), nonnegative

        Returns:
            The ratio; 1 / (2**order * Gamma(order + 1)) at the origin
        """
        arr = self._check_domain(order, x)
        result = np.empty_like(arr)
        below = arr < self.config.crossover_x
        if np.any(below):
            result[below] = self._series_ratio(order, arr[below])
        if np.any(~below):
            xs = arr[~below]
            result[~below] = self._asymptotic_j(order, xs) / xs**order
        return _to_output(result, x)

    def bessel_zeros(self, order: float, upper: float, step: float = 0.25) -> np.ndarray:
        """
        Positive zeros of J_order up to ``upper``.

        Sign changes are located on a lattice of width ``step`` and refined
        by simultaneous bisection of all brackets.

        Args:
            order: Real order, nonnegative
            upper: Largest argument searched
            step: Scan spacing; must stay below the zero separation

        Returns:
            Sorted array of zeros in (0, upper]
        """
        if upper <= 0:
            return np.empty(0)
        grid = np.arange(step, upper + step, step)
        values = np.asarray(self.bessel_j(order, grid))
        change = np.nonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)[0]
        lo = grid[change]
        hi = grid[change + 1]
        f_lo = values[change]
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            f_mid = np.asarray(self.bessel_j(order, mid))
            left = np.sign(f_mid) == np.sign(f_lo)
            lo = np.where(left, mid, lo)
            f_lo = np.where(left, f_mid, f_lo)
            hi = np.where(left, hi, mid)
        zeros = 0.5 * (lo + hi)
        logger.debug(f"Located {zeros.size} zeros of J_{order} below {upper}")
        return zeros[zeros <= upper]

    def _check_domain(self, order: float, x: ArrayLike) -> np.ndarray:
        if not order >= 0:
            raise DomainError(f"Bessel order must be nonnegative, got {order}")
        arr = np.atleast_1d(np.asarray(x, dtype=float)).copy()
        if not np.all(arr >= 0):
            raise DomainError(f"Bessel argument must be nonnegative, got {x}")
        return arr

    def _series_ratio(self, order: float, x: np.ndarray) -> np.ndarray:
        """J_order(x) / x**order from the ascending series."""
        xl = np.asarray(x, dtype=np.longdouble)
        step = -(xl * xl) / 4
        term = np.ones_like(xl)
        total = np.ones_like(xl)
        peak = np.ones_like(xl)
        floor = np.finfo(np.longdouble).eps
        nu = np.longdouble(order)
        for k in range(1, _MAX_SERIES_TERMS + 1):
            term = term * step / (k * (k + nu))
            total = total + term
            magnitude = np.abs(term)
            peak = np.maximum(peak, magnitude)
            converged = (magnitude <= self.config.series_tol * np.abs(total)) | (
                magnitude <= 1e-3 * floor * peak
            )
            if np.all(converged):
                break
        else:
            logger.warning(f"Bessel series for order {order} hit {_MAX_SERIES_TERMS} terms")
        prefactor = 2.0**order * self.gamma(order + 1.0)
        return np.asarray(total, dtype=float) / prefactor

    def _asymptotic_j(self, order: float, x: np.ndarray) -> np.ndarray:
        """Hankel expansion, summed while the terms keep shrinking."""
        mu = 4.0 * order * order
        p_sum = np.ones_like(x)
        q_sum = np.zeros_like(x)
        term = np.ones_like(x)
        previous = np.full_like(x, np.inf)
        active = np.ones(x.shape, dtype=bool)
        for k in range(1, _MAX_ASYMPTOTIC_TERMS + 1):
            factor = mu - (2 * k - 1) ** 2
            term = term * factor / (8.0 * k * x)
            magnitude = np.abs(term)
            if (2 * k - 1) ** 2 > mu:
                # past the initial growth; the expansion diverges from here on
                active &= magnitude < previous
            contribution = np.where(active, term, 0.0)
            sign = -1.0 if (k // 2) % 2 else 1.0
            if k % 2:
                q_sum += sign * contribution
            else:
                p_sum += sign * contribution
            previous = np.where(active, magnitude, previous)
            active &= magnitude > 1e-17 * np.abs(p_sum)
            if not np.any(active):
                break
        chi = x - (0.5 * order + 0.25) * math.pi
        return np.sqrt(2.0 / (math.pi * x)) * (p_sum * np.cos(chi) - q_sum * np.sin(chi))


_DEFAULT_FUNCTIONS = SpecialFunctions()


def gamma(x: ArrayLike) -> ArrayLike:
    """Gamma function with the default configuration."""
    return _DEFAULT_FUNCTIONS.gamma(x)


def bessel_j(order: float, x: ArrayLike) -> ArrayLike:
    """Bessel function J_order(x) with the default configuration."""
    return _DEFAULT_FUNCTIONS.bessel_j(order, x)


def bessel_ratio(order: float, x: ArrayLike) -> ArrayLike:
    """J_order(x) / x**order with the default configuration."""
    return _DEFAULT_FUNCTIONS.bessel_ratio(order, x)


def bessel_zeros(order: float, upper: float) -> np.ndarray:
    """Positive zeros of J_order below ``upper`` with the default configuration."""
    return _DEFAULT_FUNCTIONS.bessel_zeros(order, upper)
