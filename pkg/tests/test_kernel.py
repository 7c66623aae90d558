"""
Tests for the Bochner-Riesz kernel, its Lq norms and the direct operator.
"""

import math

import numpy as np
import pytest

from briesz.exceptions import DomainError, GridMismatchError, NumericalGuardError
from briesz.field import GridFunction, lp_norm, sample
from briesz.gls import normalized_blowup_product
from briesz.kernel import (
    bochner_riesz_direct,
    kernel_envelope,
    kernel_eval,
    kernel_lq_norm,
    kernel_radial,
    kernel_sample,
    key_estimate,
    omega_bound_term,
    omega_ladder,
    sphere_area,
)
from briesz.models import Grid, KernelSpec, TestFunctionSpec
from briesz.spectral import Symbol, bochner_riesz_spectral, dual_grid, inverse_ft, radial_inverse_ft


def test_sphere_area():
    """Test the unit sphere measure."""
    assert sphere_area(1) == pytest.approx(2.0)
    assert sphere_area(2) == pytest.approx(2 * math.pi)
    assert sphere_area(3) == pytest.approx(4 * math.pi)


def test_kernel_origin_value():
    """Test K(0) = 1/(8 pi) for n = 2, alpha = 1, R = 1."""
    spec = KernelSpec(alpha=1.0, dim=2)
    assert kernel_eval(spec, [0.0, 0.0]) == pytest.approx(1 / (8 * math.pi), rel=1e-12)
    with pytest.raises(DomainError):
        kernel_eval(spec, [0.0])


def test_kernel_scaling_identity():
    """Test K^R(z) = R^n K^1(R z)."""
    unit = KernelSpec(alpha=0.5, dim=2)
    r = np.linspace(0.0, 10.0, 101)
    for R in [0.5, 2.0, 7.0]:
        np.testing.assert_allclose(
            kernel_radial(unit.with_radius(R), r), R**2 * kernel_radial(unit, R * r), rtol=1e-12, atol=1e-300
        )


def test_kernel_radial_symmetry():
    """Test that the kernel depends only on |z|."""
    spec = KernelSpec(alpha=1.5, dim=2, R=2.0)
    assert kernel_eval(spec, [3.0, 4.0]) == pytest.approx(kernel_eval(spec, [5.0, 0.0]), rel=1e-12)
    assert kernel_eval(spec, [-3.0, 4.0]) == pytest.approx(kernel_eval(spec, [0.0, -5.0]), rel=1e-12)

    spec = KernelSpec(alpha=0.5, dim=3)
    assert kernel_eval(spec, [1.0, 2.0, 2.0]) == pytest.approx(kernel_eval(spec, [0.0, 3.0, 0.0]), rel=1e-12)


def test_kernel_sample():
    """Test the sampled kernel at the origin and its evenness."""
    spec = KernelSpec(alpha=1.0, dim=2, R=2.0)
    grid = Grid(dim=2, half_extent=4.0, points=32)
    K = kernel_sample(spec, grid)
    assert K.at_origin() == pytest.approx(kernel_eval(spec, [0.0, 0.0]))
    interior = K.values[1:, 1:]
    np.testing.assert_allclose(interior, interior[::-1, ::-1], rtol=1e-12)
    with pytest.raises(GridMismatchError):
        kernel_sample(spec, Grid(dim=1, half_extent=4.0, points=32))


def test_kernel_integral_is_one():
    """Test that the absolutely integrable kernel has unit integral."""
    spec = KernelSpec(alpha=2.0, dim=1)
    K = kernel_sample(spec, Grid(dim=1, half_extent=100.0, points=4096))
    assert K.integral().real == pytest.approx(1.0, abs=1e-2)


@pytest.mark.parametrize("dim", [1, 2])
@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.5])
@pytest.mark.parametrize("R", [1.0, 4.0])
def test_kernel_matches_inverse_transform_of_symbol(dim, alpha, R):
    """Test the closed-form kernel against the radial inverse transform of its symbol."""
    spec = KernelSpec(alpha=alpha, dim=dim, R=R)
    radii = np.linspace(0.0, 8.0, 17)
    closed = kernel_radial(spec, radii)
    numeric = radial_inverse_ft(Symbol.bochner_riesz(alpha, R), radii, dim)
    peak = abs(closed[0])
    assert np.max(np.abs(closed - numeric)) <= 1e-3 * peak


@pytest.mark.parametrize(
    "grid, R",
    [
        (Grid(dim=1, half_extent=32.0, points=1024), 4.0),
        (Grid(dim=2, half_extent=16.0, points=256), 4.0),
    ],
)
def test_kernel_sample_matches_lattice_inverse_transform(grid, R):
    """Test kernel_sample against inverse_ft of the sampled symbol away from the periodic images."""
    spec = KernelSpec(alpha=1.5, dim=grid.dim, R=R)
    symbol = Symbol.bochner_riesz(1.5, R)
    dual = dual_grid(grid)
    lattice = inverse_ft(GridFunction(dual, symbol(dual.radii())), grid)
    closed = kernel_sample(spec, grid)
    assert np.max(np.abs(lattice.values.imag)) <= 1e-10 * abs(closed.at_origin())

    interior = grid.radii() <= grid.half_extent[0] / 2
    diff = lattice.values.real[interior] - closed.values.real[interior]
    assert np.max(np.abs(diff)) <= 1e-3 * abs(closed.at_origin())


def test_lq_norm_scaling_law():
    """Test ||K^R||_q = R^(n - n/q) ||K^1||_q."""
    unit = KernelSpec(alpha=0.5, dim=2)
    base = kernel_lq_norm(unit, 2.0).value
    for R in [2.0, 4.0]:
        value = kernel_lq_norm(unit.with_radius(R), 2.0).value
        assert abs(math.log(value) - (2 - 2 / 2.0) * math.log(R) - math.log(base)) <= 1e-3


def test_lq_norm_blowup_band():
    """Test that the normalized products stay within a factor of ten near q0."""
    spec = KernelSpec(alpha=0.5, dim=2)
    products = [normalized_blowup_product(spec, q) for q in [1.2, 1.5, 2.0, 3.0]]
    assert all(np.isfinite(products))
    assert max(products) / min(products) <= 10.0


def test_lq_norm_large_q_approaches_peak():
    """Test that ||K||_q tends to the peak value."""
    spec = KernelSpec(alpha=0.5, dim=2)
    peak = abs(kernel_eval(spec, [0.0, 0.0]))
    assert kernel_lq_norm(spec, 50.0).value == pytest.approx(peak, rel=0.05)
    assert kernel_lq_norm(spec, math.inf).value == pytest.approx(peak)


def test_lq_norm_breakdown_and_error():
    """Test the quadrature breakdown and the error estimate."""
    spec = KernelSpec(alpha=0.5, dim=2)
    coarse = kernel_lq_norm(spec, 2.0)
    fine = kernel_lq_norm(spec, 2.0, u_cut=2 * coarse.u_cut, order=32)
    assert coarse.panel_part > 0
    assert 0 < coarse.tail_part < coarse.panel_part
    assert coarse.panels > 0
    assert abs(coarse.value - fine.value) <= coarse.error + fine.error

    # ||K||_2 by Plancherel: (2 pi)^(-n/2) ||m||_2 with ||m||_2^2 = pi / (2 alpha + 1) for n = 2
    plancherel = math.sqrt(math.pi / 2.0) / (2 * math.pi)
    assert fine.value == pytest.approx(plancherel, rel=1e-2)


def test_lq_norm_rejects_q_at_or_below_q0():
    """Test DomainError for q <= q0."""
    spec = KernelSpec(alpha=0.5, dim=2)
    with pytest.raises(DomainError):
        kernel_lq_norm(spec, 1.0)
    with pytest.raises(DomainError):
        kernel_lq_norm(spec, 0.9)


def test_kernel_envelope_bounded():
    """Test the decay law constant across ranges."""
    spec = KernelSpec(alpha=0.5, dim=2)
    near = kernel_envelope(spec, 5.0, 500.0)
    far = kernel_envelope(spec, 500.0, 5000.0)
    assert np.isfinite(near) and np.isfinite(far)
    assert far == pytest.approx(near, rel=0.05)
    with pytest.raises(DomainError):
        kernel_envelope(spec, 10.0, 5.0)


def test_direct_matches_spectral():
    """Test the quadrature convolution against the spectral multiplier."""
    grid = Grid(dim=1, half_extent=32.0, points=2048)
    f = sample(TestFunctionSpec(kind="smooth_bump", radius=1.0), grid)
    spec = KernelSpec(alpha=1.5, dim=1, R=4.0)
    direct = bochner_riesz_direct(f, spec)
    spectral = bochner_riesz_spectral(f, 1.5, 4.0, pad_factor=16)

    interior = np.abs(grid.axes()[0]) <= 16.0
    diff = direct.values[interior] - spectral.values[interior]
    assert np.linalg.norm(diff) <= 1e-6 * np.linalg.norm(spectral.values[interior])


def test_direct_properties():
    """Test linearity and mass preservation of the direct operator."""
    grid = Grid(dim=1, half_extent=32.0, points=2048)
    spec = KernelSpec(alpha=2.0, dim=1, R=4.0)
    f = sample(TestFunctionSpec(kind="smooth_bump", radius=1.0), grid)
    g = sample(TestFunctionSpec(kind="gaussian"), grid)

    out = bochner_riesz_direct(f, spec)
    assert out.integral().real == pytest.approx(f.integral().real, abs=1e-3)

    combined = bochner_riesz_direct(2.0 * f + g, spec)
    expected = 2.0 * out + bochner_riesz_direct(g, spec)
    assert np.max(np.abs(combined.values - expected.values)) <= 1e-12 * np.max(np.abs(expected.values))


def test_direct_guard():
    """Test refusal of grids above the node limit."""
    grid = Grid(dim=3, half_extent=4.0, points=128)
    f = GridFunction(grid, np.zeros(grid.shape))
    with pytest.raises(NumericalGuardError):
        bochner_riesz_direct(f, KernelSpec(alpha=1.0, dim=3))


def test_omega_bound_term_dominates_error():
    """Test ||B_R f - f||_p against the modulus-weighted kernel integral."""
    grid = Grid(dim=1, half_extent=8.0, points=256)
    f = sample(TestFunctionSpec(kind="smooth_bump", radius=2.0), grid)
    spec = KernelSpec(alpha=1.5, dim=1, R=4.0)
    ladder = omega_ladder(f, 2.0)
    assert ladder.deltas[0] == 0.0
    assert np.all(np.diff(ladder.values) >= -1e-12 * ladder.cap)
    assert ladder(np.array(1e6)) == ladder.cap

    bound = omega_bound_term(f, spec, 2.0, ladder=ladder)
    assert not bound.truncated
    assert bound.tail_part > 0
    error = lp_norm(bochner_riesz_spectral(f, 1.5, 4.0) - f, 2.0)
    assert error <= bound.value


def test_omega_bound_term_truncated_at_critical_order():
    """Test the truncation flag when the kernel is not integrable."""
    grid = Grid(dim=2, half_extent=4.0, points=64)
    f = sample(TestFunctionSpec(kind="smooth_bump", radius=2.0), grid)
    bound = omega_bound_term(f, KernelSpec(alpha=0.5, dim=2, R=4.0), 2.0)
    assert bound.truncated
    assert bound.tail_part == 0.0
    assert np.isfinite(bound.value)


def test_key_estimate_holds():
    """Test ||B f||_r <= ||K||_q ||f||_p."""
    grid = Grid(dim=1, half_extent=16.0, points=1024)
    f = sample(TestFunctionSpec(kind="smooth_bump", radius=2.0), grid)
    estimate = key_estimate(f, KernelSpec(alpha=1.5, dim=1, R=4.0), 2.0, 4.0)
    assert estimate.q == pytest.approx(4 / 3)
    assert estimate.holds


if __name__ == "__main__":
    pytest.main([__file__])
