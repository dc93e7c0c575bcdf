"""Tests for metric perturbation fields and the Poisson residual check."""

import math

import numpy as np
import pytest

from cavlight.fieldmap import GridSpec
from cavlight.fields import (
    MIN_LARGE_M,
    delta_c_01M_gsum,
    g_integrals,
    h_tilde,
    laplacian_residual,
    lightspeed_field,
    metric_011,
    metric_01M,
    metric_grid,
)
from cavlight.greens import QuadratureSpec

PI = math.pi
CENTER = (PI / 2, PI / 2, PI / 2)

# g-integrals at the cavity center, frozen from a tight quadrature run
# (rel_tol 1e-10, depth 24); each confirmed against the seeded 1e7-sample
# Monte-Carlo oracle within one standard error.
G_CENTER = {
    "g1": 54.5951309243,
    "g2": -11.0846553613,
    "g3": 32.8398931428,
    "g3_tilde": 32.8398931428,
    "g4": 0.0,
}
# convolution of 4 sin^2(eta'): equals g1 at the center by symmetry
H_TILDE_CENTER = 54.5951309243


def test_g_integrals_center_frozen():
    g = g_integrals(CENTER)
    assert g.converged
    assert g.g1 == pytest.approx(G_CENTER["g1"], rel=1e-5)
    assert g.g2 == pytest.approx(G_CENTER["g2"], rel=1e-4)
    assert g.g3 == pytest.approx(G_CENTER["g3"], rel=1e-5)
    assert g.g3_tilde == pytest.approx(G_CENTER["g3_tilde"], rel=1e-5)
    assert g.g4 == pytest.approx(0.0, abs=1e-6)


def test_g_trace_identity():
    # g1 = g2 + g3 + g3_tilde because the stress tensor is trace-free
    for point in [CENTER, (1.0, 0.8, 2.0), (4.5, 1.5, 1.5)]:
        g = g_integrals(point)
        assert g.g1 == pytest.approx(g.g2 + g.g3 + g.g3_tilde, abs=max(4e-6 * abs(g.g1), 4 * g.error))


def test_metric_011_center():
    m = metric_011(CENTER)
    assert m.converged
    g = G_CENTER
    assert m.h00 == pytest.approx(0.5 * (g["g1"] + g["g2"] + g["g3"] + g["g3_tilde"]), rel=1e-4)
    assert m.h11 == pytest.approx(0.5 * (g["g1"] + g["g2"] - g["g3"] - g["g3_tilde"]), rel=1e-4)
    assert m.h22 == pytest.approx(0.5 * (g["g1"] - g["g2"] + g["g3"] - g["g3_tilde"]), rel=1e-4)
    assert m.h33 == pytest.approx(m.h22, rel=1e-12)  # eta/zeta symmetry at the center
    assert m.h23 == pytest.approx(0.0, abs=1e-6)
    assert abs(m.trace) < 2e-6 * abs(m.h00) + 4 * m.error


def test_h_tilde_center_equals_g1():
    # 4 sin^2(eta') and f1 differ by cos(2 zeta'), which integrates to the
    # same value at the symmetric center point
    r = h_tilde(CENTER)
    assert r.value == pytest.approx(H_TILDE_CENTER, rel=1e-4)


def test_metric_01M_structure():
    m = metric_01M(CENTER, 100)
    r = h_tilde(CENTER)
    assert m.h00 == pytest.approx(100 * r.value, rel=1e-12)
    assert m.h33 == m.h00
    assert m.h11 == 0.0 and m.h22 == 0.0 and m.h23 == 0.0
    with pytest.raises(ValueError):
        metric_01M(CENTER, MIN_LARGE_M - 1)


def test_metric_01M_linear_in_m():
    a = metric_01M(CENTER, 64)
    b = metric_01M(CENTER, 128)
    assert b.h00 == pytest.approx(2.0 * a.h00, rel=1e-12)


def test_delta_c_01M_gsum_alternative():
    # the alternative reduced integrand gives the same value at the
    # symmetric center (documented to differ off-center)
    val = delta_c_01M_gsum(CENTER, 100)
    m = metric_01M(CENTER, 100)
    assert val < 0.0
    assert val == pytest.approx(-0.5 * m.h00, rel=1e-4)


def test_lightspeed_field_formulas():
    m = metric_011(CENTER)
    dcx, dcy, dcz = lightspeed_field(m)
    assert dcx == pytest.approx(-0.5 * (m.h00 + m.h11), rel=1e-15)
    assert dcy == pytest.approx(-0.5 * (m.h00 + m.h22), rel=1e-15)
    assert dcz == pytest.approx(-0.5 * (m.h00 + m.h33), rel=1e-15)
    mx, my, mz = lightspeed_field(m, measured=True)
    assert mx == pytest.approx(-m.h00 - 0.5 * m.h11, rel=1e-15)
    assert my == pytest.approx(-m.h00 - 0.5 * m.h22, rel=1e-15)
    assert mz == pytest.approx(-m.h00 - 0.5 * m.h33, rel=1e-15)
    # interior light slows down in every direction
    assert dcx < 0 and dcy < 0 and dcz < 0


def test_metric_grid_components_and_dc():
    grid = GridSpec(xi=(1.0, 2.0, 2), eta=(1.0, 2.0, 2), zeta=(1.5, 1.5, 1))
    field = metric_grid(grid, QuadratureSpec(rel_tol=1e-4), threads=1)
    for name in ("h00", "h11", "h22", "h33", "h23", "dcx", "dcy", "dcz"):
        assert name in field.components
    h00, h11 = field.components["h00"], field.components["h11"]
    assert np.allclose(field.components["dcx"], -0.5 * (h00 + h11), atol=0)
    assert field.all_converged


def test_metric_grid_01M_dcz_is_twice_dcx():
    grid = GridSpec(xi=(1.2, 1.8, 2), eta=(1.2, 1.8, 2), zeta=(1.5, 1.5, 1))
    field = metric_grid(grid, QuadratureSpec(rel_tol=1e-4), big_m=64, threads=1)
    # h11 = h22 = 0 and h33 = h00, so dcz = -h00 = 2 dcx exactly
    assert np.array_equal(field.components["dcz"], 2.0 * field.components["dcx"])


def test_metric_grid_thread_invariance():
    grid = GridSpec(xi=(0.8, 2.2, 3), eta=(1.0, 2.0, 2), zeta=(1.3, 1.7, 2))
    spec = QuadratureSpec(rel_tol=1e-4)
    a = metric_grid(grid, spec, threads=1)
    b = metric_grid(grid, spec, threads=3)
    for name in a.components:
        assert np.array_equal(a.components[name], b.components[name])


def _interior_field(delta, count=5):
    c = 1.6
    half = (count - 1) / 2 * delta
    grid = GridSpec(
        xi=(c - half, c + half, count),
        eta=(c - half, c + half, count),
        zeta=(c - half, c + half, count),
    )
    return metric_grid(grid, QuadratureSpec(rel_tol=1e-6), threads=0)


def test_laplacian_residual_validation():
    field = _interior_field(PI / 64)
    # too coarse
    coarse = GridSpec(xi=(0.5, 2.5, 3), eta=(0.5, 2.5, 3), zeta=(0.5, 2.5, 3))
    cf = metric_grid(coarse, QuadratureSpec(rel_tol=1e-3), threads=1)
    with pytest.raises(ValueError):
        laplacian_residual(cf)
    # zero amplitude short-circuits to a zero residual
    stats = laplacian_residual(field, amplitude=0.0)
    assert stats.max_relative == 0.0 and stats.points == 0


def test_laplacian_residual_small_on_interior_block():
    stats = laplacian_residual(_interior_field(PI / 64))
    assert stats.points == 27 * 5  # 3^3 interior nodes x 5 components
    assert stats.max_relative < 0.02


def test_laplacian_residual_outside_interior_rejected():
    grid = GridSpec(xi=(-0.1, 0.3, 5), eta=(1.0, 1.4, 5), zeta=(1.0, 1.4, 5))
    field = metric_grid(grid, QuadratureSpec(rel_tol=1e-3), threads=1)
    with pytest.raises(ValueError):
        laplacian_residual(field)
