import math

import numpy as np
import pytest

from triphoton.errors import NormalizationError
from triphoton.spectra import (Gaussian, Lorentzian, Separable, SincSquared,
                               Tabulated, Tabulated2D)

ALL_SHAPES = [Gaussian(sigma=1.0), Lorentzian(gamma=1.0), SincSquared(width=1.0)]


def numeric_area(density, half_span=200.0, n=2_000_001):
    """Brute-force trapezoid of the density, independent of its own methods."""
    x = np.linspace(density.center - half_span, density.center + half_span, n)
    return float(np.trapezoid(density.evaluate(x), x))


def test_gaussian_peak_value_matches_numeric_normalization():
    g = Gaussian(sigma=1.0)
    # oracle: numerically integrate the unnormalized bell and invert
    x = np.linspace(-10, 10, 400001)
    peak = 1.0 / float(np.trapezoid(np.exp(-x ** 2 / 2), x))
    assert peak == pytest.approx(0.3989422804014327, rel=1e-12)
    assert g.evaluate(0.0) == pytest.approx(peak, rel=1e-12)


@pytest.mark.parametrize("density", ALL_SHAPES)
def test_even_symmetry_is_exact(density):
    xs = np.array([0.1, 0.35, 1.7, 2.0, 5.5, 11.0])
    assert np.array_equal(density.evaluate(xs), density.evaluate(-xs))


@pytest.mark.parametrize("density", ALL_SHAPES)
def test_analytic_shapes_have_unit_area(density):
    # numeric quadrature over a wide window plus the exact tail must give 1
    x = np.linspace(density.center - 50, density.center + 50, 400001)
    inside = float(np.trapezoid(density.evaluate(x), x))
    total = inside + density.mass_outside(float(x[0]), float(x[-1]))
    assert total == pytest.approx(1.0, abs=1e-9)


def test_gaussian_quadrature_area_within_1e6():
    s = Gaussian(sigma=1.0).sample_grid(4096, 8.0)
    assert np.trapezoid(s.values, s.grid) == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("density", ALL_SHAPES + [
    Tabulated([-1.0, -0.2, 0.4, 1.0], [0.0, 1.0, 2.0, 0.0]).normalize()])
def test_sample_grid_mass_accounting(density):
    s = density.sample_grid(2048, 8.0)
    inside = float(np.trapezoid(s.values, s.grid))
    assert inside + s.tail_mass == pytest.approx(1.0, abs=1e-6)


def test_sample_grid_span():
    s = Gaussian(sigma=1.0).sample_grid(1024, 6.0)
    assert s.grid[0] == pytest.approx(-6.0)
    assert s.grid[-1] == pytest.approx(6.0)
    assert len(s.grid) == 1024


def test_gaussian_tail_mass_matches_erfc():
    s = Gaussian(sigma=1.0).sample_grid(1024, 6.0)
    assert s.tail_mass == pytest.approx(1.9731752900754024e-09, rel=1e-9)
    assert s.tail_mass < 2e-9
    assert not s.heavy_tail


def test_lorentzian_tail_mass_matches_arctan():
    s = Lorentzian(gamma=1.0).sample_grid(1024, 6.0)
    assert s.tail_mass == pytest.approx(1 - 2 * math.atan(6.0) / math.pi, rel=1e-12)
    assert s.tail_mass == pytest.approx(0.10513691342250675, rel=1e-12)
    assert s.heavy_tail


def test_sample_grid_preconditions():
    g = Gaussian(sigma=1.0)
    with pytest.raises(ValueError):
        g.sample_grid(8, 6.0)
    with pytest.raises(ValueError):
        g.sample_grid(64, 0.0)


def test_invalid_widths_rejected():
    for bad in (0.0, -1.0, math.nan, math.inf):
        with pytest.raises(ValueError):
            Gaussian(sigma=bad)
        with pytest.raises(ValueError):
            Lorentzian(gamma=bad)
        with pytest.raises(ValueError):
            SincSquared(width=bad)


def test_tabulated_triangle_normalize():
    # trapezoid area of [0, 2, 0] on [-1, 0, 1] is 2, so values halve
    t = Tabulated([-1.0, 0.0, 1.0], [0.0, 2.0, 0.0]).normalize()
    assert np.allclose(t.values, [0.0, 1.0, 0.0])
    assert t.evaluate(0.0) == pytest.approx(1.0)
    assert t.evaluate(0.5) == pytest.approx(0.5)
    assert t.evaluate(2.0) == 0.0
    assert t.evaluate(-2.0) == 0.0
    assert t.is_normalized


def test_tabulated_rejects_bad_input():
    with pytest.raises(NormalizationError):
        Tabulated([-1.0, 0.0, 1.0], [0.0, 0.0, 0.0]).normalize()
    with pytest.raises(ValueError):
        Tabulated([0.0, 0.0, 1.0], [0.0, 1.0, 0.0])  # not strictly increasing
    with pytest.raises(ValueError):
        Tabulated([-1.0, 0.0, 1.0], [0.0, -1.0, 0.0])  # negative values


def test_tabulated_center_offset_shifts_grid():
    t = Tabulated([-1.0, 0.0, 1.0], [0.0, 1.0, 0.0], center_offset=5.0)
    assert t.center == pytest.approx(5.0)
    assert t.evaluate(5.0) == pytest.approx(1.0)
    assert t.evaluate(0.0) == 0.0


def test_width_scaling_preserves_area():
    for d in ALL_SHAPES:
        scaled = d.with_width_scaled(3.0)
        assert scaled.characteristic_width == pytest.approx(
            3.0 * d.characteristic_width)
        inside = numeric_area(scaled, half_span=600.0)
        assert inside + scaled.mass_outside(-600.0, 600.0) == pytest.approx(
            1.0, abs=1e-6)
    t = Tabulated([-1.0, 0.0, 1.0], [0.0, 1.0, 0.0]).with_width_scaled(2.0)
    assert t.area == pytest.approx(1.0, rel=1e-12)


def test_separable_is_pointwise_product():
    d1, d2 = Gaussian(sigma=1.0), Lorentzian(gamma=2.0)
    pm = Separable(d1, d2)
    xs = np.array([-1.5, 0.0, 0.7])
    ys = np.array([2.0, -0.3, 0.1])
    assert np.array_equal(pm.evaluate(xs, ys),
                          np.asarray(d1.evaluate(xs)) * np.asarray(d2.evaluate(ys)))


def test_tabulated2d_normalization_and_interpolation():
    g1 = np.linspace(-2, 2, 41)
    g2 = np.linspace(-3, 3, 61)
    vals = np.exp(-g1[:, None] ** 2) * np.exp(-g2[None, :] ** 2 / 4)
    pm = Tabulated2D(g1, g2, vals).normalize()
    assert pm.is_normalized
    area = np.trapezoid(np.trapezoid(pm.values, g2, axis=1), g1)
    assert area == pytest.approx(1.0, abs=1e-12)
    # bilinear interpolation reproduces grid nodes and is zero outside
    assert pm.evaluate(g1[7], g2[11]) == pytest.approx(pm.values[7, 11], rel=1e-12)
    assert pm.evaluate(10.0, 0.0) == 0.0
    assert pm.evaluate(0.0, -10.0) == 0.0
    # midpoint of a cell sits between the corner values
    mid = pm.evaluate(0.5 * (g1[3] + g1[4]), 0.5 * (g2[5] + g2[6]))
    corners = [pm.values[3, 5], pm.values[4, 5], pm.values[3, 6], pm.values[4, 6]]
    assert min(corners) <= mid <= max(corners)


def test_tabulated2d_rejects_bad_input():
    g = np.linspace(-1, 1, 5)
    with pytest.raises(NormalizationError):
        Tabulated2D(g, g, np.zeros((5, 5))).normalize()
    with pytest.raises(ValueError):
        Tabulated2D(g, g, np.ones((5, 4)))
    with pytest.raises(ValueError):
        Tabulated2D(g, g, -np.ones((5, 5)))


def test_tabulated_from_file(tmp_path):
    path = tmp_path / "density.txt"
    grid = np.linspace(-2, 2, 9)
    vals = np.maximum(0.0, 1 - np.abs(grid) / 2)
    np.savetxt(path, np.column_stack([grid, vals]))
    t = Tabulated.from_file(path).normalize()
    assert t.is_normalized
    assert t.evaluate(0.0) > 0
