import numpy as np
import pytest

from fiolab.fields import (Field, Grid, dilate, field_from_function,
                           load_field, lp_norm, save_field, tail_mass,
                           weight_multiply)
from fiolab.util import DomainError


def gaussian_field(extent=8.0, points=128, sigma=1.0):
    grid = Grid(2, extent, points)

    def fn(x):
        x = np.asarray(x, float)
        return np.exp(-np.sum(x * x, axis=-1) / (2 * sigma**2))

    return field_from_function(grid, fn)


def test_grid_geometry():
    grid = Grid(2, 4.0, 64)
    assert grid.spacing == 0.125
    assert grid.shape == (64, 64)
    ax = grid.axis()
    assert ax[0] == -4.0
    assert abs(ax[-1] - (4.0 - 0.125)) < 1e-15
    pts = grid.points()
    assert pts.shape == (64 * 64, 2)


def test_grid_ceiling():
    with pytest.raises(DomainError):
        Grid(2, 1.0, 2**13)


def test_lp_norm_gaussian():
    # analytic L2 norm of exp(-|x|^2/2) on R^2 is sqrt(pi)
    f = gaussian_field(sigma=1.0)
    assert abs(lp_norm(f, 2.0) - np.sqrt(np.pi)) < 1e-8
    # and L1 norm is 2 pi
    assert abs(lp_norm(f, 1.0) - 2 * np.pi) < 1e-8


def test_dilate_l2_scaling():
    f = gaussian_field(sigma=1.0)
    g = dilate(f, 2.0)
    # |det| scaling: ||f(2x)||_2 = 2^(-n/2) ||f||_2 in n = 2
    assert abs(lp_norm(g, 2.0) - lp_norm(f, 2.0) / 2.0) < 1e-6


def test_weight_multiply():
    f = gaussian_field()
    g = weight_multiply(f, -2.0)
    assert np.all(np.abs(g.values) <= np.abs(f.values) + 1e-15)
    center_idx = f.grid.points_per_axis // 2
    assert abs(g.values[center_idx, center_idx]
               - f.values[center_idx, center_idx]) < 1e-12


def test_tail_mass_concentrated():
    f = gaussian_field(extent=8.0, sigma=0.5)
    assert tail_mass(f, 0.5) < 1e-10


def test_save_load_roundtrip(tmp_path):
    f = gaussian_field(points=32)
    f.values[3, 5] = 1.25 + 0.5j
    path = tmp_path / "field.bin"
    save_field(f, path)
    g = load_field(path)
    assert g.grid == f.grid
    assert np.array_equal(g.values, f.values)


def test_field_shape_mismatch():
    grid = Grid(2, 1.0, 8)
    with pytest.raises(DomainError):
        Field(grid, np.zeros((4, 4)))
