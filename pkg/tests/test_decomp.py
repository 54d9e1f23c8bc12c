import numpy as np
import pytest

from fiolab.decomp import (build_exceptional_set, make_angular_frame,
                           make_atom, make_radial_cutoffs)
from fiolab.phase import make_builtin_phase
from fiolab.util import DomainError


def test_radial_partition_sums_to_one():
    cuts = make_radial_cutoffs(12)
    s = np.geomspace(0.5, 2000.0, 3000)
    total = np.zeros_like(s)
    for k in range(-4, 16):
        total += cuts.theta(np.ldexp(s, -k))
    assert np.max(np.abs(total - 1.0)) < 1e-10


def test_radial_cutoff_support():
    cuts = make_radial_cutoffs(8)
    r = np.array([3.9, 4.1, 16.0, 63.0, 65.0])
    v = cuts.theta_k_radial(4, r)
    assert v[0] == 0.0 and v[-1] == 0.0
    assert np.all(v[1:4] > 0)


def test_radial_cutoffs_k_max_floor():
    with pytest.raises(DomainError):
        make_radial_cutoffs(3)


@pytest.mark.parametrize("k,d", [(2, 0.0), (5, 4.0), (8, 16.0)])
def test_angular_partition_sums_to_one(k, d):
    y = np.array([d, 0.0])
    frame = make_angular_frame(k, y)
    ang = np.linspace(0, 2 * np.pi, 720, endpoint=False)
    xi = np.stack([np.cos(ang), np.sin(ang)], axis=-1) * 2.0**k
    total = np.zeros(len(xi))
    for nu in range(len(frame.directions)):
        total += frame.chi(nu, xi)
    assert np.max(np.abs(total - 1.0)) < 1e-8


def test_angular_aperture_scales_with_position():
    near = make_angular_frame(4, np.zeros(2))
    far = make_angular_frame(4, np.array([16.0, 0.0]))
    assert far.aperture < near.aperture
    assert len(far.directions) > len(near.directions)


def test_atom_properties():
    q = 0.5
    y0 = np.array([1.0, -2.0])
    atom = make_atom(y0, q)
    grid = y0 + (np.random.default_rng(0).random((4000, 2)) - 0.5) * q
    vals = atom.eval(grid)
    assert np.max(np.abs(vals)) <= q**-2 + 1e-12
    outside = atom.eval(y0 + np.array([[0.51 * q, 0.0], [0.0, -0.6 * q]]))
    assert np.all(outside == 0)
    # mean zero by odd symmetry: integrate on a symmetric lattice
    ax = np.linspace(-0.5 * q, 0.5 * q, 101)
    xx, yy = np.meshgrid(ax, ax, indexing="ij")
    pts = y0 + np.stack([xx.ravel(), yy.ravel()], axis=-1)
    total = atom.eval(pts).sum() * (ax[1] - ax[0]) ** 2
    assert abs(total) < 1e-10


def test_exceptional_set_contains_image_points():
    phi = make_builtin_phase("shifted_wave", 2)
    y0 = np.zeros(2)
    exc = build_exceptional_set(phi, y0, j=3, m_constant=1.5)
    ang = np.linspace(0, 2 * np.pi, 100, endpoint=False)
    xi = np.stack([np.cos(ang), np.sin(ang)], axis=-1) * 32.0
    pts = phi.grad_xi(np.broadcast_to(y0, xi.shape), xi)
    assert np.all(exc.member(pts))


def test_exceptional_set_excludes_far_points():
    phi = make_builtin_phase("shifted_wave", 2)
    exc = build_exceptional_set(phi, np.zeros(2), j=3, m_constant=1.5)
    far = np.array([[3.0, 3.0], [-4.0, 0.1]])
    assert not np.any(exc.member(far))


def test_exceptional_volume_decreases_with_j():
    phi = make_builtin_phase("shifted_wave", 2)
    x = np.linspace(-2.5, 2.5, 160)
    xx, yy = np.meshgrid(x, x, indexing="ij")
    grid = np.stack([xx.ravel(), yy.ravel()], axis=-1)
    vols = []
    for j in (2, 4, 6):
        exc = build_exceptional_set(phi, np.zeros(2), j=j, m_constant=1.5)
        cell = (x[1] - x[0]) ** 2
        vols.append(exc.member(grid).sum() * cell)
    assert vols[0] > vols[1] > vols[2] > 0
