import numpy as np

from fiolab import backend


def _random_problem(n_t=97, n_j=4513, seed=3):
    rng = np.random.default_rng(seed)
    targets = rng.standard_normal((n_t, 2))
    nodes = rng.standard_normal((n_j, 2)) * 10.0
    coeffs = rng.standard_normal(n_j) + 1j * rng.standard_normal(n_j)
    return targets, nodes, coeffs


def _reference(targets, nodes, coeffs, sign):
    ph = sign * (targets @ nodes.T)
    return np.exp(1j * ph) @ coeffs


def test_osc_sum_direct_matches_reference():
    targets, nodes, coeffs, = _random_problem()
    for sign in (1.0, -1.0):
        got = backend.osc_sum_direct(targets, nodes, coeffs, sign)
        ref = _reference(targets, nodes, coeffs, sign)
        assert np.max(np.abs(got - ref)) / np.max(np.abs(ref)) < 1e-12


def test_python_fallback_matches_compiled():
    targets, nodes, coeffs = _random_problem(n_t=41, n_j=977)
    out_py = np.empty(41, dtype=np.complex128)
    backend._osc_sum_python(targets, nodes, coeffs, 1.0, out_py)
    got = backend.osc_sum_direct(targets, nodes, coeffs, 1.0)
    assert np.max(np.abs(got - out_py)) / np.max(np.abs(out_py)) < 1e-12


def test_osc_sum_repeatable_bytes():
    targets, nodes, coeffs = _random_problem(n_t=31, n_j=70000)
    a = backend.osc_sum_direct(targets, nodes, coeffs, 1.0)
    b = backend.osc_sum_direct(targets, nodes, coeffs, 1.0)
    assert a.tobytes() == b.tobytes()


def test_exp_matrix_recurrence():
    axis = -3.0 + 0.25 * np.arange(40)
    nodes = np.linspace(-7.0, 11.0, 63)
    e = backend._exp_matrix(axis, nodes, -1.0)
    ref = np.exp(-1j * np.outer(axis, nodes))
    assert np.max(np.abs(e - ref)) < 1e-11


def test_osc_sum_grid_matches_direct():
    rng = np.random.default_rng(7)
    ax0 = -2.0 + 0.125 * np.arange(32)
    ax1 = -1.0 + 0.25 * np.arange(16)
    nodes = rng.standard_normal((5000, 2)) * 6.0
    coeffs = rng.standard_normal(5000) + 1j * rng.standard_normal(5000)
    grid_vals = backend.osc_sum_grid([ax0, ax1], nodes, coeffs, sign=1.0)
    assert grid_vals.shape == (32, 16)
    xx, yy = np.meshgrid(ax0, ax1, indexing="ij")
    targets = np.stack([xx.ravel(), yy.ravel()], axis=-1)
    direct = backend.osc_sum_direct(targets, nodes, coeffs, 1.0)
    err = np.max(np.abs(grid_vals.ravel() - direct))
    assert err / np.max(np.abs(direct)) < 1e-11


def test_osc_sum_grid_1d():
    rng = np.random.default_rng(11)
    ax = 0.5 * np.arange(24)
    nodes = rng.standard_normal((800, 1)) * 3.0
    coeffs = rng.standard_normal(800) + 0j
    vals = backend.osc_sum_grid([ax], nodes, coeffs, sign=-1.0)
    ref = np.exp(-1j * np.outer(ax, nodes[:, 0])) @ coeffs
    assert np.max(np.abs(vals - ref)) / np.max(np.abs(ref)) < 1e-11


def test_backend_reports_mode():
    assert backend.BACKEND in ("compiled", "python")
