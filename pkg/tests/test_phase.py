import numpy as np
import pytest

from fiolab.phase import (PhaseSamples, certify_phase, check_homogeneity,
                          lemma_M_constant, make_builtin_phase)
from fiolab.util import ConfigurationError


@pytest.fixture(scope="module")
def samples():
    return PhaseSamples(2)


@pytest.mark.parametrize("pid", ["linear", "shifted_wave", "diffeo"])
def test_homogeneity(pid, samples):
    phi = make_builtin_phase(pid, 2)
    assert check_homogeneity(phi, samples) < 1e-10


def test_linear_phase_values():
    phi = make_builtin_phase("linear", 2)
    y = np.array([1.0, 2.0])
    xi = np.array([3.0, -1.0])
    assert abs(phi.eval(y, xi) - 1.0) < 1e-14
    assert np.allclose(phi.grad_xi(y, xi), y)
    assert np.allclose(phi.grad_y(y, xi), xi)
    assert phi.point_map_identity


def test_shifted_wave_structure():
    phi = make_builtin_phase("shifted_wave", 2)
    y = np.array([0.5, -0.25])
    xi = np.array([4.0, 3.0])
    assert abs(phi.eval(y, xi) - (y @ xi + 5.0)) < 1e-14
    assert phi.point_map_identity
    assert phi.radial_part is not None


def test_diffeo_not_identity():
    phi = make_builtin_phase("diffeo", 2)
    assert not phi.point_map_identity
    y = np.array([[1.0, 0.5]])
    assert not np.allclose(phi.point_map(y), y)


def test_mixed_hessian_nondegenerate(samples):
    for pid in ("linear", "shifted_wave", "diffeo"):
        phi = make_builtin_phase(pid, 2)
        ys, xis = samples.pairs(max_pairs=200)
        dets = np.abs(np.linalg.det(phi.mixed_hessian(ys, xis)))
        assert dets.min() >= 0.5


@pytest.mark.parametrize("pid", ["linear", "shifted_wave", "diffeo"])
def test_certify_flavor_I(pid, samples):
    phi = make_builtin_phase(pid, 2)
    cert = certify_phase(phi, "I", samples)
    assert cert.passed, cert


def test_certify_rejects_bad_flavor(samples):
    phi = make_builtin_phase("linear", 2)
    with pytest.raises(ConfigurationError):
        certify_phase(phi, "IV", samples)


def test_euler_identity_shifted_wave(samples):
    # homogeneity of degree one: <xi, grad_xi phi> = phi
    phi = make_builtin_phase("shifted_wave", 2)
    ys, xis = samples.pairs(max_pairs=300)
    lhs = np.sum(xis * phi.grad_xi(ys, xis), axis=-1)
    rhs = phi.eval(ys, xis)
    assert np.max(np.abs(lhs - rhs)) / (1 + np.max(np.abs(rhs))) < 1e-10


def test_lemma_M_constant_positive(samples):
    phi = make_builtin_phase("shifted_wave", 2)
    m = lemma_M_constant(phi, samples)
    assert np.isfinite(m) and m >= 1.0
