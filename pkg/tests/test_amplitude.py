import numpy as np
import pytest

from fiolab.amplitude import (certify_symbol, make_builtin_amplitude,
                              wavefront_cutoff, wavefront_equivalence_constants,
                              wavefront_split)
from fiolab.phase import make_builtin_phase
from fiolab.util import DomainError


def test_sg_power_eval_orders():
    amp = make_builtin_amplitude("sg_power", 2, (-1.0, 0.0, -0.5))
    x = np.array([3.0, 4.0])
    y = np.array([0.0, 0.0])
    xi = np.array([40.0, 0.0])
    v = amp.eval(x, y, xi)
    expected = (1 + 25.0) ** (-0.5) * (1 + 1600.0) ** (-0.25)
    assert abs(v - expected) / expected < 1e-12


def test_low_cutoff_kills_low_frequencies():
    amp = make_builtin_amplitude("sg_power", 2, (0.0, 0.0, 0.0), low_cutoff=8.0)
    x = y = np.zeros(2)
    assert amp.eval(x, y, np.array([4.0, 0.0])) == 0.0
    assert amp.eval(x, y, np.array([20.0, 0.0])) == 1.0


def test_certify_symbol_passes():
    for amp_id, orders in (("sg_power", (-0.5, 0.0, -0.5)),
                           ("sg_power_xi", (-1.0, -0.5))):
        amp = make_builtin_amplitude(amp_id, 2, orders)
        cert = certify_symbol(amp)
        assert cert.passed, cert.constants


def test_certify_symbol_order_cap():
    amp = make_builtin_amplitude("sg_power", 2, (0.0, 0.0, 0.0))
    with pytest.raises(DomainError):
        certify_symbol(amp, max_order=4)


def test_wavefront_cutoff_range_and_support():
    phi = make_builtin_phase("shifted_wave", 2)
    chi = wavefront_cutoff(phi, 0.25)
    y = np.zeros(2)
    xi = np.array([16.0, 0.0])
    # on the singular direction x = grad_xi phi(y, xi) the cutoff is 1
    x_on = phi.grad_xi(y, xi)
    assert abs(chi(x_on, y, xi) - 1.0) < 1e-12
    x_off = x_on + np.array([5.0, 0.0])
    assert chi(x_off, y, xi) == 0.0
    vals = [chi(x_on + np.array([t, 0.0]), y, xi)
            for t in np.linspace(0, 2, 30)]
    assert all(0 <= v <= 1 for v in vals)


def test_wavefront_split_partitions_amplitude():
    phi = make_builtin_phase("shifted_wave", 2)
    amp = make_builtin_amplitude("sg_power", 2, (-0.5, 0.0, -0.5))
    near, far = wavefront_split(amp, phi, 0.25)
    x = np.array([0.3, 0.8])
    y = np.array([0.1, -0.2])
    xi = np.array([25.0, 10.0])
    total = near.eval(x, y, xi) + far.eval(x, y, xi)
    assert abs(total - amp.eval(x, y, xi)) < 1e-12


def test_wavefront_equivalence_constants_bracket():
    phi = make_builtin_phase("shifted_wave", 2)
    amp = make_builtin_amplitude("sg_power", 2, (-0.5, 0.0, -0.5))
    c1, c2 = wavefront_equivalence_constants(amp, phi, 0.25, seed=0)
    assert 0 < c1 <= 1 <= c2
