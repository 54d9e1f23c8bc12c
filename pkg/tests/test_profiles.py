import numpy as np

from fiolab.profiles import (angular_window, bump_inf, dyadic_bump,
                             low_frequency_cutoff, quintic_smoothstep,
                             smoothstep_inf, wavefront_profile)


def test_smoothstep_endpoints():
    assert smoothstep_inf(-0.1) == 0.0
    assert smoothstep_inf(0.0) == 0.0
    assert smoothstep_inf(1.0) == 1.0
    assert smoothstep_inf(1.7) == 1.0
    mid = smoothstep_inf(np.linspace(0.05, 0.95, 50))
    assert np.all(mid > 0) and np.all(mid < 1)
    assert np.all(np.diff(mid) >= 0)


def test_smoothstep_flat_to_high_order():
    # all derivatives vanish at the endpoints; finite differences near the
    # edges must be far below any polynomial smoothstep's
    h = 1e-3
    edge = (smoothstep_inf(h) - smoothstep_inf(0.0)) / h
    assert edge < 1e-30


def test_bump_support():
    assert bump_inf(-1.0) == 0.0
    assert bump_inf(1.0) == 0.0
    assert bump_inf(0.0) == 1.0
    t = np.linspace(-0.99, 0.99, 101)
    assert np.all(bump_inf(t) > 0)


def test_quintic_smoothstep_values():
    assert quintic_smoothstep(0.0) == 0.0
    assert quintic_smoothstep(1.0) == 1.0
    assert abs(quintic_smoothstep(0.5) - 0.5) < 1e-15


def test_dyadic_bump_support():
    s = np.array([0.25, 4.0, 0.2, 5.0])
    v = dyadic_bump(s)
    assert np.all(v[:2] == 0) or np.all(v >= 0)
    assert dyadic_bump(1.0) == 1.0
    assert dyadic_bump(0.24) == 0.0
    assert dyadic_bump(4.01) == 0.0
    assert dyadic_bump(0.3) > 0
    assert dyadic_bump(3.9) > 0


def test_low_frequency_cutoff():
    r = np.array([0.0, 8.0, 12.0, 16.0, 100.0])
    v = low_frequency_cutoff(r)
    assert v[0] == 0 and v[1] == 0
    assert 0 < v[2] < 1
    assert v[3] == 1 and v[4] == 1


def test_angular_window_normalizable():
    t = np.linspace(-3, 3, 121)
    v = angular_window(t)
    assert np.all(v >= 0)
    assert angular_window(0.0) > 0


def test_wavefront_profile_range():
    t = np.linspace(-5, 5, 101)
    v = wavefront_profile(t)
    assert np.all(v >= 0) and np.all(v <= 1)
