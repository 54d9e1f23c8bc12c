import numpy as np
import pytest

from fiolab.util import (DomainError, japanese_bracket, loglog_fit)


def test_bracket_values():
    assert japanese_bracket(np.zeros(2)) == 1.0
    v = japanese_bracket(np.array([3.0, 4.0]))
    assert abs(v - np.sqrt(26.0)) < 1e-14


def test_bracket_batched():
    x = np.array([[0.0, 0.0], [1.0, 0.0]])
    v = japanese_bracket(x)
    assert v.shape == (2,)
    assert abs(v[1] - np.sqrt(2.0)) < 1e-15


def test_loglog_fit_exact_line():
    xs = np.arange(1, 6, dtype=float)
    ys = -2.0 * xs + 3.0
    slope, intercept, r2 = loglog_fit(xs, ys)
    assert abs(slope + 2.0) < 1e-12
    assert abs(intercept - 3.0) < 1e-12
    assert abs(r2 - 1.0) < 1e-12


def test_loglog_fit_needs_two_points():
    with pytest.raises(DomainError):
        loglog_fit([1.0], [2.0])
