"""Small shared helpers and the laboratory's exception types."""

import numpy as np


class FiolabError(Exception):
    """Base class for laboratory errors."""


class ConfigurationError(FiolabError):
    """Bad identifier, bad option value, or malformed config file."""


class DomainError(FiolabError):
    """Input outside an operation's stated precondition."""


class QuadratureRefusal(FiolabError):
    """A quadrature spec does not resolve the oscillation of the integrand."""

    def __init__(self, message, required_radial=None, required_angular=None):
        super().__init__(message)
        self.required_radial = required_radial
        self.required_angular = required_angular


def japanese_bracket(x):
    """<x> = (1 + |x|^2)^(1/2); x has points along the last axis."""
    x = np.asarray(x, dtype=float)
    return np.sqrt(1.0 + np.sum(x * x, axis=-1))


def bracket_scalar(r):
    """<r> for scalar radii r >= 0."""
    r = np.asarray(r, dtype=float)
    return np.sqrt(1.0 + r * r)


def loglog_fit(xs, ys):
    """Least-squares line through (xs, ys); returns (slope, intercept, r2).

    Callers pass already log-transformed data.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(xs) < 2:
        raise DomainError("need at least two points to fit a slope")
    slope, intercept = np.polyfit(xs, ys, 1)
    pred = slope * xs + intercept
    ss_res = float(np.sum((ys - pred) ** 2))
    ss_tot = float(np.sum((ys - np.mean(ys)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), float(r2)
