"""Smooth cutoff profiles shared by the phase, amplitude and decomposition code.

All profiles are fixed once and for all so that runs are reproducible:

* ``smoothstep_inf`` -- a C-infinity transition built from exp(-1/t); used for
  the radial dyadic bump, the low-frequency cutoff and the angular windows,
  where infinite smoothness keeps the trapezoid quadrature spectrally accurate.
* ``quintic_smoothstep`` -- the polynomial transition used for the wave-front
  cutoff profile ``h`` (1 on (-inf, 1/2], 0 on [1, inf)).
"""

import numpy as np


def _sigma(t):
    """exp(-1/t) for t > 0, extended by 0; C-infinity on the real line."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def smoothstep_inf(t):
    """C-infinity monotone step: 0 for t <= 0, 1 for t >= 1."""
    s0 = _sigma(t)
    s1 = _sigma(1.0 - np.asarray(t, dtype=float))
    return s0 / (s0 + s1)


def bump_inf(t, lo=-1.0, hi=1.0):
    """C-infinity bump supported on (lo, hi), equal to 1 at the midpoint.

    Rises on the first half of the interval and falls on the second half.
    """
    t = np.asarray(t, dtype=float)
    u = 2.0 * (t - lo) / (hi - lo)  # in (0, 2) on the support
    return smoothstep_inf(u) * smoothstep_inf(2.0 - u)


def quintic_smoothstep(t):
    """Polynomial smoothstep: 0 for t <= 0, 1 for t >= 1, C^2 transitions."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t))


def wavefront_profile(t):
    """The profile h: identically 1 on (-inf, 1/2], identically 0 on [1, inf).

    The transition on [1/2, 1] is the quintic smoothstep complement, fixed
    for reproducibility.
    """
    return 1.0 - quintic_smoothstep(2.0 * np.asarray(t, dtype=float) - 1.0)


def low_frequency_cutoff(r, lo=8.0, hi=16.0):
    """C-infinity radial cutoff: 0 for r <= lo, 1 for r >= hi."""
    r = np.asarray(r, dtype=float)
    return smoothstep_inf((r - lo) / (hi - lo))


def dyadic_bump(s):
    """C-infinity bump beta(s) supported in (1/4, 4), positive on the interior.

    Written in log2 coordinates so that the dyadic translates
    beta(2**-k s) overlap pairwise and sum to a positive function.
    """
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    pos = s > 0
    out[pos] = bump_inf(np.log2(s[pos]), -2.0, 2.0)
    return out


def angular_window(t):
    """C-infinity window for the angular partition, supported on (-2, 2)."""
    return bump_inf(t, -2.0, 2.0)
