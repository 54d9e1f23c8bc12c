"""Global amplitudes with declared orders, symbol certification, wave-front split.

Built-in amplitudes are products of bracket powers and a fixed low-frequency
cutoff vanishing for |xi| < 8.  The product structure is exposed to the
quadrature engine through the ``factors`` attribute; amplitudes produced by
the wave-front splitting couple x with (y, xi) and carry ``factors=None``.
"""

import itertools
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .phase import PhaseFunction
from .profiles import low_frequency_cutoff, wavefront_profile
from .util import ConfigurationError, DomainError, japanese_bracket


@dataclass(frozen=True)
class SeparableFactors:
    """b(x, y, xi) = x_part(x) * y_part(y) * xi_part(xi); parts may be None (=1)."""

    x_part: Optional[Callable] = None
    y_part: Optional[Callable] = None
    xi_part: Optional[Callable] = None


@dataclass(frozen=True)
class Amplitude:
    """Amplitude b(x, y, xi) (kind 'xyxi') or a(x, xi) (kind 'xxi').

    ``orders`` is (m1, m2, mu) for kind 'xyxi' and (m, mu) for kind 'xxi'.
    ``eval`` broadcasts; for kind 'xxi' it takes (x, xi).
    """

    n: int
    id: str
    kind: str
    orders: tuple
    flavor: str
    eval: Callable
    low_cutoff: float = 8.0
    factors: Optional[SeparableFactors] = None

    @property
    def m(self) -> float:
        return self.orders[0] + self.orders[1] if self.kind == "xyxi" else self.orders[0]

    @property
    def mu(self) -> float:
        return self.orders[-1]


@dataclass
class SymbolCertificate:
    """Sampled derivative sups divided by the declared growth factors."""

    amplitude_id: str
    flavor: str
    constants: dict
    max_order_tested: int
    ceiling: float

    @property
    def passed(self) -> bool:
        return all(np.isfinite(v) and v <= self.ceiling for v in self.constants.values())

    def summary(self) -> dict:
        return {
            "amplitude": self.amplitude_id,
            "flavor": self.flavor,
            "max_order": self.max_order_tested,
            "pass": bool(self.passed),
            "constants": {str(k): v for k, v in self.constants.items()},
        }


def _eta(xi, low_cutoff):
    r = np.linalg.norm(np.asarray(xi, float), axis=-1)
    return low_frequency_cutoff(r, low_cutoff, 2.0 * low_cutoff)


def make_builtin_amplitude(amp_id: str, n: int, orders, flavor: str = "I",
                           low_cutoff: float = 8.0) -> Amplitude:
    """Built-ins: sg_power, sg_power_osc (kind b(x,y,xi)); sg_power_xi (a(x,xi))."""
    if flavor not in ("I", "II", "III"):
        raise ConfigurationError("flavor must be I, II or III")
    orders = tuple(float(v) for v in orders)

    if amp_id == "sg_power":
        m1, m2, mu = orders

        def x_part(x):
            return japanese_bracket(x) ** m1

        def y_part(y):
            return japanese_bracket(y) ** m2

        def xi_part(xi):
            return _eta(xi, low_cutoff) * japanese_bracket(xi) ** mu

        def ev(x, y, xi):
            return (x_part(x) * y_part(y) * xi_part(xi)).astype(complex)

        return Amplitude(n=n, id=amp_id, kind="xyxi", orders=orders, flavor=flavor,
                         eval=ev, low_cutoff=low_cutoff,
                         factors=SeparableFactors(x_part, y_part, xi_part))

    if amp_id == "sg_power_osc":
        m1, m2, mu = orders

        def ev_osc(x, y, xi):
            wob = 1.0 + 0.5 * np.sin(japanese_bracket(x)) * np.cos(
                np.log(japanese_bracket(xi)))
            base = (japanese_bracket(x) ** m1 * japanese_bracket(y) ** m2
                    * _eta(xi, low_cutoff) * japanese_bracket(xi) ** mu)
            return (wob * base).astype(complex)

        return Amplitude(n=n, id=amp_id, kind="xyxi", orders=orders, flavor=flavor,
                         eval=ev_osc, low_cutoff=low_cutoff, factors=None)

    if amp_id == "sg_power_xi":
        if len(orders) == 3:
            raise ConfigurationError("sg_power_xi takes orders (m, mu)")
        m, mu = orders

        def x_part_a(x):
            return japanese_bracket(x) ** m

        def xi_part_a(xi):
            return _eta(xi, low_cutoff) * japanese_bracket(xi) ** mu

        def ev_a(x, xi):
            return (x_part_a(x) * xi_part_a(xi)).astype(complex)

        return Amplitude(n=n, id=amp_id, kind="xxi", orders=orders, flavor=flavor,
                         eval=ev_a, low_cutoff=low_cutoff,
                         factors=SeparableFactors(x_part_a, None, xi_part_a))

    raise ConfigurationError(
        "unknown amplitude %r; built-ins: sg_power, sg_power_osc, sg_power_xi"
        % (amp_id,))


def _growth_factor(amp: Amplitude, alpha: int, beta: int, gamma: int,
                   brx, bry, brxi):
    """Declared derivative growth for the amplitude's flavor, SG in xi."""
    if amp.kind == "xxi":
        m, mu = amp.orders
        return brx ** (m - alpha) * brxi ** (mu - gamma)
    m1, m2, mu = amp.orders
    f = brx**m1 * bry**m2 * brxi ** (mu - gamma)
    if amp.flavor == "II":
        f = f * brx ** (-alpha)
    elif amp.flavor == "III":
        f = f * bry ** (-beta)
    return f


def _central_diff(f, pts, axes, h):
    """Nested central differences of f along the listed coordinate axes.

    ``pts`` is a tuple of sample arrays, one per variable block; ``axes`` is a
    list of (block, coordinate) pairs, one per derivative order.
    """
    if not axes:
        return f(*pts)
    (blk, coord), rest = axes[0], axes[1:]
    step = np.zeros(pts[blk].shape[-1])
    step[coord] = h
    plus = tuple(p + step if i == blk else p for i, p in enumerate(pts))
    minus = tuple(p - step if i == blk else p for i, p in enumerate(pts))
    return (_central_diff(f, plus, rest, h) - _central_diff(f, minus, rest, h)) / (2 * h)


def symbol_sample_points(amp: Amplitude, n_samples: int = 160, seed: int = 0,
                         x_max: float = 24.0, k_min: int = 4, k_max: int = 7):
    """Random (x, y, xi) samples in the certified box/shell region."""
    rng = np.random.default_rng(seed)
    n = amp.n
    x = rng.uniform(-x_max, x_max, size=(n_samples, n))
    y = rng.uniform(-x_max, x_max, size=(n_samples, n))
    radii = 2.0 ** rng.uniform(k_min, k_max + 1, size=n_samples)
    if n == 1:
        xi = (radii * rng.choice([-1.0, 1.0], size=n_samples))[:, None]
    else:
        v = rng.standard_normal((n_samples, n))
        v /= np.linalg.norm(v, axis=-1, keepdims=True)
        xi = radii[:, None] * v
    return x, y, xi


def certify_symbol(amp: Amplitude, samples=None, max_order: int = 2,
                   ceiling: float = 1e6, h: float = 1e-3) -> SymbolCertificate:
    """Certificate of the symbol estimates by central differences up to max_order.

    Derivatives are taken coordinatewise; each entry is the sampled sup of
    |derivative| over the flavor's growth factor, keyed by the multi-index
    triple (alpha, beta, gamma).
    """
    if max_order > 3:
        raise DomainError("derivatives above total order 3 are unsupported")
    if samples is None:
        samples = symbol_sample_points(amp)
    n = amp.n
    if amp.kind == "xxi":
        x, _, xi = samples if len(samples) == 3 else (samples[0], None, samples[1])
        pts = (x, xi)
        nblocks = 2
    else:
        x, y, xi = samples
        pts = (x, y, xi)
        nblocks = 3
    brx = japanese_bracket(x)
    bry = japanese_bracket(pts[1]) if nblocks == 3 else None
    brxi = japanese_bracket(pts[-1])

    constants = {}
    coords = [(blk, c) for blk in range(nblocks) for c in range(n)]
    for order in range(0, max_order + 1):
        for combo in itertools.combinations_with_replacement(coords, order):
            counts = [0] * nblocks
            for blk, _ in combo:
                counts[blk] += 1
            if nblocks == 3:
                alpha, _, gamma = counts
            else:
                alpha, gamma = counts
            deriv = _central_diff(amp.eval, pts, list(combo), h)
            growth = _growth_factor(amp, alpha, counts[1] if nblocks == 3 else 0,
                                    gamma, brx, bry if nblocks == 3 else 1.0, brxi)
            key = tuple(counts) + tuple(c for _, c in combo)
            constants[key] = float((np.abs(deriv) / growth).max())
    return SymbolCertificate(
        amplitude_id=amp.id, flavor=amp.flavor, constants=constants,
        max_order_tested=max_order, ceiling=ceiling)


def wavefront_cutoff(phi: PhaseFunction, k: float) -> Callable:
    """chi(x, y, xi) = h(|x - grad_xi phi(y, xi)| / (k <x>))."""
    if not 0.0 < k < 1.0:
        raise DomainError("wave-front parameter k must lie in (0, 1)")

    def chi(x, y, xi):
        x = np.asarray(x, float)
        d = np.linalg.norm(x - phi.grad_xi(y, xi), axis=-1)
        return wavefront_profile(d / (k * japanese_bracket(x)))

    return chi


def wavefront_split(amp: Amplitude, phi: PhaseFunction, k: float = 0.25):
    """Split b = chi b + (1 - chi) b; the sum is exact pointwise.

    Returns (b_near, b_far) as Amplitude objects with the same declared
    orders.  The factor structure is lost: both parts couple x and (y, xi).
    """
    if amp.kind != "xyxi":
        raise DomainError("wavefront_split applies to three-argument amplitudes")
    chi = wavefront_cutoff(phi, k)

    def near(x, y, xi):
        return chi(x, y, xi) * amp.eval(x, y, xi)

    def far(x, y, xi):
        return (1.0 - chi(x, y, xi)) * amp.eval(x, y, xi)

    mk = lambda tag, ev: Amplitude(
        n=amp.n, id="%s_%s" % (amp.id, tag), kind="xyxi", orders=amp.orders,
        flavor=amp.flavor, eval=ev, low_cutoff=amp.low_cutoff, factors=None)
    return mk("near", near), mk("far", far)


def wavefront_equivalence_constants(amp: Amplitude, phi: PhaseFunction,
                                    k: float = 0.25, n_samples: int = 4096,
                                    seed: int = 0):
    """Measured (C1, C2) with C1 <y> <= <x> <= C2 <y> on the near support."""
    chi = wavefront_cutoff(phi, k)
    rng = np.random.default_rng(seed)
    n = amp.n
    y = rng.uniform(-16.0, 16.0, size=(n_samples, n))
    v = rng.standard_normal((n_samples, n))
    v /= np.linalg.norm(v, axis=-1, keepdims=True)
    xi = 2.0 ** rng.uniform(3.0, 8.0, size=(n_samples, 1)) * v
    # x drawn in a tube around grad_xi phi so that the near support is hit
    x = phi.grad_xi(y, xi) + rng.uniform(-1.0, 1.0, size=(n_samples, n)) * (
        k * japanese_bracket(y)[:, None])
    mask = chi(x, y, xi) > 0
    if not np.any(mask):
        raise DomainError("no samples landed on the near support")
    ratio = japanese_bracket(x[mask]) / japanese_bracket(y[mask])
    return float(ratio.min()), float(ratio.max())
