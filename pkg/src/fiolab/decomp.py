"""Decomposition objects: radial dyadic cutoffs, space-dependent angular frames,
Hardy atoms, Taylor-remainder diagnostics and the exceptional set.

The angular frame at scale k and position y has aperture
2^(-k/2) <y>^(-1/2): finer directions at high frequency and far from the
origin.  The exceptional set is the union of the frame-aligned rectangles
over a discretized sweep of the atom's cube.
"""

from dataclasses import dataclass, field
from typing import Callable, List

import numpy as np

from .fields import Grid
from .phase import PhaseFunction
from .profiles import angular_window, bump_inf, dyadic_bump
from .util import ConfigurationError, DomainError, bracket_scalar, japanese_bracket


# ---------------------------------------------------------------------------
# radial cutoffs


@dataclass(frozen=True)
class RadialCutoffs:
    """Dyadic partition theta_k(xi) = theta(2^-k |xi|), supp theta in (1/4, 4)."""

    k_max: int

    def theta(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        num = dyadic_bump(s)
        den = np.zeros_like(num)
        # translates with 2^m s in (1/4, 4) contribute; for s near the
        # support edges that needs |m| up to 3
        for m in range(-3, 4):
            den += dyadic_bump(np.ldexp(s, m))
        out = np.zeros_like(num)
        pos = den > 0
        out[pos] = num[pos] / den[pos]
        return out

    def theta_k(self, k: int, xi) -> np.ndarray:
        r = np.linalg.norm(np.asarray(xi, float), axis=-1)
        return self.theta(np.ldexp(r, -k))

    def theta_k_radial(self, k: int, r) -> np.ndarray:
        return self.theta(np.ldexp(np.asarray(r, float), -k))

    def theta_0(self, xi) -> np.ndarray:
        r = np.linalg.norm(np.asarray(xi, float), axis=-1)
        total = np.zeros_like(r)
        for k in range(1, self.k_max + 1):
            total += self.theta(np.ldexp(r, -k))
        return 1.0 - total


def make_radial_cutoffs(k_max: int) -> RadialCutoffs:
    if k_max < 4:
        raise DomainError("k_max must be at least 4")
    return RadialCutoffs(k_max=k_max)


# ---------------------------------------------------------------------------
# angular frames


@dataclass
class AngularFrame:
    """Directions and angular cutoffs for the shell |xi| ~ 2^k at position y."""

    n: int
    k: int
    y: np.ndarray
    c0: float
    directions: np.ndarray  # (N, n) unit vectors
    aperture: float  # 2^(-k/2) <y>^(-1/2)

    @property
    def count(self) -> int:
        return len(self.directions)

    @property
    def angular_step(self) -> float:
        return 2.0 * np.pi / self.count if self.n == 2 else np.nan

    def chi_all(self, xi) -> np.ndarray:
        """chi_k^nu(y, xi) for all nu at once; output shape (N,) + xi-batch."""
        xi = np.asarray(xi, dtype=float)
        if self.n == 1:
            sgn = np.sign(xi[..., 0])
            return np.stack([(sgn > 0).astype(float), (sgn < 0).astype(float)])
        ang = np.arctan2(xi[..., 1], xi[..., 0])
        step = self.angular_step
        centers = step * np.arange(self.count)
        rel = ang[None, ...] - centers.reshape((self.count,) + (1,) * ang.ndim)
        rel = (rel + np.pi) % (2.0 * np.pi) - np.pi
        w = angular_window(rel / step)
        den = w.sum(axis=0)
        return w / den

    def chi(self, nu: int, xi) -> np.ndarray:
        return self.chi_all(xi)[nu]

    def covering_defect(self, n_probe: int = 4096) -> float:
        """Largest distance of a probe direction to the frame; < aperture passes."""
        if self.n == 1:
            return 0.0
        ang = np.linspace(0, 2 * np.pi, n_probe, endpoint=False)
        probe = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
        d = np.linalg.norm(probe[:, None, :] - self.directions[None, :, :], axis=-1)
        return float(d.min(axis=1).max())

    def min_pairwise_distance(self) -> float:
        if self.count < 2:
            return np.inf
        if self.n == 2:
            return float(2.0 * np.sin(np.pi / self.count))
        d = np.linalg.norm(
            self.directions[:, None, :] - self.directions[None, :, :], axis=-1)
        d[d == 0] = np.inf
        return float(d.min())


def make_angular_frame(k: int, y, c0: float = 0.5, n: int = 2) -> AngularFrame:
    """Uniform-angle frame with spacing c0 * 2^(-k/2) <y>^(-1/2) (n = 2).

    n = 1 degenerates to the two half-lines.  The cutoff window has support
    radius 2 * c0 in units of the spacing, guaranteeing covering with bounded
    overlap.
    """
    if k < 1:
        raise DomainError("angular frames require k >= 1")
    if not 0.0 < c0 < 1.0:
        raise ConfigurationError("spacing constant c0 must lie in (0, 1)")
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if y.shape != (n,):
        raise DomainError("y must be a point in R^%d" % n)
    aperture = 2.0 ** (-k / 2.0) / np.sqrt(japanese_bracket(y))
    if n == 1:
        dirs = np.array([[1.0], [-1.0]])
        return AngularFrame(n=1, k=k, y=y, c0=c0, directions=dirs, aperture=aperture)
    if n != 2:
        raise ConfigurationError("angular frames are implemented for n in {1, 2}")
    delta = c0 * aperture
    count = int(np.ceil(2.0 * np.pi / delta))
    angles = 2.0 * np.pi * np.arange(count) / count
    dirs = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
    return AngularFrame(n=2, k=k, y=y, c0=c0, directions=dirs, aperture=aperture)


# ---------------------------------------------------------------------------
# atoms


@dataclass(frozen=True)
class Atom:
    """Hardy atom on the cube of sidelength q centred at y0.

    Supported in the cube, sup bounded by q^(-n), mean zero by odd symmetry
    in the first coordinate.
    """

    n: int
    y0: np.ndarray
    q: float
    profile: str
    eval: Callable


def _odd_bump(t):
    return bump_inf(2.0 * np.asarray(t, float) - 1.0) - bump_inf(
        2.0 * np.asarray(t, float) + 1.0)


def make_atom(y0, q: float, profile: str = "tensor_haar_smoothed",
              n: int = None) -> Atom:
    if q <= 0:
        raise DomainError("atom sidelength must be positive")
    y0 = np.atleast_1d(np.asarray(y0, dtype=float))
    n = len(y0) if n is None else n
    scale = q ** (-n)

    if profile == "tensor_haar_smoothed":
        def ev(y):
            y = np.asarray(y, dtype=float)
            t = 2.0 * (y - y0) / q  # cube becomes [-1, 1]^n
            out = _odd_bump(t[..., 0])
            for i in range(1, n):
                out = out * bump_inf(t[..., i])
            return scale * out

        return Atom(n=n, y0=y0, q=q, profile=profile, eval=ev)

    if profile == "radial_derivative":
        # d/dy_1 of a radial bump; sup normalized numerically on a fine ray
        h = 1e-5
        tt = np.linspace(-1.0, 1.0, 20001)
        dmax = np.abs(bump_inf(tt + h) - bump_inf(tt - h)).max() / (2 * h)

        def ev_r(y):
            y = np.asarray(y, dtype=float)
            t = 2.0 * (y - y0) / q
            r = np.linalg.norm(t, axis=-1)
            rsafe = np.where(r > 0, r, 1.0)
            db = (bump_inf(rsafe + h) - bump_inf(rsafe - h)) / (2 * h)
            return scale / dmax * db * t[..., 0] / rsafe

        return Atom(n=n, y0=y0, q=q, profile="radial_derivative", eval=ev_r)

    raise ConfigurationError("unknown atom profile %r" % profile)


# ---------------------------------------------------------------------------
# exceptional set


@dataclass
class ExceptionalSet:
    """Union of frame rectangles over a discretized sweep of the cube.

    ``member`` is a vectorized predicate on point arrays; ``volume_estimate``
    is the grid measure of the member set.
    """

    j: int
    y0: np.ndarray
    m_constant: float
    m_margin: float
    frames: List[AngularFrame]
    anchors: List[np.ndarray]
    phi: PhaseFunction
    volume_estimate: float = np.nan

    def member(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        mask = np.zeros(len(pts), dtype=bool)
        half_radial = self.m_constant * 2.0 ** (-self.j) + self.m_margin
        pts_sq = np.sum(pts * pts, axis=1)
        for y, frame in zip(self.anchors, self.frames):
            todo = ~mask
            if not np.any(todo):
                break
            sub = pts[todo]
            dirs = frame.directions
            grads = self.phi.grad_xi(y[None, :], dirs)  # (N, n)
            half_perp = (self.m_constant * 2.0 ** (-self.j / 2.0)
                         * np.sqrt(japanese_bracket(y)) + self.m_margin)
            proj = sub @ dirs.T - np.sum(grads * dirs, axis=1)[None, :]
            dist_sq = (pts_sq[todo, None] - 2.0 * sub @ grads.T
                       + np.sum(grads * grads, axis=1)[None, :])
            perp_sq = np.maximum(dist_sq - proj * proj, 0.0)
            hit = (np.abs(proj) <= half_radial) & (perp_sq <= half_perp**2)
            mask[todo] = hit.any(axis=1)
        return mask if np.ndim(points) > 1 else mask[0]


def build_exceptional_set(phi: PhaseFunction, y0, j: int, m_constant: float,
                          x_grid: Grid = None, c0: float = 0.5,
                          m_min: float = 1.0, x_center=None) -> ExceptionalSet:
    """Exceptional set of the cube Q(y0, 2^-j) for the given phase.

    The continuum union over y in Q is replaced by a finite subgrid with
    spacing 2^-j / 4; the rectangle constant is clamped below by ``m_min``
    and inflated by a Lipschitz margin so that the discretized union still
    contains the singular image of Q.
    """
    y0 = np.atleast_1d(np.asarray(y0, dtype=float))
    n = phi.n
    q = 2.0 ** (-j)
    spacing = q / 4.0
    axis = y0[0] * 0 + np.arange(5) * spacing  # 5 points: spacing q/4 over [0, q]
    offsets = np.meshgrid(*([axis - q / 2.0] * n), indexing="ij")
    anchors = [y0 + np.stack([o.flat[i] for o in offsets])
               for i in range(offsets[0].size)]

    # Lipschitz margin: |grad_xi phi(y) - grad_xi phi(y')| <= L |y - y'|
    probe_dirs = make_angular_frame(max(j, 1), y0, c0, n).directions
    ys = np.stack(anchors)
    mh = phi.mixed_hessian(ys[:, None, :], probe_dirs[None, :, :])
    lip = float(np.abs(mh).sum(axis=-1).max())  # max row sum bounds the norm
    margin = lip * spacing * np.sqrt(n) / 2.0

    m_eff = max(float(m_constant), m_min)
    frames = [make_angular_frame(max(j, 1), y, c0, n) for y in anchors]
    exc = ExceptionalSet(j=j, y0=y0, m_constant=m_eff, m_margin=margin,
                         frames=frames, anchors=anchors, phi=phi)
    if x_grid is not None:
        pts = x_grid.points(center=x_center)
        if len(pts) == 0:
            raise DomainError("empty evaluation grid")
        exc.volume_estimate = float(np.count_nonzero(exc.member(pts))
                                    * x_grid.cell_volume)
    return exc


# ---------------------------------------------------------------------------
# Taylor remainder of the phase around a frame direction


def taylor_remainder_check(phi: PhaseFunction, frame: AngularFrame,
                           n_radial: int = 8, n_angular: int = 24,
                           ceiling: float = 1e6) -> dict:
    """Sampled sups of the linearization remainder on the frame's sectors.

    The remainder r(y, xi) = phi(y, xi) - <grad_xi phi(y, dir), xi> vanishes
    on the ray through each direction; its first xi-derivatives on the sector
    are measured against the predicted sector width.
    """
    k, y = frame.k, frame.y
    bry = japanese_bracket(y)
    width = frame.aperture * 2.0 * frame.c0  # angular support radius of chi
    radii = np.geomspace(2.0 ** (k - 1), 2.0 ** (k + 1), n_radial)
    rel = np.linspace(-1.0, 1.0, n_angular) * width
    sup_r = 0.0
    sup_dr = 0.0
    sup_on_ray = 0.0
    nus = range(frame.count) if frame.count <= 16 else range(0, frame.count,
                                                             frame.count // 16)
    for nu in nus:
        d = frame.directions[nu]
        if frame.n == 2:
            base = np.arctan2(d[1], d[0])
            ang = base + rel
            units = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
        else:
            units = d[None, :]
        xis = radii[:, None, None] * units[None, :, :]
        g0 = phi.grad_xi(y, d)
        r_val = phi.eval(y[None, None, :], xis) - np.sum(g0 * xis, axis=-1)
        sup_r = max(sup_r, float(np.abs(r_val).max()))
        dr = phi.grad_xi(y[None, None, :], xis) - g0
        sup_dr = max(sup_dr, float(
            (np.abs(dr).max(axis=-1) / (2.0 ** (-k / 2.0) * np.sqrt(bry))).max()))
        on_ray = phi.eval(y, 2.0**k * d) - np.sum(g0 * (2.0**k * d))
        sup_on_ray = max(sup_on_ray, abs(float(on_ray)))
    return {
        "k": k,
        "sup_remainder": sup_r,
        "sup_grad_normalized": sup_dr,
        "sup_on_ray": sup_on_ray,
        "pass": bool(sup_r <= ceiling and sup_dr <= ceiling),
    }
