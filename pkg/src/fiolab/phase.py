"""Global phase functions: evaluation, closed-form derivatives, certification.

A phase is positively homogeneous of degree 1 in the frequency variable and
carries closed-form gradient/Hessian maps.  Certification samples a box in y
and dyadic shells in xi and records measured nondegeneracy, equivalence
ratios and derivative bound constants; nothing is proven symbolically.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .util import ConfigurationError, DomainError, japanese_bracket


@dataclass(frozen=True)
class PhaseFunction:
    """Evaluator bundle for a phase phi(y, xi), degree-1 homogeneous in xi.

    All maps broadcast over leading axes; points live along the last axis.
    ``mixed_hessian`` returns matrices with entries d^2 phi / dy_i dxi_j.

    ``point_map``/``radial_part`` expose the structure
    phi(y, xi) = <point_map(y), xi> + radial_part(xi) used by the quadrature
    engine to factor oscillatory sums; ``radial_part`` may be None.
    """

    n: int
    id: str
    eval: Callable
    grad_xi: Callable
    grad_y: Callable
    mixed_hessian: Callable
    hessian_xi: Callable
    point_map: Callable = None
    radial_part: Callable = None
    point_map_identity: bool = False


@dataclass
class PhaseCertificate:
    """Measured constants for the phase hypotheses on a finite sample set."""

    phase_id: str
    flavor: str
    nondegeneracy_min: float
    equivalence_ratios: dict
    bound_constants: dict
    sample_spec: str
    threshold: float
    ceiling: float

    @property
    def passed(self) -> bool:
        consts_ok = all(
            np.isfinite(v) and v <= self.ceiling
            for v in self.bound_constants.values()
        )
        ratios_ok = all(
            np.isfinite(v) and v > 0 for v in self.equivalence_ratios.values()
        )
        return self.nondegeneracy_min >= self.threshold and consts_ok and ratios_ok

    def summary(self) -> dict:
        return {
            "phase": self.phase_id,
            "flavor": self.flavor,
            "nondegeneracy_min": self.nondegeneracy_min,
            "equivalence_ratios": dict(self.equivalence_ratios),
            "bound_constants": {
                "dy%d_dxi%d" % key: val for key, val in self.bound_constants.items()
            },
            "pass": bool(self.passed),
            "samples": self.sample_spec,
        }


@dataclass
class PhaseSamples:
    """Sampled (y, xi) set: y in a box, xi on dyadic shells |xi| >= 8.

    The xi samples start at |xi| = 8, matching the low-frequency cutoff of
    every amplitude in the laboratory.
    """

    n: int
    y_max: float = 32.0
    y_points: int = 9
    k_min: int = 3
    k_max: int = 8
    radial_per_shell: int = 4
    angular_points: int = 16

    def __post_init__(self):
        if self.k_min < 3:
            raise DomainError("xi samples must stay on |xi| >= 8 (k_min >= 3)")

    def y_samples(self) -> np.ndarray:
        axis = np.linspace(-self.y_max, self.y_max, self.y_points)
        grids = np.meshgrid(*([axis] * self.n), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)

    def xi_samples(self) -> np.ndarray:
        radii = []
        for k in range(self.k_min, self.k_max + 1):
            radii.extend(np.geomspace(2.0**k, 2.0 ** (k + 1), self.radial_per_shell,
                                      endpoint=False))
        radii = np.asarray(radii)
        if self.n == 1:
            return np.concatenate([radii, -radii])[:, None]
        if self.n == 2:
            ang = np.linspace(0.0, 2.0 * np.pi, self.angular_points, endpoint=False)
            r, a = np.meshgrid(radii, ang, indexing="ij")
            return np.stack([(r * np.cos(a)).ravel(), (r * np.sin(a)).ravel()], axis=-1)
        # n == 3: latitude/longitude product, poles excluded
        na = self.angular_points
        theta = np.linspace(0.1, np.pi - 0.1, max(na // 2, 3))
        lam = np.linspace(0.0, 2.0 * np.pi, na, endpoint=False)
        r, t, l = np.meshgrid(radii, theta, lam, indexing="ij")
        return np.stack(
            [
                (r * np.sin(t) * np.cos(l)).ravel(),
                (r * np.sin(t) * np.sin(l)).ravel(),
                (r * np.cos(t)).ravel(),
            ],
            axis=-1,
        )

    def pairs(self, max_pairs: int = 4096, seed: int = 0):
        """A reproducible subsample of the (y, xi) product set."""
        ys = self.y_samples()
        xis = self.xi_samples()
        total = len(ys) * len(xis)
        rng = np.random.default_rng(seed)
        if total <= max_pairs:
            idx = np.arange(total)
        else:
            idx = rng.choice(total, size=max_pairs, replace=False)
            idx.sort()
        iy, ix = np.unravel_index(idx, (len(ys), len(xis)))
        return ys[iy], xis[ix]

    def describe(self) -> str:
        return (
            "y-box |y_i|<=%g (%d^%d pts), xi shells 2^%d..2^%d "
            "(%d radii x %d angles)"
            % (
                self.y_max,
                self.y_points,
                self.n,
                self.k_min,
                self.k_max + 1,
                (self.k_max - self.k_min + 1) * self.radial_per_shell,
                self.angular_points,
            )
        )


def _linear_phase(n: int) -> PhaseFunction:
    eye = np.eye(n)

    def ev(y, xi):
        return np.sum(np.asarray(y, float) * np.asarray(xi, float), axis=-1)

    def gxi(y, xi):
        return np.broadcast_arrays(np.asarray(y, float), np.asarray(xi, float))[0].copy()

    def gy(y, xi):
        return np.broadcast_arrays(np.asarray(y, float), np.asarray(xi, float))[1].copy()

    def mh(y, xi):
        shape = np.broadcast_shapes(np.shape(y)[:-1], np.shape(xi)[:-1])
        return np.broadcast_to(eye, shape + (n, n)).copy()

    def hxx(y, xi):
        shape = np.broadcast_shapes(np.shape(y)[:-1], np.shape(xi)[:-1])
        return np.zeros(shape + (n, n))

    return PhaseFunction(
        n=n, id="linear", eval=ev, grad_xi=gxi, grad_y=gy,
        mixed_hessian=mh, hessian_xi=hxx,
        point_map=lambda y: np.asarray(y, float), radial_part=None,
        point_map_identity=True,
    )


def _shifted_wave_phase(n: int) -> PhaseFunction:
    eye = np.eye(n)

    def ev(y, xi):
        xi = np.asarray(xi, float)
        return np.sum(np.asarray(y, float) * xi, axis=-1) + np.linalg.norm(xi, axis=-1)

    def gxi(y, xi):
        xi = np.asarray(xi, float)
        r = np.linalg.norm(xi, axis=-1, keepdims=True)
        out = xi / r + np.asarray(y, float)
        return np.broadcast_arrays(out, xi)[0].copy()

    def gy(y, xi):
        return np.broadcast_arrays(np.asarray(y, float), np.asarray(xi, float))[1].copy()

    def mh(y, xi):
        shape = np.broadcast_shapes(np.shape(y)[:-1], np.shape(xi)[:-1])
        return np.broadcast_to(eye, shape + (n, n)).copy()

    def hxx(y, xi):
        xi = np.asarray(xi, float)
        r = np.linalg.norm(xi, axis=-1, keepdims=True)
        u = xi / r
        proj = eye - u[..., :, None] * u[..., None, :]
        out = proj / r[..., None]
        shape = np.broadcast_shapes(np.shape(y)[:-1], np.shape(xi)[:-1])
        return np.broadcast_to(out, shape + (n, n)).copy()

    return PhaseFunction(
        n=n, id="shifted_wave", eval=ev, grad_xi=gxi, grad_y=gy,
        mixed_hessian=mh, hessian_xi=hxx,
        point_map=lambda y: np.asarray(y, float),
        radial_part=lambda xi: np.linalg.norm(np.asarray(xi, float), axis=-1),
        point_map_identity=True,
    )


def _diffeo_map(y):
    """psi(y) = y + (1/2) tanh of the cyclically shifted coordinates.

    Globally bi-Lipschitz; the Jacobian is I plus a cyclic matrix with
    entries of modulus <= 1/2, so det >= 1 - 2^(-n) >= 1/2.
    """
    y = np.asarray(y, float)
    return y + 0.5 * np.tanh(np.roll(y, -1, axis=-1))


def _diffeo_jacobian(y):
    """J[i, j] = d psi_i / d y_j."""
    y = np.asarray(y, float)
    n = y.shape[-1]
    sech2 = 1.0 / np.cosh(np.roll(y, -1, axis=-1)) ** 2
    jac = np.broadcast_to(np.eye(n), y.shape[:-1] + (n, n)).copy()
    for i in range(n):
        jac[..., i, (i + 1) % n] += 0.5 * sech2[..., i]
    return jac


def _diffeo_phase(n: int) -> PhaseFunction:
    def ev(y, xi):
        return np.sum(_diffeo_map(y) * np.asarray(xi, float), axis=-1)

    def gxi(y, xi):
        return np.broadcast_arrays(_diffeo_map(y), np.asarray(xi, float))[0].copy()

    def gy(y, xi):
        jac = _diffeo_jacobian(y)
        xi = np.asarray(xi, float)
        out = np.einsum("...ij,...i->...j", jac, np.broadcast_arrays(
            xi, _diffeo_map(y))[0])
        return out

    def mh(y, xi):
        # entries [i, j] = d^2 phi / d y_i d xi_j = d psi_j / d y_i
        jac = _diffeo_jacobian(y)
        shape = np.broadcast_shapes(np.shape(y)[:-1], np.shape(xi)[:-1])
        return np.broadcast_to(np.swapaxes(jac, -1, -2), shape + (n, n)).copy()

    def hxx(y, xi):
        shape = np.broadcast_shapes(np.shape(y)[:-1], np.shape(xi)[:-1])
        return np.zeros(shape + (n, n))

    return PhaseFunction(
        n=n, id="diffeo", eval=ev, grad_xi=gxi, grad_y=gy,
        mixed_hessian=mh, hessian_xi=hxx,
        point_map=_diffeo_map, radial_part=None,
    )


_BUILTIN_PHASES = {
    "linear": _linear_phase,
    "shifted_wave": _shifted_wave_phase,
    "diffeo": _diffeo_phase,
}


def make_builtin_phase(phase_id: str, n: int) -> PhaseFunction:
    if phase_id not in _BUILTIN_PHASES:
        raise ConfigurationError(
            "unknown phase %r; built-ins: %s"
            % (phase_id, ", ".join(sorted(_BUILTIN_PHASES)))
        )
    if n < 1:
        raise ConfigurationError("dimension must be >= 1")
    return _BUILTIN_PHASES[phase_id](n)


def check_homogeneity(phi: PhaseFunction, samples: PhaseSamples,
                      tau_list=(0.5, 2.0, 10.0)) -> float:
    """Max relative defect of phi(y, tau xi) = tau phi(y, xi) over samples."""
    ys, xis = samples.pairs()
    base = phi.eval(ys, xis)
    worst = 0.0
    for tau in tau_list:
        if tau <= 0:
            raise DomainError("homogeneity is tested for tau > 0 only")
        err = np.abs(phi.eval(ys, tau * xis) - tau * base) / (np.abs(tau * base) + 1.0)
        worst = max(worst, float(err.max()))
    return worst


def _fd_step(points: np.ndarray, base: float) -> np.ndarray:
    return base * np.maximum(1.0, np.linalg.norm(points, axis=-1, keepdims=True))


def gradient_fd_error(phi: PhaseFunction, samples: PhaseSamples, h_base=1e-4):
    """Max abs defect of closed-form gradients vs central differences."""
    ys, xis = samples.pairs(max_pairs=512)
    n = phi.n
    hy = _fd_step(ys, h_base)
    hxi = _fd_step(xis, h_base)
    worst_y = 0.0
    worst_xi = 0.0
    for a in range(n):
        e = np.zeros(n)
        e[a] = 1.0
        fd = (phi.eval(ys + hy * e, xis) - phi.eval(ys - hy * e, xis)) / (2 * hy[..., 0])
        worst_y = max(worst_y, float(np.abs(fd - phi.grad_y(ys, xis)[..., a]).max()))
        fd = (phi.eval(ys, xis + hxi * e) - phi.eval(ys, xis - hxi * e)) / (2 * hxi[..., 0])
        worst_xi = max(worst_xi, float(np.abs(fd - phi.grad_xi(ys, xis)[..., a]).max()))
    return worst_y, worst_xi


def _second_derivatives(phi, ys, xis, h_base=1e-4):
    """Tensors of all order-2 derivatives at the samples, keyed by (i, j)."""
    n = phi.n
    hy = _fd_step(ys, h_base)
    d_yy = np.empty(ys.shape[:-1] + (n, n))
    for a in range(n):
        e = np.zeros(n)
        e[a] = 1.0
        d_yy[..., a, :] = (
            phi.grad_y(ys + hy * e, xis) - phi.grad_y(ys - hy * e, xis)
        ) / (2 * hy)
    return {
        (2, 0): d_yy,
        (1, 1): phi.mixed_hessian(ys, xis),
        (0, 2): phi.hessian_xi(ys, xis),
    }


def _third_derivatives(phi, ys, xis, h_base=1e-3):
    """Order-3 derivatives by central differences of the closed-form maps."""
    n = phi.n
    hy = _fd_step(ys, h_base)
    hxi = _fd_step(xis, h_base)
    out = {}
    shp = np.broadcast_shapes(ys.shape[:-1], xis.shape[:-1])

    d21 = np.empty(shp + (n, n, n))
    d12 = np.empty(shp + (n, n, n))
    d03 = np.empty(shp + (n, n, n))
    for a in range(n):
        e = np.zeros(n)
        e[a] = 1.0
        d21[..., a, :, :] = (
            phi.mixed_hessian(ys + hy * e, xis) - phi.mixed_hessian(ys - hy * e, xis)
        ) / (2 * hy[..., None])
        d12[..., a, :, :] = (
            phi.mixed_hessian(ys, xis + hxi * e) - phi.mixed_hessian(ys, xis - hxi * e)
        ) / (2 * hxi[..., None])
        d03[..., a, :, :] = (
            phi.hessian_xi(ys, xis + hxi * e) - phi.hessian_xi(ys, xis - hxi * e)
        ) / (2 * hxi[..., None])
    out[(2, 1)] = d21
    out[(1, 2)] = d12
    out[(0, 3)] = d03

    d30 = np.empty(shp + (n, n, n))
    for a in range(n):
        for b in range(a, n):
            ea = np.zeros(n)
            ea[a] = 1.0
            eb = np.zeros(n)
            eb[b] = 1.0
            g = (
                phi.grad_y(ys + hy * ea + hy * eb, xis)
                - phi.grad_y(ys + hy * ea - hy * eb, xis)
                - phi.grad_y(ys - hy * ea + hy * eb, xis)
                + phi.grad_y(ys - hy * ea - hy * eb, xis)
            ) / (4 * hy * hy)
            d30[..., a, b, :] = g
            d30[..., b, a, :] = g
    out[(3, 0)] = d30
    return out


def certify_phase(phi: PhaseFunction, flavor: str, samples: PhaseSamples,
                  threshold: float = 0.25, ceiling: float = 1e6,
                  max_pairs: int = 1500) -> PhaseCertificate:
    """Sample-based certificate for hypothesis flavor I, II or III.

    Tests derivatives up to total order 3 of the phase, the mixed-Hessian
    nondegeneracy and the <grad phi> equivalence ratios; each measured sup is
    stored after dividing out the declared growth factor of the flavor.
    """
    if flavor not in ("I", "II", "III"):
        raise ConfigurationError("flavor must be I, II or III")
    ys, xis = samples.pairs(max_pairs=max_pairs)
    if np.any(np.linalg.norm(xis, axis=-1) < 1e-12):
        raise DomainError("sample set touches xi = 0")

    dets = np.abs(np.linalg.det(phi.mixed_hessian(ys, xis)))
    bry = japanese_bracket(ys)
    brxi = japanese_bracket(xis)
    rg = japanese_bracket(phi.grad_xi(ys, xis)) / bry
    rd = japanese_bracket(phi.grad_y(ys, xis)) / brxi
    ratios = {
        "grad_xi_over_y_min": float(rg.min()),
        "grad_xi_over_y_max": float(rg.max()),
        "grad_y_over_xi_min": float(rd.min()),
        "grad_y_over_xi_max": float(rd.max()),
    }

    d2 = _second_derivatives(phi, ys, xis)
    d3 = _third_derivatives(phi, ys, xis)
    tensors = dict(d2)
    tensors.update(d3)
    xin = np.linalg.norm(xis, axis=-1)

    constants = {}
    # eq:phf family: pure-y derivatives bounded by <y>^(1-|alpha|) |xi|
    gy = np.abs(phi.grad_y(ys, xis)).max(axis=-1)
    constants[(1, 0)] = float((gy / xin).max())
    for order in (2, 3):
        t = tensors[(order, 0)]
        sup = np.abs(t.reshape(t.shape[: xin.ndim] + (-1,))).max(axis=-1)
        constants[(order, 0)] = float((sup / (bry ** (1 - order) * xin)).max())

    def record(key, divisor):
        t = tensors[key]
        sup = np.abs(t.reshape(t.shape[: xin.ndim] + (-1,))).max(axis=-1)
        constants[key] = float((sup / divisor).max())

    if flavor == "I":
        for key in ((1, 1), (0, 2), (2, 1), (1, 2), (0, 3)):
            record(key, 1.0)
    elif flavor == "II":
        for key in ((1, 1), (2, 1), (1, 2)):
            record(key, 1.0)
    else:  # III: xi-derivatives may grow like <y>^(1-|alpha|)
        record((0, 2), bry)
        record((0, 3), bry)
        record((1, 1), 1.0)
        record((2, 1), bry ** (-1))
        record((1, 2), 1.0)

    return PhaseCertificate(
        phase_id=phi.id,
        flavor=flavor,
        nondegeneracy_min=float(dets.min()),
        equivalence_ratios=ratios,
        bound_constants=constants,
        sample_spec=samples.describe(),
        threshold=threshold,
        ceiling=ceiling,
    )


def lemma_M_constant(phi: PhaseFunction, samples: PhaseSamples,
                     max_pairs: int = 1500) -> float:
    """Sampled sup of <y>^-1 <xi>^(|a|-1) |d^a_xi phi| over |a| in {2, 3}.

    This constant sizes the rectangles of the exceptional set; callers clamp
    it away from zero for flat phases.
    """
    ys, xis = samples.pairs(max_pairs=max_pairs)
    bry = japanese_bracket(ys)
    brxi = japanese_bracket(xis)
    h2 = np.abs(phi.hessian_xi(ys, xis)).max(axis=(-1, -2))
    best = (h2 * brxi / bry).max()

    hxi = _fd_step(xis, 1e-3)
    n = phi.n
    for a in range(n):
        e = np.zeros(n)
        e[a] = 1.0
        t3 = (
            phi.hessian_xi(ys, xis + hxi * e) - phi.hessian_xi(ys, xis - hxi * e)
        ) / (2 * hxi[..., None])
        sup3 = np.abs(t3).max(axis=(-1, -2))
        best = max(best, (sup3 * brxi**2 / bry).max())
    return float(best)
