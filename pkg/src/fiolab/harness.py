"""Verification experiments: measured kernel integrals, operator norms and
symbol constants against the predicted decay rates, with slope-fit verdicts.

Each experiment maps a validated config dict to an ExperimentReport.  Sample
evaluations are independent engine calls; they may run on a thread pool, and
the report assembly is single-threaded in a fixed order so a run's JSON is
byte-identical for any worker count.
"""

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import engine
from .amplitude import make_builtin_amplitude, wavefront_equivalence_constants
from .decomp import build_exceptional_set, make_angular_frame, make_atom, \
    make_radial_cutoffs
from .engine import apply_A, apply_T, grad_xi_bound, grid_fourier_at, \
    kernel_F, kernel_field, plan_quadrature, rescaled_operator_symbols, \
    unit_annulus_cutoff
from .fields import Field, Grid, field_from_function, lp_norm, tail_mass
from .phase import PhaseSamples, certify_phase, lemma_M_constant, \
    make_builtin_phase
from .profiles import bump_inf, dyadic_bump, low_frequency_cutoff
from .util import DomainError, QuadratureRefusal, japanese_bracket, loglog_fit


# ---------------------------------------------------------------------------
# reports


@dataclass
class ExperimentReport:
    experiment: str
    params: dict
    samples: list
    fit: Optional[dict]
    verdict: str
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> str:
        obj = {
            "experiment": self.experiment,
            "params": self.params,
            "samples": self.samples,
            "fit": self.fit,
            "verdict": self.verdict,
            "diagnostics": self.diagnostics,
        }
        return json.dumps(obj, sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["x", "y"])
        for x, y in self.samples:
            writer.writerow([x, y])
        return buf.getvalue()

    def write(self, out_dir) -> tuple:
        import os

        os.makedirs(out_dir, exist_ok=True)
        jpath = os.path.join(out_dir, "%s.json" % self.experiment)
        cpath = os.path.join(out_dir, "%s.csv" % self.experiment)
        with open(jpath, "w") as fh:
            fh.write(self.to_json())
        with open(cpath, "w") as fh:
            fh.write(self.to_csv())
        return jpath, cpath


def _fit(xs, ys):
    slope, intercept, r2 = loglog_fit(xs, ys)
    return {"slope": slope, "intercept": intercept, "r2": r2}


def _p(config, key, default):
    return config.get(key, default)


def _echo(config):
    """Config echo for reports; the worker count may not change any output."""
    return {k: v for k, v in config.items() if k != "workers"}


def _map_samples(fn, items, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=int(workers)) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _y0_vec(value, n=2):
    v = np.zeros(n)
    v[0] = float(value)
    return v


def _phase_of(config, default="shifted_wave"):
    n = int(_p(config, "n", 2))
    return make_builtin_phase(_p(config, "phase", default), n)


def _kernel_amp(config, m1, m2, mu, low=8.0):
    n = int(_p(config, "n", 2))
    orders = (float(_p(config, "orders.m1", m1)),
              float(_p(config, "orders.m2", m2)),
              float(_p(config, "orders.mu", mu)))
    return make_builtin_amplitude(
        _p(config, "amplitude", "sg_power"), n, orders,
        flavor=_p(config, "flavor", "I"),
        low_cutoff=float(_p(config, "amplitude.low_cutoff", low)))


def loss_threshold(p: float, n: int) -> float:
    """mu_p = -(n - 1)|1/p - 1/2|, the sharp frequency-decay order."""
    return -(n - 1) * abs(1.0 / p - 0.5)


def weight_threshold(p: float, n: int) -> float:
    """m_p = -n|1/p - 1/2| for the kernel-form weight order."""
    return -n * abs(1.0 / p - 0.5)


# ---------------------------------------------------------------------------
# kernel decay off the exceptional set


def exp_kernel_decay_off_NQ(config) -> ExperimentReport:
    phi = _phase_of(config)
    amp = _kernel_amp(config, -0.5, 0.0, -0.5)
    j = int(_p(config, "decomp.j", 2))
    k_lo = int(_p(config, "quad.k_min", j + 1))
    k_hi = int(_p(config, "quad.k_max", j + 5))
    c0 = float(_p(config, "decomp.c0", 0.5))
    oversample = float(_p(config, "quad.oversample", 1.5))
    extent = float(_p(config, "grid.extent", 5.0))
    points = int(_p(config, "grid.points", 160))
    y0 = _y0_vec(_p(config, "atoms.y0", 0.0), phi.n)
    workers = int(_p(config, "workers", 1))

    if np.count_nonzero([amp.eval(y0, y0, np.full(phi.n, 16.0))]) == 0:
        return ExperimentReport(
            "kernel_decay_off_NQ", _echo(config), [], None, "fail",
            {"error": "degenerate amplitude: kernel vanishes identically"})

    m_const = _p(config, "decomp.m_override", None)
    if m_const is None:
        m_const = lemma_M_constant(phi, PhaseSamples(phi.n))
    grid = Grid(phi.n, extent, points)
    exc = build_exceptional_set(phi, y0, j, m_const, c0=c0)
    pts = grid.points(center=y0)
    off_mask = ~exc.member(pts)
    cutoffs = make_radial_cutoffs(max(k_hi, 4) + 2)

    ks = list(range(k_lo, k_hi + 1))
    x_max = float(np.linalg.norm(pts, axis=-1).max()) + grad_xi_bound(
        phi, y0[None, :])
    diagnostics = {
        "M": float(m_const),
        "margin": float(exc.m_margin),
        "off_fraction": float(off_mask.mean()),
    }

    def one(k):
        quad = plan_quadrature(x_max, shell_k=k, oversample=oversample)
        fld = kernel_field(amp, phi, grid, y0, y0, quad,
                           variant="dyadic", k=k, cutoffs=cutoffs)
        absval = np.abs(fld.values).ravel()
        integral = float(np.sum(absval[off_mask]) * grid.cell_volume)
        edge = float(tail_mass(Field(grid, fld.values, y0), 0.85))
        return integral, edge

    results = _map_samples(one, ks, workers)
    samples, skipped = [], []
    for k, (integral, edge) in zip(ks, results):
        if integral <= 0:
            skipped.append(k)
            continue
        samples.append([k, float(np.log2(integral))])
        diagnostics["edge_mass_k%d" % k] = edge
    if skipped:
        diagnostics["skipped_k"] = skipped
    fit = _fit([s[0] for s in samples], [s[1] for s in samples]) \
        if len(samples) >= 3 else None
    ok = fit is not None and fit["slope"] <= -0.8 and fit["r2"] >= 0.9
    return ExperimentReport("kernel_decay_off_NQ", _echo(config), samples,
                            fit, "pass" if ok else "fail", diagnostics)


# ---------------------------------------------------------------------------
# kernel Lipschitz continuity in the atom variable


def exp_kernel_lipschitz(config) -> ExperimentReport:
    phi = _phase_of(config)
    amp = _kernel_amp(config, -0.5, 0.0, -0.5,
                      low=float(_p(config, "amplitude.low_cutoff", 0.125)))
    j = int(_p(config, "decomp.j", 6))
    k_lo = int(_p(config, "quad.k_min", 1))
    k_hi = int(_p(config, "quad.k_max", j))
    oversample = float(_p(config, "quad.oversample", 1.5))
    extent = float(_p(config, "grid.extent", 5.0))
    points = int(_p(config, "grid.points", 128))
    y0 = _y0_vec(_p(config, "atoms.y0", 0.0), phi.n)
    workers = int(_p(config, "workers", 1))

    half = 0.5 ** (j + 1)
    y_a = y0 + _y0_vec(half, phi.n)
    y_b = y0 - _y0_vec(half, phi.n)
    grid = Grid(phi.n, extent, points)
    cutoffs = make_radial_cutoffs(max(k_hi, 4) + 2)
    pts = grid.points(center=y0)
    x_max = float(np.linalg.norm(pts, axis=-1).max()) + grad_xi_bound(
        phi, np.stack([y_a, y_b]))

    def one(k):
        quad = plan_quadrature(x_max, shell_k=k, oversample=oversample)
        fld = kernel_field(amp, phi, grid, y0, y_a, quad,
                           variant="dyadic", k=k, cutoffs=cutoffs, y2=y_b)
        return float(np.sum(np.abs(fld.values)) * grid.cell_volume)

    ks = list(range(k_lo, k_hi + 1))
    vals = _map_samples(one, ks, workers)
    samples = [[k, float(np.log2(v))] for k, v in zip(ks, vals) if v > 0]
    fit = _fit([s[0] for s in samples], [s[1] for s in samples]) \
        if len(samples) >= 3 else None
    ok = fit is not None and fit["slope"] >= 0.8 and fit["r2"] >= 0.9
    return ExperimentReport(
        "kernel_lipschitz", _echo(config), samples, fit,
        "pass" if ok else "fail",
        {"separation": 2.0 * half, "j": j})


# ---------------------------------------------------------------------------
# uniform L1 bounds over Hardy atoms


def exp_h1_uniformity(config) -> ExperimentReport:
    phi = _phase_of(config)
    n = phi.n
    amp = _kernel_amp(config, -1.0, 0.0, -0.5,
                      low=float(_p(config, "amplitude.low_cutoff", 0.25)))
    q_list = _p(config, "atoms.q_list", [0.25, 1.0, 4.0])
    y0_list = _p(config, "atoms.y0_list", [0.0, 4.0, 16.0])
    profile = _p(config, "atoms.profile", "tensor_haar_smoothed")
    oversample = float(_p(config, "quad.oversample", 1.5))
    r_max = 2.0 ** (int(_p(config, "quad.k_max", 5)) + 2)
    extent = float(_p(config, "grid.extent", 8.0))
    points = int(_p(config, "grid.points", 128))
    workers = int(_p(config, "workers", 1))

    out_grid = Grid(n, extent, points)
    cases = [(q, d) for q in q_list for d in y0_list]

    def one(case):
        q, d = case
        y0 = _y0_vec(d, n)
        atom = make_atom(y0, q, profile=profile, n=n)
        # the atom's spectrum dies superpolynomially beyond ~ 50 / q, so the
        # frequency range shrinks with growing q at negligible truncation cost
        r_max_case = min(r_max, max(32.0, 64.0 / q))
        in_extent = 0.62 * q
        in_points = max(64, int(np.ceil(
            1.1 * 2 * in_extent * r_max_case / np.pi / 32)) * 32)
        in_grid = Grid(n, in_extent, in_points)
        u = field_from_function(in_grid, atom.eval, center=y0)
        x_max = (float(np.linalg.norm(
            np.abs(y0) + extent * np.ones(n)))
            + grad_xi_bound(phi, y0[None, :]) + in_extent)
        quad = plan_quadrature(x_max, r_min=amp.low_cutoff,
                               r_max=r_max_case, oversample=oversample)
        out = apply_T(amp, phi, u, quad, out_grid=out_grid, out_center=y0)
        return lp_norm(out, 1.0), float(tail_mass(out, 0.85))

    results = _map_samples(one, cases, workers)
    samples = []
    diagnostics = {}
    for (q, d), (norm, edge) in zip(cases, results):
        samples.append([[q, d], float(np.log2(norm)) if norm > 0
                        else float("-inf")])
        diagnostics["edge_mass_q%g_d%g" % (q, d)] = edge
    norms = [2.0 ** s[1] for s in samples]
    ratio = max(norms) / min(norms) if min(norms) > 0 else float("inf")
    diagnostics["max_over_min"] = float(ratio)
    # the target bound is one sided (sup over atoms <= C); the measured
    # norms carry the honest <y0>^(m) weight decay of far atoms, so the
    # comparability window applies to the q sweep at each fixed position
    worst = 0.0
    for d in y0_list:
        vals = [2.0 ** s[1] for s in samples if s[0][1] == d]
        if min(vals) <= 0 or not np.isfinite(max(vals)):
            worst = float("inf")
            break
        worst = max(worst, max(vals) / min(vals))
    diagnostics["max_ratio"] = float(worst)
    ok = np.isfinite(worst) and worst <= 5.0
    return ExperimentReport("h1_uniformity", _echo(config), samples, None,
                            "pass" if ok else "fail", diagnostics)


# ---------------------------------------------------------------------------
# boundedness of the large-atom reduction integral


def exp_large_atom_bound(config) -> ExperimentReport:
    phi = _phase_of(config)
    n = phi.n
    amp = _kernel_amp(config, -1.0, 0.0, -0.5)
    wf_k = float(_p(config, "wavefront.k", 0.25))
    q_list = _p(config, "atoms.q_list", [1.0, 2.0, 4.0, 8.0])
    y0_list = _p(config, "atoms.y0_list", [0.0, 8.0, 64.0])
    c1, c2 = wavefront_equivalence_constants(amp, phi, wf_k,
                                             seed=int(_p(config, "seed", 0)))

    samples = []
    for q in q_list:
        for d in y0_list:
            y0 = _y0_vec(d, n)
            corners = y0[None, :] + 0.5 * q * np.array(
                [[sx, sy] for sx in (-1, 1) for sy in (-1, 1)][: 2**n])
            br = japanese_bracket(corners)
            lo_center = japanese_bracket(y0)
            r_lo_b, r_hi_b = c1 * min(br.min(), lo_center), c2 * br.max()
            # radial grid sum of <x>^-n over the bracket shell (n = 2)
            lo = np.sqrt(max(r_lo_b**2 - 1.0, 0.0))
            hi = np.sqrt(max(r_hi_b**2 - 1.0, lo * lo))
            rr = np.linspace(lo, hi, 8192)
            integrand = 2.0 * np.pi * rr / (1.0 + rr * rr)
            value = float(np.trapezoid(integrand, rr) / q**n)
            samples.append([[q, d], value])

    bound = np.pi * max((4.0 * c2) ** n, 1.0 + np.log(c2 / c1))
    worst = max(s[1] for s in samples)
    ok = worst <= bound
    return ExperimentReport(
        "large_atom_bound", _echo(config), samples, None,
        "pass" if ok else "fail",
        {"C1": c1, "C2": c2, "bound": float(bound), "max_value": worst})


# ---------------------------------------------------------------------------
# threshold sweep in the frequency-decay order


def _radial_lp(values: np.ndarray, rho: np.ndarray, p: float) -> float:
    """L^p norm of a radial function of the plane from its profile."""
    return float(2.0 * np.pi
                 * np.trapezoid(np.abs(values) ** p * rho, rho)) ** (1.0 / p)


def exp_threshold_sweep(config) -> ExperimentReport:
    """Growth of the operator on unit-norm shell-localized data, per decay
    order.  The phase, symbol and test family are all rotation-invariant, so
    the 2-d integrals reduce exactly to radial ones with a Bessel factor;
    that is the only way the k = 6 spike (width 2^-k) stays resolved.
    """
    from scipy.special import j0

    phi = _phase_of(config)
    n = phi.n
    if n != 2 or phi.radial_part is None or not phi.point_map_identity:
        raise DomainError(
            "the threshold sweep needs n = 2 and a shift-type radial phase")
    p_list = [float(p) for p in _p(config, "thresholds.p_list", [1.0, 2.0])]
    offsets = [float(o) for o in _p(config, "thresholds.mu_offsets",
                                    [-0.5, 0.0, 0.5, 1.0])]
    k_lo = int(_p(config, "quad.k_min", 3))
    k_hi = int(_p(config, "quad.k_max", 6))
    oversample = float(_p(config, "quad.oversample", 1.5))
    rho_max = float(_p(config, "grid.extent", 4.0))
    workers = int(_p(config, "workers", 1))
    low = float(_p(config, "amplitude.low_cutoff", 1.0))

    ks = list(range(k_lo, k_hi + 1))

    def radial_ops(k):
        # frequency nodes over the shell; oscillation rate is rho_max + 1
        r_lo, r_hi = 2.0 ** (k - 2), 2.0 ** (k + 2)
        n_r = max(64, int(np.ceil(
            (r_hi - r_lo) * (rho_max + 2.0) * oversample / np.pi)))
        r = np.linspace(r_lo, r_hi, n_r)
        w = np.full(n_r, r[1] - r[0])
        w[0] *= 0.5
        w[-1] *= 0.5
        g = dyadic_bump(np.ldexp(r, -k))
        rho = np.arange(0.0, rho_max, 2.0 ** (-k) / 8.0)
        bessel = j0(np.outer(rho, r))  # (n_rho, n_r)
        f_profile = 2.0 * np.pi * bessel @ (g * r * w)
        return r, w, g, rho, bessel, f_profile

    tables = {k: radial_ops(k) for k in ks}

    jobs = []
    for p in p_list:
        mu_p = loss_threshold(p, n)
        m_p = loss_threshold(p, n)
        for off in offsets:
            for k in ks:
                jobs.append((p, off, k, m_p, mu_p + off))

    def one(job):
        p, off, k, m, mu = job
        r, w, g, rho, bessel, f_profile = tables[k]
        alpha = _radial_lp(f_profile, rho, p)
        eta = low_frequency_cutoff(r, low, 2.0 * low)
        symbol = eta * (1.0 + r * r) ** (mu / 2.0)
        xi_nodes = np.stack([r, np.zeros_like(r)], axis=-1)
        coeffs = (w * r * symbol * np.exp(1j * phi.radial_part(xi_nodes))
                  * g / alpha)
        profile = (2.0 * np.pi * (bessel @ coeffs)
                   * (1.0 + rho * rho) ** (m / 2.0))
        return _radial_lp(profile, rho, p)

    norms = _map_samples(one, jobs, workers)
    samples = [[[p, off, k], float(np.log2(v))]
               for (p, off, k, _, _), v in zip(jobs, norms)]

    diagnostics = {}
    slopes = {}
    for p in p_list:
        for off in offsets:
            xs = [k for (pp, oo, k, _, _) in jobs if pp == p and oo == off]
            ys = [s[1] for s, (pp, oo, _, _, _) in zip(samples, jobs)
                  if pp == p and oo == off]
            f = _fit(xs, ys)
            slopes[(p, off)] = f["slope"]
            diagnostics["slope_p%g_off%+g" % (p, off)] = f["slope"]
            diagnostics["r2_p%g_off%+g" % (p, off)] = f["r2"]

    ordered = True
    if 1.0 in p_list:
        seq = [slopes[(1.0, off)] for off in sorted(offsets)]
        ordered = all(b > a for a, b in zip(seq, seq[1:]))
    flat_at_l2 = True
    if 2.0 in p_list and 0.0 in offsets:
        flat_at_l2 = slopes[(2.0, 0.0)] <= 0.1
    diagnostics["ordered_p1"] = bool(ordered)
    diagnostics["flat_at_l2"] = bool(flat_at_l2)
    verdict = "exploratory" if (ordered and flat_at_l2) else "fail"
    return ExperimentReport("threshold_sweep", _echo(config), samples, None,
                            verdict, diagnostics)


# ---------------------------------------------------------------------------
# off-diagonal decay of the space-localized pieces


def _x_shell_cutoff(k):
    def psi_k(x):
        r = np.linalg.norm(np.asarray(x, float), axis=-1)
        out = np.zeros_like(r)
        pos = r > 0
        out[pos] = bump_inf(np.log2(np.ldexp(r[pos], -k)), -1.0, 1.0)
        return out

    return psi_k


def exp_offdiagonal_decay(config) -> ExperimentReport:
    phi = _phase_of(config)
    n = phi.n
    p = float(_p(config, "thresholds.p", 2.0))
    k_top = int(_p(config, "quad.x_levels", 3))
    oversample = float(_p(config, "quad.oversample", 1.5))
    workers = int(_p(config, "workers", 1))
    amp = make_builtin_amplitude(
        "sg_power_xi", n,
        (float(_p(config, "orders.m", -0.5)),
         float(_p(config, "orders.mu", -0.5))),
        flavor=_p(config, "flavor", "I"),
        low_cutoff=float(_p(config, "amplitude.low_cutoff", 8.0)))

    xi0 = 12.0

    def data(x):
        x = np.asarray(x, float)
        return (np.exp(1j * xi0 * x[..., 0])
                / japanese_bracket(x)).astype(complex)

    def grid_for(k):
        extent = 1.25 * 2.0 ** (k + 1)
        pts = max(96, int(np.ceil(extent * 15.0 / 16)) * 16)
        return Grid(n, extent, pts)

    levels = list(range(0, k_top + 1))
    pairs = [(k, kp) for k in levels for kp in levels]

    def one(pair):
        k, kp = pair
        g_in = grid_for(kp)
        psi_in = _x_shell_cutoff(kp)
        u = field_from_function(
            g_in, lambda x: data(x) * psi_in(x))
        denom = lp_norm(u, p)
        g_out = grid_for(k)
        x_max = (grad_xi_bound(phi, g_out.points(None)[:: 151])
                 + np.sqrt(n) * g_in.extent)
        quad = plan_quadrature(x_max, r_min=amp.low_cutoff,
                               r_max=2.0 * amp.low_cutoff + 6.0,
                               oversample=oversample)
        out = apply_A(amp, phi, u, quad, out_grid=g_out)
        psi_out = _x_shell_cutoff(k)
        vals = out.values * psi_out(g_out.points(None)).reshape(g_out.shape)
        num = lp_norm(Field(g_out, vals), p)
        return num / denom if denom > 0 else 0.0

    ratios = _map_samples(one, pairs, workers)
    by_delta = {}
    for (k, kp), r in zip(pairs, ratios):
        d = abs(k - kp)
        by_delta[d] = max(by_delta.get(d, 0.0), r)
    samples = [[d, float(np.log2(v)) if v > 0 else float("-inf")]
               for d, v in sorted(by_delta.items())]
    tail = [v for d, v in sorted(by_delta.items()) if d >= 2]
    monotone = all(b < a for a, b in zip(tail, tail[1:]))
    return ExperimentReport(
        "offdiagonal_decay", _echo(config), samples, None,
        "exploratory" if monotone else "fail",
        {"pairs": len(pairs), "monotone_tail": bool(monotone)})


# ---------------------------------------------------------------------------
# Schwartz decay of the wave-front-complement kernel


def exp_schwartz_tail(config) -> ExperimentReport:
    phi = _phase_of(config)
    n = phi.n
    amp = _kernel_amp(config, -0.5, 0.0, -0.5)
    wf_k = float(_p(config, "wavefront.k", 0.25))
    oversample = float(_p(config, "quad.oversample", 1.5))
    t_lo = float(_p(config, "rays.t_min", 4.0))
    t_hi = float(_p(config, "rays.t_max", 48.0))
    n_t = int(_p(config, "rays.points", 10))
    k_top = int(_p(config, "quad.k_max", 4))
    r_max = 2.0 ** (k_top + 2)
    workers = int(_p(config, "workers", 1))
    y = _y0_vec(_p(config, "atoms.y0", 0.0), n)

    rays = [np.array([1.0, 0.0]), np.array([1.0, 1.0]) / np.sqrt(2.0)]
    ts = np.geomspace(t_lo, t_hi, n_t)
    jobs = [(ri, t) for ri in range(len(rays)) for t in ts]
    g_bound = grad_xi_bound(phi, y[None, :])

    def one(job):
        ri, t = job
        x = t * rays[ri]
        quad = plan_quadrature(t + g_bound + 1.0, r_min=amp.low_cutoff,
                               r_max=r_max, oversample=oversample)
        return abs(kernel_F(amp, phi, x, y, quad, variant="far", k=k_top,
                            wavefront_k=wf_k))

    vals = _map_samples(one, jobs, workers)
    floor = 1e-14
    samples = []
    per_ray = {0: ([], []), 1: ([], [])}
    for (ri, t), v in zip(jobs, vals):
        logx = float(np.log2(np.sqrt(1.0 + t * t)))
        logy = float(np.log2(max(v, floor)))
        samples.append([logx, logy])
        if v >= floor:
            per_ray[ri][0].append(logx)
            per_ray[ri][1].append(logy)

    diagnostics = {"floor": floor}
    fits = []
    for ri, (xs, ys) in per_ray.items():
        if len(xs) >= 3:
            f = _fit(xs, ys)
            fits.append(f)
            diagnostics["slope_ray%d" % ri] = f["slope"]
            diagnostics["r2_ray%d" % ri] = f["r2"]
    ok = len(fits) == 2 and all(
        f["slope"] <= -4.0 and f["r2"] >= 0.9 for f in fits)
    fit = max(fits, key=lambda f: f["slope"]) if fits else None
    return ExperimentReport("schwartz_tail", _echo(config), samples, fit,
                            "pass" if ok else "fail", diagnostics)


# ---------------------------------------------------------------------------
# auxiliary verification runs


def exp_partition_check(config) -> ExperimentReport:
    n = int(_p(config, "n", 2))
    c0 = float(_p(config, "decomp.c0", 0.5))
    cutoffs = make_radial_cutoffs(8)
    s = np.geomspace(0.5, 512.0, 4000)
    total = np.zeros_like(s)
    for k in range(-4, 14):
        total += cutoffs.theta(np.ldexp(s, -k))
    radial_err = float(np.abs(total - 1.0).max())

    angular_err = 0.0
    defect_ok = True
    samples = [["radial", radial_err]]
    for k in range(1, 9):
        worst = 0.0
        for d in (0.0, 4.0, 16.0):
            frame = make_angular_frame(k, _y0_vec(d, n), c0, n)
            ang = np.linspace(0, 2 * np.pi, 720, endpoint=False)
            xi = 2.0 ** k * np.stack([np.cos(ang), np.sin(ang)], axis=-1)
            tot = frame.chi_all(xi).sum(axis=0)
            worst = max(worst, float(np.abs(tot - 1.0).max()))
            defect_ok = defect_ok and frame.covering_defect() < frame.aperture
        samples.append(["angular_k%d" % k, worst])
        angular_err = max(angular_err, worst)
    ok = radial_err <= 1e-10 and angular_err <= 1e-8 and defect_ok
    return ExperimentReport(
        "partition_check", _echo(config), samples, None,
        "pass" if ok else "fail",
        {"radial_err": radial_err, "angular_err": angular_err,
         "covering_ok": bool(defect_ok)})


def exp_phase_certification(config) -> ExperimentReport:
    n = int(_p(config, "n", 2))
    flavor = _p(config, "flavor", "I")
    ids = _p(config, "phase.ids", ["linear", "shifted_wave", "diffeo"])
    samples_spec = PhaseSamples(n)
    samples = []
    diagnostics = {}
    ok = True
    for pid in ids:
        phi = make_builtin_phase(pid, n)
        cert = certify_phase(phi, flavor, samples_spec)
        ys, xis = samples_spec.pairs()
        euler = float(np.abs(
            np.sum(xis * phi.grad_xi(ys, xis), axis=-1) - phi.eval(ys, xis)
        ).max() / (1.0 + np.abs(phi.eval(ys, xis)).max()))
        samples.append([pid, cert.nondegeneracy_min])
        diagnostics["euler_%s" % pid] = euler
        diagnostics["passed_%s" % pid] = bool(cert.passed)
        ok = ok and cert.passed and cert.nondegeneracy_min >= 0.5 \
            and euler <= 1e-10
    return ExperimentReport("phase_certification", _echo(config), samples,
                            None, "pass" if ok else "fail", diagnostics)


def exp_multiplier_oracle(config) -> ExperimentReport:
    n = int(_p(config, "n", 2))
    extent = float(_p(config, "grid.extent", 12.0))
    points = int(_p(config, "grid.points", 128))
    oversample = float(_p(config, "quad.oversample", 2.5))
    mu = float(_p(config, "orders.mu", -0.5))
    low = float(_p(config, "amplitude.low_cutoff", 8.0))
    phi = _phase_of(config, default="linear")
    grid = Grid(n, extent, points)

    xi0 = np.array([10.5, 4.0])[:n]
    sigma = 1.3

    def u_fn(x):
        x = np.asarray(x, float)
        return (np.exp(-np.sum(x * x, axis=-1) / (2 * sigma**2))
                * np.exp(1j * (x @ xi0)))

    u = field_from_function(grid, u_fn)
    nyq = np.pi / grid.spacing

    def multiplier(xi):
        from .profiles import low_frequency_cutoff

        r = np.linalg.norm(np.asarray(xi, float), axis=-1)
        return (low_frequency_cutoff(r, low, 2 * low)
                * japanese_bracket(xi) ** mu)

    # oracle route: discrete transform, multiply on the lattice, invert
    freqs = np.meshgrid(*grid.frequency_axes(), indexing="ij")
    lattice = np.stack(freqs, axis=-1)
    mvals = multiplier(lattice)
    # account for the grid's off-origin first sample in the DFT phases
    oracle = np.fft.ifftn(np.fft.fftn(u.values) * mvals)

    amp_t = make_builtin_amplitude("sg_power", n, (0.0, 0.0, mu),
                                   low_cutoff=low)
    amp_a = make_builtin_amplitude("sg_power_xi", n, (0.0, mu),
                                   low_cutoff=low)
    x_max = 2.0 * np.sqrt(n) * extent
    quad = plan_quadrature(x_max, r_min=low * 0.9,
                           r_max=min(2.1 * low, nyq), oversample=oversample)
    out_t = apply_T(amp_t, phi, u, quad)
    out_a = apply_A(amp_a, phi, u, quad)

    ref = float(np.linalg.norm(oracle))
    err_t = float(np.linalg.norm(out_t.values - oracle)) / ref
    err_a = float(np.linalg.norm(out_a.values - oracle)) / ref
    ok = err_t <= 1e-6 and err_a <= 1e-6
    return ExperimentReport(
        "multiplier_oracle", _echo(config),
        [["apply_T", err_t], ["apply_A", err_a]], None,
        "pass" if ok else "fail",
        {"nyquist": float(nyq), "quad_nodes": quad.node_count})


def exp_sigma_inclusion(config) -> ExperimentReport:
    phi = _phase_of(config)
    n = phi.n
    j_list = [int(j) for j in _p(config, "decomp.j_list", [2, 4])]
    per_j = int(_p(config, "decomp.samples_per_j", 600))
    c0 = float(_p(config, "decomp.c0", 0.5))
    seed = int(_p(config, "seed", 0))
    y0 = _y0_vec(_p(config, "atoms.y0", 0.0), n)
    m_const = lemma_M_constant(phi, PhaseSamples(phi.n))

    rng = np.random.default_rng(seed)
    samples = []
    total, inside = 0, 0
    for j in j_list:
        exc = build_exceptional_set(phi, y0, j, m_const, c0=c0)
        q = 2.0 ** (-j)
        ys = y0 + rng.uniform(-0.5 * q, 0.5 * q, size=(per_j, n))
        ang = rng.uniform(0, 2 * np.pi, per_j)
        dirs = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
        pts = phi.grad_xi(ys, dirs)
        hits = exc.member(pts)
        samples.append([j, int(hits.sum())])
        total += per_j
        inside += int(hits.sum())
    ok = inside == total and total >= 1000
    return ExperimentReport(
        "sigma_inclusion", _echo(config), samples, None,
        "pass" if ok else "fail",
        {"total": total, "inside": inside, "M": float(m_const)})


def exp_nq_measure(config) -> ExperimentReport:
    phi = _phase_of(config)
    n = phi.n
    j_lo = int(_p(config, "decomp.j_min", 2))
    j_hi = int(_p(config, "decomp.j_max", 6))
    c0 = float(_p(config, "decomp.c0", 0.5))
    y0 = _y0_vec(_p(config, "atoms.y0", 0.0), n)
    m_const = lemma_M_constant(phi, PhaseSamples(phi.n))
    workers = int(_p(config, "workers", 1))

    extent = 1.75 + grad_xi_bound(phi, y0[None, :]) - 1.0
    points = int(_p(config, "grid.points", 384))
    grid = Grid(n, extent, points)

    def one(j):
        exc = build_exceptional_set(phi, y0, j, m_const, grid, c0=c0,
                                    x_center=y0)
        return exc.volume_estimate

    js = list(range(j_lo, j_hi + 1))
    vols = _map_samples(one, js, workers)
    samples = [[j, float(np.log2(v))] for j, v in zip(js, vols) if v > 0]
    fit = _fit([s[0] for s in samples], [s[1] for s in samples]) \
        if len(samples) >= 3 else None
    ok = fit is not None and -1.3 <= fit["slope"] <= -0.7
    return ExperimentReport(
        "nq_measure", _echo(config), samples, fit, "pass" if ok else "fail",
        {"M": float(m_const), "grid_spacing": grid.spacing})


def exp_rescaling_uniformity(config) -> ExperimentReport:
    phi = _phase_of(config)
    n = phi.n
    p = float(_p(config, "thresholds.p", 1.0))
    m_p = loss_threshold(p, n)
    amp = make_builtin_amplitude("sg_power_xi", n, (m_p, m_p),
                                 flavor=_p(config, "flavor", "I"))
    k_lo = int(_p(config, "quad.k_min", 1))
    k_hi = int(_p(config, "quad.k_max", 6))
    seed = int(_p(config, "seed", 0))
    tol = float(_p(config, "tolerance", 1e-4))
    oversample = float(_p(config, "quad.oversample", 2.0))

    by_order = {}
    samples = []
    for k in range(k_lo, k_hi + 1):
        _, _, consts = rescaled_operator_symbols(amp, phi, k, seed=seed)
        samples.append([k, consts[(0, 0)]])
        for key, v in consts.items():
            by_order.setdefault(key, []).append(v)
    diagnostics = {}
    ratios_ok = True
    for key, vals in by_order.items():
        ratio = max(vals) / min(vals)
        diagnostics["ratio_d%d%d" % key] = float(ratio)
        ratios_ok = ratios_ok and ratio <= 2.0

    rel = _conjugation_residual(amp, phi, int(_p(config, "rescale.k", 2)),
                                oversample)
    diagnostics["conjugation_rel_l2"] = rel
    ok = ratios_ok and rel <= tol
    return ExperimentReport("rescaling_uniformity", _echo(config), samples,
                            None, "pass" if ok else "fail", diagnostics)


def _conjugation_residual(amp, phi, k, oversample=2.0):
    """Relative L2 gap between psi~(2^-k x) A f and its dilation conjugate.

    The right-hand route dilates the data, takes the spectrum on the
    compressed grid, and applies the unit-scale operator; it shares no
    sampling lattice with the left-hand route.
    """
    from .backend import osc_sum_grid

    if not phi.point_map_identity:
        raise DomainError("the conjugation probe needs a shift-type phase")
    n = phi.n
    s = 2.0 ** k
    xi0 = np.array([12.0, 0.0])[:n]
    sigma = 1.5

    def f_fn(x):
        x = np.asarray(x, float)
        return (np.exp(-np.sum(x * x, axis=-1) / (2 * sigma**2))
                * np.exp(1j * (x @ xi0)))

    f_grid = Grid(n, 12.0, 128)
    f = field_from_function(f_grid, f_fn)
    out_grid = Grid(n, 18.0, 192)
    psi_scaled = unit_annulus_cutoff(out_grid.points(None) / s)

    x_max = grad_xi_bound(phi, out_grid.points(None)[:: 151]) \
        + np.sqrt(n) * f_grid.extent
    quad = plan_quadrature(x_max, r_min=6.0, r_max=17.0,
                           oversample=oversample)
    lhs = apply_A(amp, phi, f, quad, out_grid=out_grid)
    lhs_vals = lhs.values * psi_scaled.reshape(out_grid.shape)

    # dilated data on its own fine grid, sampled from the formula
    g_grid = Grid(n, 12.0 / s, 192)
    g = field_from_function(g_grid, lambda x: f_fn(s * np.asarray(x, float)))
    quad_g = plan_quadrature(
        np.sqrt(n) * (out_grid.extent / s + g_grid.extent) + 2.0,
        r_min=6.0 * s, r_max=17.0 * s, oversample=0.75 * oversample)
    nodes, weights = quad_g.nodes(n)
    spec = grid_fourier_at(g, nodes)
    coeffs = weights * amp.factors.xi_part(nodes / s) * spec
    if phi.radial_part is not None:
        coeffs = coeffs * np.exp(1j * phi.radial_part(nodes) / s)
    z_axes = [ax / s for ax in out_grid.axes(None)]
    vals = osc_sum_grid(z_axes, nodes, coeffs, sign=1.0)
    zpts = out_grid.points(None) / s
    rhs_vals = (vals.reshape(out_grid.shape)
                * (unit_annulus_cutoff(zpts)
                   * amp.factors.x_part(s * zpts)).reshape(out_grid.shape))
    ref = np.linalg.norm(lhs_vals)
    return float(np.linalg.norm(lhs_vals - rhs_vals) / ref)


def exp_determinism_check(config) -> ExperimentReport:
    import hashlib

    sub = {key: val for key, val in config.items()
           if key not in ("workers",)}
    worker_list = [int(w) for w in _p(config, "determinism.workers", [1, 4])]
    outputs = []
    for w in worker_list:
        run_cfg = dict(sub)
        run_cfg["workers"] = w
        rep = exp_kernel_decay_off_NQ(run_cfg)
        outputs.append(rep.to_json().encode())
    digests = [hashlib.sha256(o).hexdigest() for o in outputs]
    ok = all(o == outputs[0] for o in outputs)
    samples = [[w, float(len(o))] for w, o in zip(worker_list, outputs)]
    return ExperimentReport(
        "determinism_check", _echo(config), samples, None,
        "pass" if ok else "fail",
        {"sha256": digests, "identical": bool(ok)})


# ---------------------------------------------------------------------------
# registry


SEVEN_EXPERIMENTS = (
    "kernel_decay_off_NQ",
    "kernel_lipschitz",
    "h1_uniformity",
    "large_atom_bound",
    "threshold_sweep",
    "offdiagonal_decay",
    "schwartz_tail",
)

EXPERIMENTS = {
    "kernel_decay_off_NQ": exp_kernel_decay_off_NQ,
    "kernel_lipschitz": exp_kernel_lipschitz,
    "h1_uniformity": exp_h1_uniformity,
    "large_atom_bound": exp_large_atom_bound,
    "threshold_sweep": exp_threshold_sweep,
    "offdiagonal_decay": exp_offdiagonal_decay,
    "schwartz_tail": exp_schwartz_tail,
    "partition_check": exp_partition_check,
    "phase_certification": exp_phase_certification,
    "multiplier_oracle": exp_multiplier_oracle,
    "sigma_inclusion": exp_sigma_inclusion,
    "nq_measure": exp_nq_measure,
    "rescaling_uniformity": exp_rescaling_uniformity,
    "determinism_check": exp_determinism_check,
}


def run_experiment(name: str, config: dict) -> ExperimentReport:
    if name not in EXPERIMENTS:
        raise DomainError("unknown experiment %r" % name)
    return EXPERIMENTS[name](config)
