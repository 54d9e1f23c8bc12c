"""Command line front end: config parsing, experiment dispatch, persistence.

Config files are line oriented ``key = value`` with dotted section keys,
e.g. ``grid.extent = 12``.  Blank lines and lines starting with ``#`` are
ignored.  Unknown keys and duplicate keys are hard errors: a silently
misread key could flip an estimate verdict.

Exit codes: 0 pass/exploratory, 1 fail, 2 configuration or quadrature
refusal (including I/O failures).
"""

import argparse
import sys

from .amplitude import certify_symbol, make_builtin_amplitude
from .harness import EXPERIMENTS, SEVEN_EXPERIMENTS, run_experiment
from .phase import PhaseSamples, certify_phase, make_builtin_phase
from .util import ConfigurationError, DomainError, QuadratureRefusal

# every key any experiment reads, plus the dispatch/plumbing keys
KNOWN_KEYS = frozenset([
    "experiment", "output_dir", "workers", "seed", "n", "tolerance",
    "phase", "phase.ids", "amplitude", "amplitude.low_cutoff", "flavor",
    "orders.m", "orders.m1", "orders.m2", "orders.mu",
    "grid.extent", "grid.points",
    "quad.k_min", "quad.k_max", "quad.oversample", "quad.x_levels",
    "decomp.c0", "decomp.j", "decomp.j_list", "decomp.j_min",
    "decomp.j_max", "decomp.m_override", "decomp.samples_per_j",
    "atoms.profile", "atoms.q_list", "atoms.y0", "atoms.y0_list",
    "thresholds.p", "thresholds.p_list", "thresholds.mu_offsets",
    "rays.points", "rays.t_min", "rays.t_max",
    "rescale.k", "wavefront.k", "determinism.workers",
])

DEFAULTS = {
    "n": 2,
    "grid.extent": 12.0,
    "grid.points": 128,
    "quad.oversample": 1.5,
    "decomp.c0": 0.5,
    "seed": 0,
}


def _parse_scalar(text: str):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text


def _parse_value(text: str):
    if "," in text:
        return [_parse_scalar(t.strip()) for t in text.split(",")]
    return _parse_scalar(text)


def parse_config(path: str) -> dict:
    try:
        with open(path, "r") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigurationError("cannot read config %s: %s" % (path, exc))

    config = {}
    seen_line = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigurationError(
                "%s:%d: expected `key = value`, got %r" % (path, lineno, line))
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ConfigurationError(
                "%s:%d: empty key or value" % (path, lineno))
        if key not in KNOWN_KEYS:
            raise ConfigurationError(
                "%s:%d: unknown key %r" % (path, lineno, key))
        if key in seen_line:
            raise ConfigurationError(
                "%s: duplicate key %r on lines %d and %d"
                % (path, key, seen_line[key], lineno))
        seen_line[key] = lineno
        config[key] = _parse_value(value)

    for key, value in DEFAULTS.items():
        config.setdefault(key, value)
    if "experiment" not in config:
        raise ConfigurationError("%s: missing required key `experiment`" % path)
    name = config["experiment"]
    if name not in EXPERIMENTS:
        raise ConfigurationError(
            "%s: unknown experiment %r (see `fiolab list`)" % (path, name))
    return config


def _headline(report) -> str:
    if report.fit is not None and "slope" in report.fit:
        return "slope=%+.3f" % report.fit["slope"]
    for key in ("max_ratio", "ratio", "bound", "max_residual"):
        if key in report.diagnostics:
            return "%s=%.4g" % (key, report.diagnostics[key])
    return ""


def cmd_run(args) -> int:
    try:
        config = parse_config(args.config)
    except ConfigurationError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2
    if args.workers is not None:
        config["workers"] = args.workers
    out_dir = args.out or config.get("output_dir", ".")
    name = config["experiment"]

    for key in sorted(config):
        print("  %s = %r" % (key, config[key]))
    try:
        report = run_experiment(name, config)
        report.write(out_dir)
    except QuadratureRefusal as exc:
        print("quadrature refusal: %s" % exc, file=sys.stderr)
        return 2
    except (ConfigurationError, DomainError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except OSError as exc:
        print("i/o error: %s" % exc, file=sys.stderr)
        return 2

    print("%s %s %s" % (report.experiment, _headline(report), report.verdict))
    return 0 if report.verdict in ("pass", "exploratory") else 1


def cmd_list(_args) -> int:
    for name in SEVEN_EXPERIMENTS:
        print(name)
    for name in EXPERIMENTS:
        if name not in SEVEN_EXPERIMENTS:
            print("%s  (aux)" % name)
    return 0


def cmd_certify(args) -> int:
    n = args.n
    try:
        phi = make_builtin_phase(args.phase, n)
        cert = certify_phase(phi, args.flavor, PhaseSamples(n))
        amp = make_builtin_amplitude("sg_power", n, (0.0, 0.0, 0.0),
                                     flavor=args.flavor)
        scert = certify_symbol(amp)
    except (ConfigurationError, DomainError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    print("phase %s flavor %s: nondegeneracy_min=%.4g %s"
          % (args.phase, args.flavor, cert.nondegeneracy_min,
             "pass" if cert.passed else "fail"))
    worst = max(scert.constants.values())
    print("symbol sg_power flavor %s: max_constant=%.4g %s"
          % (args.flavor, worst, "pass" if scert.passed else "fail"))
    return 0 if (cert.passed and scert.passed) else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="fiolab",
        description="Numerical laboratory for oscillatory integral operators")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment from a config file")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", default=None)
    p_run.add_argument("--workers", type=int, default=None)
    p_run.set_defaults(func=cmd_run)

    p_list = sub.add_parser("list", help="list experiment names")
    p_list.set_defaults(func=cmd_list)

    p_cert = sub.add_parser("certify",
                            help="run phase and symbol certification only")
    p_cert.add_argument("--phase", required=True)
    p_cert.add_argument("--flavor", default="I", choices=("I", "II", "III"))
    p_cert.add_argument("--n", type=int, default=2)
    p_cert.set_defaults(func=cmd_certify)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
