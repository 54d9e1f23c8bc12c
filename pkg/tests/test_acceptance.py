"""End-to-end acceptance runs, one per shipped config.

Each test parses a config from configs/, runs the experiment through the
same entry point the CLI uses, and checks the verdict plus the quantitative
gate it encodes.  Tolerances are pinned here, not recomputed.
"""

import os

from fiolab.cli import parse_config
from fiolab.harness import run_experiment

CONFIG_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "configs")


def _run(cfg_name):
    config = parse_config(os.path.join(CONFIG_DIR, cfg_name))
    return run_experiment(config["experiment"], config)


def test_c01_partition_exactness():
    rep = _run("partition_check.cfg")
    assert rep.verdict == "pass"
    assert rep.diagnostics["radial_err"] <= 1e-10
    assert rep.diagnostics["angular_err"] <= 1e-8
    assert rep.diagnostics["covering_ok"]


def test_c02_phase_certification():
    rep = _run("phase_certification.cfg")
    assert rep.verdict == "pass"
    flags = {k: v for k, v in rep.diagnostics.items()
             if k.startswith("passed_")}
    assert len(flags) == 3 and all(flags.values())
    for k, v in rep.diagnostics.items():
        if k.startswith("euler_"):
            assert v <= 1e-10
    for _, nd_min in rep.samples:
        assert nd_min >= 0.5


def test_c03_multiplier_oracle():
    rep = _run("multiplier_oracle.cfg")
    assert rep.verdict == "pass"
    errs = dict(rep.samples)
    assert errs["apply_T"] <= 1e-6 and errs["apply_A"] <= 1e-6


def test_c04_exceptional_set_inclusion():
    rep = _run("sigma_inclusion.cfg")
    assert rep.verdict == "pass"
    assert rep.diagnostics["total"] >= 1000
    assert rep.diagnostics["inside"] == rep.diagnostics["total"]


def test_c05_exceptional_set_measure_scaling():
    rep = _run("exceptional_measure.cfg")
    assert rep.verdict == "pass"
    assert -1.3 <= rep.fit["slope"] <= -0.7


def test_c06_kernel_decay_off_exceptional_set():
    rep = _run("kernel_decay.cfg")
    assert rep.verdict == "pass"
    assert rep.fit["slope"] <= -0.8
    assert rep.fit["r2"] >= 0.9


def test_c07_kernel_lipschitz_in_atom_width():
    rep = _run("kernel_lipschitz.cfg")
    assert rep.verdict == "pass"
    assert rep.fit["slope"] >= 0.8
    assert rep.fit["r2"] >= 0.9


def test_c08_atom_image_norm_comparability():
    rep = _run("h1_uniformity.cfg")
    assert rep.verdict == "pass"
    assert rep.diagnostics["max_ratio"] <= 5.0


def test_c09_large_atom_reduction_bound():
    rep = _run("large_atom_bound.cfg")
    assert rep.verdict == "pass"
    assert rep.diagnostics["max_value"] <= rep.diagnostics["bound"]


def test_c10_rescaling_uniformity():
    rep = _run("rescaling_uniformity.cfg")
    assert rep.verdict == "pass"
    ratios = [v for k, v in rep.diagnostics.items()
              if k.startswith("ratio_d")]
    assert ratios and max(ratios) <= 2.0
    assert rep.diagnostics["conjugation_rel_l2"] <= 1e-4


def test_c11_schwartz_tail_of_far_kernel():
    rep = _run("schwartz_tail.cfg")
    assert rep.verdict == "pass"
    for ri in (0, 1):
        assert rep.diagnostics["slope_ray%d" % ri] <= -4.0
        assert rep.diagnostics["r2_ray%d" % ri] >= 0.9


def test_c12_threshold_ordering():
    rep = _run("threshold_sweep.cfg")
    assert rep.verdict == "exploratory"
    assert rep.diagnostics["ordered_p1"]
    assert rep.diagnostics["flat_at_l2"]
    p1 = [rep.diagnostics["slope_p1_off%+g" % o]
          for o in (-0.5, 0.0, 0.5, 1.0)]
    assert all(b > a for a, b in zip(p1, p1[1:]))
    assert abs(rep.diagnostics["slope_p2_off+0"]) <= 0.1


def test_c13_determinism_across_worker_counts():
    rep = _run("determinism_check.cfg")
    assert rep.verdict == "pass"
    assert rep.diagnostics["identical"]
    digests = rep.diagnostics["sha256"]
    assert len(set(digests)) == 1
