import json

import pytest

from fiolab.cli import main, parse_config
from fiolab.util import ConfigurationError


def _write(tmp_path, text, name="exp.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_parse_config_defaults_and_types(tmp_path):
    path = _write(tmp_path, "\n".join([
        "# comment line",
        "experiment = partition_check",
        "",
        "grid.extent = 6.5",
        "quad.k_min = 1",
        "thresholds.p_list = 1, 2, 4",
    ]))
    config = parse_config(path)
    assert config["experiment"] == "partition_check"
    assert config["grid.extent"] == 6.5
    assert config["quad.k_min"] == 1
    assert config["thresholds.p_list"] == [1, 2, 4]
    # untouched keys fall back to documented defaults
    assert config["n"] == 2 and config["grid.points"] == 128
    assert config["quad.oversample"] == 1.5 and config["seed"] == 0


def test_parse_config_rejects_unknown_key(tmp_path):
    path = _write(tmp_path, "experiment = partition_check\nbogus.key = 3\n")
    with pytest.raises(ConfigurationError) as exc:
        parse_config(path)
    assert "bogus.key" in str(exc.value) and ":2:" in str(exc.value)


def test_parse_config_rejects_duplicate_key(tmp_path):
    path = _write(tmp_path,
                  "experiment = partition_check\nseed = 1\n\nseed = 2\n")
    with pytest.raises(ConfigurationError) as exc:
        parse_config(path)
    msg = str(exc.value)
    assert "seed" in msg and "2" in msg and "4" in msg


def test_parse_config_requires_experiment(tmp_path):
    path = _write(tmp_path, "seed = 1\n")
    with pytest.raises(ConfigurationError):
        parse_config(path)


def test_run_exit_codes(tmp_path, capsys):
    good = _write(tmp_path, "experiment = partition_check\n", "good.cfg")
    code = main(["run", "--config", good, "--out", str(tmp_path)])
    assert code == 0
    out = capsys.readouterr().out
    assert "partition_check" in out and "pass" in out
    report = json.loads((tmp_path / "partition_check.json").read_text())
    assert report["verdict"] == "pass"
    assert (tmp_path / "partition_check.csv").read_text().startswith("x,y")


def test_run_exit_code_2_on_bad_config(tmp_path, capsys):
    bad = _write(tmp_path, "experiment = partition_check\nnope = 1\n")
    assert main(["run", "--config", bad]) == 2
    missing = str(tmp_path / "does_not_exist.cfg")
    assert main(["run", "--config", missing]) == 2


def test_run_exit_code_2_on_quadrature_refusal(tmp_path, capsys):
    cfg = _write(tmp_path, "\n".join([
        "experiment = kernel_decay_off_NQ",
        "quad.oversample = 0.1",
        "decomp.j = 2",
        "quad.k_min = 3",
        "quad.k_max = 4",
    ]))
    assert main(["run", "--config", cfg]) == 2
    err = capsys.readouterr().err
    assert "refus" in err or "oversample" in err


def test_list_names_all_experiments(capsys):
    assert main(["list"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) >= 13
    assert lines[0].split()[0] != ""
    core = [ln for ln in lines if "(aux)" not in ln]
    assert len(core) == 7


def test_certify_exit_code(capsys):
    assert main(["certify", "--phase", "shifted_wave", "--flavor", "I"]) == 0
    out = capsys.readouterr().out
    assert "pass" in out and "fail" not in out
