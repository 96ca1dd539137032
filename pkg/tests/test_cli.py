from __future__ import annotations

import json

import pytest

from glidinghump.cli import main
from glidinghump.config import (
    ConfigError,
    RunConfig,
    merge_config,
    parse_config_text,
    validate_config,
)


def run_cli(*argv):
    return main(list(argv))


def test_run_writes_outputs(tmp_path):
    out = tmp_path / "run"
    code = run_cli(
        "run", "--family", "coordinate", "--p", "0.5", "--K", "6",
        "--cap", "0.5", "--seed", "0", "--out", str(out), "--no-plots",
    )
    assert code == 0
    trace = json.loads((out / "trace.json").read_text())
    assert trace["trace_version"] == 1
    assert len(trace["steps"]) == 6
    cert = json.loads((out / "certificate.json").read_text())
    assert cert["accepted"] is True
    lines = (out / "growth.csv").read_text().splitlines()
    assert lines[0] == "k,m,n_k,beta_k,gamma_k,op_norm,image_norm_at_xk,image_norm_at_xK,final_bound_target_k,pass"
    assert len(lines) == 7
    assert lines[1].endswith(",true")


def test_run_renders_figures(tmp_path):
    out = tmp_path / "figs"
    code = run_cli(
        "run", "--family", "coordinate", "--K", "4", "--seed", "0", "--out", str(out)
    )
    assert code == 0
    assert (out / "growth.png").stat().st_size > 0
    assert (out / "schedule.png").stat().st_size > 0


def test_run_deterministic_bytes(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    for out in (a, b):
        assert run_cli(
            "run", "--family", "nonlinear-gal", "--p", "0.5", "--K", "8",
            "--seed", "3", "--out", str(out), "--no-plots",
        ) == 0
    for name in ("trace.json", "certificate.json", "growth.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_run_horizon_exhausted_exit_code(tmp_path, capsys):
    code = run_cli(
        "run", "--family", "fourier", "--K", "9", "--seed", "0",
        "--out", str(tmp_path / "f"), "--no-plots",
    )
    assert code == 1
    assert "horizon exhausted" in capsys.readouterr().err


def test_run_vacuous_horizon(tmp_path):
    out = tmp_path / "k0"
    code = run_cli(
        "run", "--family", "coordinate", "--K", "0", "--seed", "0",
        "--out", str(out), "--no-plots",
    )
    assert code == 0
    lines = (out / "growth.csv").read_text().splitlines()
    assert len(lines) == 1


def test_check_passes_for_real_family(tmp_path):
    out = tmp_path / "chk"
    code = run_cli(
        "check", "--family", "coordinate", "--samples", "400", "--seed", "2",
        "--out", str(out), "--no-plots",
    )
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["passed"] is True
    lines = (out / "report.csv").read_text().splitlines()
    assert lines[0] == "check,samples,violations,worst_margin"
    assert len(lines) == 4


def test_check_rejects_fake_bounded(tmp_path, capsys):
    code = run_cli(
        "check", "--family", "fake-bounded", "--samples", "200", "--seed", "2",
        "--out", str(tmp_path / "fake"), "--no-plots",
    )
    assert code == 1
    assert "violations" in capsys.readouterr().err


def test_lebesgue_command(tmp_path):
    out = tmp_path / "leb"
    code = run_cli("lebesgue", "--n-max", "12", "--out", str(out), "--no-plots")
    assert code == 0
    lines = (out / "lebesgue.csv").read_text().splitlines()
    assert lines[0] == "n,L_n,log_reference"
    assert len(lines) == 14
    first = lines[1].split(",")
    assert first[0] == "0" and first[1] == "1.0" and first[2] == ""


def test_schedule_command_worked_example(tmp_path):
    out = tmp_path / "sched"
    code = run_cli(
        "schedule", "--p", "1.0", "--L", "1.0", "--C", "1.0",
        "--cap", "1.0", "--K", "3", "--out", str(out), "--no-plots",
    )
    assert code == 0
    lines = (out / "schedule.csv").read_text().splitlines()
    assert lines[0] == "k,m,beta_tilde,beta,gamma"
    assert lines[1].split(",")[2] == "1.0"
    assert lines[2].split(",")[2] == "0.03125"
    assert lines[3].split(",")[2] == "0.0009765625"


def test_schedule_underflow_exit_code(tmp_path, capsys):
    code = run_cli(
        "schedule", "--p", "0.5", "--K", "200", "--out", str(tmp_path / "u"), "--no-plots",
    )
    assert code == 1
    assert "underflow" in capsys.readouterr().err


def test_config_file_round_trip(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text(
        "# comment\n"
        "family = coordinate\n"
        "p = 0.5\n"
        "K = 3\n"
        "cap = 0.25\n"
        "seed = 8\n"
        "plots = false\n"
    )
    out = tmp_path / "out"
    code = run_cli("run", "--config", str(cfg_file), "--out", str(out))
    assert code == 0
    trace = json.loads((out / "trace.json").read_text())
    assert trace["config"]["seed"] == 8
    assert trace["config"]["cap"] == 0.25
    assert not (out / "growth.png").exists()


def test_config_flag_overrides_file(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("family = coordinate\nK = 3\nseed = 8\nplots = false\n")
    out = tmp_path / "out"
    code = run_cli("run", "--config", str(cfg_file), "--seed", "99", "--out", str(out))
    assert code == 0
    trace = json.loads((out / "trace.json").read_text())
    assert trace["config"]["seed"] == 99


def test_unknown_config_key_exit_code(tmp_path, capsys):
    cfg_file = tmp_path / "bad.cfg"
    cfg_file.write_text("familly = coordinate\n")
    code = run_cli("run", "--config", str(cfg_file), "--out", str(tmp_path / "o"))
    assert code == 2
    assert "unknown key" in capsys.readouterr().err


def test_bad_value_exit_code(tmp_path, capsys):
    code = run_cli(
        "run", "--family", "coordinate", "--cap", "2.0",
        "--out", str(tmp_path / "o"), "--no-plots",
    )
    assert code == 2
    assert "cap" in capsys.readouterr().err


def test_fourier_needs_enough_points(tmp_path, capsys):
    code = run_cli(
        "run", "--family", "fourier", "--K", "9", "--points", "0.0,1.0",
        "--out", str(tmp_path / "o"), "--no-plots",
    )
    assert code == 2
    assert "target angles" in capsys.readouterr().err


def test_unknown_family_rejected_by_parser(tmp_path):
    with pytest.raises(SystemExit) as exc:
        run_cli("run", "--family", "mystery", "--out", str(tmp_path / "o"))
    assert exc.value.code == 2


def test_parse_config_text_errors():
    with pytest.raises(ConfigError):
        parse_config_text("just words\n")
    with pytest.raises(ConfigError):
        parse_config_text("K = not_a_number\n")
    parsed = parse_config_text("points = -2.0, 0.0, 2.0\nn_max = 4096\n")
    assert parsed["points"] == (-2.0, 0.0, 2.0)
    assert parsed["index_max"] == 4096


def test_validate_config_rules():
    base = RunConfig()
    validate_config(base, "run")
    with pytest.raises(ConfigError):
        validate_config(merge_config(base, {"p": 2.0}), "run")
    with pytest.raises(ConfigError):
        validate_config(merge_config(base, {"horizon": -1}), "run")
    with pytest.raises(ConfigError):
        validate_config(merge_config(base, {"family": "fake-bounded"}), "run")
    validate_config(merge_config(base, {"family": "fake-bounded"}), "check")
    with pytest.raises(ConfigError):
        validate_config(merge_config(base, {"index_max": 10**301}), "run")
    fourier = merge_config(base, {"family": "fourier", "quadrature_order": 100})
    with pytest.raises(ConfigError):
        validate_config(fourier, "run")
