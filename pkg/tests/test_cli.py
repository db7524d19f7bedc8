from __future__ import annotations

import csv
import json
import os

import pytest

from hpk import cli
from hpk.cli import ConfigError, RunConfig, main, make_spec


def _run(tmp_path, *args, name="out.json"):
    out = tmp_path / name
    code = main([*args, "--out", str(out), "--jobs", "1"])
    return code, out


def test_tabulate_json(tmp_path):
    code, out = _run(tmp_path, "tabulate", "--A", "1", "--B1", "1", "--t1", "0", "--nmax", "3")
    assert code == 0
    payload = json.loads(out.read_text())
    assert set(payload) == {"config", "rows", "summary"}
    assert [r["n"] for r in payload["rows"]] == [0, 1, 2, 3]
    assert set(payload["rows"][0]) == {"t", "n", "alpha", "beta", "h", "R", "r", "sigma", "logD"}
    # h_0 = 3 sqrt(pi) / 2
    assert payload["rows"][0]["h"].startswith("2.65868077635827404094725122501171777")
    assert payload["config"]["spec"]["B1"] == "1"


def test_tabulate_csv_grid(tmp_path):
    code, out = _run(tmp_path, "tabulate", "--A", "1", "--B1", "-1", "--nmax", "2", "--t", "0", "--t", "0.5",
                     "--format", "csv", name="out.csv")
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert [(r["t"], r["n"]) for r in rows] == [("0", "0"), ("0", "1"), ("0", "2"), ("0.5", "0"), ("0.5", "1"),
                                                 ("0.5", "2")]


def test_verify_two_jump_passes(tmp_path, capsys):
    code, out = _run(tmp_path, "verify", "--A", "2", "--B1", "-1", "--B2", "-0.5", "--t1", "-0.5", "--t2", "0.7",
                     "--n", "3,6", "--no-limits")
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["summary"]["failed"] == 0
    assert capsys.readouterr().out.strip().splitlines()[-1].startswith("PASS ")


def test_two_jump_grid_point_supplies_unset_locations(tmp_path):
    code, out = _run(tmp_path, "verify", "--A", "1", "--B1", "1", "--B2", "-0.5", "--t", "0.2,0.8",
                     "--nmax", "4", "--no-limits")
    assert code == 0
    assert json.loads(out.read_text())["summary"]["failed"] == 0


def test_series_reports_the_one_mismatch(tmp_path, capsys):
    code, out = _run(tmp_path, "series")
    text = capsys.readouterr().out
    assert code == 1
    assert "v1 large-s coefficients: EXACT MATCH (5/5)" in text
    assert "v3 large-s coefficients: MISMATCH (4/5)" in text
    assert json.loads(out.read_text())["summary"]["line"] == "FAIL 1/10"


def test_oracle_passes(tmp_path):
    code, out = _run(tmp_path, "oracle", "--A", "1", "--B1", "2", "--t1", "0.3", "--nmax", "6")
    assert code == 0
    assert all(r["pass"] for r in json.loads(out.read_text())["rows"])


def test_asymptotics_fixed_t(tmp_path):
    code, out = _run(tmp_path, "asymptotics", "--A", "0", "--B1", "1", "--t", "0.5", "--n", "64,128,256")
    assert code == 0
    assert json.loads(out.read_text())["summary"]["checks"][0]["pass"]


@pytest.mark.parametrize(
    "args, message",
    [
        (["--A", "1", "--B1", "-2"], "A + B1 >= 0"),
        (["--A", "-1"], "A >= 0"),
        (["--A", "1", "--B1", "1", "--B2", "1", "--t1", "1", "--t2", "0"], "t1 < t2"),
        (["--A", "x"], "not a number"),
        (["--bits", "64"], "bits must be >= 128"),
    ],
)
def test_config_errors_exit_2(tmp_path, capsys, args, message):
    code, out = _run(tmp_path, "tabulate", *args)
    assert code == 2
    assert message in capsys.readouterr().err
    assert not out.exists()


def test_small_s_is_a_config_error(tmp_path, capsys):
    code, _ = _run(tmp_path, "asymptotics", "--A", "1", "--B1", "-1", "--s", "2")
    assert code == 2 and "|s| >= 5" in capsys.readouterr().err


def test_precedence_env_config_flags(tmp_path, monkeypatch):
    monkeypatch.setenv("HPK_BITS", "300")
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps({"spec": {"A": "1", "B1": "1", "t1": "0.2"}, "n_max": 3}))
    args = cli.build_parser().parse_args(["tabulate", "--config", str(cfg_file)])
    cfg = cli.config_from_args(args)
    assert cfg.ctx.bits == 300 and cfg.n_max == 3 and cfg.spec.t1 == "0.2"
    cfg_file.write_text(json.dumps({"spec": {"A": "1"}, "bits": 400}))
    args = cli.build_parser().parse_args(["tabulate", "--config", str(cfg_file), "--bits", "500", "--A", "2"])
    cfg = cli.config_from_args(args)
    assert cfg.ctx.bits == 500 and cfg.spec.A == "2"
    monkeypatch.delenv("HPK_BITS")
    args = cli.build_parser().parse_args(["tabulate", "--config", str(cfg_file)])
    assert cli.config_from_args(args).ctx.bits == 400


def test_config_round_trip():
    cfg = RunConfig("verify", make_spec({"A": "1", "B1": "0.5", "t1": "-0.25"}), n_max=7,
                    t_grid=("0", ("-0.5", "0.7")), bits=384, jobs=2, n_values=(3, 6), s="-6")
    again = RunConfig.from_dict(json.loads(json.dumps(cfg.to_dict())))
    assert again.to_dict() == cfg.to_dict()
    with pytest.raises(ConfigError, match="unknown config keys"):
        RunConfig.from_dict({**cfg.to_dict(), "colour": "red"})


def test_crash_leaves_no_partial_output(tmp_path, monkeypatch):
    out = tmp_path / "out.json"

    def boom(payload, fmt):
        raise RuntimeError("renderer failed")

    with monkeypatch.context() as m:
        m.setattr(cli, "render", boom)
        with pytest.raises(RuntimeError):
            main(["tabulate", "--nmax", "2", "--out", str(out), "--jobs", "1"])
    assert not out.exists()

    def full_disk(*args, **kwargs):
        raise OSError("no space left")

    with monkeypatch.context() as m:
        m.setattr(os, "fdopen", full_disk)
        with pytest.raises(OSError):
            cli.write_atomic(str(out), "{}")
    assert os.listdir(tmp_path) == []


def test_jobs_use_processes(tmp_path):
    out = tmp_path / "out.json"
    code = main(["tabulate", "--A", "1", "--B1", "1", "--nmax", "2", "--t", "0", "--t", "1", "--jobs", "2",
                 "--out", str(out)])
    assert code == 0
    assert len(json.loads(out.read_text())["rows"]) == 6


def test_verify_pure_gaussian_residuals_vanish(tmp_path):
    code, out = _run(tmp_path, "verify", "--nmax", "10", "--bits", "384")
    assert code == 0
    reports = json.loads(out.read_text())["reports"]
    # zero up to the roundoff of the recurrence coefficients, far below tol;
    # limit-class reports carry the decay ratio, with the raw residuals in "reason"
    assert all(r["residual"] is None or float(r["residual"]) < 1e-90 for r in reports if r["class"] != "limit")
    for r in reports:
        if r["class"] == "limit" and r["status"] == "PASS":
            raw = [float(x) for x in r["reason"].removeprefix("residuals ").split(", ")]
            assert max(raw) < 1e-90


def test_tabulate_alpha0_closed_form(tmp_path):
    import mpmath as mp

    code, out = _run(tmp_path, "tabulate", "--A", "1", "--B1", "1", "--t1", "0", "--nmax", "2")
    assert code == 0
    alpha0 = json.loads(out.read_text())["rows"][0]["alpha"]
    with mp.workprec(256):
        assert abs(mp.mpf(alpha0) - 1 / (3 * mp.sqrt(mp.pi))) < mp.mpf(10) ** -60


def test_json_is_deterministic_and_csv_carries_same_numbers(tmp_path):
    args = ["tabulate", "--A", "1", "--B1", "0.5", "--t1", "0.3", "--nmax", "4", "--jobs", "1"]
    a, b, c = tmp_path / "a.json", tmp_path / "b.json", tmp_path / "c.csv"
    assert main([*args, "--out", str(a)]) == 0
    assert main([*args, "--out", str(b)]) == 0
    assert main([*args, "--out", str(c), "--format", "csv"]) == 0
    text_a = a.read_text().replace(str(a), "OUT")
    text_b = b.read_text().replace(str(b), "OUT")
    assert text_a == text_b
    rows_json = json.loads(a.read_text())["rows"]
    rows_csv = list(csv.DictReader(c.open()))
    assert [{k: str(v) for k, v in r.items()} for r in rows_json] == rows_csv
