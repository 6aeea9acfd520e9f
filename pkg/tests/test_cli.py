import csv
import io

import pytest

from replilearn import cli
from replilearn.experiments import COLUMNS

HEADER = ("experiment_id,subcommand,d,alpha,beta,rho,gamma,n_trials,seed,samples_labeled,samples_shared,"
          "est_exact_repl,est_approx_repl,est_pointwise_max,excess_err_p90,opt,ci_lo,ci_hi")


def _run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_header_is_stable():
    assert ",".join(COLUMNS) == HEADER


def test_parse_config_types_and_comments():
    text = "# comment\nd = 4\nalpha=0.1  # trailing\n\nbiases=0.4,-0.4,0.4,-0.4\n"
    p = cli.parse_config(text, "pointwise")
    assert p == {"d": 4, "alpha": 0.1, "biases": [0.4, -0.4, 0.4, -0.4]}


@pytest.mark.parametrize("text", ["bogus=1", "d=four", "alpha", "d=1\nd=2", "mode=other", "n_trials=5"])
def test_config_errors(text):
    sub = "approx" if "mode" in text else "pointwise"
    with pytest.raises(cli.ConfigError):
        cli.parse_config(text, sub)


def test_config_error_exit_code(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("unknown_key=3\n")
    code, out, err = _run(["pointwise", "--config", str(cfg)], capsys)
    assert code == 2 and out == "" and "unknown key" in err


def test_unknown_subcommand(capsys):
    code, _, err = _run(["frobnicate"], capsys)
    assert code == 2 and "usage" in err
    code, _, err = _run([], capsys)
    assert code == 2


def test_pointwise_reference_run(tmp_path, capsys):
    cfg = tmp_path / "p4.cfg"
    cfg.write_text("d=4\nbiases=0.4,-0.4,0.4,-0.4\nalpha=0.1\nrho=0.2\nc_T=4\nn_trials=200\nbase_m=15\n")
    out_file = tmp_path / "out.csv"
    code, out, _ = _run(["pointwise", "--config", str(cfg), "--seed", "11", "--workers", "1", "--out",
                         str(out_file)], capsys)
    assert code == 0 and out == ""
    raw = out_file.read_bytes()
    assert b"\r" not in raw
    rows = list(csv.DictReader(io.StringIO(raw.decode())))
    assert len(rows) == 1
    row = rows[0]
    n = int(row["n_trials"])
    pm, rho = float(row["est_pointwise_max"]), float(row["rho"])
    assert n == 200
    assert pm <= rho + 3 * (pm * (1 - pm) / n) ** 0.5
    assert row["gamma"] == "" and row["est_approx_repl"] == ""
    assert row["alpha"] == format(0.1, ".17g")


def test_seed_env_override(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "s.cfg"
    cfg.write_text("n_trials=100\n")
    monkeypatch.setenv("REPLILEARN_SEED", "99")
    _, out, _ = _run(["select", "--config", str(cfg), "--seed", "1", "--workers", "1"], capsys)
    assert next(csv.DictReader(io.StringIO(out)))["seed"] == "99"


def test_grid_one_row_per_cell(tmp_path, capsys):
    cfg = tmp_path / "g.cfg"
    cfg.write_text("subcommand=pointwise\nbase_m=15\nn_trials=100\ngrid.rho=0.4,0.2\ngrid.d=2,4\n")
    code, out, _ = _run(["grid", "--config", str(cfg), "--seed", "7", "--workers", "1"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 4
    assert [(r["rho"], r["d"]) for r in rows] == [("0.40000000000000002", "2"), ("0.40000000000000002", "4"),
                                                  ("0.20000000000000001", "2"), ("0.20000000000000001", "4")]
    assert len({r["experiment_id"] for r in rows}) == 4


def test_grid_config_errors(tmp_path, capsys):
    cfg = tmp_path / "g.cfg"
    cfg.write_text("subcommand=pointwise\n")
    assert _run(["grid", "--config", str(cfg)], capsys)[0] == 2
    cfg.write_text("subcommand=nope\ngrid.rho=0.1\n")
    assert _run(["grid", "--config", str(cfg)], capsys)[0] == 2
    assert _run(["grid"], capsys)[0] == 2


def test_selftest_deterministic(capsys):
    a = _run(["selftest", "--quick", "--seed", "42", "--workers", "1"], capsys)
    b = _run(["selftest", "--quick", "--seed", "42", "--workers", "2"], capsys)
    assert a[0] == 0
    assert a[1] == b[1]
    assert a[1].startswith(HEADER + "\n")


def test_format_value():
    assert cli.format_value(None) == ""
    assert cli.format_value(0.1) == "0.10000000000000001"
    assert cli.format_value(12) == "12"
