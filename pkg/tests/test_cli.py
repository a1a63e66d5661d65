import json

import pytest

from wavecrit import cli, exponents
from wavecrit.fileio import read_csv

BASE = {
    "dim": 2, "n": 64, "box": 12.0, "dt": 0.05, "horizon": 0.6,
    "initial": {"kind": "gaussian", "params": {"amplitude": 0.5, "width": 1.0}},
}


def _config(tmp_path, name="run.json", **overrides):
    cfg = json.loads(json.dumps(BASE))
    cfg.update(overrides)
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return path


def test_simulate_writes_outputs(tmp_path):
    path = _config(tmp_path)
    out = tmp_path / "out"
    assert cli.main(["simulate", "--config", str(path), "--out-dir", str(out)]) == cli.EXIT_OK
    header, rows = read_csv(out / "series.csv")
    assert header == cli.SERIES_COLUMNS
    assert len(rows) == 13
    summary = json.loads((out / "summary.json").read_text())
    assert summary["truncated"] is False
    assert summary["checks"]["energy_relative_drift"] < 1e-6
    assert summary["config_hash"] == cli.config_hash(json.loads(path.read_text()))


def test_simulate_is_deterministic(tmp_path):
    path = _config(tmp_path, initial={"kind": "mode", "params": {"k": [1, 2], "amplitude": 0.3}})
    for tag in ("a", "b"):
        assert cli.main(["simulate", "--config", str(path), "--out-dir", str(tmp_path / tag)]) == 0
    for name in ("series.csv", "diagnostics.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_malformed_config_creates_nothing(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{ not json")
    out = tmp_path / "out"
    assert cli.main(["simulate", "--config", str(path), "--out-dir", str(out)]) == cli.EXIT_CONFIG
    assert not out.exists()


@pytest.mark.parametrize("patch", [
    {"n": 48},  # not a power of two
    {"dt": -1},
    {"colour": "red"},
    {"initial": {"kind": "gaussian", "params": {"radius": 1}}},
    {"horizon": 0.61},
])
def test_invalid_configs_exit_2(tmp_path, patch):
    path = _config(tmp_path, **patch)
    assert cli.main(["simulate", "--config", str(path), "--out-dir", str(tmp_path / "o")]) == cli.EXIT_CONFIG


def test_unstable_run_exits_3(tmp_path):
    path = _config(tmp_path, sign=-1, dt=0.1, horizon=3.0,
                   initial={"kind": "gaussian", "params": {"amplitude": 8.0, "width": 1.0}})
    out = tmp_path / "out"
    assert cli.main(["simulate", "--config", str(path), "--out-dir", str(out)]) == cli.EXIT_NUMERIC
    assert json.loads((out / "summary.json").read_text())["truncated"] is True


def test_exponents_command(tmp_path, capsys):
    report = tmp_path / "r.json"
    assert cli.main(["exponents", "--dim", "6", "--max-dim", "8", "--json", str(report)]) == 0
    assert "adm.scatter_norm" in capsys.readouterr().out
    assert report.exists()


def test_admissible_command(capsys):
    assert cli.main(["admissible", "--dim", "6", "--q", "7", "--r", "7"]) == 0
    assert "2" in capsys.readouterr().out


def test_verify_all_flags_injected_claim(tmp_path, capsys):
    claims = [c for c in json.loads(exponents.resources.files("wavecrit").joinpath("data/claims.json").read_text())["claims"]]
    bad = dict(claims[0], id="injected.bad", s="(d-2)/2 + 1/100")
    path = tmp_path / "claims.json"
    path.write_text(json.dumps({"claims": claims + [bad]}))
    code = cli.main(["verify-all", "--dim-range", "6", "7", "--claims", str(path)])
    assert code == cli.EXIT_ACCEPT
    assert "injected.bad" in capsys.readouterr().out


def test_verify_all_empty_range_warns():
    with pytest.warns(UserWarning):
        report = cli.verify_all(9, 8, exponents.load_claims(), gronwall_count=5)
    assert report["passed"] and report["dims"] == {}


def test_verify_all_rejects_low_dims():
    assert cli.main(["verify-all", "--dim-range", "3", "8"]) == cli.EXIT_CONFIG


def test_gronwall_command(tmp_path):
    out = tmp_path / "g.csv"
    args = ["gronwall", "--gamma", "2", "--gamma2", "1", "--C", "1", "--eta", "0.125", "--rho", "1"]
    assert cli.main(args + ["--K", "20", "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["k", "x_k", "bound_k"] and len(rows) == 21
    assert all(float(x) <= float(b) for _, x, b in rows)
    assert cli.main(["gronwall", "--gamma", "2", "--gamma2", "1", "--C", "1", "--eta", "0.2", "--rho", "1",
                     "--out", str(tmp_path / "h.csv")]) == cli.EXIT_NUMERIC


def test_decay_recursion_command(tmp_path):
    out = tmp_path / "d.csv"
    assert cli.main(["decay-recursion", "--dim", "6", "--R", "7/2", "--out", str(out)]) == 0
    assert read_csv(out)[1]
    assert cli.main(["decay-recursion", "--dim", "6", "--R", "3", "--out", str(out)]) == cli.EXIT_CONFIG


def test_decay_command_horizon(tmp_path):
    args = ["decay", "--dim", "2", "--p", "4", "--n", "128", "--box", "80", "--out", str(tmp_path / "x.csv")]
    assert cli.main(args + ["--tmax", "30"]) == cli.EXIT_NUMERIC
    assert cli.main(args + ["--tmax", "10"]) == 0


def test_bernstein_command(tmp_path):
    out = tmp_path / "b.csv"
    assert cli.main(["bernstein", "--n", "32", "--trials", "3", "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["N", "p", "q", "s", "ratio"] and rows
