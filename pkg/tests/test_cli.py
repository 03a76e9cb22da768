import json
import math

import pytest

from harvesting.cli import CSV_COLUMNS, emit_csv, main

FAST_CONFIG = """
[scenario]
model = "linear"
epsilon = 0.05

[detector.A]
lambda = 1.0
gap = 1.0
center = [0.0, 0.0, 0.0]
switch_center = 0.0
sigma = 1.0
T = 1.0

[detector.B]
lambda = 1.0
gap = 1.0
center = [2.0, 0.0, 0.0]
switch_center = 0.0
sigma = 1.0
T = 1.0

[quadrature]
rel_tol = 1e-6
abs_tol = 1e-13
max_evals = 1000000

[mc]
samples = 50000
seed = 3
"""


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "fast.toml"
    path.write_text(FAST_CONFIG)
    return str(path)


def test_wightman_subcommand_format(capsys):
    code = main(["wightman", "--dt", "0", "--r", "0", "--eps", "1"])
    assert code == 0
    out = capsys.readouterr().out.strip().split()
    assert len(out) == 2
    assert float(out[0]) == pytest.approx(1.0 / (4 * math.pi**2), rel=1e-14)
    # scientific notation, 15 significant digits
    assert "e" in out[0] and len(out[0].split("e")[0].replace("-", "").replace(".", "")) == 15


def test_wightman_power_flag(capsys):
    main(["wightman", "--dt", "0", "--r", "0", "--eps", "1"])
    w1 = float(capsys.readouterr().out.split()[0])
    main(["wightman", "--dt", "0", "--r", "0", "--eps", "1", "--power", "2"])
    w2 = float(capsys.readouterr().out.split()[0])
    assert w2 == pytest.approx(w1**2, rel=1e-12)


def test_elements_happy_path(config_file, capsys):
    code = main(["elements", "--config", config_file])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    for key in ("L_AA", "L_BB", "L_AB", "M", "errors", "settings_fingerprint",
                "negativity", "mutual_information"):
        assert key in payload
    assert payload["L_AA"] > 0
    assert payload["flags"] == []


def test_elements_json_deterministic(config_file, capsys):
    main(["elements", "--config", config_file])
    first = capsys.readouterr().out
    main(["elements", "--config", config_file])
    second = capsys.readouterr().out
    assert first == second


def test_invalid_config_names_key(config_file, tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text(FAST_CONFIG.replace("sigma = 1.0", "sigma = -1.0"))
    code = main(["elements", "--config", str(bad)])
    err = capsys.readouterr().err
    assert code == 1
    assert "sigma" in err


def test_missing_key_named(tmp_path, capsys):
    broken = tmp_path / "broken.toml"
    broken.write_text(FAST_CONFIG.replace("epsilon = 0.05", ""))
    code = main(["elements", "--config", str(broken)])
    err = capsys.readouterr().err
    assert code == 1
    assert "epsilon" in err


def test_unknown_flag_exits_one(config_file, capsys):
    code = main(["elements", "--config", config_file, "--bogus"])
    err = capsys.readouterr().err
    assert code == 1
    assert "--bogus" in err


def test_rho_subcommand(config_file, capsys):
    code = main(["rho", "--config", config_file])
    out = capsys.readouterr().out
    assert code == 0
    assert "negativity" in out and "mutual_information" in out
    assert len(out.strip().splitlines()) >= 7


def test_sweep_csv_shape_and_determinism(config_file, tmp_path, capsys):
    out1 = str(tmp_path / "sweep1.csv")
    out2 = str(tmp_path / "sweep2.csv")
    for out in (out1, out2):
        code = main(["sweep", "--config", config_file, "--param", "epsilon",
                     "--from", "1e-3", "--to", "1e-1", "--points", "5",
                     "--out", out])
        assert code == 0
        capsys.readouterr()
    lines1 = open(out1).read()
    assert lines1 == open(out2).read()  # byte-identical
    rows = lines1.strip().splitlines()
    assert len(rows) == 6  # header + 5 points
    assert rows[0] == ",".join(CSV_COLUMNS)
    params = [float(r.split(",")[0]) for r in rows[1:]]
    assert params == sorted(params)
    sidecar = json.load(open(out1 + ".verdicts.json"))
    assert set(sidecar["verdicts"]) == {"L_AA", "L_BB", "L_AB", "M"}
    manifest = json.load(open(out1 + ".manifest.json"))
    assert manifest["manifest_id"] == sidecar["manifest_id"]


def test_sweep_requires_out(config_file, capsys):
    code = main(["sweep", "--config", config_file, "--from", "1e-3",
                 "--to", "1e-1"])
    assert code == 1
    assert "--out" in capsys.readouterr().err


def test_elements_csv_row(config_file, tmp_path, capsys):
    csv_path = str(tmp_path / "row.csv")
    code = main(["elements", "--config", config_file, "--csv", csv_path])
    capsys.readouterr()
    assert code == 0
    lines = open(csv_path).read().strip().splitlines()
    assert len(lines) == 2
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert float(lines[1].split(",")[0]) == 0.05  # epsilon column


def test_nonconverged_exit_codes(tmp_path, capsys):
    starved = FAST_CONFIG.replace("rel_tol = 1e-6", "rel_tol = 1e-14")
    starved = starved.replace("max_evals = 1000000", "max_evals = 1000")
    cfg = tmp_path / "starved.toml"
    cfg.write_text(starved)
    code = main(["elements", "--config", str(cfg)])
    capsys.readouterr()
    assert code == 2
    code = main(["elements", "--config", str(cfg), "--allow-nonconverged"])
    capsys.readouterr()
    assert code == 0


def test_compare_subcommand(config_file, capsys):
    code = main(["compare", "--config", config_file])
    out = capsys.readouterr().out
    assert code == 0
    assert "pass" in out and "FAIL" not in out


def test_oracle_wick_subcommand(capsys):
    code = main(["oracle", "wick", "--modes", "4", "--seed", "3"])
    out = capsys.readouterr().out
    assert code == 0
    assert out.count("pass") == 4


def test_emit_csv_rejects_empty(tmp_path):
    with pytest.raises(ValueError):
        emit_csv([], str(tmp_path / "x.csv"))


def test_emit_csv_writes_12_point_file(tmp_path):
    rows = []
    for i in range(12):
        rows.append({c: (float(i) if c not in ("model", "flags") else "m")
                     for c in CSV_COLUMNS})
        rows[-1]["param_value"] = 10.0 ** (-3 + i * 0.18)
    path = str(tmp_path / "p.csv")
    emit_csv(rows, path)
    lines = open(path).read().strip().splitlines()
    assert len(lines) == 13
    params = [float(r.split(",")[0]) for r in lines[1:]]
    assert all(b > a for a, b in zip(params, params[1:]))
