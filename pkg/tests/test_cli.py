"""Command-line front end: parsing, exit codes and run-directory contents."""

import csv
import json

import numpy as np
import pytest

from edgelab import cli, io
from edgelab.errors import ConfigError, NumericalError
from edgelab.experiments import GirkoConfig


def _only_run(root):
    runs = [p for p in root.iterdir() if p.is_dir()]
    assert len(runs) == 1
    return runs[0]


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_dyson_command_writes_grid(tmp_path, capsys):
    code = cli.dispatch(["--out", str(tmp_path), "dyson", "--z", "1+0i",
                         "--eta-grid", "1e-9:1e-3:log25"])
    assert code == cli.EXIT_OK
    run = _only_run(tmp_path)
    assert capsys.readouterr().out.strip() == str(run)
    rows = _read_csv(run / "dyson.csv")
    assert len(rows) == 25
    assert max(float(r["residual"]) for r in rows) <= 1e-12
    etas = np.array([float(r["eta"]) for r in rows])
    np.testing.assert_allclose(etas, np.geomspace(1e-9, 1e-3, 25), rtol=0, atol=0)
    manifest = json.loads((run / "manifest.json").read_text())
    assert manifest["files"] == ["dyson.csv"]
    assert manifest["summary"]["points"] == 25


def test_girko_command_identity_residual(tmp_path):
    code = cli.dispatch(["--out", str(tmp_path), "girko", "--n", "64", "--seed", "1",
                         "--z0", "1+0i"])
    assert code == cli.EXIT_OK
    run = _only_run(tmp_path)
    rows = _read_csv(run / "decomposition.csv")
    assert len(rows) == 1
    row = rows[0]
    assert row["seed"] == "1"
    assert int(row["n"]) == 64
    manifest = json.loads((run / "manifest.json").read_text())
    assert manifest["summary"]["girko_relative_residual"] <= 1e-3
    assert manifest["summary"]["decomposition_relative_residual"] <= 1e-3
    # every default is echoed, including the resolved eta0 and T
    cfg = manifest["config"]
    assert cfg["delta"] == 0.05
    assert cfg["T"] == pytest.approx(64.0 ** 3)
    assert 0 < cfg["eta0"] < cfg["T"]


def test_unknown_flag_exits_2_without_output(tmp_path):
    code = cli.dispatch(["--out", str(tmp_path), "dyson", "--z", "1", "--eta-grid",
                         "1:2:lin3", "--bogus"])
    assert code == cli.EXIT_CONFIG
    assert list(tmp_path.iterdir()) == []


def test_config_error_exit_2_without_output(tmp_path, capsys):
    code = cli.dispatch(["--out", str(tmp_path), "dyson", "--z", "1", "--eta-grid", "0:1:log5"])
    assert code == cli.EXIT_CONFIG
    assert "positive end points" in capsys.readouterr().err
    assert list(tmp_path.iterdir()) == []


def test_numerical_failure_exit_3(tmp_path, monkeypatch, capsys):
    def boom(*args, **kwargs):
        raise NumericalError("forced failure")

    monkeypatch.setattr(cli.dyson, "dyson_grid", boom)
    code = cli.dispatch(["--out", str(tmp_path), "dyson", "--z", "1", "--eta-grid", "1:2:lin3"])
    assert code == cli.EXIT_NUMERICAL
    assert "forced failure" in capsys.readouterr().err
    assert list(tmp_path.iterdir()) == []


def test_output_root_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(io.OUTPUT_ROOT_ENV, str(tmp_path / "envroot"))
    assert cli.dispatch(["kernel", "--xi-grid=-1:1:lin5"]) == cli.EXIT_OK
    run = _only_run(tmp_path / "envroot")
    assert len(_read_csv(run / "edge_profile.csv")) == 5
    # an explicit --out wins over the environment
    assert cli.dispatch(["--out", str(tmp_path / "flag"), "kernel",
                         "--xi-grid=-1:1:lin5"]) == cli.EXIT_OK
    assert _only_run(tmp_path / "flag")


def test_sample_manifest_and_hex_seed(tmp_path):
    argv = ["--out", str(tmp_path), "sample", "--n", "8", "--seed", "255", "--z", "0.5"]
    assert cli.dispatch(argv) == cli.EXIT_OK
    run = _only_run(tmp_path)
    assert run.name.startswith("sample-ff-")
    manifest = json.loads((run / "manifest.json").read_text())
    assert manifest["seed"] == "ff"
    assert manifest["argv"] == argv
    assert set(manifest["versions"]) == {"edgelab", "numpy", "scipy", "python"}
    assert sorted(manifest["files"]) == ["singular_values.csv", "spectrum.csv"]
    assert manifest["summary"]["trace_minus_eigenvalue_sum"] < 1e-12
    assert len(_read_csv(run / "spectrum.csv")) == 8
    s = [float(r["s"]) for r in _read_csv(run / "singular_values.csv")]
    assert s == sorted(s, reverse=True)


def test_rerun_is_bit_identical(tmp_path):
    argv = ["sample", "--n", "6", "--seed", "3"]
    cli.dispatch(["--out", str(tmp_path / "a")] + argv)
    cli.dispatch(["--out", str(tmp_path / "b")] + argv)
    a, b = _only_run(tmp_path / "a"), _only_run(tmp_path / "b")
    assert a.name == b.name
    assert (a / "spectrum.csv").read_bytes() == (b / "spectrum.csv").read_bytes()


def test_validate_config_requires_experiment():
    with pytest.raises(ConfigError, match="experiment"):
        cli.validate_config("n = 64\n")
    with pytest.raises(ConfigError, match="experiment"):
        cli.validate_config("experiment =   \n")


def test_validate_config_applies_and_echoes_defaults():
    rc = cli.validate_config("experiment = girko  # comment\nn = 32\n")
    assert isinstance(rc.params, GirkoConfig)
    assert rc.params.n == 32
    assert rc.params.delta == 0.05
    echoed = io.to_jsonable(rc.params)
    assert echoed["delta"] == 0.05
    assert echoed["eta0"] is not None and echoed["T"] == 32.0 ** 3


def test_validate_config_rejects_eta0_not_below_T():
    with pytest.raises(ConfigError) as info:
        cli.validate_config("experiment = girko\neta0 = 5000\nT = 1000\n")
    msg = str(info.value)
    assert "5000" in msg and "1000" in msg


@pytest.mark.parametrize("text, match", [
    ("experiment = nope\n", "unknown experiment"),
    ("experiment = girko\nbogus = 1\n", "bogus"),
    ("experiment = girko\nn = many\n", "'n'"),
    ("experiment = girko\nn = 1\nn = 2\n", "duplicate"),
    ("experiment = girko\njust text\n", "key = value"),
    ("experiment = girko\ndistribution = cauchy\n", "distribution"),
])
def test_validate_config_errors(text, match):
    with pytest.raises(ConfigError, match=match):
        cli.validate_config(text)


def test_config_file_and_overrides(tmp_path):
    cfg = tmp_path / "girko.cfg"
    cfg.write_text("experiment = girko\nn = 16\nseed = 4\n")
    code = cli.dispatch(["--out", str(tmp_path / "runs"), "girko", "--config", str(cfg),
                         "--set", "radius=2.5", "--seed", "5"])
    assert code == cli.EXIT_OK
    manifest = json.loads((_only_run(tmp_path / "runs") / "manifest.json").read_text())
    assert manifest["config"]["n"] == 16
    assert manifest["config"]["radius"] == 2.5
    assert manifest["config"]["seed"] == 5
    other = tmp_path / "other.cfg"
    other.write_text("experiment = flow\n")
    assert cli.dispatch(["--out", str(tmp_path / "x"), "girko", "--config", str(other)]) == 2


def test_parse_grid():
    np.testing.assert_allclose(cli.parse_grid("1e-9:1e-3:log25"), np.geomspace(1e-9, 1e-3, 25))
    np.testing.assert_allclose(cli.parse_grid("-1:1:lin3"), [-1.0, 0.0, 1.0])
    for bad in ("1:2", "1:2:log0", "1:2:cubic4", "-1:2:log3", "a:2:lin3"):
        with pytest.raises(ConfigError):
            cli.parse_grid(bad)


@pytest.mark.parametrize("text, value", [
    ("1+0i", 1 + 0j), ("-0.5-2j", -0.5 - 2j), ("i", 1j), ("3", 3 + 0j), (" 0.25 + 1i ", 0.25 + 1j),
])
def test_parse_complex(text, value):
    assert cli.parse_complex(text) == value


def test_parse_complex_rejects_garbage():
    with pytest.raises(ConfigError):
        cli.parse_complex("one")
