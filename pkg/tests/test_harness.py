import csv
import subprocess
import sys

import numpy as np
import pytest

from asyncpd.harness import (
    ConfigError,
    ExperimentConfig,
    build_experiment,
    main,
    parse_config,
    run_experiment,
)
from asyncpd.metrics import RunTrace


def write_cfg(tmp_path, text, name="exp.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return p


SMOKE = "topology=ring\nm=4\nN=1000\nproblem=quadratic\ndim=2\nseeds=0,1,2\nlog_every=100\n"


def test_parse_config_basic(tmp_path):
    cfg = parse_config(write_cfg(tmp_path, SMOKE))
    assert cfg.m == 4 and cfg.N == 1000 and cfg.seeds == [0, 1, 2]
    assert cfg.algo == "adpd"


def test_flag_precedence(tmp_path):
    path = write_cfg(tmp_path, "algo=adpd\nN=10\n")
    cfg = parse_config(path, {"algo": "aasdcs", "sigma": "1.0"})
    assert cfg.algo == "aasdcs"
    assert cfg.sigma == 1.0


def test_unknown_key(tmp_path):
    path = write_cfg(tmp_path, "N=10\nalpha_kk=3\n")
    with pytest.raises(ConfigError) as exc:
        parse_config(path)
    assert "alpha_kk" in str(exc.value)
    assert "algo" in str(exc.value)  # lists valid keys


def test_missing_N(tmp_path):
    with pytest.raises(ConfigError):
        parse_config(write_cfg(tmp_path, "m=4\n"))


def test_adpd_svm_rejected():
    with pytest.raises(ConfigError) as exc:
        ExperimentConfig(N=10, problem="svm_l1", algo="adpd", dataset="x.txt")
    assert "exact" in str(exc.value)


def test_bad_values():
    with pytest.raises(ConfigError):
        ExperimentConfig(N=0)
    with pytest.raises(ConfigError):
        ExperimentConfig(N=10, algo="sgd")
    with pytest.raises(ConfigError):
        ExperimentConfig(N=10, problem="svm_l2")  # no dataset
    with pytest.raises(ConfigError):
        ExperimentConfig(N=10, seeds=[])


def test_build_experiment_regimes():
    cfg = ExperimentConfig(N=10, m=4, algo="aasdcs", sigma=1.0)
    _, _, sched = build_experiment(cfg)
    # quadratic has mu > 0, so auto picks the strongly convex schedule
    assert sched.regime == "aasdcs_strongly_convex"
    cfg2 = ExperimentConfig(N=10, m=4, algo="aasdcs", sigma=1.0, regime="convex")
    _, _, sched2 = build_experiment(cfg2)
    assert sched2.regime == "aasdcs_convex"


def test_run_experiment_smoke(tmp_path):
    cfg = parse_config(None, dict(
        topology="ring", m="4", N="1000", seeds="0,1,2", dim="2",
        log_every="100", out=str(tmp_path / "out"),
    ))
    out = run_experiment(cfg)
    files = sorted(p.name for p in out.iterdir())
    assert files == ["adpd_0.csv", "adpd_1.csv", "adpd_2.csv", "summary.csv"]


def test_run_determinism_bytes(tmp_path):
    for sub in ("a", "b"):
        cfg = parse_config(None, dict(
            m="4", N="300", seeds="7", dim="2", log_every="50",
            out=str(tmp_path / sub),
        ))
        run_experiment(cfg)
    assert (tmp_path / "a" / "adpd_7.csv").read_bytes() == (
        tmp_path / "b" / "adpd_7.csv"
    ).read_bytes()
    assert (tmp_path / "a" / "summary.csv").read_bytes() == (
        tmp_path / "b" / "summary.csv"
    ).read_bytes()


def test_summary_matches_raw_traces(tmp_path):
    cfg = parse_config(None, dict(
        m="5", N="400", seeds="0,1,2,3", dim="2", log_every="100",
        algo="aasdcs", sigma="1.0", out=str(tmp_path / "out"),
    ))
    out = run_experiment(cfg)
    traces = [RunTrace.from_csv(out / f"aasdcs_{s}.csv") for s in range(4)]
    with open(out / "summary.csv", newline="") as f:
        rows = list(csv.DictReader(f))
    for i, row in enumerate(rows):
        obj = np.array([t.objective[i] for t in traces])
        feas = np.array([t.feasibility[i] for t in traces])
        assert abs(float(row["objective_mean"]) - obj.mean()) < 1e-12
        assert abs(float(row["feasibility_mean"]) - feas.mean()) < 1e-12
        assert int(row["k"]) == traces[0].k[i]


def test_env_var_output_root(tmp_path, monkeypatch):
    monkeypatch.setenv("ASYNCPD_OUT_ROOT", str(tmp_path / "root"))
    cfg = ExperimentConfig(N=10)
    assert str(cfg.out_dir) == str(tmp_path / "root")


def test_cli_run_and_validate(tmp_path, capsys):
    cfg_path = write_cfg(tmp_path, SMOKE)
    out = tmp_path / "cli_out"
    rc = main(["run", "--config", str(cfg_path), "--N", "200", "--seeds", "0", "--out", str(out)])
    assert rc == 0
    assert (out / "adpd_0.csv").exists()
    rc = main(["validate", "--config", str(cfg_path)])
    assert rc == 0
    captured = capsys.readouterr()
    assert "ok" in captured.out


def test_cli_reference(tmp_path, capsys):
    cfg_path = write_cfg(tmp_path, SMOKE)
    out = tmp_path / "ref_out"
    rc = main(["reference", "--config", str(cfg_path), "--out", str(out)])
    assert rc == 0
    assert (out / "reference.csv").exists()


def test_cli_error_exit(tmp_path, capsys):
    cfg_path = write_cfg(tmp_path, "N=10\nbogus_key=1\n")
    rc = main(["run", "--config", str(cfg_path)])
    assert rc == 1
    assert "bogus_key" in capsys.readouterr().err


def test_console_entry_point(tmp_path):
    cfg_path = write_cfg(tmp_path, SMOKE)
    proc = subprocess.run(
        [sys.executable, "-m", "asyncpd.harness", "validate", "--config", str(cfg_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
