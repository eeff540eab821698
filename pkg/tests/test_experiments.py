import json
from pathlib import Path

import pytest

from latticegrow.cli import main
from latticegrow.experiments import (
    ConfigError,
    ExperimentConfig,
    HardFailure,
    run_experiment,
)


def _cfg(**kw):
    cfg = ExperimentConfig()
    for k, v in kw.items():
        setattr(cfg, k, v)
    return cfg


def test_config_round_trips_losslessly():
    cfg = _cfg(kind="radial-g", model="lpp", dist="exp:1.0", n_grid="8,16",
               trials=10, seed=42, direction="1,1", workers=2, out="somewhere")
    again = ExperimentConfig.from_text(cfg.to_text())
    assert again == cfg


def test_config_parse_errors_name_the_problem():
    with pytest.raises(ConfigError, match="frobnicate"):
        ExperimentConfig.from_text("frobnicate = 3")
    with pytest.raises(ConfigError, match="trials"):
        ExperimentConfig.from_text("trials = many")
    with pytest.raises(ConfigError, match="key = value"):
        ExperimentConfig.from_text("just some words")


@pytest.mark.parametrize(
    "kw,field",
    [
        (dict(kind="exponents", trials=0, n_grid="8,16"), "trials"),
        (dict(kind="sideways", trials=5), "kind"),
        (dict(kind="radial-g", trials=5, n_grid="8,16", model=""), "model"),
        (dict(kind="radial-g", trials=5, n_grid="", model="lpp"), "n_grid"),
        (dict(kind="fpp-shape", trials=5, t=0.0), "t"),
        (dict(kind="eden", steps=0), "steps"),
        (dict(kind="radial-g", trials=5, n_grid="8,16", model="lpp", dist="zeta:2"), "dist"),
        (dict(kind="radial-g", trials=5, n_grid="8,16", model="lpp", workers=0), "workers"),
    ],
)
def test_validation_rejects_naming_field(kw, field):
    with pytest.raises(ConfigError, match=field):
        _cfg(**kw).validate()


def _read_all_csvs(d: Path) -> dict:
    return {p.name: p.read_bytes() for p in sorted(d.glob("*.csv"))}


def test_identical_configs_identical_bytes(tmp_path):
    outs = []
    for sub in ("a", "b"):
        cfg = _cfg(kind="radial-g", model="lpp", dist="exp:1.0", direction="1,1",
                   n_grid="4,8", trials=12, seed=7, out=str(tmp_path / sub))
        run_experiment(cfg)
        outs.append(_read_all_csvs(tmp_path / sub))
    assert outs[0] == outs[1]


def test_worker_count_independence(tmp_path):
    outs = []
    for sub, workers in (("w1", 1), ("w2", 2)):
        cfg = _cfg(kind="radial-g", model="lpp", dist="exp:1.0", direction="1,1",
                   n_grid="4,8", trials=12, seed=7, workers=workers,
                   out=str(tmp_path / sub))
        run_experiment(cfg)
        outs.append(_read_all_csvs(tmp_path / sub))
    assert outs[0] == outs[1]


def test_summary_contains_reproducibility_and_reference(tmp_path):
    cfg = _cfg(kind="radial-g", model="lpp", dist="exp:1.0", direction="1,1",
               n_grid="4,8", trials=10, seed=3, out=str(tmp_path / "o"))
    summary = run_experiment(cfg)
    assert summary["estimates"]["exact_g_reference"] == pytest.approx(4.0)
    blob = json.loads((tmp_path / "o" / "summary.json").read_text())
    assert blob["reproducibility"]["config"]["seed"] == 3
    assert blob["reproducibility"]["package_version"]
    assert "generated_at" in blob["reproducibility"]


def test_oracle_check_runs_clean(tmp_path):
    cfg = _cfg(kind="oracle-check", dist="unif:0.5:1.5", trials=3, out=str(tmp_path / "o"))
    summary = run_experiment(cfg)
    assert summary["estimates"]["mismatches"] == 0
    assert summary["estimates"]["seeds_checked"] == 3


def test_tasep_coupling_experiment(tmp_path):
    cfg = _cfg(kind="tasep-coupling", dist="exp:1.0", steps=12, trials=3,
               seed=11, out=str(tmp_path / "o"))
    summary = run_experiment(cfg)
    assert summary["estimates"]["table_mismatches"] == 0
    assert summary["estimates"]["probe_failures"] == 0


def test_idla_experiment_writes_roundness(tmp_path):
    cfg = _cfg(kind="idla", steps=400, seed=2, out=str(tmp_path / "o"))
    summary = run_experiment(cfg)
    assert (tmp_path / "o" / "idla_roundness.csv").exists()
    assert summary["estimates"]["roundness_ratio"] > 1.0


def test_eden_experiment(tmp_path):
    cfg = _cfg(kind="eden", steps=200, seed=5, out=str(tmp_path / "o"))
    summary = run_experiment(cfg)
    assert (tmp_path / "o" / "eden_trace.csv").exists()
    assert summary["estimates"]["outradius"] > 0


def test_flat_edge_experiment(tmp_path):
    cfg = _cfg(kind="flat-edge", dist="twopoint:0.8", n_grid="60", trials=4,
               seed=1, out=str(tmp_path / "o"))
    summary = run_experiment(cfg)
    assert summary["estimates"]["mean_ratio_last"] >= 1.0


def test_flat_edge_rejects_wrong_dist(tmp_path):
    cfg = _cfg(kind="flat-edge", dist="exp:1.0", n_grid="60", trials=2,
               out=str(tmp_path / "o"))
    with pytest.raises(ConfigError, match="dist"):
        run_experiment(cfg)


# -- CLI ------------------------------------------------------------------------


def test_cli_lpp_exact_values(capsys):
    assert main(["lpp-exact", "--model", "exp", "--x", "1,1"]) == 0
    assert float(capsys.readouterr().out.strip()) == 4.0
    assert main(["lpp-exact", "--model", "geom", "--p", "0.5", "--x", "1,1"]) == 0
    out = float(capsys.readouterr().out.strip())
    assert out == pytest.approx(4.0 + 2.0 * 2.0**0.5)


def test_cli_lpp_exact_missing_p_is_config_error(capsys):
    assert main(["lpp-exact", "--model", "geom", "--x", "1,1"]) == 2


def test_cli_config_error_exit_code(tmp_path):
    rc = main(["radial-g", "--model", "lpp", "--dist", "nope:1",
               "--n-grid", "4,8", "--trials", "5", "--out", str(tmp_path / "o")])
    assert rc == 2


def test_cli_runs_experiment_and_reports_files(tmp_path, capsys):
    rc = main(["radial-g", "--model", "lpp", "--dist", "exp:1.0",
               "--direction", "1,1", "--n-grid", "4,8", "--trials", "6",
               "--seed", "2", "--out", str(tmp_path / "o")])
    assert rc == 0
    out = capsys.readouterr().out
    assert "radial_g.csv" in out and "summary.json" in out
    assert (tmp_path / "o" / "radial_g.csv").exists()


def test_cli_config_file_with_flag_override(tmp_path):
    cfgfile = tmp_path / "exp.cfg"
    cfgfile.write_text(
        "kind = radial-g\nmodel = lpp\ndist = exp:1.0\ndirection = 1,1\n"
        "n_grid = 4,8\ntrials = 6\nseed = 2\nout = IGNORED\n"
    )
    rc = main(["radial-g", "--config", str(cfgfile), "--out", str(tmp_path / "o")])
    assert rc == 0
    assert (tmp_path / "o" / "summary.json").exists()


def test_cli_hard_failure_exit_code(monkeypatch, tmp_path):
    import latticegrow.cli as cli_mod

    def boom(cfg):
        raise HardFailure("synthetic")

    monkeypatch.setattr(cli_mod, "run_experiment", boom)
    rc = main(["oracle-check", "--dist", "unif:0.5:1.5", "--trials", "1",
               "--out", str(tmp_path / "o")])
    assert rc == 3
