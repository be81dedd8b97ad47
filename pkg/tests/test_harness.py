import json
import subprocess
import sys

import numpy as np
import pytest

from shmod import (
    ConfigError,
    ReplayError,
    StudyConfig,
    StudyRecord,
    emit_plotdata,
    parse_config_file,
    replay,
    run_study,
)
from shmod.studies import append_record, load_records, record_key


TINY = dict(eps_list=(0.2,), nu_list=(0.5,), n_seeds=2, n_points=512,
            periods=32, dt=1e-3, t_end=0.05)


def tiny_cfg(out_dir, **extra):
    kw = dict(TINY)
    kw.update(extra)
    return StudyConfig.for_study("theorem2", out_dir=str(out_dir), **kw)


def test_config_validation_rejects_bad_input(tmp_path):
    with pytest.raises(ConfigError):
        StudyConfig.for_study("no-such-study", out_dir=str(tmp_path))
    with pytest.raises(ConfigError):
        tiny_cfg(tmp_path, eps_list=()).validate()
    with pytest.raises(ConfigError):
        tiny_cfg(tmp_path, n_seeds=0).validate()
    with pytest.raises(ConfigError):
        # bands overlap at this bandwidth and eps
        tiny_cfg(tmp_path, delta=0.25).validate()


def test_config_roundtrips_through_public_dict(tmp_path):
    cfg = tiny_cfg(tmp_path)
    again = StudyConfig.from_public_dict(cfg.public_dict())
    assert again == cfg


def test_parse_config_file(tmp_path):
    path = tmp_path / "study.cfg"
    path.write_text(
        "# comment\n"
        "study = theorem2\n"
        "eps = 0.2, 0.1\n"
        "seeds = 3\n"
        "dt = 0.002\n"
    )
    kw = parse_config_file(path)
    assert kw["study"] == "theorem2"
    assert kw["eps_list"] == (0.2, 0.1)
    assert kw["n_seeds"] == 3
    assert kw["dt"] == 0.002

    bad = tmp_path / "bad.cfg"
    bad.write_text("frobnicate = 1\n")
    with pytest.raises(ConfigError):
        parse_config_file(bad)
    bad.write_text("dt = banana\n")
    with pytest.raises(ConfigError):
        parse_config_file(bad)


def test_record_roundtrip_is_bit_exact(tmp_path):
    rec = StudyRecord(study="theorem2", params={"eps": 0.2, "nu": 0.5},
                      seed=1, diagnostics={"sup_diff": 0.1234567890123456789},
                      status="ok", eps_effective=0.2, wall_time=0.5)
    path = tmp_path / "records.csv"
    append_record(path, rec)
    append_record(path, rec)
    loaded = load_records(path)
    assert len(loaded) == 2
    assert loaded[0].key == rec.key
    assert loaded[0].diagnostics["sup_diff"] == rec.diagnostics["sup_diff"]


def test_tiny_study_runs_and_resumes(tmp_path):
    cfg = tiny_cfg(tmp_path / "out")
    summary = run_study(cfg)
    recs = load_records(tmp_path / "out" / "records.csv")
    assert len(recs) == 2
    assert all(r.status == "ok" for r in recs)
    assert "fits" in summary
    # a second invocation adds no rows (all cells already done)
    run_study(cfg)
    assert len(load_records(tmp_path / "out" / "records.csv")) == 2


def test_study_is_deterministic_across_thread_counts(tmp_path):
    s1 = tiny_cfg(tmp_path / "one", threads=1)
    s2 = tiny_cfg(tmp_path / "two", threads=2)
    run_study(s1)
    run_study(s2)
    d1 = {r.key: r.diagnostics_repr() for r in
          load_records(tmp_path / "one" / "records.csv")}
    d2 = {r.key: r.diagnostics_repr() for r in
          load_records(tmp_path / "two" / "records.csv")}
    assert d1 == d2


def test_replay_verifies_and_detects_tampering(tmp_path):
    out = tmp_path / "out"
    cfg = tiny_cfg(out, n_seeds=1)
    run_study(cfg)
    result = replay(str(out))
    assert result["ok"] and result["mismatches"] == []
    # changing the step size is a config mismatch, not a replay result
    with pytest.raises(ConfigError):
        replay(str(out), overrides={"dt": 2e-3})
    manifest = json.loads((out / "manifest.json").read_text())
    manifest["version"] = "0.0"
    (out / "manifest.json").write_text(json.dumps(manifest))
    with pytest.raises(ReplayError):
        replay(str(out))


def test_existing_output_with_other_config_is_rejected(tmp_path):
    out = tmp_path / "out"
    run_study(tiny_cfg(out, n_seeds=1))
    with pytest.raises(ConfigError):
        run_study(tiny_cfg(out, n_seeds=1, dt=2e-3))


def test_plotdata_rows_match_ladder(tmp_path):
    out = tmp_path / "out"
    cfg = tiny_cfg(out, eps_list=(0.2, 0.1), n_seeds=1)
    run_study(cfg)
    emit_plotdata(str(out))
    lines = (out / "plot_slope_sup_diff.csv").read_text().strip().splitlines()
    assert len(lines) == 1 + 2  # header + one row per eps


def _cli(*args, env=None):
    import os

    full_env = dict(os.environ)
    if env:
        full_env.update(env)
    return subprocess.run([sys.executable, "-m", "shmod.cli", *args],
                          capture_output=True, text=True, env=full_env)


def test_cli_exit_codes(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("study = nonexistent\n")
    r = _cli("study", "--config", str(cfg), "--out", str(tmp_path / "o"))
    assert r.returncode == 2

    r = _cli("simulate-sh", "--eps", "0.2", "--out", str(tmp_path / "sim"),
             "--dt", "1e-3", "--t-end", "0.01", "--delta", "0.125")
    assert r.returncode == 0, r.stderr
    assert (tmp_path / "sim" / "final.field").exists()
    assert (tmp_path / "sim" / "kernel_P1.csv").exists()


def test_cli_spectrum_reads_field(tmp_path):
    sim = tmp_path / "sim"
    r = _cli("simulate-sh", "--eps", "0.2", "--out", str(sim),
             "--dt", "1e-3", "--t-end", "0.01", "--delta", "0.125")
    assert r.returncode == 0, r.stderr
    r = _cli("spectrum", "--field", str(sim / "final.field"))
    assert r.returncode == 0, r.stderr
    csv_path = sim / "final.spectrum.csv"
    assert csv_path.exists()
    rows = csv_path.read_text().strip().splitlines()[1:]
    data = np.array([[float(v) for v in row.split(",")] for row in rows])
    k, mag = data[:, 0], data[:, 1]
    # the spectrum must concentrate at the carrier wavenumber 1/eps
    peak = abs(k[np.argmax(mag)])
    assert peak == pytest.approx(1.0 / 0.2, rel=0.05)


def test_cli_uses_output_env_root(tmp_path):
    env = {"SHMOD_OUT": str(tmp_path)}
    r = _cli("simulate-sh", "--eps", "0.2",
             "--dt", "1e-3", "--t-end", "0.01", "--delta", "0.125", env=env)
    assert r.returncode == 0, r.stderr
    assert (tmp_path / "simulate-sh" / "final.field").exists()


def test_record_key_is_stable():
    k1 = record_key("theorem2", {"eps": 0.2, "nu": 0.5}, 3)
    k2 = record_key("theorem2", {"nu": 0.5, "eps": 0.2}, 3)
    assert k1 == k2
    assert "seed=3" in k1
