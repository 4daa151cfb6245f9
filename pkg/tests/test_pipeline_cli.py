import json
import subprocess
import sys

import numpy as np
import pytest

from dickesim import ConfigError, RunConfig, run_single, run_sweep
from dickesim.pipeline import CSV_COLUMNS


def small_config(out_dir, **overrides):
    base = dict(n=6, sigma=3.0, seeds=(2,), detunings=(5.0,), rabi=0.1,
                t_off=2.0, t_max=4.0, dt=0.01, stride=10, out_dir=str(out_dir))
    base.update(overrides)
    return RunConfig(**base)


def read_rows(path):
    lines = path.read_text().strip().splitlines()
    header = lines[0].split(",")
    rows = []
    for line in lines[1:]:
        cells = line.split(",")
        rows.append(dict(zip(header, cells)))
    return header, rows


def test_run_single_outputs(tmp_path):
    config = small_config(tmp_path)
    result = run_single(config, 5.0, 2)
    assert result.status == "ok"
    traj = tmp_path / "traj_d5_s2.csv"
    summary = tmp_path / "summary_d5_s2.json"
    assert traj.exists() and summary.exists()

    header, rows = read_rows(traj)
    assert header == list(CSV_COLUMNS)
    # 400 steps sampled every 10 -> 41 samples, cutoff step aligned
    assert len(rows) == 41
    assert rows[0]["f_sr"] == ""          # no excitation at t = 0
    assert rows[0]["c_value"] == "0.5"
    assert rows[1]["ss2_violated"] in ("true", "false")

    data = json.loads(summary.read_text())
    assert data["b0"] == pytest.approx(3 * 6 / 3.0**2)
    assert data["metadata"]["t_off_rounded"] == pytest.approx(2.0)
    assert "t_fsub_above_fsr" in data["crossings"]
    assert data["threshold_equivalence"]["sign_equivalent"] is True


def test_run_single_n1_never_entangled(tmp_path):
    config = small_config(tmp_path, n=1, seeds=(4,))
    result = run_single(config, 5.0, 4)
    assert result.status == "ok"
    assert result.summary["gamma_plus"] == 1.0
    assert result.summary["crossings"]["t_witness_below_half"] is None
    _, rows = read_rows(tmp_path / "traj_d5_s4.csv")
    excited = [r for r in rows if r["f_sr"] != ""]
    assert excited
    for row in excited:
        assert float(row["f_sr"]) == pytest.approx(1.0, abs=1e-12)
        assert row["ss2_violated"] == "false"


def test_rerun_reproduces_csv_bytes(tmp_path):
    config = small_config(tmp_path / "a")
    run_single(config, 5.0, 2)
    config_b = small_config(tmp_path / "b")
    run_single(config_b, 5.0, 2)
    a = (tmp_path / "a" / "traj_d5_s2.csv").read_bytes()
    b = (tmp_path / "b" / "traj_d5_s2.csv").read_bytes()
    assert a == b


def test_failed_run_leaves_no_partial_files(tmp_path):
    # over-dense request fails during cloud sampling
    config = small_config(tmp_path, n=30, sigma=0.05, min_separation=1.0)
    result = run_single(config, 5.0, 2)
    assert result.status == "error"
    assert "RejectionExhausted" in result.error
    assert list(tmp_path.glob("traj_*")) == []
    assert list(tmp_path.glob("summary_*")) == []


def test_sweep_three_detunings(tmp_path):
    config = small_config(tmp_path, n=40, sigma=4.0, detunings=(8.0, 9.0, 10.0),
                          seeds=(3,), t_off=4.0, t_max=6.0)
    sweep = run_sweep(config)
    assert sweep.all_ok
    assert len(sweep.results) == 3
    for d in (8, 9, 10):
        assert (tmp_path / f"traj_d{d}_s3.csv").exists()
    agg = (tmp_path / "aggregate.csv").read_text().strip().splitlines()
    assert len(agg) == 4
    assert agg[0].startswith("delta0,seed,status")

    # weaker drive response at larger detuning orders the witness curves
    # at the cutoff sample
    c_at_cutoff = {}
    for res in sweep.results:
        _, rows = read_rows(tmp_path / f"traj_d{res.detuning:g}_s3.csv")
        row = min(rows, key=lambda r: abs(float(r["t"]) - 4.0))
        c_at_cutoff[res.detuning] = float(row["c_value"])
    assert c_at_cutoff[8.0] >= c_at_cutoff[9.0] >= c_at_cutoff[10.0]


def test_sweep_empty_axis_rejected(tmp_path):
    with pytest.raises(ConfigError):
        run_sweep(small_config(tmp_path, detunings=()))
    with pytest.raises(ConfigError):
        run_sweep(small_config(tmp_path, seeds=()))


def test_sweep_distinct_seeds_produce_distinct_clouds(tmp_path):
    config = small_config(tmp_path, seeds=(1, 2))
    sweep = run_sweep(config)
    assert sweep.all_ok
    a = (tmp_path / "traj_d5_s1.csv").read_bytes()
    b = (tmp_path / "traj_d5_s2.csv").read_bytes()
    assert a != b
    assert (tmp_path / "summary_d5_s1.json").exists()
    assert (tmp_path / "summary_d5_s2.json").exists()


def test_sweep_continues_after_failures(tmp_path):
    config = small_config(tmp_path, n=30, sigma=0.05, min_separation=1.0,
                          detunings=(5.0, 6.0))
    sweep = run_sweep(config)
    assert not sweep.all_ok
    assert all(r.status == "error" for r in sweep.results)
    agg = (tmp_path / "aggregate.csv").read_text()
    assert "RejectionExhausted" in agg


def test_parallel_matches_serial(tmp_path):
    serial = small_config(tmp_path / "serial", n=20, detunings=(4.0, 6.0), jobs=1)
    parallel = small_config(tmp_path / "par", n=20, detunings=(4.0, 6.0), jobs=2)
    run_sweep(serial)
    run_sweep(parallel)
    for name in ("traj_d4_s2.csv", "traj_d6_s2.csv", "aggregate.csv"):
        assert ((tmp_path / "serial" / name).read_bytes()
                == (tmp_path / "par" / name).read_bytes())


def test_kernel_dump_round_trip(tmp_path):
    from dickesim import build_kernel, sample_cloud
    config = small_config(tmp_path, n=5, dump_kernel=True)
    result = run_single(config, 5.0, 2)
    assert result.status == "ok"
    blob = (tmp_path / "kernel_d5_s2.bin").read_bytes()
    assert len(blob) == 5 * 5 * 8          # complex64 = two float32s
    dumped = np.frombuffer(blob, dtype="<c8").reshape(5, 5)
    kern = build_kernel(sample_cloud(5, 3.0, seed=2, min_separation=0.1))
    assert np.allclose(dumped, kern.g_tilde, atol=1e-6)


def test_gamma_s_dump(tmp_path):
    config = small_config(tmp_path, n=5, store_gamma_s=True)
    result = run_single(config, 5.0, 2)
    assert result.status == "ok"
    with np.load(tmp_path / "gamma_s_d5_s2.npz") as data:
        assert data["gamma_s"].shape == (41, 4)
        assert data["times"].shape == (41,)


# ------------------------------------------------------------------ CLI

def run_cli(*args, env_extra=None):
    import os
    env = os.environ.copy()
    if env_extra:
        env.update(env_extra)
    return subprocess.run([sys.executable, "-m", "dickesim.cli", *args],
                          capture_output=True, text=True, env=env)


def test_cli_single_run(tmp_path):
    out = tmp_path / "runs"
    proc = run_cli("--n", "10", "--sigma", "3", "--seed", "1", "--delta0", "5",
                   "--rabi", "0.1", "--toff", "2", "--tmax", "3",
                   "--dt", "0.01", "--stride", "10", "--out-dir", str(out))
    assert proc.returncode == 0, proc.stderr
    assert (out / "traj_d5_s1.csv").exists()
    assert "ok" in proc.stdout


def test_cli_toml_config_with_override(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text(
        'n = 10\nsigma = 3.0\nseeds = [1]\ndetunings = [8.0]\nrabi = 0.1\n'
        't_off = 2.0\nt_max = 3.0\ndt = 0.01\nstride = 10\n'
        f'out_dir = "{tmp_path / "runs"}"\n')
    proc = run_cli("--config", str(cfg), "--delta0", "10")
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "runs" / "traj_d10_s1.csv").exists()
    assert not (tmp_path / "runs" / "traj_d8_s1.csv").exists()


def test_cli_config_error_exit_code(tmp_path):
    cfg = tmp_path / "bad.toml"
    cfg.write_text("detunings = []\n")
    proc = run_cli("--config", str(cfg))
    assert proc.returncode == 2
    assert "error" in proc.stderr


def test_cli_unknown_config_key(tmp_path):
    cfg = tmp_path / "bad.toml"
    cfg.write_text("frequency = 3\n")
    proc = run_cli("--config", str(cfg))
    assert proc.returncode == 2
    assert "unknown config keys" in proc.stderr


def test_cli_failure_exit_code(tmp_path):
    proc = run_cli("--n", "30", "--sigma", "0.05", "--min-sep", "1.0",
                   "--seed", "1", "--delta0", "5", "--tmax", "1", "--toff", "1",
                   "--out-dir", str(tmp_path / "runs"))
    assert proc.returncode == 1
    assert "RejectionExhausted" in proc.stderr


def test_cli_jobs_env_default(tmp_path):
    out = tmp_path / "runs"
    proc = run_cli("--n", "10", "--sigma", "3", "--seed", "1", "2",
                   "--delta0", "5", "--toff", "1", "--tmax", "2",
                   "--out-dir", str(out), env_extra={"DICKE_JOBS": "2"})
    assert proc.returncode == 0, proc.stderr
    assert (out / "aggregate.csv").exists()


def test_cli_bad_jobs_env(tmp_path):
    proc = run_cli("--n", "5", "--sigma", "3", "--seed", "1", "--delta0", "5",
                   "--toff", "1", "--tmax", "2",
                   "--out-dir", str(tmp_path / "runs"),
                   env_extra={"DICKE_JOBS": "many"})
    assert proc.returncode == 2
