"""Single-run and sweep orchestration with structured file output.

A run is the full chain cloud -> kernel -> integration -> per-sample
decomposition and witness evaluation. Each (detuning, seed) pair writes
an isolated trajectory CSV plus a summary JSON; sweeps add an aggregate
CSV of the summary rows. Outputs are deterministic for a given
configuration (floats serialized as shortest round-trip decimals).
"""
from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._version import __version__
from .cloud import Distribution, sample_cloud, summarize, DEFAULT_MIN_SEPARATION
from .dynamics import DEFAULT_DT, DriveSchedule, TimeSeries, convergence_check, integrate
from .errors import ConfigError
from .kernel import DEFAULT_K0_DIR, build_kernel, collective_rates
from .tdbasis import project
from .witness import (VIOLATION_GUARD, evaluate_inequalities, first_crossing,
                      spin_moments, threshold_equivalence_check)

CSV_COLUMNS = ("t", "P", "p_plus", "p_sub", "f_sr", "f_sub", "jz",
               "var_x", "var_y", "var_z", "c_value", "ss2_violated",
               "ss1_slack", "ss4_slack")

AGGREGATE_COLUMNS = ("delta0", "seed", "status", "b0", "gamma_plus",
                     "f_sub_at_cutoff", "t_fsub_above_fsr",
                     "t_fsr_below_1_over_n", "t_witness_below_half",
                     "trajectory_csv", "summary_json", "error")


@dataclass(frozen=True)
class RunConfig:
    """Parameters for a single run or a (detuning x seed) sweep."""

    n: int = 1000
    sigma: float = 10.0
    distribution: str = Distribution.GAUSSIAN.value
    seeds: tuple = (1,)
    min_separation: float = DEFAULT_MIN_SEPARATION
    k0_dir: tuple = DEFAULT_K0_DIR
    rabi: float = 0.1
    detunings: tuple = (10.0,)
    t_off: float = 20.0
    t_max: float = 30.0
    dt: float = DEFAULT_DT
    stride: int = 10
    out_dir: str = "runs"
    jobs: int = 1
    dump_kernel: bool = False
    store_gamma_s: bool = False
    check_convergence: bool = False

    def validate(self) -> None:
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if not self.detunings:
            raise ConfigError("at least one detuning is required")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")


@dataclass
class RunResult:
    detuning: float
    seed: int
    status: str                      # "ok" or "error"
    summary: dict | None = None
    trajectory_csv: str | None = None
    summary_json: str | None = None
    error: str | None = None


@dataclass
class SweepResult:
    results: list
    aggregate_csv: str | None = None

    @property
    def all_ok(self) -> bool:
        return all(r.status == "ok" for r in self.results)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _jsonable(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return value


def analyze_series(series: TimeSeries) -> list[dict]:
    """Per-sample decomposition + witness rows in CSV column order."""
    n = series.betas.shape[1]
    rows = []
    for i in range(len(series)):
        state = series.state_at(i)
        dec = project(state)
        mom = spin_moments(state)
        ineq = evaluate_inequalities(mom, n)
        rows.append({
            "t": float(series.times[i]),
            "P": mom.mean_excitation,
            "p_plus": dec.p_plus,
            "p_sub": dec.p_sub,
            "f_sr": dec.f_sr,
            "f_sub": dec.f_sub,
            "jz": mom.jz,
            "var_x": mom.var_x,
            "var_y": mom.var_y,
            "var_z": mom.var_z,
            "c_value": mom.c_value,
            "ss2_violated": ineq.ss2_violated,
            "ss1_slack": ineq.ss1_slack,
            "ss4_slack": ineq.ss4_slack,
        })
    return rows


def write_trajectory_csv(rows: list[dict], path: Path) -> None:
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        lines.append(",".join(_fmt(row[c]) for c in CSV_COLUMNS))
    path.write_text("\n".join(lines) + "\n")


def _crossings(rows: list[dict], n: int) -> dict:
    times = np.array([r["t"] for r in rows])
    margin = np.array([math.nan if r["f_sr"] is None else r["f_sr"] - r["f_sub"]
                       for r in rows])
    f_sr = np.array([math.nan if r["f_sr"] is None else r["f_sr"] for r in rows])
    c_val = np.array([r["c_value"] for r in rows])
    # witness/fraction onsets use the same guard band as the violation flag
    return {
        "t_fsub_above_fsr": first_crossing(times, margin, 0.0),
        "t_fsr_below_1_over_n": first_crossing(times, f_sr,
                                               (1.0 - VIOLATION_GUARD) / n),
        "t_witness_below_half": first_crossing(times, c_val,
                                               0.5 - VIOLATION_GUARD),
    }


def run_single(config: RunConfig, detuning: float, seed: int) -> RunResult:
    """Execute one (detuning, seed) run and write its output files.

    Partially written files are removed if any stage fails.
    """
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tag = f"d{detuning:g}_s{seed}"
    traj_path = out_dir / f"traj_{tag}.csv"
    summary_path = out_dir / f"summary_{tag}.json"
    created: list[Path] = []
    t_start = time.perf_counter()
    try:
        cloud = sample_cloud(config.n, config.sigma, config.distribution,
                             seed=seed, min_separation=config.min_separation)
        kern = build_kernel(cloud, config.k0_dir)
        schedule = DriveSchedule(rabi=config.rabi, detuning=detuning,
                                 t_max=config.t_max, t_off=config.t_off,
                                 dt=config.dt)
        series = integrate(kern, schedule, stride=config.stride, cloud=cloud)
        rows = analyze_series(series)
        series.records = rows

        geometry = summarize(cloud)
        rates = collective_rates(kern)
        threshold = threshold_equivalence_check(series)

        t_off_rounded = series.metadata["t_off_rounded"]
        cutoff_row = None
        if t_off_rounded is not None:
            for row in rows:
                if abs(row["t"] - t_off_rounded) < 0.5 * config.dt:
                    cutoff_row = row
                    break

        summary = {
            "parameters": {
                "n": config.n, "sigma": config.sigma,
                "distribution": Distribution(config.distribution).value,
                "seed": seed, "min_separation": config.min_separation,
                "k0_dir": list(config.k0_dir), "rabi": config.rabi,
                "detuning": detuning, "t_off": _jsonable(config.t_off),
                "t_max": config.t_max, "dt": config.dt, "stride": config.stride,
            },
            "metadata": {
                "version": __version__,
                "dt": series.metadata["dt"],
                "t_off_rounded": t_off_rounded,
                "warnings": series.metadata["warnings"],
                "exclusion_note": ("pairs closer than min_separation are "
                                   "resampled during cloud generation"),
                "runtime_s": None,  # filled below
            },
            "b0": geometry.b0,
            "mean_nn_distance": geometry.mean_nn_distance,
            "gamma_plus": rates.gamma_plus,
            "f_sub_at_cutoff": None if cutoff_row is None else cutoff_row["f_sub"],
            "crossings": _crossings(rows, config.n),
            "threshold_equivalence": {
                "sign_equivalent": threshold.sign_equivalent,
                "crossing_gap": threshold.crossing_gap,
                "within_dt": threshold.within_dt,
            },
        }
        if config.check_convergence:
            report = convergence_check(kern, schedule, stride=config.stride)
            summary["convergence"] = {
                "dt": report.dt,
                "max_rel_deviation": report.max_rel_deviation,
                "status": report.status,
                "flagged": report.flagged,
            }
        summary["metadata"]["runtime_s"] = round(time.perf_counter() - t_start, 3)

        created.append(traj_path)
        write_trajectory_csv(rows, traj_path)
        if config.dump_kernel:
            kernel_path = out_dir / f"kernel_{tag}.bin"
            created.append(kernel_path)
            # row-major complex64 pairs, little-endian
            kernel_path.write_bytes(np.ascontiguousarray(kern.g_tilde).astype("<c8").tobytes())
            summary["kernel_dump"] = kernel_path.name
        if config.store_gamma_s:
            gamma_path = out_dir / f"gamma_s_{tag}.npz"
            created.append(gamma_path)
            gammas = np.asarray([project(series.state_at(i)).gamma
                                 for i in range(len(series))])
            np.savez_compressed(gamma_path, times=series.times, gamma_s=gammas)
            summary["gamma_s_dump"] = gamma_path.name
        created.append(summary_path)
        summary_path.write_text(json.dumps(summary, indent=2, default=_jsonable) + "\n")
    except Exception as exc:
        for path in created:
            path.unlink(missing_ok=True)
        return RunResult(detuning=detuning, seed=seed, status="error",
                         error=f"{type(exc).__name__}: {exc}")
    return RunResult(detuning=detuning, seed=seed, status="ok",
                     summary=summary, trajectory_csv=str(traj_path),
                     summary_json=str(summary_path))


def _run_task(args) -> RunResult:
    config, detuning, seed = args
    return run_single(config, detuning, seed)


def run_sweep(config: RunConfig) -> SweepResult:
    """Run every (detuning, seed) combination; failures are recorded and
    the sweep continues. Writes an aggregate CSV of summary rows."""
    config.validate()
    tasks = [(config, d, s) for d in config.detunings for s in config.seeds]
    if config.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_run_task, tasks))
    else:
        results = [_run_task(t) for t in tasks]

    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    aggregate_path = out_dir / "aggregate.csv"
    lines = [",".join(AGGREGATE_COLUMNS)]
    for res in results:
        if res.status == "ok":
            s = res.summary
            row = (res.detuning, res.seed, res.status, s["b0"], s["gamma_plus"],
                   s["f_sub_at_cutoff"], s["crossings"]["t_fsub_above_fsr"],
                   s["crossings"]["t_fsr_below_1_over_n"],
                   s["crossings"]["t_witness_below_half"],
                   Path(res.trajectory_csv).name, Path(res.summary_json).name, None)
        else:
            # error text must not break the CSV row structure
            safe = (res.error or "").replace(",", ";").replace("\n", " ")
            row = (res.detuning, res.seed, res.status, None, None, None,
                   None, None, None, None, None, safe)
        lines.append(",".join(_fmt(v) for v in row))
    aggregate_path.write_text("\n".join(lines) + "\n")
    return SweepResult(results=results, aggregate_csv=str(aggregate_path))
