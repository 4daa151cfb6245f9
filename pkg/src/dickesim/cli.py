"""Command-line front end: TOML configuration with flag overrides.

A single (detuning, seed) pair behaves as one run; multiple values sweep
every combination in a worker pool. Exit code 0 means every requested run
succeeded.
"""
from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ConfigError, DickesimError
from .pipeline import RunConfig, run_sweep

_CONFIG_FIELDS = {f.name for f in dataclasses.fields(RunConfig)}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="dickesim",
        description=("Simulate collective emission of a driven cold-atom cloud: "
                     "integrate the coupled-dipole equations, decompose the "
                     "excitation into superradiant/subradiant weights and "
                     "evaluate collective-spin entanglement witnesses."),
    )
    p.add_argument("--config", type=Path, help="TOML file; flags override its values")
    p.add_argument("--n", type=int, help="number of atoms")
    p.add_argument("--sigma", type=float, help="gaussian width k0*sigma_r (or ball radius)")
    p.add_argument("--dist", choices=["gaussian", "uniform_ball"], help="position distribution")
    p.add_argument("--seed", type=int, nargs="+", help="RNG seed(s); several values sweep")
    p.add_argument("--delta0", type=float, nargs="+",
                   help="laser detuning(s) in linewidth units; several values sweep")
    p.add_argument("--rabi", type=float, help="Rabi frequency in linewidth units")
    p.add_argument("--toff", type=float, help="laser cutoff time (inf = never)")
    p.add_argument("--tmax", type=float, help="end time")
    p.add_argument("--dt", type=float, help="integrator step")
    p.add_argument("--stride", type=int, help="snapshot every this many steps")
    p.add_argument("--min-sep", type=float, dest="min_sep",
                   help="pairwise exclusion distance (k0*r units)")
    p.add_argument("--jobs", type=int,
                   help="sweep worker processes (default: env DICKE_JOBS or 1)")
    p.add_argument("--out-dir", type=Path, dest="out_dir", help="output directory")
    p.add_argument("--dump-kernel", action="store_true", default=None,
                   help="dump the coupling matrix (row-major complex64, little-endian)")
    p.add_argument("--store-gamma-s", action="store_true", default=None,
                   help="store the antisymmetric coefficients per sample (npz)")
    p.add_argument("--check-convergence", action="store_true", default=None,
                   help="rerun at dt/2 and report the step-halving deviation")
    return p


_FLAG_TO_FIELD = {
    "n": "n", "sigma": "sigma", "dist": "distribution", "seed": "seeds",
    "delta0": "detunings", "rabi": "rabi", "toff": "t_off", "tmax": "t_max",
    "dt": "dt", "stride": "stride", "min_sep": "min_separation", "jobs": "jobs",
    "out_dir": "out_dir", "dump_kernel": "dump_kernel",
    "store_gamma_s": "store_gamma_s", "check_convergence": "check_convergence",
}


def load_config(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    if args.config is not None:
        try:
            raw = tomllib.loads(Path(args.config).read_text())
        except (OSError, tomllib.TOMLDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        unknown = set(raw) - _CONFIG_FIELDS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        values.update(raw)

    for flag, fieldname in _FLAG_TO_FIELD.items():
        val = getattr(args, flag)
        if val is not None:
            values[fieldname] = val

    if "jobs" not in values:
        env_jobs = os.environ.get("DICKE_JOBS")
        if env_jobs:
            try:
                values["jobs"] = int(env_jobs)
            except ValueError as exc:
                raise ConfigError(f"DICKE_JOBS={env_jobs!r} is not an integer") from exc

    for key in ("seeds", "detunings", "k0_dir"):
        if key in values:
            values[key] = tuple(values[key]) if isinstance(values[key], (list, tuple)) \
                else (values[key],)
    if "out_dir" in values:
        values["out_dir"] = str(values["out_dir"])

    try:
        config = RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    config.validate()
    return config


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        sweep = run_sweep(config)
    except DickesimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    for res in sweep.results:
        if res.status == "ok":
            cross = res.summary["crossings"]
            print(f"ok    delta0={res.detuning:g} seed={res.seed} "
                  f"f_sub(cutoff)={_short(res.summary['f_sub_at_cutoff'])} "
                  f"t[f_sub>f_sr]={_short(cross['t_fsub_above_fsr'])} "
                  f"t[C<1/2]={_short(cross['t_witness_below_half'])} "
                  f"-> {res.trajectory_csv}")
        else:
            print(f"error delta0={res.detuning:g} seed={res.seed}: {res.error}",
                  file=sys.stderr)
    if len(sweep.results) > 1:
        print(f"aggregate -> {sweep.aggregate_csv}")
    return 0 if sweep.all_ok else 1


def _short(value) -> str:
    return "n/a" if value is None else f"{value:.4g}"


if __name__ == "__main__":
    raise SystemExit(main())
