"""Render trajectory CSV files into the three standard figures.

Rendering is a pure function of the CSV contents (plus optional summary
sidecars for labels and guide values); no physics is recomputed here.

Figure kinds:
  excitation -- mean excited-state population P on a log scale vs time,
                with a marker at the drive cutoff;
  witness    -- the collective-variance witness C vs time per input file,
                with the C = 1/2 guide and a zoom panel around it;
  fractions  -- superradiant/subradiant fractions vs time with the 1/N
                guide line.

Time axes are labeled in linewidth units. Each render writes both a PNG
and an SVG next to the requested output path.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
matplotlib.use("Agg")  # file output only, no display required
import matplotlib.pyplot as plt
import numpy as np

KINDS = ("excitation", "witness", "fractions")

REQUIRED_COLUMNS = {
    "excitation": ("t", "P"),
    "witness": ("t", "c_value"),
    "fractions": ("t", "f_sr", "f_sub"),
}

# Okabe-Ito palette: distinguishable under common color-vision deficiencies
PALETTE = ("#0072B2", "#D55E00", "#009E73", "#CC79A7",
           "#56B4E9", "#E69F00", "#000000", "#F0E442")


class FigureError(Exception):
    """Base class for rendering errors."""


class MissingColumn(FigureError):
    """A required CSV column (or required parameter) is absent."""


class EmptyInput(FigureError):
    """No input files, or an input carries no data rows."""


@dataclass(frozen=True)
class FigureSpec:
    inputs: tuple
    kind: str
    output: Path
    xlim: tuple | None = None
    ylim: tuple | None = None
    n_atoms: int | None = None       # fractions guide; sidecar value if None
    t_off: float | None = None       # excitation cutoff marker override
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise FigureError(f"unknown figure kind {self.kind!r}; "
                              f"expected one of {KINDS}")
        if not self.inputs:
            raise EmptyInput("no input files given")


def read_trajectory(path: str | Path, required: tuple) -> dict:
    """Parse a trajectory CSV into column arrays (NaN for absent cells)."""
    path = Path(path)
    lines = path.read_text().strip().splitlines()
    if not lines:
        raise EmptyInput(f"{path} is empty")
    header = lines[0].split(",")
    missing = [c for c in required if c not in header]
    if missing:
        raise MissingColumn(f"{path} lacks column(s) {missing}")
    if len(lines) < 2:
        raise EmptyInput(f"{path} has no data rows")
    raw = {name: [] for name in header}
    for line in lines[1:]:
        for name, cell in zip(header, line.split(",")):
            if cell in ("", "nan"):
                raw[name].append(math.nan)
            elif cell in ("true", "false"):
                raw[name].append(1.0 if cell == "true" else 0.0)
            else:
                raw[name].append(float(cell))
    return {name: np.asarray(vals) for name, vals in raw.items()}


def sidecar_summary(csv_path: str | Path) -> dict | None:
    """Locate the summary JSON written alongside a trajectory CSV."""
    csv_path = Path(csv_path)
    candidates = []
    if csv_path.name.startswith("traj_"):
        candidates.append(csv_path.with_name(
            "summary_" + csv_path.name[len("traj_"):]).with_suffix(".json"))
    candidates.append(csv_path.with_suffix(".summary.json"))
    for cand in candidates:
        if cand.exists():
            try:
                return json.loads(cand.read_text())
            except (OSError, json.JSONDecodeError):
                return None
    return None


def _curve_label(path: Path, summary: dict | None) -> str:
    if summary:
        detuning = summary.get("parameters", {}).get("detuning")
        if detuning is not None:
            return f"detuning {detuning:g}"
    return path.stem


def _save(fig, output: Path) -> list[Path]:
    output = Path(output)
    output.parent.mkdir(parents=True, exist_ok=True)
    base = output.with_suffix("")
    paths = [base.with_suffix(".png"), base.with_suffix(".svg")]
    for p in paths:
        fig.savefig(p, bbox_inches="tight", dpi=150)
    return paths


def _render_excitation(spec: FigureSpec, ax) -> None:
    if len(spec.inputs) != 1:
        raise FigureError("excitation figure expects exactly one input")
    path = Path(spec.inputs[0])
    data = read_trajectory(path, REQUIRED_COLUMNS["excitation"])
    summary = sidecar_summary(path)
    positive = data["P"] > 0
    ax.semilogy(data["t"][positive], data["P"][positive],
                color=PALETTE[0], lw=1.5)
    t_off = spec.t_off
    if t_off is None and summary:
        t_off = summary.get("metadata", {}).get("t_off_rounded")
    if t_off is not None:
        ax.axvline(t_off, color="0.4", ls="--", lw=1.0, label="drive cutoff")
        ax.legend(frameon=False)
    ax.set_ylabel(r"$P=\frac{1}{N}\sum_j |\beta_j|^2$")


def _render_witness(spec: FigureSpec, ax) -> None:
    curves = []
    for i, raw in enumerate(spec.inputs):
        path = Path(raw)
        data = read_trajectory(path, REQUIRED_COLUMNS["witness"])
        label = _curve_label(path, sidecar_summary(path))
        color = PALETTE[i % len(PALETTE)]
        ax.plot(data["t"], data["c_value"], color=color, lw=1.5, label=label)
        curves.append((data["t"], data["c_value"], color))
    ax.axhline(0.5, color="black", ls=":", lw=1.0)
    ax.set_ylabel(r"$C=[(\Delta J_x)^2+(\Delta J_y)^2+(\Delta J_z)^2]/N$")
    ax.legend(frameon=False)

    # zoom panel around the C = 1/2 boundary
    c_all = np.concatenate([c for _, c, _ in curves])
    t_all = np.concatenate([t for t, _, _ in curves])
    below = c_all < 0.5
    if below.any():
        t_lo = float(t_all[below].min()) - 2.0
        t_hi = float(t_all.max())
        depth = float((0.5 - c_all[below]).max())
    else:
        t_lo, t_hi = float(t_all.min()), float(t_all.max())
        depth = float(np.abs(c_all - 0.5).max()) or 1e-6
    pad = max(depth * 1.5, 1e-9)
    inset = ax.inset_axes([0.55, 0.12, 0.42, 0.45])
    for t, c, color in curves:
        inset.plot(t, c, color=color, lw=1.0)
    inset.axhline(0.5, color="black", ls=":", lw=0.8)
    inset.set_xlim(t_lo, t_hi)
    inset.set_ylim(0.5 - pad, 0.5 + pad)
    inset.tick_params(labelsize=7)


def _render_fractions(spec: FigureSpec, ax) -> None:
    if len(spec.inputs) != 1:
        raise FigureError("fractions figure expects exactly one input")
    path = Path(spec.inputs[0])
    data = read_trajectory(path, REQUIRED_COLUMNS["fractions"])
    summary = sidecar_summary(path)
    n = spec.n_atoms
    if n is None and summary:
        n = summary.get("parameters", {}).get("n")
    if n is None:
        raise MissingColumn(
            "fractions figure needs the atom number for the 1/N guide; "
            "pass n_atoms/--n or keep the summary JSON next to the CSV")
    ax.plot(data["t"], data["f_sr"], color=PALETTE[0], lw=1.5,
            label=r"$f_{\mathrm{SR}}$")
    ax.plot(data["t"], data["f_sub"], color=PALETTE[1], lw=1.5, ls="--",
            label=r"$f_{\mathrm{sub}}$")
    ax.axhline(1.0 / n, color="black", ls=":", lw=1.0, label=r"$1/N$")
    ax.set_ylabel("fraction of excitation")
    ax.legend(frameon=False)


_RENDERERS = {
    "excitation": _render_excitation,
    "witness": _render_witness,
    "fractions": _render_fractions,
}


def render(spec: FigureSpec):
    """Draw the requested figure; returns (matplotlib figure, output paths)."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    try:
        _RENDERERS[spec.kind](spec, ax)
        ax.set_xlabel(r"$\Gamma t$")
        if spec.xlim is not None:
            ax.set_xlim(*spec.xlim)
        if spec.ylim is not None:
            ax.set_ylim(*spec.ylim)
        paths = _save(fig, spec.output)
    except Exception:
        plt.close(fig)
        raise
    return fig, paths
