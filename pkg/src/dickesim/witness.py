"""Collective-spin moments and spin-squeezing entanglement witnesses.

For the single-excitation state with amplitudes beta_j (drive phases
absorbed) and ground amplitude alpha, the collective spin moments have
closed forms. With z = sum_j beta_j and S = sum_j |beta_j|^2:

    <Jx>   =  Re(alpha* z)            <Jy>   = -Im(alpha* z)
    <Jz>   = -N/2 + S
    <Jx^2> = <Jy^2> = N/4 + |z|^2/2 - S/2
    <Jz^2> =  N^2/4 - (N-1) S

The second moments are alpha-independent; alpha enters only the first
moments and hence the variances. The variances are evaluated on the
normalized state, |alpha|^2 = 1 - S, which makes the variance sum obey
the exact identity

    var_x + var_y + var_z = N/2 + N^2 * ave1^2 * (N * f_sr - 1),

with ave1 = S/N the mean excited-state population and f_sr the
superradiant fraction. The witness C = (var_x + var_y + var_z)/N
therefore drops below 1/2 precisely when f_sr < 1/N: detecting
entanglement by collective moments is equivalent to the superradiant
fraction falling below the threshold 1/N.

Four moment inequalities are evaluated; only the variance-sum bound
(>= N/2) can be violated here. The quadratic-moment bound and the planar
bound hold identically with slacks N^2 sigma_beta^2 and proportional to
ave1 * |mean beta|^2; the remaining one depends nonlinearly on the drive
and is reported with a validity caveat only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import ExcitationState, TimeSeries
from .tdbasis import project

# Guard band against float-noise sign flips exactly at the C = 1/2 boundary.
VIOLATION_GUARD = 1e-12

SS3_NOTE = ("evaluated outside its validity: the bound is nonlinear in the "
            "excitation and scales with the drive power, so it is not used "
            "for entanglement claims in the weak-drive regime")


@dataclass(frozen=True)
class SpinMomentSet:
    """First/second moments and variances of the collective spin."""

    n_atoms: int
    jx: float
    jy: float
    jz: float
    jx2: float
    jy2: float
    jz2: float
    var_x: float
    var_y: float
    var_z: float
    c_value: float               # (var_x + var_y + var_z) / N
    sigma_beta_sq: float         # mean |beta_j - mean(beta)|^2, >= 0
    mean_excitation: float       # ave1 = S/N
    mean_amplitude_sq: float     # |mean(beta)|^2


@dataclass(frozen=True)
class InequalityReport:
    ss2_lhs: float
    ss2_violated: bool
    ss1_slack: float
    ss4_slack: float
    ss3_slack: float
    ss3_note: str


def spin_moments(state: ExcitationState) -> SpinMomentSet:
    """Closed-form collective-spin moments of a single-excitation state."""
    beta = np.asarray(state.beta, dtype=complex)
    n = beta.shape[0]
    z = beta.sum()
    s_tot = float(np.sum(np.abs(beta) ** 2))
    z_abs2 = float(np.abs(z) ** 2)

    # normalized ground amplitude; clamp guards unphysical inputs S > 1
    alpha = math.sqrt(max(1.0 - s_tot, 0.0))

    jx = alpha * float(z.real)
    jy = -alpha * float(z.imag)
    jz = -0.5 * n + s_tot
    jxy2 = 0.25 * n + 0.5 * z_abs2 - 0.5 * s_tot
    jz2 = 0.25 * n * n - (n - 1) * s_tot

    var_x = jxy2 - jx * jx
    var_y = jxy2 - jy * jy
    var_z = s_tot * (1.0 - s_tot)

    mean = z / n
    sigma_beta_sq = float(np.mean(np.abs(beta - mean) ** 2))

    return SpinMomentSet(
        n_atoms=n, jx=jx, jy=jy, jz=jz,
        jx2=jxy2, jy2=jxy2, jz2=jz2,
        var_x=var_x, var_y=var_y, var_z=var_z,
        c_value=(var_x + var_y + var_z) / n,
        sigma_beta_sq=sigma_beta_sq,
        mean_excitation=s_tot / n,
        mean_amplitude_sq=z_abs2 / (n * n),
    )


def evaluate_inequalities(moments: SpinMomentSet, n: int | None = None) -> InequalityReport:
    """Evaluate the four collective-moment bounds for one moment set.

    ss2: var_x + var_y + var_z >= N/2 (violation witnesses entanglement;
         a small guard band suppresses float-noise false positives).
    ss1: <Jx^2>+<Jy^2>+<Jz^2> <= N(N+2)/4, slack = N^2 sigma_beta^2 >= 0
         with equality exactly for uniform amplitudes.
    ss4: planar-variance bound, slack reported in the reduced form
         N^2 * ave1 * |mean beta|^2 >= 0 (the raw moment slack is
         N(N-1) times this).
    ss3: reduced to ave1*(1-(N-1)*ave1) - |mean beta|^2 and flagged as
         outside the weak-drive validity.
    """
    if n is None:
        n = moments.n_atoms
    lhs = moments.var_x + moments.var_y + moments.var_z
    return InequalityReport(
        ss2_lhs=lhs,
        ss2_violated=bool(lhs < 0.5 * n - VIOLATION_GUARD),
        ss1_slack=n * n * moments.sigma_beta_sq,
        ss4_slack=n * n * moments.mean_excitation * moments.mean_amplitude_sq,
        ss3_slack=(moments.mean_excitation
                   * (1.0 - (n - 1) * moments.mean_excitation)
                   - moments.mean_amplitude_sq),
        ss3_note=SS3_NOTE,
    )


def first_crossing(times: np.ndarray, values: np.ndarray, threshold: float) -> float | None:
    """Time of the first downward crossing of ``threshold``, linearly
    interpolated between the bracketing samples; None if never crossed.
    NaN samples are skipped."""
    t_prev = v_prev = None
    for t, v in zip(times, values):
        if v is None or (isinstance(v, float) and math.isnan(v)):
            continue
        if v_prev is not None and v_prev >= threshold > v:
            frac = (v_prev - threshold) / (v_prev - v)
            return float(t_prev + frac * (t - t_prev))
        t_prev, v_prev = t, v
    return None


@dataclass(frozen=True)
class ThresholdReport:
    """Agreement between the witness sign and the fraction threshold."""

    n_checked: int
    n_mismatches: int
    mismatch_times: list
    sign_equivalent: bool
    crossing_c: float | None        # first C < 1/2
    crossing_fsr: float | None      # first f_sr < 1/N
    crossing_gap: float | None
    within_dt: bool


def threshold_equivalence_check(series: TimeSeries,
                                excitation_floor: float = 1e-14) -> ThresholdReport:
    """Verify sign(C - 1/2) == sign(N f_sr - 1) along a trajectory.

    The two sides are computed through independent code paths (moment
    formulas vs basis projection). Samples below ``excitation_floor`` are
    skipped; samples where either side sits inside the float guard band
    are not counted as mismatches. Also checks that the interpolated
    crossing times of C = 1/2 and f_sr = 1/N agree within one dt.
    """
    n = series.betas.shape[1]
    dt = float(series.metadata.get("dt", np.diff(series.times).min(initial=np.inf)))
    c_vals, f_vals = [], []
    mismatches = []
    checked = 0
    for i in range(len(series)):
        state = series.state_at(i)
        mom = spin_moments(state)
        dec = project(state)
        c_vals.append(mom.c_value)
        f_vals.append(dec.f_sr if dec.f_sr is not None else math.nan)
        if state.total_excitation <= excitation_floor or dec.f_sr is None:
            continue
        checked += 1
        d_c = mom.c_value - 0.5
        d_f = n * dec.f_sr - 1.0
        # d_c should equal n * ave1^2 * d_f exactly; compare signs outside
        # the guard band on the common (witness) scale
        scale_f = n * mom.mean_excitation**2 * d_f
        if (d_c < 0) != (scale_f < 0) and min(abs(d_c), abs(scale_f)) > VIOLATION_GUARD:
            mismatches.append(float(series.times[i]))

    # guarded thresholds: float noise exactly at the boundary (e.g. C == 1/2
    # identically for a single atom) must not register as an onset
    t_c = first_crossing(series.times, np.asarray(c_vals), 0.5 - VIOLATION_GUARD)
    t_f = first_crossing(series.times, np.asarray(f_vals),
                         (1.0 - VIOLATION_GUARD) / n)
    if t_c is None or t_f is None:
        gap = None
        within = t_c is None and t_f is None
    else:
        gap = abs(t_c - t_f)
        within = gap <= dt + 1e-12
    return ThresholdReport(
        n_checked=checked,
        n_mismatches=len(mismatches),
        mismatch_times=mismatches,
        sign_equivalent=not mismatches,
        crossing_c=t_c,
        crossing_fsr=t_f,
        crossing_gap=gap,
        within_dt=within,
    )
