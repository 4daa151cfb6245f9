"""Driven, damped linear amplitude dynamics through a laser on/off schedule.

With rates in units of the single-atom linewidth and time in its inverse,
the amplitude of atom j obeys

    d beta_j / dt = (i Delta0 - 1/2) beta_j - i Omega0_eff / 2
                    - (1/2) sum_{m != j} Gt_jm beta_m,

where Gt is the dressed coupling matrix, Delta0 the laser detuning and
Omega0_eff the Rabi frequency (switched to zero at the cutoff time). The
drive term is uniform because the laser phase is absorbed into the
amplitudes. Since the kernel diagonal is 1, the right-hand side collapses
to (i Delta0 I - Gt/2) beta - i Omega0_eff/2.

Integration is classical fixed-step fourth-order Runge-Kutta; the drive
switch is aligned to a step boundary so each smooth segment is integrated
at full order (the final driven step uses the left-limit drive at the
boundary stage).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .cloud import AtomCloud
from .errors import DimensionMismatch, InvalidParam, NonFinite, RegimeWarning, SingularSystem
from .kernel import GreenKernel

# Above this total excitation the linearized equations stop being a
# faithful weak-drive approximation.
WEAK_EXCITATION_BOUND = 0.1

DEFAULT_DT = 0.01


@dataclass(frozen=True)
class DriveSchedule:
    """Rectangular drive pulse: on with ``rabi`` until ``t_off``, then off.

    ``t_off = inf`` means the laser is never switched off. All quantities
    in linewidth units.
    """

    rabi: float
    detuning: float
    t_max: float
    t_off: float = math.inf
    dt: float = DEFAULT_DT

    def __post_init__(self):
        if not self.dt > 0:
            raise InvalidParam(f"dt must be > 0, got {self.dt}")
        if self.rabi < 0:
            raise InvalidParam(f"rabi must be >= 0, got {self.rabi}")
        if self.t_off < 0:
            raise InvalidParam(f"t_off must be >= 0, got {self.t_off}")
        if self.t_max < 0:
            raise InvalidParam(f"t_max must be >= 0, got {self.t_max}")
        if math.isfinite(self.t_off) and self.t_max < self.t_off:
            raise InvalidParam(
                f"t_max={self.t_max} < t_off={self.t_off}; use t_off=inf for an always-on drive")


@dataclass(frozen=True)
class ExcitationState:
    """Complex amplitudes at one instant; the ground-state amplitude is
    held at 1 in the weak-excitation dynamics."""

    beta: np.ndarray
    t: float
    alpha: float = 1.0

    @property
    def n_atoms(self) -> int:
        return self.beta.shape[0]

    @property
    def total_excitation(self) -> float:
        """sum_j |beta_j|^2"""
        return float(np.sum(np.abs(self.beta) ** 2))


@dataclass
class TimeSeries:
    """Strided snapshots of an integration run.

    ``betas[i]`` is the amplitude vector at ``times[i]``. ``metadata``
    records dt, the rounded cutoff time, the stride and any regime
    warnings. ``records`` is a slot for derived per-sample rows filled by
    downstream analysis.
    """

    times: np.ndarray
    betas: np.ndarray            # (n_samples, N) complex
    metadata: dict = field(default_factory=dict)
    records: list | None = None

    def __len__(self) -> int:
        return self.times.shape[0]

    def state_at(self, i: int) -> ExcitationState:
        return ExcitationState(beta=self.betas[i], t=float(self.times[i]))

    def states(self):
        return (self.state_at(i) for i in range(len(self)))


def rhs(state: ExcitationState, kernel: GreenKernel,
        rabi_eff: float, detuning: float) -> np.ndarray:
    """Time derivative of the amplitudes for a given momentary drive."""
    beta = np.asarray(state.beta, dtype=complex)
    n = kernel.n_atoms
    if beta.shape != (n,):
        raise DimensionMismatch(
            f"state has {beta.shape} amplitudes, kernel is {n}x{n}")
    return (1j * detuning) * beta - 0.5 * (kernel.g_tilde @ beta) - 0.5j * rabi_eff


def _off_step(schedule: DriveSchedule, n_steps: int) -> int | None:
    """Drive-off step index, or None when the drive never switches off."""
    if not math.isfinite(schedule.t_off):
        return None
    k = int(round(schedule.t_off / schedule.dt))
    return min(k, n_steps)


def integrate(kernel: GreenKernel, schedule: DriveSchedule, stride: int = 1,
              cloud: AtomCloud | None = None) -> TimeSeries:
    """Integrate from the ground state (beta = 0) with fixed-step RK4.

    Snapshots are kept every ``stride`` steps, plus the cutoff-time sample
    and the final time. The cutoff is rounded to the nearest step boundary
    and the rounded value recorded in the metadata. Raises NonFinite if an
    amplitude overflows (dt too large for the stiffest collective mode);
    issues a RegimeWarning once if the total excitation exceeds
    the weak-drive bound.
    """
    if stride < 1:
        raise InvalidParam(f"stride must be >= 1, got {stride}")
    n = kernel.n_atoms
    if cloud is not None and cloud.n_atoms != n:
        raise DimensionMismatch(
            f"cloud has {cloud.n_atoms} atoms, kernel is {n}x{n}")

    dt = schedule.dt
    n_steps = int(round(schedule.t_max / dt))
    off_step = _off_step(schedule, n_steps)

    # (i Delta0 I - Gt/2); the drive enters as a constant vector per segment
    a_mat = (1j * schedule.detuning) * np.eye(n) - 0.5 * kernel.g_tilde
    drive_on = np.full(n, -0.5j * schedule.rabi)

    beta = np.zeros(n, dtype=complex)
    times, samples = [], []
    warned = False
    warnings_log: list[str] = []

    def keep(step: int) -> bool:
        return step % stride == 0 or step == n_steps or (off_step is not None and step == off_step)

    for step in range(n_steps + 1):
        if keep(step):
            times.append(step * dt)
            samples.append(beta.copy())
        if step == n_steps:
            break
        drv = drive_on if (off_step is None or step < off_step) else 0.0
        k1 = a_mat @ beta + drv
        k2 = a_mat @ (beta + (0.5 * dt) * k1) + drv
        k3 = a_mat @ (beta + (0.5 * dt) * k2) + drv
        k4 = a_mat @ (beta + dt * k3) + drv
        beta = beta + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

        if not np.all(np.isfinite(beta.view(float))):
            raise NonFinite(
                f"non-finite amplitude at t={(step + 1) * dt:.6g}; reduce dt")
        if not warned:
            total = float(np.sum(np.abs(beta) ** 2))
            if total > WEAK_EXCITATION_BOUND:
                warned = True
                msg = (f"total excitation {total:.3g} exceeded the weak-drive bound "
                       f"{WEAK_EXCITATION_BOUND} at t={(step + 1) * dt:.6g}")
                warnings_log.append(msg)
                warnings.warn(msg, RegimeWarning, stacklevel=2)

    metadata = {
        "dt": dt,
        "stride": stride,
        "rabi": schedule.rabi,
        "detuning": schedule.detuning,
        "t_max": n_steps * dt,
        "t_off": schedule.t_off,
        "t_off_rounded": (off_step * dt) if off_step is not None else None,
        "warnings": warnings_log,
    }
    if cloud is not None:
        metadata.update(n_atoms=cloud.n_atoms, seed=cloud.seed,
                        sigma=cloud.sigma, distribution=cloud.distribution.value,
                        min_separation=cloud.min_separation)
    return TimeSeries(times=np.asarray(times), betas=np.asarray(samples), metadata=metadata)


def steady_state(kernel: GreenKernel, rabi: float, detuning: float) -> ExcitationState:
    """Driven fixed point: solve (i Delta0 I - Gt/2) beta = i Omega0/2.

    Raises SingularSystem (with a condition estimate) if the system matrix
    is rank deficient, which can happen at an exact collective resonance.
    """
    n = kernel.n_atoms
    a_mat = (1j * detuning) * np.eye(n) - 0.5 * kernel.g_tilde
    b = np.full(n, 0.5j * rabi)
    try:
        beta = np.linalg.solve(a_mat, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(
            f"steady-state system singular (cond ~ {np.linalg.cond(a_mat):.3g})") from exc
    residual = np.linalg.norm(a_mat @ beta - b)
    scale = max(np.linalg.norm(b), 1e-300)
    if not np.all(np.isfinite(beta.view(float))) or residual > 1e-8 * scale:
        raise SingularSystem(
            f"steady-state solve unreliable: residual {residual:.3g} "
            f"(cond ~ {np.linalg.cond(a_mat):.3g})")
    return ExcitationState(beta=beta, t=math.inf)


@dataclass(frozen=True)
class ConvergenceReport:
    """Step-halving self-consistency of the integrator."""

    dt: float
    max_rel_deviation: float | None
    status: str                  # "ok" or "non_finite"
    flagged: bool
    threshold: float


def convergence_check(kernel: GreenKernel, schedule: DriveSchedule,
                      stride: int = 10, threshold: float = 1e-6) -> ConvergenceReport:
    """Rerun with dt and dt/2 and compare the total excitation.

    Reports the maximum relative deviation of sum|beta|^2 over the common
    sample times; ``flagged`` marks runs that exceed ``threshold`` or blow
    up entirely.
    """
    try:
        coarse = integrate(kernel, schedule, stride=stride)
        fine = integrate(kernel, replace(schedule, dt=schedule.dt / 2), stride=2 * stride)
    except NonFinite:
        return ConvergenceReport(dt=schedule.dt, max_rel_deviation=None,
                                 status="non_finite", flagged=True, threshold=threshold)
    n_common = min(len(coarse), len(fine))
    s1 = np.sum(np.abs(coarse.betas[:n_common]) ** 2, axis=1)
    s2 = np.sum(np.abs(fine.betas[:n_common]) ** 2, axis=1)
    mask = s2 > 0
    if not mask.any():
        dev = 0.0
    else:
        dev = float(np.max(np.abs(s1[mask] - s2[mask]) / s2[mask]))
    return ConvergenceReport(dt=schedule.dt, max_rel_deviation=dev,
                             status="ok", flagged=bool(dev > threshold),
                             threshold=threshold)
