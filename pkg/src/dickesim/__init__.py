"""Coupled-dipole simulation of collective emission in driven cold-atom
clouds, with superradiant/subradiant decomposition and collective-spin
entanglement witnesses.

Conventions: positions in k0*r (dimensionless), rates in units of the
single-atom linewidth, time in its inverse.
"""
from ._version import __version__
from .cloud import (AtomCloud, CloudSummary, Distribution, load_cloud,
                    sample_cloud, save_cloud, summarize)
from .dynamics import (ConvergenceReport, DriveSchedule, ExcitationState,
                       TimeSeries, convergence_check, integrate, rhs,
                       steady_state)
from .errors import (ConfigError, DickesimError, DimensionMismatch,
                     InvalidParam, NonFinite, RegimeWarning,
                     RejectionExhausted, SingularPair, SingularSystem)
from .kernel import (CollectiveRates, GreenKernel, build_kernel,
                     collective_rates, gamma_tilde, kernel_spectrum_check,
                     omega_tilde)
from .pipeline import RunConfig, RunResult, SweepResult, run_single, run_sweep
from .tdbasis import (BasisReport, TDDecomposition, basis_checks,
                      basis_matrix, permutation_invariance_check, project)
from .witness import (InequalityReport, SpinMomentSet, ThresholdReport,
                      evaluate_inequalities, first_crossing, spin_moments,
                      threshold_equivalence_check)

__all__ = [
    "__version__",
    "AtomCloud", "CloudSummary", "Distribution", "sample_cloud", "summarize",
    "save_cloud", "load_cloud",
    "GreenKernel", "CollectiveRates", "build_kernel", "collective_rates",
    "gamma_tilde", "omega_tilde", "kernel_spectrum_check",
    "DriveSchedule", "ExcitationState", "TimeSeries", "ConvergenceReport",
    "rhs", "integrate", "steady_state", "convergence_check",
    "TDDecomposition", "BasisReport", "project", "basis_matrix",
    "basis_checks", "permutation_invariance_check",
    "SpinMomentSet", "InequalityReport", "ThresholdReport", "spin_moments",
    "evaluate_inequalities", "threshold_equivalence_check", "first_crossing",
    "RunConfig", "RunResult", "SweepResult", "run_single", "run_sweep",
    "DickesimError", "InvalidParam", "RejectionExhausted", "SingularPair",
    "DimensionMismatch", "NonFinite", "SingularSystem", "ConfigError",
    "RegimeWarning",
]
