"""Projection onto the symmetric/antisymmetric single-excitation basis.

The drive-phase-absorbed amplitudes beta_j are expanded in an orthonormal
basis made of one uniform (superradiant) vector and N-1 antisymmetric
(subradiant) vectors:

    beta_plus = (1/sqrt(N)) sum_j beta_j
    gamma_s   = [ sum_{j<=s} beta_j - s * beta_{s+1} ] / sqrt(s (s+1)),
                s = 1 .. N-1.

Because the laser phases are absorbed into the amplitudes, the projection
acts on the stored beta_j directly with purely real coefficients. The
superradiant weight is p_plus = |beta_plus|^2, the subradiant weight
p_sub = sum_s |gamma_s|^2, and completeness gives
p_plus + p_sub = sum_j |beta_j|^2. The superradiant fraction

    f_sr = p_plus / (p_plus + p_sub)

equals |mean(beta)|^2 / mean(|beta|^2) and is undefined (reported absent)
for zero excitation. The antisymmetric coefficients depend on the atom
ordering (cloud sampling order is used), but p_plus, p_sub and the
fractions do not.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import ExcitationState
from .errors import InvalidParam

BASIS_CHECK_MAX_N = 2000


@dataclass(frozen=True)
class TDDecomposition:
    beta_plus: complex
    gamma: np.ndarray            # (N-1,) complex, ordering-dependent
    p_plus: float
    p_sub: float
    f_sr: float | None           # None when the state carries no excitation
    f_sub: float | None


def project(state: ExcitationState) -> TDDecomposition:
    """Decompose amplitudes into superradiant and subradiant weights."""
    beta = np.asarray(state.beta, dtype=complex)
    n = beta.shape[0]
    if n < 1:
        raise InvalidParam("state must contain at least one atom")

    total = beta.sum()
    beta_plus = total / np.sqrt(n)
    if n > 1:
        s = np.arange(1, n, dtype=float)
        prefix = np.cumsum(beta)[:-1]            # sum_{j<=s}
        gamma = (prefix - s * beta[1:]) / np.sqrt(s * (s + 1.0))
    else:
        gamma = np.zeros(0, dtype=complex)

    p_plus = float(np.abs(beta_plus) ** 2)
    p_sub = float(np.sum(np.abs(gamma) ** 2))
    norm = p_plus + p_sub
    if norm > 0.0:
        f_sr = p_plus / norm
        f_sub = 1.0 - f_sr
    else:
        f_sr = None
        f_sub = None
    return TDDecomposition(beta_plus=complex(beta_plus), gamma=gamma,
                           p_plus=p_plus, p_sub=p_sub, f_sr=f_sr, f_sub=f_sub)


def basis_matrix(n: int) -> np.ndarray:
    """Explicit (n, n) change-of-basis matrix; rows are the basis vectors.

    Row 0 is the uniform vector, row s the antisymmetric pattern
    (1, ..., 1, -s, 0, ..., 0)/sqrt(s(s+1)). Used as an independent oracle
    for the streaming projection above.
    """
    if n < 1:
        raise InvalidParam("n must be >= 1")
    u = np.zeros((n, n))
    u[0] = 1.0 / np.sqrt(n)
    for s in range(1, n):
        u[s, :s] = 1.0
        u[s, s] = -s
        u[s] /= np.sqrt(s * (s + 1.0))
    return u


@dataclass(frozen=True)
class BasisReport:
    n: int
    max_orthonormality_dev: float      # max |U U^T - I|
    max_parseval_dev: float            # max | ||U v||^2 - ||v||^2 | over probes


def basis_checks(n: int, probes: int = 8, seed: int = 0,
                 max_n: int = BASIS_CHECK_MAX_N) -> BasisReport:
    """Verify orthonormality/completeness of the explicit basis matrix."""
    if n > max_n:
        raise InvalidParam(f"basis check capped at N={max_n}, got {n}")
    u = basis_matrix(n)
    gram = u @ u.T
    dev = float(np.max(np.abs(gram - np.eye(n))))
    rng = np.random.default_rng(seed)
    pdev = 0.0
    for _ in range(probes):
        v = rng.normal(size=n) + 1j * rng.normal(size=n)
        v /= np.linalg.norm(v)
        pdev = max(pdev, abs(float(np.sum(np.abs(u @ v) ** 2)) - 1.0))
    return BasisReport(n=n, max_orthonormality_dev=dev, max_parseval_dev=pdev)


@dataclass(frozen=True)
class PermutationReport:
    dev_p_plus: float
    dev_p_sub: float
    dev_f_sr: float
    gamma_changed: bool


def permutation_invariance_check(state: ExcitationState,
                                 permutation: np.ndarray) -> PermutationReport:
    """Compare the decomposition before/after relabeling the atoms.

    The collective weights and fractions are invariant; the individual
    antisymmetric coefficients generally are not.
    """
    perm = np.asarray(permutation)
    if sorted(perm.tolist()) != list(range(state.n_atoms)):
        raise InvalidParam("permutation must be a relabeling of 0..N-1")
    base = project(state)
    permuted = project(ExcitationState(beta=state.beta[perm], t=state.t,
                                       alpha=state.alpha))
    if base.f_sr is None or permuted.f_sr is None:
        dev_f = 0.0 if base.f_sr == permuted.f_sr else float("nan")
    else:
        dev_f = abs(base.f_sr - permuted.f_sr)
    return PermutationReport(
        dev_p_plus=abs(base.p_plus - permuted.p_plus),
        dev_p_sub=abs(base.p_sub - permuted.p_sub),
        dev_f_sr=dev_f,
        gamma_changed=not np.array_equal(base.gamma, permuted.gamma),
    )
