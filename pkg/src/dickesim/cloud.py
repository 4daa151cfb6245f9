"""Random atomic position configurations and their geometric summaries.

Units convention used throughout the package: every length is stored
pre-multiplied by the laser wavenumber k0 (positions are dimensionless
k0*r), every rate is in units of the single-atom linewidth Gamma, and
time is in units of 1/Gamma.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidParam, RejectionExhausted

DEFAULT_MIN_SEPARATION = 0.1

# Per-atom candidate budget for the rejection loop. At physically sensible
# densities (mean spacing >> exclusion radius) a handful of tries suffice;
# hitting the cap means the request is over-dense.
MAX_TRIES_PER_ATOM = 10_000


class Distribution(str, enum.Enum):
    GAUSSIAN = "gaussian"
    UNIFORM_BALL = "uniform_ball"


@dataclass(frozen=True)
class AtomCloud:
    """Immutable set of N atomic positions in k0*r units.

    Invariants (enforced at construction): N >= 1, and every pairwise
    distance is at least ``min_separation`` (> 0 protects the 1/r coupling
    kernel from singular pairs).
    """

    positions: np.ndarray          # (N, 3), dimensionless k0*r
    n_atoms: int
    sigma: float                   # k0 * sigma_r
    seed: int
    distribution: Distribution
    min_separation: float

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 3:
            raise InvalidParam(f"positions must be (N, 3), got {pos.shape}")
        if self.n_atoms < 1 or pos.shape[0] != self.n_atoms:
            raise InvalidParam(
                f"n_atoms={self.n_atoms} inconsistent with positions shape {pos.shape}")
        pos = pos.copy()
        pos.flags.writeable = False
        object.__setattr__(self, "positions", pos)
        if self.min_separation > 0 and self.n_atoms > 1:
            dmin = pairwise_distances(pos).min()
            if dmin < self.min_separation:
                raise InvalidParam(
                    f"pair closer than min_separation: {dmin:.3g} < {self.min_separation:.3g}")


@dataclass(frozen=True)
class CloudSummary:
    """Geometric summary: resonant optical thickness and mean spacing.

    ``b0 = 3N/sigma^2`` is exact for the gaussian distribution (the formula
    is applied verbatim to the uniform-ball test variant as well).
    ``mean_nn_distance`` is None for a single atom.
    """

    b0: float
    mean_nn_distance: float | None = field(default=None)


def pairwise_distances(positions: np.ndarray) -> np.ndarray:
    """All N(N-1)/2 pairwise distances as a flat array."""
    n = positions.shape[0]
    iu = np.triu_indices(n, k=1)
    diff = positions[iu[0]] - positions[iu[1]]
    return np.linalg.norm(diff, axis=1)


def sample_cloud(
    n: int,
    sigma: float,
    distribution: Distribution | str = Distribution.GAUSSIAN,
    seed: int = 0,
    min_separation: float = DEFAULT_MIN_SEPARATION,
) -> AtomCloud:
    """Draw a random cloud, resampling any atom that lands too close.

    Gaussian clouds draw each coordinate from a centered normal with
    standard deviation ``sigma``; uniform_ball draws uniformly from a
    sphere of radius ``sigma``. Atoms are accepted sequentially from a
    single seeded stream, so identical parameters reproduce the cloud
    bit-for-bit regardless of thread count.

    Raises RejectionExhausted if an atom cannot be placed within the
    per-atom retry budget, InvalidParam for bad parameters.
    """
    distribution = Distribution(distribution)
    if n < 1:
        raise InvalidParam(f"n must be >= 1, got {n}")
    if not sigma > 0:
        raise InvalidParam(f"sigma must be > 0, got {sigma}")
    if min_separation < 0:
        raise InvalidParam(f"min_separation must be >= 0, got {min_separation}")

    rng = np.random.default_rng(seed)
    pos = np.empty((n, 3))
    min_sep_sq = min_separation**2
    for i in range(n):
        for _ in range(MAX_TRIES_PER_ATOM):
            cand = _draw(rng, sigma, distribution)
            if i == 0 or min_separation == 0.0:
                break
            d2 = np.sum((pos[:i] - cand) ** 2, axis=1)
            if d2.min() >= min_sep_sq:
                break
        else:
            raise RejectionExhausted(
                f"could not place atom {i + 1}/{n} with min_separation="
                f"{min_separation} after {MAX_TRIES_PER_ATOM} tries")
        pos[i] = cand

    return AtomCloud(
        positions=pos,
        n_atoms=n,
        sigma=float(sigma),
        seed=int(seed),
        distribution=distribution,
        min_separation=float(min_separation),
    )


def _draw(rng: np.random.Generator, sigma: float, distribution: Distribution) -> np.ndarray:
    if distribution is Distribution.GAUSSIAN:
        return rng.normal(0.0, sigma, size=3)
    # uniform in a ball: isotropic direction, radius ~ u^(1/3)
    direction = rng.normal(0.0, 1.0, size=3)
    norm = np.linalg.norm(direction)
    while norm == 0.0:  # pragma: no cover - measure-zero draw
        direction = rng.normal(0.0, 1.0, size=3)
        norm = np.linalg.norm(direction)
    radius = sigma * rng.uniform() ** (1.0 / 3.0)
    return direction * (radius / norm)


def summarize(cloud: AtomCloud) -> CloudSummary:
    """b0 = 3N/sigma^2 plus the mean nearest-neighbour distance.

    The nearest-neighbour scan is exhaustive O(N^2).
    """
    b0 = 3.0 * cloud.n_atoms / cloud.sigma**2
    if cloud.n_atoms < 2:
        return CloudSummary(b0=b0, mean_nn_distance=None)
    pos = cloud.positions
    diff = pos[:, None, :] - pos[None, :, :]
    dist = np.linalg.norm(diff, axis=-1)
    np.fill_diagonal(dist, np.inf)
    return CloudSummary(b0=b0, mean_nn_distance=float(dist.min(axis=1).mean()))


def cloud_to_dict(cloud: AtomCloud) -> dict:
    return {
        "n": cloud.n_atoms,
        "sigma": cloud.sigma,
        "distribution": cloud.distribution.value,
        "seed": cloud.seed,
        "min_separation": cloud.min_separation,
        "positions": cloud.positions.tolist(),
    }


def cloud_from_dict(data: dict) -> AtomCloud:
    return AtomCloud(
        positions=np.asarray(data["positions"], dtype=float),
        n_atoms=int(data["n"]),
        sigma=float(data["sigma"]),
        seed=int(data["seed"]),
        distribution=Distribution(data["distribution"]),
        min_separation=float(data["min_separation"]),
    )


def save_cloud(cloud: AtomCloud, path: str | Path) -> None:
    """Write the cloud as JSON; floats use shortest round-trip decimals
    (up to 17 significant digits), so reloading is lossless."""
    Path(path).write_text(json.dumps(cloud_to_dict(cloud)) + "\n")


def load_cloud(path: str | Path) -> AtomCloud:
    return cloud_from_dict(json.loads(Path(path).read_text()))
