"""Latent log-price paths on a refinable fine grid.

The latent log price follows ``dX = mu dt + sigma dB``. Coefficients are
either constants or deterministic piecewise-constant functions of time, so
every fine-grid increment is an exact Gaussian draw and no discretization
bias enters the downstream checks.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from ._random import PURPOSE_PATH, make_rng
from .errors import CapacityError, GridError, ModelError

__all__ = [
    "ProcessModel",
    "SamplingGrid",
    "MasterPath",
    "generate_master_path",
    "observation_values",
    "subsample_nested",
    "coarsen",
    "refine_for_gamma",
]


def _as_coefficient(value, name):
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if arr.ndim != 1 or arr.size == 0:
        raise ModelError(f"{name} must be a scalar or a non-empty 1-D sequence")
    if not np.all(np.isfinite(arr)):
        raise ModelError(f"{name} must be finite")
    return float(arr[0]) if arr.size == 1 else tuple(float(v) for v in arr)


@dataclass(frozen=True)
class ProcessModel:
    """Drift ``mu`` (per year), volatility ``sigma`` (per sqrt-year), start ``x0``.

    ``mu`` and ``sigma`` may be sequences, read as piecewise-constant values
    on equal-length pieces of ``[0, T]``.
    """

    mu: float = 0.0
    sigma: float = 0.2
    x0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "mu", _as_coefficient(self.mu, "mu"))
        object.__setattr__(self, "sigma", _as_coefficient(self.sigma, "sigma"))
        if not math.isfinite(self.x0):
            raise ModelError("x0 must be finite")
        object.__setattr__(self, "x0", float(self.x0))
        if np.any(np.asarray(self.sigma) <= 0):
            raise ModelError(f"sigma must be positive at all times, got {self.sigma!r}")

    @property
    def constant(self):
        return isinstance(self.mu, float) and isinstance(self.sigma, float)

    @property
    def sigma_max(self):
        return float(np.max(self.sigma))

    def _integrate(self, values, times, T):
        # exact integral of a piecewise-constant function between consecutive times
        values = np.atleast_1d(np.asarray(values, dtype=float))
        knots = np.linspace(0.0, T, values.size + 1)
        cum = np.concatenate(([0.0], np.cumsum(values * (T / values.size))))
        return np.diff(np.interp(times, knots, cum))

    def drift_increments(self, times, T):
        """Integral of ``mu`` over each step between consecutive ``times``."""
        if isinstance(self.mu, float):
            return self.mu * np.diff(times)
        return self._integrate(self.mu, times, T)

    def variance_increments(self, times, T):
        """Integral of ``sigma**2`` over each step between consecutive ``times``."""
        if isinstance(self.sigma, float):
            return self.sigma**2 * np.diff(times)
        return self._integrate(np.square(self.sigma), times, T)


@dataclass(frozen=True)
class SamplingGrid:
    """``n`` equal observation intervals over ``[0, T]`` (T in years)."""

    n: int = 23400
    T: float = 1.0 / 252.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise GridError(f"n must be an integer >= 2, got {self.n!r}")
        if not (math.isfinite(self.T) and self.T > 0):
            raise GridError(f"T must be positive and finite, got {self.T!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "T", float(self.T))

    @property
    def dt(self):
        return self.T / self.n

    def times(self):
        return np.arange(self.n + 1) * self.dt


@dataclass(frozen=True, eq=False)
class MasterPath:
    """Latent path sampled at ``refine * n + 1`` equally spaced fine times.

    ``seed`` and ``stream`` record where the draws came from; regenerating
    with the same model, grid and refine gives the identical array.
    """

    model: ProcessModel
    grid: SamplingGrid
    refine: int
    values: np.ndarray = field(repr=False)
    seed: int | None = None
    stream: int | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.refine * self.grid.n + 1,):
            raise GridError(
                f"expected {self.refine * self.grid.n + 1} values, got {values.shape}"
            )
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def n_fine(self):
        return self.refine * self.grid.n

    @property
    def fine_dt(self):
        return self.grid.T / self.n_fine

    def fine_times(self):
        return np.arange(self.n_fine + 1) * self.fine_dt

    def step_variances(self):
        """Integrated ``sigma**2`` over each fine step (length ``n_fine``)."""
        return self.model.variance_increments(self.fine_times(), self.grid.T)


def refine_for_gamma(model, grid, gamma, minimum=10):
    """Smallest refine with ``sigma * sqrt(fine step) <= gamma / 4`` (at least ``minimum``)."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    need = math.ceil(16.0 * model.sigma_max**2 * grid.dt / gamma**2 - 1e-12)
    return max(int(minimum), need)


def generate_master_path(model, grid, refine=1, seed=0, stream=0):
    """Draw a latent path with exact Gaussian increments on the fine grid."""
    if not isinstance(model, ProcessModel):
        raise ModelError("model must be a ProcessModel")
    if int(refine) != refine or refine < 1:
        raise GridError(f"refine must be a positive integer, got {refine!r}")
    refine = int(refine)
    n_fine = refine * grid.n
    if n_fine + 1 > np.iinfo(np.intp).max:
        raise CapacityError(f"refine * n = {n_fine} exceeds the platform index range")

    times = np.arange(n_fine + 1) * (grid.T / n_fine)
    rng = make_rng(seed, stream, PURPOSE_PATH)
    z = rng.standard_normal(n_fine)
    steps = model.drift_increments(times, grid.T) + np.sqrt(
        model.variance_increments(times, grid.T)
    ) * z
    values = np.empty(n_fine + 1)
    values[0] = model.x0
    np.cumsum(steps, out=values[1:])
    values[1:] += model.x0
    return MasterPath(model, grid, refine, values, seed=int(seed), stream=int(stream))


def observation_values(path):
    """Latent values at the ``n + 1`` observation times."""
    return path.values[:: path.refine].copy()


def subsample_nested(path, n_coarse):
    """Latent values on the coarser grid with ``n_coarse`` intervals.

    ``n_coarse`` must divide the observation count, so all such grids are
    nested in the observation grid and share its points.
    """
    n = path.grid.n
    if int(n_coarse) != n_coarse or n_coarse < 1 or n % int(n_coarse):
        raise GridError(f"n_coarse={n_coarse!r} does not divide n={n}")
    stride = (n // int(n_coarse)) * path.refine
    return path.values[::stride].copy()


def coarsen(path, factor):
    """Master path with the same observation grid and ``refine / factor``."""
    if int(factor) != factor or factor < 1 or path.refine % int(factor):
        raise GridError(f"factor {factor!r} does not divide refine={path.refine}")
    factor = int(factor)
    return MasterPath(
        path.model,
        path.grid,
        path.refine // factor,
        path.values[::factor],
        seed=path.seed,
        stream=path.stream,
    )
