"""Grid quadratic variation, regular subgrids and the two scales estimator."""

from dataclasses import dataclass, field
from fractions import Fraction
import math

import numpy as np

from .errors import GridError

__all__ = [
    "SubgridAllocation",
    "TsrvResult",
    "grid_qv",
    "regular_allocation",
    "rv_all",
    "rv_avg",
    "tsrv",
    "select_K",
]


def grid_qv(z1, z2, indices):
    """Sum of products of increments of ``z1`` and ``z2`` over a sub-grid.

    ``indices`` must be strictly increasing and in range; a one-point grid
    has no increments and gives 0.
    """
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    if z1.shape != z2.shape or z1.ndim != 1:
        raise GridError("z1 and z2 must be 1-D sequences of equal length")
    idx = np.asarray(indices)
    if idx.ndim != 1 or idx.size == 0:
        raise GridError("indices must be a non-empty 1-D list")
    if not np.issubdtype(idx.dtype, np.integer):
        raise GridError("indices must be integers")
    if idx[0] < 0 or idx[-1] >= z1.size:
        raise GridError(f"indices out of range for length {z1.size}")
    if np.any(np.diff(idx) <= 0):
        raise GridError("indices must be strictly increasing")
    return float(np.dot(np.diff(z1[idx]), np.diff(z2[idx])))


@dataclass(frozen=True)
class SubgridAllocation:
    """Regular allocation of ``0..n`` into ``K`` staggered subgrids.

    Subgrid ``k`` (1-based) holds ``k-1, k-1+K, k-1+2K, ...``. ``n_bar`` is the
    average number of increments per subgrid, ``(n - K + 1) / K``.
    """

    n: int
    K: int

    @property
    def n_bar_exact(self):
        return Fraction(self.n - self.K + 1, self.K)

    @property
    def n_bar(self):
        return (self.n - self.K + 1) / self.K

    def subgrid(self, k):
        if not 1 <= k <= self.K:
            raise GridError(f"subgrid index {k} outside 1..{self.K}")
        return np.arange(k - 1, self.n + 1, self.K)

    def subgrids(self):
        return [self.subgrid(k) for k in range(1, self.K + 1)]

    def increments(self, k):
        """Number of increments in subgrid ``k`` (its size minus one)."""
        return (self.n - (k - 1)) // self.K


def regular_allocation(n, K):
    if int(n) != n or n < 1:
        raise GridError(f"n must be a positive integer, got {n!r}")
    if int(K) != K or not 1 <= K <= n:
        raise GridError(f"K must be an integer in [1, n={n}], got {K!r}")
    return SubgridAllocation(int(n), int(K))


def rv_all(y):
    """Realized variance over every observation."""
    d = np.diff(np.asarray(y, dtype=float))
    return float(np.dot(d, d))


def rv_avg(y, alloc):
    """Average of the subgrid realized variances.

    Every lag-``K`` increment ``y[i] - y[i-K]`` belongs to exactly one
    subgrid, so the average is computed from the lag-``K`` differences.
    """
    y = np.asarray(y, dtype=float)
    if y.size != alloc.n + 1:
        raise GridError(f"series has {y.size} values, allocation expects {alloc.n + 1}")
    d = y[alloc.K :] - y[: -alloc.K] if alloc.K <= alloc.n else np.empty(0)
    return float(np.dot(d, d)) / alloc.K


@dataclass(frozen=True)
class TsrvResult:
    rv_all: float
    rv_avg: float
    tsrv: float
    K: int
    n: int
    n_bar: float
    adjusted: float | None = field(default=None)


def tsrv(y, K, adjust=False):
    """Two scales realized volatility of the observed log prices ``y``.

    ``tsrv = rv_avg - (n_bar / n) * rv_all``; it can be negative. With
    ``adjust`` the result also carries ``tsrv / (1 - n_bar / n)``.
    """
    y = np.asarray(y, dtype=float)
    n = y.size - 1
    alloc = regular_allocation(n, K)
    a = rv_all(y)
    b = rv_avg(y, alloc)
    w = alloc.n_bar / n
    value = b - w * a
    adjusted = value / (1.0 - w) if adjust else None
    return TsrvResult(a, b, value, alloc.K, n, alloc.n_bar, adjusted)


def select_K(n, c=1.0):
    """``round(c * n**(2/3))`` clamped to ``[1, n]``; halves round up."""
    if not c > 0:
        raise ValueError("c must be positive")
    if n < 2:
        raise GridError("n must be at least 2")
    k = math.floor(c * n ** (2.0 / 3.0) + 0.5)
    return int(min(max(k, 1), n))
