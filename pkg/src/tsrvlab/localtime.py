"""Local time of a sampled path at the rounding levels ``log((k + 1/2) alpha)``.

Local time is normalized against quadratic variation, i.e. it is the
occupation density in ``integral phi(X_s) d<X>_s = integral phi(a) L^a da``.
Three estimators are available on a discretely sampled path:

``tanaka``
    discrete Tanaka formula ``|X_N - a| - |X_0 - a| - sum sgn(X_i - a) dX_i``;
``crossing``
    level-crossing count ``#{i: X_{i-1} < a <= X_i or X_i < a <= X_{i-1}}``
    scaled by ``sigma sqrt(T) sqrt(pi / 2) / sqrt(n)`` (Brownian paths only);
``bridge``
    expected local time of the Brownian bridge through consecutive samples,
    the conditional expectation of the continuous-path local time given the
    samples.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.special import erfcx

__all__ = [
    "LocalTimeProfile",
    "tanaka_local_time",
    "crossing_statistic",
    "bridge_local_time",
    "local_time_profile",
    "rounding_levels",
    "thm2_limit",
    "thm3_limit",
]

METHODS = ("tanaka", "crossing", "bridge")


def _sgn(u):
    # right-continuous convention: sgn(0) = -1
    return np.where(u > 0, 1.0, -1.0)


def tanaka_local_time(values, a):
    """Discrete Tanaka estimate of the local time at level ``a``. Not clipped."""
    x = np.asarray(values, dtype=float)
    if x.size < 2:
        raise ValueError("need at least two values")
    a = float(a)
    return float(abs(x[-1] - a) - abs(x[0] - a) - np.dot(_sgn(x[:-1] - a), np.diff(x)))


def crossing_statistic(values, a):
    """Number of steps crossing level ``a`` and that count divided by sqrt(n)."""
    x = np.asarray(values, dtype=float)
    if x.size < 2:
        raise ValueError("need at least two values")
    prev, nxt = x[:-1], x[1:]
    hits = ((prev < a) & (a <= nxt)) | ((nxt < a) & (a <= prev))
    count = int(np.count_nonzero(hits))
    return count, count / math.sqrt(x.size - 1)


def bridge_local_time(values, a, step_variance):
    """Sum over steps of the expected Brownian-bridge local time at ``a``.

    ``step_variance`` is the quadratic variation accrued over each step
    (scalar or one value per step). For a bridge from ``x`` to ``y`` with
    variance ``v`` the expectation is
    ``sqrt(2 pi v) exp(d**2 / 2v) Phi_bar(c / sqrt(v))`` with ``d = y - x`` and
    ``c = |x - a| + |y - a|``.
    """
    x = np.asarray(values, dtype=float)
    if x.size < 2:
        raise ValueError("need at least two values")
    v = np.broadcast_to(np.asarray(step_variance, dtype=float), (x.size - 1,))
    d = np.diff(x)
    c = np.abs(x[:-1] - a) + np.abs(x[1:] - a)
    s = np.sqrt(2.0 * v)
    terms = math.sqrt(math.pi / 2.0) * np.sqrt(v) * erfcx(c / s) * np.exp((d * d - c * c) / (2.0 * v))
    return float(np.sum(terms))


def rounding_levels(k, alpha):
    """Cell edges ``log((k + 1/2) alpha)``."""
    return np.log((np.asarray(k, dtype=float) + 0.5) * alpha)


@dataclass(frozen=True, eq=False)
class LocalTimeProfile:
    """Local time at consecutive rounding levels ``k_lo..k_hi``.

    ``raw`` keeps the unclipped estimates; ``L`` is clipped at zero and
    ``clip_slack`` records the most negative raw value that was clipped.
    """

    alpha: float
    k_lo: int
    k_hi: int
    L: np.ndarray = field(repr=False)
    method: str = "tanaka"
    n_source: int = 0
    raw: np.ndarray | None = field(default=None, repr=False)
    clip_slack: float = 0.0

    @property
    def ks(self):
        return np.arange(self.k_lo, self.k_hi + 1)

    @property
    def levels(self):
        return rounding_levels(self.ks, self.alpha)

    @classmethod
    def from_levels(cls, alpha, ks, L, method="tanaka", n_source=0):
        ks = np.asarray(ks, dtype=int)
        if ks.size == 0 or np.any(np.diff(ks) != 1) or ks[0] < 1:
            raise ValueError("ks must be consecutive positive integers")
        L = np.asarray(L, dtype=float)
        return cls(float(alpha), int(ks[0]), int(ks[-1]), L, method, n_source, L.copy(), 0.0)

    def scaled(self, factor):
        return LocalTimeProfile(
            self.alpha, self.k_lo, self.k_hi, self.L * factor, self.method,
            self.n_source, None if self.raw is None else self.raw * factor,
            self.clip_slack * factor,
        )


def local_time_profile(path, alpha, method="tanaka", margin_sd=2.0):
    """Local time of a master path at every rounding level near its range.

    Levels farther than ``margin_sd`` fine-step standard deviations outside
    ``[min X, max X]`` get exactly zero.
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    x = path.values
    v = path.step_variances()
    margin = margin_sd * math.sqrt(float(np.max(v)))
    lo, hi = float(x.min()) - margin, float(x.max()) + margin
    k_lo = max(1, math.floor(math.exp(lo) / alpha - 0.5))
    k_hi = max(k_lo, math.ceil(math.exp(hi) / alpha - 0.5))
    ks = np.arange(k_lo, k_hi + 1)
    levels = rounding_levels(ks, alpha)
    inside = (levels >= lo) & (levels <= hi)

    raw = np.zeros(ks.size)
    if method == "crossing":
        if not path.model.constant:
            raise ValueError("crossing estimator requires constant sigma")
        scale = path.model.sigma * math.sqrt(path.grid.T) * math.sqrt(math.pi / 2.0)
    for j in np.flatnonzero(inside):
        a = levels[j]
        if method == "tanaka":
            raw[j] = tanaka_local_time(x, a)
        elif method == "bridge":
            raw[j] = bridge_local_time(x, a, v)
        else:
            raw[j] = scale * crossing_statistic(x, a)[1]
    slack = float(min(0.0, raw.min()))
    L = np.maximum(raw, 0.0)
    return LocalTimeProfile(float(alpha), int(k_lo), int(k_hi), L, method, x.size - 1, raw, slack)


def _weighted_sum(profile):
    ks = profile.ks.astype(float)
    return float(np.sum(profile.L * np.log1p(1.0 / ks) ** 2))


def thm2_limit(profile):
    """Small-noise limit of ``gamma * <f(X), f(X)>_T``."""
    return _weighted_sum(profile) / (2.0 * math.sqrt(math.pi))


def thm3_limit(profile, sigma, T):
    """Pure-rounding limit of ``TSRV / sqrt(n_bar)``."""
    if not (sigma > 0 and T > 0):
        raise ValueError("sigma and T must be positive")
    return _weighted_sum(profile) * math.sqrt(2.0 / math.pi) / (sigma * math.sqrt(T))
