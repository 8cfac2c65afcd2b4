"""Conditional moments of the observed log price and the path-level targets.

For the noise-then-round kernel the observed log price is a step function
of the noisy latent value ``z = x + eta``: it equals ``log(k * alpha)`` on the
rounding cell ``[log((k - 1/2) alpha), log((k + 1/2) alpha))`` and ``log alpha``
below ``log(3 alpha / 2)`` (the floor and the first cell coincide). Writing the
step function as a sum of jumps of height ``log((k + 1) / k)`` at the cell
edges ``e_k = log((k + 1/2) alpha)`` gives

    f(x)  = log(alpha) + sum_k log((k + 1) / k) * Phi((x - e_k) / gamma)
    f'(x) = (1 / gamma) * sum_k log((k + 1) / k) * phi((x - e_k) / gamma)

which is what the vectorized code evaluates. Only edges within ``ZCUT``
standard deviations of ``x`` contribute; the rest are exactly 0 or 1 in
double precision.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.special import ndtr, ndtri

from .contaminate import AdditiveGaussian, NoiseThenRound, PureRounding, round_ticks
from .errors import UnsupportedKernelError

__all__ = [
    "BandDecomposition",
    "MomentProfile",
    "band_probabilities",
    "f_bar",
    "f_prime",
    "g_var",
    "moment_profile",
    "qv_target",
    "xi_squared",
    "avar_thm1",
    "thm1_quantities",
]

ZCUT = 10.0
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_CHUNK_CELLS = 2_000_000


@dataclass(frozen=True, eq=False)
class BandDecomposition:
    """Probabilities of the rounding cells for one latent value ``x``.

    ``p[j]`` is the probability that the noisy price rounds to ``k_lo + j``
    ticks; ``p_floor`` is the probability it rounds to zero ticks (and is
    then floored at one tick). ``tail`` is the mass of cells left out.
    """

    x: float
    gamma: float
    alpha: float
    k_lo: int
    k_hi: int
    p_floor: float
    p: np.ndarray = field(repr=False)
    tail: float

    @property
    def ks(self):
        return np.arange(self.k_lo, self.k_hi + 1)

    @property
    def total(self):
        return self.p_floor + float(self.p.sum()) + self.tail


@dataclass(frozen=True, eq=False)
class MomentProfile:
    """``f``, ``f'`` and ``g`` evaluated along a sequence of latent values."""

    x: np.ndarray = field(repr=False)
    f: np.ndarray = field(repr=False)
    fprime: np.ndarray = field(repr=False)
    g: np.ndarray = field(repr=False)


def _edge(k, alpha):
    return np.log((k + 0.5) * alpha)


def band_probabilities(x, gamma, alpha, tol=1e-12):
    """Rounding-cell probabilities of ``exp(x + eta)``, ``eta ~ N(0, gamma**2)``."""
    if not gamma > 0:
        raise ValueError("gamma must be positive; use the deterministic rounding path for gamma = 0")
    if not (alpha > 0 and tol > 0):
        raise ValueError("alpha and tol must be positive")
    x = float(x)
    z = max(ZCUT, -float(ndtri(tol / 4.0)))
    k_lo = max(1, math.floor(math.exp(x - z * gamma) / alpha - 0.5))
    k_hi = max(k_lo, math.ceil(math.exp(x + z * gamma) / alpha + 0.5))

    ks = np.arange(k_lo, k_hi + 1)
    upper = ndtr((_edge(ks, alpha) - x) / gamma)
    lower = ndtr((_edge(ks - 1, alpha) - x) / gamma) if k_lo > 1 else None
    p_floor = float(ndtr((math.log(alpha / 2.0) - x) / gamma))
    if lower is None:
        # cells 1..: the first cell starts where the floor cell ends
        lower = np.concatenate(([p_floor], upper[:-1]))
        tail_lo = 0.0
    else:
        tail_lo = float(lower[0]) - p_floor
    p = upper - lower
    tail_hi = float(ndtr((x - _edge(k_hi, alpha)) / gamma))
    return BandDecomposition(x, gamma, alpha, int(k_lo), int(k_hi), p_floor, p, tail_lo + tail_hi)


def _window(x, gamma, alpha):
    k_lo = np.maximum(1.0, np.floor(np.exp(x - ZCUT * gamma) / alpha - 0.5))
    k_hi = np.maximum(k_lo, np.ceil(np.exp(x + ZCUT * gamma) / alpha - 0.5))
    return k_lo, int(np.max(k_hi - k_lo)) + 1 if x.size else 1


def _ntr_moments(x, gamma, alpha, want_f=True, want_fp=True, want_g=True):
    """Vectorized f, f' and g for the noise-then-round kernel."""
    x = np.asarray(x, dtype=float)
    shape = x.shape
    x = x.ravel()
    out_f = np.empty_like(x) if want_f or want_g else None
    out_fp = np.empty_like(x) if want_fp else None
    out_g = np.empty_like(x) if want_g else None
    if x.size == 0:
        return tuple(None if a is None else a.reshape(shape) for a in (out_f, out_fp, out_g))

    _, width = _window(x, gamma, alpha)
    rows = max(1, _CHUNK_CELLS // width)
    offsets = np.arange(width, dtype=float)
    for start in range(0, x.size, rows):
        xs = x[start : start + rows]
        k_lo, _ = _window(xs, gamma, alpha)
        ks = k_lo[:, None] + offsets
        u = (xs[:, None] - _edge(ks, alpha)) / gamma
        jumps = np.log1p(1.0 / ks)
        sl = slice(start, start + xs.size)
        if out_f is not None:
            cdf = ndtr(u)
            f = np.log(k_lo * alpha) + np.sum(jumps * cdf, axis=1)
            out_f[sl] = f
        if want_fp:
            out_fp[sl] = np.sum(jumps * np.exp(-0.5 * u * u), axis=1) * (_INV_SQRT_2PI / gamma)
        if want_g:
            # cells k_lo .. k_lo + width; the lowest absorbs all mass below its upper edge
            hi_side = np.concatenate((np.ones((xs.size, 1)), cdf), axis=1)
            lo_side = np.concatenate((cdf, np.zeros((xs.size, 1))), axis=1)
            p = hi_side - lo_side
            dev = np.log(k_lo[:, None] + np.arange(width + 1)) + math.log(alpha) - f[:, None]
            out_g[sl] = np.maximum(np.sum(p * dev * dev, axis=1), 0.0)
    return tuple(None if a is None else a.reshape(shape) for a in (out_f, out_fp, out_g))


def _scalarize(value, like):
    return float(value) if np.ndim(like) == 0 else value


def f_bar(kernel, x):
    """Conditional mean ``E(Y | X = x)``."""
    xa = np.asarray(x, dtype=float)
    if isinstance(kernel, AdditiveGaussian):
        out = xa.copy()
    elif isinstance(kernel, PureRounding):
        ticks = np.maximum(round_ticks(np.exp(xa), kernel.alpha), 1)
        out = np.log(ticks * kernel.alpha)
    elif isinstance(kernel, NoiseThenRound):
        out = _ntr_moments(xa, kernel.gamma, kernel.alpha, want_fp=False, want_g=False)[0]
    else:
        raise TypeError(f"unknown kernel {kernel!r}")
    return _scalarize(out, x)


def f_prime(kernel, x):
    """Derivative of the conditional mean; undefined for pure rounding."""
    xa = np.asarray(x, dtype=float)
    if isinstance(kernel, AdditiveGaussian):
        out = np.ones_like(xa)
    elif isinstance(kernel, NoiseThenRound):
        out = _ntr_moments(xa, kernel.gamma, kernel.alpha, want_f=False, want_g=False)[1]
    elif isinstance(kernel, PureRounding):
        raise UnsupportedKernelError("f is a step function under pure rounding; f' does not exist")
    else:
        raise TypeError(f"unknown kernel {kernel!r}")
    return _scalarize(out, x)


def g_var(kernel, x):
    """Conditional noise variance ``E((Y - f(X))**2 | X = x)``."""
    xa = np.asarray(x, dtype=float)
    if isinstance(kernel, AdditiveGaussian):
        out = np.full_like(xa, kernel.gamma**2)
    elif isinstance(kernel, PureRounding):
        out = np.zeros_like(xa)
    elif isinstance(kernel, NoiseThenRound):
        out = _ntr_moments(xa, kernel.gamma, kernel.alpha, want_fp=False)[2]
    else:
        raise TypeError(f"unknown kernel {kernel!r}")
    return _scalarize(out, x)


def moment_profile(kernel, values):
    """f, f' and g along ``values`` in one pass."""
    x = np.asarray(values, dtype=float)
    if isinstance(kernel, NoiseThenRound):
        f, fp, g = _ntr_moments(x, kernel.gamma, kernel.alpha)
    else:
        f, fp, g = f_bar(kernel, x), f_prime(kernel, x), g_var(kernel, x)
    return MomentProfile(x, np.asarray(f), np.asarray(fp), np.asarray(g))


def _require_smooth(kernel):
    if isinstance(kernel, PureRounding):
        raise UnsupportedKernelError("pure rounding has no differentiable conditional mean")


def qv_target(kernel, path):
    """``<f(X), f(X)>_T`` as a left-point Riemann sum on the master grid."""
    _require_smooth(kernel)
    fp = f_prime(kernel, path.values[:-1])
    return float(np.sum(fp * fp * path.step_variances()))


def xi_squared(kernel, path):
    """Discretization coefficient ``(4/3) * integral (f' sigma)**4 dt``."""
    _require_smooth(kernel)
    fp = f_prime(kernel, path.values[:-1])
    v = path.step_variances()
    return float(4.0 / 3.0 * np.sum((fp * fp * v) ** 2) / path.fine_dt)


def avar_thm1(kernel, path, c):
    """Asymptotic variance of ``n**(1/6) * (TSRV - target)`` for ``K = c n**(2/3)``."""
    return thm1_quantities(kernel, path, c)[2]


def thm1_quantities(kernel, path, c):
    """``(target, xi2, avar)`` sharing one evaluation of f' and g on the path."""
    _require_smooth(kernel)
    if not c > 0:
        raise ValueError("c must be positive")
    x = path.values[:-1]
    prof = moment_profile(kernel, x)
    v = path.step_variances()
    fp2v = prof.fprime**2 * v
    target = float(np.sum(fp2v))
    xi2 = float(4.0 / 3.0 * np.sum(fp2v * fp2v) / path.fine_dt)
    T = path.grid.T
    g_int = float(np.sum(prof.g**2) * path.fine_dt)
    avar = 8.0 / (T * c * c) * g_int + c * xi2 * T
    return target, xi2, avar
