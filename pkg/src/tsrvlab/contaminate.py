"""Microstructure contamination of latent log prices.

Three kernels give the conditional law of an observed log price ``Y`` given
the latent value ``X = x``:

* ``AdditiveGaussian(gamma)``: ``Y = x + eta`` with ``eta ~ N(0, gamma**2)``.
* ``PureRounding(alpha)``: the price ``exp(x)`` rounded to the nearest
  multiple of ``alpha``, never below ``alpha``. Deterministic.
* ``NoiseThenRound(gamma, alpha)``: the price ``exp(x + eta)`` rounded the
  same way.

Rounded prices are carried as integer tick counts so that "a positive
multiple of alpha" holds exactly; log prices are derived from the counts.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from ._random import PURPOSE_NOISE, make_rng

__all__ = [
    "AdditiveGaussian",
    "PureRounding",
    "NoiseThenRound",
    "ObservedSeries",
    "kernel_from_dict",
    "round_price",
    "round_ticks",
    "observe_one",
    "contaminate_series",
]

# Half-tick ties are detected with this slack (in tick units) and rounded up.
TIE_TOL = 1e-9


def _positive(name, value):
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be positive and finite, got {value!r}")
    return value


@dataclass(frozen=True)
class AdditiveGaussian:
    gamma: float

    def __post_init__(self):
        object.__setattr__(self, "gamma", _positive("gamma", self.gamma))

    name = "additive"

    def to_dict(self):
        return {"kernel": self.name, "gamma": self.gamma}


@dataclass(frozen=True)
class PureRounding:
    alpha: float = 0.01

    def __post_init__(self):
        object.__setattr__(self, "alpha", _positive("alpha", self.alpha))

    name = "rounding"

    def to_dict(self):
        return {"kernel": self.name, "alpha": self.alpha}


@dataclass(frozen=True)
class NoiseThenRound:
    gamma: float
    alpha: float = 0.01

    def __post_init__(self):
        object.__setattr__(self, "gamma", _positive("gamma", self.gamma))
        object.__setattr__(self, "alpha", _positive("alpha", self.alpha))

    name = "noise_round"

    def to_dict(self):
        return {"kernel": self.name, "gamma": self.gamma, "alpha": self.alpha}


KERNELS = {k.name: k for k in (AdditiveGaussian, PureRounding, NoiseThenRound)}


def kernel_from_dict(d):
    """Inverse of ``kernel.to_dict()``."""
    d = dict(d)
    try:
        cls = KERNELS[d.pop("kernel")]
    except KeyError as exc:
        raise ValueError(f"unknown kernel {exc.args[0]!r}; expected one of {sorted(KERNELS)}")
    return cls(**d)


def is_rounding(kernel):
    return isinstance(kernel, (PureRounding, NoiseThenRound))


def round_ticks(prices, alpha):
    """Nearest tick count ``round(s / alpha)`` with half-ticks rounded up.

    Returns int64 counts; prices must be non-negative.
    """
    prices = np.asarray(prices, dtype=float)
    if np.any(prices < 0) or np.any(np.isnan(prices)):
        raise ValueError("prices must be non-negative")
    q = prices / alpha
    k = np.floor(q)
    k += (q - k) >= 0.5 - TIE_TOL
    return k.astype(np.int64)


def round_price(s, alpha):
    """``alpha * round(s / alpha)``; exact half ticks go up.

    >>> round_price(0.015, 0.01)
    0.02
    """
    if s < 0:
        raise ValueError(f"price must be non-negative, got {s!r}")
    alpha = _positive("alpha", alpha)
    return float(round_ticks(s, alpha)) * alpha


def _ticks_for(kernel, x, eta):
    z = x if eta is None else x + eta
    ticks = round_ticks(np.exp(z), kernel.alpha)
    return np.maximum(ticks, 1)


def _log_ticks(ticks, alpha):
    return np.log(ticks * alpha)


def observe_one(kernel, x, rng):
    """One observed log price given latent log price ``x``.

    ``rng`` is only consumed by the noisy kernels.
    """
    if isinstance(kernel, AdditiveGaussian):
        return float(x + kernel.gamma * rng.standard_normal())
    if isinstance(kernel, PureRounding):
        return float(_log_ticks(_ticks_for(kernel, x, None), kernel.alpha))
    if isinstance(kernel, NoiseThenRound):
        eta = kernel.gamma * rng.standard_normal()
        return float(_log_ticks(_ticks_for(kernel, x, eta), kernel.alpha))
    raise TypeError(f"unknown kernel {kernel!r}")


@dataclass(frozen=True, eq=False)
class ObservedSeries:
    """Observed log prices at ``t_0..t_n`` and where they came from.

    ``ticks`` holds the integer tick counts for the rounding kernels and is
    ``None`` for additive noise.
    """

    y: np.ndarray = field(repr=False)
    kernel: object
    seed: int | None = None
    stream: int | None = None
    ticks: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        for name in ("y", "ticks"):
            arr = getattr(self, name)
            if arr is not None:
                arr = np.array(arr)
                arr.flags.writeable = False
                object.__setattr__(self, name, arr)

    def __len__(self):
        return self.y.size

    @property
    def prices(self):
        if self.ticks is not None:
            return self.ticks * self.kernel.alpha
        return np.exp(self.y)


def contaminate_series(kernel, latent, seed=0, stream=0):
    """Observe every latent value independently through ``kernel``."""
    x = np.asarray(latent, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("latent must be a non-empty 1-D sequence")
    if isinstance(kernel, PureRounding):
        ticks = _ticks_for(kernel, x, None)
        return ObservedSeries(_log_ticks(ticks, kernel.alpha), kernel, seed, stream, ticks)

    rng = make_rng(seed, stream, PURPOSE_NOISE)
    eta = kernel.gamma * rng.standard_normal(x.size)
    if isinstance(kernel, AdditiveGaussian):
        return ObservedSeries(x + eta, kernel, seed, stream)
    if isinstance(kernel, NoiseThenRound):
        ticks = _ticks_for(kernel, x, eta)
        return ObservedSeries(_log_ticks(ticks, kernel.alpha), kernel, seed, stream, ticks)
    raise TypeError(f"unknown kernel {kernel!r}")
