"""Deterministic random streams.

Every draw in the package comes from a Philox counter generator keyed by
``(seed, stream, purpose)``. Replication ``m`` of an experiment uses
``stream=m``; the purpose tag keeps latent-path and contamination draws on
disjoint streams even when they share seed and stream.
"""

import numpy as np

PURPOSE_PATH = 0
PURPOSE_NOISE = 1

_MASK64 = (1 << 64) - 1


def make_rng(seed, stream=0, purpose=PURPOSE_PATH):
    """Return a fresh ``numpy.random.Generator`` for ``(seed, stream, purpose)``."""
    seed = int(seed)
    stream = int(stream)
    if seed < 0 or stream < 0:
        raise ValueError("seed and stream must be non-negative integers")
    ss = np.random.SeedSequence(entropy=seed & _MASK64, spawn_key=(stream, int(purpose)))
    return np.random.Generator(np.random.Philox(ss))
