"""Keyed, reproducible random streams.

Every stochastic component draws from its own Philox substream derived from
(seed, *integer key).  Streams are therefore independent of evaluation order
and of the number of workers: the same (seed, key) always yields the same
sequence.
"""

import numpy as np

# Fixed channel ids for substream keys; values are part of the
# reproducibility contract and must not be renumbered.
CH_SEED_FIELD = 0
CH_PAIRS = 1
CH_PROBE_EXTRA = 2
CH_CONJ_EXTRA = 3
CH_TECH_NOISE = 4
CH_BACKGROUND = 5
CH_EMULATION = 6


def substream(seed, *key):
    """Return a ``numpy.random.Generator`` for the given seed and key tuple."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))
