"""Deterministic, schedule-independent random streams.

Every stochastic step derives a fresh counter-based generator from a pure
function of (seed, purpose tag, iteration, anchor), so results never
depend on call order or parallel schedule.
"""

import numpy as np

PERMUTE_TAG = 1
CONTEXT_TAG = 2
INIT_TAG = 3
METRIC_TAG = 4
MODEL_TAG = 5

_MASK = (1 << 64) - 1


def _splitmix(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def stream(seed: int, tag: int, *path: int) -> np.random.Generator:
    h1 = _splitmix(int(seed) & _MASK)
    h2 = _splitmix(h1 ^ _splitmix(int(tag)))
    for p in path:
        h1 = _splitmix(h1 ^ _splitmix(int(p) & _MASK))
        h2 = _splitmix(h2 + h1)
    return np.random.Generator(np.random.Philox(key=[h1, h2]))
