"""Counter-based random number plumbing.

All randomness in the library flows through Philox generators keyed by an
integer seed plus a structured path, so that independent draws are
order-independent and any stage of a pipeline can be replayed in isolation.
"""

from __future__ import annotations

import numpy as np

_SEED_MOD = 2**63


def child_seed(seed: int, *path) -> int:
    """Derive a stable sub-seed for a named stage of a computation.

    Path components may be ints or short strings; strings are folded into
    ints so the derivation is deterministic across platforms.
    """
    key = []
    for part in path:
        if isinstance(part, str):
            acc = 0
            for ch in part.encode("utf-8"):
                acc = (acc * 257 + ch) % _SEED_MOD
            key.append(acc)
        else:
            key.append(int(part) % _SEED_MOD)
    ss = np.random.SeedSequence(entropy=int(seed) % _SEED_MOD, spawn_key=tuple(key))
    return int(ss.generate_state(1, dtype=np.uint64)[0] % _SEED_MOD)


def philox(seed: int, *path) -> np.random.Generator:
    """Philox generator for the given seed and stage path."""
    if path:
        seed = child_seed(seed, *path)
    return np.random.Generator(np.random.Philox(key=int(seed) % _SEED_MOD))


def uniform_open(rng: np.random.Generator, shape) -> np.ndarray:
    """Uniform draws in the half-open interval (0, 1]."""
    u = rng.random(shape)
    return 1.0 - u
