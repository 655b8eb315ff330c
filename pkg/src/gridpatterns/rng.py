"""Deterministic random-stream derivation.

Every stochastic routine in the package draws from a generator obtained
through :func:`substream`, keyed by a root seed plus an integer path.  The
stream for a given key is independent of how work is divided among worker
processes, which is what makes ensembles byte-identical for any worker count.
"""

from __future__ import annotations

import numpy as np


def substream(seed: int, *path: int) -> np.random.Generator:
    """Return an independent generator for the stream named ``(seed, *path)``.

    The same key always yields the same stream, and distinct keys yield
    statistically independent streams.
    """
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(path))
    return np.random.Generator(np.random.PCG64(ss))


def derive_seed(seed: int, *path: int) -> int:
    """Collapse ``(seed, *path)`` into a new integer seed.

    Used to hand a child computation its own root seed so that its internal
    stream indexing starts from a clean namespace.
    """
    state = np.random.SeedSequence(entropy=seed, spawn_key=tuple(path)).generate_state(4)
    return int.from_bytes(state.tobytes(), "little")
