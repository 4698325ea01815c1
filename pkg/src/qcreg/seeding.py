"""Named random substreams derived from one run seed.

Every stochastic component draws from ``substream(seed, name, ...)`` so a
single seed reproduces the whole pipeline while components stay individually
reproducible. Streams are numpy PCG64 generators keyed through SeedSequence
spawn keys, which is stable across platforms and numpy releases.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError

STREAMS = {
    "init": 0,       # variational parameter initialization
    "ising": 1,      # Ising-unit Hamiltonian coefficients
    "kmeans": 2,     # RBF center selection
    "shuffle": 3,    # k-fold row shuffling
    "surrogate": 4,  # synthetic dataset generation
    "probe": 5,      # test/benchmark probes
}


def substream(seed: int, name: str, *extra: int) -> np.random.Generator:
    """Generator for the named stream; extra keys split substreams further."""
    if name not in STREAMS:
        raise ValidationError(f"unknown random stream {name!r}")
    key = (STREAMS[name],) + tuple(int(e) for e in extra)
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=key))
