"""Counter-based deterministic random draws for disorder and noise.

Every random number used by the library is a pure function of a key tuple

    (master_seed, stream, realization, interval, index)

hashed through the SplitMix64 finalizer (Steele, Lea & Flood 2014; the
same mixer used to seed the xoshiro family).  There is no sequential
generator state, so realizations, intervals and array indices can be
evaluated in any order -- or in parallel -- and always produce the same
values.

Streams keep the independent draw families apart: static coupling
disorder, static on-site disorder and per-interval dynamic coupling noise
never share a key.
"""

from __future__ import annotations

import numpy as np

# Stream tags (part of the hash key, never reused).
STREAM_STATIC_COUPLING = 1
STREAM_STATIC_ONSITE = 2
STREAM_DYNAMIC_COUPLING = 3

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_U64 = np.uint64


def _mix(z):
    """SplitMix64 finalizer; operates elementwise on uint64 arrays."""
    z = (z ^ (z >> _U64(30))) * _MIX1
    z = (z ^ (z >> _U64(27))) * _MIX2
    return z ^ (z >> _U64(31))


def _absorb(h, value):
    """Fold one key component into the running hash."""
    return _mix((h + _GOLDEN) ^ value)


def uniform_pm1(master_seed: int, stream: int, realization: int,
                interval: int, count: int) -> np.ndarray:
    """Return `count` uniform draws in [-1, 1) for the given key.

    The draw at position ``i`` depends only on the full key
    ``(master_seed, stream, realization, interval, i)``.
    """
    with np.errstate(over="ignore"):
        h = _U64(master_seed & 0xFFFFFFFFFFFFFFFF)
        for v in (stream, realization, interval):
            h = _absorb(h, _U64(int(v) & 0xFFFFFFFFFFFFFFFF))
        idx = np.arange(count, dtype=np.uint64)
        bits = _absorb(h, idx)
    # Top 53 bits -> double in [0, 1), then map to [-1, 1).
    u01 = (bits >> _U64(11)).astype(np.float64) * (2.0 ** -53)
    return 2.0 * u01 - 1.0


def derived_seed(master_seed: int, stream: int, realization: int) -> int:
    """64-bit sub-seed identifying one realization's draw family."""
    with np.errstate(over="ignore"):
        h = _U64(master_seed & 0xFFFFFFFFFFFFFFFF)
        h = _absorb(h, _U64(stream))
        h = _absorb(h, _U64(int(realization) & 0xFFFFFFFFFFFFFFFF))
    return int(h)
