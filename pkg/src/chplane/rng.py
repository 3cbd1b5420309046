"""Deterministic counter-based random numbers for reproducible subsampling.

Subsample identity must be bit-reproducible across runs, machines, and
implementations, so sampling is driven by SplitMix64: output k is a fixed
64-bit hash of ``seed + (k+1) * GAMMA``, with no hidden state beyond the
counter.  Statistical simulations elsewhere in the package may use numpy
generators; anything whose *identity* is an output (which records were
drawn) must come through here.
"""

from __future__ import annotations

import hashlib

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    """SplitMix64 finalizer (Steele, Lea & Flood 2014)."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class CounterRng:
    """SplitMix64 stream: stateless apart from an incrementing counter."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        return _mix(self._state)

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound), unbiased via rejection."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % bound

    def unit(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0 ** -53

    def shuffled(self, n: int) -> list[int]:
        """Fisher-Yates permutation of range(n)."""
        idx = list(range(n))
        for i in range(n - 1):
            j = i + self.below(n - i)
            idx[i], idx[j] = idx[j], idx[i]
        return idx

    def choose(self, n: int, k: int) -> list[int]:
        """k distinct indices from range(n), in ascending order."""
        if k > n:
            raise ValueError("k exceeds population")
        idx = list(range(n))
        for i in range(k):
            j = i + self.below(n - i)
            idx[i], idx[j] = idx[j], idx[i]
        return sorted(idx[:k])


def derive_seed(seed: int, *parts) -> int:
    """Stable sub-seed for a named stream (bin id, group key, ...).

    Uses BLAKE2b over the textual parts so the derivation does not depend
    on Python's randomized ``hash()``.
    """
    h = hashlib.blake2b(digest_size=8)
    h.update(str(seed & _MASK64).encode())
    for part in parts:
        h.update(b"\x1f")
        h.update(str(part).encode())
    return int.from_bytes(h.digest(), "little")
