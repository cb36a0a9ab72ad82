"""Deterministic PRNG used for random partitioning.

The generator is pinned precisely so that any reimplementation, in any
language, reproduces placements bit for bit:

  * Seeding: SplitMix64 (Vigna's reference) over the user seed produces the
    four 64-bit state words. SplitMix64 step, all mod 2**64:
        x += 0x9E3779B97F4A7C15
        z = x
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
        z = (z ^ (z >> 27)) * 0x94D049BB133111EB
        return z ^ (z >> 31)
  * Stream: xoshiro256** (Blackman & Vigna). Output per step:
        rotl64(s1 * 5, 7) * 9
    followed by the state update
        t = s1 << 17
        s2 ^= s0;  s3 ^= s1;  s1 ^= s2;  s0 ^= s3
        s2 ^= t;   s3 = rotl64(s3, 45)
  * Bounded draws use plain modulo reduction: next() % n.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK


class SplitMix64:
    def __init__(self, seed: int):
        self._x = seed & _MASK

    def next(self) -> int:
        self._x = (self._x + 0x9E3779B97F4A7C15) & _MASK
        z = self._x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)


class Xoshiro256StarStar:
    """xoshiro256** seeded via four SplitMix64 outputs of the user seed."""

    def __init__(self, seed: int):
        sm = SplitMix64(seed)
        self._s = [sm.next(), sm.next(), sm.next(), sm.next()]

    @classmethod
    def from_state(cls, s0: int, s1: int, s2: int, s3: int) -> "Xoshiro256StarStar":
        rng = cls.__new__(cls)
        rng._s = [s0 & _MASK, s1 & _MASK, s2 & _MASK, s3 & _MASK]
        return rng

    def next(self) -> int:
        s = self._s
        result = (_rotl((s[1] * 5) & _MASK, 7) * 9) & _MASK
        t = (s[1] << 17) & _MASK
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def next_below(self, n: int) -> int:
        """Uniform-ish draw in [0, n) by modulo reduction (bias < 2**-57 for
        any fleet-sized n; pinned this way for cross-language fidelity)."""
        return self.next() % n
