"""Deterministic pseudo-random numbers with a fully specified algorithm.

Everything stochastic in this package (synthetic data, forest bootstrap,
MCMC draws) runs on the xorshift64* generator below rather than a library
RNG, so that a given seed reproduces the exact same stream on any platform
and in any reimplementation.

State update (64-bit unsigned arithmetic, wrapping):

    s ^= s >> 12
    s ^= s << 25
    s ^= s >> 27
    output = (s * 0x2545F4914F6CDD1D) mod 2^64

Uniform doubles take the top 53 bits of the output: ``(output >> 11) * 2^-53``.
Seeds are expanded into a nonzero starting state with the splitmix64
finalizer, also given below.
"""

from __future__ import annotations

import math

_MASK64 = (1 << 64) - 1
_MULT = 0x2545F4914F6CDD1D
_INV53 = 1.0 / (1 << 53)


def _splitmix64(z: int) -> int:
    """splitmix64 finalizer: z += 0x9E3779B97F4A7C15, then two xor-multiply mixes."""
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(base: int, index: int) -> int:
    """Deterministic child seed for stream ``index`` of a base seed.

    Defined as splitmix64 applied to ``base + (index + 1) * 0x9E3779B97F4A7C15``,
    so distinct indices yield statistically independent streams.
    """
    return _splitmix64((base + (index + 1) * 0x9E3779B97F4A7C15) & _MASK64)


class Xorshift64Star:
    """xorshift64* stream seeded via splitmix64 (never a zero state)."""

    def __init__(self, seed: int):
        state = _splitmix64(seed & _MASK64)
        if state == 0:
            state = 0x9E3779B97F4A7C15
        self._state = state

    def next_u64(self) -> int:
        s = self._state
        s ^= s >> 12
        s = (s ^ (s << 25)) & _MASK64
        s ^= s >> 27
        self._state = s
        return (s * _MULT) & _MASK64

    def random(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) * _INV53

    def randint(self, n: int) -> int:
        """Integer in [0, n) by the multiply-shift reduction (n up to 2^53)."""
        if n <= 0:
            raise ValueError("n must be positive")
        return (self.next_u64() * n) >> 64

    def normal(self, mean: float = 0.0, sd: float = 1.0) -> float:
        """Gaussian draw by the Marsaglia polar method (second value discarded)."""
        while True:
            u = 2.0 * self.random() - 1.0
            v = 2.0 * self.random() - 1.0
            s = u * u + v * v
            if 0.0 < s < 1.0:
                return mean + sd * u * math.sqrt(-2.0 * math.log(s) / s)

    def normals(self, count: int, mean: float = 0.0, sd: float = 1.0) -> list[float]:
        return [self.normal(mean, sd) for _ in range(count)]

    def sample_without_replacement(self, n: int, k: int) -> list[int]:
        """First k entries of a partial Fisher-Yates shuffle of range(n)."""
        if not 0 <= k <= n:
            raise ValueError("need 0 <= k <= n")
        pool = list(range(n))
        for i in range(k):
            j = i + self.randint(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]
