"""Deterministic pseudo-randomness for shuffles, splits, and sampling.

Everything that consumes randomness in this package goes through
:class:`XorShift64Star`, a self-contained 64-bit generator implemented in
pure integer arithmetic.  The point is the contract: a fixed seed yields
the identical permutation / index stream on every platform and every
interpreter version, which keeps folds, splits, coordinate orders, and
SGD trajectories bit-reproducible.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    # Used once to spread the user seed over 64 bits; guards against the
    # all-zero state that xorshift cannot leave.
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


class XorShift64Star:
    """xorshift64* stream with rejection-sampled bounded draws."""

    def __init__(self, seed: int):
        state = _splitmix64(seed & _MASK64)
        self._state = state if state != 0 else 0x9E3779B97F4A7C15

    def next_u64(self) -> int:
        x = self._state
        x ^= (x >> 12)
        x ^= (x << 25) & _MASK64
        x ^= (x >> 27)
        self._state = x
        return (x * 0x2545F4914F6CDD1D) & _MASK64

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) without modulo bias."""
        if n <= 0:
            raise ValueError("bound must be positive")
        limit = (_MASK64 + 1) - ((_MASK64 + 1) % n)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n

    def permutation(self, n: int) -> list[int]:
        """Fisher-Yates permutation of range(n)."""
        perm = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.below(i + 1)
            perm[i], perm[j] = perm[j], perm[i]
        return perm


def derive_seed(seed: int, stream: int) -> int:
    """Decorrelated child seed for an independent consumer."""
    return _splitmix64((seed & _MASK64) ^ _splitmix64(stream & _MASK64))
