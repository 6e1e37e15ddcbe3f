"""Deterministic 64-bit PRNG used for every random draw in this package.

The generator is SplitMix64 (Steele, Lea & Flood, "Fast splittable
pseudorandom number generators", OOPSLA 2014): a 64-bit counter advanced by
the golden-ratio increment 0x9E3779B97F4A7C15, scrambled by two
xor-shift-multiply rounds.  It is tiny, has no state beyond one word, and is
trivially reimplementable in any language, so subset draws and per-run seeds
stay reproducible outside this codebase.

Bounded draws are defined as ``next_u64() % n`` (modulo bias is irrelevant at
the sizes used here and keeps the sequence specification one line).  Shuffles
are Fisher-Yates from the top index down.
"""

from __future__ import annotations

from typing import Sequence, TypeVar

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15

T = TypeVar("T")


def mix64(x: int) -> int:
    """SplitMix64 finalizer: maps a 64-bit value to a scrambled 64-bit value.

    Used to derive independent per-run seeds as ``mix64(base_seed + run)``.
    """
    z = x & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class SplitMix64:
    """Sequential SplitMix64 stream seeded with a 64-bit integer."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        return mix64(self._state)

    def below(self, n: int) -> int:
        """Uniform-ish draw in [0, n) defined as next_u64() % n."""
        if n <= 0:
            raise ValueError("bound must be positive")
        return self.next_u64() % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle (top index down)."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample_indices(self, n: int, k: int) -> list[int]:
        """k distinct indices from range(n), in draw order (partial shuffle)."""
        if not 0 <= k <= n:
            raise ValueError(f"cannot draw {k} from {n}")
        pool = list(range(n))
        for i in range(k):
            j = i + self.below(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]

    def choice(self, items: Sequence[T]) -> T:
        return items[self.below(len(items))]
