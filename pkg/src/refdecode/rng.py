"""Deterministic 64-bit mixing and a splittable counter-based generator.

Every constant and update rule in this module is part of the project's
cross-implementation fixture format (docs/formats.md): a port in any
language must reproduce these functions bit-for-bit, or trace files will
not compare equal.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB


def mix64(x: int) -> int:
    """Avalanching 64-bit permutation (multiply-xor-shift finalizer)."""
    x &= MASK64
    x = ((x ^ (x >> 30)) * _MIX_A) & MASK64
    x = ((x ^ (x >> 27)) * _MIX_B) & MASK64
    return x ^ (x >> 31)


def fold(key: int, word: int) -> int:
    """Absorb one integer word into a derivation key."""
    return mix64(key ^ mix64((word + GOLDEN) & MASK64))


def fold_bytes(key: int, data: bytes) -> int:
    """Absorb a byte string: 8 bytes per word, little-endian, then the length."""
    for i in range(0, len(data), 8):
        key = fold(key, int.from_bytes(data[i : i + 8], "little"))
    return fold(key, len(data))


def derive_key(seed: int, *words: int | str) -> int:
    """Derive a stream key from a seed and an ordered list of split words."""
    key = mix64(seed & MASK64)
    for w in words:
        if isinstance(w, str):
            key = fold_bytes(key, w.encode("utf-8"))
        else:
            key = fold(key, w & MASK64)
    return key


class SplitRng:
    """Counter-based generator: draw i of stream `key` is mix64(key + i*GOLDEN).

    Splitting derives a child key from the parent key and the split words;
    the parent's counter is untouched, so sibling streams never interleave
    and a whole run is reproducible from (seed, split path) alone.
    """

    __slots__ = ("key", "counter")

    def __init__(self, seed: int, *words: int | str):
        self.key = derive_key(seed, *words)
        self.counter = 0

    def next_u64(self) -> int:
        self.counter += 1
        return mix64((self.key + self.counter * GOLDEN) & MASK64)

    def next_below(self, bound: int) -> int:
        """Draw an integer in [0, bound). Consumes exactly one u64 draw."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        return self.next_u64() % bound

    def split(self, *words: int | str) -> "SplitRng":
        child = SplitRng.__new__(SplitRng)
        key = self.key
        for w in words:
            if isinstance(w, str):
                key = fold_bytes(key, w.encode("utf-8"))
            else:
                key = fold(key, w & MASK64)
        child.key = key
        child.counter = 0
        return child


def geometric(rng: SplitRng, mean: float) -> int:
    """Geometric span length with the given mean, minimum 1.

    Integer-threshold rejection: each trial succeeds when a u64 draw falls
    below floor(2^64/mean), so results depend only on the draw stream.
    """
    if mean <= 1.0:
        return 1
    threshold = int((1 << 64) / mean)
    length = 1
    while rng.next_u64() >= threshold:
        length += 1
    return length
