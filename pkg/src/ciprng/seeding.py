"""Deterministic expansion of a 64-bit master seed.

Every per-thread parameter of the simulated kernels, and every derived seed
used by the CLI, comes from one ``SeedExpander``.  The mixing function is
SplitMix64 (Steele, Lea and Flood, 2014): a Weyl increment followed by
two xor-shift / odd-multiplier rounds and a final xor-shift, which gives
full avalanche on the 64-bit output.
"""

MASK64 = 0xFFFFFFFFFFFFFFFF

GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def mix64(z):
    """SplitMix64 finaliser."""
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SeedExpander:
    """Stream of well-mixed words derived from a master seed."""

    def __init__(self, master_seed):
        self.state = master_seed & MASK64

    def next64(self):
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return mix64(self.state)

    def next32(self):
        return self.next64() >> 32

    def nonzero64(self):
        while True:
            v = self.next64()
            if v:
                return v

    def nonzero32(self):
        while True:
            v = self.next32()
            if v:
                return v

    def below(self, k):
        """Uniform integer in ``0..k-1`` by rejection."""
        if k < 1:
            raise ValueError("k must be positive")
        limit = (1 << 64) - (1 << 64) % k
        while True:
            v = self.next64()
            if v < limit:
                return v % k

    def permutation(self, k):
        """Fisher-Yates permutation of ``range(k)``."""
        items = list(range(k))
        for i in range(k - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
        return items

    def spawn(self):
        """Independent child expander keyed on the next output."""
        return SeedExpander(self.next64())
