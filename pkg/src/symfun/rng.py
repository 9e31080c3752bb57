"""SplitMix64, the portable generator behind randomized verification.

State advances by the golden-ratio increment ``0x9E3779B97F4A7C15``; each
output is the new state passed through the mixer::

    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z =  z ^ (z >> 31)

all arithmetic modulo 2^64. A letter in ``0..l-1`` is drawn as
``next_u64() % l``.
"""

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        return self.next_u64() % bound

    def block(self, size: int, B: int) -> tuple[int, ...]:
        return tuple(self.next_u64() % size for _ in range(B))
