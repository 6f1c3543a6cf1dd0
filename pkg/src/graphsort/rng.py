"""Random streams shared by the compiled core and the pure-Python kernels.

Both backends run the same xoshiro256** generator and the same bounded-integer
and float conversions, so a run seeded identically consumes identical draws and
produces identical results whichever backend executes it.
"""

import math

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_TWO_M53 = 1.0 / (1 << 53)


def splitmix64(x):
    """One step of the splitmix64 output function (returns a 64-bit int)."""
    z = (x + _GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(master, *keys):
    """Mix a master seed with integer keys into an independent 64-bit seed.

    Each key is folded through splitmix64 in turn, so ``derive_seed(s, n, t)``
    gives a distinct stream per ``(n, t)`` with no shared state between them.
    """
    h = splitmix64(master & MASK64)
    for k in keys:
        h = splitmix64(h ^ (k & MASK64))
    return h


def _rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & MASK64


class Stream:
    """A xoshiro256** stream.

    The state lives in ``self.s`` as a list of four Python ints so that the
    pure-Python kernels can pull it into locals and the compiled kernels can
    round-trip it through a ``uint64`` array.
    """

    __slots__ = ("s",)

    def __init__(self, seed=0):
        s = [splitmix64((seed + i * _GOLDEN) & MASK64) for i in range(4)]
        if not any(s):
            s[0] = 1
        self.s = s

    @classmethod
    def from_state(cls, state):
        obj = cls.__new__(cls)
        obj.s = [int(v) & MASK64 for v in state]
        return obj

    def spawn(self, *keys):
        """Child stream keyed off the next output of this one."""
        return Stream(derive_seed(self.next64(), *keys))

    def next64(self):
        s0, s1, s2, s3 = self.s
        result = (_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self.s = [s0, s1, s2, s3]
        return result

    def random(self):
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next64() >> 11) * _TWO_M53

    def randbelow(self, m):
        """Uniform integer in [0, m) by Lemire's multiply-and-reject."""
        x = self.next64()
        prod = x * m
        low = prod & MASK64
        if low < m:
            threshold = ((1 << 64) - m) % m
            while low < threshold:
                x = self.next64()
                prod = x * m
                low = prod & MASK64
        return prod >> 64

    def exponential(self, rate):
        return -math.log(1.0 - self.random()) / rate

    def shuffle(self, seq):
        """In-place Fisher-Yates shuffle driven by this stream."""
        for i in range(len(seq) - 1, 0, -1):
            j = self.randbelow(i + 1)
            seq[i], seq[j] = seq[j], seq[i]
