"""Marsaglia's xor-like generators, bit-exact.

Constants and default seeds are taken from G. Marsaglia, "Xorshift RNGs",
Journal of Statistical Software 8(14), 2003:

=========  =====================  =============================================
generator  shifts                 default seed
=========  =====================  =============================================
xorshift32 (13, 17, 5)            caller supplied
xorshift64 (13, 7, 17)            x = 88172645463325252
xor128     (11, 19, 8)            x, y, z, w = 123456789, 362436069,
                                  521288629, 88675123
xorwow     (2, 1, 4), d += 362437 x, y, z, w, v = 123456789, 362436069,
                                  521288629, 88675123, 5783321; d = 6615241
=========  =====================  =============================================

xor128 and xorwow are published on 32-bit words.  The sequential chaotic
generator runs them on 64-bit words with the same shifts; the improved GPU
kernel uses the 32-bit originals.  Every step function here takes the word
width as a parameter so reduced-width analogs can be checked exhaustively.
"""

from .errors import DomainError

MASK32 = 0xFFFFFFFF
MASK64 = 0xFFFFFFFFFFFFFFFF

XORSHIFT32_SHIFTS = (13, 17, 5)
XORSHIFT64_SHIFTS = (13, 7, 17)
XOR128_SHIFTS = (11, 19, 8)
XORWOW_SHIFTS = (2, 1, 4)
XORWOW_INCREMENT = 362437

XORSHIFT64_SEED = 88172645463325252
XOR128_SEED = (123456789, 362436069, 521288629, 88675123)
XORWOW_SEED = (123456789, 362436069, 521288629, 88675123, 5783321)
XORWOW_COUNTER_SEED = 6615241


def xorshift_step(z, shifts, bits):
    """One left/right/left shift-xor round on a ``bits``-wide word."""
    a, b, c = shifts
    mask = (1 << bits) - 1
    z ^= (z << a) & mask
    z ^= z >> b
    z ^= (z << c) & mask
    return z


def xor128_step(state, shifts=XOR128_SHIFTS, bits=32):
    """Advance a 4-word xor128 state; returns ``(new_state, output)``."""
    a, b, c = shifts
    mask = (1 << bits) - 1
    x, y, z, w = state
    t = x ^ ((x << a) & mask)
    w_new = (w ^ (w >> b)) ^ (t ^ (t >> c))
    return (y, z, w, w_new), w_new


def xorwow_step(state, counter, shifts=XORWOW_SHIFTS,
                increment=XORWOW_INCREMENT, bits=32):
    """Advance a 5-register xorwow state plus Weyl counter.

    Returns ``(new_state, new_counter, output)``.
    """
    a, b, c = shifts
    mask = (1 << bits) - 1
    x, y, z, w, v = state
    t = x ^ (x >> a)
    v_new = (v ^ ((v << c) & mask)) ^ (t ^ ((t << b) & mask))
    counter = (counter + increment) & mask
    return (y, z, w, v, v_new), counter, (counter + v_new) & mask


class XorShift32:
    """32-bit xorshift with shifts (13, 17, 5); period 2**32 - 1."""

    __slots__ = ("z",)

    def __init__(self, z):
        if not 0 < z <= MASK32:
            raise DomainError("xorshift32 state must be a nonzero 32-bit word")
        self.z = z

    def next(self):
        z = self.z
        z ^= (z << 13) & MASK32
        z ^= z >> 17
        z ^= (z << 5) & MASK32
        self.z = z
        return z

    def copy(self):
        return XorShift32(self.z)

    def __repr__(self):
        return f"XorShift32(z={self.z:#010x})"


class XorShift64:
    """64-bit xorshift with shifts (13, 7, 17)."""

    __slots__ = ("x",)

    def __init__(self, x=XORSHIFT64_SEED):
        if not 0 < x <= MASK64:
            raise DomainError("xorshift64 state must be a nonzero 64-bit word")
        self.x = x

    def next(self):
        x = self.x
        x ^= (x << 13) & MASK64
        x ^= x >> 7
        x ^= (x << 17) & MASK64
        self.x = x
        return x

    def copy(self):
        return XorShift64(self.x)


class Xor128:
    """Four-register xor128 on ``bits``-wide words (64 or 32)."""

    __slots__ = ("state", "bits")

    def __init__(self, state=XOR128_SEED, bits=64):
        state = tuple(state)
        mask = (1 << bits) - 1
        if len(state) != 4 or any(not 0 <= s <= mask for s in state):
            raise DomainError(f"xor128 needs four {bits}-bit words")
        if not any(state):
            raise DomainError("xor128 state must not be all zero")
        self.state = state
        self.bits = bits

    def next(self):
        self.state, out = xor128_step(self.state, XOR128_SHIFTS, self.bits)
        return out

    def copy(self):
        return Xor128(self.state, self.bits)


class XorWow:
    """xorwow: five ``bits``-wide shift registers and an additive counter."""

    __slots__ = ("state", "counter", "bits")

    def __init__(self, state=XORWOW_SEED, counter=XORWOW_COUNTER_SEED,
                 bits=64):
        state = tuple(state)
        mask = (1 << bits) - 1
        if len(state) != 5 or any(not 0 <= s <= mask for s in state):
            raise DomainError(f"xorwow needs five {bits}-bit words")
        if not any(state):
            raise DomainError("xorwow shift registers must not be all zero")
        self.state = state
        self.counter = counter & mask
        self.bits = bits

    def next(self):
        self.state, self.counter, out = xorwow_step(
            self.state, self.counter, XORWOW_SHIFTS, XORWOW_INCREMENT,
            self.bits)
        return out

    def copy(self):
        return XorWow(self.state, self.counter, self.bits)


def xorshift32_next(s):
    return s.next()


def xorshift64_next(s):
    return s.next()


def xor128_next(s):
    return s.next()


def xorwow_next(s):
    return s.next()


def uniform_range(s, k, bits=32):
    """Draw an integer uniformly from ``1..k`` using generator ``s``.

    Rejection sampling: outputs at or above the largest multiple of ``k``
    not exceeding ``2**bits`` are discarded, the rest are reduced mod ``k``.
    ``s`` only needs a ``next()`` method returning ``bits``-wide words.
    """
    if k < 1:
        raise DomainError("k must be a positive integer")
    span = 1 << bits
    if k > span:
        raise DomainError(f"k must not exceed 2**{bits}")
    limit = span - span % k
    while True:
        v = s.next()
        if v < limit:
            return v % k + 1
