"""Chaotic iterations on Boolean networks and the generators built on them.

Cell ``i`` (1-based) of a state lives in bit ``i - 1`` of an integer word,
and a subset of cells is the bitmask with those bits set.  Strategies are
finite lists of masks; every operation depends only on the prefix it
consumes.
"""

import numpy as np

from .errors import DomainError
from .seeding import SeedExpander
from .xorlike import MASK32, XorShift64, Xor128, XorWow, uniform_range

MAX_TABLE_BITS = 24


class BooleanFunction:
    """A map f: B^n -> B^n.

    Small functions carry an explicit truth table (``table[x] == f(x)``),
    which is what the analysis routines need.  Larger ones (up to n = 64)
    may be given as a plain callable and can only be iterated.
    """

    def __init__(self, n, table=None, func=None):
        if not 1 <= n <= 64:
            raise DomainError("dimension must lie in 1..64")
        if (table is None) == (func is None):
            raise DomainError("give exactly one of table or func")
        self.n = n
        self.mask = (1 << n) - 1
        self.func = func
        self.table = None
        if table is not None:
            if n > MAX_TABLE_BITS:
                raise DomainError(f"truth tables are limited to n <= {MAX_TABLE_BITS}")
            table = np.asarray(table, dtype=np.uint64)
            if table.shape != (1 << n,):
                raise DomainError(f"table must have 2**{n} entries")
            if table.size and int(table.max()) > self.mask:
                raise DomainError("table entry does not fit in n bits")
            self.table = table

    def __call__(self, x):
        if self.table is not None:
            return int(self.table[x])
        return self.func(x) & self.mask

    def as_table(self):
        if self.table is None:
            if self.n > MAX_TABLE_BITS:
                raise DomainError("function too large to tabulate")
            self.table = np.array([self.func(x) & self.mask
                                   for x in range(1 << self.n)], dtype=np.uint64)
        return self.table

    def __repr__(self):
        kind = "table" if self.table is not None else "callable"
        return f"BooleanFunction(n={self.n}, {kind})"

    @classmethod
    def negation(cls, n):
        mask = (1 << n) - 1
        if n <= 16:
            return cls(n, table=np.arange(1 << n, dtype=np.uint64) ^ np.uint64(mask))
        return cls(n, func=lambda x: ~x & mask)

    @classmethod
    def identity(cls, n):
        if n <= 16:
            return cls(n, table=np.arange(1 << n, dtype=np.uint64))
        return cls(n, func=lambda x: x)

    @classmethod
    def constant(cls, n, value=0):
        return cls(n, table=np.full(1 << n, value, dtype=np.uint64))

    @classmethod
    def random(cls, n, rng):
        """Uniformly random table drawn from a numpy ``Generator``."""
        return cls(n, table=rng.integers(0, 1 << n, size=1 << n, dtype=np.uint64))


def load_boolean_function(path):
    """Read the text format: ``n`` on the first line, then 2**n hex values."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise DomainError(f"{path}: empty Boolean function file")
    try:
        n = int(lines[0])
        table = [int(v, 16) for v in lines[1:]]
    except ValueError as exc:
        raise DomainError(f"{path}: {exc}") from None
    if not 1 <= n <= 16:
        raise DomainError(f"{path}: dimension must lie in 1..16")
    if len(table) != 1 << n:
        raise DomainError(f"{path}: expected {1 << n} values, got {len(table)}")
    return BooleanFunction(n, table=table)


def save_boolean_function(f, path):
    table = f.as_table()
    width = max(1, (f.n + 3) // 4)
    with open(path, "w") as fh:
        fh.write(f"{f.n}\n")
        for v in table:
            fh.write(f"{int(v):0{width}x}\n")


def apply_single(f, i, x):
    """Update cell ``i`` of ``x`` with the matching component of f(x)."""
    if not 1 <= i <= f.n:
        raise DomainError(f"cell index {i} outside 1..{f.n}")
    bit = 1 << (i - 1)
    return (x & ~bit) | (f(x) & bit)


def apply_subset(f, mask, x):
    """Update every cell whose bit is set in ``mask``; keep the others."""
    return (x & ~mask) | (f(x) & mask)


def xor_ci_step(x, s):
    """A general chaotic iteration with the vectorial negation: x XOR s."""
    return x ^ s


def iterate(f, x0, strategy):
    """Trajectory ``[x0, x1, ..., xK]`` of the subset iterations."""
    traj = [x0]
    x = x0
    for mask in strategy:
        if mask >> f.n:
            raise DomainError(f"strategy term {mask:#x} has bits beyond n={f.n}")
        x = apply_subset(f, mask, x)
        traj.append(x)
    return traj


def algorithm1_strategy(b, n, strat_rng, len_rng):
    """Cell indices drawn by one call of the single-cell CI generator.

    ``k = b + U(1..b)`` from ``len_rng``, then ``k + 1`` indices from
    ``strat_rng`` (the loop runs for i = 0..k).
    """
    if b < 1:
        raise DomainError("iteration number b must be >= 1")
    k = b + uniform_range(len_rng, b)
    return [uniform_range(strat_rng, n) for _ in range(k + 1)]


def algorithm1_next(f, b, x0, strat_rng, len_rng):
    x = x0
    for i in algorithm1_strategy(b, f.n, strat_rng, len_rng):
        x = apply_single(f, i, x)
    return x


class CiSequentialState:
    """State of the sequential CI generator driven by three xor-like PRNGs."""

    __slots__ = ("x", "xorshift", "xor128", "xorwow")

    DEFAULT_X = 123123123

    def __init__(self, x=DEFAULT_X, xorshift=None, xor128=None, xorwow=None):
        self.x = x & MASK32
        self.xorshift = xorshift if xorshift is not None else XorShift64()
        self.xor128 = xor128 if xor128 is not None else Xor128(bits=64)
        self.xorwow = xorwow if xorwow is not None else XorWow(bits=64)

    @classmethod
    def from_expander(cls, ex):
        """Draw x, then xorshift64, xor128 and xorwow (+ counter) seeds."""
        x = ex.next32()
        xs = XorShift64(ex.nonzero64())
        x128 = Xor128(_nonzero_words(ex, 4), bits=64)
        xw_state = _nonzero_words(ex, 5)
        xw = XorWow(xw_state, ex.next64(), bits=64)
        return cls(x, xs, x128, xw)

    @classmethod
    def from_seed(cls, master_seed):
        return cls.from_expander(SeedExpander(master_seed))

    def copy(self):
        return CiSequentialState(self.x, self.xorshift.copy(),
                                 self.xor128.copy(), self.xorwow.copy())

    def next(self):
        return ci_sequential_next(self)

    def words(self, count):
        """``count`` successive outputs as a uint32 array."""
        out = np.empty(count, dtype=np.uint32)
        x = self.x
        M64 = 0xFFFFFFFFFFFFFFFF
        s1 = self.xorshift.x
        a, b, c, d = self.xor128.state
        p, q, r, s, v = self.xorwow.state
        cnt = self.xorwow.counter
        # The loop folds the six 32-bit halves as the halves of one
        # 64-bit XOR, and lets the Weyl counter grow unmasked (only its
        # low 64 bits ever matter); both are exact rewrites of next().
        for j in range(count):
            s1 ^= (s1 << 13) & M64
            s1 ^= s1 >> 7
            s1 ^= (s1 << 17) & M64
            t = a ^ ((a << 11) & M64)
            a, b, c, d = b, c, d, d ^ (d >> 19) ^ t ^ (t >> 8)
            t = p ^ (p >> 2)
            p, q, r, s, v = q, r, s, v, v ^ t ^ (((v << 4) ^ (t << 1)) & M64)
            cnt += 362437
            u = s1 ^ d ^ (cnt + v)
            x ^= (u ^ (u >> 32)) & MASK32
            out[j] = x
        cnt &= M64
        self.x = x
        self.xorshift.x = s1
        self.xor128.state = (a, b, c, d)
        self.xorwow.state = (p, q, r, s, v)
        self.xorwow.counter = cnt
        return out


def _nonzero_words(ex, k):
    while True:
        words = tuple(ex.next64() for _ in range(k))
        if any(words):
            return words


def ci_sequential_next(s):
    """One output of the sequential generator, statement order preserved."""
    t1 = s.xorshift.next()
    t2 = s.xor128.next()
    t3 = s.xorwow.next()
    x = s.x
    x ^= t1 & MASK32
    x ^= (t2 >> 32) & MASK32
    x ^= (t3 >> 32) & MASK32
    x ^= t2 & MASK32
    x ^= (t1 >> 32) & MASK32
    x ^= t3 & MASK32
    s.x = x
    return x
