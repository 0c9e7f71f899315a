"""Blum Blum Shub with 16-bit moduli and the BBS-driven GPU kernel.

Moduli stay below 2**16 so every square fits in a 32-bit word.  Each
logical thread owns eight small BBS generators; one output word is built
from eight 4-bit draws, two variable left shifts of at most 3 bits filled
from further draws, and the shared-memory mixing of the improved kernel.
"""

from dataclasses import dataclass, field
from math import gcd
from typing import Optional

import numpy as np

from .errors import ConfigurationError, DomainError
from .kernels import _map_chunks, lockstep_fold, neighbour_indices
from .seeding import SeedExpander

MASK32 = 0xFFFFFFFF
MODULUS_LIMIT = 1 << 16
ARRAY_SHIFT = (0, 1, 3, 7)
NUM_GENERATORS = 8
NUM_COMBINATIONS = 16


def is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def blum_primes(lo=131, hi=251):
    """Primes ``p`` in ``lo..hi`` with ``p % 4 == 3``."""
    return [p for p in range(lo, hi + 1) if p % 4 == 3 and is_prime(p)]


BBS_PRIMES = tuple(blum_primes())


def bbs_modulus(p, q):
    if p == q:
        raise DomainError("BBS primes must be distinct")
    for v in (p, q):
        if not is_prime(v):
            raise DomainError(f"{v} is not prime")
        if v % 4 != 3:
            raise DomainError(f"{v} is not congruent to 3 mod 4")
    M = p * q
    if M >= MODULUS_LIMIT:
        raise DomainError(f"modulus {M} does not fit in 16 bits")
    return M


def bbs_keygen(ex):
    """Modulus from two distinct primes of :data:`BBS_PRIMES`."""
    i = ex.below(len(BBS_PRIMES))
    j = ex.below(len(BBS_PRIMES) - 1)
    if j >= i:
        j += 1
    return bbs_modulus(BBS_PRIMES[i], BBS_PRIMES[j])


def _factor_blum(M):
    for p in range(3, int(M ** 0.5) + 1, 2):
        if M % p == 0:
            return p, M // p
    raise DomainError(f"{M} is not a product of two odd primes")


def check_seed(x, M):
    """Reject seeds whose orbit collapses onto the fixed point 1.

    Besides 0, 1 and M - 1 this excludes the two other square roots of
    unity modulo ``M``.  Any other coprime seed has an orbit of quadratic
    residues that never contains 1.
    """
    if not 1 < x < M - 1:
        raise DomainError(f"BBS seed {x} must lie strictly between 1 and {M - 1}")
    if gcd(x, M) != 1:
        raise DomainError(f"BBS seed {x} shares a factor with {M}")
    if x * x % M == 1:
        raise DomainError(f"BBS seed {x} is a square root of unity mod {M}")


def bbs_seed(ex, M):
    while True:
        x = 2 + ex.below(M - 3)
        try:
            check_seed(x, M)
        except DomainError:
            continue
        return x


class BbsState:
    __slots__ = ("x", "M")

    def __init__(self, x, M):
        p, q = _factor_blum(M)
        bbs_modulus(p, q)
        check_seed(x, M)
        self.x = x
        self.M = M

    def next(self):
        self.x = self.x * self.x % self.M
        return self.x

    def next4(self):
        return self.next() & 15

    def copy(self):
        return BbsState(self.x, self.M)

    def __repr__(self):
        return f"BbsState(x={self.x}, M={self.M})"


def bbs_next4(s):
    return s.next4()


@dataclass
class BbsThreadState:
    states: list
    x: int = 0
    shared: int = 0

    def copy(self):
        return BbsThreadState([s.copy() for s in self.states], self.x, self.shared)


def bbs_strategy_word(ts):
    """Build one 32-bit strategy word ``t`` from the thread's generators."""
    b = ts.states
    t = 0
    for k in range(NUM_GENERATORS):
        t = ((t << 4) | b[k].next4()) & MASK32
    shift = b[2].next4() & 3
    t = (t << shift) & MASK32
    t |= b[0].next4() & ARRAY_SHIFT[shift]
    shift = b[6].next4() & 3
    t = (t << shift) & MASK32
    t |= b[1].next4() & ARRAY_SHIFT[shift]
    return t


def bbs_kernel_next(ts, shmem_prev, o1, o2):
    """One round for one thread; updates ``ts`` and returns the new x."""
    t = bbs_strategy_word(ts)
    t ^= shmem_prev[o1] ^ shmem_prev[o2]
    ts.shared = t
    ts.x ^= t
    return ts.x


def rotate_states(ts):
    """Generator k is stored back in slot k + 1, generator 8 in slot 1."""
    ts.states = ts.states[-1:] + ts.states[:-1]


@dataclass
class BbsGridConfig:
    """Sixteen combination arrays of a common size ``c``."""

    num_threads: int
    array_comb: tuple
    block_size: Optional[int] = None
    array_shift: tuple = field(default=ARRAY_SHIFT, init=False)

    def __post_init__(self):
        if self.num_threads < 1:
            raise ConfigurationError("need at least one thread")
        self.array_comb = tuple(tuple(int(v) for v in row) for row in self.array_comb)
        if len(self.array_comb) != NUM_COMBINATIONS:
            raise ConfigurationError("the BBS kernel needs 16 combination arrays")
        if len({len(row) for row in self.array_comb}) != 1:
            raise ConfigurationError("combination arrays differ in size")
        self.targets = np.stack([
            neighbour_indices(self.num_threads, row, self.block_size)
            for row in self.array_comb])

    @property
    def combination_size(self):
        return len(self.array_comb[0])

    @classmethod
    def random(cls, num_threads, combination_size, seed, block_size=None):
        ex = SeedExpander(seed)
        return cls(num_threads,
                   [ex.permutation(combination_size) for _ in range(NUM_COMBINATIONS)],
                   block_size)

    @classmethod
    def self_combining(cls, num_threads):
        return cls(num_threads, [(0,)] * NUM_COMBINATIONS)

    def neighbours(self, t, bbs1_x, bbs2_x):
        """``(o1, o2)`` for thread ``t`` from the pre-round generator states."""
        return (int(self.targets[bbs1_x & 7, t]),
                int(self.targets[8 + (bbs2_x & 7), t]))


@dataclass
class BbsGrid:
    xs: np.ndarray
    moduli: np.ndarray
    x: np.ndarray
    shared: np.ndarray

    @property
    def num_threads(self):
        return self.x.shape[0]

    def copy(self):
        return BbsGrid(self.xs.copy(), self.moduli.copy(), self.x.copy(),
                       self.shared.copy())

    def thread_state(self, t):
        return BbsThreadState(
            [BbsState(int(self.xs[k, t]), int(self.moduli[k, t]))
             for k in range(NUM_GENERATORS)],
            int(self.x[t]), int(self.shared[t]))

    @classmethod
    def from_states(cls, states):
        return cls(
            np.array([[s.x for s in ts.states] for ts in states], dtype=np.uint64).T.copy(),
            np.array([[s.M for s in ts.states] for ts in states], dtype=np.uint64).T.copy(),
            np.array([ts.x for ts in states], dtype=np.uint32),
            np.array([ts.shared for ts in states], dtype=np.uint32))


def seed_bbs_grid(master_seed, num_threads):
    """Per thread: eight (modulus, seed) pairs, then x and the shared cell."""
    ex = SeedExpander(master_seed)
    threads = []
    for _ in range(num_threads):
        states = []
        for _ in range(NUM_GENERATORS):
            M = bbs_keygen(ex)
            states.append(BbsState(bbs_seed(ex, M), M))
        threads.append(BbsThreadState(states, ex.next32(), ex.next32()))
    return BbsGrid.from_states(threads)


def bbs_strategy_draws(xs, moduli, n):
    """Vectorised :func:`bbs_strategy_word` for ``n`` rounds; ``xs`` updated in place."""
    shift_mask = np.array(ARRAY_SHIFT, dtype=np.uint64)
    lo = np.uint64(MASK32)
    draws = np.empty((n, xs.shape[1]), dtype=np.uint32)
    regs = [xs[k].copy() for k in range(NUM_GENERATORS)]
    mods = [moduli[k] for k in range(NUM_GENERATORS)]

    def step(k):
        regs[k] = regs[k] * regs[k] % mods[k]
        return regs[k]

    for i in range(n):
        t = np.zeros(xs.shape[1], dtype=np.uint64)
        for k in range(NUM_GENERATORS):
            t = ((t << np.uint64(4)) | (step(k) & np.uint64(15))) & lo
        shift = step(2) & np.uint64(3)
        t = (t << shift) & lo
        t |= step(0) & shift_mask[shift]
        shift = step(6) & np.uint64(3)
        t = (t << shift) & lo
        t |= step(1) & shift_mask[shift]
        draws[i] = t
    xs[:] = np.stack(regs)
    return draws


def bbs_grid_run(grid, config, n, workers=1):
    """One kernel call: ``n`` words per thread, then the slot rotation."""
    T = grid.num_threads
    if config.num_threads != T:
        raise ConfigurationError("grid and configuration disagree on thread count")
    tid = np.arange(T)
    o1 = config.targets[(grid.xs[0] & np.uint64(7)).astype(np.int64), tid]
    o2 = config.targets[8 + (grid.xs[1] & np.uint64(7)).astype(np.int64), tid]
    draws = np.empty((n, T), dtype=np.uint32)

    def run(sl):
        xs = grid.xs[:, sl].copy()
        draws[:, sl] = bbs_strategy_draws(xs, grid.moduli[:, sl], n)
        grid.xs[:, sl] = xs

    _map_chunks(run, T, workers)
    out = lockstep_fold(draws, o1, o2, grid.x, grid.shared)
    grid.xs[:] = np.roll(grid.xs, 1, axis=0)
    grid.moduli[:] = np.roll(grid.moduli, 1, axis=0)
    return out.ravel()
