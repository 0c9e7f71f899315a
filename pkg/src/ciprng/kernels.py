"""CPU simulation of the naive and improved GPU kernels.

Every logical GPU thread is a column of numpy arrays.  Threads are split
into contiguous chunks that may be processed by a pool of OS threads, but
the result never depends on the pool size:

* the naive kernel has no shared state, so chunks are independent;
* the improved kernel runs in lockstep rounds.  In round ``i`` every thread
  reads the shared array as it was after round ``i - 1`` and only then do
  all threads commit their new shared cell.

Output word ``i`` of thread ``t`` goes to position ``n * t + i``.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .chaotic import CiSequentialState
from .errors import ConfigurationError, DomainError
from .seeding import SeedExpander
from .xorlike import Xor128, XorShift64, XorWow

U64 = np.uint64
U32 = np.uint32


def neighbour_indices(num_threads, comb, block_size=None):
    """Global index of the thread each thread reads through ``comb``.

    Inside a block, thread ``j`` reads ``j - j % c + comb[j % c]`` where
    ``c = len(comb)``.  Any index falling outside its block is rejected.
    """
    c = len(comb)
    if c < 1:
        raise ConfigurationError("combination array must not be empty")
    if any(not 0 <= v < c for v in comb):
        raise ConfigurationError(f"combination entries must lie in 0..{c - 1}")
    if block_size is None:
        block_size = num_threads
    if block_size < 1:
        raise ConfigurationError("block size must be positive")
    comb = np.asarray(comb, dtype=np.int64)
    tid = np.arange(num_threads, dtype=np.int64)
    start = tid - tid % block_size
    local = tid - start
    this_block = np.minimum(block_size, num_threads - start)
    offset = local % c
    target = local - offset + comb[offset]
    bad = np.nonzero(target >= this_block)[0]
    if bad.size:
        raise ConfigurationError(
            f"thread {int(bad[0])} would read past its block "
            f"(combination size {c}, block of {int(this_block[bad[0]])})")
    return start + target


@dataclass
class GridConfig:
    num_threads: int
    comb1: tuple
    comb2: tuple
    block_size: Optional[int] = None

    def __post_init__(self):
        if self.num_threads < 1:
            raise ConfigurationError("need at least one thread")
        self.comb1 = tuple(int(v) for v in self.comb1)
        self.comb2 = tuple(int(v) for v in self.comb2)
        if len(self.comb1) != len(self.comb2):
            raise ConfigurationError("combination arrays differ in size")
        self.o1 = neighbour_indices(self.num_threads, self.comb1, self.block_size)
        self.o2 = neighbour_indices(self.num_threads, self.comb2, self.block_size)

    @property
    def combination_size(self):
        return len(self.comb1)

    @classmethod
    def random(cls, num_threads, combination_size, seed, block_size=None):
        """Two combination arrays drawn as random permutations."""
        ex = SeedExpander(seed)
        return cls(num_threads, ex.permutation(combination_size),
                   ex.permutation(combination_size), block_size)

    @classmethod
    def self_combining(cls, num_threads):
        return cls(num_threads, (0,), (0,))


@dataclass
class NaiveGrid:
    """Per-thread state of the naive kernel: x and three 64-bit xor-likes."""

    x: np.ndarray
    xorshift: np.ndarray
    xor128: np.ndarray
    xorwow: np.ndarray
    counter: np.ndarray

    @property
    def num_threads(self):
        return self.x.shape[0]

    def thread_state(self, t):
        return CiSequentialState(
            int(self.x[t]),
            XorShift64(int(self.xorshift[t])),
            Xor128(tuple(int(v) for v in self.xor128[:, t]), bits=64),
            XorWow(tuple(int(v) for v in self.xorwow[:, t]),
                   int(self.counter[t]), bits=64))

    def copy(self):
        return NaiveGrid(self.x.copy(), self.xorshift.copy(), self.xor128.copy(),
                         self.xorwow.copy(), self.counter.copy())

    @classmethod
    def from_states(cls, states):
        return cls(
            np.array([s.x for s in states], dtype=U32),
            np.array([s.xorshift.x for s in states], dtype=U64),
            np.array([s.xor128.state for s in states], dtype=U64).T.copy(),
            np.array([s.xorwow.state for s in states], dtype=U64).T.copy(),
            np.array([s.xorwow.counter for s in states], dtype=U64))


@dataclass
class ImprovedGrid:
    """Per-thread state of the improved kernel: x, one 32-bit xor128, shared cell."""

    x: np.ndarray
    xor128: np.ndarray
    shared: np.ndarray

    @property
    def num_threads(self):
        return self.x.shape[0]

    def copy(self):
        return ImprovedGrid(self.x.copy(), self.xor128.copy(), self.shared.copy())


def seed_grid(master_seed, num_threads, kind="naive"):
    """Expand ``master_seed`` into every per-thread parameter, thread by thread."""
    if num_threads < 1:
        raise DomainError("need at least one thread")
    ex = SeedExpander(master_seed)
    if kind == "naive":
        return NaiveGrid.from_states(
            [CiSequentialState.from_expander(ex) for _ in range(num_threads)])
    if kind == "improved":
        x = np.empty(num_threads, dtype=U32)
        regs = np.empty((4, num_threads), dtype=U32)
        shared = np.empty(num_threads, dtype=U32)
        for t in range(num_threads):
            x[t] = ex.next32()
            while True:
                words = [ex.next32() for _ in range(4)]
                if any(words):
                    break
            regs[:, t] = words
            shared[t] = ex.next32()
        return ImprovedGrid(x, regs, shared)
    raise DomainError(f"unknown grid kind {kind!r}")


def _chunks(num_threads, workers):
    workers = max(1, min(workers, num_threads))
    bounds = np.linspace(0, num_threads, workers + 1).astype(int)
    return [slice(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def _map_chunks(fn, num_threads, workers):
    chunks = _chunks(num_threads, workers)
    if len(chunks) == 1:
        fn(chunks[0])
        return
    with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
        for _ in pool.map(fn, chunks):
            pass


def naive_kernel_run(grid, n, workers=1):
    """Each thread runs the sequential CI generator ``n`` times."""
    T = grid.num_threads
    out = np.empty((T, n), dtype=U32)

    def run(sl):
        x = grid.x[sl].astype(U64)
        s1 = grid.xorshift[sl].copy()
        a, b, c, d = (grid.xor128[k, sl].copy() for k in range(4))
        p, q, r, s, v = (grid.xorwow[k, sl].copy() for k in range(5))
        cnt = grid.counter[sl].copy()
        lo = U64(0xFFFFFFFF)
        for i in range(n):
            s1 ^= s1 << U64(13)
            s1 ^= s1 >> U64(7)
            s1 ^= s1 << U64(17)
            t = a ^ (a << U64(11))
            a, b, c, d = b, c, d, (d ^ (d >> U64(19))) ^ (t ^ (t >> U64(8)))
            t = p ^ (p >> U64(2))
            p, q, r, s, v = q, r, s, v, (v ^ (v << U64(4))) ^ (t ^ (t << U64(1)))
            cnt = cnt + U64(362437)
            t3 = cnt + v
            x ^= (s1 ^ (s1 >> U64(32)) ^ d ^ (d >> U64(32)) ^ t3 ^ (t3 >> U64(32))) & lo
            out[sl, i] = x
        grid.x[sl] = x
        grid.xorshift[sl] = s1
        grid.xor128[:, sl] = np.stack([a, b, c, d])
        grid.xorwow[:, sl] = np.stack([p, q, r, s, v])
        grid.counter[sl] = cnt

    _map_chunks(run, T, workers)
    return out.ravel()


def xor128_32_draws(regs, n):
    """``n`` successive outputs of column-wise 32-bit xor128 generators.

    ``regs`` (shape ``(4, T)``) is advanced in place; returns ``(n, T)``.
    """
    a, b, c, d = (regs[k].copy() for k in range(4))
    draws = np.empty((n, regs.shape[1]), dtype=U32)
    for i in range(n):
        t = a ^ (a << U32(11))
        a, b, c, d = b, c, d, (d ^ (d >> U32(19))) ^ (t ^ (t >> U32(8)))
        draws[i] = d
    regs[:] = np.stack([a, b, c, d])
    return draws


def lockstep_fold(draws, o1, o2, x, shared, hazard=False):
    """Combine per-thread strategy words through the shared array.

    Round ``i``: ``t = draws[i] ^ shared[o1] ^ shared[o2]``, then
    ``shared[self] = t`` and ``x ^= t``.  ``x`` and ``shared`` are updated
    in place; returns the ``(T, n)`` array of successive x values.

    With ``hazard=True`` threads run one after another inside a round, so
    a thread may read cells already overwritten by lower-numbered threads
    in the same round.  That mimics an unsynchronised GPU schedule and is
    not deterministic on real hardware.
    """
    n, T = draws.shape
    out = np.empty((T, n), dtype=U32)
    if not hazard:
        for i in range(n):
            t = draws[i] ^ shared[o1] ^ shared[o2]
            shared[:] = t
            x ^= t
            out[:, i] = x
        return out
    o1l, o2l = o1.tolist(), o2.tolist()
    for i in range(n):
        row = draws[i].tolist()
        sh = shared.tolist()
        for j in range(T):
            t = row[j] ^ sh[o1l[j]] ^ sh[o2l[j]]
            sh[j] = t
            row[j] = t
        shared[:] = sh
        x ^= np.array(row, dtype=U32)
        out[:, i] = x
    return out


def improved_kernel_run(grid, config, n, workers=1, hazard=False):
    """One call of the shared-memory kernel: ``n`` words per thread."""
    T = grid.num_threads
    if config.num_threads != T:
        raise ConfigurationError("grid and configuration disagree on thread count")
    draws = np.empty((n, T), dtype=U32)

    def run(sl):
        regs = grid.xor128[:, sl].copy()
        draws[:, sl] = xor128_32_draws(regs, n)
        grid.xor128[:, sl] = regs

    _map_chunks(run, T, workers)
    return lockstep_fold(draws, config.o1, config.o2, grid.x, grid.shared,
                         hazard=hazard).ravel()


class Footprint(NamedTuple):
    words: int
    bytes: int

    @property
    def megabytes(self):
        return self.bytes / 1e6


def memory_footprint(num_threads, n):
    """Device memory of the naive kernel in 32-bit words.

    The three xor-like generators hold 4 + 5 + 6 64-bit values (two words
    each); each thread also stores its seed and its ``n`` outputs.
    """
    words = num_threads * ((4 + 5 + 6) * 2 + (1 + n))
    return Footprint(words, 4 * words)
