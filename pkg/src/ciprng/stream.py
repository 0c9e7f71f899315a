"""Word streams from every generator, serialisation and a throughput harness.

Each stream object exposes ``words(count)`` returning a ``uint32`` array
and continues where the previous call stopped.  64-bit generators yield
their low word first, then the high word.  Kernel streams buffer whole
kernel calls and hand out words in ``n * t + i`` order.
"""

import os
import platform
import time

import numpy as np

from .bbs import BbsGridConfig, bbs_grid_run, seed_bbs_grid
from .chaotic import CiSequentialState
from .errors import DomainError
from .kernels import GridConfig, improved_kernel_run, naive_kernel_run, seed_grid
from .seeding import SeedExpander
from .xorlike import MASK32, MASK64, Xor128, XorShift32, XorShift64, XorWow

FORMATS = ("raw-le32", "hex", "bits")
CHUNK_WORDS = 1 << 16


class XorShift32Stream:
    def __init__(self, seed=None):
        z = 2463534242 if seed is None else SeedExpander(seed).nonzero32()
        self.gen = XorShift32(z)

    def words(self, count):
        out = np.empty(count, dtype=np.uint32)
        z = self.gen.z
        for j in range(count):
            z ^= (z << 13) & MASK32
            z ^= z >> 17
            z ^= (z << 5) & MASK32
            out[j] = z
        self.gen.z = z
        return out


class _Split64:
    """Turns a source of 64-bit words into 32-bit words, low half first."""

    def __init__(self):
        self._pending = None

    def _raw64(self, count):
        raise NotImplementedError

    def words(self, count):
        out = np.empty(count, dtype=np.uint32)
        j = 0
        if count and self._pending is not None:
            out[0] = self._pending
            self._pending = None
            j = 1
        need = count - j
        if need > 0:
            raw = np.array(self._raw64((need + 1) // 2), dtype=np.uint64)
            halves = np.empty(2 * raw.size, dtype=np.uint32)
            halves[0::2] = raw & np.uint64(MASK32)
            halves[1::2] = raw >> np.uint64(32)
            out[j:] = halves[:need]
            if halves.size > need:
                self._pending = int(halves[-1])
        return out


class XorShift64Stream(_Split64):
    def __init__(self, seed=None):
        super().__init__()
        self.gen = XorShift64() if seed is None else XorShift64(SeedExpander(seed).nonzero64())

    def _raw64(self, count):
        out = [0] * count
        x = self.gen.x
        for j in range(count):
            x ^= (x << 13) & MASK64
            x ^= x >> 7
            x ^= (x << 17) & MASK64
            out[j] = x
        self.gen.x = x
        return out


class Xor128Stream(_Split64):
    def __init__(self, seed=None):
        super().__init__()
        if seed is None:
            self.gen = Xor128(bits=64)
        else:
            self.gen = CiSequentialState.from_seed(seed).xor128

    def _raw64(self, count):
        nxt = self.gen.next
        return [nxt() for _ in range(count)]


class XorWowStream(_Split64):
    def __init__(self, seed=None):
        super().__init__()
        if seed is None:
            self.gen = XorWow(bits=64)
        else:
            self.gen = CiSequentialState.from_seed(seed).xorwow

    def _raw64(self, count):
        nxt = self.gen.next
        return [nxt() for _ in range(count)]


class CiSequentialStream:
    def __init__(self, seed=None):
        self.state = CiSequentialState() if seed is None else CiSequentialState.from_seed(seed)

    def words(self, count):
        return self.state.words(count)


class _KernelStream:
    """Buffers the output of whole kernel calls."""

    def __init__(self, batch):
        if batch < 1:
            raise DomainError("batch must be positive")
        self.batch = batch
        self._buffer = np.empty(0, dtype=np.uint32)

    def _call(self):
        raise NotImplementedError

    def words(self, count):
        parts = []
        have = 0
        buf = self._buffer
        while have + buf.size < count:
            parts.append(buf)
            have += buf.size
            buf = self._call()
        take = count - have
        parts.append(buf[:take])
        self._buffer = buf[take:]
        return np.concatenate(parts) if len(parts) > 1 else parts[0].copy()


class NaiveKernelStream(_KernelStream):
    def __init__(self, seed, threads=64, batch=64, workers=1):
        super().__init__(batch)
        self.grid = seed_grid(seed, threads, "naive")
        self.workers = workers

    def _call(self):
        return naive_kernel_run(self.grid, self.batch, self.workers)


class ImprovedKernelStream(_KernelStream):
    def __init__(self, seed, threads=64, comb_size=8, batch=64, workers=1, config=None):
        super().__init__(batch)
        self.grid = seed_grid(seed, threads, "improved")
        self.config = config or GridConfig.random(threads, comb_size, seed)
        self.workers = workers

    def _call(self):
        return improved_kernel_run(self.grid, self.config, self.batch, self.workers)


class BbsKernelStream(_KernelStream):
    def __init__(self, seed, threads=64, comb_size=8, batch=64, workers=1, config=None):
        super().__init__(batch)
        self.grid = seed_bbs_grid(seed, threads)
        self.config = config or BbsGridConfig.random(threads, comb_size, seed)
        self.workers = workers

    def _call(self):
        return bbs_grid_run(self.grid, self.config, self.batch, self.workers)


SCALAR_GENERATORS = {
    "xorshift32": XorShift32Stream,
    "xorshift64": XorShift64Stream,
    "xor128": Xor128Stream,
    "xorwow": XorWowStream,
    "ci-seq": CiSequentialStream,
}
KERNEL_GENERATORS = {
    "naive": NaiveKernelStream,
    "improved": ImprovedKernelStream,
    "bbs": BbsKernelStream,
}
GENERATORS = tuple(SCALAR_GENERATORS) + tuple(KERNEL_GENERATORS)


def make_generator(name, seed=None, threads=64, comb_size=8, batch=64, workers=1):
    """Build a stream by name.  Kernel streams need an explicit seed."""
    if name in SCALAR_GENERATORS:
        return SCALAR_GENERATORS[name](seed)
    if name not in KERNEL_GENERATORS:
        raise DomainError(f"unknown generator {name!r}; choose from {', '.join(GENERATORS)}")
    if seed is None:
        raise DomainError(f"generator {name!r} needs a seed")
    if name == "naive":
        return NaiveKernelStream(seed, threads, batch, workers)
    return KERNEL_GENERATORS[name](seed, threads, comb_size, batch, workers)


# serialisation -------------------------------------------------------------

def encode_words(words, fmt):
    words = np.asarray(words, dtype=np.uint32)
    if fmt == "raw-le32":
        return words.astype("<u4").tobytes()
    if fmt == "hex":
        return "".join(f"{int(w):08x}\n" for w in words).encode("ascii")
    if fmt == "bits":
        bits = np.unpackbits(words.astype(">u4").view(np.uint8))
        return (bits + ord("0")).astype(np.uint8).tobytes()
    raise DomainError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")


def parse(data, fmt):
    """Inverse of :func:`encode_words`."""
    if fmt == "raw-le32":
        if len(data) % 4:
            raise DomainError("raw-le32 data length is not a multiple of 4")
        return np.frombuffer(data, dtype="<u4").astype(np.uint32)
    if fmt == "hex":
        return np.array([int(tok, 16) for tok in data.split()], dtype=np.uint32)
    if fmt == "bits":
        chars = np.frombuffer(bytes(b for b in data if b in b"01"), dtype=np.uint8)
        if chars.size % 32:
            raise DomainError("bit stream length is not a multiple of 32")
        packed = np.packbits(chars - ord("0"))
        return packed.view(">u4").astype(np.uint32)
    raise DomainError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")


def emit(generator, count, fmt, sink):
    """Write ``count`` words of ``generator`` to the binary file ``sink``."""
    if count < 0:
        raise DomainError("count must be non-negative")
    if fmt not in FORMATS:
        raise DomainError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")
    left = count
    while left:
        k = min(left, CHUNK_WORDS)
        sink.write(encode_words(generator.words(k), fmt))
        left -= k
    sink.flush()


# throughput ------------------------------------------------------------------

def machine_metadata():
    return {
        "platform": platform.platform(),
        "processor": platform.processor() or platform.machine(),
        "python": platform.python_version(),
        "numpy": np.__version__,
        "cpu_count": os.cpu_count(),
    }


def benchmark(generator, duration=1.0, batch=1 << 14):
    """Wall-clock throughput of ``generator.words`` in 32-bit words per second."""
    if duration < 1.0:
        raise DomainError("benchmark duration must be at least one second")
    generator.words(batch)  # warm-up
    total = 0
    start = time.perf_counter()
    while True:
        generator.words(batch)
        total += batch
        elapsed = time.perf_counter() - start
        if elapsed >= duration:
            break
    return {
        "samples_per_second": total / elapsed,
        "words": total,
        "seconds": elapsed,
        "batch": batch,
        "machine": machine_metadata(),
    }
