"""A small statistical battery for quick checks of generator output.

It covers frequency, block frequency (m = 128), runs, the 2-bit serial
test, a byte chi-square and the lag-8 autocorrelation test, following the
NIST SP 800-22 formulas where one exists.  All p-values are two-sided:
for chi-square statistics a fit that is too good is flagged as well.

This is a smoke test only.  Serious evaluation means running TestU01
BigCrush or similar on a stream written by :func:`ciprng.stream.emit`.
"""

from dataclasses import asdict, dataclass
from math import erfc, sqrt

import numpy as np
from scipy.stats import chi2

from .errors import DomainError

MIN_BITS = 1_000_000


@dataclass
class TestReport:
    name: str
    statistic: float
    p_value: float
    passed: bool

    __test__ = False  # not a pytest class

    def as_dict(self):
        return asdict(self)


def words_to_bits(words):
    """Bits of 32-bit words, most significant bit of each word first."""
    words = np.ascontiguousarray(words, dtype=">u4")
    return np.unpackbits(words.view(np.uint8))


def _two_sided_chi2(stat, dof):
    lower = chi2.cdf(stat, dof)
    upper = chi2.sf(stat, dof)
    return float(min(1.0, 2.0 * min(lower, upper)))


def monobit(bits):
    n = bits.size
    s = 2 * int(np.count_nonzero(bits)) - n
    stat = abs(s) / sqrt(n)
    return stat, erfc(stat / sqrt(2))


def block_frequency(bits, m=128):
    nblocks = bits.size // m
    blocks = bits[:nblocks * m].reshape(nblocks, m)
    pi = blocks.sum(axis=1) / m
    stat = float(4 * m * np.sum((pi - 0.5) ** 2))
    return stat, _two_sided_chi2(stat, nblocks)


def runs(bits):
    n = bits.size
    pi = np.count_nonzero(bits) / n
    if abs(pi - 0.5) >= 2 / sqrt(n):
        # frequency prerequisite failed
        return float("inf"), 0.0
    v = 1 + int(np.count_nonzero(bits[1:] != bits[:-1]))
    stat = abs(v - 2 * n * pi * (1 - pi)) / (2 * sqrt(2 * n) * pi * (1 - pi))
    return stat, erfc(stat)


def _psi2(bits, m):
    if m == 0:
        return 0.0
    n = bits.size
    ext = np.concatenate([bits, bits[:m - 1]]).astype(np.int64)
    idx = np.zeros(n, dtype=np.int64)
    for j in range(m):
        idx = (idx << 1) | ext[j:j + n]
    counts = np.bincount(idx, minlength=1 << m)
    return float((1 << m) / n * np.sum(counts.astype(np.float64) ** 2) - n)


def serial(bits, m=2):
    """Returns ``[(stat1, p1), (stat2, p2)]`` for the two serial statistics."""
    p_m, p_m1, p_m2 = _psi2(bits, m), _psi2(bits, m - 1), _psi2(bits, m - 2)
    d1 = p_m - p_m1
    d2 = p_m - 2 * p_m1 + p_m2
    return [(d1, _two_sided_chi2(d1, 1 << (m - 1))),
            (d2, _two_sided_chi2(d2, 1 << (m - 2)))]


def byte_chi_square(bits):
    data = np.packbits(bits[:bits.size // 8 * 8])
    counts = np.bincount(data, minlength=256).astype(np.float64)
    expected = data.size / 256
    stat = float(np.sum((counts - expected) ** 2) / expected)
    return stat, _two_sided_chi2(stat, 255)


def autocorrelation(bits, lag=8):
    n = bits.size - lag
    a = int(np.count_nonzero(bits[:n] != bits[lag:]))
    stat = 2 * (a - n / 2) / sqrt(n)
    return stat, erfc(abs(stat) / sqrt(2))


class BitStream:
    """``count`` bits read from a generator exposing ``words(k)``."""

    def __init__(self, generator, count):
        if count < 0:
            raise DomainError("bit count must be non-negative")
        self.generator = generator
        self.count = count

    def bits(self):
        words = self.generator.words(-(-self.count // 32))
        return words_to_bits(words)[:self.count]


def run_battery(stream, alpha=0.01, min_bits=MIN_BITS):
    """Run every test; ``stream`` is a :class:`BitStream` or an array of bits."""
    bits = stream.bits() if isinstance(stream, BitStream) else np.asarray(stream, dtype=np.uint8)
    if bits.size < min_bits:
        raise DomainError(f"battery needs at least {min_bits} bits, got {bits.size}")
    results = [("monobit", *monobit(bits)),
               ("block_frequency", *block_frequency(bits)),
               ("runs", *runs(bits))]
    (s1, p1), (s2, p2) = serial(bits)
    results += [("serial", s1, p1), ("serial_delta2", s2, p2),
                ("byte_chi_square", *byte_chi_square(bits)),
                ("autocorrelation_8", *autocorrelation(bits))]
    return [TestReport(name, float(stat), float(p), bool(p >= alpha))
            for name, stat, p in results]
