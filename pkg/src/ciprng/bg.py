"""Blum-Goldwasser encryption, classic and with a cumulative-XOR keystream.

The classic scheme masks a message bit by bit with the least significant
bit of each BBS state.  The chaotic variant works on blocks of
``h = floor(log2(log2(N)))`` bits: block ``i`` is masked by
``b_0 ^ ... ^ b_i ^ S0`` where ``b_i`` are the ``h`` low bits of state
``i`` and ``S0`` is an extra public ``h``-bit word.  Decryption recovers
the seed from ``y = x_0 ** (2 ** L) mod N`` with the factorisation of N.

All parameters here are toy-sized; nothing in this module is secure.
"""

from dataclasses import dataclass
from math import gcd

from .errors import DecodeError, DomainError, KeyLeakError, PaddingError
from .seeding import SeedExpander


def modpow(a, e, m):
    """Right-to-left square and multiply."""
    if m < 2:
        raise DomainError("modulus must be at least 2")
    if e < 0:
        raise DomainError("negative exponent")
    result = 1
    base = a % m
    while e:
        if e & 1:
            result = result * base % m
        base = base * base % m
        e >>= 1
    return result


def egcd(a, b):
    """Return ``(g, u, v)`` with ``u*a + v*b == g == gcd(a, b)``."""
    u0, v0, u1, v1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        u0, u1 = u1, u0 - q * u1
        v0, v1 = v1, v0 - q * v1
    return a, u0, v0


def modinv(a, m):
    if m < 2:
        raise DomainError("modulus must be at least 2")
    g, u, _ = egcd(a % m, m)
    if g != 1:
        raise ArithmeticError(f"{a} is not invertible modulo {m}")
    return u % m


def block_bits(N):
    """``floor(log2(log2(N)))``: largest ``h`` with ``2**(2**h) <= N``."""
    if N < 4:
        raise DomainError("modulus too small")
    h = 0
    while 1 << (1 << (h + 1)) <= N:
        h += 1
    return h


def _is_blum_prime(p):
    if p < 3 or p % 4 != 3:
        return False
    return all(p % f for f in range(3, int(p ** 0.5) + 1, 2))


@dataclass(frozen=True)
class BgKeyPair:
    p: int
    q: int
    S0: int = 0

    def __post_init__(self):
        if self.p == self.q:
            raise DomainError("p and q must differ")
        for v in (self.p, self.q):
            if not _is_blum_prime(v):
                raise DomainError(f"{v} is not a prime congruent to 3 mod 4")
        if not 0 <= self.S0 < 1 << self.unit_bits:
            raise DomainError(f"S0 must fit in {self.unit_bits} bits")

    @property
    def N(self):
        return self.p * self.q

    @property
    def unit_bits(self):
        return block_bits(self.p * self.q)

    @property
    def public(self):
        """``(S0, N)``, the argument order of :func:`cbg_encrypt`."""
        return self.S0, self.N


@dataclass(frozen=True)
class BgCiphertext:
    c: tuple
    y: int
    unit_bits: int = 1

    @property
    def length(self):
        return len(self.c)


def bg_keygen(ex, bits=16, chaotic=False):
    """Two distinct primes ``= 3 mod 4`` of ``bits`` bits, plus S0 if chaotic."""
    lo, hi = 1 << (bits - 1), 1 << bits

    def draw():
        while True:
            p = lo + ex.below(hi - lo)
            if _is_blum_prime(p):
                return p

    p = draw()
    q = draw()
    while q == p:
        q = draw()
    S0 = ex.below(1 << block_bits(p * q)) if chaotic else 0
    return BgKeyPair(p, q, S0)


def draw_r(ex, N):
    while True:
        r = 1 + ex.below(N)
        if gcd(r, N) == 1:
            return r


def _bbs_states(x0, N, count):
    xs = []
    x = x0
    for _ in range(count):
        xs.append(x)
        x = x * x % N
    return xs, x


def bg_encrypt(N, m, r):
    """Encrypt the bit sequence ``m``; returns ``[c, y]``."""
    if not 1 <= r <= N:
        raise DomainError("r must lie in 1..N")
    if gcd(r, N) != 1:
        raise KeyLeakError("r shares a factor with N")
    m = tuple(m)
    if any(bit not in (0, 1) for bit in m):
        raise DomainError("classic Blum-Goldwasser encrypts bits")
    xs, y = _bbs_states(r * r % N, N, len(m))
    c = tuple(mi ^ (x & 1) for mi, x in zip(m, xs))
    return BgCiphertext(c, y, 1)


def recover_seed(p, q, y, L):
    """``x_0`` from ``y = x_0 ** (2 ** L) mod pq`` by CRT."""
    N = p * q
    if not 0 <= y < N:
        raise DecodeError("y must lie in 0..N-1")
    # exponents ((p+1)/4)**L reduced mod p-1 (Fermat)
    rp = modpow(y, modpow((p + 1) // 4, L, p - 1), p)
    rq = modpow(y, modpow((q + 1) // 4, L, q - 1), q)
    x0 = (q * modinv(q, p) * rp + p * modinv(p, q) * rq) % N
    return x0, rp, rq


def bg_decrypt(key, ct):
    p, q = key[0], key[1]
    x0, _, _ = recover_seed(p, q, ct.y, ct.length)
    xs, _ = _bbs_states(x0, p * q, ct.length)
    return tuple(ci ^ (x & 1) for ci, x in zip(ct.c, xs))


def _cumulative_masks(xs, h, S0):
    acc = 0
    masks = []
    low = (1 << h) - 1
    for x in xs:
        acc ^= x & low
        masks.append(acc ^ S0)
    return masks


def cbg_encrypt(public, m, r):
    """Chaotic variant.  ``public = (S0, N)``; ``m`` is a sequence of h-bit blocks."""
    S0, N = public
    h = block_bits(N)
    if not 0 <= S0 < 1 << h:
        raise DomainError(f"S0 must fit in {h} bits")
    if not 1 <= r <= N:
        raise DomainError("r must lie in 1..N")
    if gcd(r, N) != 1:
        raise KeyLeakError("r shares a factor with N")
    m = tuple(m)
    if any(not 0 <= block < 1 << h for block in m):
        raise DomainError(f"message blocks must fit in {h} bits")
    xs, y = _bbs_states(r * r % N, N, len(m))
    c = tuple(mi ^ k for mi, k in zip(m, _cumulative_masks(xs, h, S0)))
    return BgCiphertext(c, y, h)


def cbg_decrypt(key, S0, ct):
    p, q = key[0], key[1]
    N = p * q
    h = block_bits(N)
    if ct.unit_bits != h:
        raise DecodeError(f"ciphertext units are {ct.unit_bits} bits, key expects {h}")
    x0, _, _ = recover_seed(p, q, ct.y, ct.length)
    xs, _ = _bbs_states(x0, N, ct.length)
    return tuple(ci ^ k for ci, k in zip(ct.c, _cumulative_masks(xs, h, S0)))


def bits_to_blocks(bits, h):
    """Group a bit sequence (MSB first) into ``h``-bit integers."""
    bits = list(bits)
    if len(bits) % h:
        raise PaddingError(f"{len(bits)} bits is not a multiple of the {h}-bit block size")
    blocks = []
    for i in range(0, len(bits), h):
        v = 0
        for b in bits[i:i + h]:
            v = (v << 1) | b
        blocks.append(v)
    return blocks


def blocks_to_bits(blocks, h):
    return [(v >> (h - 1 - j)) & 1 for v in blocks for j in range(h)]


def encrypt_with_seed(key_or_public, m, seed, chaotic=False):
    """Draw ``r`` from a seed expander and encrypt."""
    if chaotic:
        S0, N = key_or_public
        return cbg_encrypt((S0, N), m, draw_r(SeedExpander(seed), N))
    N = key_or_public
    return bg_encrypt(N, m, draw_r(SeedExpander(seed), N))


# text formats -------------------------------------------------------------

def _parse_fields(text, source):
    fields = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DecodeError(f"{source}: expected name=value, got {raw!r}")
        name, value = (part.strip() for part in line.split("=", 1))
        fields[name] = value
    return fields


def format_public_key(key):
    return f"N={key.N}\nS0={key.S0}\n"


def format_secret_key(key):
    return f"p={key.p}\nq={key.q}\nS0={key.S0}\n"


def parse_key(text, source="key"):
    """Public files give ``N`` (and ``S0``); secret files give ``p`` and ``q``."""
    f = _parse_fields(text, source)
    try:
        values = {k: int(v) for k, v in f.items()}
    except ValueError as exc:
        raise DecodeError(f"{source}: {exc}") from None
    return values


def format_ciphertext(ct):
    width = max(1, (ct.unit_bits + 3) // 4)
    units = " ".join(f"{u:0{width}x}" for u in ct.c)
    return f"L={ct.length}\nunit={ct.unit_bits}\nc={units}\ny={ct.y}\n"


def parse_ciphertext(text, source="ciphertext"):
    f = _parse_fields(text, source)
    try:
        L = int(f["L"])
        unit = int(f["unit"])
        c = tuple(int(u, 16) for u in f.get("c", "").split())
        y = int(f["y"])
    except (KeyError, ValueError) as exc:
        raise DecodeError(f"{source}: malformed ciphertext ({exc})") from None
    if len(c) != L:
        raise DecodeError(f"{source}: L={L} but {len(c)} units present")
    if any(u >> unit for u in c):
        raise DecodeError(f"{source}: unit wider than {unit} bits")
    return BgCiphertext(c, y, unit)
