"""Distance on the phase space and constructive chaos witnesses.

A point of the phase space is a strategy (a sequence of cell subsets) and
a state.  Only a finite prefix of the strategy is ever stored, so every
distance is returned together with the bound ``10**-K`` on the neglected
tail, ``K`` being the number of compared terms.
"""

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import NamedTuple

import numpy as np

from .chaotic import BooleanFunction, iterate
from .errors import CertificateError, DomainError, ResourceError
from .verifier import is_devaney_chaotic

MAX_WITNESS_BITS = 10


@dataclass(frozen=True)
class PhasePoint:
    strategy: tuple
    state: int
    n: int

    def __post_init__(self):
        object.__setattr__(self, "strategy", tuple(self.strategy))
        limit = 1 << self.n
        if not 0 <= self.state < limit:
            raise DomainError("state does not fit in n bits")
        if any(not 0 <= s < limit for s in self.strategy):
            raise DomainError("strategy term does not fit in n bits")


class Distance(NamedTuple):
    value: float
    bound: float


def distance_parts(X, Y, K=None):
    """Exact ``(hamming, strategic)`` parts over the first ``K`` terms."""
    if X.n != Y.n:
        raise DomainError("points live in different dimensions")
    if K is None:
        K = min(len(X.strategy), len(Y.strategy))
    if K > len(X.strategy) or K > len(Y.strategy):
        raise DomainError(f"both strategies need at least {K} terms")
    hamming = bin(X.state ^ Y.state).count("1")
    total = 0
    scale = 1
    for k in range(K - 1, -1, -1):
        total += bin(X.strategy[k] ^ Y.strategy[k]).count("1") * scale
        scale *= 10
    # total / 10**K == sum_k |S^k sym.diff. T^k| / 10**k
    strategic = Fraction(9 * total, X.n * 10 ** K)
    return hamming, strategic


def distance(X, Y, K=None):
    """Hamming distance of the states plus the weighted strategy term."""
    if K is None:
        K = min(len(X.strategy), len(Y.strategy))
    hamming, strategic = distance_parts(X, Y, K)
    return Distance(hamming + float(strategic), 10.0 ** -K)


@dataclass
class MetricReport:
    points: int
    identity_ok: bool
    symmetry_ok: bool
    triangle_ok: bool
    worst_triangle_slack: float

    @property
    def ok(self):
        return self.identity_ok and self.symmetry_ok and self.triangle_ok


def metric_axiom_suite(sample, K=None):
    """Check the metric axioms over every pair and triple of ``sample``."""
    sample = list(sample)
    if K is None:
        K = min(len(p.strategy) for p in sample)
    d = {}
    identity_ok = symmetry_ok = True
    for a in range(len(sample)):
        for b in range(len(sample)):
            X, Y = sample[a], sample[b]
            dxy = distance(X, Y, K).value
            d[a, b] = dxy
            same = X.state == Y.state and X.strategy[:K] == Y.strategy[:K]
            if (dxy == 0) != same:
                identity_ok = False
            if b < a and d[b, a] != dxy:
                symmetry_ok = False
    tol = 2 * 10.0 ** -K
    size = len(sample)
    D = np.array([[d[a, b] for b in range(size)] for a in range(size)])
    worst = float("inf")
    for b in range(size):
        # slack[a, c] = d(a, b) + d(b, c) - d(a, c)
        slack = D[:, b, None] + D[None, b, :] - D
        worst = min(worst, float(slack.min()))
    triangle_ok = worst >= -tol
    return MetricReport(len(sample), identity_ok, symmetry_ok, triangle_ok, worst)


def _exact(eps):
    # 0.01 means one hundredth, not the nearest binary double
    return Fraction(str(eps)) if isinstance(eps, float) else Fraction(eps)


def agreement_length(eps):
    """Smallest ``m >= 0`` with ``10**-m < eps``.

    Two points with equal states whose strategies share their first ``m``
    terms are then strictly closer than ``eps``.
    """
    eps = _exact(eps)
    if eps <= 0:
        raise DomainError("epsilon must be positive")
    m = 0
    while Fraction(1, 10 ** m) >= eps:
        m += 1
    return m


def _within(X, Y, eps):
    K = min(len(X.strategy), len(Y.strategy))
    hamming, strategic = distance_parts(X, Y, K)
    return hamming + strategic + Fraction(1, 10 ** K) < _exact(eps)


def transitivity_witness(X, Y, eps):
    """Point ``X'`` in the eps-ball of ``X`` whose orbit hits ``Y``.

    Built for the vectorial negation: ``X'`` keeps the first ``m`` terms of
    ``X``'s strategy, then flips the cells where the reached state differs
    from ``Y``'s state, then continues with ``Y``'s strategy.  Returns
    ``(X', steps)`` with ``G**steps(X') == Y``.
    """
    if X.n != Y.n:
        raise DomainError("points live in different dimensions")
    m = agreement_length(eps)
    if len(X.strategy) < m:
        raise DomainError(f"strategy of X needs at least {m} terms")
    neg = BooleanFunction.negation(X.n)
    reached = iterate(neg, X.state, X.strategy[:m])[-1]
    s = reached ^ Y.state
    witness = PhasePoint(X.strategy[:m] + (s,) + Y.strategy, X.state, X.n)
    steps = m + 1
    if iterate(neg, witness.state, witness.strategy[:steps])[-1] != Y.state:
        raise CertificateError("replay did not reach the target state")
    if witness.strategy[steps:] != Y.strategy:
        raise CertificateError("shifted strategy differs from the target's")
    if not _within(X, witness, eps):
        raise CertificateError("witness is not inside the epsilon ball")
    return witness, steps


def _submasks(mask):
    bits = [1 << i for i in range(mask.bit_length()) if mask >> i & 1]
    for r in range(len(bits) + 1):
        for combo in combinations(bits, r):
            yield sum(combo)


def return_path(f, src, dst, nonempty=False):
    """Shortest list of subset masks driving ``src`` to ``dst`` under f.

    From ``v`` the subset iteration can reach exactly the states
    ``v ^ sub`` with ``sub`` a submask of ``v ^ f(v)``.
    """
    if f.n > MAX_WITNESS_BITS:
        raise ResourceError(f"witness search limited to n <= {MAX_WITNESS_BITS}")
    if src == dst:
        return [0] if nonempty else []
    parent = {src: None}
    queue = deque([src])
    while queue:
        v = queue.popleft()
        for sub in _submasks(v ^ f(v)):
            u = v ^ sub
            if u in parent:
                continue
            parent[u] = (v, sub)
            if u == dst:
                path = []
                while parent[u] is not None:
                    u, label = parent[u]
                    path.append(label)
                return path[::-1]
            queue.append(u)
    raise CertificateError(f"no path from {src:#x} to {dst:#x}")


@dataclass
class PeriodicWitness:
    period: tuple
    head: int
    tail: int

    def strategy(self, length):
        reps = -(-length // len(self.period))
        return (self.period * reps)[:length]


def periodic_point_witness(f, X, eps):
    """Periodic strategy agreeing with ``X``'s on its first terms.

    The period is the first ``m`` terms of ``X``'s strategy followed by a
    return path from the state they reach back to ``X.state``.
    """
    if f.n != X.n:
        raise DomainError("function and point have different dimensions")
    if f.n > MAX_WITNESS_BITS:
        raise ResourceError(f"witness search limited to n <= {MAX_WITNESS_BITS}")
    chaotic, comps = is_devaney_chaotic(f)
    if not chaotic:
        raise CertificateError(
            f"iteration graph has {len(comps)} strongly connected components")
    m = agreement_length(eps)
    if len(X.strategy) < m:
        raise DomainError(f"strategy of X needs at least {m} terms")
    head = tuple(X.strategy[:m])
    reached = iterate(f, X.state, head)[-1]
    back = tuple(return_path(f, reached, X.state, nonempty=(m == 0)))
    w = PeriodicWitness(head + back, m, len(back))
    if iterate(f, X.state, w.period)[-1] != X.state:
        raise CertificateError("replay did not return to the initial state")
    K = max(len(X.strategy), len(w.period))
    Xk = PhasePoint(X.strategy, X.state, X.n)
    Wk = PhasePoint(w.strategy(K), X.state, X.n)
    if not _within(Xk, Wk, eps):
        raise CertificateError("periodic point is not inside the epsilon ball")
    return w
