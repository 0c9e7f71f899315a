"""Exhaustive checks of chaos and uniformity for small Boolean maps.

G_f is chaotic in Devaney's sense exactly when the asynchronous iteration
graph of f is strongly connected, and the generator output tends to the
uniform law when the associated Markov matrix is doubly stochastic.
Both conditions are decided here by brute force over all 2**n states.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ResourceError

MAX_GRAPH_BITS = 16
MAX_MATRIX_BITS = 12
MAX_POWER_BITS = 10


@dataclass
class IterationGraph:
    """Arcs ``x -> arcs[x, i-1]`` labelled by the updated cell ``i``."""

    n: int
    arcs: np.ndarray

    @property
    def num_vertices(self):
        return 1 << self.n

    def successors(self, x):
        return [int(v) for v in self.arcs[x]]

    def in_degrees(self):
        return np.bincount(self.arcs.ravel().astype(np.int64),
                           minlength=self.num_vertices)


def build_iteration_graph(f):
    if f.n > MAX_GRAPH_BITS:
        raise ResourceError(f"iteration graph limited to n <= {MAX_GRAPH_BITS}")
    fx = f.as_table()
    xs = np.arange(1 << f.n, dtype=np.uint64)
    arcs = np.empty((1 << f.n, f.n), dtype=np.uint64)
    for i in range(f.n):
        bit = np.uint64(1 << i)
        arcs[:, i] = (xs & ~bit) | (fx & bit)
    return IterationGraph(f.n, arcs)


def strongly_connected_components(num_vertices, successors):
    """Tarjan's algorithm without recursion.

    ``successors`` is a 2-D integer array whose row ``v`` lists the heads of
    the arcs leaving ``v``.  Components are returned in reverse topological
    order, each as a sorted list of vertices.
    """
    adj = successors.tolist()
    index = [-1] * num_vertices
    low = [0] * num_vertices
    on_stack = [False] * num_vertices
    stack = []
    components = []
    counter = 0
    for root in range(num_vertices):
        if index[root] != -1:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        work = [(root, iter(adj[root]))]
        while work:
            v, it = work[-1]
            descended = False
            for w in it:
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(adj[w])))
                    descended = True
                    break
                if on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
            if descended:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                if low[v] < low[parent]:
                    low[parent] = low[v]
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                components.append(sorted(comp))
    return components


def is_devaney_chaotic(f):
    """Return ``(chaotic, components)`` for G_f.

    ``components`` is the SCC partition of the iteration graph and serves
    as the certificate: chaos holds iff there is exactly one component.
    """
    g = build_iteration_graph(f)
    comps = strongly_connected_components(g.num_vertices, g.arcs)
    return len(comps) == 1, comps


@dataclass
class MarkovMatrix:
    """Transition matrix stored exactly as ``counts / n``."""

    n: int
    counts: np.ndarray

    @property
    def denominator(self):
        return self.n

    def to_float(self):
        return self.counts.astype(np.float64) / self.n

    def entry(self, i, j):
        return Fraction(int(self.counts[i, j]), self.n)

    def row_sums(self):
        return [Fraction(int(s), self.n) for s in self.counts.sum(axis=1)]

    def column_sums(self):
        return [Fraction(int(s), self.n) for s in self.counts.sum(axis=0)]


def build_markov_matrix(f):
    """``M_ij = A_ij / n`` off the diagonal, ``M_ii = 1 - sum_{j!=i} A_ij / n``.

    ``A`` is the 0/1 adjacency matrix of the iteration graph.
    """
    if f.n > MAX_MATRIX_BITS:
        raise ResourceError(f"dense Markov matrix limited to n <= {MAX_MATRIX_BITS}")
    g = build_iteration_graph(f)
    size = g.num_vertices
    adj = np.zeros((size, size), dtype=np.int64)
    rows = np.repeat(np.arange(size), f.n)
    adj[rows, g.arcs.ravel().astype(np.int64)] = 1
    np.fill_diagonal(adj, 0)
    counts = adj.copy()
    np.fill_diagonal(counts, f.n - adj.sum(axis=1))
    return MarkovMatrix(f.n, counts)


def is_doubly_stochastic(M, tol=1e-12):
    """Column sums equal to one.

    A :class:`MarkovMatrix` is checked exactly (``tol`` is ignored); a plain
    array is checked to within ``tol``.  Rows of a MarkovMatrix sum to one
    by construction.
    """
    if isinstance(M, MarkovMatrix):
        return bool(np.all(M.counts.sum(axis=0) == M.n))
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("square matrix expected")
    return bool(np.all(np.abs(M.sum(axis=0) - 1.0) <= tol))


def cesaro_average(M, K):
    """``(1/K) * sum_{k=1..K} M**k`` in floating point."""
    if isinstance(M, MarkovMatrix):
        M = M.to_float()
    acc = np.zeros_like(M)
    P = np.eye(M.shape[0])
    for _ in range(K):
        P = P @ M
        acc += P
    return acc / K


def cesaro_deviation(f, K):
    """Largest distance between the Cesàro average and 2**-n."""
    if f.n > MAX_POWER_BITS:
        raise ResourceError(f"matrix powers limited to n <= {MAX_POWER_BITS}")
    avg = cesaro_average(build_markov_matrix(f), K)
    return float(np.abs(avg - 2.0 ** -f.n).max())


def stationary_uniformity_check(f, K, tol):
    """True when every entry of the Cesàro average is within ``tol`` of 2**-n.

    Time averaging is needed because chains such as the one induced by the
    vectorial negation are periodic and their plain powers oscillate.
    """
    return cesaro_deviation(f, K) < tol


def chaos_report(f, K=64):
    """Summary used by the ``analyze`` command."""
    chaotic, comps = is_devaney_chaotic(f)
    report = {"n": f.n, "chaotic": chaotic, "scc_count": len(comps),
              "doubly_stochastic": None, "cesaro_deviation": None}
    if f.n <= MAX_MATRIX_BITS:
        report["doubly_stochastic"] = is_doubly_stochastic(build_markov_matrix(f))
    if f.n <= MAX_POWER_BITS:
        report["cesaro_deviation"] = cesaro_deviation(f, K)
    return report
