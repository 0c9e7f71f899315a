from fractions import Fraction

import numpy as np
import pytest
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from ciprng.chaotic import BooleanFunction, apply_single
from ciprng.errors import ResourceError
from ciprng.verifier import (
    build_iteration_graph, build_markov_matrix, cesaro_average, cesaro_deviation,
    chaos_report, is_devaney_chaotic, is_doubly_stochastic,
    stationary_uniformity_check, strongly_connected_components,
)


def test_graph_of_negation_n1():
    g = build_iteration_graph(BooleanFunction.negation(1))
    assert g.arcs.tolist() == [[1], [0]]


def test_graph_of_table_3210():
    g = build_iteration_graph(BooleanFunction(2, table=[3, 2, 1, 0]))
    # arcs[x][i-1] = F_f(i, x)
    assert g.arcs.tolist() == [[1, 2], [0, 3], [3, 0], [2, 1]]


def test_identity_graph_only_self_loops():
    g = build_iteration_graph(BooleanFunction.identity(4))
    assert np.all(g.arcs == np.arange(16)[:, None])


def test_graph_size_limit():
    with pytest.raises(ResourceError):
        build_iteration_graph(BooleanFunction(17, func=lambda x: x))


def _scipy_scc_count(f):
    g = build_iteration_graph(f)
    size = 1 << f.n
    rows = np.repeat(np.arange(size), f.n)
    adj = csr_matrix((np.ones(rows.size), (rows, g.arcs.ravel())), shape=(size, size))
    return connected_components(adj, directed=True, connection="strong")[0]


def test_scc_matches_scipy_on_random_functions():
    rng = np.random.default_rng(42)
    for n in range(1, 8):
        for _ in range(10):
            f = BooleanFunction.random(n, rng)
            chaotic, comps = is_devaney_chaotic(f)
            assert len(comps) == _scipy_scc_count(f)
            assert sorted(v for c in comps for v in c) == list(range(1 << n))
            assert chaotic == (len(comps) == 1)


def test_scc_small_graph():
    succ = np.array([[1], [2], [0], [4], [3], [5]])
    comps = sorted(strongly_connected_components(6, succ))
    assert comps == [[0, 1, 2], [3, 4], [5]]


@pytest.mark.parametrize("n", range(1, 11))
def test_negation_is_chaotic(n):
    assert is_devaney_chaotic(BooleanFunction.negation(n))[0]


@pytest.mark.parametrize("n", [2, 3, 5])
def test_identity_and_constant_not_chaotic(n):
    chaotic, comps = is_devaney_chaotic(BooleanFunction.identity(n))
    assert not chaotic and len(comps) == 1 << n
    assert not is_devaney_chaotic(BooleanFunction.constant(n, 0))[0]


@pytest.mark.parametrize("n", range(1, 11))
def test_negation_degrees(n):
    g = build_iteration_graph(BooleanFunction.negation(n))
    assert np.all(g.in_degrees() == n)
    assert g.arcs.shape == (1 << n, n)


def test_markov_negation_n2():
    M = build_markov_matrix(BooleanFunction.negation(2))
    h = Fraction(1, 2)
    expected = [[0, h, h, 0], [h, 0, 0, h], [h, 0, 0, h], [0, h, h, 0]]
    assert [[M.entry(i, j) for j in range(4)] for i in range(4)] == expected
    assert is_doubly_stochastic(M)


def test_markov_identity_and_constant():
    M = build_markov_matrix(BooleanFunction.identity(3))
    assert np.array_equal(M.to_float(), np.eye(8))
    assert is_doubly_stochastic(M)
    C = build_markov_matrix(BooleanFunction.constant(2, 0))
    assert not is_doubly_stochastic(C)
    assert C.column_sums()[3] < 1


def _markov_oracle(f):
    """Literal formula with Fractions, from single-cell updates."""
    size, n = 1 << f.n, f.n
    A = [[0] * size for _ in range(size)]
    for x in range(size):
        for i in range(1, n + 1):
            y = apply_single(f, i, x)
            if y != x:
                A[x][y] = 1
    M = [[Fraction(A[i][j], n) for j in range(size)] for i in range(size)]
    for i in range(size):
        M[i][i] = 1 - sum(Fraction(A[i][j], n) for j in range(size) if j != i)
    return M


def test_markov_matches_fraction_oracle_and_rows_sum_to_one():
    rng = np.random.default_rng(5)
    for n in range(1, 6):
        for _ in range(4):
            f = BooleanFunction.random(n, rng)
            M = build_markov_matrix(f)
            oracle = _markov_oracle(f)
            size = 1 << n
            assert [[M.entry(i, j) for j in range(size)] for i in range(size)] == oracle
            assert all(s == 1 for s in M.row_sums())


def test_float_doubly_stochastic_tolerance():
    M = np.full((3, 3), 1 / 3)
    assert is_doubly_stochastic(M)
    M[0, 0] += 1e-6
    assert not is_doubly_stochastic(M, tol=1e-9)
    assert is_doubly_stochastic(M, tol=1e-5)


def test_cesaro_n1_k2_exact():
    avg = cesaro_average(build_markov_matrix(BooleanFunction.negation(1)), 2)
    assert np.array_equal(avg, np.full((2, 2), 0.5))


def test_identity_not_uniform():
    assert not stationary_uniformity_check(BooleanFunction.identity(3), 64, 1e-3)


def _cesaro_fraction_oracle(n, K):
    M = _markov_oracle(BooleanFunction.negation(n))
    size = 1 << n
    P = [[Fraction(int(i == j)) for j in range(size)] for i in range(size)]
    acc = [[Fraction(0)] * size for _ in range(size)]
    for _ in range(K):
        P = [[sum(P[i][k] * M[k][j] for k in range(size)) for j in range(size)]
             for i in range(size)]
        acc = [[acc[i][j] + P[i][j] for j in range(size)] for i in range(size)]
    target = Fraction(1, size)
    return max(abs(acc[i][j] / K - target) for i in range(size) for j in range(size))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_cesaro_deviation_matches_exact_oracle(n):
    exact = _cesaro_fraction_oracle(n, 64)
    assert cesaro_deviation(BooleanFunction.negation(n), 64) == pytest.approx(float(exact), abs=1e-13)


def test_cesaro_deviation_frozen_values():
    # exact values of the K = 64 average; the error decays like 1/K
    assert float(_cesaro_fraction_oracle(3, 64)) == pytest.approx(0.00439453125, rel=1e-12)
    assert float(_cesaro_fraction_oracle(4, 64)) == pytest.approx(1 / 384, rel=1e-12)
    assert float(_cesaro_fraction_oracle(5, 64)) == pytest.approx(0.003153483072916649, rel=1e-12)


def test_chaos_report_fields():
    r = chaos_report(BooleanFunction.negation(4))
    assert r["chaotic"] and r["doubly_stochastic"] and r["scc_count"] == 1
    assert r["cesaro_deviation"] == pytest.approx(1 / 384)
    r = chaos_report(BooleanFunction.identity(2))
    assert not r["chaotic"] and r["scc_count"] == 4


def test_matrix_size_limits():
    with pytest.raises(ResourceError):
        build_markov_matrix(BooleanFunction.negation(13))
    with pytest.raises(ResourceError):
        cesaro_deviation(BooleanFunction.negation(11), 4)
