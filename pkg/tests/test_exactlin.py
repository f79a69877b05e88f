import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from greenforge.exactlin import (QuotientSpace, Subspace, image, intersect, is_prime, kernel, matmul,
                                 next_prime, preimage, rank, rref, solve, span_sum)

P = 101


def matrices(rows=st.integers(1, 5), cols=st.integers(1, 5), p=P):
    return st.tuples(rows, cols).flatmap(
        lambda rc: st.lists(st.integers(0, p - 1), min_size=rc[0] * rc[1], max_size=rc[0] * rc[1])
        .map(lambda v: np.array(v, dtype=np.int64).reshape(rc)))


def test_rref_identity():
    red, piv, rk = rref(np.eye(3, dtype=np.int64), P)
    assert np.array_equal(red, np.eye(3)) and piv == (0, 1, 2) and rk == 3


def test_rref_zero():
    red, piv, rk = rref(np.zeros((2, 2), dtype=np.int64), P)
    assert not red.any() and piv == () and rk == 0


def test_rref_duplicate_rows_over_f2():
    red, _, rk = rref([[1, 1], [1, 1]], 2)
    assert red.tolist()[0] == [1, 1] and rk == 1
    assert not np.any(red[1:])


def test_solve_examples():
    b = np.array([[3], [4]])
    assert np.array_equal(solve(np.eye(2, dtype=np.int64), b, P), b)
    zero = np.zeros((2, 2), dtype=np.int64)
    assert not np.any(solve(zero, np.zeros((2, 1), dtype=np.int64), P))
    assert solve(zero, b, P) is None


def test_kernel_examples():
    assert kernel(np.eye(3, dtype=np.int64), P).dim == 0
    assert kernel(np.zeros((3, 3), dtype=np.int64), 3).dim == 3
    k = kernel([[1, 1]], 2)
    assert k.dim == 1 and k.basis.tolist() == [[1, 1]]


def test_intersect_examples():
    u = Subspace.span([[1, 2, 0]], 3, P)
    v = Subspace.span([[1, 2, 0], [0, 0, 1]], 3, P)
    assert intersect(u, u, P) == u
    assert intersect(u, v, P) == u
    a, b = Subspace.span([[1, 0]], 2, 5), Subspace.span([[1, 1]], 2, 5)
    assert intersect(a, b, 5).dim == 0


def test_sum_image_preimage_examples():
    u = Subspace.span([[1, 2, 0]], 3, P)
    assert span_sum(u, Subspace.zero(3), P) == u
    assert image(np.eye(3, dtype=np.int64), P) == Subspace.full(3)
    w = Subspace.span([[1, 0]], 2, P)
    assert preimage(np.zeros((2, 3), dtype=np.int64), w, P) == Subspace.full(3)


def test_primes():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert next_prime(100) == 101 and next_prime(101) == 103


@given(matrices())
def test_rank_nullity(m):
    assert rank(m, P) + kernel(m, P).dim == m.shape[1]
    assert rank(rref(m, P)[0], P) == rank(m, P)


@given(matrices(), st.data())
def test_solve_roundtrip(m, data):
    x = np.array(data.draw(st.lists(st.integers(0, P - 1), min_size=m.shape[1], max_size=m.shape[1])))
    b = matmul(m, x.reshape(-1, 1), P)
    sol = solve(m, b, P)
    assert sol is not None and np.array_equal(matmul(m, sol, P), b)


@given(matrices(cols=st.just(4)), matrices(cols=st.just(4)))
def test_dimension_formula(a, b):
    u, v = Subspace.span(a, 4, P), Subspace.span(b, 4, P)
    s, i = span_sum(u, v, P), intersect(u, v, P)
    assert s.dim + i.dim == u.dim + v.dim
    assert i.issubspace(u, P) and i.issubspace(v, P)
    assert u.issubspace(s, P) and v.issubspace(s, P)


@given(matrices(cols=st.just(3)), matrices(rows=st.just(3)))
def test_preimage_maps_into_target(w_rows, m):
    w = Subspace.span(w_rows, 3, P)
    pre = preimage(m, w, P)
    if pre.dim:
        assert w.contains(matmul(m, pre.basis.T, P).T, P)
    assert pre.dim >= m.shape[1] - rank(m, P)


@settings(max_examples=50)
@given(matrices(cols=st.just(4)), matrices(cols=st.just(4)))
def test_quotient_reps_complement(a, b):
    big = span_sum(Subspace.span(a, 4, P), Subspace.span(b, 4, P), P)
    sub = Subspace.span(b, 4, P)
    q = QuotientSpace(big, sub, P)
    assert q.dim == big.dim - sub.dim
    if q.dim:
        assert span_sum(Subspace.span(q.reps, 4, P), sub, P) == big
        assert np.array_equal(q.coords(q.lift(np.eye(q.dim, dtype=np.int64))), np.eye(q.dim))
