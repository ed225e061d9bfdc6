from fractions import Fraction
from itertools import product
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sunits.core_arith import (
    RatMat,
    enumerate_subspaces,
    gaussian_binomial,
    hnf,
    int_matmul,
    quad_form,
    rref_mod_p,
    short_vectors,
    snf,
    solve_integral,
)


def in_lattice(v, rows):
    """Brute force: is v an integer combination of the (square, nonsingular) rows?"""
    return solve_integral(rows, v) is not None


def test_hnf_identity():
    H, U = hnf([[1, 0], [0, 1]])
    assert H == ((1, 0), (0, 1))
    assert U == ((1, 0), (0, 1))


def test_hnf_already_reduced():
    assert hnf([[2, 0], [0, 3]])[0] == ((2, 0), (0, 3))


def test_hnf_same_lattice():
    M = [[4, 6], [2, 4]]
    H, U = hnf(M)
    assert abs(RatMat(H).det()) == 4
    assert all(in_lattice(r, H) for r in M)
    assert all(in_lattice(r, M) for r in H)
    assert int_matmul(U, M)[: len(H)] == H
    assert abs(RatMat(U).det()) == 1


def test_hnf_shape():
    H, _ = hnf([[3, 5, 7], [1, 1, 1], [0, 2, 9], [4, 4, 4]])
    for i, row in enumerate(H):
        assert all(x == 0 for x in row[:i])
        assert row[i] > 0
        for k in range(i):
            assert 0 <= H[k][i] < row[i]


def test_hnf_rank_deficient():
    with pytest.raises(ValueError, match="rank"):
        hnf([[1, 2], [2, 4]])


small = st.integers(-9, 9)
mat3 = st.lists(st.lists(small, min_size=3, max_size=3), min_size=3, max_size=3).filter(
    lambda m: RatMat(m).det() != 0
)


def unimodular(seq):
    U = RatMat.identity(3)
    for i, j, k in seq:
        if i != j:
            E = [[int(a == b) for b in range(3)] for a in range(3)]
            E[i][j] = k
            U = RatMat(E) * U
    return U.to_ints()


ops = st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(-3, 3)), max_size=8)


@settings(max_examples=60, deadline=None)
@given(mat3, ops)
def test_hnf_idempotent_and_invariant(M, seq):
    H, _ = hnf(M)
    assert hnf(H)[0] == H
    U = unimodular(seq)
    assert hnf(int_matmul(U, M))[0] == H


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=1, max_size=4))
def test_snf_identity_and_chain(M):
    D, U, V = snf(M)
    assert int_matmul(int_matmul(U, M), V) == D
    assert abs(RatMat(U).det()) == 1 and abs(RatMat(V).det()) == 1
    diag = [D[i][i] for i in range(min(len(D), 3))]
    for i in range(len(D)):
        for j in range(3):
            if i != j:
                assert D[i][j] == 0
    assert all(d >= 0 for d in diag)
    for a, b in zip(diag, diag[1:]):
        assert (b == 0) or (a != 0 and b % a == 0)


def test_snf_examples():
    D, _, _ = snf([[4, 0], [0, 6], [2, -3]])
    assert [D[0][0], D[1][1]] == [1, 12]
    # oracle: gcd of entries and of 2x2 minors
    M = [[4, 0], [0, 6], [2, -3]]
    minors = [M[i][0] * M[j][1] - M[i][1] * M[j][0] for i in range(3) for j in range(i + 1, 3)]
    assert gcd(*[abs(x) for x in minors]) == 12
    assert snf([[0, 0], [0, 0]])[0] == ((0, 0), (0, 0))
    assert snf([[5, 0], [0, 1]])[0] == ((1, 0), (0, 5))


def brute_subspaces(n, k, p):
    spans = set()
    for vecs in product(product(range(p), repeat=n), repeat=k):
        W = rref_mod_p(vecs, p)
        if len(W) == k:
            spans.add(W)
    return spans


@pytest.mark.parametrize("n,k,p,count", [(2, 1, 2, 3), (2, 1, 3, 4), (3, 2, 2, 7)])
def test_enumerate_subspaces_examples(n, k, p, count):
    subs = enumerate_subspaces(n, k, p)
    assert len(subs) == count == len(set(subs))
    assert set(subs) == brute_subspaces(n, k, p)


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("p", [2, 3, 5])
def test_subspace_count_matches_gaussian_binomial(n, p):
    for k in range(1, n):
        subs = enumerate_subspaces(n, k, p)
        assert len(subs) == gaussian_binomial(n, k, p)
        assert all(rref_mod_p(W, p) == W for W in subs)


def test_enumerate_subspaces_range():
    with pytest.raises(ValueError):
        enumerate_subspaces(3, 0, 2)
    with pytest.raises(ValueError):
        enumerate_subspaces(3, 3, 2)


def test_gaussian_binomial():
    assert gaussian_binomial(5, 0, 7) == 1
    assert gaussian_binomial(2, 1, 3) == 4
    assert gaussian_binomial(4, 2, 2) == 35 == len(enumerate_subspaces(4, 2, 2))


def test_ratmat_basics():
    A = RatMat([[1, 2], [3, 4]])
    assert A * A.inverse() == RatMat.identity(2)
    assert A.det() == -2
    B = RatMat.from_strings([["1/2", "0"], ["0", "2"]])
    assert B.mod(5) == ((3, 0), (0, 2))
    assert RatMat.from_strings(B.to_strings()) == B
    with pytest.raises(ValueError):
        B.mod(2)
    with pytest.raises(ZeroDivisionError):
        RatMat([[1, 2], [2, 4]]).inverse()


def test_rationals_normalized():
    A = RatMat([[Fraction(2, 4), Fraction(-3, -6)]])
    assert A.rows[0] == (Fraction(1, 2), Fraction(1, 2))
    assert A == RatMat([["1/2", "1/2"]])


def test_short_vectors_d4():
    # D4 root lattice: 24 vectors of norm 2
    G = [[2, -1, 0, 0], [-1, 2, -1, -1], [0, -1, 2, 0], [0, -1, 0, 2]]
    vs = short_vectors(G, 2, exact=True)
    assert len(vs) == 24
    assert all(quad_form(G, v) == 2 for v in vs)
    # brute force over a box
    box = [v for v in product(range(-3, 4), repeat=4) if any(v) and quad_form(G, v) <= 4]
    assert sorted(box) == short_vectors(G, 4)
