import random

import pytest

from sunits.core_arith import RatMat, gaussian_binomial, matmul_mod, rref_mod_p
from sunits.fpgroup import Presentation, abelian_invariants, coset_index, evaluate
from sunits.glnz import (
    base_group,
    rewrite_in_base,
    signed_permutation_matrices,
    sl_part,
    subspace_orbit,
)


def test_unsupported_rank():
    with pytest.raises(ValueError):
        base_group(5)


def test_sl2_abelianization():
    assert abelian_invariants(sl_part(2).presentation) == (0, [12])
    # same group as <a, b | a^4, b^6, a^2 b^-3>
    assert abelian_invariants(base_group(2).presentation) == (0, [2, 2])


@pytest.mark.parametrize("n", [2, 3, 4])
def test_generators_and_relators(n):
    B = base_group(n)
    assert all(abs(g.det()) == 1 and g.is_integral() for g in B.generators.values())
    assert B.presentation.check_relators() == []


def test_steinberg_relators_present():
    B = base_group(3)
    texts = {str(r) for r in B.presentation.relators}
    assert "E12*E23*E12^-1*E23^-1*E13^-1" in texts


def test_rewrite_examples():
    B = base_group(2)
    assert rewrite_in_base(RatMat.identity(2), B).letters == ()
    for g in ([[1, 2], [0, 1]], [[2, 1], [1, 1]], [[0, 1], [1, 0]], [[-1, 0], [0, -1]]):
        g = RatMat(g)
        assert B.element(rewrite_in_base(g, B)) == g
    with pytest.raises(ValueError):
        rewrite_in_base(RatMat([[2, 0], [0, 1]]), B)
    with pytest.raises(ValueError):
        rewrite_in_base(RatMat([["1/2", 0], [0, 2]]), B)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_rewrite_round_trip(n):
    B = base_group(n)
    rnd = random.Random(2024 + n)
    names = list(B.generators)
    for _ in range(200):
        g = RatMat.identity(n)
        for _ in range(rnd.randint(0, 15)):
            x = B.generators[rnd.choice(names)]
            g = g * (x if rnd.random() < 0.5 else x.inverse())
        assert B.element(rewrite_in_base(g, B)) == g


@pytest.mark.parametrize("n", [2, 3])
def test_rewrite_signed_permutations(n):
    B = base_group(n)
    for g in signed_permutation_matrices(n):
        assert B.element(rewrite_in_base(g, B)) == g


def _fixes(M, W0, p):
    return rref_mod_p(matmul_mod(W0, M.mod(p), p), p) == W0


@pytest.mark.parametrize("n,p,size", [(2, 2, 3), (2, 3, 4), (3, 2, 7)])
def test_subspace_orbit(n, p, size):
    B = sl_part(n)
    W0 = ((1,) + (0,) * (n - 1),)
    trans, stab = subspace_orbit(B, W0, p)
    assert len(trans) == size == gaussian_binomial(n, 1, p)
    for W, t in trans.items():
        assert rref_mod_p(matmul_mod(W0, B.element(t).mod(p), p), p) == W
    for w in stab:
        M = B.element(w)
        assert M.is_integral() and abs(M.det()) == 1
        assert _fixes(M, W0, p)
    # index of the stabilizer = number of lines (coset enumeration)
    assert coset_index(B.presentation, stab) == size


def test_line_stabilizer_is_triangular_mod_3():
    # row vectors act on the right, so the stabilizer of span{(1,0)} is the
    # lower triangular Borel subgroup
    B = sl_part(2)
    _, stab = subspace_orbit(B, ((1, 0),), 3)
    for w in stab:
        M = B.element(w).mod(3)
        assert M[0][1] == 0


def test_subspace_orbit_rank3_planes():
    B = base_group(3)
    trans, stab = subspace_orbit(B, ((1, 0, 0), (0, 1, 0)), 2)
    assert len(trans) == 7


def test_element_uses_images():
    B = base_group(2)
    P = B.presentation
    assert isinstance(P, Presentation)
    w = rewrite_in_base(RatMat([[3, 2], [1, 1]]), B)
    assert evaluate(w, P.images) == RatMat([[3, 2], [1, 1]])
