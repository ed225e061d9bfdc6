import math
import random
from fractions import Fraction

import pytest

from sunits.core_arith import RatMat
from sunits.engine import extend_level, rewrite, verify_level
from sunits.fpgroup import abelian_invariants
from sunits.quaternion import (
    IdealLattice,
    QuatAlg,
    QuatModel,
    hilbert_symbol,
    hurwitz_order,
    lipschitz_order,
    maximal_order,
    neighbor_ideals,
    principal_generator,
    quat_base_level,
    quat_s_presentation,
    ramified_primes,
    ramified_uniformizer,
    unit_group,
)


@pytest.fixture(scope="module")
def O():
    return hurwitz_order()


@pytest.fixture(scope="module")
def level3(O):
    return quat_s_presentation(O, [3])


def brute_hilbert(a, b, p, k=3):
    """Is a x^2 + b y^2 = z^2 solvable mod p^k with a primitive solution? (p odd, a, b units or p|b once)"""
    m = p**k
    for x in range(m):
        for y in range(m):
            for z in range(m):
                if (x % p or y % p or z % p) and (a * x * x + b * y * y - z * z) % m == 0:
                    return 1
    return -1


@pytest.mark.parametrize("a,b,p", [(-1, -1, 3), (-1, 3, 3), (2, 3, 3), (-1, -3, 3), (-1, 5, 5), (2, 5, 5)])
def test_hilbert_symbol_brute(a, b, p):
    assert hilbert_symbol(a, b, p) == brute_hilbert(a, b, p, 2)


def test_hilbert_symbol_examples():
    assert hilbert_symbol(-1, -1, 2) == -1
    assert hilbert_symbol(-1, -1, "inf") == -1
    assert hilbert_symbol(-1, -1, math.inf) == -1
    assert hilbert_symbol(-1, -1, 3) == 1
    assert hilbert_symbol(-1, -3, 3) == -1
    assert hilbert_symbol(1, 7, 7) == 1
    assert ramified_primes(-1, -1) == [2]
    assert ramified_primes(-1, -3) == [3]


@pytest.mark.parametrize("a,b", [(-1, -1), (-1, -3), (-2, -5), (-3, -7), (2, 3), (Fraction(1, 2), 7)])
def test_hilbert_product_formula(a, b):
    places = ["inf"] + [p for p in range(2, 60) if all(p % d for d in range(2, p))]
    prod = 1
    for v in places:
        prod *= hilbert_symbol(a, b, v)
    assert prod == 1


def test_algebra_rules():
    A = QuatAlg(-1, -1)
    i, j = A.elt(0, 1, 0, 0), A.elt(0, 0, 1, 0)
    assert i * i == A.elt(-1, 0, 0, 0)
    assert i * j == A.elt(0, 0, 0, 1) == -(j * i)
    x = A.elt(1, 2, 3, 4)
    assert x.nrd() == 30 and x.trd() == 2
    assert (x * x.inverse()).is_identity()
    assert x * x.conj() == A.elt(30, 0, 0, 0)


def test_nrd_multiplicative():
    A = QuatAlg(-2, -5)
    rnd = random.Random(0)
    for _ in range(1000):
        x = A.elt(*[Fraction(rnd.randint(-5, 5), rnd.randint(1, 3)) for _ in range(4)])
        y = A.elt(*[rnd.randint(-5, 5) for _ in range(4)])
        assert (x * y).nrd() == x.nrd() * y.nrd()


def test_hurwitz_units(O):
    assert len(unit_group(O)) == 24
    assert len(unit_group(lipschitz_order())) == 8
    assert O.reduced_discriminant == 2 and O.is_maximal()
    assert not lipschitz_order().is_maximal()


@pytest.mark.parametrize("a,b,rdisc", [(-1, -3, 3), (-2, -5, 5), (-1, -7, 7), (-2, -13, 13), (-1, -11, 11)])
def test_maximal_orders(a, b, rdisc):
    M = maximal_order(QuatAlg(a, b))
    assert M.is_maximal()
    assert M.reduced_discriminant == rdisc
    assert all(e.nrd().denominator == 1 and e.trd().denominator == 1 for e in M.elements)
    for x in M.elements:
        for y in M.elements:
            assert M.contains(x * y)


@pytest.mark.parametrize("p", [3, 5])
def test_neighbor_ideals(O, p):
    ideals = neighbor_ideals(O, p)
    assert len(ideals) == p + 1 == len({J.key for J in ideals})
    for J in ideals:
        assert J.index == p * p
        assert J.is_left_ideal()
        lam = principal_generator(J)
        assert lam.nrd() == p and J.contains(lam)


def test_ramified_prime_has_no_neighbours(O):
    with pytest.raises(ValueError):
        neighbor_ideals(O, 2)
    lam = ramified_uniformizer(O, 2)
    assert lam.nrd() == 2
    # the two-sided prime above 2: lam^2 is 2 times a unit
    sq = lam * lam * O.alg.elt(Fraction(1, 2), 0, 0, 0)
    assert sq.nrd() == 1 and O.contains(sq)


def test_principal_generator_examples(O):
    A = O.alg
    x = A.elt(1, 1, 1, 0)
    assert x.nrd() == 3
    J = next(J for J in neighbor_ideals(O, 3) if J.contains(x))
    lam = principal_generator(J)
    # generators of the same left ideal differ by a unit on the left
    assert (x * lam.inverse()).nrd() == 1 and O.contains(x * lam.inverse())
    assert principal_generator(IdealLattice(O, RatMat.identity(4))) == A.elt(1, 0, 0, 0)
    assert principal_generator(IdealLattice(O, RatMat.scalar(4, 3))) == A.elt(3, 0, 0, 0)


def test_base_level(O):
    B = quat_base_level(O)
    assert B.presentation.generators == ("u1", "u2")
    assert B.presentation.check_relators() == []
    # 24 units, abelianization of SL(2,3) is Z/3
    assert abelian_invariants(B.presentation) == (0, [3])
    for u in unit_group(O):
        assert B.element(rewrite(B, u)) == u


def test_s3_presentation(level3):
    P = level3.presentation
    assert P.generators == ("u1", "u2", "z3", "l3")
    assert P.check_relators() == []
    assert abelian_invariants(P) == (1, [3])
    assert level3.meta["last_orbits"] == 1
    # one edge orbit and it is reversed by l3
    assert [o.kind for o in level3.local.orbits] == ["minus"]
    assert level3.generators["l3"].nrd() == 3
    assert verify_level(level3)["ok"]


@pytest.mark.parametrize("S,inv", [([2], (1, [])), ([3, 5], (2, [3])), ([5, 3], (2, [3])), ([2, 3], (2, []))])
def test_other_s_sets(O, S, inv):
    L = quat_s_presentation(O, S)
    assert L.presentation.check_relators() == []
    assert abelian_invariants(L.presentation) == inv


def test_rewrite_round_trip(O, level3):
    rnd = random.Random(3)
    names = list(level3.generators)
    for _ in range(60):
        g = O.alg.elt(1, 0, 0, 0)
        for _ in range(15):
            x = level3.generators[rnd.choice(names)]
            g = g * (x if rnd.random() < 0.5 else x.inverse())
        assert level3.element(rewrite(level3, g)) == g


def test_rewrite_rejects_non_units(O, level3):
    with pytest.raises(ValueError):
        rewrite(level3, O.alg.elt(1, 1, 0, 0))  # norm 2, but 2 is not in S
    with pytest.raises(ValueError):
        rewrite(level3, O.alg.elt(Fraction(1, 5), 0, 0, 0))


class RotatedModel(QuatModel):
    def __init__(self, O, p, shift):
        super().__init__(O, p)
        self.ideals = self.ideals[shift:] + self.ideals[:shift]


@pytest.mark.parametrize("shift", range(4))
def test_invariants_independent_of_lambda(O, shift):
    base = quat_base_level(O)
    L = extend_level(base, 3, RotatedModel(O, 3, shift))
    assert L.presentation.check_relators() == []
    assert abelian_invariants(L.presentation) == (1, [3])


def test_indefinite_rejected():
    with pytest.raises(ValueError):
        unit_group(maximal_order(QuatAlg(-1, 3)))
