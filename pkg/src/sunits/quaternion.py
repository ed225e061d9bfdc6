"""Definite rational quaternion algebras and S-unit groups of their maximal orders.

Conventions: basis 1, i, j, k with i^2 = a, j^2 = b, k = ij = -ji. Ideals
are left ideals; the group acts on them from the right, so the vertex
action of x is right multiplication and x acts on order coordinates by
its right-regular matrix. Norm forms use Gram(x, x) = 2 Nrd(x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product

from .core_arith import (
    RatMat,
    enumerate_subspaces,
    hnf,
    is_prime,
    matmul_mod,
    prime_factors,
    rref_mod_p,
    short_vectors,
    valuation,
)
from .engine import EngineError, GroupLevel, extend_level, extend_ramified
from .fpgroup import Presentation
from .glnz import orbit_with_words

INF = "inf"


# ---------------------------------------------------------------------------
# Hilbert symbol


def _squarefree_int(x: Fraction) -> int:
    """An integer in the same square class as the nonzero rational x."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("Hilbert symbol needs nonzero arguments")
    return x.numerator * x.denominator


def hilbert_symbol(a, b, p) -> int:
    """(a, b)_p over Q_p, or over R when p is ``"inf"``/``math.inf``/``0``."""
    a, b = _squarefree_int(a), _squarefree_int(b)
    if p in (INF, "oo", "infinity", math.inf, 0):
        return -1 if a < 0 and b < 0 else 1
    p = int(p)
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    al, bl = valuation(a, p), valuation(b, p)
    u, v = a // p**al, b // p**bl
    if p == 2:
        eps = lambda t: ((t - 1) // 2) % 2
        omega = lambda t: ((t * t - 1) // 8) % 2
        e = eps(u) * eps(v) + al * omega(v) + bl * omega(u)
        return -1 if e % 2 else 1
    leg = lambda t: 1 if pow(t % p, (p - 1) // 2, p) == 1 else -1
    s = (-1) ** (al * bl * ((p - 1) // 2) % 2)
    return s * leg(u) ** bl * leg(v) ** al


def ramified_primes(a, b) -> list:
    """Finite primes where (a, b) ramifies."""
    A, B = _squarefree_int(a), _squarefree_int(b)
    cands = sorted(set(prime_factors(abs(A))) | set(prime_factors(abs(B))) | {2})
    return [p for p in cands if hilbert_symbol(A, B, p) == -1]


# ---------------------------------------------------------------------------
# algebra and elements


@dataclass(frozen=True)
class QuatAlg:
    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        if self.a == 0 or self.b == 0:
            raise ValueError("a and b must be nonzero")

    @property
    def is_definite(self) -> bool:
        return self.a < 0 and self.b < 0

    def mul(self, x, y):
        a, b = self.a, self.b
        x0, x1, x2, x3 = x
        y0, y1, y2, y3 = y
        return (
            x0 * y0 + a * x1 * y1 + b * x2 * y2 - a * b * x3 * y3,
            x0 * y1 + x1 * y0 - b * x2 * y3 + b * x3 * y2,
            x0 * y2 + x2 * y0 + a * x1 * y3 - a * x3 * y1,
            x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1,
        )

    def nrd(self, x) -> Fraction:
        x0, x1, x2, x3 = x
        a, b = self.a, self.b
        return x0 * x0 - a * x1 * x1 - b * x2 * x2 + a * b * x3 * x3

    def elt(self, *coords) -> Quat:
        if len(coords) == 1:
            coords = tuple(coords[0])
        return Quat(self, tuple(Fraction(c) for c in coords))

    def gram(self) -> RatMat:
        """Gram matrix of (x, y) -> Trd(x conj(y)) in the 1, i, j, k basis."""
        a, b = self.a, self.b
        return RatMat.diag([2, -2 * a, -2 * b, 2 * a * b])

    def ramified(self) -> list:
        return ramified_primes(self.a, self.b)


class Quat:
    __slots__ = ("alg", "c")

    def __init__(self, alg: QuatAlg, c):
        self.alg = alg
        self.c = tuple(Fraction(x) for x in c)

    def __mul__(self, other):
        if isinstance(other, Quat):
            return Quat(self.alg, self.alg.mul(self.c, other.c))
        return Quat(self.alg, tuple(x * other for x in self.c))

    __rmul__ = lambda self, k: Quat(self.alg, tuple(x * k for x in self.c))

    def __add__(self, other):
        return Quat(self.alg, tuple(x + y for x, y in zip(self.c, other.c)))

    def __sub__(self, other):
        return Quat(self.alg, tuple(x - y for x, y in zip(self.c, other.c)))

    def __neg__(self):
        return Quat(self.alg, tuple(-x for x in self.c))

    def __eq__(self, other):
        return isinstance(other, Quat) and self.c == other.c and self.alg == other.alg

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        return "Quat(" + ", ".join(str(x) for x in self.c) + ")"

    def conj(self) -> Quat:
        x0, x1, x2, x3 = self.c
        return Quat(self.alg, (x0, -x1, -x2, -x3))

    def nrd(self) -> Fraction:
        return self.alg.nrd(self.c)

    def trd(self) -> Fraction:
        return 2 * self.c[0]

    def inverse(self) -> Quat:
        n = self.nrd()
        if n == 0:
            raise ZeroDivisionError("zero divisor has no inverse")
        return self.conj() * (1 / n)

    def one(self) -> Quat:
        return Quat(self.alg, (1, 0, 0, 0))

    def is_identity(self) -> bool:
        return self.c == (1, 0, 0, 0)


# ---------------------------------------------------------------------------
# orders


def _lattice_hnf(rows):
    """HNF basis (as RatMat) of the Z-span of rational row vectors."""
    rows = [tuple(Fraction(x) for x in r) for r in rows]
    d = 1
    for r in rows:
        for x in r:
            d = d * x.denominator // math.gcd(d, x.denominator)
    H, _ = hnf([[int(x * d) for x in r] for r in rows])
    return RatMat(H) * Fraction(1, d)


class QuatOrder:
    """A Z-order given by a basis (rows in 1, i, j, k coordinates)."""

    def __init__(self, alg: QuatAlg, basis):
        self.alg = alg
        self.basis = basis if isinstance(basis, RatMat) else RatMat(basis)
        if self.basis.nrows != 4 or self.basis.ncols != 4:
            raise ValueError("an order basis is 4x4")
        self._binv = self.basis.inverse()
        self.elements = [alg.elt(r) for r in self.basis.rows]
        if not _integral(self.coords(alg.elt(1, 0, 0, 0))):
            raise ValueError("order must contain 1")
        for x in self.elements:
            for y in self.elements:
                if not _integral(self.coords(x * y)):
                    raise ValueError("basis does not span a ring")

    def __repr__(self):
        return f"QuatOrder(a={self.alg.a}, b={self.alg.b}, basis={self.basis.to_strings()})"

    def coords(self, x: Quat) -> tuple:
        return tuple(
            sum(x.c[s] * self._binv.rows[s][t] for s in range(4)) for t in range(4)
        )

    def from_coords(self, v) -> Quat:
        B = self.basis.rows
        return self.alg.elt(sum(Fraction(v[s]) * B[s][t] for s in range(4)) for t in range(4))

    def contains(self, x: Quat) -> bool:
        return _integral(self.coords(x))

    def right_matrix(self, x: Quat) -> RatMat:
        """Matrix of y -> y*x on order coordinates (row vectors)."""
        return RatMat([self.coords(e * x) for e in self.elements])

    def left_matrix(self, x: Quat) -> RatMat:
        """Matrix of y -> x*y on order coordinates (row vectors)."""
        return RatMat([self.coords(x * e) for e in self.elements])

    @cached_property
    def gram(self) -> RatMat:
        """Norm form Trd(x conj(y)) on the order basis; value 2*Nrd."""
        return self.basis * self.alg.gram() * self.basis.transpose()

    @cached_property
    def reduced_discriminant(self) -> int:
        T = RatMat([[(x * y).trd() for y in self.elements] for x in self.elements])
        d = abs(T.det())
        r = math.isqrt(int(d))
        if d.denominator != 1 or r * r != d:
            raise ArithmeticError("discriminant is not a square")
        return r

    def is_maximal(self) -> bool:
        target = 1
        for p in self.alg.ramified():
            target *= p
        return self.reduced_discriminant == target


def _integral(v) -> bool:
    return all(Fraction(x).denominator == 1 for x in v)


def _ring_closure(alg, base_det, rows, limit):
    """Z-lattice spanned by ``rows`` closed under products, or None if some
    element is non-integral or the index over ``base_det`` exceeds ``limit``."""
    L = _lattice_hnf(rows)
    while True:
        els = [alg.elt(r) for r in L.rows]
        for x in els:
            if x.nrd().denominator != 1 or x.trd().denominator != 1:
                return None
        prods = [(x * y).c for x in els for y in els]
        L2 = _lattice_hnf(list(L.rows) + prods)
        if abs(base_det / L2.det()) > limit:
            return None
        if L2 == L:
            return L
        L = L2


def maximal_order(alg: QuatAlg) -> QuatOrder:
    """A maximal order containing Z<1, i, j, k>, found by enlargement.

    a and b must be integers. Each step adjoins some x in (1/l)O with
    integral trace and norm such that the ring it generates with O is still
    integral, until the reduced discriminant equals the product of the
    ramified primes.
    """
    if alg.a.denominator != 1 or alg.b.denominator != 1:
        raise ValueError("maximal_order expects integral a and b")
    target = 1
    for p in alg.ramified():
        target *= p
    O = QuatOrder(alg, RatMat.identity(4))
    while O.reduced_discriminant != target:
        ratio = O.reduced_discriminant // target
        for ell in prime_factors(ratio):
            grown = _enlarge(O, ell)
            if grown is not None:
                O = grown
                break
        else:
            raise ArithmeticError("could not enlarge the order; is it already maximal?")
    return O


def _enlarge(O: QuatOrder, ell: int):
    # an order containing O has index at most rdisc(O) over it
    limit = O.reduced_discriminant
    for c in product(range(ell), repeat=4):
        if not any(c):
            continue
        x = O.from_coords([Fraction(t, ell) for t in c])
        if x.nrd().denominator != 1 or x.trd().denominator != 1:
            continue
        L = _ring_closure(O.alg, O.basis.det(), list(O.basis.rows) + [x.c], limit)
        if L is not None:
            return QuatOrder(O.alg, L)
    return None


def hurwitz_order() -> QuatOrder:
    alg = QuatAlg(-1, -1)
    h = Fraction(1, 2)
    return QuatOrder(alg, [[h, h, h, h], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])


def lipschitz_order() -> QuatOrder:
    return QuatOrder(QuatAlg(-1, -1), RatMat.identity(4))


@dataclass(frozen=True)
class NormForm:
    gram: RatMat

    def value(self, v) -> Fraction:
        G = self.gram.rows
        return sum(Fraction(v[s]) * G[s][t] * v[t] for s in range(4) for t in range(4))


@dataclass(frozen=True)
class IdealLattice:
    """A left ideal of ``order``; ``basis`` rows are order coordinates."""

    order: QuatOrder
    basis: RatMat
    key: tuple = ()
    side: str = "left"

    def elements(self):
        return [self.order.from_coords(r) for r in self.basis.rows]

    @property
    def index(self) -> int:
        return abs(int(self.basis.det()))

    def norm_form(self) -> NormForm:
        return NormForm(self.basis * self.order.gram * self.basis.transpose())

    def contains(self, x: Quat) -> bool:
        v = self.order.coords(x)
        sol = RatMat([v]) * self.basis.inverse()
        return sol.is_integral()

    def is_left_ideal(self) -> bool:
        for e in self.order.elements:
            for y in self.elements():
                if not self.contains(e * y):
                    return False
        return True


# ---------------------------------------------------------------------------
# units, neighbours, generators


def _require_definite(O: QuatOrder):
    if not O.alg.is_definite:
        raise ValueError(
            "indefinite algebra: the base unit group is infinite, which is outside this package"
        )


def unit_group(O: QuatOrder) -> list:
    """All units of O (reduced norm 1), sorted by coordinates."""
    _require_definite(O)
    units = [O.from_coords(v) for v in short_vectors(O.gram.rows, 2, exact=True)]
    units.sort(key=lambda u: u.c)
    S = set(units)
    for x in units:
        if x.inverse() not in S or any(x * y not in S for y in units):
            raise ArithmeticError("unit set is not closed")
    return units


def _ideal_from_key(O, W, p) -> IdealLattice:
    rows = [list(r) for r in W] + [[p * int(i == j) for j in range(4)] for i in range(4)]
    H, _ = hnf(rows)
    return IdealLattice(O, RatMat(H), tuple(W))


def neighbor_ideals(O: QuatOrder, p: int) -> list:
    """The p+1 left ideals J with pO < J < O of index p^2 (p split)."""
    if hilbert_symbol(O.alg.a, O.alg.b, p) == -1:
        raise ValueError(f"p = {p} is ramified: the local building is a single vertex")
    if O.reduced_discriminant % p == 0:
        raise ValueError(f"order is not maximal at {p}")
    Ls = [O.left_matrix(e).mod(p) for e in O.elements]
    out = []
    for W in enumerate_subspaces(4, 2, p):
        if all(rref_mod_p(W + matmul_mod(W, L, p), p) == W for L in Ls):
            out.append(_ideal_from_key(O, W, p))
    if len(out) != p + 1:
        raise ArithmeticError(f"found {len(out)} maximal left ideals mod {p}, expected {p + 1}")
    return out


def principal_generator(J: IdealLattice) -> Quat:
    """lambda with J = O*lambda, found among vectors of norm-form value 2*Nrd(J)."""
    O = J.order
    _require_definite(O)
    idx = J.index
    n = math.isqrt(idx)
    if n * n != idx:
        raise ValueError("ideal index is not a square")
    nf = J.norm_form()
    cands = []
    for y in short_vectors(nf.gram.rows, 2 * n, exact=True):
        v = RatMat([y]) * J.basis
        cands.append(O.from_coords(v.rows[0]))
    cands.sort(key=lambda x: (-x.c[0], tuple(-t for t in x.c[1:])))
    for lam in cands:
        # O*lam lies in J; equal indices force equality
        if abs(O.right_matrix(lam).det()) == idx:
            return lam
    raise EngineError("no principal generator found: class number is not one")


# ---------------------------------------------------------------------------
# presentations


class QuaternionKind:
    name = "quaternion"
    dim = 4

    def __init__(self, order: QuatOrder):
        self.order = order

    def mat(self, x: Quat) -> RatMat:
        return self.order.right_matrix(x)

    def scalar(self, c) -> Quat:
        return self.order.alg.elt(c, 0, 0, 0)

    def one(self) -> Quat:
        return self.order.alg.elt(1, 0, 0, 0)

    def coords_for_units(self, x: Quat):
        return list(self.order.coords(x))


def _finite_presentation(units, one):
    """Two generators when possible, with Cayley-graph cycle relators."""
    index = {u: k for k, u in enumerate(units)}

    def generated(gs):
        seen, todo = {one}, [one]
        while todo:
            x = todo.pop()
            for g in gs:
                y = x * g
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
        return len(seen)

    gens = None
    for u in units:
        if generated([u]) == len(units):
            gens = [u]
            break
    if gens is None:
        for s, u in enumerate(units):
            for v in units[s + 1 :]:
                if generated([u, v]) == len(units):
                    gens = [u, v]
                    break
            if gens:
                break
    names = [f"u{k + 1}" for k in range(len(gens))]
    act = lambda x, g: x * g
    words, rels = orbit_with_words(one, list(zip(names, gens)), act)
    if len(words) != len(units) or any(x not in index for x in words):
        raise ArithmeticError("unit generators do not close up")
    return dict(zip(names, gens)), rels, words


def quat_base_level(O: QuatOrder) -> GroupLevel:
    units = unit_group(O)
    kind = QuaternionKind(O)
    gens, rels, words = _finite_presentation(units, kind.one())
    lookup = {u: w for u, w in words.items()}

    def rewriter(g):
        w = lookup.get(g)
        if w is None:
            raise ValueError("element is not a unit of the order")
        return w

    P = Presentation(tuple(gens), tuple(rels), gens)
    bad = P.check_relators()
    if bad:
        raise EngineError("unit group presentation fails")
    prov = [{"source": "base:unit-group cycle", "index": k} for k in range(len(rels))]
    return GroupLevel(
        kind, (), gens, P, prov, base_rewriter=rewriter,
        meta={"a": O.alg.a, "b": O.alg.b, "units": len(units)},
    )


class QuatModel:
    """The (p+1)-regular tree at a split prime, neighbours as maximal left ideals."""

    def __init__(self, O: QuatOrder, p: int):
        self.O, self.p, self.dim = O, p, 4
        self.ideals = neighbor_ideals(O, p)

    def neighbor_keys(self):
        return [J.key for J in self.ideals]

    def edge_candidates(self, level, covered=None):
        count = 0
        for J in self.ideals:
            if covered is not None and J.key in covered:
                continue
            lam = principal_generator(J)
            name = f"l{self.p}" if count == 0 else f"l{self.p}_{count}"
            count += 1
            yield J.key, lam, name, {"ideal": [list(r) for r in J.key], "nrd": str(lam.nrd())}

    def triangles(self):
        return []


def ramified_uniformizer(O: QuatOrder, p: int) -> Quat:
    """An element of O with reduced norm p (generates the prime above p)."""
    best = None
    for v in short_vectors(O.gram.rows, 2 * p, exact=True):
        x = O.from_coords(v)
        key = (-x.c[0], tuple(-t for t in x.c[1:]))
        if best is None or key < best[0]:
            best = (key, x)
    if best is None:
        raise EngineError(f"no element of reduced norm {p}")
    return best[1]


def quat_s_presentation(O: QuatOrder, S) -> GroupLevel:
    """Presentation of the S-unit group of O, adjoining the primes of S in order."""
    _require_definite(O)
    if not O.is_maximal():
        raise ValueError("order is not maximal")
    if len(set(S)) != len(S):
        raise ValueError("primes must be distinct")
    ram = set(O.alg.ramified())
    level = quat_base_level(O)
    split_seen = False
    for p in S:
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if p in ram:
            level = extend_ramified(level, p, ramified_uniformizer(O, p))
        else:
            level = extend_level(level, p, QuatModel(O, p))
            if split_seen and len(level.local.orbits) != 1:
                raise EngineError(
                    f"the S-unit group is not transitive on the neighbours at {p}",
                    level.provenance,
                )
            split_seen = True
        level.meta["last_orbits"] = len(level.local.orbits)
    return level


def order_for(a, b) -> QuatOrder:
    """The maximal order used for (a, b): Hurwitz for (-1, -1), otherwise found by search."""
    alg = QuatAlg(a, b)
    if alg.a == -1 and alg.b == -1:
        return hurwitz_order()
    return maximal_order(alg)
