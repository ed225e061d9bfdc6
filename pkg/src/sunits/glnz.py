"""GL_n(Z): built-in presentations, word rewriting, orbits on F_p-subspaces.

Presentations used:

* n = 2: SL_2(Z) = <S, T | S^4, (ST)^3 S^-2> with S = [[0,-1],[1,0]],
  T = [[1,1],[0,1]], extended by J = diag(1,-1) acting by S -> S^-1, T -> T^-1.
* n >= 3: SL_n(Z) is the Steinberg group St_n(Z) modulo (E12 E21^-1 E12)^4
  (Milnor, Introduction to Algebraic K-Theory, Cor. 10.3), extended by
  J = diag(1,...,1,-1).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

from .core_arith import RatMat, gaussian_binomial, rref_mod_p, matmul_mod
from .fpgroup import Presentation, Word, commutator, evaluate


@dataclass(frozen=True)
class BaseGroup:
    n: int
    generators: dict
    presentation: Presentation

    def rewrite(self, g) -> Word:
        return rewrite_in_base(g, self)

    def element(self, w: Word) -> RatMat:
        return evaluate(w, self.generators, identity=RatMat.identity(self.n))


def _gen_names(n):
    if n == 2:
        return ["S", "T"]
    return [f"E{i + 1}{j + 1}" for i in range(n) for j in range(n) if i != j]


def _elementary(n, i, j, k=1):
    rows = [[int(a == b) for b in range(n)] for a in range(n)]
    rows[i][j] = k
    return RatMat(rows)


def elementary_word(n: int, i: int, j: int, k: int = 1) -> Word:
    """Word for the matrix 1 + k*e_ij (0-based indices)."""
    if n == 2:
        if (i, j) == (0, 1):
            return Word.gen("T", k)
        return Word.gen("S") * Word.gen("T", -k) * Word.gen("S", -1)
    return Word.gen(f"E{i + 1}{j + 1}", k)


def _sl_relators(n):
    if n == 2:
        S, T = Word.gen("S"), Word.gen("T")
        return [S**4, (S * T) ** 3 * S**-2]
    E = {(i, j): Word.gen(f"E{i + 1}{j + 1}") for i in range(n) for j in range(n) if i != j}
    rels = []
    for (i, j), a in E.items():
        for k in range(n):
            if k not in (i, j):
                rels.append(commutator(a, E[(j, k)]) * E[(i, k)].inverse())
    keys = list(E)
    for s, (i, j) in enumerate(keys):
        for (k, l) in keys[s + 1 :]:
            if j != k and i != l:
                rels.append(commutator(E[(i, j)], E[(k, l)]))
    w = E[(0, 1)] * E[(1, 0)].inverse() * E[(0, 1)]
    rels.append(w**4)
    return rels


def _sl_generators(n):
    if n == 2:
        return {"S": RatMat([[0, -1], [1, 0]]), "T": RatMat([[1, 1], [0, 1]])}
    return {
        f"E{i + 1}{j + 1}": _elementary(n, i, j) for i in range(n) for j in range(n) if i != j
    }


def _check(P: Presentation):
    bad = P.check_relators()
    if bad:
        raise AssertionError(f"built-in relators fail: {[str(P.relators[k]) for k in bad]}")


def sl_part(n: int) -> BaseGroup:
    """The SL_n(Z) sub-presentation (no J)."""
    if n not in (2, 3, 4):
        raise ValueError(f"unsupported rank n={n} (built-in tables cover 2, 3, 4)")
    gens = _sl_generators(n)
    P = Presentation(tuple(gens), tuple(_sl_relators(n)), gens)
    _check(P)
    return BaseGroup(n, gens, P)


def base_group(n: int) -> BaseGroup:
    """Generators and a verified presentation of GL_n(Z), n in {2, 3, 4}."""
    sl = sl_part(n)
    J = RatMat.diag([1] * (n - 1) + [-1])
    gens = dict(sl.generators)
    gens["J"] = J
    j = Word.gen("J")
    rels = list(sl.presentation.relators) + [j**2]
    for name, m in sl.generators.items():
        a = Word.gen(name)
        inv = (J * m * J) == m.inverse()
        rels.append(j * a * j.inverse() * (a if inv else a.inverse()))
    P = Presentation(tuple(gens), tuple(rels), gens)
    _check(P)
    return BaseGroup(n, gens, P)


def rewrite_in_base(g, B: BaseGroup) -> Word:
    """Word in B's generators evaluating to the unimodular integer matrix g.

    Integer row reduction by elementary operations, smallest pivot first;
    the leftover diagonal sign matrix is written with J and squares of
    signed swaps.
    """
    n = B.n
    if not isinstance(g, RatMat):
        g = RatMat(g)
    if not g.is_integral() or abs(g.det()) != 1:
        raise ValueError("rewrite_in_base needs an integral matrix of determinant +-1")
    A = [list(r) for r in g.to_ints()]
    ops = []  # (i, j, k): row_i += k*row_j

    def add(i, j, k):
        if k:
            A[i] = [x + k * y for x, y in zip(A[i], A[j])]
            ops.append((i, j, k))

    for c in range(n):
        while True:
            nz = [r for r in range(c, n) if A[r][c]]
            piv = min(nz, key=lambda r: (abs(A[r][c]), r))
            others = [r for r in nz if r != piv]
            if not others:
                break
            for r in others:
                add(r, piv, -round(Fraction(A[r][c], A[piv][c])))
        if piv != c:
            add(c, piv, 1)
            add(piv, c, -1)
            add(c, piv, 1)
        for r in range(n):
            if r != c and A[r][c]:
                add(r, c, -A[r][c] * A[c][c])
    signs = [A[i][i] for i in range(n)]
    w = Word()
    for i, j, k in reversed(ops):
        w = elementary_word(n, i, j, -k) * w
    tail = Word()
    if signs[-1] * _prod(signs[:-1]) == -1:
        signs[-1] = -signs[-1]
        tail = Word.gen("J")
    neg = [i for i in range(n) if signs[i] == -1]
    for a, b in zip(neg[::2], neg[1::2]):
        s = elementary_word(n, a, b) * elementary_word(n, b, a, -1) * elementary_word(n, a, b)
        w = w * s * s
    return w * tail


def _prod(xs):
    out = 1
    for x in xs:
        out *= x
    return out


# ---------------------------------------------------------------------------
# orbits with words


def orbit_with_words(start, gens, act):
    """Breadth-first orbit of ``start`` under named generators.

    ``gens`` is a list of ``(name, element)``; ``act(point, element)`` gives
    the image point. Returns ``(transporters, schreier)``: ``transporters``
    maps each orbit point x to a word t with start.t = x (insertion order is
    BFS order), ``schreier`` lists the distinct nontrivial Schreier
    generators t_x s t_{x.s}^-1 of the point stabilizer.
    """
    trans = {start: Word()}
    order = [start]
    k = 0
    while k < len(order):
        x = order[k]
        for name, el in gens:
            y = act(x, el)
            if y not in trans:
                trans[y] = trans[x] * Word.gen(name)
                order.append(y)
        k += 1
    schreier, seen = [], set()
    for x in order:
        for name, el in gens:
            y = act(x, el)
            w = (trans[x] * Word.gen(name) * trans[y].inverse()).reduced()
            if w.letters and w.letters not in seen:
                seen.add(w.letters)
                schreier.append(w)
    return trans, schreier


def subspace_action(p: int):
    def act(W, M):
        return rref_mod_p(matmul_mod(W, M, p), p)

    return act


def subspace_orbit(B: BaseGroup, W0, p: int):
    """Orbit of the subspace W0 of F_p^n under B's generators (right action).

    Returns ``(transporters, stab_gens)``; the orbit must be the whole
    Grassmannian.
    """
    W0 = rref_mod_p(W0, p)
    k = len(W0)
    gens = [(name, m.mod(p)) for name, m in B.generators.items()]
    trans, stab = orbit_with_words(W0, gens, subspace_action(p))
    expected = gaussian_binomial(B.n, k, p)
    if len(trans) != expected:
        raise AssertionError(
            f"orbit of size {len(trans)} is not the full Grassmannian ({expected} subspaces)"
        )
    return trans, stab


def signed_permutation_matrices(n: int):
    """All signed permutation matrices of size n (test helper)."""
    out = []
    for perm in permutations(range(n)):
        for mask in range(2**n):
            rows = [[0] * n for _ in range(n)]
            for i, j in enumerate(perm):
                rows[i][j] = -1 if mask >> i & 1 else 1
            out.append(RatMat(rows))
    return out
