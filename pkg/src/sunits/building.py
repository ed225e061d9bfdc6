"""Vertices, neighbours and distances in the building of SL_n(Q_p) (split case).

A vertex is a homothety class of Z_p-lattices in Q_p^n. We store the unique
integral lattice that agrees with the class representative at p, is Z_l^n at
every other prime, and is not contained in p*Z^n; its HNF is the key.
Group elements act on the right: v.g is the class of (basis of v) * g.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .core_arith import (
    RatMat,
    enumerate_subspaces,
    gaussian_binomial,
    hnf,
    int_matmul,
    snf,
    valuation,
)


@dataclass(frozen=True)
class Vertex:
    p: int
    n: int
    H: tuple

    def matrix(self) -> RatMat:
        return RatMat(self.H)

    def act(self, g: RatMat) -> Vertex:
        return canonical_vertex(self.matrix() * g, self.p)


@dataclass(frozen=True)
class EdgeRep:
    base: Vertex
    i: int
    sub: Vertex
    transporter_index: int


@dataclass(frozen=True)
class TriangleRep:
    i: int
    j: int

    def __post_init__(self):
        if not self.i > self.j >= 1:
            raise ValueError(f"triangle indices must satisfy i > j >= 1, got {(self.i, self.j)}")


def standard_vertex(n: int, p: int) -> Vertex:
    return Vertex(p, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))


def canonical_vertex(B: RatMat, p: int) -> Vertex:
    if not isinstance(B, RatMat):
        B = RatMat(B)
    n = B.nrows
    if n != B.ncols or B.det() == 0:
        raise ValueError("canonical_vertex needs a square nonsingular basis")
    d = B.denominator()
    M = (B * d).to_ints()
    D, U, V = snf(M)
    # M = U^-1 D V^-1; at p only the p-parts of D matter.
    Vinv = RatMat(V).inverse().to_ints()
    e = [valuation(D[i][i], p) for i in range(n)]
    m = min(e)
    rows = [[p ** (e[i] - m) * x for x in Vinv[i]] for i in range(n)]
    H, _ = hnf(rows)
    return Vertex(p, n, H)


def lattice_vertex(rows, p: int) -> Vertex:
    """Vertex of the lattice spanned by an arbitrary (tall) integral generating set."""
    H, _ = hnf(rows)
    return canonical_vertex(RatMat(H), p)


def relative_exponents(v: Vertex, w: Vertex) -> list:
    """p-adic exponents of the elementary divisors of w's lattice relative to v's."""
    R = w.matrix() * v.matrix().inverse()
    d = R.denominator()
    D, _, _ = snf((R * d).to_ints())
    shift = valuation(d, v.p)
    return sorted(valuation(D[i][i], v.p) - shift for i in range(v.n))


def _check_same(v: Vertex, w: Vertex):
    if v.p != w.p or v.n != w.n:
        raise ValueError("vertices live in different buildings")


def distance(v: Vertex, w: Vertex) -> int:
    _check_same(v, w)
    e = relative_exponents(v, w)
    return e[-1] - e[0]


def neighbors(v: Vertex) -> list:
    p, n = v.p, v.n
    pH = [[p * x for x in r] for r in v.H]
    out = []
    for k in range(1, n):
        for W in enumerate_subspaces(n, k, p):
            rows = [list(r) for r in int_matmul(W, v.H)] + pH
            out.append(lattice_vertex(rows, p))
    return out


def subspace_lattice(W, p: int, n: int) -> Vertex:
    """Vertex of the preimage in Z^n of the subspace W of F_p^n."""
    rows = [list(r) for r in W] + [[p * int(i == j) for j in range(n)] for i in range(n)]
    return lattice_vertex(rows, p)


def geodesic(v: Vertex, w: Vertex) -> list:
    """Path v = u_0, ..., u_d = w through the classes of M + p^t L."""
    _check_same(v, w)
    p = v.p
    e = relative_exponents(v, w)
    k = -e[0]
    d = e[-1] - e[0]
    M = w.matrix() * (Fraction(p) ** k)
    L = v.matrix()
    path = [v]
    for t in range(1, d):
        gens = RatMat((L * p**t).rows + M.rows)
        den = gens.denominator()
        ints = (gens * den).to_ints()
        path.append(lattice_vertex(ints, p))
    if d:
        path.append(w)
    return path


def vertex_degree(n: int, q: int) -> int:
    return sum(gaussian_binomial(n, k, q) for k in range(1, n))


def transporter(n: int, p: int, i: int) -> RatMat:
    """w_i = diag(p,...,p,1,...,1) with i entries p."""
    return RatMat.diag([p] * i + [1] * (n - i))


def edge_reps(n: int, p: int) -> list:
    if n < 2:
        raise ValueError("need n >= 2")
    base = standard_vertex(n, p)
    return [EdgeRep(base, i, base.act(transporter(n, p, i)), i) for i in range(1, n)]


def triangle_reps(n: int, p: int) -> list:
    if n < 2:
        raise ValueError("need n >= 2")
    return [TriangleRep(i, j) for i in range(2, n) for j in range(1, i)]


def minus_type(n: int, i: int, p: int):
    """Whether the type-i edge at the standard vertex can be reversed.

    When it can (2i = n) the witness is the block matrix [[0, p*1], [1, 0]];
    it sends the standard vertex to a type-n/2 neighbour and squares to p*1.
    """
    if not 1 <= i <= n - 1:
        raise ValueError(f"edge type {i} out of range for n={n}")
    if 2 * i != n:
        return False, None
    h = n // 2
    rows = []
    for r in range(h):
        rows.append([0] * h + [p * int(r == c) for c in range(h)])
    for r in range(h):
        rows.append([int(r == c) for c in range(h)] + [0] * h)
    return True, RatMat(rows)


def sphere_sizes(n: int, p: int, depth: int):
    """BFS from the standard vertex; returns (sphere sizes, revisit count).

    A revisit is a non-parent neighbour that was already discovered; the
    count is zero exactly when the explored ball is a tree.
    """
    start = standard_vertex(n, p)
    parent = {start: None}
    frontier = [start]
    sizes = [1]
    revisits = 0
    for _ in range(depth):
        nxt = []
        for u in frontier:
            for w in neighbors(u):
                if w == parent[u]:
                    continue
                if w in parent:
                    revisits += 1
                    continue
                parent[w] = u
                nxt.append(w)
        nxt.sort(key=lambda x: x.H)
        sizes.append(len(nxt))
        frontier = nxt
    return sizes, revisits


def bfs_distance(v: Vertex, w: Vertex, limit: int = 10) -> int:
    """Graph distance by breadth-first search (test oracle)."""
    seen = {v: 0}
    q = deque([v])
    while q:
        u = q.popleft()
        if u == w:
            return seen[u]
        if seen[u] >= limit:
            continue
        for x in neighbors(u):
            if x not in seen:
                seen[x] = seen[u] + 1
                q.append(x)
    raise ValueError("target not reached within limit")
