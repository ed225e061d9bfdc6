"""HLT coset enumeration (no lookahead)."""

from __future__ import annotations

from dataclasses import dataclass

from .presentation import Presentation
from .words import Word


class CosetOverflow(RuntimeError):
    """More than ``max_cosets`` cosets were needed. Not a proof of infinite index."""


@dataclass(frozen=True)
class CosetTable:
    """Complete action of the generators on cosets.

    ``table[c][2*k]`` is c * g_k and ``table[c][2*k+1]`` is c * g_k^-1.
    Coset 0 is the subgroup itself.
    """

    generators: tuple
    table: tuple
    complete: bool = True

    @property
    def index(self) -> int:
        return len(self.table)

    def act(self, c: int, w: Word) -> int:
        col = {g: 2 * i for i, g in enumerate(self.generators)}
        for g, e in w.letters:
            c = self.table[c][col[g] + (e < 0)]
        return c

    def permutations(self) -> list:
        """Permutation of the cosets induced by each generator."""
        return [tuple(row[2 * k] for row in self.table) for k in range(len(self.generators))]


def word_columns(w: Word, generators) -> list:
    col = {g: 2 * i for i, g in enumerate(generators)}
    return [col[g] + (e < 0) for g, e in w.letters]


class _Enumerator:
    def __init__(self, ncols, max_cosets):
        self.ncols = ncols
        self.max = max_cosets
        self.table = [[None] * ncols]
        self.parent = [0]

    def rep(self, c):
        p = self.parent
        r = c
        while p[r] != r:
            r = p[r]
        while p[c] != r:
            p[c], c = r, p[c]
        return r

    def alive(self, c):
        return self.parent[c] == c

    def define(self, c, x):
        if len(self.table) >= self.max:
            raise CosetOverflow(f"coset limit {self.max} exceeded")
        d = len(self.table)
        self.table.append([None] * self.ncols)
        self.parent.append(d)
        self.table[c][x] = d
        self.table[d][x ^ 1] = c
        return d

    def merge(self, a, b, queue):
        a, b = self.rep(a), self.rep(b)
        if a == b:
            return
        lo, hi = min(a, b), max(a, b)
        self.parent[hi] = lo
        queue.append(hi)

    def coincidence(self, a, b):
        queue = []
        self.merge(a, b, queue)
        i = 0
        T = self.table
        while i < len(queue):
            g = queue[i]
            i += 1
            for x in range(self.ncols):
                d = T[g][x]
                if d is None:
                    continue
                T[g][x] = None
                if T[d][x ^ 1] == g:
                    T[d][x ^ 1] = None
                mu, nu = self.rep(g), self.rep(d)
                if T[mu][x] is not None:
                    self.merge(nu, T[mu][x], queue)
                elif T[nu][x ^ 1] is not None:
                    self.merge(mu, T[nu][x ^ 1], queue)
                else:
                    T[mu][x] = nu
                    T[nu][x ^ 1] = mu

    def scan_and_fill(self, c, w):
        T = self.table
        f, b = c, c
        i, j = 0, len(w) - 1
        while True:
            while i <= j and T[f][w[i]] is not None:
                f = T[f][w[i]]
                i += 1
            if i > j:
                if f != b:
                    self.coincidence(f, b)
                return
            while j >= i and T[b][w[j] ^ 1] is not None:
                b = T[b][w[j] ^ 1]
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return
            if i == j:
                T[f][w[i]] = b
                T[b][w[i] ^ 1] = f
                return
            self.define(f, w[i])

    def standardized(self):
        """Renumber live cosets in first-appearance order; returns a tuple table."""
        order = [0]
        index = {0: 0}
        k = 0
        while k < len(order):
            c = order[k]
            for x in range(self.ncols):
                d = self.rep(self.table[c][x])
                if d not in index:
                    index[d] = len(order)
                    order.append(d)
            k += 1
        return tuple(
            tuple(index[self.rep(self.table[c][x])] for x in range(self.ncols)) for c in order
        )


def todd_coxeter(P: Presentation, subgens=(), max_cosets: int = 100000) -> CosetTable:
    """Enumerate the cosets of the subgroup generated by ``subgens``.

    Raises :class:`CosetOverflow` when the table would exceed ``max_cosets``.
    """
    gens = P.generators
    ncols = 2 * len(gens)
    rels = [word_columns(r.cyclically_reduced(), gens) for r in P.relators]
    rels = [r for r in rels if r]
    subs = [word_columns(w.reduced(), gens) for w in subgens]
    E = _Enumerator(ncols, max_cosets)
    if ncols == 0:
        return CosetTable(gens, ((),))
    for w in subs:
        if w:
            E.scan_and_fill(0, w)
    a = 0
    while a < len(E.table):
        if E.alive(a):
            for r in rels:
                E.scan_and_fill(a, r)
                if not E.alive(a):
                    break
            if E.alive(a):
                for x in range(ncols):
                    if E.table[a][x] is None:
                        E.define(a, x)
        a += 1
    return CosetTable(gens, E.standardized())


def coset_index(P: Presentation, subgens=(), max_cosets: int = 100000) -> int:
    return todd_coxeter(P, subgens, max_cosets).index
