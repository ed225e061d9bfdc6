"""Conjugacy classes of subgroups of small index by coset-table backtracking."""

from __future__ import annotations

from .cosets import CosetTable, word_columns
from .presentation import Presentation, abelian_invariants
from .words import Word

DEFAULT_CAP = 15


class _Search:
    def __init__(self, P: Presentation, max_index: int):
        self.gens = P.generators
        self.ncols = 2 * len(self.gens)
        self.N = max_index
        rels = [word_columns(r.cyclically_reduced(), self.gens) for r in P.relators]
        self.rels = [r for r in rels if r]
        by_col = [[] for _ in range(self.ncols)]
        seen = set()
        for r in self.rels:
            for i in range(len(r)):
                rot = tuple(r[i:] + r[:i])
                if rot not in seen:
                    seen.add(rot)
                    by_col[rot[0]].append(rot)
        self.by_col = by_col
        self.found = []

    # -- deduction processing ------------------------------------------------

    def _scan(self, T, c, w, queue):
        f, b = c, c
        i, j = 0, len(w) - 1
        while i <= j and T[f][w[i]] is not None:
            f = T[f][w[i]]
            i += 1
        if i > j:
            return f == b
        while j >= i and T[b][w[j] ^ 1] is not None:
            b = T[b][w[j] ^ 1]
            j -= 1
        if j < i:
            return f == b
        if i == j:
            x = w[i]
            T[f][x] = b
            T[b][x ^ 1] = f
            queue.append((f, x))
            queue.append((b, x ^ 1))
        return True

    def _deduce(self, T, queue):
        while queue:
            c, x = queue.pop()
            for rot in self.by_col[x]:
                if not self._scan(T, c, rot, queue):
                    return False
        return True

    # -- first-in-class test -------------------------------------------------

    def _compare(self, T, n, base):
        """-1 if renumbering from ``base`` gives a smaller table, +1 if larger,
        0 if equal, None if undecided on a partial table."""
        m = [None] * n
        m[base] = 0
        order = [base]
        ncols = self.ncols
        for i in range(n):
            if i >= len(order):
                return None
            oi = order[i]
            Ti, To = T[i], T[oi]
            for x in range(ncols):
                a, b = To[x], Ti[x]
                if a is None or b is None:
                    return None
                ra = m[a]
                if ra is None:
                    ra = m[a] = len(order)
                    order.append(a)
                if ra != b:
                    return -1 if ra < b else 1
        return 0

    def _canonical(self, T, n):
        for base in range(1, n):
            if self._compare(T, n, base) == -1:
                return False
        return True

    # -- backtracking ----------------------------------------------------------

    def run(self):
        T = [[None] * self.ncols for _ in range(self.N)]
        if self.ncols == 0:
            self.found.append(((), 1))
            return
        self._search(T, 1)

    def _search(self, T, n):
        ncols = self.ncols
        for c in range(n):
            row = T[c]
            for x in range(ncols):
                if row[x] is None:
                    break
            else:
                continue
            break
        else:
            self._record(T, n)
            return
        targets = [d for d in range(n) if T[d][x ^ 1] is None]
        if n < self.N:
            targets.append(n)
        for d in targets:
            T2 = [r[:] for r in T]
            T2[c][x] = d
            T2[d][x ^ 1] = c
            n2 = n + (d == n)
            if not self._deduce(T2, [(c, x), (d, x ^ 1)]):
                continue
            if not self._canonical(T2, n2):
                continue
            self._search(T2, n2)

    def _record(self, T, n):
        table = tuple(tuple(T[c]) for c in range(n))
        for r in self.rels:
            for c in range(n):
                e = c
                for x in r:
                    e = table[e][x]
                if e != c:
                    return
        self.found.append((table, n))


def is_normal_table(table) -> bool:
    n = len(table)
    ncols = len(table[0]) if n else 0
    for base in range(1, n):
        m = {base: 0}
        order = [base]
        for i in range(n):
            oi = order[i]
            for x in range(ncols):
                a = table[oi][x]
                if a not in m:
                    m[a] = len(order)
                    order.append(a)
                if m[a] != table[i][x]:
                    return False
    return True


def schreier_words(table: CosetTable) -> list:
    """Schreier generators (as words) of the subgroup stabilizing coset 0."""
    gens = table.generators
    words = {0: Word()}
    order = [0]
    k = 0
    while k < len(order):
        c = order[k]
        for i, g in enumerate(gens):
            for col, e in ((2 * i, 1), (2 * i + 1, -1)):
                d = table.table[c][col]
                if d not in words:
                    words[d] = words[c] * Word([(g, e)])
                    order.append(d)
        k += 1
    out = []
    for c in order:
        for i, g in enumerate(gens):
            d = table.table[c][2 * i]
            w = (words[c] * Word([(g, 1)]) * words[d].inverse()).reduced()
            if w.letters:
                out.append(w)
    return out


def low_index_subgroups(P: Presentation, max_index: int, cap: int = DEFAULT_CAP) -> list:
    """All subgroups of index <= max_index up to conjugacy.

    Returns ``(CosetTable, is_normal, quotient_invariants)`` triples ordered by
    index; ``quotient_invariants`` is the abelian invariants of G/N for normal
    entries and ``None`` otherwise.
    """
    if max_index > cap:
        raise ValueError(f"max_index {max_index} exceeds the configured cap {cap}")
    if max_index < 1:
        return []
    S = _Search(P, max_index)
    S.run()
    out = []
    for table, n in sorted(S.found, key=lambda t: (t[1], t[0])):
        ct = CosetTable(P.generators, table)
        normal = is_normal_table(table)
        inv = None
        if normal:
            inv = abelian_invariants(P.with_relators(schreier_words(ct)))
        out.append((ct, normal, inv))
    return out
