"""Exact integer / rational linear algebra and F_p combinatorics.

Everything here is arbitrary precision (Python ints and ``Fraction``);
nothing ever touches floating point.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product
from math import gcd, isqrt
from typing import Iterable, Sequence

IntMat = tuple  # tuple of tuples of int, row-major


def _frac(x) -> Fraction:
    return x if type(x) is Fraction else Fraction(x)


def lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b if a and b else 0


def valuation(x, p: int) -> int:
    """p-adic valuation of a nonzero int or Fraction."""
    x = _frac(x)
    if x == 0:
        raise ValueError("valuation of zero")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def parse_rational(s) -> Fraction:
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    return Fraction(str(s).strip())


def rational_str(x) -> str:
    x = _frac(x)
    return f"{x.numerator}/{x.denominator}"


class RatMat:
    """Immutable exact rational matrix; also serves as the integer matrix type."""

    __slots__ = ("rows", "_hash")

    def __init__(self, rows: Iterable[Iterable]):
        self.rows = tuple(tuple(_frac(x) for x in r) for r in rows)
        if not self.rows or not self.rows[0]:
            raise ValueError("empty matrix")
        w = len(self.rows[0])
        if any(len(r) != w for r in self.rows):
            raise ValueError("ragged rows")
        self._hash = None

    @classmethod
    def identity(cls, n: int) -> RatMat:
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def diag(cls, entries) -> RatMat:
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def scalar(cls, n: int, c) -> RatMat:
        return cls.diag([c] * n)

    @classmethod
    def from_strings(cls, rows) -> RatMat:
        return cls([[parse_rational(x) for x in r] for r in rows])

    def to_strings(self) -> list:
        return [[rational_str(x) for x in r] for r in self.rows]

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, RatMat) and self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.rows)
        return self._hash

    def __repr__(self):
        body = ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.rows)
        return f"RatMat([{body}])"

    def __mul__(self, other):
        if isinstance(other, RatMat):
            if self.ncols != other.nrows:
                raise ValueError("shape mismatch")
            cols = list(zip(*other.rows))
            return RatMat._raw(
                tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols) for r in self.rows)
            )
        c = _frac(other)
        return RatMat._raw(tuple(tuple(x * c for x in r) for r in self.rows))

    __matmul__ = __mul__

    def __rmul__(self, c):
        return self * c

    def __neg__(self):
        return self * -1

    @classmethod
    def _raw(cls, rows) -> RatMat:
        m = cls.__new__(cls)
        m.rows = rows
        m._hash = None
        return m

    def transpose(self) -> RatMat:
        return RatMat._raw(tuple(zip(*self.rows)))

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for r in self.rows for x in r)

    def is_identity(self) -> bool:
        return self.nrows == self.ncols and all(
            x == (1 if i == j else 0) for i, r in enumerate(self.rows) for j, x in enumerate(r)
        )

    def denominator(self) -> int:
        d = 1
        for r in self.rows:
            for x in r:
                d = lcm(d, x.denominator)
        return d

    def to_ints(self) -> IntMat:
        if not self.is_integral():
            raise ValueError("matrix is not integral")
        return tuple(tuple(x.numerator for x in r) for r in self.rows)

    def det(self) -> Fraction:
        n = self.nrows
        if n != self.ncols:
            raise ValueError("det of non-square matrix")
        a = [list(r) for r in self.rows]
        d = Fraction(1)
        for c in range(n):
            piv = next((i for i in range(c, n) if a[i][c] != 0), None)
            if piv is None:
                return Fraction(0)
            if piv != c:
                a[c], a[piv] = a[piv], a[c]
                d = -d
            d *= a[c][c]
            inv = 1 / a[c][c]
            for i in range(c + 1, n):
                if a[i][c]:
                    f = a[i][c] * inv
                    a[i] = [x - f * y for x, y in zip(a[i], a[c])]
        return d

    def inverse(self) -> RatMat:
        n = self.nrows
        if n != self.ncols:
            raise ValueError("inverse of non-square matrix")
        a = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(self.rows)]
        for c in range(n):
            piv = next((i for i in range(c, n) if a[i][c] != 0), None)
            if piv is None:
                raise ZeroDivisionError("singular matrix")
            a[c], a[piv] = a[piv], a[c]
            inv = 1 / a[c][c]
            a[c] = [x * inv for x in a[c]]
            for i in range(n):
                if i != c and a[i][c]:
                    f = a[i][c]
                    a[i] = [x - f * y for x, y in zip(a[i], a[c])]
        return RatMat._raw(tuple(tuple(r[n:]) for r in a))

    def mod(self, q: int) -> tuple:
        """Entry-wise reduction to Z/q (denominators inverted); returns a tuple of int tuples."""
        out = []
        for r in self.rows:
            row = []
            for x in r:
                den = x.denominator % q
                if gcd(den, q) != 1:
                    raise ValueError(f"denominator {x.denominator} not invertible mod {q}")
                row.append(x.numerator * pow(den, -1, q) % q)
            out.append(tuple(row))
        return tuple(out)


# ---------------------------------------------------------------------------
# integer normal forms


def _ident(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def hnf(M: Sequence[Sequence[int]]):
    """Row-style Hermite normal form.

    Returns ``(H, U)`` with ``U`` square unimodular and ``U*M`` equal to ``H``
    stacked on zero rows. ``H`` is upper triangular with positive pivots and
    the entries above each pivot reduced into ``[0, pivot)``. The row lattice
    of ``M`` must have full rank (rank = number of columns).
    """
    A = [[int(x) for x in r] for r in M]
    m, n = len(A), len(A[0])
    U = _ident(m)
    for c in range(n):
        r = c
        while True:
            nz = [i for i in range(r, m) if A[i][c] != 0]
            if not nz:
                raise ValueError("rank deficient: row lattice does not have full rank")
            piv = min(nz, key=lambda i: (abs(A[i][c]), i))
            if piv != r:
                A[r], A[piv] = A[piv], A[r]
                U[r], U[piv] = U[piv], U[r]
            done = True
            for i in range(r + 1, m):
                if A[i][c]:
                    q = A[i][c] // A[r][c]
                    A[i] = [x - q * y for x, y in zip(A[i], A[r])]
                    U[i] = [x - q * y for x, y in zip(U[i], U[r])]
                    if A[i][c]:
                        done = False
            if done:
                break
        if A[r][c] < 0:
            A[r] = [-x for x in A[r]]
            U[r] = [-x for x in U[r]]
        for i in range(r):
            q = A[i][c] // A[r][c]
            if q:
                A[i] = [x - q * y for x, y in zip(A[i], A[r])]
                U[i] = [x - q * y for x, y in zip(U[i], U[r])]
    H = tuple(tuple(r) for r in A[:n])
    return H, tuple(tuple(r) for r in U)


def snf(M: Sequence[Sequence[int]]):
    """Smith normal form ``D = U*M*V`` with nonnegative d_1 | d_2 | ... ."""
    A = [[int(x) for x in r] for r in M]
    m = len(A)
    n = len(A[0]) if m else 0
    U, V = _ident(m), _ident(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in A:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, k):
        A[dst] = [x + k * y for x, y in zip(A[dst], A[src])]
        U[dst] = [x + k * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, k):
        for r in A:
            r[dst] += k * r[src]
        for r in V:
            r[dst] += k * r[src]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if A[i][j] and (best is None or abs(A[i][j]) < best[0]):
                        best = (abs(A[i][j]), i, j)
            if best is None:
                break
            _, i, j = best
            swap_rows(t, i)
            swap_cols(t, j)
            p = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
                    dirty = dirty or A[i][t] != 0
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
                    dirty = dirty or A[t][j] != 0
            if dirty:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p), None
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if t < m and t < n and A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
    D = tuple(tuple(r) for r in A)
    return D, tuple(tuple(r) for r in U), tuple(tuple(r) for r in V)


def elementary_divisors(M: Sequence[Sequence[int]]) -> list:
    D, _, _ = snf(M)
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]


def int_matmul(A, B):
    cols = list(zip(*B))
    return tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols) for r in A)


def int_det(A) -> int:
    return int(RatMat(A).det())


def solve_integral(B, v):
    """Integer x with x*B = v (B square, rows a basis), or None if not integral."""
    x = RatMat([v]) * RatMat(B).inverse()
    return x.rows[0] if x.is_integral() else None


# ---------------------------------------------------------------------------
# F_p combinatorics


def rref_mod_p(rows, p: int) -> tuple:
    """Reduced row echelon basis of the row space over F_p (zero rows dropped)."""
    A = [[int(x) % p for x in r] for r in rows]
    if not A:
        return ()
    n = len(A[0])
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = pow(A[r][c], -1, p)
        A[r] = [x * inv % p for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [(x - f * y) % p for x, y in zip(A[i], A[r])]
        r += 1
        if r == len(A):
            break
    return tuple(tuple(row) for row in A[:r])


def matmul_mod(A, B, p: int) -> tuple:
    cols = list(zip(*B))
    return tuple(tuple(sum(a * b for a, b in zip(r, c)) % p for c in cols) for r in A)


def enumerate_subspaces(n: int, k: int, p: int) -> list:
    """Every k-dimensional subspace of F_p^n once, as its reduced row echelon basis."""
    if not 0 < k < n:
        raise ValueError(f"need 0 < k < n, got k={k}, n={n}")
    out = []
    for pivots in combinations(range(n), k):
        pset = set(pivots)
        free = [(r, c) for r, pc in enumerate(pivots) for c in range(pc + 1, n) if c not in pset]
        for vals in product(range(p), repeat=len(free)):
            rows = [[0] * n for _ in range(k)]
            for r, pc in enumerate(pivots):
                rows[r][pc] = 1
            for (r, c), v in zip(free, vals):
                rows[r][c] = v
            out.append(tuple(tuple(r) for r in rows))
    return out


def gaussian_binomial(n: int, k: int, q: int) -> int:
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    num = den = 1
    for i in range(1, k + 1):
        num *= q ** (n - k + i) - 1
        den *= q**i - 1
    return num // den


def gl_order(n: int, q: int) -> int:
    """|GL_n(F_q)|."""
    out = 1
    for i in range(n):
        out *= q**n - q**i
    return out


def sl_order(n: int, q: int) -> int:
    return gl_order(n, q) // (q - 1)


def prime_factors(n: int) -> list:
    out, d = [], 2
    n = abs(n)
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_prime(n: int) -> bool:
    return n >= 2 and prime_factors(n) == [n]


# ---------------------------------------------------------------------------
# short vectors


def short_vectors(gram, bound, exact: bool = False) -> list:
    """Integer vectors x != 0 with x*G*x^T <= bound (== bound if ``exact``).

    Fincke-Pohst enumeration on the exact rational Cholesky-type
    decomposition of the positive definite Gram matrix ``G``. Both x and -x
    are returned; the result is sorted.
    """
    n = len(gram)
    bound = Fraction(bound)
    Q = [[Fraction(x) for x in r] for r in gram]
    for i in range(n):
        if Q[i][i] <= 0:
            raise ValueError("Gram matrix is not positive definite")
        for j in range(i + 1, n):
            Q[j][i] = Q[i][j]
            Q[i][j] = Q[i][j] / Q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                Q[k][l] -= Q[k][i] * Q[i][l]
    out = []
    x = [0] * n

    def rec(i, remaining):
        centre = -sum(Q[i][j] * x[j] for j in range(i + 1, n))
        t = remaining / Q[i][i]
        s = isqrt(t.numerator // t.denominator) + 1
        lo = (centre - s).__floor__()
        hi = (centre + s).__ceil__()
        for v in range(lo, hi + 1):
            used = Q[i][i] * (v - centre) ** 2
            if used > remaining:
                continue
            x[i] = v
            if i == 0:
                if any(x):
                    val = bound - (remaining - used)
                    if not exact or val == bound:
                        out.append(tuple(x))
            else:
                rec(i - 1, remaining - used)
        x[i] = 0

    rec(n - 1, bound)
    return sorted(out)


def quad_form(gram, x) -> Fraction:
    return sum(Fraction(gram[i][j]) * x[i] * x[j] for i in range(len(x)) for j in range(len(x)))
