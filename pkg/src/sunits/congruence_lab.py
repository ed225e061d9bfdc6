"""Finite congruence images of computed levels and low-index normal subgroup scans."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .core_arith import gl_order, is_prime, matmul_mod, prime_factors, sl_order
from .engine import GroupLevel, rewrite
from .fpgroup import Presentation, low_index_subgroups, simplify

DEFAULT_CAP = 5_000_000
CAP_ENV = "SUNITS_CLOSURE_CAP"


class ClosureOverflow(RuntimeError):
    pass


def closure_cap() -> int:
    raw = os.environ.get(CAP_ENV)
    return int(raw) if raw else DEFAULT_CAP


@dataclass
class FiniteImage:
    """Generator images of a level in the unit group of (order / q)."""

    q: int
    kind: str
    names: tuple
    images: dict  # name -> matrix mod q (tuple of tuples)
    inverses: dict
    dets: dict  # name -> determinant (matrix) or reduced norm (quaternion) mod q
    _elements: frozenset | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return len(next(iter(self.images.values()))) if self.images else 0

    def identity(self):
        n = self.dim
        return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))

    def evaluate(self, w):
        out = self.identity()
        for g, e in w.letters:
            m = self.images[g] if e > 0 else self.inverses[g]
            for _ in range(abs(e)):
                out = matmul_mod(out, m, self.q)
        return out


def _check_modulus(level: GroupLevel, q: int):
    if q < 2:
        raise ValueError("modulus must be at least 2")
    bad = [p for p in level.S if q % p == 0]
    if bad:
        raise ValueError(f"modulus {q} is not coprime to the inverted primes {bad}")


def reduce_mod_q(level: GroupLevel, q: int) -> FiniteImage:
    """Reduce generator images mod q and re-check every relator there."""
    _check_modulus(level, q)
    kind = level.kind
    imgs, invs, dets = {}, {}, {}
    for name, x in level.presentation.images.items():
        imgs[name] = kind.mat(x).mod(q)
        invs[name] = kind.mat(x.inverse()).mod(q)
        d = x.nrd() if kind.name == "quaternion" else x.det()
        dets[name] = d.numerator * pow(d.denominator, -1, q) % q
    img = FiniteImage(q, kind.name, level.presentation.generators, imgs, invs, dets)
    one = img.identity()
    for k, r in enumerate(level.presentation.relators):
        if img.evaluate(r) != one:
            raise ArithmeticError(f"relator {k} fails modulo {q}")
    return img


def _closure(gens, mul, one, cap):
    seen = {one}
    frontier = [one]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = mul(x, g)
                if y not in seen:
                    seen.add(y)
                    if len(seen) > cap:
                        raise ClosureOverflow(f"closure exceeds the cap of {cap} elements")
                    nxt.append(y)
        frontier = nxt
    return seen


def finite_group_order(img: FiniteImage, cap: int | None = None) -> int:
    """Order of the group generated by the images, by breadth-first closure."""
    if img._elements is None:
        cap = closure_cap() if cap is None else cap
        gens = [img.images[n] for n in img.names]
        q = img.q
        img._elements = frozenset(_closure(gens, lambda a, b: matmul_mod(a, b, q), img.identity(), cap))
    return len(img._elements)


def _unit_subgroup(values, q) -> list:
    return sorted(_closure([v % q for v in values], lambda a, b: a * b % q, 1 % q, q))


def gl_order_mod(n: int, q: int) -> int:
    """|GL_n(Z/q)| for any q >= 2."""
    out = 1
    for p in set(prime_factors(q)):
        e = 0
        m = q
        while m % p == 0:
            m //= p
            e += 1
        out *= p ** ((e - 1) * n * n) * gl_order(n, p)
    return out


def congruence_probe(level: GroupLevel, q: int) -> dict:
    """Image mod q, its determinant (or reduced-norm) one part, and the
    expected size of that part when strong approximation makes it full."""
    _check_modulus(level, q)
    report = {"q": q, "S": list(level.S), "kind": level.kind_name}
    try:
        img = reduce_mod_q(level, q)
        report["relators_hold"] = True
    except ArithmeticError as exc:
        report.update(relators_hold=False, error=str(exc))
        return report
    order = finite_group_order(img)
    dets = _unit_subgroup(img.dets.values(), q)
    special = order // len(dets)
    report.update(image_order=order, det_image=dets, special_order=special)
    prime = is_prime(q)
    if level.kind_name == "matrix":
        n = level.kind.n
        report["ambient_order"] = gl_order_mod(n, q)
        report["expected_special_order"] = sl_order(n, q) if prime else None
    else:
        ram = level.kind.order.alg.ramified()
        split = prime and q not in ram
        report["ambient_order"] = gl_order(2, q) if split else None
        report["expected_special_order"] = sl_order(2, q) if split else None
    amb = report["ambient_order"]
    report["divides_ambient"] = None if amb is None else amb % order == 0
    exp = report["expected_special_order"]
    report["special_is_full"] = None if exp is None else special == exp
    return report


# ---------------------------------------------------------------------------
# normal subgroup scan


def projective_presentation(level: GroupLevel) -> Presentation:
    """The level's presentation with the central scalars -1 and p (p in S) killed."""
    kind = level.kind
    extra = [rewrite(level, kind.scalar(-1))]
    extra += [rewrite(level, kind.scalar(p)) for p in level.S]
    extra = [w for w in extra if w.reduced().letters]
    P = level.presentation
    return Presentation(P.generators, P.relators + tuple(extra))


def _perm_closure(img: FiniteImage, perms, names, limit):
    """Size of the group generated by the pairs (image mod q, coset permutation),
    stopping as soon as it exceeds ``limit``."""
    q = img.q

    def mul(a, b):
        return matmul_mod(a[0], b[0], q), tuple(b[1][i] for i in a[1])

    gens = [(img.images[n], perms[k]) for k, n in enumerate(names)]
    one = (img.identity(), tuple(range(len(perms[0]))))
    try:
        return len(_closure(gens, mul, one, limit))
    except ClosureOverflow:
        return limit + 1


def default_moduli(level: GroupLevel, top: int = 15) -> list:
    return [q for q in range(2, top + 1) if all(q % p for p in level.S)]


def normal_scan(
    level: GroupLevel,
    max_index: int,
    predicted_primes,
    projective: bool = True,
    moduli=None,
) -> dict:
    """Normal subgroups of index <= max_index with congruence labels.

    A subgroup is labelled congruence mod q when the coset action factors
    through the image mod q (the pair closure has the size of that image).
    Flags are advisory: a clean scan is consistent with the congruence
    subgroup property, not a proof of it.
    """
    predicted = set(predicted_primes)
    P = projective_presentation(level) if projective else level.presentation
    gens = P.generators
    P = simplify(Presentation(P.generators, P.relators))
    kept = P.generators
    moduli = default_moduli(level) if moduli is None else list(moduli)
    images = {}
    entries = []
    for table, normal, inv in low_index_subgroups(P, max_index):
        if not normal:
            continue
        idx = table.index
        primes = prime_factors(idx)
        entry = {
            "index": idx,
            "quotient_order": idx,
            "abelian_invariants": {"free_rank": inv[0], "torsion": inv[1]},
            "prime_factors": primes,
            "flagged": bool(set(primes) - predicted),
            "congruence": None,
        }
        if idx > 1:
            perms = table.permutations()
            for q in moduli:
                if q not in images:
                    img = reduce_mod_q(level, q)
                    images[q] = (img, finite_group_order(img))
                img, order = images[q]
                if _perm_closure(img, perms, kept, order) == order:
                    entry["congruence"] = q
                    break
        entries.append(entry)
    return {
        "S": list(level.S),
        "kind": level.kind_name,
        "max_index": max_index,
        "projective": projective,
        "generators_before_simplify": len(gens),
        "generators": list(kept),
        "predicted_primes": sorted(predicted),
        "moduli": moduli,
        "normal_subgroups": entries,
        "flagged": [e["index"] for e in entries if e["flagged"]],
        "consistent_with_csp": not any(e["flagged"] for e in entries),
    }
