"""Iterated presentations of S-unit groups through the action on a building.

One prime is adjoined at a time. The group of the new level acts on the
building at that prime with a single vertex orbit (class number one); the
standard vertex v0 has stabilizer <previous level, z_p> with z_p = p central.
Generators and relations follow Brown's theorem for a group acting on a
simply connected complex:

  * relations of the vertex stabilizer,
  * for every plus-type edge representative with transporter w:
    w h w^-1 in Stab(v0) for generators h of the edge stabilizer,
  * for every minus-type representative with edge-reversing g:
    g h g in Stab(v0) and g^2 in Stab(v0),
  * one cycle relation per triangle representative.

Everything geometric is expressed through two things: the matrix by which
an element acts on lattice coordinates (right action on row vectors), and
F_p-subspaces of L0/pL0 standing for the neighbours of v0. The same code
therefore serves GL_n(Z[1/S]) and unit groups of quaternion orders.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .building import minus_type, transporter
from .core_arith import (
    RatMat,
    enumerate_subspaces,
    matmul_mod,
    rref_mod_p,
    snf,
    valuation,
)
from .fpgroup import Presentation, Word, abelian_invariants, commutator, evaluate
from .glnz import base_group, orbit_with_words, rewrite_in_base, subspace_action

log = logging.getLogger(__name__)


class EngineError(RuntimeError):
    """A mathematical invariant failed; carries the provenance collected so far."""

    def __init__(self, msg, provenance=None):
        super().__init__(msg)
        self.provenance = provenance or []


# ---------------------------------------------------------------------------
# element kinds


class MatrixKind:
    name = "matrix"

    def __init__(self, n: int):
        self.n = self.dim = n

    def mat(self, x: RatMat) -> RatMat:
        return x

    def scalar(self, c) -> RatMat:
        return RatMat.scalar(self.n, c)

    def one(self) -> RatMat:
        return RatMat.identity(self.n)

    def coords_for_units(self, x: RatMat):
        """Entries whose denominators must lie in S (for x and x^-1)."""
        return [c for r in x.rows for c in r]


# ---------------------------------------------------------------------------
# local geometry at one prime


def _scaled_mod_p(M: RatMat, p: int):
    """(k, M*p^k mod p) with k minimal such that p^k M is p-integral."""
    k = -min(valuation(x, p) for r in M.rows for x in r if x != 0)
    return k, (M * Fraction(p) ** k).mod(p)


def local_distance(M: RatMat, p: int) -> int:
    """Distance from the standard vertex to the class of the row lattice of M."""
    d = M.denominator()
    D, _, _ = snf((M * d).to_ints())
    e = [valuation(D[i][i], p) for i in range(M.nrows)]
    return max(e) - min(e)


def first_step(M: RatMat, p: int):
    """Subspace of F_p^N giving the first vertex on the geodesic from the
    standard vertex to [row lattice of M]; ``None`` if that class is the
    standard vertex itself."""
    _, R = _scaled_mod_p(M, p)
    W = rref_mod_p(R, p)
    if len(W) == M.nrows:
        return None
    return W


def subspace_basis(W, p: int, N: int) -> RatMat:
    """A basis of the preimage of W in Z^N."""
    from .core_arith import hnf

    rows = [list(r) for r in W] + [[p * int(i == j) for j in range(N)] for i in range(N)]
    H, _ = hnf(rows)
    return RatMat(H)


@dataclass
class OrbitInfo:
    base: tuple
    transporters: dict
    schreier: list
    tail: Word
    kind: str  # "plus", "partner", "minus"
    edge_gen: str


@dataclass
class LocalData:
    p: int
    z: str
    ramified: bool = False
    orbits: list = field(default_factory=list)
    key_orbit: dict = field(default_factory=dict)
    lam: str | None = None  # ramified case: uniformizer generator
    _xcache: dict = field(default_factory=dict)

    def x_word(self, key) -> Word:
        o = self.key_orbit[key]
        return o.transporters[key].inverse() * o.tail


# ---------------------------------------------------------------------------
# levels


@dataclass
class GroupLevel:
    kind: object
    S: tuple
    generators: dict
    presentation: Presentation
    provenance: list
    parent: GroupLevel | None = None
    local: LocalData | None = None
    base_rewriter: object = None
    meta: dict = field(default_factory=dict)

    @property
    def kind_name(self) -> str:
        return self.kind.name

    def element(self, w: Word):
        return evaluate(w, self.generators, identity=self.kind.one())

    def rewrite(self, g) -> Word:
        return rewrite(self, g)


@dataclass
class StabilizerData:
    base: GroupLevel
    z: str
    z_image: object
    presentation: Presentation
    provenance: list


def _gen_elements(level: GroupLevel):
    return [(name, level.kind.mat(x)) for name, x in level.generators.items()]


def _check_unit(level: GroupLevel, g, S):
    kind = level.kind
    try:
        ginv = g.inverse()
    except ZeroDivisionError:
        raise ValueError("element is not invertible") from None
    for x in kind.coords_for_units(g) + kind.coords_for_units(ginv):
        d = Fraction(x).denominator
        for q in S:
            while d % q == 0:
                d //= q
        if d != 1:
            raise ValueError(f"element is not a unit of the order with primes {sorted(S)} inverted")


def vertex_stabilizer(level: GroupLevel, p: int) -> StabilizerData:
    """<level, z_p> with z_p = p*1 central; adds [z_p, g] for every generator g."""
    if p in level.S:
        raise ValueError(f"prime {p} is already in S = {level.S}")
    z = f"z{p}"
    zimg = level.kind.scalar(p)
    gens = dict(level.generators)
    gens[z] = zimg
    rels = list(level.presentation.relators)
    prov = list(level.provenance)
    zw = Word.gen(z)
    for name in level.generators:
        rels.append(commutator(zw, Word.gen(name)))
        prov.append({"source": "stabilizer:central", "prime": p, "generator": name})
    P = Presentation(tuple(gens), tuple(rels), gens)
    return StabilizerData(level, z, zimg, P, prov)


def strip_stabilizer(level: GroupLevel, p: int, h):
    """For h fixing the standard vertex at p: (a, residual) with h = z_p^a * residual."""
    kind = level.kind
    M = kind.mat(h)
    v = valuation(M.det(), p)
    if v % kind.dim:
        raise ValueError("determinant valuation is not divisible by the rank: h does not stabilize")
    a = v // kind.dim
    if local_distance(M, p):
        raise ValueError("element does not stabilize the standard vertex")
    return a, h * kind.scalar(Fraction(p) ** -a)


def _rewrite_stab(level: GroupLevel, p: int, z: str, h) -> Word:
    a, rest = strip_stabilizer(level, p, h)
    return Word.gen(z, a) * rewrite(level, rest)


# ---------------------------------------------------------------------------
# models: where the edge/triangle representatives come from


class MatrixModel:
    """Split building of GL_n at p with the diagonal transporters w_i."""

    def __init__(self, n: int, p: int):
        self.n, self.p, self.dim = n, p, n

    def neighbor_keys(self):
        keys = []
        for k in range(self.n - 1, 0, -1):
            keys.extend(enumerate_subspaces(self.n, k, self.p))
        return keys

    def _span_tail(self, i):
        n = self.n
        return tuple(tuple(int(c == r) for c in range(n)) for r in range(i, n))

    def edge_candidates(self, level, covered=None):
        n, p = self.n, self.p
        for i in range(1, n // 2 + 1):
            flag, witness = minus_type(n, i, p)
            g = witness if flag else transporter(n, p, i)
            key = rref_mod_p(_scaled_mod_p(g, p)[1], p)
            yield key, g, f"w{p}_{i}", {"type": i, "minus": flag}

    def triangles(self):
        out = []
        for i in range(2, self.n):
            for j in range(1, i):
                out.append((self._span_tail(j), self._span_tail(i), {"i": i, "j": j}))
        return out


def extend_level(level: GroupLevel, p: int, model=None) -> GroupLevel:
    """The S u {p} level: Brown generators and relations, all verified exactly."""
    if p in level.S:
        raise ValueError(f"prime {p} is already in S = {level.S}")
    kind = level.kind
    if model is None:
        if kind.name != "matrix":
            raise ValueError("a local model is required for non-matrix levels")
        model = MatrixModel(kind.n, p)
    N = kind.dim
    stab = vertex_stabilizer(level, p)
    z = stab.z
    gens = dict(stab.presentation.images)
    rels = list(stab.presentation.relators)
    prov = list(stab.provenance)

    act = subspace_action(p)
    acting = [(name, kind.mat(x).mod(p)) for name, x in level.generators.items()]
    all_keys = model.neighbor_keys()
    loc = LocalData(p=p, z=z)

    def key_of_lattice(M):
        if local_distance(M, p) != 1:
            raise EngineError("expected a neighbour of the standard vertex", prov)
        return first_step(M, p)

    # edge orbits -------------------------------------------------------------
    edges = []
    for key, lift, name, info in model.edge_candidates(level, loc.key_orbit):
        if key in loc.key_orbit:
            continue
        key = rref_mod_p(key, p)
        if first_step(kind.mat(lift), p) != key or local_distance(kind.mat(lift), p) != 1:
            raise EngineError(f"transporter {name} does not reach its neighbour", prov)
        trans, schreier = orbit_with_words(key, acting, act)
        partner = key_of_lattice(kind.mat(lift.inverse()))
        if partner in trans:
            g = level.element(trans[partner]) * lift
            if local_distance(kind.mat(g * g), p) != 0:
                raise EngineError(f"{name} does not reverse its edge", prov)
            gens[name] = g
            o = OrbitInfo(key, trans, schreier, Word.gen(name), "minus", name)
            loc.orbits.append(o)
            for k in trans:
                loc.key_orbit[k] = o
            edges.append(o)
        else:
            gens[name] = lift
            o = OrbitInfo(key, trans, schreier, Word.gen(name, -1), "plus", name)
            trans2, schreier2 = orbit_with_words(partner, acting, act)
            if set(trans2) & set(trans):
                raise EngineError("partner orbit overlaps the representative orbit", prov)
            o2 = OrbitInfo(partner, trans2, schreier2, Word.gen(name), "partner", name)
            loc.orbits.extend([o, o2])
            for k in trans:
                loc.key_orbit[k] = o
            for k in trans2:
                loc.key_orbit[k] = o2
            edges.append(o)
        log.debug("prime %s: edge %s (%s), orbit size %d", p, name, o.kind, len(trans))
    missing = [k for k in all_keys if k not in loc.key_orbit]
    if missing:
        raise EngineError(
            f"{len(missing)} neighbours of the standard vertex are not covered by the edge orbits",
            prov,
        )

    zi = Word.gen(z)
    zimg = gens[z]

    def stab_word(h):
        return _rewrite_stab(level, p, z, h)

    # edge relations ------------------------------------------------------------
    for o in edges:
        e = Word.gen(o.edge_gen)
        eimg = gens[o.edge_gen]
        einv = eimg.inverse()
        hs = [(None, zi, zimg)] + [
            (k, w, level.element(w)) for k, w in enumerate(o.schreier)
        ]
        for k, hw, himg in hs:
            if o.kind == "plus":
                lhs, val = e * hw * e.inverse(), eimg * himg * einv
            else:
                lhs, val = e * hw * e, eimg * himg * eimg
            try:
                rhs = stab_word(val)
            except ValueError as exc:
                raise EngineError(f"edge relation for {o.edge_gen} left Stab(v0): {exc}", prov)
            rels.append(lhs * rhs.inverse())
            prov.append(
                {
                    "source": f"edge:{o.kind}",
                    "prime": p,
                    "edge": o.edge_gen,
                    "schreier": k,
                }
            )
        if o.kind == "minus":
            rels.append(e * e * stab_word(eimg * eimg).inverse())
            prov.append({"source": "edge:minus-square", "prime": p, "edge": o.edge_gen})

    # x(u): word moving neighbour u back to v0
    images_so_far = dict(gens)

    def x_elem(key):
        c = loc._xcache.get(key)
        if c is None:
            c = loc._xcache[key] = evaluate(loc.x_word(key), images_so_far, identity=kind.one())
        return c

    # triangle relations ----------------------------------------------------------
    for a, b, info in model.triangles():
        a, b = rref_mod_p(a, p), rref_mod_p(b, p)
        w1 = loc.x_word(a)
        c = x_elem(a)
        Bb = subspace_basis(b, p, N)
        k2 = key_of_lattice(Bb * kind.mat(c))
        w2 = loc.x_word(k2)
        c = c * x_elem(k2)
        k3 = key_of_lattice(kind.mat(c))
        w3 = loc.x_word(k3)
        c = c * x_elem(k3)
        rels.append(w1 * w2 * w3 * stab_word(c).inverse())
        prov.append({"source": "triangle", "prime": p, **info})

    images = dict(gens)
    P = Presentation(tuple(images), tuple(rels), images)
    new = GroupLevel(
        kind=kind,
        S=level.S + (p,),
        generators=images,
        presentation=P,
        provenance=prov,
        parent=level,
        local=loc,
        meta=dict(level.meta),
    )
    loc._xcache.clear()
    bad = P.check_relators()
    if bad:
        raise EngineError(
            f"relators {[str(rels[k])[:60] for k in bad[:3]]} do not evaluate to the identity",
            [prov[k] for k in bad],
        )
    return new


def extend_ramified(level: GroupLevel, p: int, lam, name: str | None = None) -> GroupLevel:
    """Adjoin a prime whose local building is a single vertex.

    ``lam`` generates the maximal ideal above p and normalises the previous
    level; the new group is the previous level extended by <lam>.
    """
    if p in level.S:
        raise ValueError(f"prime {p} is already in S = {level.S}")
    kind = level.kind
    name = name or f"l{p}"
    gens = dict(level.generators)
    gens[name] = lam
    rels = list(level.presentation.relators)
    prov = list(level.provenance)
    L, Linv = Word.gen(name), Word.gen(name, -1)
    lam_inv = lam.inverse()
    for gname, x in level.generators.items():
        val = lam * x * lam_inv
        rels.append(L * Word.gen(gname) * Linv * rewrite(level, val).inverse())
        prov.append({"source": "ramified:conjugation", "prime": p, "generator": gname})
    P = Presentation(tuple(gens), tuple(rels), gens)
    loc = LocalData(p=p, z="", ramified=True, lam=name)
    new = GroupLevel(kind, level.S + (p,), gens, P, prov, parent=level, local=loc, meta=dict(level.meta))
    bad = P.check_relators()
    if bad:
        raise EngineError("ramified extension relators fail", [prov[k] for k in bad])
    return new


# ---------------------------------------------------------------------------
# constructive membership


def rewrite(level: GroupLevel, g) -> Word:
    """Word in the level's generators evaluating exactly to g."""
    if level.parent is None:
        return level.base_rewriter(g)
    _check_unit(level, g, level.S)
    loc = level.local
    kind = level.kind
    p = loc.p
    if loc.ramified:
        lam = level.generators[loc.lam]
        v = valuation(kind.mat(g).det(), p)
        e = valuation(kind.mat(lam).det(), p)
        if v % e:
            raise ValueError("valuation not a multiple of the uniformizer's")
        a = v // e
        rest = g * _power(lam, -a, kind)
        return rewrite(level.parent, rest) * Word.gen(loc.lam, a)
    h = g
    M = kind.mat(h)
    d = local_distance(M, p)
    steps = []
    while True:
        W = first_step(M, p)
        if W is None:
            break
        if W not in loc.key_orbit:
            raise EngineError(f"first geodesic step {W} is not a known neighbour")
        xw = loc.x_word(W)
        xe = loc._xcache.get(W)
        if xe is None:
            xe = loc._xcache[W] = level.element(xw)
        h = h * xe
        M = kind.mat(h)
        d2 = local_distance(M, p)
        if d2 != d - 1:
            raise EngineError(f"building distance went from {d} to {d2} (expected {d - 1})")
        d = d2
        steps.append(xw)
    a, rest = strip_stabilizer(level.parent, p, h)
    w = Word.gen(loc.z, a) * rewrite(level.parent, rest)
    for xw in reversed(steps):
        w = w * xw.inverse()
    return w


def _power(x, k, kind):
    out = kind.one()
    base = x if k >= 0 else x.inverse()
    for _ in range(abs(k)):
        out = out * base
    return out


# ---------------------------------------------------------------------------
# matrix groups


def matrix_base_level(n: int) -> GroupLevel:
    B = base_group(n)
    prov = [{"source": "base:GL_n(Z) table", "n": n} for _ in B.presentation.relators]
    return GroupLevel(
        kind=MatrixKind(n),
        S=(),
        generators=dict(B.generators),
        presentation=B.presentation,
        provenance=prov,
        base_rewriter=lambda g: rewrite_in_base(g, B),
        meta={"n": n},
    )


def matrix_level(n: int, primes) -> GroupLevel:
    level = matrix_base_level(n)
    for p in primes:
        level = extend_level(level, p)
    return level


# ---------------------------------------------------------------------------
# verification


def verify_level(level: GroupLevel, trusted: dict | None = None) -> dict:
    """Re-check a level. Returns a report with one entry per check.

    ``trusted`` holds the construction-time generator values (defaults to
    ``level.generators``); the presentation's attached images are compared
    against it, relators are evaluated with it and every presentation image
    is pushed through the rewriter and evaluated back.
    """
    trusted = dict(level.generators) if trusted is None else trusted
    P = level.presentation
    images = P.images
    one = level.kind.one()
    checks = []
    for g in P.generators:
        ok = g in trusted and images[g] == trusted[g]
        checks.append({"check": "image", "item": g, "ok": ok})
    cache = {}
    for k, r in enumerate(P.relators):
        try:
            ok = evaluate(r, trusted, identity=one, inverses=cache).is_identity()
        except (KeyError, ValueError):
            ok = False
        checks.append({"check": "relator", "item": k, "relator": str(r)[:200], "ok": ok})
    for g in P.generators:
        try:
            w = rewrite(level, images[g])
            ok = evaluate(w, images, identity=one) == images[g]
        except (ValueError, EngineError, KeyError):
            ok = False
        checks.append({"check": "roundtrip", "item": g, "ok": ok})
    inv = abelian_invariants(P)
    checks.append({"check": "abelian_invariants", "item": "presentation", "ok": True,
                   "value": [inv[0], inv[1]]})
    blame = [
        c["item"] for c in checks if not c["ok"] and c["check"] in ("image", "relator")
    ]
    return {
        "ok": all(c["ok"] for c in checks),
        "S": list(level.S),
        "kind": level.kind_name,
        "checks": checks,
        "failures": [c for c in checks if not c["ok"]],
        "blame": blame,
        "abelian_invariants": {"free_rank": inv[0], "torsion": inv[1]},
    }


# ---------------------------------------------------------------------------
# class-group bookkeeping for the multi-orbit case


def vertex_orbit_count(k: int, n: int):
    """(t, k/t): number of vertex orbits t = gcd(k, n) and the minimal
    translation exponent, for [p] of order k in the class group."""
    if k < 1 or n < 1:
        raise ValueError("need k >= 1 and n >= 1")
    t = gcd(k, n)
    return t, k // t


def steinitz_orbit_test(stL, stM, p_class, n: int, invariants) -> bool:
    """Whether stL and stM agree modulo <n * p_class> in prod Z/d_i."""
    inv = [int(d) for d in invariants]
    if any(d < 1 for d in inv):
        raise ValueError("invariant factors must be positive")
    vecs = [tuple(x) if isinstance(x, (tuple, list)) else (x,) for x in (stL, stM, p_class)]
    if any(len(v) != len(inv) for v in vecs):
        raise ValueError("element length does not match the group")
    a, b, c = ([int(t) % d for t, d in zip(v, inv)] for v in vecs)
    step = tuple(n * x % d for x, d in zip(c, inv))
    diff = tuple((x - y) % d for x, y, d in zip(a, b, inv))
    cur = tuple(0 for _ in inv)
    while True:
        if cur == diff:
            return True
        cur = tuple((x + y) % d for x, y, d in zip(cur, step, inv))
        if cur == tuple(0 for _ in inv):
            return False
