"""Finite presentations, abelianization and conservative Tietze simplification."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..core_arith import snf
from .words import Word, evaluate, valid_name


@dataclass(frozen=True)
class Presentation:
    generators: tuple
    relators: tuple
    images: dict | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "relators", tuple(self.relators))
        gens = set(self.generators)
        if len(gens) != len(self.generators):
            raise ValueError("duplicate generator names")
        for g in self.generators:
            if not valid_name(g):
                raise ValueError(f"invalid generator name {g!r}")
        for r in self.relators:
            extra = r.names() - gens
            if extra:
                raise ValueError(f"relator {r} uses undeclared generators {sorted(extra)}")
        if self.images is not None:
            if set(self.images) != gens:
                raise ValueError("images must be given for exactly the declared generators")

    def with_relators(self, extra) -> Presentation:
        return Presentation(self.generators, self.relators + tuple(extra), self.images)

    def check_relators(self):
        """Names of relators (by index) that do not evaluate to the identity."""
        if self.images is None:
            raise ValueError("presentation has no images")
        bad = []
        cache = {}
        for k, r in enumerate(self.relators):
            if not _is_one(evaluate(r, self.images, inverses=cache)):
                bad.append(k)
        return bad

    # -- plain text --------------------------------------------------------

    def to_text(self) -> str:
        lines = ["gens: " + ", ".join(self.generators)]
        lines.extend(str(r) for r in self.relators)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> Presentation:
        gens = None
        rels = []
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("gens:"):
                body = line[len("gens:") :].strip()
                gens = [g.strip() for g in body.split(",") if g.strip()]
                continue
            if gens is None:
                raise ValueError("the 'gens:' line must come first")
            rels.append(Word.parse(line))
        if gens is None:
            raise ValueError("missing 'gens:' line")
        return cls(tuple(gens), tuple(rels))


def _is_one(x) -> bool:
    return x.is_identity()


def exponent_matrix(P: Presentation) -> list:
    idx = {g: i for i, g in enumerate(P.generators)}
    rows = []
    for r in P.relators:
        row = [0] * len(P.generators)
        for g, e in r.letters:
            row[idx[g]] += e
        rows.append(row)
    return rows


def abelian_invariants(P: Presentation):
    """``(free_rank, [d_1, d_2, ...])`` of the abelianized group, each d_i > 1."""
    n = len(P.generators)
    rows = [r for r in exponent_matrix(P) if any(r)]
    if not rows:
        return n, []
    D, _, _ = snf(rows)
    diag = [D[i][i] for i in range(min(len(D), n))]
    rank = sum(1 for d in diag if d)
    return n - rank, [d for d in diag if d > 1]


def _definition(r: Word, generators):
    """If r reads g^{+-1} or g^{+-1} h^{+-1} (g != h), eliminate the later generator."""
    letters = r.letters
    if len(letters) == 1:
        (g, _), = letters
        return g, Word()
    if len(letters) == 2 and letters[0][0] != letters[1][0]:
        (g, e), (h, f) = letters
        if generators.index(g) < generators.index(h):
            (g, e), (h, f) = (h, f), (g, e)
        # g^e h^f = 1  (cyclically: h^f g^e = 1 too)  =>  g = h^(-f*e)
        return g, Word([(h, -f * e)])
    return None


def simplify(P: Presentation) -> Presentation:
    """Conservative Tietze moves: free reduction, dropping trivial and repeated
    relators, and eliminating generators defined by one-letter relations."""
    before = abelian_invariants(P)
    gens = list(P.generators)
    rels = [r.reduced() for r in P.relators]
    images = dict(P.images) if P.images is not None else None
    while True:
        rels = _dedupe(rels)
        for r in rels:
            d = _definition(r, gens)
            if d is not None:
                break
        else:
            break
        g, w = d
        if images is not None:
            rest = {k: v for k, v in images.items() if k != g}
            val = evaluate(w, rest, identity=_one_like(images[g]))
            if val != images[g]:
                raise ValueError(f"relator {r} does not hold for the attached images")
            images = rest
        gens.remove(g)
        rels = [x.substitute({g: w}).reduced() for x in rels if x is not r]
    out = Presentation(tuple(gens), tuple(rels), images)
    after = abelian_invariants(out)
    if after != before:
        raise AssertionError(f"simplify changed abelian invariants: {before} -> {after}")
    return out


def _one_like(x):
    if hasattr(x, "one"):
        return x.one()
    from ..core_arith import RatMat

    return RatMat.identity(x.nrows)


def _dedupe(rels):
    out, seen = [], set()
    for r in rels:
        if not r.letters:
            continue
        key = r.letters
        if key in seen or r.inverse().letters in seen:
            continue
        seen.add(key)
        out.append(r)
    return out
