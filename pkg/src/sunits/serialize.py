"""JSON / plain-text / provenance serialization of computed levels."""

from __future__ import annotations

import dataclasses
import json
from fractions import Fraction

from .core_arith import RatMat, parse_rational, rational_str
from .engine import GroupLevel, matrix_level
from .fpgroup import Presentation, Word, abelian_invariants, simplify

FORMAT = "sunits-presentation/1"


def _image_out(level: GroupLevel, x):
    if level.kind_name == "matrix":
        return x.to_strings()
    return [rational_str(c) for c in x.c]


def level_to_dict(level: GroupLevel) -> dict:
    P = level.presentation
    inv = abelian_invariants(P)
    doc = {"format": FORMAT, "kind": level.kind_name}
    if level.kind_name == "matrix":
        doc["n"] = level.kind.n
    else:
        alg = level.kind.order.alg
        doc["algebra"] = {"a": rational_str(alg.a), "b": rational_str(alg.b)}
        doc["order_basis"] = level.kind.order.basis.to_strings()
    doc["S"] = list(level.S)
    doc["generators"] = [{"name": g, "image": _image_out(level, P.images[g])} for g in P.generators]
    doc["relators"] = [str(r) for r in P.relators]
    doc["provenance"] = [_jsonable(p) for p in level.provenance]
    doc["abelian_invariants"] = {"free_rank": inv[0], "torsion": inv[1]}
    return doc


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return rational_str(x)
    return x


def dumps(doc) -> str:
    return json.dumps(doc, indent=1, ensure_ascii=True) + "\n"


def build_level(kind: str, S, n: int | None = None, a=None, b=None) -> GroupLevel:
    if kind == "matrix":
        return matrix_level(n, S)
    if kind == "quaternion":
        from .quaternion import order_for, quat_s_presentation

        return quat_s_presentation(order_for(a, b), list(S))
    raise ValueError(f"unknown kind {kind!r}")


def level_from_dict(doc: dict):
    """Rebuild the level described by ``doc`` and attach the file's presentation.

    Returns ``(level, trusted)``: the level carries the generators, relators
    and images read from the file, while ``trusted`` holds the generator
    values recomputed from the configuration.
    """
    if doc.get("format") != FORMAT:
        raise ValueError(f"unsupported format {doc.get('format')!r}")
    kind = doc["kind"]
    S = [int(p) for p in doc["S"]]
    if kind == "matrix":
        ref = build_level("matrix", S, n=int(doc["n"]))
    else:
        alg = doc["algebra"]
        ref = build_level("quaternion", S, a=parse_rational(alg["a"]), b=parse_rational(alg["b"]))
    gens = [g["name"] for g in doc["generators"]]
    images = {}
    for g in doc["generators"]:
        if kind == "matrix":
            images[g["name"]] = RatMat.from_strings(g["image"])
        else:
            images[g["name"]] = ref.kind.order.alg.elt(parse_rational(c) for c in g["image"])
    rels = [Word.parse(r) for r in doc["relators"]]
    P = Presentation(tuple(gens), tuple(rels), images)
    level = dataclasses.replace(ref, presentation=P, generators=dict(ref.generators))
    return level, dict(ref.generators)


def load(path):
    with open(path) as fh:
        return level_from_dict(json.load(fh))


def presentation_text(level: GroupLevel, simplified: bool = False) -> str:
    P = level.presentation
    if simplified:
        P = simplify(P)
    head = [f"# kind: {level.kind_name}", f"# S: {','.join(map(str, level.S)) or '-'}"]
    if simplified:
        head.append("# simplified copy")
    return "\n".join(head) + "\n" + P.to_text()


def provenance_lines(level: GroupLevel) -> str:
    rels = level.presentation.relators
    out = []
    for k, (r, p) in enumerate(zip(rels, level.provenance)):
        out.append(json.dumps({"relator": k, "length": len(r.letters), **_jsonable(p)}, sort_keys=True))
    return "\n".join(out) + "\n"
