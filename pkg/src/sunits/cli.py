"""Command-line interface: ``sunits <verb> ...``.

Exit status 0 on success, 2 for invalid configuration, 1 when a computation
fails (a JSON diagnostic is written to stderr).
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .core_arith import is_prime, parse_rational
from .engine import EngineError, rewrite, verify_level
from .fpgroup import abelian_invariants
from .serialize import (
    build_level,
    dumps,
    level_to_dict,
    load,
    presentation_text,
    provenance_lines,
)

log = logging.getLogger("sunits")


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    algebra: str = "matrix"
    n: int | None = None
    a: object = None
    b: object = None
    primes: list = field(default_factory=list)
    seed: int = 0

    def validate(self):
        if len(set(self.primes)) != len(self.primes):
            raise UsageError("primes must be distinct")
        for p in self.primes:
            if not is_prime(p):
                raise UsageError(f"{p} is not prime")
        if self.algebra == "matrix":
            if self.n not in (2, 3, 4):
                raise UsageError("--n must be 2, 3 or 4 for the matrix algebra")
        elif self.algebra == "quaternion":
            if self.a is None or self.b is None:
                raise UsageError("--a and --b are required for the quaternion algebra")
            if not (self.a < 0 and self.b < 0):
                raise UsageError("only definite algebras (a, b < 0) are supported")
            if self.a.denominator != 1 or self.b.denominator != 1:
                raise UsageError("--a and --b must be integers")
        else:
            raise UsageError(f"unknown algebra {self.algebra!r}")
        return self


def _primes(text: str) -> list:
    if not text.strip():
        return []
    try:
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad prime list {text!r}") from None


def _rational(text: str):
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad rational {text!r}") from None


def _emit(obj):
    sys.stdout.write(dumps(obj))


def _self_check(level, seed: int, trials: int) -> int:
    rnd = random.Random(seed)
    names = list(level.generators)
    for _ in range(trials):
        g = level.kind.one()
        for _ in range(12):
            x = level.generators[rnd.choice(names)]
            g = g * (x if rnd.random() < 0.5 else x.inverse())
        if level.element(rewrite(level, g)) != g:
            raise EngineError("rewrite round trip failed")
    return trials


# ---------------------------------------------------------------------------
# verbs


def cmd_present(args):
    cfg = RunConfig(args.algebra, args.n, args.a, args.b, args.primes, args.seed).validate()
    level = build_level(cfg.algebra, cfg.primes, n=cfg.n, a=cfg.a, b=cfg.b)
    report = verify_level(level)
    if not report["ok"]:
        raise EngineError("freshly built level failed verification", report["failures"])
    trials = _self_check(level, cfg.seed, args.checks)
    out = Path(args.out)
    out.write_text(dumps(level_to_dict(level)))
    txt = out.with_suffix(".txt")
    txt.write_text(presentation_text(level, simplified=args.simplify))
    prov = out.with_suffix(".provenance.jsonl")
    prov.write_text(provenance_lines(level))
    P = level.presentation
    _emit(
        {
            "out": str(out),
            "text": str(txt),
            "provenance": str(prov),
            "S": list(level.S),
            "generators": list(P.generators),
            "relators": len(P.relators),
            "verify_ok": report["ok"],
            "roundtrip_trials": trials,
            "abelian_invariants": report["abelian_invariants"],
        }
    )
    return 0


def cmd_verify(args):
    level, trusted = load(args.file)
    report = verify_level(level, trusted)
    _emit(report if args.full else {k: v for k, v in report.items() if k != "checks"})
    return 0 if report["ok"] else 1


def cmd_abelianize(args):
    level, _ = load(args.file)
    r, tors = abelian_invariants(level.presentation)
    _emit({"S": list(level.S), "free_rank": r, "torsion": tors})
    return 0


def cmd_probe(args):
    from .congruence_lab import congruence_probe

    level, _ = load(args.file)
    try:
        report = congruence_probe(level, args.mod)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(report)
    return 0 if report.get("relators_hold") else 1


def cmd_lowindex(args):
    from .congruence_lab import normal_scan

    if args.max > 15:
        raise UsageError("--max is capped at 15")
    level, _ = load(args.file)
    report = normal_scan(
        level,
        args.max,
        args.predicted,
        projective=not args.full_group,
        moduli=args.moduli or None,
    )
    if args.figure:
        from .plotting import plot_normal_scan

        plot_normal_scan(report, args.figure)
        report["figure"] = args.figure
    _emit(report)
    return 0


def cmd_building(args):
    from .building import sphere_sizes, vertex_degree

    if args.n < 2 or not is_prime(args.p) or args.depth < 0:
        raise UsageError("need n >= 2, p prime and depth >= 0")
    sizes, revisits = sphere_sizes(args.n, args.p, args.depth)
    deg = vertex_degree(args.n, args.p)
    report = {
        "n": args.n,
        "p": args.p,
        "depth": args.depth,
        "degree": deg,
        "sphere_sizes": sizes,
        "revisits": revisits,
    }
    if args.figure:
        from .plotting import plot_sphere_sizes

        plot_sphere_sizes(sizes, args.n, args.p, args.figure, degree=deg)
        report["figure"] = args.figure
    _emit(report)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sunits", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("present", help="build a presentation and write JSON/text/provenance")
    p.add_argument("--algebra", choices=["matrix", "quaternion"], default="matrix")
    p.add_argument("--n", type=int)
    p.add_argument("--a", type=_rational)
    p.add_argument("--b", type=_rational)
    p.add_argument("--primes", type=_primes, default=[])
    p.add_argument("--out", required=True)
    p.add_argument("--simplify", action="store_true", help="simplify the plain-text copy")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--checks", type=int, default=20, help="seeded rewrite round trips")
    p.set_defaults(func=cmd_present)

    p = sub.add_parser("verify", help="re-check a presentation file")
    p.add_argument("file")
    p.add_argument("--full", action="store_true", help="list every check")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("abelianize", help="abelian invariants of a presentation file")
    p.add_argument("file")
    p.set_defaults(func=cmd_abelianize)

    p = sub.add_parser("probe", help="congruence image modulo q")
    p.add_argument("--mod", type=int, required=True)
    p.add_argument("file")
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("lowindex", help="normal subgroups of small index")
    p.add_argument("--max", type=int, required=True)
    p.add_argument("--predicted", type=_primes, default=[2, 3])
    p.add_argument("--moduli", type=_primes, default=[])
    p.add_argument("--full-group", action="store_true", help="do not kill central scalars")
    p.add_argument("--figure")
    p.add_argument("file")
    p.set_defaults(func=cmd_lowindex)

    p = sub.add_parser("building", help="sphere sizes in the building")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--figure")
    p.set_defaults(func=cmd_building)
    return ap


def _fail(status, kind, exc, extra=None):
    diag = {"error": kind, "message": str(exc)}
    if extra:
        diag["provenance"] = extra
    sys.stderr.write(json.dumps(diag, indent=1, default=str) + "\n")
    return status


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except UsageError as exc:
        return _fail(2, "usage", exc)
    except EngineError as exc:
        return _fail(1, "computation", exc, exc.provenance[-20:])
    except (ArithmeticError, ValueError, KeyError, OSError, RuntimeError) as exc:
        return _fail(1, "computation", exc)


if __name__ == "__main__":
    sys.exit(main())
