"""Free-group words over named generators."""

from __future__ import annotations

import re

_NAME = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
_TOKEN = re.compile(r"\s*([A-Za-z][A-Za-z0-9_]*)\s*(?:\^\s*(-?\d+))?\s*")


class Word:
    """A sequence of letters ``(name, +1|-1)``.

    Words are not reduced on construction (relators keep their original
    spelling); ``reduced()`` gives the freely reduced form.
    """

    __slots__ = ("letters",)

    def __init__(self, letters=()):
        self.letters = tuple(letters)

    @classmethod
    def gen(cls, name: str, power: int = 1) -> Word:
        e = 1 if power > 0 else -1
        return cls(((name, e),) * abs(power))

    @classmethod
    def parse(cls, text: str) -> Word:
        text = text.strip()
        if text in ("", "1", "()"):
            return cls()
        letters = []
        for part in text.split("*"):
            m = _TOKEN.fullmatch(part)
            if not m:
                raise ValueError(f"cannot parse word factor {part!r}")
            name, power = m.group(1), int(m.group(2) or 1)
            letters.extend(cls.gen(name, power).letters)
        return cls(letters)

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __eq__(self, other):
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self):
        return hash(self.letters)

    def __mul__(self, other: Word) -> Word:
        return Word(self.letters + other.letters)

    def __pow__(self, k: int) -> Word:
        base = self if k >= 0 else self.inverse()
        return Word(base.letters * abs(k))

    def inverse(self) -> Word:
        return Word((g, -e) for g, e in reversed(self.letters))

    def reduced(self) -> Word:
        out = []
        for g, e in self.letters:
            if out and out[-1][0] == g and out[-1][1] == -e:
                out.pop()
            else:
                out.append((g, e))
        return Word(out)

    def cyclically_reduced(self) -> Word:
        w = list(self.reduced().letters)
        i, j = 0, len(w) - 1
        while i < j and w[i][0] == w[j][0] and w[i][1] == -w[j][1]:
            i += 1
            j -= 1
        return Word(w[i : j + 1])

    def names(self) -> set:
        return {g for g, _ in self.letters}

    def exponent_sum(self, name: str) -> int:
        return sum(e for g, e in self.letters if g == name)

    def substitute(self, mapping: dict) -> Word:
        out = []
        for g, e in self.letters:
            if g in mapping:
                w = mapping[g]
                out.extend(w.letters if e > 0 else w.inverse().letters)
            else:
                out.append((g, e))
        return Word(out)

    def __str__(self):
        if not self.letters:
            return "1"
        parts = []
        i = 0
        L = self.letters
        while i < len(L):
            j = i
            while j < len(L) and L[j] == L[i]:
                j += 1
            g, e = L[i]
            k = (j - i) * e
            parts.append(g if k == 1 else f"{g}^{k}")
            i = j
        return "*".join(parts)

    def __repr__(self):
        return f"Word({str(self)!r})"


def valid_name(name: str) -> bool:
    return bool(_NAME.match(name))


def commutator(a: Word, b: Word) -> Word:
    """[a, b] = a b a^-1 b^-1."""
    return a * b * a.inverse() * b.inverse()


def evaluate(w: Word, images: dict, identity=None, inverses: dict | None = None):
    """Exact product of the images of the letters of ``w``, left to right.

    ``images`` maps names to group elements supporting ``*`` and
    ``inverse()``. For the empty word ``identity`` is returned; if it is
    not given it is derived from any image.
    """
    if identity is None:
        if not images:
            raise ValueError("no images to derive the identity from")
        sample = next(iter(images.values()))
        identity = _identity_like(sample)
    inverses = {} if inverses is None else inverses
    acc = identity
    for g, e in w.letters:
        if g not in images:
            raise KeyError(f"no image for generator {g!r}")
        if e > 0:
            x = images[g]
        else:
            x = inverses.get(g)
            if x is None:
                try:
                    x = images[g].inverse()
                except ZeroDivisionError:
                    raise ValueError(f"image of {g!r} is not invertible") from None
                inverses[g] = x
        acc = acc * x
    return acc


def _identity_like(x):
    if hasattr(x, "one"):
        return x.one()
    from ..core_arith import RatMat

    return RatMat.identity(x.nrows)
