"""Free-group words in syllable form.

A :class:`Word` is an immutable sequence of syllables ``(generator, exponent)``
with nonzero exponents. Words built by :meth:`Word.parse` keep the syllables as
written; :func:`reduce` produces the freely reduced normal form, in which
adjacent syllables always carry distinct generators. Group operations
(``*``, :func:`invert`, :func:`conjugate`, ...) return reduced words.

Text grammar: whitespace-separated tokens ``IDENT`` or ``IDENT^SIGNED_INT``;
the empty string is the identity.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import ParseError, UnknownGenerator

Syllable = tuple[str, int]

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_TOKEN = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)(?:\^([+-]?[0-9]+))?\Z")


def is_identifier(name: str) -> bool:
    return bool(_IDENT.match(name))


def _merge(syllables: Iterable[Syllable]) -> tuple[Syllable, ...]:
    # single stack pass; cancelled syllables expose the previous one for merging
    gens: list[str] = []
    exps: list[int] = []
    for g, e in syllables:
        if gens and gens[-1] == g:
            t = exps[-1] + e
            if t:
                exps[-1] = t
            else:
                gens.pop()
                exps.pop()
        elif e:
            gens.append(g)
            exps.append(e)
    return tuple(zip(gens, exps))


@dataclass(frozen=True)
class Word:
    syllables: tuple[Syllable, ...] = ()

    def __post_init__(self):
        for g, e in self.syllables:
            if e == 0:
                raise ValueError(f"zero exponent on generator {g!r}")

    @classmethod
    def parse(cls, text: str, *, line: int | None = None, column_offset: int = 0) -> Word:
        """Parse the word text grammar, keeping syllables as written."""
        syllables = []
        for m in re.finditer(r"\S+", text):
            tok = _TOKEN.match(m.group())
            col = m.start() + 1 + column_offset
            if tok is None:
                raise ParseError(f"bad word token {m.group()!r}", line, col)
            exp = int(tok.group(2)) if tok.group(2) is not None else 1
            if exp == 0:
                raise ParseError(f"zero exponent in token {m.group()!r}", line, col)
            syllables.append((tok.group(1), exp))
        return cls(tuple(syllables))

    @classmethod
    def gen(cls, name: str, exponent: int = 1) -> Word:
        return cls(((name, exponent),)) if exponent else cls()

    @classmethod
    def from_letters(cls, letters: Iterable[Syllable]) -> Word:
        return cls(_merge(letters))

    def __str__(self) -> str:
        return " ".join(g if e == 1 else f"{g}^{e}" for g, e in self.syllables)

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"

    def __len__(self) -> int:
        return sum(abs(e) for _, e in self.syllables)

    def __bool__(self) -> bool:
        return bool(self.syllables)

    def __mul__(self, other: Word) -> Word:
        return Word(_merge(self.syllables + other.syllables))

    def __pow__(self, n: int) -> Word:
        if n < 0:
            return invert(self) ** -n
        w = reduce(self)
        out = Word()
        for _ in range(n):
            out = out * w
        return out

    def is_identity(self) -> bool:
        return not reduce(self).syllables

    def is_reduced(self) -> bool:
        return _merge(self.syllables) == self.syllables

    def letters(self) -> Iterator[Syllable]:
        """Expand to single letters ``(generator, ±1)``."""
        for g, e in self.syllables:
            s = 1 if e > 0 else -1
            for _ in range(abs(e)):
                yield (g, s)

    def generators(self) -> set[str]:
        return {g for g, _ in self.syllables}

    def exponent_sum(self, name: str) -> int:
        return sum(e for g, e in self.syllables if g == name)


IDENTITY = Word()


@dataclass(frozen=True)
class Alphabet:
    """Ordered generator names; the position of a name is its index."""

    names: tuple[str, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        for n in names:
            if not is_identifier(n):
                raise ValueError(f"invalid generator name {n!r}")
        if len(set(names)) != len(names):
            raise ValueError("generator names must be distinct")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(names)})

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self) -> Iterator[str]:
        return iter(self.names)

    def __contains__(self, name: object) -> bool:
        return name in self._index

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownGenerator(name) from None

    def check(self, w: Word, context: str = "") -> None:
        for g, _ in w.syllables:
            if g not in self._index:
                raise UnknownGenerator(g, context)

    def __add__(self, other: Alphabet | Sequence[str]) -> Alphabet:
        extra = other.names if isinstance(other, Alphabet) else tuple(other)
        return Alphabet(self.names + tuple(n for n in extra if n not in self._index))


@dataclass(frozen=True)
class Substitution:
    """A homomorphism between free groups given by generator images."""

    source: Alphabet
    target: Alphabet
    images: Mapping[str, Word]

    def __post_init__(self):
        if set(self.images) != set(self.source.names):
            missing = set(self.source.names) - set(self.images)
            extra = set(self.images) - set(self.source.names)
            raise ValueError(f"images must cover the source exactly (missing {sorted(missing)}, extra {sorted(extra)})")
        for name, w in self.images.items():
            self.target.check(w, f"image of {name}")
        object.__setattr__(self, "images", {n: reduce(self.images[n]) for n in self.source.names})

    @classmethod
    def identity(cls, alphabet: Alphabet) -> Substitution:
        return cls(alphabet, alphabet, {n: Word.gen(n) for n in alphabet})

    def __call__(self, w: Word) -> Word:
        return apply(self, w)

    def __str__(self) -> str:
        return ", ".join(f"{n} -> {self.images[n] or '1'}" for n in self.source)


@dataclass(frozen=True)
class VerificationReport:
    residual: Word
    trivial: bool


def reduce(w: Word) -> Word:
    return Word(_merge(w.syllables))


def invert(w: Word) -> Word:
    return Word(tuple((g, -e) for g, e in reversed(w.syllables)))


def conjugate(w: Word, g: Word) -> Word:
    """Return the reduced form of ``g w g^-1``."""
    return Word(_merge(g.syllables + w.syllables + invert(g).syllables))


def commutator(u: Word, v: Word) -> Word:
    """Return the reduced form of ``u v u^-1 v^-1``."""
    return Word(_merge(u.syllables + v.syllables + invert(u).syllables + invert(v).syllables))


def apply(s: Substitution, w: Word) -> Word:
    images = s.images
    inverses: dict[str, tuple[Syllable, ...]] = {}
    out: list[Syllable] = []
    for g, e in w.syllables:
        img = images.get(g)
        if img is None:
            raise UnknownGenerator(g, "not in substitution source")
        if e > 0:
            out.extend(img.syllables * e)
        else:
            piece = inverses.get(g)
            if piece is None:
                piece = inverses[g] = invert(img).syllables
            out.extend(piece * -e)
    return Word(_merge(out))


def verify_identity(s: Substitution, lhs: Word, rhs: Word) -> VerificationReport:
    """Check ``s(lhs) = s(rhs)`` in the free group on ``s.target``.

    A trivial residual means the identity holds freely, hence in every
    quotient of the target group as well.
    """
    residual = apply(s, Word(lhs.syllables + invert(rhs).syllables))
    return VerificationReport(residual=residual, trivial=not residual.syllables)


def cyclic_reduce(w: Word) -> Word:
    syl = list(_merge(w.syllables))
    while len(syl) >= 2 and syl[0][0] == syl[-1][0]:
        g = syl[0][0]
        e = syl[0][1] + syl[-1][1]
        inner = syl[1:-1]
        syl = ([(g, e)] if e else []) + inner
        syl = list(_merge(syl))
    return Word(tuple(syl))


def generates_cyclic(words: Sequence[Word]) -> bool:
    # In a free group, nontrivial elements commute iff they share a root, and
    # commuting is transitive on nontrivial elements, so pairwise commutation
    # of the generators is equivalent to the subgroup being cyclic.
    nontrivial = [reduce(w) for w in words]
    nontrivial = [w for w in nontrivial if w.syllables]
    return all(not commutator(u, v).syllables for u, v in combinations(nontrivial, 2))


def is_conjugate(u: Word, v: Word) -> bool:
    a = list(cyclic_reduce(u).letters())
    b = list(cyclic_reduce(v).letters())
    if len(a) != len(b):
        return False
    if not a:
        return True
    n = len(a)
    return any(a[i:] + a[:i] == b for i in range(n) if a[i] == b[0])


def parse_words(texts: Iterable[str]) -> list[Word]:
    return [Word.parse(t) for t in texts]
