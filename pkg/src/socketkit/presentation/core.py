from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from ..errors import NotClosed, ParseError
from ..surface import CompactSurface
from ..word import Alphabet, Word, cyclic_reduce, is_identifier


@dataclass(frozen=True)
class FinitePresentation:
    """Generators plus relator words; relators are stored cyclically reduced."""

    alphabet: Alphabet
    relators: tuple[Word, ...]

    def __init__(self, alphabet: Alphabet | Iterable[str], relators: Iterable[Word] = ()):
        if not isinstance(alphabet, Alphabet):
            alphabet = Alphabet(alphabet)
        rels = []
        for r in relators:
            alphabet.check(r, "relator")
            rels.append(cyclic_reduce(r))
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "relators", tuple(rels))

    @property
    def generators(self) -> tuple[str, ...]:
        return self.alphabet.names

    def __str__(self) -> str:
        gens = ", ".join(self.generators)
        rels = ", ".join(str(r) or "1" for r in self.relators)
        return f"< {gens} | {rels} >"

    def to_text(self) -> str:
        lines = ["gens: " + " ".join(self.generators)]
        lines += [f"rel: {r}" for r in self.relators]
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {"generators": list(self.generators), "relators": [str(r) for r in self.relators]}


def free_presentation(names: Sequence[str]) -> FinitePresentation:
    return FinitePresentation(names, ())


def parse_presentation(text: str) -> FinitePresentation:
    """Parse the line format::

        # comment
        gens: a b z1
        rel: z1^3 a b a^-1 b^-1
    """
    gens: list[str] | None = None
    rels: list[Word] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        key, sep, rest = line.partition(":")
        key = key.strip()
        if not sep or key not in ("gens", "rel"):
            raise ParseError("expected 'gens:' or 'rel:'", lineno, len(raw) - len(raw.lstrip()) + 1)
        offset = line.index(":") + 1
        if key == "gens":
            if gens is not None:
                raise ParseError("duplicate 'gens:' line", lineno, 1)
            gens = rest.split()
            for name in gens:
                if not is_identifier(name):
                    raise ParseError(f"bad generator name {name!r}", lineno, offset + rest.index(name) + 1)
            if len(set(gens)) != len(gens):
                raise ParseError("duplicate generator name", lineno, offset + 1)
        else:
            if gens is None:
                raise ParseError("'rel:' before 'gens:'", lineno, 1)
            w = Word.parse(rest, line=lineno, column_offset=offset)
            for g, _ in w.syllables:
                if g not in gens:
                    raise ParseError(f"unknown generator {g!r} in relator", lineno, offset + rest.index(g) + 1)
            rels.append(w)
    if gens is None:
        raise ParseError("missing 'gens:' line", 1, 1)
    return FinitePresentation(gens, rels)


def presentation_from_json(data: dict | str) -> FinitePresentation:
    if isinstance(data, str):
        data = json.loads(data)
    try:
        gens = list(data["generators"])
        rel_texts = list(data.get("relators", []))
    except (KeyError, TypeError):
        raise ParseError("JSON presentation needs 'generators' and 'relators'") from None
    rels = [Word.parse(t) for t in rel_texts]
    try:
        return FinitePresentation(gens, rels)
    except (ValueError, KeyError) as exc:
        raise ParseError(str(exc)) from None


def surface_presentation(s: CompactSurface) -> FinitePresentation:
    """One-relator presentation of a closed surface group."""
    if s.boundary:
        raise NotClosed(f"surface has {s.boundary} boundary components")
    g = s.genus
    if s.orientable:
        names = [n for i in range(1, g + 1) for n in (f"a{i}", f"b{i}")]
        syl = []
        for i in range(1, g + 1):
            a, b = f"a{i}", f"b{i}"
            syl += [(a, 1), (b, 1), (a, -1), (b, -1)]
        return FinitePresentation(names, [Word(tuple(syl))])
    names = [f"a{i}" for i in range(1, g + 1)]
    return FinitePresentation(names, [Word(tuple((n, 2) for n in names))])
