"""Finite-index subgroups from explicit permutation actions.

Cosets are numbered ``0 .. degree-1`` with the subgroup itself at coset 0, and
generators act on the right: ``table.act(c, x)`` is the coset ``c x``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from math import gcd
from typing import Mapping, Sequence

from ..errors import NotTransitive, RelatorNotKilled, UnknownGenerator
from ..word import Alphabet, Word, _merge, cyclic_reduce
from .core import FinitePresentation


@dataclass(frozen=True)
class CosetTable:
    degree: int
    perms: Mapping[str, tuple[int, ...]]

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError("degree must be >= 1")
        perms = {}
        for g, p in self.perms.items():
            p = tuple(p)
            if sorted(p) != list(range(self.degree)):
                raise ValueError(f"action of {g!r} is not a permutation of {self.degree} cosets")
            perms[g] = p
        object.__setattr__(self, "perms", perms)
        object.__setattr__(self, "_inverse", {g: _invert_perm(p) for g, p in perms.items()})

    def act(self, coset: int, g: str, sign: int = 1) -> int:
        return self.perms[g][coset] if sign > 0 else self._inverse[g][coset]

    def act_word(self, coset: int, w: Word) -> int:
        for g, e in w.syllables:
            table = self.perms[g] if e > 0 else self._inverse[g]
            for _ in range(abs(e)):
                coset = table[coset]
        return coset

    def is_transitive(self) -> bool:
        return len(self._orbit(0)) == self.degree

    def _orbit(self, start: int) -> set[int]:
        seen = {start}
        queue = deque([start])
        while queue:
            c = queue.popleft()
            for g in self.perms:
                for d in (self.perms[g][c], self._inverse[g][c]):
                    if d not in seen:
                        seen.add(d)
                        queue.append(d)
        return seen


def _invert_perm(p: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def check_relators(p: FinitePresentation, t: CosetTable) -> None:
    """Raise RelatorNotKilled unless every relator fixes every coset."""
    for g in p.generators:
        if g not in t.perms:
            raise UnknownGenerator(g, "coset table has no action for it")
    for r in p.relators:
        for c in range(t.degree):
            d = t.act_word(c, r)
            if d != c:
                raise RelatorNotKilled(f"relator {r} sends coset {c} to {d}")


def coset_table_from_cyclic_hom(p: FinitePresentation, k: int, values: Mapping[str, int]) -> CosetTable:
    """Table of the kernel of ``G -> Z/k`` sending each generator to ``values[g]``."""
    if k < 2:
        raise ValueError("k must be >= 2")
    for g in values:
        if g not in p.alphabet:
            raise UnknownGenerator(g, "value given for a generator outside the presentation")
    vals = {g: values.get(g, 0) % k for g in p.generators}
    for r in p.relators:
        total = sum(e * vals[g] for g, e in r.syllables)
        if total % k:
            raise RelatorNotKilled(f"relator {r} maps to {total % k} mod {k}")
    if gcd(k, *vals.values()) != 1:
        raise NotTransitive(f"values generate a proper subgroup of Z/{k}; the index would not be {k}")
    perms = {g: tuple((c + v) % k for c in range(k)) for g, v in vals.items()}
    return CosetTable(k, perms)


def schreier_transversal(p: FinitePresentation, t: CosetTable) -> tuple[list[Word], set[tuple[int, str]]]:
    """BFS transversal from coset 0, generators in order, ``x`` before ``x^-1``.

    Returns the representative word of each coset and the set of tree edges,
    recorded as ``(coset, generator)`` pairs meaning the edge ``c -> c x``.
    """
    reps: list[Word | None] = [None] * t.degree
    reps[0] = Word()
    tree: set[tuple[int, str]] = set()
    queue = deque([0])
    while queue:
        c = queue.popleft()
        for g in p.generators:
            for sign in (1, -1):
                d = t.act(c, g, sign)
                if reps[d] is None:
                    reps[d] = reps[c] * Word.gen(g, sign)
                    tree.add((c, g) if sign > 0 else (d, g))
                    queue.append(d)
    if any(r is None for r in reps):
        raise NotTransitive("coset table is not transitive")
    return reps, tree


def schreier_generator_name(g: str, coset: int) -> str:
    return f"{g}_{coset}"


def reidemeister_schreier(p: FinitePresentation, t: CosetTable) -> FinitePresentation:
    """Presentation of the subgroup stabilising coset 0.

    Generators: one per (coset, generator) pair that is not a transversal tree
    edge, named ``<gen>_<coset>``. Relators: each relator rewritten from each
    coset, then freely and cyclically reduced; empty ones are dropped.
    """
    check_relators(p, t)
    _, tree = schreier_transversal(p, t)
    names: dict[tuple[int, str], str] = {}
    for c in range(t.degree):
        for g in p.generators:
            if (c, g) not in tree:
                names[(c, g)] = schreier_generator_name(g, c)
    if len(set(names.values())) != len(names):
        raise ValueError("Schreier generator names collide; rename the input generators")
    relators = []
    for r in p.relators:
        for c in range(t.degree):
            out = []
            d = c
            for g, s in r.letters():
                if s > 0:
                    name = names.get((d, g))
                    if name is not None:
                        out.append((name, 1))
                    d = t.act(d, g, 1)
                else:
                    d = t.act(d, g, -1)
                    name = names.get((d, g))
                    if name is not None:
                        out.append((name, -1))
            w = cyclic_reduce(Word(_merge(out)))
            if w.syllables:
                relators.append(w)
    return FinitePresentation(Alphabet(names.values()), relators)
