from __future__ import annotations

from ..errors import UnknownGenerator, UnsupportedSurface
from ..surface import CompactSurface, format_surface
from ..word import Word
from .core import surface_presentation

Letter = tuple[str, int]


def _free_cyclic_reduce(letters: list[Letter]) -> list[Letter]:
    out: list[Letter] = []
    for x in letters:
        if out and out[-1][0] == x[0] and out[-1][1] == -x[1]:
            out.pop()
        else:
            out.append(x)
    i, j = 0, len(out) - 1
    while i < j and out[i][0] == out[j][0] and out[i][1] == -out[j][1]:
        i += 1
        j -= 1
    return out[i : j + 1]


def _inverse(letters: list[Letter]) -> list[Letter]:
    return [(g, -s) for g, s in reversed(letters)]


class DehnSolver:
    """Dehn's algorithm for ``pi_1`` of a closed orientable surface of genus >= 2.

    The relator ``[a1,b1]...[ag,bg]`` contains every letter exactly once, so
    each letter starts exactly one cyclic rotation of the relator and one of
    its inverse; candidate matches are looked up by first letter.
    """

    def __init__(self, surface: CompactSurface):
        if not surface.orientable or surface.boundary or surface.genus < 2:
            raise UnsupportedSurface(
                f"Dehn solver needs a closed orientable surface of genus >= 2, got {format_surface(surface)}"
            )
        self.surface = surface
        pres = surface_presentation(surface)
        self.generators = set(pres.generators)
        rel = list(pres.relators[0].letters())
        self.length = len(rel)
        self._rotations: dict[Letter, list[list[Letter]]] = {}
        for word in (rel, _inverse(rel)):
            for i in range(len(word)):
                rot = word[i:] + word[:i]
                self._rotations.setdefault(rot[0], []).append(rot)

    def _shorten(self, w: list[Letter]) -> list[Letter] | None:
        n = len(w)
        half = self.length // 2
        for i in range(n):
            for rot in self._rotations.get(w[i], ()):
                m = 0
                limit = min(self.length, n)
                while m < limit and w[(i + m) % n] == rot[m]:
                    m += 1
                if m > half:
                    rest = _inverse(rot[m:])
                    rotated = w[i:] + w[:i]
                    return rest + rotated[m:]
        return None

    def is_trivial(self, w: Word) -> bool:
        for g in w.generators():
            if g not in self.generators:
                raise UnknownGenerator(g, "not a surface generator")
        letters = _free_cyclic_reduce(list(w.letters()))
        while letters:
            shorter = self._shorten(letters)
            if shorter is None:
                return False
            letters = _free_cyclic_reduce(shorter)
        return True


def dehn_is_trivial(s: CompactSurface, w: Word) -> bool:
    return DehnSolver(s).is_trivial(w)
