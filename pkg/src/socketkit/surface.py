"""Compact surfaces: Euler characteristic, exceptional surfaces, covers.

Non-orientable genus is the crosscap number, so that
``chi = 2 - g - b`` for non-orientable and ``chi = 2 - 2g - b`` for orientable
surfaces.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from .errors import (
    AlreadyOrientable,
    InconsistentLift,
    NonIntegralGenus,
    NotHyperbolicSurface,
    ParseError,
)


@dataclass(frozen=True, order=True)
class CompactSurface:
    orientable: bool
    genus: int
    boundary: int

    def __post_init__(self):
        if self.genus < 0 or self.boundary < 0:
            raise ValueError("genus and boundary count must be non-negative")
        if not self.orientable and self.genus < 1:
            raise ValueError("a non-orientable surface has genus >= 1")

    @property
    def euler_characteristic(self) -> int:
        return euler_characteristic(self)

    @property
    def is_closed(self) -> bool:
        return self.boundary == 0

    def __str__(self) -> str:
        return format_surface(self)


def orientable(genus: int, boundary: int = 0) -> CompactSurface:
    return CompactSurface(True, genus, boundary)


def nonorientable(genus: int, boundary: int = 0) -> CompactSurface:
    return CompactSurface(False, genus, boundary)


_SURFACE_RE = re.compile(r"\s*S\(\s*(or|nor)\s*,\s*g\s*=\s*(\d+)\s*,\s*b\s*=\s*(\d+)\s*\)\s*\Z")


def parse_surface(text: str) -> CompactSurface:
    """Parse ``S(or,g=2,b=1)`` / ``S(nor,g=3,b=0)``."""
    m = _SURFACE_RE.match(text)
    if m is None:
        raise ParseError(f"bad surface {text!r}; expected S(or|nor,g=<int>,b=<int>)", column=1)
    try:
        return CompactSurface(m.group(1) == "or", int(m.group(2)), int(m.group(3)))
    except ValueError as exc:
        raise ParseError(str(exc), column=1) from None


def format_surface(s: CompactSurface) -> str:
    return f"S({'or' if s.orientable else 'nor'},g={s.genus},b={s.boundary})"


def euler_characteristic(s: CompactSurface) -> int:
    if s.orientable:
        return 2 - 2 * s.genus - s.boundary
    return 2 - s.genus - s.boundary


def _require_hyperbolic(s: CompactSurface) -> None:
    if euler_characteristic(s) >= 0:
        raise NotHyperbolicSurface(f"{format_surface(s)} has chi >= 0 (abelian fundamental group)")


_EXCEPTIONAL = {
    CompactSurface(True, 0, 3),  # pair of pants
    CompactSurface(False, 1, 2),  # twice-punctured projective plane
    CompactSurface(False, 2, 1),  # once-punctured Klein bottle
    CompactSurface(False, 3, 0),
}


def is_exceptional(s: CompactSurface) -> bool:
    """True for the chi = -1 surfaces without pseudo-Anosov maps.

    The once-punctured torus also has chi = -1 but is not exceptional.
    """
    _require_hyperbolic(s)
    return s in _EXCEPTIONAL


def curve_family_bound(s: CompactSurface, *, exact_closed: bool = True) -> int:
    """Upper bound on a family of disjoint, pairwise non-parallel, essential
    two-sided curves (boundary-parallel curves allowed).

    Returns ``3g + 2b``. Cutting along such a family leaves ``|chi|`` pieces of
    negative Euler characteristic (each with at most three boundary curves),
    plus annuli at the boundary and at most ``g`` Moebius bands, which gives at
    most ``(3|chi| + g + b) / 2`` curves; ``3g + 2b`` dominates that for both
    orientabilities. For closed orientable genus >= 2 the exact maximum
    ``3g - 3`` is returned unless ``exact_closed`` is false.
    """
    _require_hyperbolic(s)
    if exact_closed and s.orientable and s.boundary == 0:
        return 3 * s.genus - 3
    return 3 * s.genus + 2 * s.boundary


def mino_conditions(genus: int, b: int, n: int, n1: int) -> bool:
    """Necessary conditions ``g >= n1`` and ``g + b >= 2n`` for a boundary-respecting
    non-isomorphism from the surface group into a star-shaped graph of groups
    with ``n`` outer vertices, ``n1`` of them of valence 1.
    """
    if n < 1 or not 0 <= n1 <= n or b < 0:
        raise ValueError("need n >= 1, 0 <= n1 <= n, b >= 0")
    return genus >= n1 and genus + b >= 2 * n


@dataclass(frozen=True)
class BoundaryLift:
    """For each base boundary component, the ``(cover component, local degree)``
    pairs lying over it."""

    components: tuple[tuple[tuple[int, int], ...], ...]

    def __init__(self, components: Sequence[Sequence[tuple[int, int]]]):
        object.__setattr__(self, "components", tuple(tuple((int(i), int(d)) for i, d in c) for c in components))

    @property
    def cover_boundary_count(self) -> int:
        return sum(len(c) for c in self.components)

    @classmethod
    def trivial(cls, boundary: int, degree: int) -> BoundaryLift:
        """Every base component lifts to ``degree`` curves of local degree 1."""
        return cls([[(i * degree + j, 1) for j in range(degree)] for i in range(boundary)])

    @classmethod
    def connected(cls, boundary: int, degree: int) -> BoundaryLift:
        """Every base component lifts to one curve of local degree ``degree``."""
        return cls([[(i, degree)] for i in range(boundary)])


def _genus_from(orientable_: bool, chi: int, b: int) -> int:
    if orientable_:
        twice = 2 - chi - b
        if twice < 0 or twice % 2:
            raise NonIntegralGenus(f"orientable cover with chi={chi}, b={b} has genus {twice}/2")
        return twice // 2
    g = 2 - chi - b
    if g < 1:
        raise NonIntegralGenus(f"non-orientable cover with chi={chi}, b={b} would have genus {g}")
    return g


def orientation_double_cover(s: CompactSurface) -> tuple[CompactSurface, BoundaryLift]:
    if s.orientable:
        raise AlreadyOrientable(f"{format_surface(s)} is orientable")
    _require_hyperbolic(s)
    # each boundary circle is two-sided, so it lifts to two circles
    lift = BoundaryLift.trivial(s.boundary, 2)
    chi = 2 * euler_characteristic(s)
    b = 2 * s.boundary
    return CompactSurface(True, _genus_from(True, chi, b), b), lift


def finite_cover(s: CompactSurface, degree: int, orientable_cover: bool, lift: BoundaryLift) -> CompactSurface:
    """The degree-``degree`` cover with prescribed boundary behaviour."""
    if degree < 1:
        raise ValueError("degree must be >= 1")
    if s.orientable and not orientable_cover:
        raise ValueError("covers of orientable surfaces are orientable")
    if len(lift.components) != s.boundary:
        raise InconsistentLift(f"lift describes {len(lift.components)} components, surface has {s.boundary}")
    seen = set()
    for i, comp in enumerate(lift.components):
        if not comp:
            raise InconsistentLift(f"boundary component {i} has no lift")
        if any(d < 1 for _, d in comp):
            raise InconsistentLift(f"local degrees over component {i} must be >= 1")
        total = sum(d for _, d in comp)
        if total != degree:
            raise InconsistentLift(f"local degrees over component {i} sum to {total}, expected {degree}")
        for j, _ in comp:
            if j in seen:
                raise InconsistentLift(f"cover boundary component {j} listed twice")
            seen.add(j)
    chi = degree * euler_characteristic(s)
    b = lift.cover_boundary_count
    return CompactSurface(orientable_cover, _genus_from(orientable_cover, chi, b), b)
