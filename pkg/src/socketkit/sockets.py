"""Socket groups and identified-socket groups.

A socket group adjoins an ``n_i``-th root ``z_i`` to each boundary element
``h_i`` of a compact surface group; in the identified variant every ``h_i`` is
conjugate to a power ``z^{n_i}`` of a single root ``z``. This module builds
their presentations, answers the limit-group / preretraction questions by the
known clause lists, and produces explicit witness homomorphisms checked by
free reduction.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import combinations_with_replacement, product
from typing import Iterable, Iterator, Sequence

from .errors import InvalidSpec, NoWitness, ParseError, TooLarge
from .presentation import FinitePresentation
from .surface import CompactSurface, euler_characteristic, format_surface, parse_surface
from .word import Alphabet, Substitution, Word, apply, conjugate, invert

VALID = "VALID"
INCONCLUSIVE = "INCONCLUSIVE"

SUBSET_SUM_CAP = 40
_ENUMERATE_UNSIGNED = 20
_ENUMERATE_SIGNED = 12
DP_STATE_CAP = 2_000_000


@dataclass(frozen=True)
class SocketSpec:
    surface: CompactSurface
    orders: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "orders", tuple(int(n) for n in self.orders))
        s = self.surface
        if s.boundary < 1:
            raise InvalidSpec("a socket group needs at least one boundary component")
        if euler_characteristic(s) >= 0:
            raise InvalidSpec(f"{format_surface(s)} is not hyperbolic (chi >= 0)")
        if len(self.orders) != s.boundary:
            raise InvalidSpec(f"{len(self.orders)} orders given for {s.boundary} boundary components")
        for n in self.orders:
            if n < 3:
                # n = 2 is removable by gluing a Moebius band; n = 1 is no socket
                raise InvalidSpec(f"socket orders must be >= 3, got {n}")

    def __str__(self) -> str:
        return f"socket {format_surface(self.surface)} orders={','.join(map(str, self.orders))}"


@dataclass(frozen=True)
class IdentifiedSocketSpec:
    surface: CompactSurface
    orders: tuple[int, ...]

    def __post_init__(self):
        orders = tuple(int(n) for n in self.orders)
        s = self.surface
        if s.boundary < 2:
            raise InvalidSpec("identified sockets need at least two boundary components")
        if euler_characteristic(s) >= 0:
            raise InvalidSpec(f"{format_surface(s)} is not hyperbolic (chi >= 0)")
        if len(orders) != s.boundary:
            raise InvalidSpec(f"{len(orders)} orders given for {s.boundary} boundary components")
        for n in orders:
            if n == 0:
                raise InvalidSpec("identified socket orders must be nonzero")
        if not s.orientable:
            # boundary components of a non-orientable surface carry no coherent orientation
            orders = tuple(abs(n) for n in orders)
        object.__setattr__(self, "orders", orders)

    def __str__(self) -> str:
        return f"isocket {format_surface(self.surface)} orders={','.join(map(str, self.orders))}"


_SPEC_RE = re.compile(r"\s*(socket|isocket)\s+(S\([^)]*\))\s+orders\s*=\s*([-+0-9,\s]+?)\s*\Z")


def parse_orders(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise ParseError(f"bad order list {text!r}") from None


def parse_spec(text: str) -> SocketSpec | IdentifiedSocketSpec:
    """Parse ``socket S(or,g=2,b=1) orders=3`` or ``isocket S(...) orders=3,-3``."""
    m = _SPEC_RE.match(text)
    if m is None:
        raise ParseError(f"bad socket spec {text!r}", column=1)
    surface = parse_surface(m.group(2))
    cls = SocketSpec if m.group(1) == "socket" else IdentifiedSocketSpec
    try:
        return cls(surface, parse_orders(m.group(3)))
    except InvalidSpec as exc:
        raise ParseError(str(exc), column=m.start(3) + 1) from None


def _surface_generators(s: CompactSurface) -> list[str]:
    if s.orientable:
        return [n for i in range(1, s.genus + 1) for n in (f"a{i}", f"b{i}")]
    return [f"a{i}" for i in range(1, s.genus + 1)]


def _surface_word(s: CompactSurface) -> Word:
    """``[a1,b1]...[ag,bg]`` or ``a1^2 ... ag^2``."""
    if s.orientable:
        syl = []
        for i in range(1, s.genus + 1):
            a, b = f"a{i}", f"b{i}"
            syl += [(a, 1), (b, 1), (a, -1), (b, -1)]
        return Word(tuple(syl))
    return Word(tuple((f"a{i}", 2) for i in range(1, s.genus + 1)))


def _boundary_product(b: int) -> Word:
    return Word(tuple((f"h{i}", 1) for i in range(1, b + 1)))


def socket_presentation(spec: SocketSpec, *, eliminate_boundary: bool = False) -> FinitePresentation:
    """Generators ``h_i``, ``z_i``, then the surface generators.

    Every relation ``lhs = rhs`` is stored as the relator ``lhs rhs^-1``. With
    ``eliminate_boundary`` the ``h_i`` are replaced by ``z_i^{n_i}``, leaving the
    one-relator presentation on the ``z_i`` and surface generators.
    """
    s = spec.surface
    b = s.boundary
    zs = [f"z{i}" for i in range(1, b + 1)]
    surf = _surface_word(s)
    if eliminate_boundary:
        lhs = Word(tuple((z, n) for z, n in zip(zs, spec.orders)))
        return FinitePresentation(zs + _surface_generators(s), [lhs * invert(surf)])
    hs = [f"h{i}" for i in range(1, b + 1)]
    rels = [_boundary_product(b) * invert(surf)]
    rels += [Word(((z, n), (h, -1))) for z, h, n in zip(zs, hs, spec.orders)]
    return FinitePresentation(hs + zs + _surface_generators(s), rels)


def identified_presentation(spec: IdentifiedSocketSpec) -> FinitePresentation:
    """Generators ``h_i``, ``z``, ``t_2..t_b``, surface generators (``t_1 = 1``)."""
    s = spec.surface
    b = s.boundary
    hs = [f"h{i}" for i in range(1, b + 1)]
    ts = [f"t{i}" for i in range(2, b + 1)]
    rels = [_boundary_product(b) * invert(_surface_word(s))]
    for i, n in enumerate(spec.orders, start=1):
        rels.append(_boundary_normal_form(i, n) * Word.gen(f"h{i}", -1))
    return FinitePresentation(hs + ["z"] + ts + _surface_generators(s), rels)


def _boundary_normal_form(i: int, n: int) -> Word:
    """``t_i z^n t_i^-1`` (just ``z^n`` for ``i = 1``)."""
    if i == 1:
        return Word.gen("z", n)
    t = Word.gen(f"t{i}")
    return t * Word.gen("z", n) * invert(t)


# --- classifiers -----------------------------------------------------------


def is_limit_group(spec: SocketSpec) -> bool:
    s, b, g = spec.surface, spec.surface.boundary, spec.surface.genus
    if not s.orientable:
        return b + g >= 4
    if b >= 4:
        return True
    if b in (2, 3):
        return g >= 1
    return 2 * g >= spec.orders[0] + 1


def has_weak_preretraction(spec: SocketSpec) -> bool:
    """Existence of a non-injective weak preretraction for the cyclic JSJ splitting."""
    s = spec.surface
    return (not s.orientable) and all(n % 2 == 0 for n in spec.orders) and s.genus >= s.boundary


def has_preretraction(spec: SocketSpec) -> bool:
    """Non-injective preretraction; equivalently (by the elementary-freeness
    criterion for socket groups) the group is elementarily free."""
    s = spec.surface
    return has_weak_preretraction(spec) and s.genus + s.boundary >= 4


def is_elementarily_free(spec: SocketSpec) -> bool:
    return has_preretraction(spec)


def identified_weak_exists(spec: IdentifiedSocketSpec) -> bool:
    total = sum(spec.orders)
    return total == 0 if spec.surface.orientable else total % 2 == 0


def identified_preretraction_exists(spec: IdentifiedSocketSpec) -> bool:
    s, g, b, n = spec.surface, spec.surface.genus, spec.surface.boundary, spec.orders
    if not identified_weak_exists(spec):
        return False
    if s.orientable:
        return g >= 1 or subset_sum_zero(n, signed=False, proper_nonempty=True) is not None
    if g >= 3:
        return True
    if g == 2:
        return b >= 3 or abs(n[0]) == abs(n[1]) or (n[0] % 2 == 0 and n[1] % 2 == 0)
    return b >= 3 and subset_sum_zero(n, signed=True, proper_nonempty=True) is not None


def classify(spec: SocketSpec) -> dict:
    return {
        "limit_group": is_limit_group(spec),
        "elementarily_free": has_preretraction(spec),
        "weak_preretraction": has_weak_preretraction(spec),
    }


def classify_identified(spec: IdentifiedSocketSpec) -> dict:
    pre = identified_preretraction_exists(spec)
    return {
        "elementarily_free": pre,
        "preretraction": pre,
        "weak_preretraction": identified_weak_exists(spec),
    }


def iter_socket_specs(
    orientable: bool | None,
    genera: Iterable[int],
    boundaries: Iterable[int],
    orders: Sequence[int],
    *,
    ordered: bool = True,
) -> Iterator[SocketSpec]:
    """All valid specs in the given ranges, in (orientability, g, b, orders) order.

    With ``ordered=False`` only non-decreasing order tuples are produced; the
    classifiers are symmetric in the orders.
    """
    kinds = [True, False] if orientable is None else [orientable]
    orders = sorted(set(orders))
    genera, boundaries = list(genera), list(boundaries)
    for ori in kinds:
        for g in genera:
            for b in boundaries:
                if b < 1 or (not ori and g < 1):
                    continue
                s = CompactSurface(ori, g, b)
                if euler_characteristic(s) >= 0:
                    continue
                tuples = product(orders, repeat=b) if ordered else combinations_with_replacement(orders, b)
                for ns in tuples:
                    yield SocketSpec(s, ns)


# --- witnesses -------------------------------------------------------------


@dataclass(frozen=True)
class RelatorCheck:
    relator: Word
    residual: Word

    @property
    def ok(self) -> bool:
        return not self.residual.syllables


@dataclass(frozen=True)
class BoundaryCheck:
    """The image of a boundary generator against a conjugate of its normal form."""

    boundary: str
    normal_form: Word
    image: Word
    conjugator: Word

    @property
    def ok(self) -> bool:
        return conjugate(self.normal_form, self.conjugator) == self.image


@dataclass(frozen=True)
class WitnessCertificate:
    """A substitution from the group's generators into a free group, with the
    free reduction of every relator image.

    All residuals trivial means the substitution defines a homomorphism out
    of the group; anything else is reported INCONCLUSIVE, since the residual
    might still be trivial in the group.
    """

    presentation: FinitePresentation
    substitution: Substitution
    checks: tuple[RelatorCheck, ...]
    boundary_checks: tuple[BoundaryCheck, ...]
    notes: tuple[str, ...] = field(default=())

    @property
    def status(self) -> str:
        ok = all(c.ok for c in self.checks) and all(c.ok for c in self.boundary_checks)
        return VALID if ok else INCONCLUSIVE

    @property
    def valid(self) -> bool:
        return self.status == VALID

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "images": {n: str(w) for n, w in self.substitution.images.items()},
            "relators": [{"relator": str(c.relator), "residual": str(c.residual)} for c in self.checks],
            "boundaries": [
                {
                    "boundary": c.boundary,
                    "image": str(c.image),
                    "conjugator": str(c.conjugator),
                    "ok": c.ok,
                }
                for c in self.boundary_checks
            ],
            "notes": list(self.notes),
        }


def _certify(
    pres: FinitePresentation,
    images: dict[str, Word],
    target: Sequence[str],
    boundary_checks: Iterable[BoundaryCheck],
    notes: Sequence[str],
) -> WitnessCertificate:
    sub = Substitution(pres.alphabet, Alphabet(target), images)
    checks = tuple(RelatorCheck(r, apply(sub, r)) for r in pres.relators)
    return WitnessCertificate(pres, sub, checks, tuple(boundary_checks), tuple(notes))


def weak_preretraction_witness(spec: SocketSpec) -> WitnessCertificate:
    """The map fixing every ``z_i`` (and so every ``h_i = z_i^{n_i}``) that sends
    ``a_i`` to ``z_i^{n_i/2}``.

    With one boundary component and genus >= 3, ``a2 -> z`` and ``a3 -> z^-1``
    for a letter ``z`` standing for any element not commuting with ``z1``.
    """
    if not has_weak_preretraction(spec):
        raise NoWitness(f"{spec} has no non-injective weak preretraction")
    s = spec.surface
    b, g = s.boundary, s.genus
    pres = socket_presentation(spec)
    target = [f"z{i}" for i in range(1, b + 1)]
    images: dict[str, Word] = {}
    for i, n in enumerate(spec.orders, start=1):
        images[f"z{i}"] = Word.gen(f"z{i}")
        images[f"h{i}"] = Word.gen(f"z{i}", n)
    for i in range(1, g + 1):
        images[f"a{i}"] = Word()
    for i, n in enumerate(spec.orders, start=1):
        images[f"a{i}"] = Word.gen(f"z{i}", n // 2)
    notes = [
        "h_i is sent to z_i^n_i, which equals h_i in the group, so every z_i and h_i is fixed",
        "non-injectivity is not checked here",
    ]
    if b == 1 and g >= 3:
        target.append("z")
        images["a2"] = Word.gen("z")
        images["a3"] = Word.gen("z", -1)
        notes.append("z stands for any element not commuting with z1 (non-commutation is not checked)")
    bchecks = [
        BoundaryCheck(f"h{i}", Word.gen(f"z{i}", n), images[f"h{i}"], Word())
        for i, n in enumerate(spec.orders, start=1)
    ]
    return _certify(pres, images, target, bchecks, notes)


def identified_weak_witness(spec: IdentifiedSocketSpec) -> WitnessCertificate:
    """``z -> z``, ``h_i -> z^{n_i}``, every ``t_i``, ``a_i``, ``b_i`` to 1, except
    ``a1 -> z^{(sum n_i)/2}`` when the surface is non-orientable."""
    if not identified_weak_exists(spec):
        raise NoWitness(f"{spec} has no non-injective weak preretraction")
    s = spec.surface
    pres = identified_presentation(spec)
    images = {name: Word() for name in pres.generators}
    images["z"] = Word.gen("z")
    for i, n in enumerate(spec.orders, start=1):
        images[f"h{i}"] = Word.gen("z", n)
    if not s.orientable:
        images["a1"] = Word.gen("z", sum(spec.orders) // 2)
    bchecks = [
        BoundaryCheck(
            f"h{i}",
            _boundary_normal_form(i, n),
            images[f"h{i}"],
            Word() if i == 1 else Word.gen(f"t{i}", -1),
        )
        for i, n in enumerate(spec.orders, start=1)
    ]
    notes = ["target is the cyclic vertex group <z>", "non-injectivity is not checked here"]
    return _certify(pres, images, ["z"], bchecks, notes)


# --- subset sums -----------------------------------------------------------


@dataclass(frozen=True)
class SubsetWitness:
    """0-based indices in increasing order and the sign applied to each."""

    indices: tuple[int, ...]
    signs: tuple[int, ...]

    def total(self, values: Sequence[int]) -> int:
        return sum(s * values[i] for i, s in zip(self.indices, self.signs))


def subset_sum_zero(
    values: Sequence[int],
    signed: bool = False,
    proper_nonempty: bool = True,
    *,
    method: str = "auto",
) -> SubsetWitness | None:
    """Find a nonempty subset (with signs, if ``signed``) summing to zero.

    With ``proper_nonempty`` the full index set is excluded. The witness
    returned is the least one when witnesses are compared as sequences of
    ``(index, sign)`` pairs with ``+1`` before ``-1``; the first sign is always
    ``+1``. For unsigned problems this is the lexicographically least index
    tuple.

    ``method``: ``"enumerate"`` (depth-first in witness order), ``"mitm"``
    (meet in the middle, unsigned only), ``"dp"`` (reachable-sum sets,
    pseudo-polynomial) or ``"auto"``.
    """
    values = [int(v) for v in values]
    n = len(values)
    if n > SUBSET_SUM_CAP:
        raise TooLarge(f"subset-sum input of length {n} exceeds the cap of {SUBSET_SUM_CAP}")
    if any(v == 0 for v in values):
        raise ValueError("values must be nonzero")
    if method == "auto":
        if signed:
            method = "enumerate" if n <= _ENUMERATE_SIGNED else "dp"
        else:
            method = "enumerate" if n <= _ENUMERATE_UNSIGNED else "mitm"
    if method == "enumerate":
        return _subset_enumerate(values, signed, proper_nonempty)
    if method == "mitm":
        if signed:
            raise ValueError("meet in the middle is implemented for unsigned sums only")
        return _subset_mitm(values, proper_nonempty)
    if method == "dp":
        return _subset_dp(values, signed, proper_nonempty)
    raise ValueError(f"unknown method {method!r}")


def _subset_enumerate(values: list[int], signed: bool, proper: bool) -> SubsetWitness | None:
    n = len(values)
    idx: list[int] = []
    sgn: list[int] = []

    def dfs(start: int, total: int) -> bool:
        for j in range(start, n):
            for s in (1, -1) if (signed and idx) else (1,):
                t = total + s * values[j]
                idx.append(j)
                sgn.append(s)
                if t == 0 and not (proper and len(idx) == n):
                    return True
                if dfs(j + 1, t):
                    return True
                idx.pop()
                sgn.pop()
        return False

    if dfs(0, 0):
        return SubsetWitness(tuple(idx), tuple(sgn))
    return None


def _subsets_in_order(values: Sequence[int], offset: int) -> Iterator[tuple[tuple[int, ...], int]]:
    """All subsets (as absolute index tuples) in lexicographic order, with sums."""
    n = len(values)
    stack: list[int] = []

    def rec(start: int, total: int):
        yield tuple(stack), total
        for j in range(start, n):
            stack.append(offset + j)
            yield from rec(j + 1, total + values[j])
            stack.pop()

    yield from rec(0, 0)


def _subset_mitm(values: list[int], proper: bool) -> SubsetWitness | None:
    n = len(values)
    h = n // 2
    left, right = values[:h], values[h:]
    full_right = tuple(range(h, n))
    # up to two right-half subsets per sum suffice: the constraints exclude at most one
    table: dict[int, list[tuple[int, ...]]] = {}
    for sub, total in _subsets_in_order(right, h):
        slot = table.setdefault(total, [])
        if len(slot) < 2:
            slot.append(sub)
    best = None
    for sub_l, total in _subsets_in_order(left, 0):
        for sub_r in table.get(-total, ()):
            if not sub_l and not sub_r:
                continue
            if proper and len(sub_l) == h and sub_r == full_right:
                continue
            cand = sub_l + sub_r
            if best is None or cand < best:
                best = cand
            break
    if best is None:
        return None
    return SubsetWitness(best, (1,) * len(best))


def _subset_dp(values: list[int], signed: bool, proper: bool) -> SubsetWitness | None:
    n = len(values)
    reach: list[set[int]] = [set() for _ in range(n + 1)]
    partial: list[set[int]] = [set() for _ in range(n + 1)]  # sums of non-full suffix subsets
    reach[n] = {0}
    for j in range(n - 1, -1, -1):
        v = values[j]
        nxt = reach[j + 1]
        reach[j] = nxt | {x + v for x in nxt} | ({x - v for x in nxt} if signed else set())
        p = partial[j + 1]
        partial[j] = nxt | {x + v for x in p} | ({x - v for x in p} if signed else set())
        if len(reach[j]) + len(partial[j]) > DP_STATE_CAP:
            raise TooLarge(f"subset-sum table exceeds {DP_STATE_CAP} states; values are too spread out")
    idx: list[int] = []
    sgn: list[int] = []
    total = 0
    start = 0
    while True:
        for j in range(start, n):
            choice = None
            for s in (1, -1) if (signed and idx) else (1,):
                t = total + s * values[j]
                full_prefix = proper and len(idx) == j
                if t == 0 and not (full_prefix and j == n - 1):
                    return SubsetWitness(tuple(idx + [j]), tuple(sgn + [s]))
                rest = partial[j + 1] if full_prefix else reach[j + 1]
                if t != 0 and -t in rest:
                    choice = s
                    break
            if choice is not None:
                idx.append(j)
                sgn.append(choice)
                total += choice * values[j]
                start = j + 1
                break
        else:
            return None
