"""Graphs of groups: validation, girth, orientation covers, homology covers.

Only the underlying graph and the attaching data are modelled. A vertex is
cyclic, rigid, or carries a compact surface; an edge records the boundary
component it is glued to at a surface endpoint and the exponent of its image
in the cyclic group at a cyclic endpoint. Graph covers leave vertex groups
unchanged, except in :func:`orientation_transform`, which replaces each
non-orientable surface by its orientation double cover.
"""

from __future__ import annotations

import hashlib
import json
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from .errors import DegreeOverflow, InvalidGraph, NotConnected, ParseError
from .presentation import FinitePresentation, has_infinite_abelian_image
from .sockets import IdentifiedSocketSpec, SocketSpec
from .surface import (
    CompactSurface,
    curve_family_bound,
    euler_characteristic,
    format_surface,
    orientation_double_cover,
    parse_surface,
)
from .word import Word

INF = math.inf
DEFAULT_CAP = 10**6

CYCLIC = "cyclic"
RIGID = "rigid"
SURFACE = "surface"

VertexId = Hashable


def _id_key(x) -> tuple:
    """Integers in numeric order first, then everything else by string."""
    if isinstance(x, int) and not isinstance(x, bool):
        return (0, x, "")
    return (1, 0, str(x))


@dataclass(frozen=True)
class Vertex:
    id: VertexId
    kind: str
    surface: CompactSurface | None = None

    def __post_init__(self):
        if self.kind not in (CYCLIC, RIGID, SURFACE):
            raise ValueError(f"unknown vertex kind {self.kind!r}")
        if (self.kind == SURFACE) != (self.surface is not None):
            raise ValueError("exactly the surface vertices carry a surface")


@dataclass(frozen=True)
class Edge:
    """``boundary`` is a 1-based boundary index at the surface endpoint;
    ``exponent`` is the power of the cyclic generator at the cyclic endpoint."""

    id: VertexId
    u: VertexId
    v: VertexId
    boundary: int | None = None
    exponent: int | None = None


class JsjGraph:
    """A finite connected multigraph with vertex and edge attaching data."""

    def __init__(self, vertices: Iterable[Vertex], edges: Iterable[Edge]):
        self.vertices: tuple[Vertex, ...] = tuple(vertices)
        self.edges: tuple[Edge, ...] = tuple(edges)
        self._vertex = {v.id: v for v in self.vertices}
        self._edge = {e.id: e for e in self.edges}
        self._incident: dict[VertexId, list[Edge]] = {v.id: [] for v in self.vertices}
        for e in sorted(self.edges, key=lambda e: _id_key(e.id)):
            for end in (e.u, e.v) if e.u != e.v else (e.u,):
                if end in self._incident:
                    self._incident[end].append(e)

    def vertex(self, vid: VertexId) -> Vertex:
        return self._vertex[vid]

    def edge(self, eid: VertexId) -> Edge:
        return self._edge[eid]

    def incident(self, vid: VertexId) -> list[Edge]:
        """Incident edges in edge-id order (a loop appears once)."""
        return self._incident[vid]

    def surface_vertices(self) -> list[Vertex]:
        return [v for v in self.vertices if v.kind == SURFACE]

    @property
    def rank(self) -> int:
        """First Betti number ``|E| - |V| + 1`` (the graph is assumed connected)."""
        return len(self.edges) - len(self.vertices) + 1

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        start = self.vertices[0].id
        seen = {start}
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for e in self._incident.get(x, ()):
                for y in (e.u, e.v):
                    if y in self._incident and y not in seen:
                        seen.add(y)
                        queue.append(y)
        return len(seen) == len(self.vertices)

    # -- serialization --

    def to_json(self) -> dict:
        verts = []
        for v in self.vertices:
            kind = {"surface": format_surface(v.surface)} if v.kind == SURFACE else v.kind
            verts.append({"id": v.id, "kind": kind})
        edges = []
        for e in self.edges:
            d = {"id": e.id, "u": e.u, "v": e.v}
            if e.boundary is not None:
                d["boundary"] = e.boundary
            if e.exponent is not None:
                d["exponent"] = e.exponent
            edges.append(d)
        return {"vertices": verts, "edges": edges}

    @classmethod
    def from_json(cls, data) -> JsjGraph:
        if isinstance(data, str):
            try:
                data = json.loads(data)
            except json.JSONDecodeError as exc:
                raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from None
        try:
            verts = []
            for item in data["vertices"]:
                kind = item["kind"]
                if isinstance(kind, dict):
                    verts.append(Vertex(item["id"], SURFACE, parse_surface(kind["surface"])))
                else:
                    verts.append(Vertex(item["id"], kind))
            edges = [
                Edge(item["id"], item["u"], item["v"], item.get("boundary"), item.get("exponent"))
                for item in data["edges"]
            ]
        except ParseError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed graph description: {exc}") from None
        return cls(verts, edges)

    def digest(self) -> str:
        text = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def __repr__(self) -> str:
        return f"JsjGraph({len(self.vertices)} vertices, {len(self.edges)} edges)"


def simple_graph(n_vertices: int, pairs: Sequence[tuple[int, int]], kind: str = RIGID) -> JsjGraph:
    """Unlabelled graph on vertices ``0..n-1`` with edges ``0..m-1``."""
    return JsjGraph(
        [Vertex(i, kind) for i in range(n_vertices)],
        [Edge(j, u, v) for j, (u, v) in enumerate(pairs)],
    )


def cycle_graph(n: int) -> JsjGraph:
    return simple_graph(n, [(i, (i + 1) % n) for i in range(n)])


def theta_graph() -> JsjGraph:
    return simple_graph(2, [(0, 1)] * 3)


def complete_graph(n: int) -> JsjGraph:
    return simple_graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


# --- validation ------------------------------------------------------------


def validate(g: JsjGraph) -> list[str]:
    out: list[str] = []
    ids = [v.id for v in g.vertices]
    for vid in {x for x in ids if ids.count(x) > 1}:
        out.append(f"vertex {vid}: duplicate id")
    eids = [e.id for e in g.edges]
    for eid in {x for x in eids if eids.count(x) > 1}:
        out.append(f"edge {eid}: duplicate id")
    known = {v.id: v for v in g.vertices}
    at_surface: dict[VertexId, list[Edge]] = {v.id: [] for v in g.vertices if v.kind == SURFACE}
    for e in g.edges:
        if e.u not in known or e.v not in known:
            out.append(f"edge {e.id}: endpoint not a vertex")
            continue
        if e.u == e.v:
            out.append(f"edge {e.id}: loop at {e.u} (graph must be bipartite)")
            continue
        ku, kv = known[e.u].kind, known[e.v].kind
        if (ku == CYCLIC) == (kv == CYCLIC):
            out.append(f"edge {e.id}: joins {ku} {e.u} to {kv} {e.v}; each edge needs exactly one cyclic end")
            continue
        other = known[e.v] if ku == CYCLIC else known[e.u]
        if other.kind == SURFACE:
            at_surface[other.id].append(e)
            if e.boundary is None:
                out.append(f"edge {e.id}: no boundary index at surface vertex {other.id}")
        elif e.boundary is not None:
            out.append(f"edge {e.id}: boundary index given but {other.id} is not a surface vertex")
        if e.exponent is not None and e.exponent < 1:
            out.append(f"edge {e.id}: exponent {e.exponent} at the cyclic end must be >= 1")
    for vid, edges in at_surface.items():
        s = known[vid].surface
        if len(edges) != s.boundary:
            out.append(
                f"vertex {vid}: {len(edges)} incident edges but {format_surface(s)} has "
                f"{s.boundary} boundary components (need a bijection)"
            )
        used: dict[int, VertexId] = {}
        for e in edges:
            if e.boundary is None:
                continue
            if not 1 <= e.boundary <= s.boundary:
                out.append(f"edge {e.id}: boundary index {e.boundary} out of range 1..{s.boundary} at {vid}")
            elif e.boundary in used:
                out.append(f"vertex {vid}: boundary {e.boundary} used by edges {used[e.boundary]} and {e.id}")
            else:
                used[e.boundary] = e.id
    if g.vertices and not g.is_connected():
        out.append("graph is not connected")
    return out


def require_valid(g: JsjGraph) -> None:
    violations = validate(g)
    if violations:
        raise InvalidGraph(violations)


# --- girth -----------------------------------------------------------------


Neighbours = Callable[[Hashable], Iterable[tuple[Hashable, Hashable]]]


def _girth_search(starts: Iterable[Hashable], neighbours: Neighbours, best: float = INF) -> float:
    """Exact girth, given starts that meet every automorphism orbit of vertices.

    ``neighbours(x)`` yields ``(edge_key, y)``, with the same key at both ends
    of an edge. From each start the BFS stops at depth ``d`` once
    ``2d + 1 >= best``, so the cost is the size of a ball of radius ``girth/2``.
    """
    for s in starts:
        dist = {s: 0}
        via = {s: None}
        frontier = [s]
        d = 0
        while frontier and 2 * d + 1 < best:
            nxt = []
            for x in frontier:
                px = via[x]
                for key, y in neighbours(x):
                    if key == px:
                        continue
                    if y == x:
                        best = 1
                        continue
                    dy = dist.get(y)
                    if dy is None:
                        dist[y] = d + 1
                        via[y] = key
                        nxt.append(y)
                    elif d + dy + 1 < best:
                        best = d + dy + 1
            frontier = nxt
            d += 1
    return best


def girth(g: JsjGraph | CoverGraph) -> float:
    """Length of the shortest embedded circle; ``math.inf`` for a forest."""
    if isinstance(g, CoverGraph):
        return g.girth()

    def nbrs(x):
        for e in g.incident(x):
            if e.u == e.v:
                yield e.id, x
            else:
                yield e.id, (e.v if e.u == x else e.u)

    if len(g.edges) < len(g.vertices):  # a connected graph with |E| < |V| is a tree
        return INF
    return _girth_search([v.id for v in g.vertices], nbrs)


def large_girth_threshold(g: JsjGraph) -> int | None:
    """Least girth ``N`` with ``(N - 2)/2`` above every surface's curve bound.

    ``None`` when the graph has no surface vertices (the condition is vacuous).
    """
    bounds = [curve_family_bound(v.surface) for v in g.surface_vertices()]
    if not bounds:
        return None
    return 2 * max(bounds) + 3


def large_girth(g: JsjGraph, girth_value: float | None = None) -> bool:
    threshold = large_girth_threshold(g)
    if threshold is None:
        return True
    gv = girth(g) if girth_value is None else girth_value
    return gv >= threshold


# --- orientation transform -------------------------------------------------


@dataclass(frozen=True)
class OrientationTransform:
    """The orientation cover model and its projection onto the input graph."""

    graph: JsjGraph
    degree: int
    vertex_projection: Mapping[VertexId, VertexId]
    edge_projection: Mapping[VertexId, VertexId]


def orientation_transform(g: JsjGraph) -> OrientationTransform:
    """Degree-2 cover induced by the orientation character of the surfaces.

    The character is trivial on every edge group (boundary curves preserve
    orientation) and on every non-surface vertex, so each non-orientable
    surface vertex has a single preimage carrying the orientation double
    cover, while every other vertex and every edge has two preimages ``x.0``
    and ``x.1``. Boundary component ``i`` of a non-orientable surface lifts to
    components ``2i - 1`` and ``2i`` of its cover, glued to sheets 0 and 1.
    """
    require_valid(g)
    flip = {v.id for v in g.surface_vertices() if not v.surface.orientable}
    if not flip:
        return OrientationTransform(
            g, 1, {v.id: v.id for v in g.vertices}, {e.id: e.id for e in g.edges}
        )
    verts: list[Vertex] = []
    vproj: dict[VertexId, VertexId] = {}
    for v in g.vertices:
        if v.id in flip:
            cover, _ = orientation_double_cover(v.surface)
            verts.append(Vertex(v.id, SURFACE, cover))
            vproj[v.id] = v.id
        else:
            for j in (0, 1):
                verts.append(Vertex(f"{v.id}.{j}", v.kind, v.surface))
                vproj[f"{v.id}.{j}"] = v.id
    edges: list[Edge] = []
    eproj: dict[VertexId, VertexId] = {}
    for e in g.edges:
        for j in (0, 1):
            u = e.u if e.u in flip else f"{e.u}.{j}"
            w = e.v if e.v in flip else f"{e.v}.{j}"
            b = e.boundary
            if b is not None and (e.u in flip or e.v in flip):
                b = 2 * (b - 1) + j + 1  # matches BoundaryLift.trivial(b, 2)
            eid = f"{e.id}.{j}"
            edges.append(Edge(eid, u, w, b, e.exponent))
            eproj[eid] = e.id
    out = JsjGraph(verts, edges)
    if not out.is_connected():
        raise NotConnected("orientation cover is disconnected; select a component")
    return OrientationTransform(out, 2, vproj, eproj)


# --- homology covers -------------------------------------------------------


@dataclass(frozen=True)
class VoltageAssignment:
    """Tree edges carry 0; chord ``j`` carries the ``j``-th basis vector of ``(Z/k)^r``."""

    k: int
    tree: frozenset
    chords: tuple

    @property
    def rank(self) -> int:
        return len(self.chords)

    def voltage(self, edge_id) -> tuple[int, ...]:
        vec = [0] * self.rank
        if edge_id not in self.tree:
            vec[self.chords.index(edge_id)] = 1
        return tuple(vec)


def spanning_tree(g: JsjGraph) -> tuple[frozenset, tuple]:
    """BFS tree from the least vertex id, scanning edges in id order.

    Returns the tree edge ids and the chords in edge-id order.
    """
    if not g.vertices:
        return frozenset(), ()
    root = min((v.id for v in g.vertices), key=_id_key)
    seen = {root}
    tree = set()
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for e in g.incident(x):
            y = e.v if e.u == x else e.u
            if y not in seen:
                seen.add(y)
                tree.add(e.id)
                queue.append(y)
    if len(seen) != len(g.vertices):
        raise NotConnected("graph is not connected")
    chords = tuple(sorted((e.id for e in g.edges if e.id not in tree), key=_id_key))
    return frozenset(tree), chords


def voltage_assignment(g: JsjGraph, k: int) -> VoltageAssignment:
    if k < 2:
        raise ValueError("k must be >= 2")
    tree, chords = spanning_tree(g)
    return VoltageAssignment(k, tree, chords)


class CoverGraph:
    """Derived cover of ``base`` for a voltage assignment in ``(Z/k)^r``.

    Cover vertex ``(v, x)`` for a base vertex ``v`` and fiber label ``x``; the
    lift of a base edge ``e: u -> w`` with voltage ``a`` joins ``(u, x)`` to
    ``(w, x + a)``. Adjacency is computed on demand, so girth checks never
    build the whole cover. Vertex kinds and surfaces are those of the base.

    ``parent`` is set when ``base`` is itself a materialized cover, forming a
    tower; ``ks`` lists the moduli from the bottom level up.
    """

    def __init__(self, base: JsjGraph, voltages: VoltageAssignment, parent: CoverGraph | None = None):
        self.base = base
        self.voltages = voltages
        self.k = voltages.k
        self.rank = voltages.rank
        self.degree = self.k**self.rank
        self.parent = parent
        self._vids = [v.id for v in base.vertices]
        self._vindex = {vid: i for i, vid in enumerate(self._vids)}
        chord_pos = {eid: j for j, eid in enumerate(voltages.chords)}
        self._stride = [self.k**j for j in range(self.rank)]
        # per base vertex: (edge position, other end index, direction, chord or -1)
        self._adj: list[list[tuple[int, int, int, int]]] = [[] for _ in self._vids]
        for pos, e in enumerate(base.edges):
            j = chord_pos.get(e.id, -1)
            iu, iv = self._vindex[e.u], self._vindex[e.v]
            self._adj[iu].append((pos, iv, 1, j))
            if iu != iv:
                self._adj[iv].append((pos, iu, -1, j))
            else:
                self._adj[iu].append((pos, iu, -1, j))

    # -- sizes and labels --

    @property
    def ks(self) -> tuple[int, ...]:
        return (self.parent.ks if self.parent else ()) + (self.k,)

    @property
    def total_degree(self) -> int:
        """Degree over the bottom of the tower."""
        return self.degree * (self.parent.total_degree if self.parent else 1)

    @property
    def root(self) -> JsjGraph:
        return self.parent.root if self.parent else self.base

    @property
    def vertex_count(self) -> int:
        return len(self._vids) * self.degree

    @property
    def edge_count(self) -> int:
        return len(self.base.edges) * self.degree

    def fiber_label(self, x: int) -> tuple[int, ...]:
        return tuple((x // s) % self.k for s in self._stride)

    def _shift(self, x: int, j: int, sign: int) -> int:
        if j < 0:
            return x
        s = self._stride[j]
        digit = (x // s) % self.k
        return x + (((digit + sign) % self.k) - digit) * s

    def _node(self, vid: VertexId, x: int) -> int:
        return self._vindex[vid] * self.degree + x

    def neighbours(self, node: int) -> Iterator[tuple[tuple[int, int], int]]:
        """``((edge position, fiber at the tail), neighbour)`` for every incident cover edge."""
        vi, x = divmod(node, self.degree)
        for pos, wi, direction, j in self._adj[vi]:
            if direction > 0:
                yield (pos, x), wi * self.degree + self._shift(x, j, 1)
            else:
                tail = self._shift(x, j, -1)
                yield (pos, tail), wi * self.degree + tail

    def girth(self) -> float:
        # deck transformations act transitively on each fiber: one start per base vertex
        starts = [i * self.degree for i in range(len(self._vids))]
        if self.base.rank == 0 and len(self.base.edges) < len(self.base.vertices):
            return INF
        return _girth_search(starts, self.neighbours)

    # -- materialization --

    def to_graph(self) -> JsjGraph:
        verts = []
        for v in self.base.vertices:
            for x in range(self.degree):
                verts.append(Vertex(f"{v.id}|{x}", v.kind, v.surface))
        edges = []
        chord_pos = {eid: j for j, eid in enumerate(self.voltages.chords)}
        for e in self.base.edges:
            j = chord_pos.get(e.id, -1)
            for x in range(self.degree):
                y = self._shift(x, j, 1)
                edges.append(Edge(f"{e.id}|{x}", f"{e.u}|{x}", f"{e.v}|{y}", e.boundary, e.exponent))
        return JsjGraph(verts, edges)

    def projection(self) -> tuple[dict, dict]:
        """Vertex and edge maps from :meth:`to_graph` onto ``base``."""
        vmap = {f"{vid}|{x}": vid for vid in self._vids for x in range(self.degree)}
        emap = {f"{e.id}|{x}": e.id for e in self.base.edges for x in range(self.degree)}
        return vmap, emap

    def summary(self) -> dict:
        return {"k": self.k, "ks": list(self.ks), "degree": self.total_degree, "rank": self.rank}

    def __repr__(self) -> str:
        return f"CoverGraph(ks={self.ks}, degree={self.total_degree}, vertices={self.vertex_count})"


def homology_cover(
    g: JsjGraph, k: int, *, cap: int = DEFAULT_CAP, parent: CoverGraph | None = None
) -> CoverGraph:
    """Cover for the kernel of ``pi_1(g) -> H_1(g; Z/k) = (Z/k)^r``.

    ``cap`` bounds the number of cover vertices.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    if not g.is_connected():
        raise NotConnected("graph is not connected")
    r = g.rank
    vertices = len(g.vertices)
    # the log test keeps k**r from being formed when it is astronomically large
    if r and (r * math.log(k) > math.log(cap) + 1 or vertices * k**r > cap):
        raise DegreeOverflow(f"cover of degree {k}^{r} on {vertices} base vertices exceeds the cap of {cap}")
    return CoverGraph(g, voltage_assignment(g, k), parent)


def verify_covering(cover_graph: JsjGraph, base: JsjGraph, vmap: Mapping, emap: Mapping) -> list[str]:
    """Check the covering-map conditions for explicit vertex and edge maps.

    Every cover vertex's star must map bijectively onto the star of its image
    (with edge ends distinguished), fibers must all have the same size, and
    vertex and edge data must be carried unchanged.
    """
    problems = []
    fibers: dict = {}
    for v in cover_graph.vertices:
        fibers.setdefault(vmap[v.id], 0)
        fibers[vmap[v.id]] += 1
        bv = base.vertex(vmap[v.id])
        if (bv.kind, bv.surface) != (v.kind, v.surface):
            problems.append(f"vertex {v.id}: data differs from {bv.id}")
    sizes = set(fibers.values())
    if len(sizes) != 1 or set(fibers) != {v.id for v in base.vertices}:
        problems.append(f"fiber sizes {sorted(sizes)} are not constant")
    for e in cover_graph.edges:
        be = base.edge(emap[e.id])
        if vmap[e.u] != be.u or vmap[e.v] != be.v:
            problems.append(f"edge {e.id}: endpoints do not project onto {be.id}")
        if (be.boundary, be.exponent) != (e.boundary, e.exponent):
            problems.append(f"edge {e.id}: attaching data differs from {be.id}")
    for v in cover_graph.vertices:
        ends = []
        for e in cover_graph.incident(v.id):
            if e.u == v.id:
                ends.append((emap[e.id], "u"))
            if e.v == v.id:
                ends.append((emap[e.id], "v"))
        base_ends = []
        for e in base.incident(vmap[v.id]):
            if e.u == vmap[v.id]:
                base_ends.append((e.id, "u"))
            if e.v == vmap[v.id]:
                base_ends.append((e.id, "v"))
        if sorted(ends, key=repr) != sorted(base_ends, key=repr):
            problems.append(f"vertex {v.id}: star does not map bijectively")
    return problems


# --- certified covers ------------------------------------------------------


@dataclass
class CertifiedCover:
    cover: CoverGraph
    girth: float
    notes: list[str] = field(default_factory=list)

    def __iter__(self):
        return iter((self.cover, self.girth))


def _single_step_search(g: JsjGraph, threshold: int, cap: int, parent: CoverGraph | None):
    """Try ``k = 2, 3, ...``; stop on success, saturation or the cap.

    A reduced closed walk lifts to a closed walk iff its chord-count vector
    vanishes mod ``k``. Walks with zero vector (commutators) give a bound
    ``C`` independent of ``k``; any other such walk has length >= ``k``. So
    ``girth(k) = min(C, f(k))`` with ``f(k) >= k``, and once ``girth(k) < k``
    the value is ``C`` for every larger ``k``.

    Returns ``(hit, best)`` where each is ``(cover, girth)`` or ``None``.
    """
    best = None
    k = 2
    while True:
        try:
            cov = homology_cover(g, k, cap=cap, parent=parent)
        except DegreeOverflow:
            if best is None:
                raise
            return None, best
        gv = cov.girth()
        if gv >= threshold:
            return (cov, gv), best
        if best is None or gv > best[1]:
            best = (cov, gv)
        if gv < k:
            return None, best
        k += 1


def girth_certified_cover(g: JsjGraph, threshold: int, *, cap: int = DEFAULT_CAP) -> CertifiedCover:
    """A homology cover of girth >= ``threshold``, girth measured by BFS.

    First the least ``k`` with ``girth(homology_cover(g, k)) >= threshold``.
    When no single ``k`` can work (the girth saturates below the threshold),
    the best single-step cover is materialized and the search repeats on it,
    giving a tower of iterated homology covers. Each level strictly raises
    the girth, since an embedded circle of minimal length is nonzero in
    ``H_1(Z/k)``. ``DegreeOverflow`` is raised when the next level would pass
    ``cap`` vertices.
    """
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    if not g.is_connected():
        raise NotConnected("graph is not connected")
    base_girth = girth(g)
    if base_girth == INF:
        return CertifiedCover(homology_cover(g, 2, cap=cap), INF, ["no cycles: identity cover"])
    current, parent = g, None
    notes: list[str] = []
    while True:
        hit, best = _single_step_search(current, threshold, cap, parent)
        if hit is not None:
            cov, gv = hit
            return CertifiedCover(cov, gv, notes + [f"certified with ks={list(cov.ks)}"])
        cov, gv = best
        notes.append(
            f"level {len(cov.ks)}: homology covers saturate at girth {gv} < {threshold}; "
            f"descending through k={cov.k}"
        )
        if cov.vertex_count > cap:
            raise DegreeOverflow(f"tower level exceeds the cap of {cap} vertices")
        current, parent = cov.to_graph(), cov


def vrai_family(g: JsjGraph, count: int, *, cap: int = DEFAULT_CAP) -> list[CertifiedCover]:
    """``count`` covers of strictly increasing degree and girth.

    Homology covers for ``k = 2, 3, ...`` are kept when their girth beats the
    previous one. Once the girth saturates, the family continues with the
    mod-2 homology cover of the last member, which strictly raises the girth.
    For a tree the family consists of identity covers: graph covers carry no
    information there and finite-index subgroups must come from the vertex
    groups instead.
    """
    if count < 0:
        raise ValueError("count must be >= 0")
    if not g.is_connected():
        raise NotConnected("graph is not connected")
    if girth(g) == INF:
        note = "girth inf; use presentation-level kernels"
        return [CertifiedCover(homology_cover(g, 2, cap=cap), INF, [note]) for _ in range(count)]
    out: list[CertifiedCover] = []
    last = girth(g)
    k = 2
    while len(out) < count:
        cov = homology_cover(g, k, cap=cap)
        gv = cov.girth()
        if gv > last:
            out.append(CertifiedCover(cov, gv, [f"homology cover, k={k}"]))
            last = gv
        elif gv < k:
            break  # saturated: no larger k helps
        k += 1
    while len(out) < count:
        prev = out[-1].cover
        cov = homology_cover(prev.to_graph(), 2, cap=cap, parent=prev)
        gv = cov.girth()
        out.append(CertifiedCover(cov, gv, [f"tower, ks={list(cov.ks)}"]))
    return out


# --- pipeline and certificate ----------------------------------------------


@dataclass
class PipelineReport:
    valid: bool
    orientable: bool
    edge_ab: bool
    girth_ok: bool
    girth: float
    threshold: int | None
    orientation_applied: bool
    final_graph: JsjGraph
    cover: CoverGraph | None = None
    edge_results: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def large_girth(self) -> bool:
        return self.girth_ok

    def to_json(self) -> dict:
        cover = None
        if self.cover is not None:
            cover = {
                "k": self.cover.k,
                "ks": list(self.cover.ks),
                "degree": self.cover.total_degree,
                "girth": _num(self.girth),
            }
        return {
            "valid": self.valid,
            "girth": _num(self.girth),
            "large_girth": self.girth_ok,
            "threshold": self.threshold,
            "orientation_applied": self.orientation_applied,
            "cover": cover,
            "flags": {"orientable": self.orientable, "edge_ab": self.edge_ab, "girth_ok": self.girth_ok},
            "edges": {str(k): v for k, v in self.edge_results.items()},
            "notes": list(self.notes),
        }


def _num(x: float):
    return "inf" if x == INF else int(x)


def bongpe_pipeline(
    g: JsjGraph,
    p: FinitePresentation,
    edge_words: Mapping[VertexId, Word],
    *,
    cap: int = DEFAULT_CAP,
) -> PipelineReport:
    """Make every surface orientable, test edge words in the abelianization,
    then pass to a cover of large girth."""
    require_valid(g)
    missing = [e.id for e in g.edges if e.id not in edge_words]
    if missing:
        raise ValueError(f"no edge word for edges {missing}")
    notes = [
        "large-girth threshold uses the curve bound 3g+2b (an over-estimate; the check is stricter than needed)"
    ]
    ot = orientation_transform(g)
    current = ot.graph
    if ot.degree == 2:
        notes.append("orientation double cover applied")
    orientable = all(v.surface.orientable for v in current.surface_vertices())
    edge_results = {eid: has_infinite_abelian_image(p, edge_words[eid]) for eid in sorted(edge_words, key=_id_key)}
    edge_ab = all(edge_results.values())
    threshold = large_girth_threshold(current)
    gv = girth(current)
    cover = None
    if threshold is not None and gv < threshold:
        certified = girth_certified_cover(current, threshold, cap=cap)
        cover, gv = certified.cover, certified.girth
        notes += certified.notes
        current = cover.to_graph()
    return PipelineReport(
        valid=True,
        orientable=orientable,
        edge_ab=edge_ab,
        girth_ok=large_girth(current, gv),
        girth=gv,
        threshold=threshold,
        orientation_applied=ot.degree == 2,
        final_graph=current,
        cover=cover,
        edge_results=edge_results,
        notes=notes,
    )


STEP2_CONCLUSION = (
    "the group has no non-injective weak preretraction associated to its cyclic JSJ decomposition"
)


@dataclass(frozen=True)
class Step2Verdict:
    positive: bool
    failed: tuple[str, ...]
    girth: float
    threshold: int | None

    @property
    def verdict(self) -> str:
        return "POSITIVE" if self.positive else f"NEGATIVE({','.join(self.failed)})"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "failed": list(self.failed),
            "girth": _num(self.girth),
            "threshold": self.threshold,
            "conclusion_if_positive": STEP2_CONCLUSION,
        }


def step2_certificate(g: JsjGraph, edge_ab_ok: bool, is_surface_group: bool) -> Step2Verdict:
    """Check the hypotheses under which the conclusion quoted in
    ``STEP2_CONCLUSION`` holds; the conclusion itself is not computed."""
    require_valid(g)
    gv = girth(g)
    failed = []
    if not all(v.surface.orientable for v in g.surface_vertices()):
        failed.append("orientability")
    if not edge_ab_ok:
        failed.append("edge_ab")
    if not large_girth(g, gv):
        failed.append("girth")
    if is_surface_group:
        failed.append("surface_group")
    return Step2Verdict(not failed, tuple(failed), gv, large_girth_threshold(g))


# --- socket graphs ---------------------------------------------------------


def socket_graph(spec: SocketSpec) -> tuple[JsjGraph, dict]:
    """The star: surface vertex ``S`` and cyclic vertices ``c1..cb``.

    Also returns the edge words ``e_i -> h_i`` for :func:`bongpe_pipeline`.
    """
    s = spec.surface
    verts = [Vertex("S", SURFACE, s)] + [Vertex(f"c{i}", CYCLIC) for i in range(1, s.boundary + 1)]
    edges = [Edge(f"e{i}", "S", f"c{i}", i, n) for i, n in enumerate(spec.orders, start=1)]
    words = {f"e{i}": Word.gen(f"h{i}") for i in range(1, s.boundary + 1)}
    return JsjGraph(verts, edges), words


def identified_socket_graph(spec: IdentifiedSocketSpec) -> tuple[JsjGraph, dict]:
    """One surface vertex ``S`` joined to one cyclic vertex ``c`` by ``b`` edges."""
    s = spec.surface
    verts = [Vertex("S", SURFACE, s), Vertex("c", CYCLIC)]
    edges = [Edge(f"e{i}", "S", "c", i, abs(n)) for i, n in enumerate(spec.orders, start=1)]
    words = {f"e{i}": Word.gen(f"h{i}") for i in range(1, s.boundary + 1)}
    return JsjGraph(verts, edges), words


def surface_euler_sum(g: JsjGraph) -> int:
    return sum(euler_characteristic(v.surface) for v in g.surface_vertices())
