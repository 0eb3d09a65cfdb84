"""Embedded planar graphs given by rotation systems.

A graph is stored as one cyclic neighbour list per vertex.  Faces are traced
with a fixed convention: the dart following ``(u, v)`` is ``(v, w)`` where
``w`` is the successor of ``u`` in the rotation at ``v``.  With this rule the
face ids produced by :func:`trace_faces` are reproducible bit for bit.
"""

from __future__ import annotations

import hashlib
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence, Union

Edge = tuple[int, int]
Element = Union[int, Edge]
Dart = tuple[int, int]


class GraphError(ValueError):
    """Base class for invalid graph input."""


class SelfLoop(GraphError):
    pass


class DuplicateNeighbor(GraphError):
    pass


class AsymmetricRotation(GraphError):
    pass


class NotATriangle(GraphError):
    pass


class ParseError(ValueError):
    """Raised on malformed text input (any of the line formats)."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


def edge_key(a: int, b: int) -> Edge:
    return (a, b) if a < b else (b, a)


def is_edge(e: Element) -> bool:
    return isinstance(e, tuple)


def format_element(e: Element) -> str:
    if isinstance(e, tuple):
        return f"e{e[0]}-{e[1]}"
    return f"v{e}"


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph together with a rotation system."""

    rotation: tuple[tuple[int, ...], ...]

    @property
    def vertex_count(self) -> int:
        return len(self.rotation)

    @property
    def n(self) -> int:
        return len(self.rotation)

    def vertices(self) -> range:
        return range(len(self.rotation))

    @cached_property
    def edges(self) -> tuple[Edge, ...]:
        return tuple(sorted({edge_key(v, u) for v, rot in enumerate(self.rotation) for u in rot}))

    @cached_property
    def _nbr_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(r) for r in self.rotation)

    @cached_property
    def _succ(self) -> tuple[dict[int, int], ...]:
        out = []
        for rot in self.rotation:
            d = len(rot)
            out.append({rot[i]: rot[(i + 1) % d] for i in range(d)})
        return tuple(out)

    def neighbors(self, v: int) -> frozenset[int]:
        return self._nbr_sets[v]

    def degree(self, v: int) -> int:
        return len(self.rotation[v])

    def has_edge(self, a: int, b: int) -> bool:
        return b in self._nbr_sets[a]

    def successor(self, v: int, u: int) -> int:
        """Neighbour following ``u`` in the rotation at ``v``."""
        return self._succ[v][u]

    @property
    def max_degree(self) -> int:
        return max((len(r) for r in self.rotation), default=0)

    @property
    def min_degree(self) -> int:
        return min((len(r) for r in self.rotation), default=0)

    def elements(self) -> list[Element]:
        return list(self.vertices()) + list(self.edges)

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        return len(bfs_distances(self, 0)) == self.n

    def without_edge(self, a: int, b: int) -> "Graph":
        if not self.has_edge(a, b):
            raise GraphError(f"no edge {a}-{b}")
        rot = [list(r) for r in self.rotation]
        rot[a].remove(b)
        rot[b].remove(a)
        return Graph(tuple(tuple(r) for r in rot))

    def digest(self) -> str:
        return hashlib.sha256(dumps_tcg(self).encode()).hexdigest()


def build_graph(rotation_lists: Sequence[Sequence[int]] | Mapping[int, Sequence[int]]) -> Graph:
    """Validate per-vertex rotations and return a :class:`Graph`.

    Accepts a sequence indexed by vertex id or a mapping whose keys are
    exactly ``0..n-1``.
    """
    if isinstance(rotation_lists, Mapping):
        n = len(rotation_lists)
        if set(rotation_lists) != set(range(n)):
            raise GraphError("vertex ids must be 0..n-1")
        rows = [list(rotation_lists[v]) for v in range(n)]
    else:
        rows = [list(r) for r in rotation_lists]
        n = len(rows)
    for v, rot in enumerate(rows):
        seen = set()
        for u in rot:
            if not isinstance(u, int) or isinstance(u, bool) or not 0 <= u < n:
                raise GraphError(f"vertex {v}: neighbour {u!r} out of range")
            if u == v:
                raise SelfLoop(f"vertex {v} lists itself")
            if u in seen:
                raise DuplicateNeighbor(f"vertex {v} lists {u} twice")
            seen.add(u)
    sets = [set(r) for r in rows]
    for v, rot in enumerate(rows):
        for u in rot:
            if v not in sets[u]:
                raise AsymmetricRotation(f"{v} lists {u} but {u} omits {v}")
    return Graph(tuple(tuple(r) for r in rows))


def bfs_distances(g: Graph, source: int | Iterable[int]) -> dict[int, int]:
    starts = [source] if isinstance(source, int) else list(source)
    dist = {s: 0 for s in starts}
    queue = deque(starts)
    while queue:
        x = queue.popleft()
        for y in g.rotation[x]:
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


@dataclass(frozen=True)
class Face:
    id: int
    darts: tuple[Dart, ...]

    @property
    def degree(self) -> int:
        return len(self.darts)

    @property
    def boundary(self) -> tuple[int, ...]:
        """Boundary walk as a vertex sequence (repeats at cut vertices)."""
        return tuple(d[0] for d in self.darts)

    def vertex_set(self) -> frozenset[int]:
        return frozenset(d[0] for d in self.darts)


@dataclass(frozen=True)
class FaceSet:
    faces: tuple[Face, ...]
    dart_face: Mapping[Dart, int] = field(repr=False)

    def __len__(self) -> int:
        return len(self.faces)

    def __iter__(self) -> Iterator[Face]:
        return iter(self.faces)

    def __getitem__(self, i: int) -> Face:
        return self.faces[i]

    @property
    def face_degree(self) -> tuple[int, ...]:
        return tuple(f.degree for f in self.faces)

    def corner_face(self, g: Graph, v: int, a: int) -> Face:
        """Face at the corner of ``v`` between ``a`` and its successor."""
        return self.faces[self.dart_face[(a, v)]]

    def corners(self, g: Graph, v: int) -> list[Face]:
        """Faces at each corner of ``v``, in rotation order."""
        return [self.faces[self.dart_face[(a, v)]] for a in g.rotation[v]]


def trace_faces(g: Graph) -> FaceSet:
    dart_face: dict[Dart, int] = {}
    faces: list[Face] = []
    for v in g.vertices():
        for u in g.rotation[v]:
            if (v, u) in dart_face:
                continue
            fid = len(faces)
            walk: list[Dart] = []
            d = (v, u)
            while d not in dart_face:
                dart_face[d] = fid
                walk.append(d)
                a, b = d
                d = (b, g.successor(b, a))
            faces.append(Face(fid, tuple(walk)))
    return FaceSet(tuple(faces), dart_face)


def euler_characteristic(g: Graph, fs: FaceSet | None = None) -> int:
    fs = fs if fs is not None else trace_faces(g)
    return g.n - len(g.edges) + len(fs)


def is_plane_embedding(g: Graph, fs: FaceSet | None = None) -> bool:
    """True iff ``g`` is connected and its rotation system has genus zero."""
    return g.n > 0 and g.is_connected() and euler_characteristic(g, fs) == 2


@dataclass(frozen=True)
class DegreeInfo:
    degree: tuple[int, ...]
    max_degree: int
    min_degree: int
    neighbors: tuple[frozenset[int], ...]


def degree_query(g: Graph) -> DegreeInfo:
    deg = tuple(len(r) for r in g.rotation)
    return DegreeInfo(deg, max(deg, default=0), min(deg, default=0),
                      tuple(g.neighbors(v) for v in g.vertices()))


@dataclass(frozen=True)
class TriangleClass:
    degrees: tuple[int, int, int]
    admissible: bool
    reason: str | None = None


def triangle_type(degrees: Iterable[int]) -> TriangleClass:
    t = tuple(sorted(degrees))
    if len(t) != 3:
        raise NotATriangle("need three degrees")
    if t[0] <= 3:
        return TriangleClass(t, False, "3- vertex on a triangle")
    if t[1] <= 4:
        return TriangleClass(t, False, "two 4- vertices on a triangle")
    if t == (4, 5, 5):
        return TriangleClass(t, False, "(4,5,5)-triangle")
    return TriangleClass(t, True)


def classify_triangle(g: Graph, f: Face) -> TriangleClass:
    verts = f.vertex_set()
    if f.degree != 3 or len(verts) != 3:
        raise NotATriangle(f"face {f.id} has degree {f.degree}")
    return triangle_type(g.degree(x) for x in verts)


def incident_face_count(g: Graph, fs: FaceSet, v: int, k: int) -> int:
    """Number of corners of ``v`` lying in a ``k``-face."""
    return sum(1 for f in fs.corners(g, v) if f.degree == k)


# ---------------------------------------------------------------------------
# "tcg 1" text format


def dumps_tcg(g: Graph, comments: Sequence[str] = ()) -> str:
    lines = ["tcg 1"]
    lines += [f"# {c}" for c in comments]
    lines.append(f"n {g.n}")
    for v, rot in enumerate(g.rotation):
        lines.append(" ".join(["r", str(v), *map(str, rot)]))
    return "\n".join(lines) + "\n"


def _int(tok: str, lineno: int) -> int:
    if not tok.isdigit():
        raise ParseError(f"expected a non-negative integer, got {tok!r}", lineno)
    return int(tok)


def loads_tcg(text: str) -> Graph:
    rows: dict[int, list[int]] = {}
    n: int | None = None
    header = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        if not header:
            if toks != ["tcg", "1"]:
                raise ParseError("expected header 'tcg 1'", lineno)
            header = True
        elif n is None:
            if len(toks) != 2 or toks[0] != "n":
                raise ParseError("expected 'n <count>'", lineno)
            n = _int(toks[1], lineno)
        else:
            if toks[0] != "r" or len(toks) < 2:
                raise ParseError(f"unexpected line {line!r}", lineno)
            v = _int(toks[1], lineno)
            if v >= n:
                raise ParseError(f"vertex {v} out of range", lineno)
            if v in rows:
                raise ParseError(f"vertex {v} listed twice", lineno)
            rows[v] = [_int(t, lineno) for t in toks[2:]]
    if not header or n is None:
        raise ParseError("missing header or vertex count")
    missing = [v for v in range(n) if v not in rows]
    if missing:
        raise ParseError(f"no rotation line for vertices {missing[:5]}")
    try:
        return build_graph([rows[v] for v in range(n)])
    except GraphError as exc:
        raise ParseError(str(exc)) from exc


def read_tcg(path: str | Path) -> Graph:
    return loads_tcg(Path(path).read_text())


def write_tcg(g: Graph, path: str | Path, comments: Sequence[str] = ()) -> None:
    Path(path).write_text(dumps_tcg(g, comments))


def from_edges(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    """Graph with neighbours in ascending order (no planarity implied)."""
    nbrs: list[set[int]] = [set() for _ in range(n)]
    for a, b in edges:
        nbrs[a].add(b)
        nbrs[b].add(a)
    return build_graph([sorted(s) for s in nbrs])
