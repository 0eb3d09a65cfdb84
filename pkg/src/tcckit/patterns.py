"""Subgraph patterns, fans/wheels, degree-labelled sequences around a vertex,
and the structural predicates a minimal counterexample must satisfy."""

from __future__ import annotations

import hashlib
import os
import re
from dataclasses import dataclass, field
from importlib import resources
from itertools import combinations
from pathlib import Path
from typing import Iterable, Mapping, Sequence, Union

from .graph import FaceSet, Graph, ParseError, trace_faces

FORBIDDEN = ("mushroom", "tent", "cone")

PREDICATE_RULES = {
    "max-degree": "a vertex of degree above 6",
    "forbidden-subgraph": "a mushroom, tent or cone subgraph",
    "low-degree": "a vertex of degree at most 2",
    "3-vertex-triangle": "a 3-vertex on a triangle",
    "3-vertex-neighbor": "a 3-vertex with a neighbour of degree other than 6",
    "two-4-triangle": "a triangle with two 4-vertices",
    "455-triangle": "a (4,5,5)-triangle",
    "many-3-neighbors": "a 6-vertex with five or more 3-neighbours",
    "456-3-neighbor": "the 6-vertex of a (4,5,6)-triangle has a 3-neighbour",
    "456-shared-edge": "an edge at the 4-vertex of a (4,5,6)-triangle lies on a second triangle",
    "456-4-neighbors": "the 6-vertex of a (4,5,6)-triangle has three or more 4-neighbours",
    "646-3-neighbor": "[6,4,6] around v, a second 4-neighbour and a 3-neighbour",
    "646-4646": "[6,4,6] around v, a second 4-neighbour and a [4,6,4,6] around v",
    "646-466466": "[6,4,6] around v, a second 4-neighbour and a [4,6,6,4,6,6] around v",
}
CATALOG_ENV = "TCCKIT_CATALOG"


# ---------------------------------------------------------------------------
# degree specs: 6, "6", "5+", "4-"


@dataclass(frozen=True)
class DegreeSpec:
    value: int
    mode: str = "="  # "=", "+" (at least), "-" (at most)

    def accepts(self, d: int) -> bool:
        if self.mode == "+":
            return d >= self.value
        if self.mode == "-":
            return d <= self.value
        return d == self.value

    def __str__(self) -> str:
        return f"{self.value}" if self.mode == "=" else f"{self.value}{self.mode}"


_SPEC_RE = re.compile(r"^(\d+)([+-]?)$")


def parse_degree_spec(spec: Union[int, str, DegreeSpec]) -> DegreeSpec:
    if isinstance(spec, DegreeSpec):
        return spec
    if isinstance(spec, int):
        return DegreeSpec(spec)
    m = _SPEC_RE.match(spec.strip().replace("⁺", "+").replace("⁻", "-"))
    if not m:
        raise ValueError(f"bad degree spec {spec!r}")
    return DegreeSpec(int(m.group(1)), m.group(2) or "=")


# ---------------------------------------------------------------------------
# patterns and catalogue


@dataclass(frozen=True)
class PatternGraph:
    n: int
    edges: tuple[tuple[int, int], ...]
    degree: Mapping[int, DegreeSpec] = field(default_factory=dict)

    def __post_init__(self):
        seen = set()
        for a, b in self.edges:
            if a == b or not (0 <= a < self.n and 0 <= b < self.n):
                raise ValueError(f"bad pattern edge {a}-{b}")
            key = (min(a, b), max(a, b))
            if key in seen:
                raise ValueError(f"repeated pattern edge {a}-{b}")
            seen.add(key)

    def adjacency(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.n)]
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        adj = self.adjacency()
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for y in adj[x] - seen:
                seen.add(y)
                stack.append(y)
        return len(seen) == self.n

    @classmethod
    def from_graph(cls, g: Graph) -> "PatternGraph":
        return cls(g.n, g.edges)


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    pattern: PatternGraph
    note: str = ""


@dataclass(frozen=True)
class PatternCatalog:
    entries: Mapping[str, CatalogEntry]
    digest: str
    source: str = "<memory>"

    def __getitem__(self, name: str) -> PatternGraph:
        return self.entries[name].pattern

    def __contains__(self, name: str) -> bool:
        return name in self.entries

    def names(self) -> list[str]:
        return list(self.entries)


def loads_catalog(text: str, source: str = "<string>") -> PatternCatalog:
    entries: dict[str, CatalogEntry] = {}
    cur: dict | None = None
    header = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        if not header:
            if toks != ["patcat", "1"]:
                raise ParseError("expected header 'patcat 1'", lineno)
            header = True
            continue
        head = toks[0]
        if cur is None:
            if head != "pattern" or len(toks) != 2:
                raise ParseError("expected 'pattern <name>'", lineno)
            if toks[1] in entries:
                raise ParseError(f"duplicate pattern {toks[1]!r}", lineno)
            cur = {"name": toks[1], "n": None, "edges": [], "deg": {}, "note": ""}
        elif head == "note":
            cur["note"] = line[4:].strip()
        elif head == "n" and len(toks) == 2 and toks[1].isdigit():
            cur["n"] = int(toks[1])
        elif head == "e" and len(toks) == 3 and all(t.isdigit() for t in toks[1:]):
            cur["edges"].append((int(toks[1]), int(toks[2])))
        elif head == "deg" and len(toks) == 3 and toks[1].isdigit():
            try:
                cur["deg"][int(toks[1])] = parse_degree_spec(toks[2])
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from exc
        elif head == "end" and len(toks) == 1:
            if cur["n"] is None:
                raise ParseError(f"pattern {cur['name']} has no vertex count", lineno)
            try:
                p = PatternGraph(cur["n"], tuple(cur["edges"]), dict(cur["deg"]))
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from exc
            if not p.is_connected():
                raise ParseError(f"pattern {cur['name']} is not connected", lineno)
            entries[cur["name"]] = CatalogEntry(cur["name"], p, cur["note"])
            cur = None
        else:
            raise ParseError(f"unexpected line {line!r}", lineno)
    if cur is not None:
        raise ParseError(f"pattern {cur['name']} not terminated by 'end'")
    if not header:
        raise ParseError("empty catalogue")
    return PatternCatalog(entries, hashlib.sha256(text.encode()).hexdigest(), source)


def load_catalog(path: str | Path | None = None) -> PatternCatalog:
    """Load a catalogue; ``$TCCKIT_CATALOG`` overrides the shipped file."""
    path = path or os.environ.get(CATALOG_ENV)
    if path:
        return loads_catalog(Path(path).read_text(), str(path))
    text = resources.files("tcckit").joinpath("data/catalog.patcat").read_text()
    return loads_catalog(text, "tcckit:data/catalog.patcat")


_DEFAULT: PatternCatalog | None = None


def default_catalog() -> PatternCatalog:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = load_catalog()
    return _DEFAULT


# ---------------------------------------------------------------------------
# subgraph matching


@dataclass(frozen=True)
class Match:
    mapping: tuple[int, ...]  # pattern vertex i -> host vertex mapping[i]

    def edges(self, p: PatternGraph) -> tuple[tuple[int, int], ...]:
        m = self.mapping
        return tuple(sorted((min(m[a], m[b]), max(m[a], m[b])) for a, b in p.edges))

    @property
    def image(self) -> frozenset[int]:
        return frozenset(self.mapping)


def subgraph_match(g: Graph, p: PatternGraph, limit: int | None = None,
                   induced: bool = False) -> list[Match]:
    """Backtracking (mono/iso)morphism search.

    Pattern vertices are assigned in index order with candidates in ascending
    host order, so matches come out lexicographically by mapped host ids.
    """
    if p.n == 0:
        return [Match(())]
    if p.n > g.n:
        return []
    padj = p.adjacency()
    pdeg = [len(a) for a in padj]
    earlier_adj = [sorted(j for j in padj[i] if j < i) for i in range(p.n)]
    earlier_non = [[j for j in range(i) if j not in padj[i]] for i in range(p.n)]
    hdeg = [g.degree(v) for v in g.vertices()]

    def ok_vertex(i: int, h: int) -> bool:
        if hdeg[h] < pdeg[i]:
            return False
        spec = p.degree.get(i)
        return spec is None or spec.accepts(hdeg[h])

    all_vertices = [h for h in g.vertices()]
    sorted_nbrs = [sorted(g.rotation[h]) for h in g.vertices()]
    mapping = [-1] * p.n
    used = [False] * g.n
    out: list[Match] = []

    def extend(i: int) -> bool:
        if i == p.n:
            out.append(Match(tuple(mapping)))
            return limit is not None and len(out) >= limit
        anchors = earlier_adj[i]
        cands = sorted_nbrs[mapping[anchors[0]]] if anchors else all_vertices
        for h in cands:
            if used[h] or not ok_vertex(i, h):
                continue
            if any(not g.has_edge(mapping[j], h) for j in anchors[1:]):
                continue
            if induced and any(g.has_edge(mapping[j], h) for j in earlier_non[i]):
                continue
            mapping[i] = h
            used[h] = True
            stop = extend(i + 1)
            used[h] = False
            mapping[i] = -1
            if stop:
                return True
        return False

    extend(0)
    return out


@dataclass(frozen=True)
class ForbiddenReport:
    found: Mapping[str, Match | None]
    max_degree: int
    max_degree_cap: int = 6

    @property
    def admissible(self) -> bool:
        return self.max_degree <= self.max_degree_cap and all(m is None for m in self.found.values())

    def first_hit(self) -> str | None:
        for name, m in self.found.items():
            if m is not None:
                return name
        return None


def contains_forbidden(g: Graph, catalog: PatternCatalog | None = None,
                       names: Sequence[str] = FORBIDDEN) -> ForbiddenReport:
    catalog = catalog or default_catalog()
    found = {}
    for name in names:
        hits = subgraph_match(g, catalog[name], limit=1)
        found[name] = hits[0] if hits else None
    return ForbiddenReport(found, g.max_degree)


# ---------------------------------------------------------------------------
# sequences around a vertex


@dataclass(frozen=True)
class AroundSequence:
    hub: int
    seq: tuple[int, ...]
    closed: bool = False

    def __len__(self) -> int:
        return len(self.seq)

    @property
    def middle(self) -> tuple[int, ...]:
        k = len(self.seq)
        if k % 2:
            return (self.seq[(k + 1) // 2 - 1],)
        return (self.seq[k // 2 - 1], self.seq[k // 2])

    def is_valid(self, g: Graph) -> bool:
        s = self.seq
        if len(set(s)) != len(s) or self.hub in s:
            return False
        if any(not g.has_edge(self.hub, y) for y in s):
            return False
        if any(not g.has_edge(a, b) for a, b in zip(s, s[1:])):
            return False
        return not self.closed or (len(s) >= 3 and g.has_edge(s[-1], s[0]))


def _cycle_key(seq: Sequence[int]) -> tuple[int, ...]:
    k = len(seq)
    forms = []
    for s in (list(seq), list(reversed(seq))):
        for i in range(k):
            forms.append(tuple(s[i:] + s[:i]))
    return min(forms)


def _path_key(seq: Sequence[int]) -> tuple[int, ...]:
    t = tuple(seq)
    return min(t, t[::-1])


def _neighbor_paths(g: Graph, v: int, length: int, accept=None):
    """Simple paths of ``length`` vertices inside N(v)."""
    nbrs = g.neighbors(v)
    local = {y: sorted(g.neighbors(y) & nbrs) for y in nbrs}
    path: list[int] = []
    on_path: set[int] = set()

    def grow():
        if len(path) == length:
            yield tuple(path)
            return
        i = len(path)
        cands = sorted(nbrs) if not path else local[path[-1]]
        for y in cands:
            if y in on_path or (accept is not None and not accept(i, y)):
                continue
            path.append(y)
            on_path.add(y)
            yield from grow()
            path.pop()
            on_path.discard(y)

    yield from grow()


def find_around(g: Graph, v: int, degree_pattern: Sequence[Union[int, str, DegreeSpec]],
                closed: bool = False) -> list[AroundSequence]:
    """All ``[x1..xk]`` around (or surrounding, if ``closed``) ``v``.

    Sequences are reported in the orientation of ``degree_pattern``; a vertex
    sequence readable both ways is kept once.
    """
    specs = [parse_degree_spec(s) for s in degree_pattern]
    k = len(specs)
    if k < 2:
        raise ValueError("need at least two degree specs")
    if closed and k < 3:
        raise ValueError("a surrounding sequence needs at least three vertices")
    out: dict[tuple[int, ...], AroundSequence] = {}
    for seq in _neighbor_paths(g, v, k, accept=lambda i, y: specs[i].accepts(g.degree(y))):
        if closed and not g.has_edge(seq[-1], seq[0]):
            continue
        key = _cycle_key(seq) if closed else _path_key(seq)
        out.setdefault(key, AroundSequence(v, seq, closed))
    return sorted(out.values(), key=lambda a: a.seq)


def find_fans_wheels(g: Graph, k: int) -> list[tuple[int, AroundSequence]]:
    """Every k-fan (open sequence of k+1 rim vertices) and every k-wheel
    (closed sequence of k rim vertices), once each up to reversal/rotation."""
    if k < 2:
        raise ValueError("k must be at least 2")
    out: list[tuple[int, AroundSequence]] = []
    for v in g.vertices():
        d = g.degree(v)
        if d >= k + 1:
            for seq in _neighbor_paths(g, v, k + 1):
                if seq[0] < seq[-1]:
                    out.append((v, AroundSequence(v, seq, False)))
        if k >= 3 and d >= k:
            for seq in _neighbor_paths(g, v, k):
                if g.has_edge(seq[-1], seq[0]) and seq[0] == min(seq) and seq[1] < seq[-1]:
                    out.append((v, AroundSequence(v, seq, True)))
    return out


# ---------------------------------------------------------------------------
# minimal-counterexample predicates


@dataclass(frozen=True)
class Violation:
    rule: str
    witness: tuple[int, ...]
    detail: str = ""

    def to_json(self) -> dict:
        return {"rule": self.rule, "witness": list(self.witness), "detail": self.detail}


@dataclass(frozen=True)
class PredicateReport:
    violations: tuple[Violation, ...]

    def by_rule(self, rule: str) -> list[Violation]:
        return [x for x in self.violations if x.rule == rule]

    def rules(self) -> set[str]:
        return {x.rule for x in self.violations}

    @property
    def clean(self) -> bool:
        return not self.violations

    def witness_vertices(self) -> set[int]:
        return {w for x in self.violations for w in x.witness}


def triangles(g: Graph) -> list[tuple[int, int, int]]:
    out = []
    for a, b in g.edges:
        for c in g.neighbors(a) & g.neighbors(b):
            if c > b:
                out.append((a, b, c))
    return out


def check_counterexample_predicates(g: Graph, fs: FaceSet | None = None,
                                    catalog: PatternCatalog | None = None,
                                    include_class: bool = True) -> PredicateReport:
    """List every witness violating the structural properties a smallest
    non-8-colorable graph of the class must have.  Rule ids are listed in
    :data:`PREDICATE_RULES`; "max-degree" and "forbidden-subgraph" describe
    class membership and are checked only when ``include_class``.

    Triangles are 3-cycles of the graph; face data is not needed for any
    rule, ``fs`` is accepted for interface symmetry.
    """
    deg = [g.degree(v) for v in g.vertices()]
    out: list[Violation] = []
    tris = triangles(g)
    on_triangle = {x for t in tris for x in t}

    if include_class:
        for v in g.vertices():
            if deg[v] > 6:
                out.append(Violation("max-degree", (v,), f"degree {deg[v]} > 6"))
        rep = contains_forbidden(g, catalog)
        for name, m in rep.found.items():
            if m is not None:
                out.append(Violation("forbidden-subgraph", m.mapping, name))

    for v in g.vertices():
        if deg[v] < 3:
            out.append(Violation("low-degree", (v,), f"degree {deg[v]}"))
        elif deg[v] == 3:
            if v in on_triangle:
                out.append(Violation("3-vertex-triangle", (v,), "3-vertex on a triangle"))
            bad = sorted(u for u in g.neighbors(v) if deg[u] != 6)
            if bad:
                out.append(Violation("3-vertex-neighbor", (v, *bad), "3-vertex with a non-6 neighbour"))

    for t in tris:
        ds = sorted(deg[x] for x in t)
        if sum(1 for d in ds if d == 4) >= 2:
            out.append(Violation("two-4-triangle", t, "two 4-vertices on a triangle"))
        if ds == [4, 5, 5]:
            out.append(Violation("455-triangle", t, "(4,5,5)-triangle"))

    for v in g.vertices():
        if deg[v] == 6:
            threes = sorted(u for u in g.neighbors(v) if deg[u] == 3)
            if len(threes) > 4:
                out.append(Violation("many-3-neighbors", (v, *threes), f"{len(threes)} 3-neighbours"))

    tri_set = set(tris)
    for t in tris:
        by_deg = {deg[x]: x for x in t}
        if sorted(deg[x] for x in t) != [4, 5, 6]:
            continue
        u, w, v = by_deg[4], by_deg[5], by_deg[6]
        threes = sorted(z for z in g.neighbors(v) if deg[z] == 3)
        if threes:
            out.append(Violation("456-3-neighbor", (u, w, v, *threes), "6-vertex of a (4,5,6)-triangle has a 3-neighbour"))
        for a, b in ((u, v), (u, w)):
            others = sorted(c for c in g.neighbors(a) & g.neighbors(b)
                            if tuple(sorted((a, b, c))) in tri_set and c not in t)
            if others:
                out.append(Violation("456-shared-edge", (u, w, v, *others),
                                     f"edge {a}-{b} lies on another triangle"))
        fours = sorted(z for z in g.neighbors(v) if deg[z] == 4)
        if len(fours) > 2:
            out.append(Violation("456-4-neighbors", (u, w, v, *fours), f"{len(fours)} 4-neighbours"))

    for v in g.vertices():
        if deg[v] != 6:
            continue
        for seq in find_around(g, v, [6, 4, 6]):
            u = seq.seq[1]
            fours = [z for z in g.neighbors(v) if deg[z] == 4 and z != u]
            if not fours:
                continue
            base = (v, *seq.seq)
            threes = sorted(z for z in g.neighbors(v) if deg[z] == 3)
            if threes:
                out.append(Violation("646-3-neighbor", base + tuple(threes), "3-neighbour"))
            for s in find_around(g, v, [4, 6, 4, 6]):
                out.append(Violation("646-4646", base + s.seq, "[4,6,4,6] around v"))
            for s in find_around(g, v, [4, 6, 6, 4, 6, 6]):
                out.append(Violation("646-466466", base + s.seq, "[4,6,6,4,6,6] around v"))

    # de-duplicate while keeping first-seen order
    seen = set()
    uniq = []
    for x in out:
        key = (x.rule, x.witness, x.detail)
        if key not in seen:
            seen.add(key)
            uniq.append(x)
    return PredicateReport(tuple(uniq))
