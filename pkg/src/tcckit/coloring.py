"""Partial total colorings, properness checks and an exact search oracle.

Elements are vertices (``int``) and edges (canonical ``(min, max)`` pairs).
Colors are integers ``1..k``; an element missing from the map is uncolored.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .graph import Edge, Element, Graph, ParseError, edge_key, format_element

DEFAULT_NODE_BUDGET = 10**8


class ColoringError(ValueError):
    pass


class ForeignElement(ColoringError):
    """An element of the coloring does not exist in the graph."""


class SolverTimeout(RuntimeError):
    def __init__(self, nodes: int):
        self.nodes = nodes
        super().__init__(f"node budget exhausted after {nodes} nodes")


def canon(e: Element) -> Element:
    if isinstance(e, tuple):
        a, b = e
        return edge_key(a, b)
    return e


@dataclass
class PartialTotalColoring:
    k: int
    colors: dict[Element, int] = field(default_factory=dict)

    def __post_init__(self):
        self.colors = {canon(e): c for e, c in dict(self.colors).items()}

    def __getitem__(self, e: Element) -> int | None:
        return self.colors.get(canon(e))

    def get(self, e: Element) -> int | None:
        return self.colors.get(canon(e))

    def __contains__(self, e: Element) -> bool:
        return canon(e) in self.colors

    def __len__(self) -> int:
        return len(self.colors)

    def __iter__(self) -> Iterator[Element]:
        return iter(self.colors)

    def __eq__(self, other) -> bool:
        return (isinstance(other, PartialTotalColoring) and self.k == other.k
                and self.colors == other.colors)

    def copy(self) -> "PartialTotalColoring":
        return PartialTotalColoring(self.k, dict(self.colors))

    def set(self, e: Element, c: int | None) -> None:
        e = canon(e)
        if c is None:
            self.colors.pop(e, None)
        else:
            self.colors[e] = c

    def without(self, *elements: Element) -> "PartialTotalColoring":
        out = self.copy()
        for e in elements:
            out.set(e, None)
        return out

    def permuted(self, perm: Mapping[int, int]) -> "PartialTotalColoring":
        """Apply a color relabelling (colors absent from ``perm`` are kept)."""
        return PartialTotalColoring(self.k, {e: perm.get(c, c) for e, c in self.colors.items()})

    def is_total(self, g: Graph) -> bool:
        return all(e in self.colors for e in g.elements())


# ---------------------------------------------------------------------------
# properness


@dataclass(frozen=True)
class Violation:
    kind: str  # "vertex-vertex", "edge-edge", "vertex-edge", "range"
    a: Element
    b: Element | None
    color: int

    def __str__(self) -> str:
        other = "" if self.b is None else f" / {format_element(self.b)}"
        return f"{self.kind}: {format_element(self.a)}{other} share color {self.color}"


def check_foreign(g: Graph, c: PartialTotalColoring) -> None:
    for e in c.colors:
        if isinstance(e, tuple):
            if not g.has_edge(*e):
                raise ForeignElement(f"{format_element(e)} is not an edge")
        elif not (isinstance(e, int) and 0 <= e < g.n):
            raise ForeignElement(f"{e!r} is not a vertex")


def validate(g: Graph, c: PartialTotalColoring) -> list[Violation]:
    """All properness violations of ``c`` (empty list means proper)."""
    check_foreign(g, c)
    out: list[Violation] = []
    col = c.colors
    for e, x in col.items():
        if not (isinstance(x, int) and 1 <= x <= c.k):
            out.append(Violation("range", e, None, x))
    for a, b in g.edges:
        ca, cb, ce = col.get(a), col.get(b), col.get((a, b))
        if ca is not None and ca == cb:
            out.append(Violation("vertex-vertex", a, b, ca))
        if ce is not None:
            if ce == ca:
                out.append(Violation("vertex-edge", a, (a, b), ce))
            if ce == cb:
                out.append(Violation("vertex-edge", b, (a, b), ce))
    for v in g.vertices():
        seen: dict[int, Edge] = {}
        for u in sorted(g.neighbors(v)):
            e = edge_key(v, u)
            ce = col.get(e)
            if ce is None:
                continue
            if ce in seen:
                out.append(Violation("edge-edge", seen[ce], e, ce))
            else:
                seen[ce] = e
    return out


def is_proper(g: Graph, c: PartialTotalColoring) -> bool:
    return not validate(g, c)


# ---------------------------------------------------------------------------
# color sets


@dataclass(frozen=True)
class ColorSets:
    open: frozenset[int]  # colors on incident edges
    closed: frozenset[int]  # open plus the vertex color
    missing_open: frozenset[int]  # palette minus open
    missing_closed: frozenset[int]  # palette minus closed


def color_sets(g: Graph, c: PartialTotalColoring, v: int) -> ColorSets:
    palette = frozenset(range(1, c.k + 1))
    open_ = frozenset(x for u in g.neighbors(v) if (x := c.get((v, u))) is not None)
    closed = open_ | ({c.get(v)} if c.get(v) is not None else set())
    return ColorSets(open_, frozenset(closed), palette - open_, palette - closed)


def conflicts(g: Graph, e: Element) -> list[Element]:
    """Elements that must receive a color different from ``e``."""
    if isinstance(e, tuple):
        a, b = e
        out: list[Element] = [a, b]
        out += [edge_key(a, x) for x in sorted(g.neighbors(a)) if x != b]
        out += [edge_key(b, x) for x in sorted(g.neighbors(b)) if x != a]
        return out
    return sorted(g.neighbors(e)) + [edge_key(e, u) for u in sorted(g.neighbors(e))]


def available(g: Graph, c: PartialTotalColoring, e: Element) -> list[int]:
    used = {c.get(x) for x in conflicts(g, e)}
    return [x for x in range(1, c.k + 1) if x not in used]


# ---------------------------------------------------------------------------
# exact search


@dataclass
class SolveStats:
    nodes: int = 0


class _Search:
    """DSATUR-style backtracking over the total graph with bitmask domains.

    Branching picks the uncolored element with the fewest available colors,
    ties broken by more uncolored conflicting elements, then by canonical
    element order (vertices before edges, edges lexicographic).  Assigning a
    color updates per-neighbour forbidden counts and fails as soon as some
    neighbour is left with an empty domain.
    """

    def __init__(self, g: Graph, k: int, fixed: PartialTotalColoring,
                 exclude: Iterable[Element], rng: random.Random | None, budget: int):
        self.k = k
        self.full = (1 << (k + 1)) - 2  # bits 1..k
        elems = g.elements()
        self.elems = elems
        index = {e: i for i, e in enumerate(elems)}
        skip = {index[canon(e)] for e in exclude}
        self.nbrs: list[list[int]] = [
            [index[x] for x in conflicts(g, e) if index[x] not in skip] for e in elems
        ]
        m = len(elems)
        self.color = [0] * m
        self.cnt = [[0] * (k + 1) for _ in range(m)]
        self.forb = [0] * m
        self.usage = [0] * (k + 1)
        self.rng = rng
        self.budget = budget
        self.nodes = 0
        self.ok = True
        for e, x in fixed.colors.items():
            i = index[e]
            if i in skip:
                continue
            if not 1 <= x <= k or (self.forb[i] >> x) & 1:
                self.ok = False
                return
            self._assign(i, x)
        self.free = [i for i in range(m) if self.color[i] == 0 and i not in skip]

    def _assign(self, i: int, x: int) -> bool:
        self.color[i] = x
        self.usage[x] += 1
        dead = False
        bit = 1 << x
        for j in self.nbrs[i]:
            row = self.cnt[j]
            row[x] += 1
            if row[x] == 1:
                self.forb[j] |= bit
                if self.color[j] == 0 and self.forb[j] & self.full == self.full:
                    dead = True
        return not dead

    def _unassign(self, i: int) -> None:
        x = self.color[i]
        self.color[i] = 0
        self.usage[x] -= 1
        bit = 1 << x
        for j in self.nbrs[i]:
            row = self.cnt[j]
            row[x] -= 1
            if row[x] == 0:
                self.forb[j] &= ~bit

    def _pick(self, free: list[int]) -> int:
        best = -1
        best_key = None
        for i in free:
            if self.color[i]:
                continue
            dom = (self.full & ~self.forb[i]).bit_count()
            unc = sum(1 for j in self.nbrs[i] if self.color[j] == 0)
            key = (dom, -unc, i)
            if best_key is None or key < best_key:
                best_key, best = key, i
        return best

    def _values(self, i: int) -> list[int]:
        dom = self.full & ~self.forb[i]
        vals = []
        fresh = []
        for x in range(1, self.k + 1):
            if (dom >> x) & 1:
                (vals if self.usage[x] else fresh).append(x)
        # unused colors are interchangeable: one representative suffices
        if fresh:
            vals.append(self.rng.choice(fresh) if self.rng else fresh[0])
        if self.rng:
            self.rng.shuffle(vals)
        return vals

    def run(self) -> bool:
        if not self.ok:
            return False
        remaining = len(self.free)
        return self._rec(remaining)

    def _rec(self, remaining: int) -> bool:
        if remaining == 0:
            return True
        self.nodes += 1
        if self.nodes > self.budget:
            raise SolverTimeout(self.nodes)
        i = self._pick(self.free)
        for x in self._values(i):
            if self._assign(i, x) and self._rec(remaining - 1):
                return True
            self._unassign(i)
        return False


def solve(g: Graph, k: int, fixed: PartialTotalColoring | None = None, *,
          exclude: Iterable[Element] = (), rng: random.Random | None = None,
          node_budget: int = DEFAULT_NODE_BUDGET,
          stats: SolveStats | None = None) -> PartialTotalColoring | None:
    """Extend ``fixed`` to a proper total ``k``-coloring of ``g``.

    Returns ``None`` when the search space is exhausted (no extension exists)
    and raises :class:`SolverTimeout` when ``node_budget`` is exceeded.
    Elements in ``exclude`` are left uncolored and ignored.  With ``rng`` the
    value order is randomised; without it the result is deterministic.
    """
    if k < 1:
        raise ValueError("palette must be positive")
    fixed = fixed if fixed is not None else PartialTotalColoring(k)
    check_foreign(g, fixed)
    s = _Search(g, k, fixed, exclude, rng, node_budget)
    try:
        found = s.run()
    finally:
        if stats is not None:
            stats.nodes = s.nodes
    if not found:
        return None
    out = PartialTotalColoring(k, {e: x for e, x in zip(s.elems, s.color) if x})
    return out


@dataclass(frozen=True)
class ChiResult:
    chi: int
    witness: PartialTotalColoring
    certificate: str  # "degree_bound" or "exhausted"
    nodes_at_lower: int  # search nodes spent proving k-1 infeasible (0 for degree_bound)


def total_chromatic_number(g: Graph, k_max: int | None = None, *,
                           node_budget: int = DEFAULT_NODE_BUDGET) -> ChiResult | None:
    """Smallest feasible palette, with witness and a reason why one less fails.

    Starts at Δ+1 (a maximum-degree vertex and its edges pairwise conflict).
    Returns ``None`` if no palette up to ``k_max`` works.
    """
    lo = g.max_degree + 1
    k_max = k_max if k_max is not None else g.max_degree + 2
    if k_max < lo:
        raise ValueError(f"k_max must be at least {lo}")
    last_nodes = 0
    for k in range(lo, k_max + 1):
        st = SolveStats()
        w = solve(g, k, node_budget=node_budget, stats=st)
        if w is not None:
            cert = "degree_bound" if k == lo else "exhausted"
            return ChiResult(k, w, cert, 0 if k == lo else last_nodes)
        last_nodes = st.nodes
    return None


# ---------------------------------------------------------------------------
# "tcc 1" text format


def dumps_tcc(c: PartialTotalColoring) -> str:
    lines = ["tcc 1", f"k {c.k}"]
    verts = sorted(e for e in c.colors if not isinstance(e, tuple))
    edges = sorted(e for e in c.colors if isinstance(e, tuple))
    lines += [f"v {v} {c.colors[v]}" for v in verts]
    lines += [f"e {a} {b} {c.colors[(a, b)]}" for a, b in edges]
    return "\n".join(lines) + "\n"


def loads_tcc(text: str) -> PartialTotalColoring:
    k = None
    colors: dict[Element, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        if toks == ["tcc", "1"] and k is None and not colors:
            continue
        if not all(t.isdigit() for t in toks[1:]):
            raise ParseError(f"non-integer field in {line!r}", lineno)
        nums = [int(t) for t in toks[1:]]
        if toks[0] == "k" and len(nums) == 1 and k is None:
            k = nums[0]
        elif k is None:
            raise ParseError("palette line 'k <palette>' must come first", lineno)
        elif toks[0] == "v" and len(nums) == 2:
            e: Element = nums[0]
            if e in colors:
                raise ParseError(f"vertex {e} colored twice", lineno)
            colors[e] = nums[1]
        elif toks[0] == "e" and len(nums) == 3:
            if nums[0] == nums[1]:
                raise ParseError("edge with equal endpoints", lineno)
            e = edge_key(nums[0], nums[1])
            if e in colors:
                raise ParseError(f"edge {e} colored twice", lineno)
            colors[e] = nums[2]
        else:
            raise ParseError(f"unexpected line {line!r}", lineno)
    if k is None:
        raise ParseError("missing palette line")
    return PartialTotalColoring(k, colors)


def read_tcc(path: str | Path) -> PartialTotalColoring:
    return loads_tcc(Path(path).read_text())


def write_tcc(c: PartialTotalColoring, path: str | Path) -> None:
    Path(path).write_text(dumps_tcc(c))
