"""Explicit recoloring procedures around a [6,4,6] configuration, and an
oracle-based reducibility test.

Setting: ``v`` is a 6-vertex with neighbours ``w, u, y`` where ``d(w) = d(y)
= 6``, ``d(u) = 4``, and ``wu, uy`` are edges; ``x`` is the fourth neighbour
of ``u`` and ``v1, v2, v3`` are the remaining neighbours of ``v``.

* :func:`extend_edge_uv` takes a total 8-coloring missing the edge ``uv``
  (and the vertex ``u``) and colors ``uv``, recoloring a few nearby edges.
* :func:`extend_vertex_u` takes a total 8-coloring missing only ``u`` and
  colors ``u`` when ``v`` has a second 4-neighbour together with a
  3-neighbour, a ``[4,6,4,6]`` or a ``[4,6,6,4,6,6]`` around ``v``.

Both first relabel colors into a fixed frame (the relabelling is recorded and
undone on output) and then walk a decision tree whose every leaf is a short
list of recolorings.  Each move is checked for properness before it is
committed; a move that would clash, or a state no branch accounts for,
raises :class:`CaseNotCovered`, which by default triggers a logged local
exhaustive search instead.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .coloring import (PartialTotalColoring, SolverTimeout, SolveStats, available,
                       color_sets, conflicts, solve, validate)
from .graph import Element, Graph, bfs_distances, edge_key, format_element

log = logging.getLogger(__name__)

PALETTE = 8
FRAME_U = {"x": 1, "w": 2, "v": 3, "y": 4, "xu": 5, "wu": 6, "uv": 7, "uy": 8}


class ExtensionError(Exception):
    pass


class HypothesisViolated(ExtensionError):
    pass


class CaseNotCovered(ExtensionError):
    def __init__(self, label: str, detail: str):
        self.label = label
        self.detail = detail
        super().__init__(f"{label}: {detail}")


class DerivedFactFailed(ExtensionError):
    def __init__(self, fact: "Fact"):
        self.fact = fact
        super().__init__(f"derived fact failed: {fact.name} ({fact.detail})")


# ---------------------------------------------------------------------------
# locating configurations


@dataclass(frozen=True)
class Config646:
    v: int
    u: int
    w: int
    y: int
    x: int
    others: tuple[int, int, int]  # v1, v2, v3
    four_nbr: int | None = None
    three_nbr: int | None = None
    t: int | None = None
    r: int | None = None
    p: int | None = None
    hypotheses: frozenset[str] = frozenset()

    @property
    def v1(self) -> int:
        return self.others[0]

    @property
    def v2(self) -> int:
        return self.others[1]

    @property
    def v3(self) -> int:
        return self.others[2]

    def roles(self) -> dict[str, int]:
        out = {"v": self.v, "u": self.u, "w": self.w, "y": self.y, "x": self.x,
               "v1": self.v1, "v2": self.v2, "v3": self.v3}
        for nm in ("t", "r", "p"):
            if getattr(self, nm) is not None:
                out[nm] = getattr(self, nm)
        return out

    def to_json(self) -> dict:
        d = self.roles()
        d["hypotheses"] = sorted(self.hypotheses)
        return d


def _orient(g: Graph, v: int, u: int, w: int, y: int, x: int) -> Config646 | None:
    deg = g.degree
    others = sorted(g.neighbors(v) - {u, w, y})
    if len(others) != 3:
        return None
    fours = [z for z in others if deg(z) == 4]
    threes = [z for z in others if deg(z) == 3 and not g.has_edge(z, u)]
    hyp = set()
    if fours:
        hyp.add("base")
    # (iii): [r, t, w, u, y, p] around v
    for r in fours:
        for t in others:
            for p in others:
                if len({r, t, p}) == 3 and deg(t) == 6 and deg(p) == 6 and g.has_edge(r, t) \
                        and g.has_edge(t, w) and g.has_edge(y, p):
                    return Config646(v, u, w, y, x, (r, t, p), r, None, t, r, p,
                                     frozenset(hyp | {"iii"}))
    # (ii): [t, w, u, y] around v with t a 4-vertex
    for t in fours:
        if g.has_edge(t, w):
            rest = [z for z in others if z != t]
            hyp2 = hyp | {"ii"}
            three = next((z for z in rest if z in threes), None)
            if three is not None:
                hyp2.add("i")
                rest = [z for z in rest if z != three] + [three]
            return Config646(v, u, w, y, x, (t, *rest), t, three, t, None, None, frozenset(hyp2))
    if fours:
        v1 = fours[0]
        rest = [z for z in others if z != v1]
        three = next((z for z in rest if z in threes), None)
        if three is not None:
            hyp.add("i")
            rest = [z for z in rest if z != three] + [three]
        return Config646(v, u, w, y, x, (v1, *rest), v1, three, None, None, None, frozenset(hyp))
    return Config646(v, u, w, y, x, tuple(others), None, None, None, None, None, frozenset(hyp))


_RANK = {"iii": 3, "ii": 2}


def locate_config(g: Graph) -> list[Config646]:
    """Every ``[6,4,6]`` around a 6-vertex, once per (v, u, {w, y}).

    The orientation of ``w`` and ``y`` is chosen so that the strongest
    hypothesis applies (``iii`` before ``ii``), otherwise ``w < y``.
    """
    out = []
    deg = g.degree
    for v in g.vertices():
        if deg(v) != 6:
            continue
        for u in sorted(g.neighbors(v)):
            if deg(u) != 4:
                continue
            cand = sorted(z for z in g.neighbors(u) & g.neighbors(v) if deg(z) == 6)
            for w, y in combinations(cand, 2):
                best = None
                for a, b in ((w, y), (y, w)):
                    rest = g.neighbors(u) - {v, a, b}
                    if len(rest) != 1:
                        continue
                    cfg = _orient(g, v, u, a, b, next(iter(rest)))
                    if cfg is None:
                        continue
                    score = max((_RANK.get(h, 0) for h in cfg.hypotheses), default=0)
                    if best is None or score > best[0]:
                        best = (score, cfg)
                if best is not None:
                    out.append(best[1])
    return out


# ---------------------------------------------------------------------------
# outcomes and traces


@dataclass(frozen=True)
class TraceStep:
    step: int
    case_label: str
    element: Element
    old: int | None
    new: int | None

    def to_json(self) -> dict:
        return {"step": self.step, "case_label": self.case_label,
                "element": format_element(self.element), "old": self.old, "new": self.new}


@dataclass
class ExtensionOutcome:
    coloring: PartialTotalColoring
    trace: list[TraceStep]
    stage: str
    case_label: str
    permutation: dict[int, int] = field(default_factory=dict)  # caller color -> frame color
    fallback: bool = False
    not_covered: str | None = None

    @property
    def constrained(self) -> bool:
        """True when every generic escape failed and a hypothesis-specific
        branch had to finish the job."""
        return self.stage.startswith("part")


def trace_jsonl(trace: Iterable[TraceStep]) -> str:
    return "".join(json.dumps(s.to_json()) + "\n" for s in trace)


def replay_trace(g: Graph, start: PartialTotalColoring, trace: Sequence[TraceStep]) -> list[int]:
    """Apply ``trace`` to ``start``; return the steps after which the
    coloring is improper or the recorded old color does not match."""
    cur = start.copy()
    bad = []
    for s in trace:
        if cur.get(s.element) != s.old:
            bad.append(s.step)
        cur.set(s.element, s.new)
        if validate(g, cur):
            bad.append(s.step)
    return bad


class _Frame:
    """A coloring viewed through a color relabelling and a role map."""

    def __init__(self, g: Graph, col: PartialTotalColoring, roles: dict[str, int],
                 perm: dict[int, int], trace: list[TraceStep]):
        self.g = g
        self.roles = dict(roles)
        self.perm = dict(perm)
        self.col = col.permuted(perm)
        self.trace = trace
        self.label = ""

    def el(self, spec) -> Element:
        if isinstance(spec, str):
            return self.roles[spec]
        a, b = spec
        return edge_key(self.el(a), self.el(b))

    def c(self, spec) -> int | None:
        return self.col.get(self.el(spec))

    def closed(self, name: str) -> frozenset[int]:
        return color_sets(self.g, self.col, self.roles[name]).closed

    def open(self, name: str) -> frozenset[int]:
        return color_sets(self.g, self.col, self.roles[name]).open

    def missing(self, name: str) -> frozenset[int]:
        return color_sets(self.g, self.col, self.roles[name]).missing_closed

    def sole_missing(self, name: str, label: str) -> int:
        m = self.missing(name)
        if len(m) != 1:
            raise CaseNotCovered(label, f"expected one color missing at {name}, found {sorted(m)}")
        return next(iter(m))

    def vertex_colors(self, names: Iterable[str]) -> set[int]:
        return {c for nm in names if nm in self.roles and (c := self.c(nm)) is not None}

    def _inv(self, c: int | None) -> int | None:
        if c is None:
            return None
        for a, b in self.perm.items():
            if b == c:
                return a
        return c

    def move(self, label: str, *changes) -> None:
        resolved = [(self.el(s), c) for s, c in changes]
        new = self.col.copy()
        for e, c in resolved:
            new.set(e, c)
        for e, c in resolved:
            if c is None:
                continue
            if not 1 <= c <= new.k:
                raise CaseNotCovered(label, f"{format_element(e)} would get color {c}")
            for f in conflicts(self.g, e):
                if new.get(f) == c:
                    raise CaseNotCovered(label, f"{format_element(e)}={c} clashes with "
                                                f"{format_element(f)}")
        changed = [(e, self.col.get(e), c) for e, c in resolved if self.col.get(e) != c]
        for e, old, _ in changed:
            if old is not None:
                self.trace.append(TraceStep(len(self.trace), label, e, self._inv(old), None))
        for e, _, c in changed:
            if c is not None:
                self.trace.append(TraceStep(len(self.trace), label, e, None, self._inv(c)))
        self.col = new
        self.label = label

    def relabel(self, cmap: dict[int, int], swap: tuple[str, str] | None = None) -> None:
        self.col = self.col.permuted(cmap)
        self.perm = {a: cmap.get(b, b) for a, b in self.perm.items()}
        if swap:
            a, b = swap
            self.roles[a], self.roles[b] = self.roles[b], self.roles[a]

    def caller_coloring(self) -> PartialTotalColoring:
        inv = {b: a for a, b in self.perm.items()}
        return self.col.permuted(inv)

    def done(self) -> bool:
        return self.c("u") is not None


def _check_roles(g: Graph, cfg: Config646) -> None:
    deg = g.degree
    for nm, d in (("v", 6), ("w", 6), ("y", 6), ("u", 4)):
        if deg(getattr(cfg, nm)) != d:
            raise HypothesisViolated(f"{nm} must have degree {d}")
    for a, b in (("w", "u"), ("u", "v"), ("u", "y"), ("w", "v"), ("v", "y"), ("x", "u")):
        if not g.has_edge(getattr(cfg, a), getattr(cfg, b)):
            raise HypothesisViolated(f"missing edge {a}{b}")
    roles = [cfg.v, cfg.u, cfg.w, cfg.y, cfg.x]
    if len(set(roles)) != 5:
        raise HypothesisViolated("role vertices must be distinct")
    if set(cfg.others) != g.neighbors(cfg.v) - {cfg.u, cfg.w, cfg.y}:
        raise HypothesisViolated("others must be the remaining neighbours of v")


def _check_coloring(g: Graph, col: PartialTotalColoring, missing: set[Element]) -> None:
    if col.k != PALETTE:
        raise HypothesisViolated(f"palette must be {PALETTE}")
    bad = validate(g, col)
    if bad:
        raise HypothesisViolated(f"input coloring is improper: {bad[0]}")
    for e in g.elements():
        if e not in missing and e not in col:
            raise HypothesisViolated(f"{format_element(e)} must be colored")
    for e in missing:
        if e in col:
            raise HypothesisViolated(f"{format_element(e)} must be uncolored")


def _ball(g: Graph, center: int, radius: int = 2) -> list[Element]:
    dist = bfs_distances(g, center)
    near = {x for x, d in dist.items() if d <= radius}
    return sorted(near) + [e for e in g.edges if e[0] in near and e[1] in near]


def _fallback(g: Graph, start: PartialTotalColoring, center: int, exclude: Sequence[Element],
              err: CaseNotCovered, what: str) -> ExtensionOutcome:
    log.warning("%s: case not covered (%s); running local search", what, err)
    ball = _ball(g, center)
    fixed = start.without(*ball, *exclude)
    out = solve(g, PALETTE, fixed, exclude=exclude, node_budget=10**6)
    if out is None:
        raise err
    trace: list[TraceStep] = []
    changed = [e for e in g.elements() if start.get(e) != out.get(e)]
    for e in changed:
        if start.get(e) is not None:
            trace.append(TraceStep(len(trace), "fallback/local-search", e, start.get(e), None))
    for e in changed:
        if out.get(e) is not None:
            trace.append(TraceStep(len(trace), "fallback/local-search", e, None, out.get(e)))
    return ExtensionOutcome(out, trace, "fallback", "fallback/local-search", {}, True, str(err))


# ---------------------------------------------------------------------------
# coloring the edge uv


def extend_edge_uv(g: Graph, h: PartialTotalColoring, cfg: Config646, *,
                   fallback: bool = True) -> ExtensionOutcome:
    """Color ``uv`` given a total 8-coloring of everything except ``uv``.

    A color on ``u`` is erased first; the result colors every element except
    ``u``.
    """
    _check_roles(g, cfg)
    uv = edge_key(cfg.u, cfg.v)
    if h.k != PALETTE:
        raise HypothesisViolated(f"palette must be {PALETTE}")
    _check_coloring(g, h.without(cfg.u), {uv, cfg.u})
    trace: list[TraceStep] = []
    col = h.copy()
    if col.get(cfg.u) is not None:
        trace.append(TraceStep(0, "uv/erase-u", cfg.u, col.get(cfg.u), None))
        col.set(cfg.u, None)
    free = available(g, col, uv)
    if free:
        col.set(uv, free[0])
        trace.append(TraceStep(len(trace), "uv/free", uv, None, free[0]))
        return ExtensionOutcome(col, trace, "direct", "uv/free")
    start = col.copy()
    try:
        f = _edge_frame(g, col, cfg, trace)
        _edge_tree(f)
    except CaseNotCovered as err:
        if not fallback:
            raise
        out = _fallback(g, start, cfg.u, [cfg.u], err, "edge uv")
        pre = trace[:1] if h.get(cfg.u) is not None else []
        out.trace = pre + [TraceStep(len(pre) + s.step, s.case_label, s.element, s.old, s.new)
                           for s in out.trace]
        return out
    return ExtensionOutcome(f.caller_coloring(), trace, "frame", f.label, f.perm)


def _edge_frame(g: Graph, col: PartialTotalColoring, cfg: Config646,
                trace: list[TraceStep]) -> _Frame:
    v, w, y = cfg.v, cfg.w, cfg.y
    cv, cwv, cvy = col[v], col[(w, v)], col[(v, y)]
    rest = sorted(col[(v, z)] for z in cfg.others)
    present = {cv, cwv, cvy, *rest}
    absent = sorted(set(range(1, PALETTE + 1)) - present)
    perm = {cv: 1, cwv: 6, cvy: 2, rest[0]: 3, rest[1]: 4, rest[2]: 5, absent[0]: 7, absent[1]: 8}
    f = _Frame(g, col, cfg.roles(), perm, trace)
    if f.c(("u", "y")) in (7, 8):
        if f.c(("u", "y")) == 8:
            f.relabel({7: 8, 8: 7})
    elif f.c(("w", "u")) in (7, 8):
        f.relabel({2: 6, 6: 2}, swap=("w", "y"))
        if f.c(("u", "y")) == 8:
            f.relabel({7: 8, 8: 7})
    else:
        raise CaseNotCovered("uv/frame", "neither uy nor wu carries a color missing at v")
    return f


def _edge_tree(f: _Frame) -> None:
    uv, uy, wu, xu, wv, vy = ("u", "v"), ("u", "y"), ("w", "u"), ("x", "u"), ("w", "v"), ("v", "y")
    a, b = f.c(xu), f.c(wu)
    c = f.sole_missing("y", "uv/frame")
    cp = f.sole_missing("w", "uv/frame")
    if a == 8:
        if c not in (8, b):
            f.move("uv/a=8/c-other", (uy, c), (uv, 7))
        elif c == b:
            if cp not in (7, 8):
                f.move("uv/a=8/c=b/c'-other", (wu, cp), (uy, b), (uv, 7))
            else:
                f.move("uv/a=8/c=b/c'-in-78", (wv, cp), (uv, 6))
        elif b != 2:
            f.move("uv/a=8/c=8/b!=2", (vy, 8), (uv, 2))
        elif cp in (1, 3, 4, 5):
            f.move("uv/a=8/c=8/b=2/c'-low", (wu, cp), (vy, 8), (uv, 2))
        elif cp in (7, 8):
            f.move("uv/a=8/c=8/b=2/c'-in-78", (wv, cp), (uv, 6))
        else:
            raise CaseNotCovered("uv/a=8/c=8/b=2", f"c'={cp}")
    elif b == 8:
        if cp not in (7, a):
            f.move("uv/b=8/c'-other", (wu, cp), (uv, 8))
        elif cp == 7:
            if a != 6:
                f.move("uv/b=8/c'=7/a!=6", (wv, 7), (uv, 6))
            elif c in (1, 3, 4, 5):
                f.move("uv/b=8/c'=7/a=6/c-low", (uy, c), (uv, 7))
            elif c in (6, 8):
                f.move("uv/b=8/c'=7/a=6/c-in-68", (vy, c), (wv, 7), (uv, 2))
            else:
                raise CaseNotCovered("uv/b=8/c'=7/a=6", f"c={c}")
        else:
            c2s = sorted(f.missing("x") - {a})
            if not c2s:
                raise CaseNotCovered("uv/b=8/c'=a", "no spare color at x")
            c2 = c2s[0]
            if c2 not in (7, 8):
                f.move("uv/b=8/c'=a/c2-other", (xu, c2), (wu, a), (uv, 8))
            elif c2 == 8:
                f.move("uv/b=8/c'=a/c2=8", (xu, 8), (wu, a), (wv, 8), (uv, 6))
            elif c == 6:
                f.move("uv/b=8/c'=a/c2=7/c=6", (xu, 7), (wu, a), (uy, 6), (uv, 8))
            elif c == 8:
                f.move("uv/b=8/c'=a/c2=7/c=8", (xu, 7), (wu, a), (uy, 8), (wv, 8), (uv, 6))
            elif c in {1, 3, 4, 5} - {a}:
                f.move("uv/b=8/c'=a/c2=7/c-low", (xu, 7), (wu, a), (uy, c), (uv, 8))
            elif c == a:
                f.move("uv/b=8/c'=a/c2=7/c=a", (xu, 7), (uy, a), (vy, 7), (uv, 2))
            else:
                raise CaseNotCovered("uv/b=8/c'=a/c2=7", f"c={c}")
    else:
        raise CaseNotCovered("uv/frame", f"a={a}, b={b}")


# ---------------------------------------------------------------------------
# coloring the vertex u


PARTS = ("iii", "ii", "i")


def _pick_part(cfg: Config646, part: str | None) -> str:
    if "base" not in cfg.hypotheses:
        raise HypothesisViolated("v needs a 4-neighbour other than u")
    if part is None:
        for p in PARTS:
            if p in cfg.hypotheses:
                return p
        raise HypothesisViolated("no 3-neighbour, [4,6,4,6] or [4,6,6,4,6,6] around v")
    if part not in cfg.hypotheses:
        raise HypothesisViolated(f"configuration does not satisfy hypothesis ({part})")
    return part


def vertex_frame_perm(g: Graph, col: PartialTotalColoring, cfg: Config646) -> dict[int, int] | None:
    """Relabelling putting ``u``'s surroundings into the fixed frame, or
    ``None`` when those eight colors are not all distinct."""
    src = {"x": col.get(cfg.x), "w": col.get(cfg.w), "v": col.get(cfg.v), "y": col.get(cfg.y),
           "xu": col.get((cfg.x, cfg.u)), "wu": col.get((cfg.w, cfg.u)),
           "uv": col.get((cfg.u, cfg.v)), "uy": col.get((cfg.u, cfg.y))}
    if None in src.values() or len(set(src.values())) != PALETTE:
        return None
    return {src[k]: FRAME_U[k] for k in FRAME_U}


def extend_vertex_u(g: Graph, gcol: PartialTotalColoring, cfg: Config646, part: str | None = None,
                    *, fallback: bool = True) -> ExtensionOutcome:
    """Color ``u`` given a total 8-coloring of everything except ``u``."""
    _check_roles(g, cfg)
    part = _pick_part(cfg, part)
    if part == "i" and cfg.three_nbr is None:
        raise HypothesisViolated("hypothesis (i) needs a 3-neighbour of v")
    _check_coloring(g, gcol, {cfg.u})
    trace: list[TraceStep] = []
    col = gcol.copy()
    free = available(g, col, cfg.u)
    if free:
        col.set(cfg.u, free[0])
        trace.append(TraceStep(0, "u/free", cfg.u, None, free[0]))
        return ExtensionOutcome(col, trace, "direct", "u/free")
    v3 = cfg.three_nbr if part == "i" else None
    if v3 is not None:
        trace.append(TraceStep(0, "u/3nbr/erase", v3, col[v3], None))
        col.set(v3, None)
    start = col.copy()
    try:
        perm = vertex_frame_perm(g, col, cfg)
        if perm is None:
            raise CaseNotCovered("u/frame", "colors around u are not all distinct")
        f = _Frame(g, col, cfg.roles(), perm, trace)
        stage = _vertex_tree(f, part)
        out = f.caller_coloring()
        label, perm_out = f.label, f.perm
    except CaseNotCovered as err:
        if not fallback:
            raise
        res = _fallback(g, start, cfg.u, [], err, f"vertex u ({part})")
        pre = trace[:1] if v3 is not None else []
        res.trace = pre + [TraceStep(len(pre) + s.step, s.case_label, s.element, s.old, s.new)
                           for s in res.trace]
        return res
    if v3 is not None:
        c3 = available(g, out, v3)
        if not c3:
            raise CaseNotCovered("u/3nbr/restore", "no color left for the 3-neighbour")
        out.set(v3, c3[0])
        trace.append(TraceStep(len(trace), "u/3nbr/restore", v3, None, c3[0]))
    return ExtensionOutcome(out, trace, stage, label, perm_out)


def _vertex_tree(f: _Frame, part: str) -> str:
    for stage in (_frame_step, _cbar_v, _wv_step, _cbar_wy, _z_sets):
        name = stage(f)
        if f.done():
            return name
    {"i": _part_three_nbr, "ii": _part_4646, "iii": _part_466466}[part](f)
    if not f.done():
        raise CaseNotCovered(f.label or f"u/part-{part}", "procedure ended without coloring u")
    return f"part:{part}"


E = {"uv": ("u", "v"), "uy": ("u", "y"), "wu": ("w", "u"), "xu": ("x", "u"), "wv": ("w", "v"),
     "vy": ("v", "y"), "vv1": ("v", "v1"), "wt": ("w", "t"), "vt": ("v", "t"), "yp": ("y", "p"),
     "vr": ("v", "r"), "vp": ("v", "p"), "tr": ("t", "r")}


def _frame_step(f: _Frame) -> str:
    for z in ("v", "w", "y"):
        cz = f.closed(z)
        for c3 in (1, 2, 3, 4):
            if c3 not in cz:
                old = f.c(("u", z))
                f.move(f"u/frame/{z}-misses-{c3}", (("u", z), c3), ("u", old))
                return "frame"
    return "frame"


def _vi(f: _Frame) -> set[int]:
    return f.vertex_colors(("v1", "v2", "v3"))


def _cbar_v(f: _Frame) -> str:
    L = "u/cbar-v"
    cv = f.sole_missing("v", L)
    if cv == 5:
        return "cbar-v"
    if cv not in (6, 8):
        raise CaseNotCovered(L, f"missing color at v is {cv}")
    if cv == 6:
        f.relabel({2: 4, 4: 2, 6: 8, 8: 6}, swap=("w", "y"))
    gvy = f.c(E["vy"])
    if gvy in (1, 2):
        f.move(f"{L}=8/vy-low", (E["uy"], gvy), (E["vy"], 8), ("u", 8))
    elif gvy == 5:
        cp, c, gwv = f.sole_missing("w", L), f.sole_missing("y", L), f.c(E["wv"])
        if cp == 7:
            f.move(f"{L}=8/vy=5/c'=7", (E["uv"], gwv), (E["wv"], 7), ("u", 7))
        elif cp == 8:
            f.move(f"{L}=8/vy=5/c'=8", (E["wu"], gwv), (E["wv"], 8), ("u", 6))
        elif cp == 5 and c == 6:
            f.move(f"{L}=8/vy=5/c'=5/c=6", (E["wu"], gwv), (E["wv"], 5), (E["vy"], 8),
                   (E["uy"], 6), ("u", 8))
        elif cp == 5 and c == 7:
            f.move(f"{L}=8/vy=5/c'=5/c=7", (E["uv"], gwv), (E["wv"], 5), (E["vy"], 7), ("u", 7))
        else:
            raise CaseNotCovered(f"{L}=8/vy=5", f"c'={cp}, c={c}")
    elif gvy == 6:
        gwv = f.c(E["wv"])
        if gwv in (1, 4):
            f.move(f"{L}=8/vy=6/wv-low", (E["wu"], gwv), (E["wv"], 6), (E["uy"], 6), (E["vy"], 8),
                   ("u", 8))
        elif gwv == 5:
            _cbar_v_pin(f, f"{L}=8/vy=6/wv=5")
        else:
            raise CaseNotCovered(f"{L}=8/vy=6", f"wv={gwv}")
    else:
        raise CaseNotCovered(f"{L}=8", f"vy={gvy}")
    return "cbar-v"


def _with_wv(cond: bool, cp: int) -> list:
    return [(E["wv"], cp)] if cond else []


def _cbar_v_pin(f: _Frame, L: str) -> None:
    cp, c = f.sole_missing("w", L), f.sole_missing("y", L)
    vi, c1, e1 = _vi(f), f.closed("v1"), f.c(E["vv1"])
    if 5 not in vi:
        f.move(f"{L}/v->5", ("v", 5), (E["uv"], 3), (E["wv"], cp), ("u", 7))
    elif 8 not in vi:
        f.move(f"{L}/v->8", ("v", 8), ("u", 3))
    elif 6 not in vi:
        f.move(f"{L}/v->6", ("v", 6), (E["vy"], c), (E["uv"], 3), *_with_wv(c == 5, cp), ("u", 7))
    elif 5 not in c1:
        f.move(f"{L}/vv1->5", (E["uv"], e1), (E["vv1"], 5), (E["wv"], cp), ("u", 7))
    elif 7 not in c1:
        f.move(f"{L}/vv1->7", (E["uv"], e1), (E["vv1"], 7), ("u", 7))
    elif 8 not in c1:
        f.move(f"{L}/vv1->8", (E["uv"], e1), (E["vv1"], 8), ("u", 7))
    elif 6 not in c1:
        f.move(f"{L}/vv1->6", (E["uv"], e1), (E["vv1"], 6), (E["vy"], c), *_with_wv(c == 5, cp),
               ("u", 7))
    elif 7 not in vi and 3 not in c1:
        f.move(f"{L}/vv1->3", (E["uv"], e1), (E["vv1"], 3), ("v", 7), ("u", 3))
    else:
        raise CaseNotCovered(L, f"v-neighbour colors {sorted(vi)}, C[v1]={sorted(c1)}")


def _wv_step(f: _Frame) -> str:
    L = "u/wv"
    if 5 not in _vi(f):
        f.move(f"{L}/v->5", ("v", 5), ("u", 3))
        return "wv"
    gwv = f.c(E["wv"])
    if gwv in (1, 4):
        return "wv"
    if gwv != 8:
        raise CaseNotCovered(L, f"wv={gwv}")
    gvy, c, cp = f.c(E["vy"]), f.sole_missing("y", L), f.sole_missing("w", L)
    if gvy in (1, 2):
        if c in (5, 7):
            f.move(f"{L}=8/vy-low/c-in-57", (E["uv"], gvy), (E["vy"], c), ("u", 7))
        elif c == 6:
            f.move(f"{L}=8/vy-low/c=6", (E["wv"], cp), (E["uv"], gvy), (E["vy"], 8), (E["uy"], 6),
                   (E["wu"], 8), ("u", 7))
        else:
            raise CaseNotCovered(f"{L}=8/vy-low", f"c={c}")
    elif gvy == 6:
        vi, c1, e1 = _vi(f), f.closed("v1"), f.c(E["vv1"])
        M = f"{L}=8/vy=6"
        if 6 not in vi:
            f.move(f"{M}/v->6", ("v", 6), (E["uv"], 3), (E["vy"], c), ("u", 7))
        elif 8 not in vi:
            f.move(f"{M}/v->8", ("v", 8), (E["uv"], 3), (E["wv"], cp), ("u", 7))
        elif 5 not in c1:
            f.move(f"{M}/vv1->5", (E["uv"], e1), (E["vv1"], 5), ("u", 7))
        elif 7 not in c1:
            f.move(f"{M}/vv1->7", (E["uv"], e1), (E["vv1"], 7), ("u", 7))
        elif 6 not in c1:
            f.move(f"{M}/vv1->6", (E["uv"], e1), (E["vv1"], 6), (E["vy"], c), ("u", 7))
        elif 8 not in c1:
            f.move(f"{M}/vv1->8", (E["uv"], e1), (E["vv1"], 8), (E["wv"], cp), ("u", 7))
        elif 7 not in vi and 3 not in c1:
            f.move(f"{M}/vv1->3", (E["uv"], e1), (E["vv1"], 3), ("v", 7), ("u", 3))
        else:
            raise CaseNotCovered(M, f"v-neighbour colors {sorted(vi)}, C[v1]={sorted(c1)}")
    else:
        raise CaseNotCovered(f"{L}=8", f"vy={gvy}")
    return "wv"


def _cbar_wy(f: _Frame) -> str:
    L = "u/cbar-wy"
    cp, gwv = f.sole_missing("w", L), f.c(E["wv"])
    if cp in (5, 7):
        f.move(f"{L}/c'-in-57", (E["uv"], gwv), (E["wv"], cp), ("u", 7))
        return "cbar-wy"
    if cp != 8:
        raise CaseNotCovered(L, f"c'={cp}")
    c, gvy = f.sole_missing("y", L), f.c(E["vy"])
    if c in (5, 7):
        if gvy in (1, 2):
            f.move(f"{L}/c-in-57/vy-low", (E["uv"], gvy), (E["vy"], c), ("u", 7))
        elif gvy == 6:
            f.move(f"{L}/c-in-57/vy=6", (E["uv"], gwv), (E["wv"], 6), (E["uy"], 6), (E["wu"], 8),
                   (E["vy"], c), ("u", 7))
        else:
            raise CaseNotCovered(f"{L}/c-in-57", f"vy={gvy}")
    elif c != 6:
        raise CaseNotCovered(L, f"c={c}")
    return "cbar-wy"


def _z_sets(f: _Frame) -> str:
    L = "u/z"
    zs = [z for z in ("v1", "v2", "v3") if z in f.roles]
    for z in zs:
        gz, cz, vz = f.c(("v", z)), f.closed(z), ("v", z)
        if gz in (1, 2, 4):
            for c in (5, 7):
                if c not in cz:
                    f.move(f"{L}/vz-low/{c}-free", (E["uv"], gz), (vz, c), ("u", 7))
                    return "z-sets"
        elif gz in (6, 8):
            if 5 not in cz:
                f.move(f"{L}/vz-high/5-free", (E["uy"], f.c(E["vy"])), (E["vy"], gz), (vz, 5),
                       ("u", 8))
                return "z-sets"
            if 7 not in cz:
                if gz == 6:
                    f.move(f"{L}/vz=6/7-free", (E["uv"], f.c(E["vy"])), (E["vy"], 6), (vz, 7),
                           ("u", 7))
                else:
                    f.move(f"{L}/vz=8/7-free", (E["uv"], f.c(E["wv"])), (E["wv"], 8), (vz, 7),
                           ("u", 7))
                return "z-sets"
        else:
            raise CaseNotCovered(L, f"v{z[1:]}-edge color {gz}")
    for z in zs:
        gz, cz, vz = f.c(("v", z)), f.closed(z), ("v", z)
        if gz not in (6, 8):
            continue
        gwv, gvy = f.c(E["wv"]), f.c(E["vy"])
        if gwv not in cz:
            f.move(f"{L}/vz-high/wv-free", (vz, gwv), (E["wu"], gwv), (E["wv"], gz), ("u", 6))
            return "z-sets"
        if gvy not in cz:
            f.move(f"{L}/vz-high/vy-free", (vz, gvy), (E["uy"], gvy), (E["vy"], gz), ("u", 8))
            return "z-sets"
    return "z-sets"


def _part_three_nbr(f: _Frame) -> None:
    L = "u/3nbr"
    g3 = f.c(("v", "v3"))
    if g3 not in (1, 2, 4):
        raise CaseNotCovered(L, f"vv3={g3}")
    c3 = f.open("v3")
    for c in (5, 7):
        if c not in c3:
            f.move(f"{L}/{c}-free", (E["uv"], g3), (("v", "v3"), c), ("u", 7))
            return
    e1, gvy = f.c(E["vv1"]), f.c(E["vy"])
    if e1 in (6, 8) and g3 not in f.closed("v1") and gvy not in c3:
        f.move(f"{L}/rotate", (("v", "v3"), gvy), (E["uy"], gvy), (E["vy"], e1), (E["vv1"], g3),
               ("u", 8))
        return
    raise CaseNotCovered(L, f"vv1={e1}, C[v1]={sorted(f.closed('v1'))}, C(v3)={sorted(c3)}")


def _t_has_6_8(f: _Frame, L: str) -> None:
    gwt, ct, gwv = f.c(E["wt"]), f.closed("t"), f.c(E["wv"])
    if gwt in (1, 3, 4):
        for c in (6, 8):
            if c not in ct:
                f.move(f"{L}/wt-low/{c}-free", (E["wu"], gwt), (E["wt"], c), ("u", 6))
                return
    elif gwt in (5, 7):
        if 6 not in ct:
            f.move(f"{L}/wt-in-57/6-free", (E["uv"], gwv), (E["wv"], gwt), (E["wt"], 6),
                   (E["wu"], 8), (E["uy"], 6), ("u", 7))
        elif 8 not in ct:
            f.move(f"{L}/wt-in-57/8-free", (E["uv"], gwv), (E["wv"], gwt), (E["wt"], 8), ("u", 7))
    else:
        raise CaseNotCovered(L, f"wt={gwt}")


def _part_4646(f: _Frame) -> None:
    L = "u/4646"
    _t_has_6_8(f, L)
    if f.done():
        return
    gvt, gwt, gwv, ct = f.c(E["vt"]), f.c(E["wt"]), f.c(E["wv"]), f.closed("t")
    if gvt in (1, 2, 4) and gwt in (5, 7) and gwv not in ct:
        f.move(f"{L}/vt-low/swap", (E["uv"], gwv), (E["wv"], gwt), (E["wt"], gwv), ("u", 7))
        return
    raise CaseNotCovered(L, f"vt={gvt}, wt={gwt}, C[t]={sorted(ct)}")


def _swap_wu_uy(f: _Frame, cond: bool) -> list:
    return [(E["wu"], f.c(E["uy"])), (E["uy"], f.c(E["wu"]))] if cond else []


def _part_466466(f: _Frame) -> None:
    L = "u/466466"
    _t_has_6_8(f, L)
    if f.done():
        return
    gyp, cpp, gvy = f.c(E["yp"]), f.closed("p"), f.c(E["vy"])
    if gyp in (1, 2, 3):
        for c in (6, 8):
            if c not in cpp:
                f.move(f"{L}/yp-low/{c}-free", (E["uy"], gyp), (E["yp"], c), ("u", 8))
                return
    elif gyp in (5, 7):
        if 8 not in cpp:
            f.move(f"{L}/yp-in-57/8-free", (E["uv"], gvy), (E["vy"], gyp), (E["yp"], 8),
                   (E["uy"], 6), (E["wu"], 8), ("u", 7))
            return
        if 6 not in cpp:
            f.move(f"{L}/yp-in-57/6-free", (E["uv"], gvy), (E["vy"], gyp), (E["yp"], 6), ("u", 7))
            return
    else:
        raise CaseNotCovered(L, f"yp={gyp}")
    gvr, gwv, gvt, gtr = f.c(E["vr"]), f.c(E["wv"]), f.c(E["vt"]), f.c(E["tr"])
    if gvr in (6, 8):
        _case_vr_high(f, L, gvr, gwv, gvy, gvt, gtr)
    elif gvr in (1, 2, 4):
        _case_vr_low(f, L, gvr, gwv, gvy, gvt, gtr)
    else:
        raise CaseNotCovered(L, f"vr={gvr}")


def _case_vr_high(f: _Frame, L: str, gvr: int, gwv: int, gvy: int, gvt: int, gtr: int) -> None:
    k = 14 - gvr  # the other color of {6, 8}
    if gvt == k:
        M = f"{L}/vr-high/vt=k"
        if gtr == gwv:
            f.move(f"{M}/tr=wv", (E["wu"], gwv), (E["vt"], gwv), (E["wv"], k), (E["tr"], k), ("u", 6))
        elif gtr == gvy:
            f.move(f"{M}/tr=vy", (E["uy"], gvy), (E["vt"], gvy), (E["vy"], k), (E["tr"], k), ("u", 8))
        elif gtr == 5:
            f.move(f"{M}/tr=5", (E["wu"], gwv), (E["wv"], k), (E["tr"], k), (E["vt"], 5), ("u", 6))
        elif gtr == 7:
            f.move(f"{M}/tr=7", (E["uv"], gwv), (E["wv"], k), (E["tr"], k), (E["vt"], 7),
                   *_swap_wu_uy(f, k == f.c(E["wu"])), ("u", 7))
        else:
            raise CaseNotCovered(M, f"tr={gtr}")
        return
    if f.c(E["vp"]) != k:
        raise CaseNotCovered(f"{L}/vr-high", f"neither vt nor vp carries {k}")
    M = f"{L}/vr-high/vp=k"
    cpbar = f.missing("p")
    if cpbar == {gvt}:
        if gtr == gwv:
            f.move(f"{M}/p-misses-vt/tr=wv", (E["vp"], gvt), (E["tr"], gvt), (E["vt"], gwv),
                   (E["wu"], gwv), (E["wv"], k), ("u", 6))
        elif gtr == gvy:
            f.move(f"{M}/p-misses-vt/tr=vy", (E["vp"], gvt), (E["tr"], gvt), (E["vt"], gvy),
                   (E["uy"], gvy), (E["vy"], k), ("u", 8))
        elif gtr in (5, 7):
            f.move(f"{M}/p-misses-vt/tr-in-57", (E["uv"], gvt), (E["vt"], gtr), (E["tr"], gvt),
                   ("u", 7))
        else:
            raise CaseNotCovered(f"{M}/p-misses-vt", f"tr={gtr}")
    elif cpbar == {3}:
        tcols = f.vertex_colors(("t", "r", "p"))
        if k not in tcols:
            f.move(f"{M}/p-misses-3/v->k", ("v", k), (E["vp"], 3), ("u", 3))
        elif gvr not in tcols:
            f.move(f"{M}/p-misses-3/v->vr", ("v", gvr), (E["vr"], 3), ("u", 3))
        elif 5 not in tcols:
            f.move(f"{M}/p-misses-3/v->5", ("v", 5), ("u", 3))
        elif 7 not in tcols:
            f.move(f"{M}/p-misses-3/v->7", ("v", 7), (E["vp"], 3), (E["uv"], gvy), (E["vy"], k),
                   *_swap_wu_uy(f, k == f.c(E["uy"])), ("u", 3))
        else:
            raise CaseNotCovered(f"{M}/p-misses-3", f"t,r,p colors {sorted(tcols)}")
    else:
        raise CaseNotCovered(M, f"missing at p: {sorted(cpbar)}")


def _case_vr_low(f: _Frame, L: str, gvr: int, gwv: int, gvy: int, gvt: int, gtr: int) -> None:
    ctbar = f.missing("t")
    if ctbar == {3}:
        M = f"{L}/vr-low/t-misses-3"
        tcols = f.vertex_colors(("t", "r", "p"))
        if gvt not in tcols:
            f.move(f"{M}/v->vt", ("v", gvt), (E["vt"], 3), ("u", 3))
        elif 7 not in tcols:
            f.move(f"{M}/v->7", ("v", 7), (E["uv"], gwv), (E["wv"], gvt), (E["vt"], 3),
                   *_swap_wu_uy(f, gvt == f.c(E["wu"])), ("u", 3))
        elif gwv == 1:
            f.move(f"{M}/wv=1", (E["wu"], 1), ("v", 1), (E["wv"], gvt), (E["vt"], 3), ("u", 3))
        elif gvy == 1:
            f.move(f"{M}/vy=1", (E["uy"], 1), ("v", 1), (E["vy"], gvt), (E["vt"], 3), ("u", 3))
        elif gvr == 1:
            cr = f.closed("r")
            if gwv not in cr:
                f.move(f"{M}/vr=1/wv-free", (E["vr"], gwv), (E["wu"], gwv), (E["wv"], gvt),
                       (E["vt"], 3), ("v", 1), ("u", 3))
            elif gvy not in cr:
                f.move(f"{M}/vr=1/vy-free", (E["vr"], gvy), (E["uy"], gvy), (E["vy"], gvt),
                       (E["vt"], 3), ("v", 1), ("u", 3))
            elif 3 not in cr:
                f.move(f"{M}/vr=1/3-free", (E["vr"], 3), ("v", 1), ("u", 3))
            else:
                raise CaseNotCovered(f"{M}/vr=1", f"C[r]={sorted(cr)}")
        else:
            raise CaseNotCovered(M, "color 1 is on none of wv, vy, vr")
    elif ctbar == {gvr}:
        M = f"{L}/vr-low/t-misses-vr"
        cr = f.closed("r")
        if gwv not in cr:
            f.move(f"{M}/wv-free", (E["vr"], gwv), (E["wu"], gwv), (E["wv"], gvt), (E["vt"], gvr),
                   ("u", 6))
        elif gvy not in cr:
            f.move(f"{M}/vy-free", (E["vr"], gvy), (E["uy"], gvy), (E["vy"], gvt), (E["vt"], gvr),
                   ("u", 8))
        elif gtr == 7:
            f.move(f"{M}/tr=7", (E["uv"], gvy), (E["vy"], gvt), (E["tr"], gvt), (E["vt"], 7),
                   *_swap_wu_uy(f, gvt == f.c(E["uy"])), ("u", 7))
        elif gtr == gwv:
            f.move(f"{M}/tr=wv", (E["wu"], gwv), (E["vt"], gwv), (E["wv"], gvt), (E["tr"], gvt),
                   ("u", 6))
        elif gtr == gvy:
            f.move(f"{M}/tr=vy", (E["uy"], gvy), (E["vt"], gvy), (E["vy"], gvt), (E["tr"], gvt),
                   ("u", 8))
        elif gtr == 5:
            f.move(f"{M}/tr=5", (E["wu"], gwv), (E["wv"], gvt), (E["tr"], gvt), (E["vt"], 5),
                   ("u", 6))
        else:
            raise CaseNotCovered(M, f"tr={gtr}")
    else:
        raise CaseNotCovered(f"{L}/vr-low", f"missing at t: {sorted(ctbar)}")


# ---------------------------------------------------------------------------
# derived facts


@dataclass(frozen=True)
class Fact:
    name: str
    holds: bool
    detail: str = ""


@dataclass(frozen=True)
class FactReport:
    applicable: bool
    facts: tuple[Fact, ...] = ()
    reason: str = ""

    @property
    def all_hold(self) -> bool:
        return self.applicable and all(f.holds for f in self.facts)

    def failed(self) -> list[Fact]:
        return [f for f in self.facts if not f.holds]

    def require(self) -> "FactReport":
        bad = self.failed()
        if bad:
            raise DerivedFactFailed(bad[0])
        return self


def derive_facts(g: Graph, gcol: PartialTotalColoring, cfg: Config646,
                 erase: Iterable[int] = ()) -> FactReport:
    """Evaluate, straight from the color sets, the facts that hold whenever
    no generic recoloring escape applies: in the frame, ``C̄[v] = {5}``,
    ``C̄[w] = {8}``, ``C̄[y] = {6}``, ``g(wv) ∈ {1,4}``, ``g(vy) ∈ {1,2}``,
    and for each other neighbour ``z`` of ``v``, ``{5,7} ⊆ C[z]`` plus
    ``{g(wv), g(vy), 5, 7, g(vz)} ⊆ C[z]`` when ``g(vz) ∈ {6,8}``.

    Vertices in ``erase`` are treated as uncolored.
    """
    col = gcol.without(*erase)
    if available(g, col, cfg.u):
        return FactReport(False, reason="u has a free color")
    perm = vertex_frame_perm(g, col, cfg)
    if perm is None:
        return FactReport(False, reason="colors around u are not all distinct")
    fc = col.permuted(perm)

    def cs(z):
        return color_sets(g, fc, z)

    facts = []
    for nm, z in (("v", cfg.v), ("w", cfg.w), ("y", cfg.y)):
        facts.append(Fact(f"{{1,2,3,4}}<=C[{nm}]", {1, 2, 3, 4} <= cs(z).closed,
                          f"C[{nm}]={sorted(cs(z).closed)}"))
    for nm, z, want in (("v", cfg.v, 5), ("w", cfg.w, 8), ("y", cfg.y, 6)):
        m = cs(z).missing_closed
        facts.append(Fact(f"Cbar[{nm}]={want}", m == {want}, f"Cbar[{nm}]={sorted(m)}"))
    gwv, gvy = fc.get((cfg.w, cfg.v)), fc.get((cfg.v, cfg.y))
    facts.append(Fact("g(wv) in {1,4}", gwv in (1, 4), f"g(wv)={gwv}"))
    facts.append(Fact("g(vy) in {1,2}", gvy in (1, 2), f"g(vy)={gvy}"))
    edge_cols = sorted(fc.get((cfg.v, z)) for z in (*cfg.others, cfg.w, cfg.y))
    facts.append(Fact("edges at v off u are {1,2,4,6,8}", edge_cols == [1, 2, 4, 6, 8],
                      f"{edge_cols}"))
    for i, z in enumerate(cfg.others, 1):
        cz = cs(z).closed
        facts.append(Fact(f"{{5,7}}<=C[v{i}]", {5, 7} <= cz, f"C[v{i}]={sorted(cz)}"))
        gz = fc.get((cfg.v, z))
        if gz in (6, 8):
            need = {gwv, gvy, 5, 7, gz}
            facts.append(Fact(f"{{g(wv),g(vy),5,7,g(vv{i})}}<=C[v{i}]", need <= cz,
                              f"C[v{i}]={sorted(cz)}"))
    return FactReport(True, tuple(facts))


# ---------------------------------------------------------------------------
# reducibility


@dataclass(frozen=True)
class ReducibilityResult:
    verdict: str  # "reducible", "not" or "timeout"
    frames: int  # frame colorings enumerated (up to color permutation)
    blocking: int  # frames that do not extend without recoloring
    recolored: int  # blocking frames rescued by local recoloring
    nodes: int
    detail: str = ""


def _target_elements(g: Graph, target: Element) -> list[Element]:
    if isinstance(target, tuple):
        if not g.has_edge(*target):
            raise ValueError(f"{format_element(target)} is not an edge")
        return [edge_key(*target)]
    return [target] + [edge_key(target, u) for u in sorted(g.neighbors(target))]


def reducibility_test(g: Graph, target: Element, k: int = PALETTE, *,
                      node_budget: int = 10**7) -> ReducibilityResult:
    """Does every total ``k``-coloring of ``g`` minus ``target`` extend to
    ``g`` after recoloring inside the radius-2 ball around the target?

    The colorings of the remainder are enumerated through their restriction
    to the *frame*, the remainder elements that conflict with a target
    element.  Frames are listed up to color permutation (a new color is
    always the smallest unused one, and frame elements with identical
    conflicts are colored in increasing order).  A frame that extends
    directly is fine; otherwise it is checked to be realisable by the whole
    remainder and, if so, the remainder's completion is recolored near the
    target by exhaustive search.
    """
    if k < g.max_degree + 1:
        raise ValueError("palette smaller than Δ+1")
    tgt = _target_elements(g, target)
    tset = set(tgt)
    frame_set = []
    for e in tgt:
        for f in conflicts(g, e):
            if f not in tset and f not in frame_set:
                frame_set.append(f)
    # remainder conflicts restricted to the frame, and twin classes
    rem_conf = {e: {f for f in conflicts(g, e) if f not in tset} for e in frame_set}
    tgt_conf = {e: frozenset(t for t in tgt if e in conflicts(g, t)) for e in frame_set}
    def twins(a, b):
        # swapping the colors of a and b maps remainder colorings to
        # remainder colorings and preserves what the target sees
        return (tgt_conf[a] == tgt_conf[b] and b in rem_conf[a]
                and rem_conf[a] - {b} == rem_conf[b] - {a})

    order: list[Element] = []
    twin_prev: dict[Element, Element] = {}
    for e in sorted(frame_set, key=lambda x: (isinstance(x, tuple), x)):
        if e in order:
            continue
        chain = [e]
        for x in sorted(frame_set, key=lambda x: (isinstance(x, tuple), x)):
            if x not in order and x not in chain and all(twins(x, y) for y in chain):
                chain.append(x)
        for a, b in zip(chain, chain[1:]):
            twin_prev[b] = a
        order.extend(chain)

    stats = {"nodes": 0, "frames": 0, "blocking": 0, "recolored": 0}
    assign: dict[Element, int] = {}
    ball = _ball(g, target if not isinstance(target, tuple) else target[0])

    def budget(st: SolveStats):
        stats["nodes"] += st.nodes
        if stats["nodes"] > node_budget:
            raise SolverTimeout(stats["nodes"])

    def check_frame() -> bool:
        stats["frames"] += 1
        fixed = PartialTotalColoring(k, dict(assign))
        keep = set(assign) | tset
        st = SolveStats()
        direct = solve(g, k, fixed, exclude=[e for e in g.elements() if e not in keep],
                       node_budget=node_budget, stats=st)
        budget(st)
        if direct is not None:
            return True
        stats["blocking"] += 1
        st = SolveStats()
        real = solve(g, k, fixed, exclude=tgt, node_budget=node_budget, stats=st)
        budget(st)
        if real is None:
            stats["blocking"] -= 1  # frame not realisable by the remainder
            return True
        st = SolveStats()
        loose = real.without(*ball, *tgt)
        ext = solve(g, k, loose, node_budget=node_budget, stats=st)
        budget(st)
        if ext is None:
            return False
        stats["recolored"] += 1
        return True

    def rec(i: int, top: int) -> bool:
        if i == len(order):
            return check_frame()
        e = order[i]
        lo = assign[twin_prev[e]] + 1 if e in twin_prev else 1
        for c in range(lo, min(top + 1, k) + 1):
            if any(assign.get(f) == c for f in rem_conf[e]):
                continue
            assign[e] = c
            ok = rec(i + 1, max(top, c))
            del assign[e]
            if not ok:
                return False
        return True

    try:
        st = SolveStats()
        whole = solve(g, k, node_budget=node_budget, stats=st)
        budget(st)
        if whole is None:
            return ReducibilityResult("not", 0, 0, 0, stats["nodes"], f"g has no total {k}-coloring")
        ok = rec(0, 0)
    except SolverTimeout:
        return ReducibilityResult("timeout", stats["frames"], stats["blocking"], stats["recolored"],
                                  stats["nodes"])
    verdict = "reducible" if ok else "not"
    return ReducibilityResult(verdict, stats["frames"], stats["blocking"], stats["recolored"],
                              stats["nodes"])


# ---------------------------------------------------------------------------
# sampling hard instances


def _random_fill(g: Graph, col: PartialTotalColoring, cands: list[Element], rng,
                 skip: set[Element]) -> None:
    rng.shuffle(cands)
    for e in cands:
        if e in col or e in skip:
            continue
        opts = available(g, col, e)
        if opts:
            col.set(e, rng.choice(opts))


def _pin_facts(g: Graph, cfg: Config646, col: PartialTotalColoring, pal: list[int], rng) -> bool:
    # pal[i - 1] is the caller color playing frame color i
    F = lambda i: pal[i - 1]  # noqa: E731
    u, v, w, y = cfg.u, cfg.v, cfg.w, cfg.y
    gwv, gvy = rng.choice((1, 4)), rng.choice((1, 2))
    if gwv == gvy:
        gwv = 4
    rest = [c for c in (1, 2, 4, 6, 8) if c not in (gwv, gvy)]
    rng.shuffle(rest)
    col.set((w, v), F(gwv))
    col.set((v, y), F(gvy))
    for z, c in zip(cfg.others, rest):
        col.set((v, z), F(c))
    for hub, skip, pool in ((w, {u, v}, {1, 3, 4, 5, 7} - {gwv}), (y, {u, v}, {1, 2, 3, 5, 7} - {gvy})):
        pool = list(pool)
        rng.shuffle(pool)
        for z in sorted(g.neighbors(hub) - skip):
            c = pool.pop()
            if F(c) not in available(g, col, (hub, z)):
                return False
            col.set((hub, z), F(c))
    # make 5 a neighbour color of v and put 5 and 7 around every other
    # neighbour of v
    zs = list(cfg.others)
    rng.shuffle(zs)
    for z in zs:
        want = [5, 7]
        rng.shuffle(want)
        for c in want:
            if F(c) in color_sets(g, col, z).closed:
                continue
            spots = [] if z == cfg.three_nbr else [z]  # the 3-neighbour's color gets erased
            spots += [edge_key(z, q) for q in sorted(g.neighbors(z) - {v})]
            spots = [e for e in spots if e not in col and F(c) in available(g, col, e)]
            if not spots:
                return False
            if z in spots and c == 5 and F(5) not in {col.get(q) for q in cfg.others}:
                col.set(z, F(5))
            else:
                col.set(rng.choice(spots), F(c))
    return True


def blocked_instance(g: Graph, cfg: Config646, target: str, rng, *, depth: int = 0,
                     pin_facts: bool = False, node_budget: int = 20000,
                     attempts: int = 50) -> PartialTotalColoring | None:
    """A random total 8-coloring of ``g`` minus the target in which the
    target has no free color.

    ``target`` is ``"uv"`` (``u`` and ``uv`` uncolored) or ``"u"``.  The
    colors seen by the target are fixed first, then elements within
    ``depth`` of ``u`` get random available colors, and a randomized search
    completes the rest.  Returns ``None`` when every attempt fails.

    With ``pin_facts`` (target ``"u"`` only) the edges at ``v``, ``w`` and
    ``y`` are also fixed so that every generic escape of
    :func:`extend_vertex_u` up to the per-neighbour sets is blocked, which
    drives the procedure into its hypothesis-specific branches.
    """
    if pin_facts and target != "u":
        raise ValueError("pin_facts needs target 'u'")
    u, v = cfg.u, cfg.v
    if target == "uv":
        skip = {u, edge_key(u, v)}
    elif target == "u":
        skip = {u}
    else:
        raise ValueError(f"unknown target {target!r}")
    dist = bfs_distances(g, u)
    near = [e for e in g.elements() if e not in skip and
            (dist.get(e, 99) if not isinstance(e, tuple) else min(dist[e[0]], dist[e[1]])) <= depth]
    for _ in range(attempts):
        col = PartialTotalColoring(PALETTE, {})
        pal = list(range(1, PALETTE + 1))
        rng.shuffle(pal)
        if target == "u":
            for e, c in zip((cfg.x, cfg.w, v, cfg.y, (cfg.x, u), (cfg.w, u), (u, v), (u, cfg.y)), pal):
                col.set(e, c)
            if pin_facts and not _pin_facts(g, cfg, col, pal, rng):
                continue
        else:
            at_v = [v] + [edge_key(v, z) for z in sorted(g.neighbors(v) - {u})]
            for e, c in zip(at_v, pal):
                col.set(e, c)
            spare = pal[6:]
            u_edges = [edge_key(u, z) for z in (cfg.x, cfg.w, cfg.y)]
            rng.shuffle(u_edges)
            ok = True
            for e, c in zip(u_edges, spare):
                if c in available(g, col, e):
                    col.set(e, c)
                else:
                    ok = False
            if not ok:
                continue
        _random_fill(g, col, list(near), rng, skip)
        try:
            out = solve(g, PALETTE, col, exclude=sorted(skip, key=lambda e: (isinstance(e, tuple), e)),
                        rng=rng, node_budget=node_budget)
        except SolverTimeout:
            continue
        if out is None:
            continue
        tgt = edge_key(u, v) if target == "uv" else u
        if not available(g, out, tgt):
            return out
    return None
