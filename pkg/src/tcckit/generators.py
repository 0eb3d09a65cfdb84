"""Seeded embedded planar graphs, class samples and configuration hosts.

All randomness comes from :class:`random.Random` (CPython's Mersenne Twister)
seeded from the :class:`GenSpec`; the algorithm id is written into every
metadata sidecar so corpora can be regenerated exactly.
"""

from __future__ import annotations

import json
import math
import random
import re
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .graph import Graph, build_graph, is_plane_embedding, trace_faces, write_tcg
from .patterns import PatternCatalog, contains_forbidden

RNG_ALGORITHM = "cpython-random-mt19937"
MODES = ("triangulation", "sparse", "theorem1-class", "config-host")


class GeneratorError(ValueError):
    pass


class InfeasibleSpec(GeneratorError):
    pass


class BudgetExhausted(GeneratorError):
    pass


class UnknownKind(GeneratorError):
    pass


@dataclass(frozen=True)
class GenSpec:
    n: int
    seed: int = 0
    mode: str = "triangulation"
    max_degree: int | None = None  # degree cap
    delete_fraction: float = 0.0  # extra edges removed in sparse mode, as a fraction of |E|
    require_max_degree: bool = False  # class samples: insist that the cap is attained
    kind: str | None = None  # for config-host mode
    max_attempts: int = 2000

    def __post_init__(self):
        if self.mode not in MODES:
            raise InfeasibleSpec(f"unknown mode {self.mode!r}")
        if self.mode != "config-host" and self.n < 3:
            raise InfeasibleSpec("vertex budget must be at least 3")
        if not 0 <= self.delete_fraction < 1:
            raise InfeasibleSpec("delete_fraction must lie in [0, 1)")
        if self.max_degree is not None and self.max_degree < 2:
            raise InfeasibleSpec("degree cap must be at least 2")


def rng_for(seed, *salt) -> random.Random:
    """Independent deterministic stream for ``seed`` and an optional salt."""
    if not salt:
        return random.Random(seed)
    return random.Random(":".join(map(str, (seed, *salt))))


# ---------------------------------------------------------------------------
# stacked triangulations and edge deletion


def _stacked(n: int, rng: random.Random, cap: int | None) -> list[list[int]]:
    # rotation lists; faces stored as (a, b, c) with succ_b(a) == c
    rot = [[1, 2], [2, 0], [0, 1]]
    faces = [(0, 1, 2), (0, 2, 1)]
    for x in range(3, n):
        pool = faces if cap is None else [f for f in faces if all(len(rot[z]) < cap for z in f)]
        if not pool:
            raise InfeasibleSpec(f"no face admits a new vertex under degree cap {cap} at n={x}")
        i = faces.index(pool[rng.randrange(len(pool))])
        a, b, c = faces[i]
        for p, q in ((b, a), (c, b), (a, c)):  # put x right after q at p
            r = rot[p]
            r.insert(r.index(q) + 1, x)
        rot.append([a, c, b])
        faces[i:i + 1] = [(a, b, x), (b, c, x), (c, a, x)]
    return rot


def _connected_without(rot: list[list[int]], a: int, b: int) -> bool:
    seen = {a}
    stack = [a]
    while stack:
        p = stack.pop()
        for q in rot[p]:
            if (p, q) in ((a, b), (b, a)):
                continue
            if q == b:
                return True
            if q not in seen:
                seen.add(q)
                stack.append(q)
    return False


def _delete(rot: list[list[int]], a: int, b: int) -> None:
    rot[a].remove(b)
    rot[b].remove(a)


def _thin(rot: list[list[int]], rng: random.Random, cap: int | None, fraction: float) -> int:
    removed = 0
    if cap is not None:
        while True:
            over = [v for v in range(len(rot)) if len(rot[v]) > cap]
            if not over:
                break
            cands = sorted({(min(v, u), max(v, u)) for v in over for u in rot[v]})
            rng.shuffle(cands)
            # prefer edges whose both ends are over the cap
            cands.sort(key=lambda e: -(len(rot[e[0]]) > cap and len(rot[e[1]]) > cap))
            for a, b in cands:
                if _connected_without(rot, a, b):
                    _delete(rot, a, b)
                    removed += 1
                    break
            else:
                raise InfeasibleSpec(f"cannot meet degree cap {cap} without disconnecting")
    target = int(round(fraction * sum(len(r) for r in rot) / 2))
    edges = sorted({(min(v, u), max(v, u)) for v in range(len(rot)) for u in rot[v]})
    rng.shuffle(edges)
    done = 0
    for a, b in edges:
        if done >= target:
            break
        if _connected_without(rot, a, b):
            _delete(rot, a, b)
            done += 1
    return removed + done


@dataclass
class GenStats:
    attempts: int = 0
    rejected_degree: int = 0
    rejected_pattern: dict[str, int] = field(default_factory=dict)
    rejected_infeasible: int = 0
    edges_deleted: int = 0


def gen_planar(spec: GenSpec, stats: GenStats | None = None) -> Graph:
    """Stacked triangulation on ``spec.n`` vertices; in sparse mode, edges are
    then removed (never disconnecting) until the degree cap holds and a
    further ``delete_fraction`` of the edges is gone."""
    if spec.mode == "config-host":
        return build_configuration_host(spec.kind or "", spec.seed)[0]
    if spec.mode == "theorem1-class":
        return sample_theorem_class(spec, stats=stats)
    rng = rng_for(spec.seed)
    if spec.mode == "triangulation":
        rot = _stacked(spec.n, rng, spec.max_degree)
    else:
        rot = _stacked(spec.n, rng, None)
        removed = _thin(rot, rng, spec.max_degree, spec.delete_fraction)
        if stats is not None:
            stats.edges_deleted += removed
    return build_graph(rot)


def sample_theorem_class(spec: GenSpec, catalog: PatternCatalog | None = None,
                         stats: GenStats | None = None) -> Graph:
    """Rejection-sample sparse graphs until Δ ≤ cap (default 6) and no
    forbidden subgraph is present."""
    cap = spec.max_degree or 6
    stats = stats if stats is not None else GenStats()
    for attempt in range(spec.max_attempts):
        stats.attempts += 1
        sub = GenSpec(spec.n, seed=hash_seed(spec.seed, attempt), mode="sparse", max_degree=cap,
                      delete_fraction=spec.delete_fraction)
        try:
            g = gen_planar(sub, stats)
        except InfeasibleSpec:
            stats.rejected_infeasible += 1
            continue
        if g.max_degree > cap or (spec.require_max_degree and g.max_degree != cap):
            stats.rejected_degree += 1
            continue
        rep = contains_forbidden(g, catalog)
        hit = rep.first_hit()
        if hit is not None:
            stats.rejected_pattern[hit] = stats.rejected_pattern.get(hit, 0) + 1
            continue
        return g
    raise BudgetExhausted(f"no class sample after {spec.max_attempts} attempts")


def hash_seed(seed: int, attempt: int) -> int:
    """Child seed for rejection attempt ``attempt`` (stable across runs)."""
    return rng_for(seed, "attempt", attempt).getrandbits(63)


def metadata(spec: GenSpec, g: Graph, stats: GenStats | None = None, **extra) -> dict:
    out = {
        "rng": RNG_ALGORITHM,
        "seed": spec.seed,
        "mode": spec.mode,
        "spec": asdict(spec),
        "n": g.n,
        "edges": len(g.edges),
        "max_degree": g.max_degree,
        "digest": g.digest(),
        "stats": asdict(stats) if stats is not None else None,
    }
    out.update(extra)
    return out


def write_with_metadata(g: Graph, path: str | Path, meta: Mapping) -> Path:
    path = Path(path)
    write_tcg(g, path, comments=[f"seed {meta.get('seed')} mode {meta.get('mode')}"])
    side = path.with_suffix(path.suffix + ".meta.json")
    side.write_text(json.dumps(meta, indent=2, sort_keys=False) + "\n")
    return side


# ---------------------------------------------------------------------------
# configuration hosts


@dataclass(frozen=True)
class PlantedConfig:
    kind: str
    roles: Mapping[str, int]
    degree: Mapping[str, int]

    def __getitem__(self, role: str) -> int:
        return self.roles[role]


def _polar(deg: float, r: float = 1.0) -> tuple[float, float]:
    return (r * math.cos(math.radians(deg)), r * math.sin(math.radians(deg)))


@dataclass
class _Core:
    pos: dict[str, tuple[float, float]]
    edges: list[tuple[str, str]]
    degree: dict[str, int]


def _core_646(kind: str) -> _Core:
    ring = {"y": 30, "u": 90, "w": 150, "v1": 210, "v2": 270, "v3": 330}
    pos = {"v": (0.0, 0.0)}
    pos.update({k: _polar(a) for k, a in ring.items()})
    pos["x"] = (0.0, 2.2)
    edges = [("v", k) for k in ring] + [("w", "u"), ("u", "y"), ("u", "x")]
    degree = {"v": 6, "u": 4, "w": 6, "y": 6, "x": 5, "v1": 5, "v2": 5, "v3": 5}
    if kind in ("646+4nbr", "646+4nbr+3nbr"):
        degree["v1"] = 4
    if kind == "646+4nbr+3nbr":
        degree["v3"] = 3
    if kind == "4646":
        edges.append(("v1", "w"))
        degree["v1"] = 4
    if kind == "466466":
        edges += [("v2", "v1"), ("v1", "w"), ("y", "v3")]
        degree.update({"v2": 4, "v1": 6, "v3": 6})
    return _Core(pos, edges, degree)


_646_ALIASES = {"4646": {"t": "v1"}, "466466": {"r": "v2", "t": "v1", "p": "v3"}}


def _core_fan(rim: int, hub_degree: int, closed: bool) -> _Core:
    if closed:
        angles = [90 + 360 * i / rim for i in range(rim)]
    else:
        angles = [180 * i / (rim - 1) for i in range(rim)]
    pos = {"h": (0.0, 0.0)}
    names = [f"y{i + 1}" for i in range(rim)]
    for nm, a in zip(names, angles):
        pos[nm] = _polar(a)
    edges = [("h", nm) for nm in names] + list(zip(names, names[1:]))
    if closed:
        edges.append((names[-1], names[0]))
    degree = {"h": hub_degree, **{nm: 5 for nm in names}}
    return _Core(pos, edges, degree)


def _core(kind: str) -> _Core:
    if kind in ("646", "646+4nbr", "646+4nbr+3nbr", "4646", "466466"):
        return _core_646(kind)
    if kind in ("fan4", "fan4-donor5"):
        return _core_fan(5, 5, False)
    if kind == "fan4-donor6":
        c = _core_fan(5, 5, False)
        y3 = c.pos["y3"]
        for i, dx in enumerate((-0.4, 0.0, 0.4)):
            nm = f"z{i + 1}"
            c.pos[nm] = (y3[0] + dx, y3[1] + 1.2)
            c.edges.append(("y3", nm))
            c.degree[nm] = 3
        c.degree["y3"] = 6
        return c
    if kind == "fan5":
        return _core_fan(6, 6, False)
    if kind == "wheel5":
        return _core_fan(5, 5, True)
    if kind == "wheel6":
        return _core_fan(6, 6, True)
    m = re.fullmatch(r"triangle\((\d+),(\d+),(\d+)\)", kind.replace(" ", ""))
    if m:
        d = [int(x) for x in m.groups()]
        if min(d) < 2:
            raise UnknownKind("triangle degrees must be at least 2")
        pos = {"a": _polar(90), "b": _polar(210), "c": _polar(330)}
        return _Core(pos, [("a", "b"), ("b", "c"), ("c", "a")], dict(zip("abc", d)))
    if kind in ("3vertex", "2vertex"):
        k = int(kind[0])
        pos = {"c": (0.0, 0.0)}
        names = [f"n{i + 1}" for i in range(k)]
        for i, nm in enumerate(names):
            pos[nm] = _polar(90 + 360 * i / k)
        return _Core(pos, [("c", nm) for nm in names], {"c": k, **{nm: 6 for nm in names}})
    raise UnknownKind(f"unknown configuration kind {kind!r}")


CONFIG_KINDS = ("646", "646+4nbr", "646+4nbr+3nbr", "4646", "466466", "fan4", "fan4-donor5",
                "fan4-donor6", "fan5", "wheel5", "wheel6", "triangle(a,b,c)", "3vertex", "2vertex")


def build_configuration_host(kind: str, seed: int | None = None) -> tuple[Graph, PlantedConfig]:
    """Small embedded host realising ``kind`` with exact role degrees.

    The core is drawn with straight lines and its rotation read off by angle;
    missing degree is made up with pendant vertices placed only in corners
    that do not lie in a 3-face, so no triangle of the core is disturbed.
    With a seed, corner choice and vertex labels are randomised.
    """
    core = _core(kind)
    rng = random.Random(seed) if seed is not None else None
    names = list(core.pos)
    idx = {nm: i for i, nm in enumerate(names)}
    nbrs: list[list[int]] = [[] for _ in names]
    for a, b in core.edges:
        nbrs[idx[a]].append(idx[b])
        nbrs[idx[b]].append(idx[a])
    rot: list[list[int]] = []
    for i, nm in enumerate(names):
        px, py = core.pos[nm]
        rot.append(sorted(nbrs[i], key=lambda j: math.atan2(core.pos[names[j]][1] - py,
                                                            core.pos[names[j]][0] - px)))
    # a dart on the unbounded face: at the leftmost vertex, the corner that
    # faces left follows the neighbour of largest angle
    left = min(range(len(names)), key=lambda i: (core.pos[names[i]], i))
    outer_dart = (rot[left][-1], left)
    for nm in names:
        v = idx[nm]
        need = core.degree.get(nm, len(rot[v])) - len(rot[v])
        if need < 0:
            raise InfeasibleSpec(f"{kind}: role {nm} already exceeds its degree")
        if need == 0:
            continue
        g = build_graph(rot)
        fs = trace_faces(g)
        outer = fs.dart_face[outer_dart]
        corners = [a for a in rot[v]
                   if fs.corner_face(g, v, a).degree != 3 or fs.dart_face[(a, v)] == outer]
        if not corners:
            raise InfeasibleSpec(f"{kind}: no free corner at role {nm}")
        a = rng.choice(corners) if rng else corners[0]
        pos = rot[v].index(a) + 1
        for _ in range(need):
            leaf = len(rot)
            rot.append([v])
            rot[v].insert(pos, leaf)
    n = len(rot)
    perm = list(range(n))
    if rng is not None:
        rng.shuffle(perm)
    new_rot: list[list[int]] = [[] for _ in range(n)]
    for old in range(n):
        new_rot[perm[old]] = [perm[x] for x in rot[old]]
    g = build_graph(new_rot)
    if not is_plane_embedding(g):
        raise GeneratorError(f"{kind}: host is not a plane embedding")
    roles = {nm: perm[idx[nm]] for nm in names}
    for alias, target in _646_ALIASES.get(kind, {}).items():
        roles[alias] = roles[target]
    return g, PlantedConfig(kind, roles, dict(core.degree))
