"""Deterministic Graphviz DOT output."""

from __future__ import annotations

from .coloring import PartialTotalColoring
from .graph import Graph

# one fill color per palette index; indices past the list wrap around
SWATCHES = ("#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00", "#ffff33", "#a65628",
            "#f781bf", "#999999", "#66c2a5", "#fc8d62", "#8da0cb")


def swatch(c: int) -> str:
    return SWATCHES[(c - 1) % len(SWATCHES)]


def to_dot(g: Graph, coloring: PartialTotalColoring | None = None, name: str = "G") -> str:
    """Vertices in id order, edges in sorted order; each vertex is labelled
    with its id and degree, and colored elements carry ``tcc_color`` plus a
    matching fill or pen color."""
    lines = [f"graph {name} {{", "  node [shape=circle, style=filled, fillcolor=white];"]
    for v in g.vertices():
        attrs = [f'label="{v}\\nd={g.degree(v)}"']
        c = coloring.get(v) if coloring is not None else None
        if c is not None:
            attrs += [f"tcc_color={c}", f'fillcolor="{swatch(c)}"']
        lines.append(f"  {v} [{', '.join(attrs)}];")
    for a, b in g.edges:
        c = coloring.get((a, b)) if coloring is not None else None
        if c is None:
            lines.append(f"  {a} -- {b};")
        else:
            lines.append(f'  {a} -- {b} [tcc_color={c}, label="{c}", color="{swatch(c)}", penwidth=2];')
    lines.append("}")
    return "\n".join(lines) + "\n"
