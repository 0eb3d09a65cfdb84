"""Total-coloring toolkit for embedded planar graphs of maximum degree six."""

__version__ = "0.1.0"

from .coloring import (PartialTotalColoring, SolverTimeout, is_proper, solve,  # noqa: E402
                       total_chromatic_number, validate)
from .discharge import DischargeParams, audit, parametric_analysis  # noqa: E402
from .extension import (Config646, extend_edge_uv, extend_vertex_u, locate_config,  # noqa: E402
                        reducibility_test)
from .generators import GenSpec, build_configuration_host, gen_planar  # noqa: E402
from .graph import Graph, build_graph, loads_tcg, read_tcg, trace_faces  # noqa: E402
from .patterns import contains_forbidden, default_catalog, subgraph_match  # noqa: E402

__all__ = [
    "Config646", "DischargeParams", "GenSpec", "Graph", "PartialTotalColoring", "SolverTimeout",
    "audit", "build_configuration_host", "build_graph", "contains_forbidden", "default_catalog",
    "extend_edge_uv", "extend_vertex_u", "gen_planar", "is_proper", "loads_tcg", "locate_config",
    "parametric_analysis", "read_tcg", "reducibility_test", "solve", "subgraph_match",
    "total_chromatic_number", "trace_faces", "validate",
]
