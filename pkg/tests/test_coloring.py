import random

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from tcckit.coloring import (ForeignElement, PartialTotalColoring, SolverTimeout, SolveStats,
                             available, color_sets, conflicts, dumps_tcc, is_proper, loads_tcc, solve,
                             total_chromatic_number, validate)
from tcckit.generators import GenSpec, gen_planar
from tcckit.graph import ParseError, from_edges

from oracles import embed, oracle_chi, oracle_colorable, oracle_proper


def _nx(g):
    return from_edges(g.number_of_nodes(), list(g.edges))


def test_violation_kinds(triangle):
    c = PartialTotalColoring(3, {0: 1, 1: 1, (0, 1): 1, (1, 2): 1, 2: 4})
    kinds = {v.kind for v in validate(triangle, c)}
    assert kinds == {"vertex-vertex", "vertex-edge", "edge-edge", "range"}
    assert not is_proper(triangle, c)


def test_foreign_element_rejected(triangle):
    with pytest.raises(ForeignElement):
        validate(triangle, PartialTotalColoring(3, {(0, 5): 1}))


def test_edge_keys_canonical():
    c = PartialTotalColoring(4, {(2, 1): 3})
    assert c.get((1, 2)) == 3 and c[(2, 1)] == 3


def test_color_sets_and_available(triangle):
    c = PartialTotalColoring(5, {0: 1, (0, 1): 2})
    cs = color_sets(triangle, c, 0)
    assert cs.open == {2} and cs.closed == {1, 2}
    assert cs.missing_closed == {3, 4, 5}
    assert available(triangle, c, (0, 2)) == [3, 4, 5]
    assert set(conflicts(triangle, 0)) == {1, 2, (0, 1), (0, 2)}


@pytest.mark.parametrize("G,chi", [
    (nx.cycle_graph(3), 3), (nx.cycle_graph(4), 4), (nx.cycle_graph(6), 3),
    (nx.complete_graph(4), 5), (nx.star_graph(3), 4),
])
def test_known_total_chromatic_numbers(G, chi):
    g = _nx(G)
    res = total_chromatic_number(g)
    assert res.chi == chi == oracle_chi(g)
    assert is_proper(g, res.witness) and res.witness.is_total(g)
    assert oracle_proper(g, dict(res.witness.colors), chi)
    assert solve(g, chi - 1) is None


def test_fixed_colors_respected(k4):
    fixed = PartialTotalColoring(5, {0: 5, (1, 2): 5})
    out = solve(k4, 5, fixed)
    assert out.get(0) == 5 and out.get((1, 2)) == 5
    assert is_proper(k4, out)


def test_improper_fixed_returns_none(triangle):
    assert solve(triangle, 3, PartialTotalColoring(3, {0: 1, 1: 1})) is None


def test_exclude_leaves_elements_blank(k4):
    out = solve(k4, 5, exclude=[0, (0, 1)])
    assert 0 not in out and (0, 1) not in out
    assert len(out) == len(k4.elements()) - 2


def test_node_budget_raises(icosahedron):
    with pytest.raises(SolverTimeout):
        solve(icosahedron, 6, node_budget=5)


def test_stats_count_nodes(cube):
    st_ = SolveStats()
    assert solve(cube, 4, stats=st_) is not None
    assert st_.nodes > 0


def test_rng_changes_witness_not_validity(icosahedron):
    outs = {dumps_tcc(solve(icosahedron, 7, rng=random.Random(s))) for s in range(4)}
    assert len(outs) > 1
    for text in outs:
        assert is_proper(icosahedron, loads_tcc(text))


def test_tcc_roundtrip_and_errors():
    c = PartialTotalColoring(8, {3: 1, (0, 4): 7})
    assert loads_tcc(dumps_tcc(c)) == c
    with pytest.raises(ParseError):
        loads_tcc("tcc 1\nk 8\nv x 1\n")
    with pytest.raises(ParseError):
        loads_tcc("tcc 1\nv 0 1\n")


@settings(max_examples=25, deadline=None)
@given(n=st.integers(2, 7), p=st.floats(0.2, 0.9), seed=st.integers(0, 10**6))
def test_solver_agrees_with_oracle(n, p, seed):
    g = _nx(nx.gnp_random_graph(n, p, seed=seed))
    for k in (g.max_degree + 1, g.max_degree + 2):
        out = solve(g, k)
        assert (out is not None) == oracle_colorable(g, k)
        if out is not None:
            assert oracle_proper(g, dict(out.colors), k)


@settings(max_examples=15, deadline=None)
@given(n=st.integers(4, 30), seed=st.integers(0, 10**6))
def test_planar_witness_validates(n, seed):
    g = gen_planar(GenSpec(n=n, seed=seed, mode="sparse", max_degree=6))
    out = solve(g, g.max_degree + 2, node_budget=10**6)
    assert out is not None and oracle_proper(g, dict(out.colors), g.max_degree + 2)
