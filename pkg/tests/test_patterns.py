import random

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from tcckit.generators import build_configuration_host
from tcckit.graph import from_edges
from tcckit.patterns import (FORBIDDEN, PREDICATE_RULES, DegreeSpec, PatternGraph,
                             check_counterexample_predicates, contains_forbidden, default_catalog,
                             find_around, find_fans_wheels, load_catalog, loads_catalog,
                             parse_degree_spec, subgraph_match)

from oracles import brute_matches, embed, nx_matches, random_connected_pattern, random_simple_graph


@pytest.mark.parametrize("text,spec", [
    ("6", DegreeSpec(6)), ("5+", DegreeSpec(5, "+")), ("4-", DegreeSpec(4, "-")),
    ("5⁺", DegreeSpec(5, "+")), (3, DegreeSpec(3)),
])
def test_parse_degree_spec(text, spec):
    assert parse_degree_spec(text) == spec


def test_bad_degree_spec():
    with pytest.raises(ValueError):
        parse_degree_spec("x5")


def test_default_catalog_entries():
    cat = default_catalog()
    assert set(cat.names()) >= {"mushroom", "tent", "cone", "fan4", "fan5", "wheel5", "wheel6"}
    for name in cat.names():
        assert cat[name].is_connected()


def test_catalog_env_override(tmp_path, monkeypatch):
    path = tmp_path / "mini.patcat"
    path.write_text("patcat 1\npattern edge\nn 2\ne 0 1\nend\n")
    monkeypatch.setenv("TCCKIT_CATALOG", str(path))
    cat = load_catalog()
    assert cat.names() == ["edge"]
    assert cat.source == str(path)


@pytest.mark.parametrize("text", [
    "patcat 2\n",
    "patcat 1\npattern a\nn 2\ne 0 5\nend\n",
    "patcat 1\npattern a\nn 2\ne 0 1\n",
    "patcat 1\npattern a\nn 2\ndeg 0 7x\nend\n",
])
def test_malformed_catalog(text):
    with pytest.raises(ValueError):
        loads_catalog(text)


def test_triangle_in_k4():
    k4 = from_edges(4, [(a, b) for a in range(4) for b in range(a + 1, 4)])
    tri = PatternGraph(3, ((0, 1), (1, 2), (0, 2)))
    hits = subgraph_match(k4, tri)
    assert len(hits) == 24  # 4 triangles times 6 automorphisms
    assert [m.mapping for m in hits] == sorted(m.mapping for m in hits)
    assert len(subgraph_match(k4, tri, limit=5)) == 5


def test_induced_vs_monomorphism():
    k4 = from_edges(4, [(a, b) for a in range(4) for b in range(a + 1, 4)])
    path = PatternGraph(3, ((0, 1), (1, 2)))
    assert len(subgraph_match(k4, path)) == 24
    assert subgraph_match(k4, path, induced=True) == []


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**9))
def test_matcher_agrees_with_networkx(seed):
    rng = random.Random(seed)
    g = random_simple_graph(rng, rng.randint(1, 9), rng.uniform(0.2, 0.8))
    pn = rng.randint(1, 5)
    deg = {i: DegreeSpec(rng.randint(1, 4), rng.choice("=+-")) for i in range(pn) if rng.random() < 0.3}
    p = PatternGraph(pn, tuple(random_connected_pattern(rng, pn, 0.3)), deg)
    got = sorted(m.mapping for m in subgraph_match(g, p))
    assert got == nx_matches(g, p)
    assert got == brute_matches(g, p)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**9))
def test_induced_matcher_agrees_with_brute_force(seed):
    rng = random.Random(seed)
    g = random_simple_graph(rng, rng.randint(1, 8), 0.5)
    pn = rng.randint(1, 5)
    p = PatternGraph(pn, tuple(random_connected_pattern(rng, pn, 0.4)))
    assert sorted(m.mapping for m in subgraph_match(g, p, induced=True)) == brute_matches(g, p, True)


def test_forbidden_detection_on_catalog_shapes():
    cat = default_catalog()
    for name in FORBIDDEN:
        p = cat[name]
        G = nx.Graph(list(p.edges))
        rep = contains_forbidden(embed(G))
        assert rep.found[name] is not None
        assert not rep.admissible


def test_octahedron_is_clean():
    rep = contains_forbidden(embed(nx.octahedral_graph()))
    assert rep.first_hit() is None and rep.admissible


def test_find_around_on_host():
    g, pc = build_configuration_host("646")
    seqs = find_around(g, pc["v"], [6, 4, 6])
    assert any(set(s.seq) == {pc["w"], pc["u"], pc["y"]} and s.middle == (pc["u"],) for s in seqs)
    for s in seqs:
        assert s.is_valid(g)


def test_fans_and_wheels_counts():
    # wheel W_5: hub with 5 rim vertices on a cycle
    G = nx.wheel_graph(6)
    g = embed(G)
    wheels = [(h, s) for h, s in find_fans_wheels(g, 5) if s.closed]
    assert [h for h, _ in wheels] == [0]
    fans4 = [(h, s) for h, s in find_fans_wheels(g, 4) if not s.closed]
    # five rotations of the rim path of length 5 around the hub, once each
    assert len(fans4) == 5 and all(h == 0 for h, _ in fans4)


def test_predicates_flag_planted_configurations():
    cases = {
        "triangle(4,5,5)": "455-triangle",
        "triangle(4,4,6)": "two-4-triangle",
        "2vertex": "low-degree",
        "646+4nbr+3nbr": "646-3-neighbor",
        "4646": "646-4646",
        "466466": "646-466466",
    }
    for kind, rule in cases.items():
        g, _ = build_configuration_host(kind)
        rep = check_counterexample_predicates(g)
        assert rule in rep.rules(), (kind, rep.rules())
        assert set(rep.rules()) <= set(PREDICATE_RULES)


def test_icosahedron_predicates(icosahedron):
    # every vertex has degree 5 and lies on five triangles: no structural
    # rule fires, but the dense triangulation contains forbidden shapes
    assert check_counterexample_predicates(icosahedron, include_class=False).clean
    rep = check_counterexample_predicates(icosahedron)
    assert rep.rules() == {"forbidden-subgraph"}
