"""Acceptance suite: one test per criterion, run in order."""

import random
import time
from fractions import Fraction as F

import networkx as nx
import pytest

from tcckit.cli import EXIT_OK, main
from tcckit.coloring import read_tcc, solve, total_chromatic_number, validate
from tcckit.discharge import DischargeParams, audit, frontier_value, parametric_analysis
from tcckit.extension import (blocked_instance, derive_facts, extend_edge_uv, extend_vertex_u,
                              locate_config, reducibility_test, replay_trace)
from tcckit.generators import GenSpec, build_configuration_host, gen_planar, sample_theorem_class
from tcckit.graph import from_edges, read_tcg, trace_faces, write_tcg
from tcckit.patterns import DegreeSpec, PatternGraph, subgraph_match

from oracles import brute_matches, oracle_proper, random_connected_pattern, random_simple_graph

SPLIT = DischargeParams(donor_mode="split")


def corpus():
    """200 seeded connected embedded planar graphs, 3 <= n <= 200, mixing
    triangulations and thinned graphs."""
    out = []
    for seed in range(200):
        rng = random.Random(seed)
        n = rng.randint(3, 200)
        if seed % 2:
            spec = GenSpec(n=n, seed=seed)
        else:
            spec = GenSpec(n=n, seed=seed, mode="sparse", max_degree=rng.choice((None, 6, 8)),
                           delete_fraction=rng.uniform(0, 0.3))
        out.append(gen_planar(spec))
    return out


def test_charge_conservation_on_seeded_corpus():
    graphs = corpus()
    assert len(graphs) == 200 and min(g.n for g in graphs) >= 3 and max(g.n for g in graphs) <= 200
    t0 = time.perf_counter()
    for g in graphs:
        rep = audit(g, trace_faces(g), SPLIT)
        assert rep.sum_initial == -8 and rep.sum_final == -8
    assert time.perf_counter() - t0 < 10


@pytest.mark.parametrize("kind", ["triangle(4,5,6)", "triangle(4,6,6)", "triangle(5,5,5)",
                                  "triangle(5,5,6)", "triangle(5,6,6)", "triangle(6,6,6)"])
def test_admissible_triangle_faces_end_at_zero(kind):
    g, pc = build_configuration_host(kind)
    fs = trace_faces(g)
    rep = audit(g, fs, SPLIT)
    f = next(f for f in fs if f.degree == 3 and set(f.vertex_set()) == {pc["a"], pc["b"], pc["c"]})
    assert rep.final.face(f.id) == 0


def test_fan_and_wheel_spot_cases():
    for seed in (None, 0, 1):
        for kind, want in (("fan4-donor5", 0), ("fan4-donor6", 0), ("wheel5", 1)):
            g, pc = build_configuration_host(kind, seed=seed)
            assert audit(g).final.vertex(pc["h"]) == want


def test_parametric_sum_and_frontier():
    for g in corpus():
        fs = trace_faces(g)
        for lam in (F(1, 8), F(1, 4), F(3, 8)):
            assert parametric_analysis(g, fs, lam).total == -2
    assert frontier_value(F(1, 4), 6) == F(-1, 10)


def test_oracle_total_chromatic_numbers():
    t0 = time.perf_counter()
    known = [(nx.cycle_graph(3), 3), (nx.cycle_graph(4), 4), (nx.cycle_graph(6), 3),
             (nx.complete_graph(4), 5), (nx.star_graph(3), 4)]
    for G, chi in known:
        g = from_edges(G.number_of_nodes(), list(G.edges))
        res = total_chromatic_number(g)
        assert res.chi == chi
        assert res.certificate == ("degree_bound" if chi == g.max_degree + 1 else "exhausted")
        assert solve(g, chi - 1) is None
        assert oracle_proper(g, dict(res.witness.colors), chi)
    count = 0
    for G in nx.graph_atlas_g()[1:]:
        if G.number_of_nodes() > 7 or not nx.is_connected(G):
            continue
        g = from_edges(G.number_of_nodes(), list(G.edges))
        res = total_chromatic_number(g)
        assert g.max_degree + 1 <= res.chi <= g.max_degree + 2
        assert oracle_proper(g, dict(res.witness.colors), res.chi)
        count += 1
    assert count == 996
    assert time.perf_counter() - t0 < 300


def test_theorem_class_samples_are_eight_colorable(tmp_path, capsys):
    paths = []
    for i in range(50):
        rng = random.Random(1000 + i)
        g = sample_theorem_class(GenSpec(n=rng.randint(15, 30), seed=1000 + i, max_degree=6,
                                         require_max_degree=True))
        assert g.max_degree == 6 and 15 <= g.n <= 30
        path = tmp_path / f"s{i:02d}.tcg"
        write_tcg(g, path)
        paths.append(path)
    code = main(["verify", "--node-budget", str(10**8), *map(str, paths)])
    capsys.readouterr()
    assert code == EXIT_OK
    for path in paths:
        g = read_tcg(path)
        w = read_tcc(path.with_name(path.stem + ".witness.tcc"))
        assert w.k == 8 and w.is_total(g) and validate(g, w) == []
        assert oracle_proper(g, dict(w.colors), 8)


def _procedure_runs(kind, target, part, n_instances):
    done = constrained = 0
    seed = 0
    while done < n_instances:
        g, pc = build_configuration_host(kind, seed=seed)
        cfg = next(c for c in locate_config(g) if c.v == pc["v"] and c.u == pc["u"])
        rng = random.Random(seed)
        for depth in (0, 1, 2):
            for pin in ((False, True) if target == "u" else (False,)):
                for _ in range(5):
                    col = blocked_instance(g, cfg, target, rng, depth=depth, pin_facts=pin)
                    assert col is not None
                    if target == "uv":
                        out = extend_edge_uv(g, col, cfg, fallback=False)
                    else:
                        out = extend_vertex_u(g, col, cfg, part, fallback=False)
                    assert not out.fallback
                    assert replay_trace(g, col, out.trace) == []
                    assert validate(g, out.coloring) == []
                    if out.constrained:
                        erase = [cfg.three_nbr] if part == "i" else []
                        assert derive_facts(g, col, cfg, erase=erase).all_hold
                        constrained += 1
                    done += 1
        seed += 1
    return done, constrained


@pytest.mark.parametrize("kind,target,part", [
    ("646", "uv", None), ("646+4nbr+3nbr", "u", "i"), ("4646", "u", "ii"), ("466466", "u", "iii")])
def test_recoloring_procedures_are_sound(kind, target, part):
    done, constrained = _procedure_runs(kind, target, part, 1000)
    assert done >= 1000
    if target == "u":
        assert constrained > 0


@pytest.mark.parametrize("kind,role", [("2vertex", "c"), ("triangle(4,4,6)", "a"), ("triangle(4,5,5)", "a")])
def test_gadgets_are_reducible(kind, role):
    g, pc = build_configuration_host(kind)
    assert reducibility_test(g, pc[role], 8, node_budget=10**7).verdict == "reducible"


def test_matcher_equals_injection_enumeration():
    rng = random.Random(20240)
    for _ in range(500):
        g = random_simple_graph(rng, rng.randint(1, 10), rng.uniform(0.15, 0.7))
        pn = rng.randint(1, 6)
        deg = {i: DegreeSpec(rng.randint(1, 5), rng.choice("=+-")) for i in range(pn) if rng.random() < 0.2}
        p = PatternGraph(pn, tuple(random_connected_pattern(rng, pn, 0.25)), deg)
        assert sorted(m.mapping for m in subgraph_match(g, p)) == brute_matches(g, p)
