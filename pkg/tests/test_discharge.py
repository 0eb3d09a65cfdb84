import random
from fractions import Fraction as F

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from tcckit.discharge import (DischargeParams, DisconnectedGraph, SharedDonor, apply_phase1,
                              apply_phase2, audit, find_receivers, frontier_value, initial_charges,
                              parametric_analysis, r2_amount, replay)
from tcckit.generators import GenSpec, build_configuration_host, gen_planar
from tcckit.graph import build_graph, trace_faces

from oracles import embed

SPLIT = DischargeParams(donor_mode="split")


def _face_of(g, fs, verts):
    return next(f for f in fs if f.degree == 3 and set(f.vertex_set()) == set(verts))


def test_initial_charge_sum_is_minus_eight(cube, icosahedron, triangle):
    for g in (cube, icosahedron, triangle):
        assert initial_charges(g).total() == -8


def test_cube_has_no_transfers(cube):
    rep = audit(cube)
    assert rep.transfers == [] and rep.flags == []
    assert rep.sum_initial == rep.sum_final == -8
    assert rep.final.charges == rep.initial.charges


def test_icosahedron_split(icosahedron):
    rep = audit(icosahedron, params=SPLIT)
    fs = trace_faces(icosahedron)
    assert all(rep.final.vertex(v) == F(-2, 3) for v in icosahedron.vertices())
    assert all(rep.final.face(f.id) == 0 for f in fs)
    assert rep.sum_final == -8
    assert {f.kind for f in rep.flags} == {"shared-donor", "receiver-donor", "negative-donor"}


def test_icosahedron_exclusive_raises(icosahedron):
    with pytest.raises(SharedDonor):
        audit(icosahedron)


@pytest.mark.parametrize("degrees,amount", [
    ((4, 5, 6), F(2, 3)), ((6, 4, 6), F(1, 2)), ((6, 5, 5), F(1, 3)), ((6, 6, 6), F(1, 3)),
    ((5, 5, 5), F(0)), ((4, 5, 5), F(0)), ((3, 6, 6), None), ((4, 6, 7), None),
])
def test_r2_amounts(degrees, amount):
    assert r2_amount(degrees) == amount


@pytest.mark.parametrize("kind,expected", [
    ("triangle(4,5,6)", -1 + F(1, 3) + F(2, 3)),
    ("triangle(4,6,6)", -1 + F(1, 2) + F(1, 2)),
    ("triangle(5,5,5)", -1 + 3 * F(1, 3)),
    ("triangle(5,6,6)", -1 + 3 * F(1, 3)),
])
def test_triangle_face_after_phase1(kind, expected):
    g, pc = build_configuration_host(kind)
    fs = trace_faces(g)
    ch, trace = apply_phase1(g, fs, initial_charges(g, fs))
    f = _face_of(g, fs, (pc["a"], pc["b"], pc["c"]))
    assert ch.face(f.id) == expected == 0


def test_455_triangle_stays_negative_and_is_explained():
    g, pc = build_configuration_host("triangle(4,5,5)")
    rep = audit(g, params=SPLIT)
    fs = trace_faces(g)
    f = _face_of(g, fs, (pc["a"], pc["b"], pc["c"]))
    assert rep.final.face(f.id) == -1 + 2 * F(1, 3)
    neg = next(n for n in rep.negatives if n.element == ("f", f.id))
    assert neg.explained and "455-triangle" in neg.explanation
    assert any(fl.kind == "excluded-triangle" for fl in rep.flags)
    assert rep.verdict == "consistent"


def test_three_vertex_with_six_neighbours():
    g, pc = build_configuration_host("3vertex")
    fs = trace_faces(g)
    ch, _ = apply_phase1(g, fs, initial_charges(g, fs))
    assert ch.vertex(pc["c"]) == -1 + 3 * F(1, 3) == 0


@pytest.mark.parametrize("kind,expected", [
    ("fan4-donor5", 1 - F(4, 3) + (1 - F(2, 3))),
    ("fan4-donor6", 1 - F(4, 3) + (2 - F(2, 3) - F(3, 3))),
    ("wheel5", 1 - F(5, 3) + 5 * (1 - F(2, 3))),
])
@pytest.mark.parametrize("seed", [None, 0, 1, 2])
def test_fan_and_wheel_receivers(kind, expected, seed):
    g, pc = build_configuration_host(kind, seed=seed)
    rep = audit(g)
    assert rep.final.vertex(pc["h"]) == expected
    assert rep.sum_final == -8


def test_receivers_and_donors_on_fan4():
    g, pc = build_configuration_host("fan4-donor5")
    recs = [r for r in find_receivers(g, trace_faces(g)) if r.vertex == pc["h"]]
    assert len(recs) == 1 and recs[0].rule == "R4" and recs[0].donors == (pc["y3"],)


def test_phase2_without_receivers_is_identity(cube):
    fs = trace_faces(cube)
    ch1, _ = apply_phase1(cube, fs, initial_charges(cube, fs))
    ch2, trace = apply_phase2(cube, fs, ch1)
    assert ch2.charges == ch1.charges and len(trace) == 0


def test_disconnected_rejected():
    g = build_graph([[1], [0], [3], [2]])
    with pytest.raises(DisconnectedGraph):
        audit(g)
    with pytest.raises(DisconnectedGraph):
        parametric_analysis(g, None, F(1, 4))


def test_params_validate():
    with pytest.raises(ValueError):
        DischargeParams(lam=F(1, 4), mu=F(1, 3))
    with pytest.raises(ValueError):
        DischargeParams(donor_mode="greedy")


def test_transfers_replay_to_final(icosahedron):
    rep = audit(icosahedron, params=SPLIT)
    assert replay(rep.initial, rep.transfers).charges == rep.final.charges


def test_audit_json_field_order(cube):
    keys = list(audit(cube).to_json())
    assert keys == ["sum_initial", "sum_final", "transfers", "negatives", "flags",
                    "predicate_violations", "verdict"]


@settings(max_examples=40, deadline=None)
@given(n=st.integers(3, 80), seed=st.integers(0, 10**6), sparse=st.booleans())
def test_conservation_property(n, seed, sparse):
    spec = GenSpec(n=n, seed=seed, mode="sparse" if sparse else "triangulation",
                   max_degree=6 if sparse else None, delete_fraction=0.1)
    g = gen_planar(spec)
    rep = audit(g, params=SPLIT)
    assert rep.sum_initial == rep.sum_final == -8
    assert all(t.rule in {f"R{i}" for i in range(1, 8)} for t in rep.transfers)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(3, 60), seed=st.integers(0, 10**6),
       lam=st.fractions(min_value=0, max_value=F(1, 2), max_denominator=50))
def test_parametric_identity(n, seed, lam):
    g = gen_planar(GenSpec(n=n, seed=seed, mode="sparse", delete_fraction=0.2))
    assert parametric_analysis(g, None, lam).total == -2


def test_frontier_values():
    assert frontier_value(F(1, 4), 6) == F(-1, 10)
    assert frontier_value(F(1, 4), 7) == 0
    with pytest.raises(ValueError):
        frontier_value(F(1, 4), 1)


def test_parametric_reports_frontier_for_graph_degree(icosahedron):
    res = parametric_analysis(icosahedron, None, F(1, 4))
    assert res.total == -2 and res.max_degree == 5
    assert res.frontier == frontier_value(F(1, 4), 5)
