import json
import random
import subprocess
import sys

import networkx as nx
import pytest

from tcckit.cli import (EXIT_EXTENSION, EXIT_IO, EXIT_NO_COLORING, EXIT_NOT_IN_CLASS, EXIT_OK, EXIT_PARSE,
                        EXIT_TIMEOUT, EXIT_USAGE, main)
from tcckit.coloring import is_proper, read_tcc, write_tcc
from tcckit.extension import blocked_instance, locate_config
from tcckit.generators import build_configuration_host
from tcckit.graph import read_tcg, write_tcg
from tcckit.patterns import default_catalog

from oracles import embed


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, "--json", "--no-timing", *argv)
    return code, json.loads(out)


@pytest.fixture
def class_graph(tmp_path, capsys):
    code, _ = run(capsys, "gen", "--mode", "theorem1-class", "-n", "22", "--max-degree", "6",
                  "--require-max-degree", "--seed", "11", "-o", str(tmp_path))
    assert code == EXIT_OK
    return tmp_path / "graph-11.tcg"


def test_gen_requires_seed(tmp_path, capsys):
    code, rep = run_json(capsys, "gen", "-o", str(tmp_path))
    assert code == EXIT_USAGE and "seed" in rep["verdicts"][0]["error"]


def test_gen_writes_graph_and_metadata(tmp_path, capsys):
    code, rep = run_json(capsys, "gen", "-n", "15", "--seed", "4", "--count", "2", "-o", str(tmp_path))
    assert code == EXIT_OK
    assert sorted(p.rsplit("/", 1)[1] for p in rep["artifacts"]) == [
        "graph-4.tcg", "graph-4.tcg.meta.json", "graph-5.tcg", "graph-5.tcg.meta.json"]
    assert read_tcg(tmp_path / "graph-4.tcg").n == 15


def test_verify_writes_witness(class_graph, capsys):
    code, rep = run_json(capsys, "verify", str(class_graph))
    assert code == EXIT_OK
    v = rep["verdicts"][0]
    assert v["verdict"] == "colorable"
    g = read_tcg(class_graph)
    w = read_tcc(v["witness"])
    assert w.k == 8 and w.is_total(g) and is_proper(g, w)
    assert rep["inputs"][0]["digest"].startswith("sha256:")


def test_verify_reports_mushroom(tmp_path, capsys):
    p = default_catalog()["mushroom"]
    path = tmp_path / "m.tcg"
    write_tcg(embed(nx.Graph(list(p.edges))), path)
    code, rep = run_json(capsys, "verify", str(path))
    assert code == EXIT_NOT_IN_CLASS and rep["verdicts"][0]["pattern"] == "mushroom"


def test_verify_rejects_high_degree(tmp_path, capsys):
    path = tmp_path / "w.tcg"
    write_tcg(embed(nx.wheel_graph(9)), path)
    code, _ = run_json(capsys, "verify", str(path))
    assert code == EXIT_NOT_IN_CLASS


def test_verify_parse_error(tmp_path, capsys):
    path = tmp_path / "bad.tcg"
    path.write_text("tcg 1\nn 2\nr 0 1\n")
    code, _ = run(capsys, "verify", str(path))
    assert code == EXIT_PARSE


def test_verify_missing_file(tmp_path, capsys):
    code, _ = run(capsys, "verify", str(tmp_path / "nope.tcg"))
    assert code == EXIT_IO


def test_verify_timeout(class_graph, capsys):
    code, _ = run(capsys, "verify", str(class_graph), "--node-budget", "3")
    assert code == EXIT_TIMEOUT


def test_global_flags_before_or_after(class_graph, capsys):
    a = run(capsys, "--json", "--no-timing", "verify", str(class_graph))[1]
    b = run(capsys, "verify", str(class_graph), "--json", "--no-timing")[1]
    ja, jb = json.loads(a), json.loads(b)
    ja.pop("command"), jb.pop("command")
    assert ja == jb and "timings" not in ja


def test_reports_are_byte_identical(class_graph, capsys):
    first = run(capsys, "--json", "--no-timing", "discharge", str(class_graph))[1]
    second = run(capsys, "--json", "--no-timing", "discharge", str(class_graph))[1]
    assert first == second


def test_jobs_matches_serial(tmp_path, capsys):
    run(capsys, "gen", "--mode", "sparse", "--max-degree", "6", "-n", "25", "--seed", "1", "--count", "3",
        "-o", str(tmp_path))
    files = sorted(str(p) for p in tmp_path.glob("*.tcg"))
    serial = run_json(capsys, "discharge", *files)[1]
    par = run_json(capsys, "--jobs", "2", "discharge", *files)[1]
    serial.pop("command"), par.pop("command")
    assert serial == par


def test_discharge_cube(tmp_path, capsys):
    path = tmp_path / "cube.tcg"
    write_tcg(embed(nx.hypercube_graph(3)), path)
    code, rep = run_json(capsys, "discharge", str(path))
    a = rep["verdicts"][0]["audit"]
    assert code == EXIT_OK and a["transfers"] == []
    assert a["sum_initial"] == a["sum_final"] == {"num": -8, "den": 1}
    assert rep["verdicts"][0]["parametric"]["sum"] == "-2"


def test_discharge_shared_donor_exit(tmp_path, capsys):
    path = tmp_path / "ico.tcg"
    write_tcg(embed(nx.icosahedral_graph()), path)
    assert run(capsys, "discharge", str(path))[0] == 7
    assert run(capsys, "discharge", str(path), "--donor-mode", "split")[0] == EXIT_OK


def test_chi_k4(tmp_path, capsys):
    path = tmp_path / "k4.tcg"
    write_tcg(embed(nx.complete_graph(4)), path)
    code, rep = run_json(capsys, "chi", str(path), "--max-k", "6", "--witness", str(tmp_path / "w.tcc"))
    assert code == EXIT_OK and rep["verdicts"][0]["chi"] == 5
    assert rep["verdicts"][0]["certificate"] == "exhausted"
    assert run(capsys, "chi", str(path), "--max-k", "4")[0] == EXIT_NO_COLORING


def test_color_with_fixed(tmp_path, capsys, k4):
    path = tmp_path / "k4.tcg"
    write_tcg(k4, path)
    from tcckit.coloring import PartialTotalColoring
    write_tcc(PartialTotalColoring(5, {0: 5}), tmp_path / "f.tcc")
    code, _ = run(capsys, "color", str(path), "--fixed", str(tmp_path / "f.tcc"), "-o", str(tmp_path / "o.tcc"))
    out = read_tcc(tmp_path / "o.tcc")
    assert code == EXIT_OK and out.get(0) == 5 and is_proper(k4, out)
    assert run(capsys, "color", str(path), "-k", "4")[0] == EXIT_NO_COLORING


def test_patterns_command(tmp_path, capsys):
    g, pc = build_configuration_host("fan4-donor5")
    path = tmp_path / "f.tcg"
    write_tcg(g, path)
    code, rep = run_json(capsys, "patterns", str(path), "--pattern", "fan4", "--fans", "4", "--predicates")
    v = rep["verdicts"][0]
    assert code == EXIT_OK and v["matches"]["fan4"] and v["fans_wheels"]["4"]
    assert run(capsys, "patterns", str(path), "--pattern", "nonesuch")[0] == EXIT_USAGE


@pytest.mark.parametrize("kind,target", [("646", "uv"), ("4646", "u"), ("466466", "u")])
def test_extend_auto(tmp_path, capsys, kind, target):
    g, pc = build_configuration_host(kind, seed=3)
    write_tcg(g, tmp_path / "h.tcg")
    cfg = next(c for c in locate_config(g) if c.u == pc["u"] and c.v == pc["v"])
    col = blocked_instance(g, cfg, target, random.Random(0), pin_facts=target == "u")
    write_tcc(col, tmp_path / "c.tcc")
    code, rep = run_json(capsys, "extend", str(tmp_path / "h.tcg"), "--coloring", str(tmp_path / "c.tcc"),
                         "--trace", str(tmp_path / "t.jsonl"), "-o", str(tmp_path / "o.tcc"))
    v = rep["verdicts"][0]
    assert code == EXIT_OK and v["target"] == target and v["improper_steps"] == []
    assert not v["fallback"]
    steps = [json.loads(line) for line in (tmp_path / "t.jsonl").read_text().splitlines()]
    assert len(steps) == v["steps"]
    assert is_proper(g, read_tcc(tmp_path / "o.tcc"))


def test_extend_without_configuration(tmp_path, capsys, cube):
    write_tcg(cube, tmp_path / "c.tcg")
    from tcckit.coloring import solve
    write_tcc(solve(cube, 8), tmp_path / "c.tcc")
    code, _ = run(capsys, "extend", str(tmp_path / "c.tcg"), "--coloring", str(tmp_path / "c.tcc"))
    assert code == EXIT_EXTENSION


def test_export_dot(tmp_path, capsys, triangle):
    write_tcg(triangle, tmp_path / "t.tcg")
    code, out = run(capsys, "export-dot", str(tmp_path / "t.tcg"))
    assert code == EXIT_OK and out.count(" -- ") == 3
    again = run(capsys, "export-dot", str(tmp_path / "t.tcg"))[1]
    assert out == again


def test_console_script_entry(tmp_path):
    res = subprocess.run([sys.executable, "-m", "tcckit", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "tcckit" in res.stdout


def test_bad_flag_is_usage_error(capsys):
    assert main(["verify"]) == EXIT_USAGE
