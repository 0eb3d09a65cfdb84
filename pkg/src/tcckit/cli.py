"""``tcckit`` command line.

Every subcommand prints a human summary, or with ``--json`` a
:class:`RunReport`.  Exit codes are a stable contract, see ``EXIT_CODES``.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

from . import __version__
from .coloring import (ColoringError, PartialTotalColoring, SolverTimeout, SolveStats, loads_tcc,
                       solve, total_chromatic_number, validate, write_tcc)
from .discharge import DischargeError, DischargeParams, audit, parametric_analysis
from .dot import to_dot
from .extension import (Config646, ExtensionError, extend_edge_uv,
                        extend_vertex_u, locate_config, replay_trace, trace_jsonl)
from .generators import (MODES, GeneratorError, GenSpec, GenStats, gen_planar, metadata,
                         write_with_metadata)
from .graph import ParseError, Graph, edge_key, loads_tcg, trace_faces
from .patterns import (FORBIDDEN, check_counterexample_predicates, contains_forbidden,
                       default_catalog, find_fans_wheels, load_catalog, subgraph_match)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_NOT_IN_CLASS = 3
EXIT_TIMEOUT = 4
EXIT_NO_COLORING = 5
EXIT_EXTENSION = 6
EXIT_DISCHARGE = 7
EXIT_GENERATOR = 8
EXIT_IO = 9

EXIT_CODES = {
    EXIT_OK: "ok",
    EXIT_USAGE: "bad flags",
    EXIT_PARSE: "input does not parse",
    EXIT_NOT_IN_CLASS: "graph outside the theorem class",
    EXIT_TIMEOUT: "solver node budget exhausted",
    EXIT_NO_COLORING: "no coloring with the requested palette",
    EXIT_EXTENSION: "extension procedure failed or hypothesis not met",
    EXIT_DISCHARGE: "discharging error",
    EXIT_GENERATOR: "generator error",
    EXIT_IO: "file could not be read or written",
}

DEFAULT_NODE_BUDGET = 10**8


class CliError(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


@dataclass
class RunReport:
    command: list[str]
    inputs: list[dict] = field(default_factory=list)  # {"path", "digest"}
    verdicts: list[dict] = field(default_factory=list)
    timings: dict[str, float] | None = None
    artifacts: list[str] = field(default_factory=list)
    exit_code: int = 0

    def to_json(self) -> dict:
        out = {"command": self.command, "inputs": self.inputs, "verdicts": self.verdicts}
        if self.timings is not None:
            out["timings"] = self.timings
        out["artifacts"] = self.artifacts
        out["exit_code"] = self.exit_code
        return out


def digest_bytes(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def _read(path: str) -> tuple[str, str]:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise CliError(EXIT_IO, f"{path}: {exc.strerror or exc}") from exc
    return data.decode("utf-8", errors="replace"), digest_bytes(data)


def _load_graph(path: str) -> tuple[Graph, str]:
    text, dig = _read(path)
    try:
        return loads_tcg(text), dig
    except ParseError as exc:
        raise CliError(EXIT_PARSE, f"{path}: {exc}") from exc


def _load_coloring(path: str) -> PartialTotalColoring:
    text, _ = _read(path)
    try:
        return loads_tcc(text)
    except (ParseError, ColoringError, ValueError) as exc:
        raise CliError(EXIT_PARSE, f"{path}: {exc}") from exc


def _frac(x: Fraction) -> str:
    return str(x)


class _Clock:
    def __init__(self, enabled: bool):
        self.enabled = enabled
        self.marks: dict[str, float] = {}
        self._t = time.perf_counter()

    def lap(self, name: str) -> None:
        now = time.perf_counter()
        self.marks[name] = round(now - self._t, 6)
        self._t = now

    def result(self) -> dict[str, float] | None:
        return self.marks if self.enabled else None


# ---------------------------------------------------------------------------
# per-file workers (top level so they can run in worker processes)


def _verify_one(path: str, opts: dict) -> dict:
    clock = _Clock(not opts["no_timing"])
    out: dict = {"input": path}
    try:
        g, dig = _load_graph(path)
        out["digest"] = dig
        clock.lap("parse")
        fs = trace_faces(g)
        out["faces"] = len(fs)
        clock.lap("faces")
        out["max_degree"] = g.max_degree
        if g.max_degree > 6:
            raise CliError(EXIT_NOT_IN_CLASS, f"maximum degree {g.max_degree} exceeds 6")
        rep = contains_forbidden(g, load_catalog(opts["catalog"]) if opts["catalog"] else None)
        clock.lap("patterns")
        hit = rep.first_hit()
        if hit is not None:
            out["pattern"] = hit
            out["match"] = list(rep.found[hit].mapping)
            raise CliError(EXIT_NOT_IN_CLASS, f"contains a {hit}")
        st = SolveStats()
        rng = random.Random(opts["seed"]) if opts["seed"] is not None else None
        w = solve(g, 8, rng=rng, node_budget=opts["node_budget"], stats=st)
        clock.lap("solve")
        out["nodes"] = st.nodes
        if w is None:
            raise CliError(EXIT_NO_COLORING, "no total 8-coloring exists")
        bad = validate(g, w)
        if bad or not w.is_total(g):
            raise CliError(EXIT_NO_COLORING, f"witness failed revalidation: {bad[:1]}")
        wpath = _witness_path(path, opts["witness_dir"])
        write_tcc(w, wpath)
        out["witness"] = str(wpath)
        out["verdict"] = "colorable"
        out["exit_code"] = EXIT_OK
    except SolverTimeout as exc:
        out.update(verdict="timeout", exit_code=EXIT_TIMEOUT, message=f"gave up after {exc.nodes} nodes")
    except CliError as exc:
        out.update(verdict=EXIT_CODES[exc.code], exit_code=exc.code, message=str(exc))
    except OSError as exc:
        out.update(verdict=EXIT_CODES[EXIT_IO], exit_code=EXIT_IO, message=str(exc))
    out["timings"] = clock.result()
    return out


def _witness_path(path: str, witness_dir: str | None) -> Path:
    p = Path(path)
    name = p.stem + ".witness.tcc"
    return Path(witness_dir) / name if witness_dir else p.with_name(name)


def _discharge_one(path: str, opts: dict) -> dict:
    clock = _Clock(not opts["no_timing"])
    out: dict = {"input": path}
    try:
        g, dig = _load_graph(path)
        out["digest"] = dig
        fs = trace_faces(g)
        params = DischargeParams(lam=opts["lam"], mu=Fraction(1, 2) - opts["lam"],
                                 donor_mode=opts["donor_mode"])
        rep = audit(g, fs, params)
        clock.lap("audit")
        out["audit"] = rep.to_json()
        par = parametric_analysis(g, fs, opts["lam"])
        out["parametric"] = {"lambda": _frac(par.lam), "mu": _frac(par.mu), "sum": _frac(par.total),
                             "frontier": None if par.frontier is None else _frac(par.frontier),
                             "max_degree": par.max_degree}
        out["verdict"] = rep.verdict
        out["exit_code"] = EXIT_OK
    except CliError as exc:
        out.update(verdict=EXIT_CODES[exc.code], exit_code=exc.code, message=str(exc))
    except DischargeError as exc:
        out.update(verdict=EXIT_CODES[EXIT_DISCHARGE], exit_code=EXIT_DISCHARGE,
                   message=f"{type(exc).__name__}: {exc}")
    out["timings"] = clock.result()
    return out


def _patterns_one(path: str, opts: dict) -> dict:
    out: dict = {"input": path}
    try:
        g, dig = _load_graph(path)
        out["digest"] = dig
        cat = load_catalog(opts["catalog"]) if opts["catalog"] else default_catalog()
        names = opts["names"] or list(FORBIDDEN)
        found = {}
        for nm in names:
            if nm not in cat.names():
                raise CliError(EXIT_USAGE, f"unknown pattern {nm!r}; catalog has {cat.names()}")
            hits = subgraph_match(g, cat[nm], limit=opts["limit"])
            found[nm] = [list(m.mapping) for m in hits]
        out["matches"] = found
        if opts["fans"]:
            out["fans_wheels"] = {
                str(k): [{"hub": hub, "seq": list(s.seq), "closed": s.closed}
                         for hub, s in find_fans_wheels(g, k)] for k in opts["fans"]}
        if opts["predicates"]:
            rep = check_counterexample_predicates(g, None, cat)
            out["predicate_violations"] = [v.to_json() for v in rep.violations]
        out["verdict"] = "match" if any(found.values()) else "clean"
        out["exit_code"] = EXIT_OK
    except CliError as exc:
        out.update(verdict=EXIT_CODES[exc.code], exit_code=exc.code, message=str(exc))
    return out


def _run_many(fn: Callable[[str, dict], dict], paths: Sequence[str], opts: dict, jobs: int) -> list[dict]:
    if jobs <= 1 or len(paths) <= 1:
        return [fn(p, opts) for p in paths]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, paths, [opts] * len(paths)))


# ---------------------------------------------------------------------------
# subcommands


def _opts(args) -> dict:
    return {"seed": args.seed, "no_timing": args.no_timing, "node_budget": args.node_budget,
            "catalog": getattr(args, "catalog", None)}


def _finish_many(report: RunReport, results: list[dict]) -> int:
    for r in results:
        if "digest" in r:
            report.inputs.append({"path": r["input"], "digest": r["digest"]})
        t = r.pop("timings", None)
        if report.timings is not None and t is not None:
            report.timings[r["input"]] = t
        report.verdicts.append(r)
        if "witness" in r:
            report.artifacts.append(r["witness"])
    return max((r["exit_code"] for r in results), default=EXIT_OK)


def cmd_verify(args, report: RunReport) -> int:
    opts = _opts(args) | {"witness_dir": args.witness_dir}
    res = _run_many(_verify_one, args.inputs, opts, args.jobs)
    code = _finish_many(report, res)
    if not args.json:
        for r in res:
            tail = f" -> {r['witness']}" if "witness" in r else f" ({r.get('message', '')})"
            print(f"{r['input']}: {r['verdict']}{tail}")
    return code


def cmd_discharge(args, report: RunReport) -> int:
    try:
        lam = Fraction(args.lam)
    except (ValueError, ZeroDivisionError) as exc:
        raise CliError(EXIT_USAGE, f"bad --lambda {args.lam!r}") from exc
    opts = _opts(args) | {"lam": lam, "donor_mode": args.donor_mode}
    res = _run_many(_discharge_one, args.inputs, opts, args.jobs)
    code = _finish_many(report, res)
    if args.out:
        Path(args.out).write_text(json.dumps([r.get("audit") for r in res], indent=2) + "\n")
        report.artifacts.append(args.out)
    if not args.json:
        for r in res:
            if "audit" in r:
                a = r["audit"]
                si, sf = (_frac(Fraction(a[k]["num"], a[k]["den"])) for k in ("sum_initial", "sum_final"))
                print(f"{r['input']}: initial {si} final {sf} "
                      f"transfers {len(a['transfers'])} negatives {len(a['negatives'])} "
                      f"verdict {a['verdict']}; parametric sum {r['parametric']['sum']}")
            else:
                print(f"{r['input']}: {r['message']}")
    return code


def cmd_patterns(args, report: RunReport) -> int:
    opts = _opts(args) | {"names": args.pattern, "limit": args.limit, "fans": args.fans,
                          "predicates": args.predicates}
    res = _run_many(_patterns_one, args.inputs, opts, args.jobs)
    code = _finish_many(report, res)
    if not args.json:
        for r in res:
            if "matches" not in r:
                print(f"{r['input']}: {r['message']}")
                continue
            parts = [f"{k}={len(v)}" for k, v in r["matches"].items()]
            print(f"{r['input']}: " + " ".join(parts))
            for v in r.get("predicate_violations", []):
                print(f"  {v['rule']} at {v['witness']}")
    return code


def cmd_chi(args, report: RunReport) -> int:
    clock = _Clock(not args.no_timing)
    g, dig = _load_graph(args.input)
    report.inputs.append({"path": args.input, "digest": dig})
    try:
        res = total_chromatic_number(g, args.max_k, node_budget=args.node_budget)
    except ValueError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from exc
    clock.lap("solve")
    report.timings = clock.result()
    if res is None:
        report.verdicts.append({"chi": None, "max_k": args.max_k})
        if not args.json:
            print(f"no total coloring with at most {args.max_k} colors")
        return EXIT_NO_COLORING
    bad = validate(g, res.witness)
    if bad:
        raise CliError(EXIT_NO_COLORING, f"witness failed revalidation: {bad[0]}")
    v = {"chi": res.chi, "certificate": res.certificate, "nodes_at_lower": res.nodes_at_lower,
         "max_degree": g.max_degree}
    if args.witness:
        write_tcc(res.witness, args.witness)
        report.artifacts.append(args.witness)
    report.verdicts.append(v)
    if not args.json:
        print(f"chi'' = {res.chi} ({res.certificate})")
    return EXIT_OK


def cmd_color(args, report: RunReport) -> int:
    clock = _Clock(not args.no_timing)
    g, dig = _load_graph(args.input)
    report.inputs.append({"path": args.input, "digest": dig})
    fixed = _load_coloring(args.fixed) if args.fixed else None
    k = args.k if args.k is not None else (fixed.k if fixed else g.max_degree + 2)
    if fixed is not None and fixed.k != k:
        fixed = PartialTotalColoring(k, dict(fixed.colors))
    rng = random.Random(args.seed) if args.seed is not None else None
    st = SolveStats()
    try:
        w = solve(g, k, fixed, rng=rng, node_budget=args.node_budget, stats=st)
    except ColoringError as exc:
        raise CliError(EXIT_PARSE, str(exc)) from exc
    clock.lap("solve")
    report.timings = clock.result()
    if w is None:
        report.verdicts.append({"k": k, "colorable": False, "nodes": st.nodes})
        if not args.json:
            print(f"no total {k}-coloring extends the given colors")
        return EXIT_NO_COLORING
    report.verdicts.append({"k": k, "colorable": True, "nodes": st.nodes})
    if args.out:
        write_tcc(w, args.out)
        report.artifacts.append(args.out)
    if not args.json:
        print(f"total {k}-coloring found" + (f", written to {args.out}" if args.out else ""))
    return EXIT_OK


def _pick_config(g: Graph, which: str) -> Config646:
    cfgs = locate_config(g)
    if not cfgs:
        raise CliError(EXIT_EXTENSION, "no [6,4,6] configuration around a 6-vertex")
    if which == "auto":
        strength = {"iii": 4, "ii": 3, "i": 2, "base": 1}
        return max(cfgs, key=lambda c: max((strength[h] for h in c.hypotheses), default=0))
    try:
        return cfgs[int(which)]
    except (ValueError, IndexError) as exc:
        raise CliError(EXIT_USAGE, f"--config must be 'auto' or an index below {len(cfgs)}") from exc


def cmd_extend(args, report: RunReport) -> int:
    g, dig = _load_graph(args.input)
    report.inputs.append({"path": args.input, "digest": dig})
    col = _load_coloring(args.coloring)
    cfg = _pick_config(g, args.config)
    target = args.target
    if target == "auto":
        target = "uv" if col.get(edge_key(cfg.u, cfg.v)) is None else "u"
    clock = _Clock(not args.no_timing)
    try:
        if target == "uv":
            out = extend_edge_uv(g, col, cfg, fallback=not args.no_fallback)
        else:
            out = extend_vertex_u(g, col, cfg, args.part, fallback=not args.no_fallback)
    except ExtensionError as exc:
        raise CliError(EXIT_EXTENSION, f"{type(exc).__name__}: {exc}") from exc
    clock.lap("extend")
    report.timings = clock.result()
    bad_steps = replay_trace(g, col, out.trace)
    report.verdicts.append({"config": cfg.to_json(), "target": target, "stage": out.stage,
                            "case_label": out.case_label, "fallback": out.fallback,
                            "steps": len(out.trace), "improper_steps": bad_steps})
    if args.trace:
        Path(args.trace).write_text(trace_jsonl(out.trace))
        report.artifacts.append(args.trace)
    if args.out:
        write_tcc(out.coloring, args.out)
        report.artifacts.append(args.out)
    if not args.json:
        print(f"{target} colored via {out.case_label} in {len(out.trace)} steps"
              + (" (fallback search)" if out.fallback else ""))
        if args.trace is None:
            sys.stdout.write(trace_jsonl(out.trace))
    return EXIT_EXTENSION if bad_steps else EXIT_OK


def cmd_export_dot(args, report: RunReport) -> int:
    g, dig = _load_graph(args.input)
    report.inputs.append({"path": args.input, "digest": dig})
    col = _load_coloring(args.coloring) if args.coloring else None
    text = to_dot(g, col)
    report.verdicts.append({"dot_digest": digest_bytes(text.encode())})
    if args.out:
        Path(args.out).write_text(text)
        report.artifacts.append(args.out)
    elif not args.json:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_gen(args, report: RunReport) -> int:
    if args.seed is None:
        raise CliError(EXIT_USAGE, "gen needs an explicit --seed")
    clock = _Clock(not args.no_timing)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        seed = args.seed + i
        try:
            spec = GenSpec(n=args.n, seed=seed, mode=args.mode, max_degree=args.max_degree,
                           delete_fraction=args.delete_fraction,
                           require_max_degree=args.require_max_degree, kind=args.kind)
            stats = GenStats()
            g = gen_planar(spec, stats)
        except GeneratorError as exc:
            raise CliError(EXIT_GENERATOR, f"{type(exc).__name__}: {exc}") from exc
        path = out_dir / f"{args.prefix}-{seed}.tcg"
        meta = metadata(spec, g, stats)
        side = write_with_metadata(g, path, meta)
        report.artifacts += [str(path), str(side)]
        report.verdicts.append({"path": str(path), "n": g.n, "edges": len(g.edges),
                                "max_degree": g.max_degree, "digest": meta["digest"]})
        if not args.json:
            print(f"{path}: n={g.n} m={len(g.edges)} max_degree={g.max_degree}")
    clock.lap("gen")
    report.timings = clock.result()
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=d(None), help="seed for randomized steps")
    p.add_argument("--json", action="store_true", default=d(False), help="print a JSON run report")
    p.add_argument("--no-timing", action="store_true", default=d(False),
                   help="leave timings out so reports are byte-identical")
    p.add_argument("--jobs", type=int, default=d(1), help="worker processes across input files")
    p.add_argument("--node-budget", type=int, default=d(DEFAULT_NODE_BUDGET),
                   help="search nodes per solver call")
    p.add_argument("-v", "--verbose", action="store_true", default=d(False))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tcckit", description="Total-coloring toolkit for planar graphs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name: str, fn, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_, description=help_)
        p.set_defaults(func=fn)
        return p

    p = add("gen", cmd_gen, "generate seeded embedded planar graphs")
    p.add_argument("--mode", choices=MODES, default="triangulation")
    p.add_argument("-n", "--n", type=int, default=20)
    p.add_argument("--kind", help="configuration kind for --mode config-host")
    p.add_argument("--max-degree", type=int)
    p.add_argument("--delete-fraction", type=float, default=0.0)
    p.add_argument("--require-max-degree", action="store_true")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--prefix", default="graph")
    p.add_argument("-o", "--out-dir", default=".")

    p = add("verify", cmd_verify, "check class membership and find a total 8-coloring")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--witness-dir", help="where witness colorings go (default: beside the input)")
    p.add_argument("--catalog", help="pattern catalog file")

    p = add("discharge", cmd_discharge, "run the discharging rules and audit the result")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--lambda", dest="lam", default="1/4", help="vertex weight for the parametric sum")
    p.add_argument("--donor-mode", choices=("exclusive", "split"), default="exclusive")
    p.add_argument("-o", "--out", help="write the audit JSON here")

    p = add("chi", cmd_chi, "total chromatic number with witness")
    p.add_argument("input")
    p.add_argument("--max-k", type=int)
    p.add_argument("--witness", help="write the witness coloring here")

    p = add("color", cmd_color, "find a total k-coloring, optionally extending fixed colors")
    p.add_argument("input")
    p.add_argument("-k", type=int)
    p.add_argument("--fixed", help="partial coloring that must be kept")
    p.add_argument("-o", "--out")

    p = add("patterns", cmd_patterns, "match catalog patterns, fans, wheels and predicates")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--pattern", action="append", help="catalog entry (repeatable; default: forbidden ones)")
    p.add_argument("--limit", type=int, help="stop after this many matches per pattern")
    p.add_argument("--fans", type=int, action="append", choices=(4, 5, 6),
                   help="also list k-fans and wheels (repeatable)")
    p.add_argument("--predicates", action="store_true", help="also run the structural predicates")
    p.add_argument("--catalog")

    p = add("extend", cmd_extend, "run a recoloring procedure on a [6,4,6] configuration")
    p.add_argument("input")
    p.add_argument("--coloring", required=True, help="partial total 8-coloring (tcc)")
    p.add_argument("--config", default="auto", help="'auto' or an index into the located configurations")
    p.add_argument("--target", choices=("auto", "uv", "u"), default="auto")
    p.add_argument("--part", choices=("i", "ii", "iii"))
    p.add_argument("--no-fallback", action="store_true", help="fail instead of searching locally")
    p.add_argument("--trace", help="write the trace as JSON lines here")
    p.add_argument("-o", "--out", help="write the extended coloring here")

    p = add("export-dot", cmd_export_dot, "Graphviz DOT with degree labels and colors")
    p.add_argument("input")
    p.add_argument("--coloring")
    p.add_argument("-o", "--out")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with status 2
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    report = RunReport(command=["tcckit", *argv], timings=None if args.no_timing else {})
    try:
        code = args.func(args, report)
    except CliError as exc:
        code = exc.code
        report.verdicts.append({"error": str(exc), "exit_code": code})
        if not args.json:
            print(f"tcckit: {exc}", file=sys.stderr)
    except SolverTimeout as exc:
        code = EXIT_TIMEOUT
        report.verdicts.append({"error": f"solver gave up after {exc.nodes} nodes", "exit_code": code})
        if not args.json:
            print(f"tcckit: solver gave up after {exc.nodes} nodes", file=sys.stderr)
    except OSError as exc:
        code = EXIT_IO
        report.verdicts.append({"error": str(exc), "exit_code": code})
        if not args.json:
            print(f"tcckit: {exc}", file=sys.stderr)
    report.exit_code = code
    if args.no_timing:
        report.timings = None
    if args.json:
        print(json.dumps(report.to_json(), indent=2))
    return code


if __name__ == "__main__":
    sys.exit(main())
