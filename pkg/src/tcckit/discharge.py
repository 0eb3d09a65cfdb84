"""Exact-rational discharging: initial charges, the seven redistribution
rules in two phases, an auditor, and the parametric charge identity.

Charges live on vertices and faces; keys are ``("v", id)`` and ``("f", id)``.
Phase 1 (R1-R3) moves fixed amounts.  Phase 2 (R4-R7) lets fan and wheel
centres absorb the phase-1 remainders of designated neighbours; receivers
and donors are read off the phase-1 snapshot, so transfer order is
irrelevant.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .graph import FaceSet, Graph, trace_faces, triangle_type
from .patterns import PatternCatalog, PredicateReport, check_counterexample_predicates

Key = tuple[str, int]
THIRD = Fraction(1, 3)
HALF = Fraction(1, 2)


class DischargeError(ValueError):
    pass


class DisconnectedGraph(DischargeError):
    pass


class SharedDonor(DischargeError):
    def __init__(self, donor: int, receivers: Iterable[int]):
        self.donor = donor
        self.receivers = tuple(receivers)
        super().__init__(f"vertex {donor} is a donor for receivers {list(self.receivers)}")


class AmbiguousMiddle(DischargeError):
    pass


def key_str(key: Key) -> str:
    return f"{key[0]}{key[1]}"


def _frac_json(x: Fraction) -> dict:
    return {"num": x.numerator, "den": x.denominator}


@dataclass
class ChargeLedger:
    charges: dict[Key, Fraction]

    def __getitem__(self, key: Key) -> Fraction:
        return self.charges[key]

    def vertex(self, v: int) -> Fraction:
        return self.charges[("v", v)]

    def face(self, f: int) -> Fraction:
        return self.charges[("f", f)]

    def total(self) -> Fraction:
        return sum(self.charges.values(), Fraction(0))

    def copy(self) -> "ChargeLedger":
        return ChargeLedger(dict(self.charges))

    def negatives(self) -> list[Key]:
        return [k for k, x in self.charges.items() if x < 0]


@dataclass(frozen=True)
class Transfer:
    rule: str
    src: Key
    dst: Key
    amount: Fraction

    def to_json(self) -> dict:
        return {"rule": self.rule, "from": key_str(self.src), "to": key_str(self.dst),
                "num": self.amount.numerator, "den": self.amount.denominator}


@dataclass(frozen=True)
class Flag:
    kind: str
    element: Key
    detail: str

    def to_json(self) -> dict:
        return {"kind": self.kind, "element": key_str(self.element), "detail": self.detail}


@dataclass
class TransferTrace:
    transfers: list[Transfer] = field(default_factory=list)
    flags: list[Flag] = field(default_factory=list)

    def add(self, rule: str, src: Key, dst: Key, amount: Fraction) -> None:
        self.transfers.append(Transfer(rule, src, dst, amount))

    def flag(self, kind: str, element: Key, detail: str) -> None:
        self.flags.append(Flag(kind, element, detail))

    def __len__(self) -> int:
        return len(self.transfers)


def replay(ledger: ChargeLedger, transfers: Iterable[Transfer]) -> ChargeLedger:
    out = ledger.copy()
    for t in transfers:
        out.charges[t.src] -= t.amount
        out.charges[t.dst] += t.amount
    return out


@dataclass(frozen=True)
class DischargeParams:
    lam: Fraction = Fraction(1, 4)
    mu: Fraction = Fraction(1, 4)
    donor_mode: str = "exclusive"

    def __post_init__(self):
        if self.donor_mode not in ("exclusive", "split"):
            raise ValueError(f"unknown donor mode {self.donor_mode!r}")
        if Fraction(self.lam) + Fraction(self.mu) != HALF:
            raise ValueError("lambda + mu must equal 1/2")


# ---------------------------------------------------------------------------
# charges and rules


def _require_connected(g: Graph) -> None:
    if g.n == 0 or not g.is_connected():
        raise DisconnectedGraph("discharging needs a connected embedded graph")


def initial_charges(g: Graph, fs: FaceSet | None = None) -> ChargeLedger:
    _require_connected(g)
    fs = fs if fs is not None else trace_faces(g)
    ch: dict[Key, Fraction] = {}
    for v in g.vertices():
        ch[("v", v)] = Fraction(g.degree(v) - 4)
    for f in fs:
        ch[("f", f.id)] = Fraction(f.degree - 4)
    return ChargeLedger(ch)


def r2_amount(degrees: tuple[int, int, int]) -> Fraction | None:
    """What each 6-vertex on a triangle pays under R2; ``None`` for a type
    the rule does not list."""
    d = tuple(sorted(degrees))
    if 6 not in d:
        return Fraction(0)
    if d == (4, 5, 6):
        return Fraction(2, 3)
    if d == (4, 6, 6):
        return HALF
    others = list(d)
    others.remove(6)
    if all(x >= 5 for x in others):
        return THIRD
    return None


def apply_phase1(g: Graph, fs: FaceSet, ledger: ChargeLedger) -> tuple[ChargeLedger, TransferTrace]:
    trace = TransferTrace()
    deg = [g.degree(v) for v in g.vertices()]
    for v in g.vertices():
        if deg[v] == 6:
            for u in sorted(g.neighbors(v)):
                if deg[u] == 3:
                    trace.add("R1", ("v", v), ("v", u), THIRD)
    for f in fs:
        if f.degree != 3:
            continue
        verts = sorted(f.vertex_set())
        degrees = tuple(deg[x] for x in verts)
        tc = triangle_type(degrees)
        amount = r2_amount(degrees)
        if not tc.admissible:
            trace.flag("excluded-triangle", ("f", f.id), f"{tc.degrees}: {tc.reason}")
        elif amount is None:
            trace.flag("unlisted-triangle", ("f", f.id), f"{tc.degrees}")
        for x in verts:
            if deg[x] == 6 and tc.admissible and amount:
                trace.add("R2", ("v", x), ("f", f.id), amount)
            elif deg[x] == 5:
                trace.add("R3", ("v", x), ("f", f.id), THIRD)
    return replay(ledger, trace.transfers), trace


@dataclass(frozen=True)
class Receiver:
    vertex: int
    rule: str
    fan: tuple[int, ...]  # rim sequence starting after the non-triangular corner
    donors: tuple[int, ...]


def find_receivers(g: Graph, fs: FaceSet) -> list[Receiver]:
    out = []
    for v in g.vertices():
        d = g.degree(v)
        if d not in (5, 6):
            continue
        rot = g.rotation[v]
        corners = [fs.corner_face(g, v, a) for a in rot]
        tri = [f.degree == 3 for f in corners]
        k = sum(tri)
        if k == d:
            rule = "R5" if d == 5 else "R7"
            out.append(Receiver(v, rule, tuple(rot), tuple(sorted(rot))))
        elif k == d - 1:
            tri_ids = [f.id for f, t in zip(corners, tri) if t]
            if len(set(tri_ids)) != len(tri_ids):
                raise AmbiguousMiddle(f"vertex {v}: a 3-face occupies two corners")
            j = tri.index(False)  # corner between rot[j] and rot[j+1]
            fan = tuple(rot[(j + 1 + i) % d] for i in range(d))
            if any(not g.has_edge(a, b) for a, b in zip(fan, fan[1:])):
                raise AmbiguousMiddle(f"vertex {v}: rim of the fan is not a path")
            if d == 5:
                out.append(Receiver(v, "R4", fan, (fan[2],)))
            else:
                out.append(Receiver(v, "R6", fan, (fan[2], fan[3])))
    return out


def apply_phase2(g: Graph, fs: FaceSet, ledger: ChargeLedger,
                 params: DischargeParams = DischargeParams()) -> tuple[ChargeLedger, TransferTrace]:
    trace = TransferTrace()
    snapshot = ledger.copy()
    receivers = find_receivers(g, fs)
    designations: dict[int, list[Receiver]] = defaultdict(list)
    for r in receivers:
        for dnr in r.donors:
            designations[dnr].append(r)
    receiver_set = {r.vertex for r in receivers}
    for dnr, rs in sorted(designations.items()):
        if len(rs) > 1:
            if params.donor_mode == "exclusive":
                raise SharedDonor(dnr, [r.vertex for r in rs])
            trace.flag("shared-donor", ("v", dnr), f"split among {[r.vertex for r in rs]}")
        if dnr in receiver_set:
            trace.flag("receiver-donor", ("v", dnr), "vertex both receives and donates")
        rem = snapshot.vertex(dnr)
        if rem < 0:
            trace.flag("negative-donor", ("v", dnr), f"remainder {rem}")
    for r in receivers:
        for dnr in r.donors:
            share = snapshot.vertex(dnr) / len(designations[dnr])
            if share != 0:
                trace.add(r.rule, ("v", dnr), ("v", r.vertex), share)
    return replay(ledger, trace.transfers), trace


# ---------------------------------------------------------------------------
# audit


@dataclass(frozen=True)
class NegativeElement:
    element: Key
    charge: Fraction
    explanation: str
    explained: bool

    def to_json(self) -> dict:
        return {"element": key_str(self.element), **_frac_json(self.charge),
                "explanation": self.explanation, "explained": self.explained}


@dataclass
class AuditReport:
    initial: ChargeLedger
    final: ChargeLedger
    transfers: list[Transfer]
    flags: list[Flag]
    negatives: list[NegativeElement]
    predicates: PredicateReport

    @property
    def sum_initial(self) -> Fraction:
        return self.initial.total()

    @property
    def sum_final(self) -> Fraction:
        return self.final.total()

    @property
    def verdict(self) -> str:
        ok = all(n.explained for n in self.negatives)
        return "consistent" if ok else "unexplained-negative"

    def to_json(self) -> dict:
        return {
            "sum_initial": _frac_json(self.sum_initial),
            "sum_final": _frac_json(self.sum_final),
            "transfers": [t.to_json() for t in self.transfers],
            "negatives": [n.to_json() for n in self.negatives],
            "flags": [f.to_json() for f in self.flags],
            "predicate_violations": [v.to_json() for v in self.predicates.violations],
            "verdict": self.verdict,
        }


def _support(g: Graph, fs: FaceSet, key: Key) -> set[int]:
    verts = {key[1]} if key[0] == "v" else set(fs[key[1]].vertex_set())
    out = set(verts)
    for x in verts:
        out |= g.neighbors(x)
    return out


def _describe(g: Graph, fs: FaceSet, key: Key) -> str:
    if key[0] == "f":
        f = fs[key[1]]
        degs = sorted(g.degree(x) for x in f.vertex_set())
        return f"{f.degree}-face on vertex degrees {degs}"
    v = key[1]
    tri = sum(1 for f in fs.corners(g, v) if f.degree == 3)
    nd = sorted(g.degree(u) for u in g.neighbors(v))
    return f"{g.degree(v)}-vertex on {tri} 3-faces, neighbour degrees {nd}"


def audit(g: Graph, fs: FaceSet | None = None, params: DischargeParams = DischargeParams(),
          catalog: PatternCatalog | None = None) -> AuditReport:
    """Run both phases and relate every negative final charge to a violated
    structural predicate (a witness vertex within distance one)."""
    fs = fs if fs is not None else trace_faces(g)
    ch0 = initial_charges(g, fs)
    ch1, t1 = apply_phase1(g, fs, ch0)
    ch2, t2 = apply_phase2(g, fs, ch1, params)
    preds = check_counterexample_predicates(g, fs, catalog)
    negs = []
    for key in ch2.negatives():
        support = _support(g, fs, key)
        hit = sorted({x.rule for x in preds.violations if support & set(x.witness)})
        expl = _describe(g, fs, key)
        if hit:
            expl += "; violated: " + ", ".join(hit)
        negs.append(NegativeElement(key, ch2[key], expl, bool(hit)))
    return AuditReport(ch0, ch2, t1.transfers + t2.transfers, t1.flags + t2.flags, negs, preds)


# ---------------------------------------------------------------------------
# parametric identity


@dataclass(frozen=True)
class ParametricResult:
    lam: Fraction
    mu: Fraction
    total: Fraction
    frontier: Fraction | None  # undefined below maximum degree 2
    max_degree: int


def frontier_value(lam: Fraction, delta: int) -> Fraction:
    lam = Fraction(lam)
    mu = HALF - lam
    if delta < 2:
        raise ValueError("frontier needs maximum degree at least 2")
    return (3 * mu - 1) + 3 * ((delta - 1) * lam - 1) / Fraction(delta - 1)


def parametric_analysis(g: Graph, fs: FaceSet | None, lam) -> ParametricResult:
    _require_connected(g)
    fs = fs if fs is not None else trace_faces(g)
    lam = Fraction(lam)
    mu = HALF - lam
    total = sum((lam * g.degree(v) - 1 for v in g.vertices()), Fraction(0))
    total += sum((mu * f.degree - 1 for f in fs), Fraction(0))
    front = frontier_value(lam, g.max_degree) if g.max_degree >= 2 else None
    return ParametricResult(lam, mu, total, front, g.max_degree)
