"""Prime decomposition by repeated sphere search and crushing.

The input is first made one-vertex.  Each piece is searched for a
non-trivial normal sphere; a finding is crushed, its ledger (the
S^1 x S^2, RP^3 and L(3,1) summands lost in the collapse) is added to the
totals and the resulting pieces go back on the work list.  A piece with no
sphere is either recognized as the 3-sphere and dropped, or reported as an
irreducible summand.
"""

import os
from dataclasses import dataclass, field

from .crush import CrushError, crush
from .homology import h1
from .normal import QUAD_OFFSET, NormalError, NormalVector, is_admissible
from .search import SearchStats, iter_sphere_findings, recognize_s3
from .sums import to_one_vertex
from .triangulation import EDGES, PARTITIONS, write_triangulation


class DecomposeError(RuntimeError):
    def __init__(self, code, message, details=None):
        self.code = code
        self.details = details or {}
        super().__init__(message)


def _crush_first(tri, findings, skipped):
    """Crush along the first finding whose ledger balances H_1."""
    for finding in findings:
        try:
            return finding, crush(tri, finding.vector)
        except CrushError as exc:
            if exc.code != "ledger_mismatch":
                raise
            skipped.append(str(finding.vector))
    return None, None


def edge_sphere(tri, edge):
    """Normal sphere bounding a neighbourhood of ``edge`` and its two
    (distinct) end vertices, or None when the edge meets some tetrahedron
    in a way that does not give a normal surface directly."""
    sk = tri.skeleton
    a, b = sk.edge_ends[edge]
    if a == b:
        return None
    x = [0] * (7 * tri.size)
    for i in range(tri.size):
        ends = set()
        quads = set()
        for k, (u, w) in enumerate(EDGES):
            if sk.edge_of[i][k] != edge:
                continue
            if u in ends or w in ends:
                return None
            ends |= {u, w}
            quads.add(next(j for j, part in enumerate(PARTITIONS) if (u, w) in part))
        if len(quads) > 1:
            return None
        for j in quads:
            x[7 * i + QUAD_OFFSET + j] = 1
        for c in range(4):
            if c not in ends and sk.vertex_of[i][c] in (a, b):
                x[7 * i + c] = 1
    x = NormalVector(x)
    return x if is_admissible(tri, x) else None


def reduce_vertices(tri):
    """Crush along the first usable edge sphere.  The side containing the
    edge is a ball, so the crush loses no summand and strictly lowers the
    tetrahedron count.  Returns ``(edge, report)`` or None."""
    for edge in range(len(tri.skeleton.edge_classes)):
        x = edge_sphere(tri, edge)
        if x is None:
            continue
        try:
            return edge, crush(tri, x)
        except (CrushError, NormalError):
            continue
    return None


def decide_s3(tri, jobs=1):
    """True iff ``tri`` is the 3-sphere: trivial H_1 and an empty
    decomposition with nothing in the ledger."""
    group = h1(tri)
    if group.rank or group.torsion:
        return False
    report = prime_decompose(tri, "full", jobs=jobs)
    led = report.ledger
    return not report.summands and not (led["r1"] or led["r2"] or led["r3"])


def splitting_evidence(tri, x, jobs=1):
    """Whether the sphere ``x`` really splits ``M``.

    It does when crushing shows a non-separating sphere (an S^1 x S^2
    summand) or at least two pieces that are not the 3-sphere.  Pieces
    with non-trivial H_1 are counted first, so the 3-sphere test only runs
    when it can change the answer.
    """
    try:
        report = crush(tri, x)
    except CrushError as exc:
        if exc.code != "ledger_mismatch":
            raise
        return {"splits": False, "inconclusive": "crush ledger does not balance H_1"}
    ledger = report.ledger
    nontrivial = ledger["rp3"] + ledger["l31"]
    homology = [h1(s) for s in report.summands]
    nontrivial += sum(1 for g in homology if g.rank or g.torsion)
    undecided = [s for s, g in zip(report.summands, homology) if not (g.rank or g.torsion)]
    checked = 0
    for summand in undecided:
        if ledger["s1xs2"] or nontrivial >= 2:
            break
        checked += 1
        if not decide_s3(summand, jobs):
            nontrivial += 1
    return {
        "splits": bool(ledger["s1xs2"] or nontrivial >= 2),
        "ledger": ledger,
        "nontrivial_pieces": nontrivial,
        "s3_checks": checked,
    }


@dataclass
class _Piece:
    tri: object
    mode: str
    path: str  # position in the recursion tree, e.g. "0.1"


@dataclass
class DecompositionReport:
    input: dict
    mode: str
    assume_minimal: bool
    iterations: list = field(default_factory=list)
    summands: list = field(default_factory=list)
    recognitions: list = field(default_factory=list)
    ledger: dict = field(default_factory=lambda: {"r1": 0, "r2": 0, "r3": 0, "s3_dropped": 0})
    stats: dict = field(default_factory=dict)
    balance: dict = None

    def summand_homology(self):
        return [s["homology"] for s in self.summands]

    def primes(self):
        """H_1 of every prime summand found: the reported summands plus one
        group per ledger entry."""
        led = self.ledger
        return sorted(self.summand_homology() + ["Z"] * led["r1"] + ["Z/2"] * led["r2"] + ["Z/3"] * led["r3"])

    def to_json(self):
        return {
            "schema": 1,
            "input": self.input,
            "mode": self.mode,
            "assume_minimal": self.assume_minimal,
            "iterations": self.iterations,
            "summands": [{k: v for k, v in s.items() if k != "triangulation"} for s in self.summands],
            "s3_recognitions": self.recognitions,
            "ledger": self.ledger,
            "stats": self.stats,
            "balance": self.balance,
        }


def _balance(tri, report):
    whole = h1(tri)
    parts = [h1(s["triangulation"]) for s in report.summands]
    led = report.ledger
    rank = sum(g.rank for g in parts) + led["r1"]
    torsion = sorted([q for g in parts for q in g.primary_parts()] + [2] * led["r2"] + [3] * led["r3"])
    return {
        "rank": {"input": whole.rank, "accounted": rank},
        "torsion": {"input": list(whole.primary_parts()), "accounted": torsion},
        "ok": whole.rank == rank and list(whole.primary_parts()) == torsion,
    }


def _nontrivial(group):
    return bool(group.rank or group.torsion)


def prime_decompose(tri, mode="full", assume_minimal=False, jobs=1, out_dir=None, name="summand"):
    """Decompose ``tri`` into irreducible summands plus counted S^1 x S^2,
    RP^3 and L(3,1) summands.

    The input is made one-vertex first.  Pieces with several vertices that
    later come out of a crush are crushed along an edge sphere when one is
    normal, and otherwise along any normal sphere that is not a vertex
    link; with none, the piece is a two-vertex 3-sphere.

    ``mode`` applies to the input only; pieces produced by a crush are not
    minimal and are always searched in full.  In restricted mode a miss on
    the input is trusted only with ``assume_minimal``, and the summand is
    flagged as contingent on minimality.  With ``out_dir`` the summands are
    written there as triangulation files.
    """
    if mode not in ("full", "restricted"):
        raise DecomposeError("usage", f"unknown mode {mode!r}")
    if tri.size == 0 or not tri.is_connected():
        raise DecomposeError("invalid_input", "input must be a non-empty connected triangulation")
    stats = SearchStats()
    report = DecompositionReport(
        {"tetrahedra": tri.size, "vertices": tri.skeleton.v, "homology": str(h1(tri))}, mode, assume_minimal
    )
    work = [_Piece(tri, mode, "0")]
    while work:
        piece = work.pop(0)
        current = piece.tri
        if current.skeleton.v > 1 and piece.path == "0":
            current = to_one_vertex(current).triangulation
            report.input["one_vertex_tetrahedra"] = current.size
        if current.skeleton.v > 1:
            reduced = reduce_vertices(current)
            if reduced is not None:
                edge, crushed = reduced
                report.iterations.append(_iteration(piece, current, "edge sphere", crushed, edge=edge))
                _fold(report, crushed.ledger)
                work.extend(_children(piece, crushed, "full"))
                continue
        multi = current.skeleton.v > 1
        findings = iter_sphere_findings(current, "full" if multi else piece.mode, jobs=jobs, stats=stats, multi_vertex=True)
        skipped = []
        finding, crushed = _crush_first(current, findings, skipped)
        if crushed is not None:
            report.iterations.append(
                _iteration(piece, current, piece.mode + " search", crushed, finding=finding, skipped=skipped)
            )
            _fold(report, crushed.ledger)
            work.extend(_children(piece, crushed, "full"))
            continue
        if multi and not skipped:
            # only vertex-linking spheres: the 3-sphere, and with exactly two vertices
            if current.skeleton.v != 2 or _nontrivial(h1(current)):
                raise DecomposeError(
                    "anomaly",
                    f"piece {piece.path} has {current.skeleton.v} vertices and no other normal sphere",
                    {"gluings": current.gluings},
                )
            report.ledger["s3_dropped"] += 1
            report.recognitions.append(
                {"piece": piece.path, "tetrahedra": current.size, "decided_by": "only vertex-linking spheres"}
            )
            continue
        if piece.mode == "restricted" and (skipped or not assume_minimal):
            work.insert(0, _Piece(current, "full", piece.path))
            continue
        if skipped:
            raise DecomposeError(
                "crush_failed", f"piece {piece.path}: no sphere could be crushed consistently", {"skipped": skipped}
            )
        group = h1(current)
        if _nontrivial(group):
            is_s3, how = False, "homology"
        else:
            is_s3, how = recognize_s3(current, stats=stats, assume_no_sphere=True).is_s3, "almost normal search"
        if is_s3:
            report.ledger["s3_dropped"] += 1
            report.recognitions.append({"piece": piece.path, "tetrahedra": current.size, "decided_by": how})
            continue
        report.summands.append(
            {
                "piece": piece.path,
                "tetrahedra": current.size,
                "homology": str(group),
                "s3": False,
                "s3_decided_by": how,
                "contingent_on_minimality": piece.mode == "restricted",
                "file": None,
                "triangulation": current,
            }
        )
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        for k, entry in enumerate(report.summands):
            path = os.path.join(out_dir, f"{name}_{k}.tri")
            write_triangulation(entry["triangulation"], path)
            entry["file"] = path
    report.stats = {
        "iterations": len(report.iterations),
        "sphere_crushes": sum(1 for it in report.iterations if it["kind"] != "edge sphere"),
        "lps": stats.lps,
        "cones": stats.cones,
    }
    report.balance = _balance(tri, report)
    if not report.balance["ok"]:
        raise DecomposeError("balance", "decomposition does not account for H_1 of the input", report.balance)
    return report


def _fold(report, led):
    report.ledger["r1"] += led["s1xs2"]
    report.ledger["r2"] += led["rp3"]
    report.ledger["r3"] += led["l31"]


def _children(piece, crushed, mode):
    return [_Piece(s, mode, f"{piece.path}.{k}") for k, s in enumerate(crushed.summands)]


def _iteration(piece, current, kind, crushed, finding=None, skipped=(), edge=None):
    out = {"piece": piece.path, "kind": kind, "tetrahedra": current.size}
    if edge is not None:
        out["edge"] = edge
        out["sphere"] = {"vector": str(crushed.sphere)}
    if finding is not None:
        out["sphere"] = finding.to_json()
    if skipped:
        out["skipped_spheres"] = list(skipped)
    out["crush_ledger"] = crushed.ledger
    out["pieces"] = [s.size for s in crushed.summands]
    return out
