"""Command line interface.

Every command prints one JSON document on stdout.  Exit status is 0 for a
definite answer, 1 for a usage or input error and 2 when an internal
consistency check fails; errors are JSON on stderr.
"""

import argparse
import json
import os
import sys
import time

from .crush import CrushError, crush
from .decompose import DecomposeError, decide_s3, prime_decompose
from .homology import homology
from .normal import NormalError, parse_vector
from .search import (
    SearchAnomaly,
    SearchError,
    SearchStats,
    find_nontrivial_sphere,
    is_reducible_minimal,
    recognize_s3,
)
from .sums import SumError, connect_sum, to_one_vertex
from .triangulation import TriangulationError, read_triangulation, write_triangulation

SCHEMA = 1


class UsageError(Exception):
    code = "usage"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(payload):
    sys.stdout.write(json.dumps({"schema": SCHEMA, **payload}, indent=2, sort_keys=True) + "\n")


def _fail(status, code, message, details=None):
    body = {"schema": SCHEMA, "error": {"code": code, "message": message}}
    if details:
        body["error"]["details"] = details
    sys.stderr.write(json.dumps(body, sort_keys=True, default=str) + "\n")
    return status


def _load(path):
    if not os.path.exists(path):
        raise UsageError(f"no such file: {path}")
    return read_triangulation(path)


def cmd_check(args):
    tri = _load(args.file)
    sk = tri.skeleton
    return {
        "command": "check",
        "valid": True,
        "t": tri.size,
        "v": sk.v,
        "e": sk.e,
        "f": sk.f,
        "euler": sk.euler_characteristic(),
        "connected": tri.is_connected(),
        "orientable": tri.orientation() is not None,
        "edge_degrees": list(sk.edge_degrees),
    }


def cmd_homology(args):
    tri = _load(args.file)
    profile = homology(tri)
    return {"command": "homology", "groups": [str(g) for g in profile.groups], "h1": profile.h1.to_json()}


def cmd_find_sphere(args):
    tri = _load(args.file)
    stats = SearchStats()
    finding = find_nontrivial_sphere(tri, args.mode, jobs=args.jobs, stats=stats)
    out = {"command": "find-sphere", "mode": args.mode, "found": finding is not None, "lps": stats.lps}
    if finding is not None:
        out["witness"] = finding.to_json()
    return out


def cmd_is_reducible(args):
    tri = _load(args.file)
    if tri.skeleton.v != 1:
        raise SearchError("multi_vertex", f"is-reducible needs a one-vertex triangulation; this one has {tri.skeleton.v}")
    stats = SearchStats()
    verdict = is_reducible_minimal(tri, jobs=args.jobs, stats=stats)
    return {"command": "is-reducible", **verdict.to_json(), "lps": stats.lps}


def cmd_recognize_s3(args):
    tri = _load(args.file)
    stats = SearchStats()
    if tri.skeleton.v == 1:
        try:
            verdict = recognize_s3(tri, stats=stats)
            return {"command": "recognize-s3", **verdict.to_json(), "method": "almost normal search"}
        except SearchError as exc:
            if exc.code != "precondition":
                raise
    # a normal sphere or several vertices: crush first, then recognize the pieces
    is_s3 = decide_s3(tri, jobs=args.jobs)
    return {"command": "recognize-s3", "verdict": "is_s3" if is_s3 else "not_s3", "method": "decomposition"}


def cmd_crush(args):
    tri = _load(args.file)
    x = parse_vector(args.surface)
    report = crush(tri, x)
    out = {"command": "crush", **report.to_json()}
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        files = []
        for k, s in enumerate(report.summands):
            path = os.path.join(args.out, f"summand_{k}.tri")
            write_triangulation(s, path)
            files.append(path)
        for entry, path in zip(out["summands"], files):
            entry["file"] = path
    return out


def cmd_decompose(args):
    tri = _load(args.file)
    report = prime_decompose(tri, args.mode, assume_minimal=args.assume_minimal, jobs=args.jobs, out_dir=args.out)
    return {"command": "decompose", **report.to_json()}


def _write_with_sidecar(tri, path, meta):
    write_triangulation(tri, path)
    with open(path + ".json", "w", encoding="utf-8") as fh:
        json.dump({"schema": SCHEMA, **meta}, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_connect_sum(args):
    result = connect_sum(_load(args.a), _load(args.b), use_good_vertex=args.use_good_vertex)
    meta = {"command": "connect-sum", **result.metadata}
    _write_with_sidecar(result.triangulation, args.out, meta)
    return {**meta, "file": args.out}


def cmd_one_vertex(args):
    result = to_one_vertex(_load(args.file))
    meta = {"command": "one-vertex", **result.metadata}
    _write_with_sidecar(result.triangulation, args.out, meta)
    return {**meta, "file": args.out}


def build_parser():
    parser = _Parser(prog="normcrush", description="Normal surfaces, crushing and prime decomposition.")
    common = _Parser(add_help=False)
    common.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="worker processes for cone sweeps")
    common.add_argument("--timing", action="store_true", help="add wall-clock seconds to the report")
    common.add_argument(
        "--deterministic",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="byte-identical output for identical input (default; --timing turns it off)",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", parents=[common], help="validate and print skeleton counts")
    p.add_argument("file")
    p.set_defaults(run=cmd_check)
    p = sub.add_parser("homology", parents=[common], help="integral homology")
    p.add_argument("file")
    p.set_defaults(run=cmd_homology)
    p = sub.add_parser("find-sphere", parents=[common], help="search for a non-trivial normal sphere")
    p.add_argument("file")
    p.add_argument("--mode", choices=("full", "restricted"), default="full")
    p.set_defaults(run=cmd_find_sphere)
    p = sub.add_parser("is-reducible", parents=[common], help="reducibility of a minimal one-vertex triangulation")
    p.add_argument("file")
    p.set_defaults(run=cmd_is_reducible)
    p = sub.add_parser("recognize-s3", parents=[common], help="decide whether the input is the 3-sphere")
    p.add_argument("file")
    p.set_defaults(run=cmd_recognize_s3)
    p = sub.add_parser("crush", parents=[common], help="crush along a normal sphere")
    p.add_argument("file")
    p.add_argument("--surface", required=True, help="comma separated normal coordinates")
    p.add_argument("--out", help="directory for the summand files")
    p.set_defaults(run=cmd_crush)
    p = sub.add_parser("decompose", parents=[common], help="prime decomposition")
    p.add_argument("file")
    p.add_argument("--mode", choices=("full", "restricted"), default="full")
    p.add_argument("--assume-minimal", action="store_true", help="trust a restricted search that finds nothing")
    p.add_argument("--out", help="directory for the summand files")
    p.set_defaults(run=cmd_decompose)
    p = sub.add_parser("connect-sum", parents=[common], help="triangulate the connected sum of A and B")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--out", required=True)
    p.add_argument("--use-good-vertex", action="store_true", help="save a tetrahedron when a good vertex exists")
    p.set_defaults(run=cmd_connect_sum)
    p = sub.add_parser("one-vertex", parents=[common], help="convert to a one-vertex triangulation")
    p.add_argument("file")
    p.add_argument("--out", required=True)
    p.set_defaults(run=cmd_one_vertex)
    return parser


_INPUT_CODES = {"usage", "invalid_input", "precondition", "multi_vertex", "empty", "too_small"}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        if args.jobs < 1:
            raise UsageError("--jobs must be at least 1")
        if args.timing and args.deterministic:
            raise UsageError("--timing adds wall-clock data and cannot be combined with --deterministic")
        start = time.perf_counter()
        payload = args.run(args)
        if args.timing:
            payload["seconds"] = round(time.perf_counter() - start, 3)
        _emit(payload)
        return 0
    except UsageError as exc:
        return _fail(1, "usage", str(exc))
    except (TriangulationError, NormalError) as exc:
        return _fail(1, exc.code, str(exc))
    except (SearchError, SumError, DecomposeError) as exc:
        status = 1 if exc.code in _INPUT_CODES else 2
        return _fail(status, exc.code, str(exc), getattr(exc, "details", None))
    except CrushError as exc:
        return _fail(2, exc.code, str(exc), exc.trace)
    except SearchAnomaly as exc:
        return _fail(2, "anomaly", str(exc), exc.details)
    except OSError as exc:
        return _fail(1, "io", str(exc))


if __name__ == "__main__":
    sys.exit(main())
