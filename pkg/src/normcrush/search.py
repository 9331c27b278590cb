"""Sphere search and 3-sphere recognition by linear optimization over cones.

A cone is fixed by a quad type per tetrahedron (or none), a triangle
coordinate forced to zero and, for almost normal search, one octagon type
in one tetrahedron.  Over the slice ``sum x = 1`` of each cone the Euler
characteristic is maximized; a positive optimum at a vertex yields a
2-sphere or projective plane.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations, product

from .lp import ConeSolver, primitive_integer
from .normal import QUAD_OFFSET, NormalVector, chi_coefficients, chi_linear, matching_system, quad_stats
from .surface import reconstruct_surface
from .triangulation import Triangulation


class SearchError(ValueError):
    def __init__(self, code, message):
        self.code = code
        super().__init__(message)


class SearchAnomaly(RuntimeError):
    """A result the theory rules out; never silently ignored."""

    def __init__(self, message, details=None):
        self.details = details or {}
        super().__init__(message)


@dataclass(frozen=True)
class ConeSpec:
    mode: str  # "normal" or "almost_normal"
    quads: tuple  # per tetrahedron: 0 (no quad) or type 1..3
    zero_triangle: object  # index into the 4t triangle coordinates; one per vertex class when several
    octagon: tuple = None  # (tet, type) in almost normal mode

    def zero_columns(self):
        cols = []
        for i, q in enumerate(self.quads):
            for k in range(3):
                if k + 1 != q or (self.octagon and self.octagon[0] == i):
                    cols.append(7 * i + QUAD_OFFSET + k)
        return cols

    @property
    def triangle_column(self):
        return triangle_column(self.zero_triangle)

    @property
    def triangle_columns(self):
        if isinstance(self.zero_triangle, tuple):
            return [triangle_column(i) for i in self.zero_triangle]
        return [self.triangle_column]

    def to_json(self):
        zero = list(self.zero_triangle) if isinstance(self.zero_triangle, tuple) else self.zero_triangle
        out = {"mode": self.mode, "quads": list(self.quads), "zero_triangle": zero}
        if self.octagon:
            out["octagon"] = list(self.octagon)
        return out


def triangle_column(i):
    return 7 * (i // 4) + i % 4


def enumerate_cones_full(tri):
    t = tri.size
    for w in product((1, 2, 3), repeat=t):
        for i in range(4 * t):
            yield ConeSpec("normal", w, i)


def enumerate_cones_restricted(tri):
    t = tri.size
    if t < 2:
        raise SearchError("too_small", "pair cones need at least two tetrahedra; use one-quad cones")
    for w in _pair_assignments(t):
        for i in range(4 * t):
            yield ConeSpec("normal", w, i)


def enumerate_cones_one_quad(tri):
    t = tri.size
    for w in _single_assignments(t):
        for i in range(4 * t):
            yield ConeSpec("normal", w, i)


def _pair_assignments(t):
    out = []
    for j, k in combinations(range(t), 2):
        for a, b in product((1, 2, 3), repeat=2):
            w = [0] * t
            w[j], w[k] = a, b
            out.append(tuple(w))
    return sorted(out)


def _single_assignments(t):
    out = []
    for j in range(t):
        for a in (1, 2, 3):
            w = [0] * t
            w[j] = a
            out.append(tuple(w))
    return sorted(out)


def enumerate_cones_almost_normal(tri):
    t = tri.size
    for w in product((1, 2, 3), repeat=t):
        for i in range(4 * t):
            for l in range(t):
                for k in (1, 2, 3):
                    yield ConeSpec("almost_normal", w, i, (l, k))


def quad_assignments(t, mode):
    if mode == "full":
        return list(product((1, 2, 3), repeat=t))
    if mode == "restricted":
        return _pair_assignments(t) if t >= 2 else _single_assignments(t)
    raise SearchError("usage", f"unknown search mode {mode!r}")


@dataclass(frozen=True)
class SphereFinding:
    vector: NormalVector
    cone: ConeSpec
    chi_before: int
    doubled: bool
    extracted: bool = False  # a component was split off a disconnected vertex

    def to_json(self):
        types, total = quad_stats(self.vector)
        return {
            "vector": ",".join(str(c) for c in self.vector.coords),
            "cone": self.cone.to_json(),
            "chi_before_doubling": self.chi_before,
            "doubled": self.doubled,
            "component_extracted": self.extracted,
            "quad_types": types,
            "quad_total": total,
        }


@dataclass
class SearchStats:
    lps: int = 0
    cones: int = 0

    def merge(self, other):
        self.lps += other.lps
        self.cones += other.cones


def _require_one_vertex(tri):
    if tri.size == 0:
        raise SearchError("empty", "the empty triangulation has no normal surfaces")
    if tri.skeleton.v != 1:
        raise SearchError(
            "multi_vertex",
            f"triangulation has {tri.skeleton.v} vertices; convert with to_one_vertex first",
        )


def _sphere_from_vertex(tri, vertex, cone):
    x = NormalVector(primitive_integer(vertex[: 7 * tri.size]))
    chi = chi_linear(tri, x)
    if chi > 2:
        raise SearchAnomaly(
            "extreme ray with Euler characteristic above 2",
            {"cone": cone.to_json(), "vector": str(x), "chi": str(chi)},
        )
    doubled = False
    if chi == 1:
        x = x.scaled(2)
        doubled = True
    surface = reconstruct_surface(tri, x)
    if len(surface.components) == 1 and surface.euler == 2:
        return SphereFinding(x, cone, int(chi), doubled)
    for comp in surface.components:
        if comp.euler == 2 and quad_stats(comp.vector)[1] > 0:
            return SphereFinding(comp.vector, cone, int(chi), doubled, extracted=True)
    raise SearchAnomaly(
        "positive Euler characteristic vertex without a non-trivial sphere component",
        {"cone": cone.to_json(), "vector": str(x), "chi": str(chi)},
    )


def zero_triangle_choices(tri):
    """Triangle coordinates to force to zero, one choice per cone.

    With one vertex this is each of the 4t triangle types in turn.  With
    several, one triangle type at each vertex class is zeroed, which keeps
    every vertex link out of the cone but no other connected surface: a
    connected normal surface using every triangle type around a vertex has
    that vertex's link as its outermost layer.
    """
    t = tri.size
    if tri.skeleton.v == 1:
        return list(range(4 * t))
    by_class = [[] for _ in range(tri.skeleton.v)]
    for i in range(t):
        for c in range(4):
            by_class[tri.skeleton.vertex_of[i][c]].append(4 * i + c)
    return [tuple(choice) for choice in product(*by_class)]


def _sweep_assignments(gluings, assignments, first_only=True):
    """Search the given quad assignments in order.  Returns (findings,
    stats); top level so it can run in worker processes."""
    tri = Triangulation(gluings, check=False)
    t = tri.size
    rows = matching_system(tri).rows()
    chi = chi_coefficients(tri)
    zero_choices = zero_triangle_choices(tri)
    stats = SearchStats()
    found = []
    for w in assignments:
        base = ConeSpec("normal", w, 0)
        solver = ConeSolver(rows, 7 * t, base.zero_columns())
        for i in zero_choices:
            stats.cones += 1
            if not solver.feasible:
                continue
            cone = ConeSpec("normal", w, i)
            opt = solver.maximize(chi, cone.triangle_columns)
            stats.lps += 1
            if not opt.feasible or opt.value <= 0:
                continue
            found.append(_sphere_from_vertex(tri, opt.vertex, cone))
            if first_only:
                return found, stats
    return found, stats


def _chunks(items, jobs):
    size = max(1, len(items) // (4 * jobs) or 1)
    return [items[k: k + size] for k in range(0, len(items), size)]


def iter_sphere_findings(tri, mode="full", jobs=1, stats=None, multi_vertex=False):
    """Yield every sphere found, in cone enumeration order, skipping
    repeats of an already reported vector.

    With ``multi_vertex`` a triangulation with several vertices is
    accepted (full mode only) and the spheres found are exactly the
    connected ones that are not vertex links.
    """
    if multi_vertex and tri.size and tri.skeleton.v > 1:
        if mode != "full":
            raise SearchError("usage", "several vertices need the full search")
    else:
        _require_one_vertex(tri)
    assignments = quad_assignments(tri.size, mode)
    stats = stats if stats is not None else SearchStats()
    seen = set()

    def fresh(findings):
        for f in findings:
            if f.vector.coords not in seen:
                seen.add(f.vector.coords)
                yield f

    if jobs <= 1 or len(assignments) < 2 * jobs:
        for w in assignments:
            found, s = _sweep_assignments(tri.gluings, [w], first_only=False)
            stats.merge(s)
            yield from fresh(found)
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(_sweep_assignments, tri.gluings, c, False) for c in _chunks(assignments, jobs)]
        try:
            for fut in futures:
                found, s = fut.result()
                stats.merge(s)
                yield from fresh(found)
        finally:
            for fut in futures:
                fut.cancel()


def find_nontrivial_sphere(tri, mode="full", jobs=1, stats=None):
    """First non-trivial normal sphere in cone enumeration order, or None."""
    _require_one_vertex(tri)
    assignments = quad_assignments(tri.size, mode)
    stats = stats if stats is not None else SearchStats()
    if jobs <= 1 or len(assignments) < 2 * jobs:
        found, s = _sweep_assignments(tri.gluings, assignments)
        stats.merge(s)
        return found[0] if found else None
    chunks = _chunks(assignments, jobs)
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(_sweep_assignments, tri.gluings, c) for c in chunks]
        try:
            for fut in futures:
                found, s = fut.result()
                stats.merge(s)
                if found:
                    return found[0]
        finally:
            for fut in futures:
                fut.cancel()
    return None


MINIMALITY_CAVEAT = (
    "verdict assumes the input triangulation is minimal; "
    "only cones with at most two quad types were searched"
)


@dataclass(frozen=True)
class ReducibilityVerdict:
    verdict: str  # "reducible", "irreducible" or "not_applicable"
    finding: SphereFinding = None
    caveat: str = MINIMALITY_CAVEAT
    reason: str = None
    evidence: dict = None

    def to_json(self):
        out = {"verdict": self.verdict, "assumes_minimal": True, "caveat": self.caveat}
        if self.finding is not None:
            out["witness"] = self.finding.to_json()
        if self.evidence is not None:
            out["evidence"] = self.evidence
        if self.reason:
            out["reason"] = self.reason
        return out


def is_reducible_minimal(tri, jobs=1, stats=None):
    """Reducibility of a minimal one-vertex triangulation from the cones
    with at most two quad types.

    A sphere found this way may still bound a ball (the double of a normal
    projective plane does, in RP3).  Each finding is crushed and accepted
    only when the pieces show ``M`` really splits: a non-separating sphere
    or at least two summands that are not the 3-sphere.
    """
    if tri.size == 0 or tri.skeleton.v != 1:
        return ReducibilityVerdict(
            "not_applicable",
            reason="input must be a one-vertex triangulation; to_one_vertex "
            "produces one but the result is no longer minimal",
        )
    from .decompose import splitting_evidence

    for finding in iter_sphere_findings(tri, "restricted", jobs=jobs, stats=stats):
        evidence = splitting_evidence(tri, finding.vector)
        if evidence["splits"]:
            return ReducibilityVerdict("reducible", finding, evidence=evidence)
    return ReducibilityVerdict("irreducible")


@dataclass(frozen=True)
class S3Verdict:
    verdict: str  # "is_s3" or "not_s3"
    witness: NormalVector = None
    cone: ConeSpec = None
    lps: int = 0

    @property
    def is_s3(self):
        return self.verdict == "is_s3"

    def to_json(self):
        out = {"verdict": self.verdict, "lps": self.lps}
        if self.witness is not None:
            out["witness"] = str(self.witness)
            out["cone"] = self.cone.to_json()
        return out


def recognize_s3(tri, stats=None, assume_no_sphere=False):
    """Decide whether ``tri`` is the 3-sphere by searching for an almost
    normal 2-sphere.

    The triangulation must contain no non-trivial normal sphere.  Unless
    ``assume_no_sphere`` is set, a full sphere search runs first and a
    finding raises ``SearchError("precondition")``.
    """
    _require_one_vertex(tri)
    t = tri.size
    stats = stats if stats is not None else SearchStats()
    if not assume_no_sphere:
        finding = find_nontrivial_sphere(tri, "full", stats=stats)
        if finding is not None:
            raise SearchError(
                "precondition",
                f"a non-trivial normal sphere exists ({finding.vector}); crush it before recognition",
            )
    rows_for = {}
    solved = {}
    for cone in enumerate_cones_almost_normal(tri):
        stats.cones += 1
        slot = cone.octagon
        if slot not in rows_for:
            ms = matching_system(tri, slot)
            coeffs = chi_coefficients(tri, slot)
            coeffs[-1] -= 1  # objective is chi minus the octagon count
            rows_for[slot] = (ms.rows(), coeffs)
        rows, objective = rows_for[slot]
        zero = tuple(cone.zero_columns())
        key = (slot, zero)
        if key not in solved:
            solved[key] = ConeSolver(rows, 7 * t + 1, zero)
        solver = solved[key]
        if not solver.feasible:
            continue
        opt = solver.maximize(objective, [cone.triangle_column])
        stats.lps += 1
        if not opt.feasible or opt.value <= 0:
            continue
        cols = primitive_integer(opt.vertex)
        x = NormalVector(cols[: 7 * t], slot + (cols[7 * t],))
        chi = chi_linear(tri, x)
        value = chi - x.octagon_count
        if x.octagon_count == 0:
            raise SearchError(
                "precondition",
                "a non-trivial normal sphere or projective plane exists; crush it before recognition",
            )
        if value > 1:
            raise SearchAnomaly(
                "almost normal vertex with chi minus octagons above 1",
                {"cone": cone.to_json(), "vector": str(x), "value": str(value)},
            )
        surface = reconstruct_surface(tri, x)
        if not any(c.euler == 2 and c.vector.octagon_count == 1 for c in surface.components):
            raise SearchAnomaly(
                "almost normal vertex is not an almost normal sphere",
                {"cone": cone.to_json(), "vector": str(x)},
            )
        return S3Verdict("is_s3", x, cone, stats.lps)
    return S3Verdict("not_s3", lps=stats.lps)
