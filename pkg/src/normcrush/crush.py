"""Cutting along a normal 2-sphere and crushing the result.

Cutting ``M`` along a normal sphere ``S`` splits every tetrahedron into
pieces: tips at the vertices, I-bundles between parallel disks, prisms on
either side of the quads and one central (truncated) tetrahedron in each
quad-free tetrahedron.  Crushing collapses everything except the central
pieces; the surviving tetrahedra are re-glued by tracing each face through
the flattened quad tetrahedra.  Summands lost in the collapse are tallied
from the structure of the collapsed pieces.
"""

from dataclasses import dataclass

from .homology import h1
from .normal import QUAD_OFFSET, NormalError, admissibility_problems, chi_linear, edge_crossings, quad_stats
from .surface import _map_point, arc_endpoints, reconstruct_surface
from .triangulation import (
    PARTITIONS,
    Triangulation,
    TriangulationError,
    _UnionFind,
    compose,
    connected_components,
    partner,
)


class CrushError(RuntimeError):
    def __init__(self, code, message, trace=None):
        self.code = code
        self.trace = trace
        super().__init__(message)


# -- pieces and face regions ------------------------------------------

TIP, IBUNDLE_TRI, IBUNDLE_QUAD, PRISM, CENTRAL = "tip", "I x triangle", "I x quad", "prism", "central"


@dataclass(frozen=True)
class Piece:
    kind: str
    tet: int
    label: int  # vertex for tips/triangle bundles, quad type or prism side otherwise
    index: int = 0
    truncations: int = 0

    @property
    def polyhedron(self):
        """Name of the polyhedron type."""
        if self.kind == PRISM:
            return "truncated prism" if self.truncations else "prism"
        if self.kind == CENTRAL:
            return "truncated tetrahedron" if self.truncations else "tetrahedron"
        return self.kind


@dataclass(frozen=True)
class CellDecomposition:
    pieces: tuple
    stacks: tuple  # per tetrahedron, indices of its pieces
    regions: tuple  # (face class, region key, piece index, piece index)
    face_copies: dict  # (disk index, side) -> piece index
    surface: object
    quad_type: tuple  # per tetrahedron: 0 or 1..3
    quad_count: tuple

    def piece_counts(self):
        out = {}
        for p in self.pieces:
            out[p.polyhedron] = out.get(p.polyhedron, 0) + 1
        return out


def _sphere_problems(tri, x):
    problems = admissibility_problems(tri, x)
    if problems:
        return problems
    if x.octagon is not None and x.octagon[2]:
        return ["surface has octagons"]
    if quad_stats(x)[1] == 0:
        return ["surface has no quads; vertex links cannot be crushed"]
    if chi_linear(tri, x) != 2:
        return [f"Euler characteristic is {chi_linear(tri, x)}, not 2"]
    surface = reconstruct_surface(tri, x)
    if len(surface.components) != 1:
        return [f"surface has {len(surface.components)} components"]
    return []


def _tet_layout(x, i):
    row = x.tet(i)
    tris = row[:4]
    qk = 0
    q = 0
    for k in range(3):
        if row[QUAD_OFFSET + k]:
            qk, q = k + 1, row[QUAD_OFFSET + k]
    return tris, qk, q


def _region_piece(layout, index, face, region):
    """Piece of tetrahedron ``layout`` owning a region of one of its faces.

    ``region`` is ``(u, p)``: between the p-th and (p+1)-th arcs cutting
    off ``u`` (p = 0 is the corner at ``u``), or ``None`` for the central
    region of the face.
    """
    tris, qk, q = layout
    if region is None:
        if not qk:
            return index[(CENTRAL, 0, 0)]
        return index[(PRISM, 0 if face in PARTITIONS[qk - 1][1] else 1, 0)]
    u, p = region
    if p < tris[u]:
        if p == 0:
            return index[(TIP, u, 0)]
        return index[(IBUNDLE_TRI, u, p)]
    side = 0 if u in PARTITIONS[qk - 1][0] else 1
    if p == tris[u]:
        return index[(PRISM, side, 0)]
    j = p - tris[u]  # quads counted from u
    j = j if side == 0 else q - j
    return index[(IBUNDLE_QUAD, qk, j)]


def decompose_cells(tri, x):
    """Cell decomposition of ``M`` cut along the sphere ``x``."""
    problems = _sphere_problems(tri, x)
    if problems:
        raise NormalError("precondition", "; ".join(problems))
    surface = reconstruct_surface(tri, x)
    t = tri.size
    pieces = []
    stacks = []
    local_index = []
    layouts = []
    for i in range(t):
        tris, qk, q = _tet_layout(x, i)
        layouts.append((tris, qk, q))
        index = {}

        def add(kind, label, idx=0, trunc=0):
            index[(kind, label, idx)] = len(pieces)
            pieces.append(Piece(kind, i, label, idx, trunc))

        start = len(pieces)
        for v in range(4):
            if tris[v]:
                add(TIP, v)
            for p in range(1, tris[v]):
                add(IBUNDLE_TRI, v, p)
        if qk:
            for side in (0, 1):
                trunc = sum(1 for v in PARTITIONS[qk - 1][side] if tris[v])
                add(PRISM, side, 0, trunc)
            for j in range(1, q):
                add(IBUNDLE_QUAD, qk, j)
        else:
            add(CENTRAL, 0, 0, sum(1 for v in range(4) if tris[v]))
        stacks.append(tuple(range(start, len(pieces))))
        local_index.append(index)

    def arc_count(i, f, u):
        tris, qk, q = layouts[i]
        n = tris[u]
        if qk and partner(qk - 1, u) == f:
            n += q
        return n

    regions = []
    for c, ((i, f), (j, g)) in enumerate(tri.skeleton.face_classes):
        perm = tri.gluings[i][f][1]
        keys = [None]
        for u in range(4):
            if u == f:
                continue
            for p in range(arc_count(i, f, u)):
                keys.append((u, p))
        for key in keys:
            other = None if key is None else (perm[key[0]], key[1])
            a = _region_piece(layouts[i], local_index[i], f, key)
            b = _region_piece(layouts[j], local_index[j], g, other)
            regions.append((c, (f,) + (key or ()), a, b))

    # which piece each side of each disk bounds
    face_copies = {}
    for n, d in enumerate(surface.disks):
        idx = local_index[d.tet]
        tris, qk, q = layouts[d.tet]
        if d.kind == "tri":
            v, depth = d.label, d.index
            face_copies[(n, 0)] = idx[(TIP, v, 0)] if depth == 1 else idx[(IBUNDLE_TRI, v, depth - 1)]
            if depth < tris[v]:
                face_copies[(n, 1)] = idx[(IBUNDLE_TRI, v, depth)]
            elif qk:
                face_copies[(n, 1)] = idx[(PRISM, 0 if v in PARTITIONS[qk - 1][0] else 1, 0)]
            else:
                face_copies[(n, 1)] = idx[(CENTRAL, 0, 0)]
        else:
            j = d.index
            face_copies[(n, 0)] = idx[(PRISM, 0, 0)] if j == 1 else idx[(IBUNDLE_QUAD, qk, j - 1)]
            face_copies[(n, 1)] = idx[(PRISM, 1, 0)] if j == q else idx[(IBUNDLE_QUAD, qk, j)]
    return CellDecomposition(
        tuple(pieces),
        tuple(stacks),
        tuple(regions),
        face_copies,
        surface,
        tuple(l[1] for l in layouts),
        tuple(l[2] for l in layouts),
    )


# -- walking on the two sides of the surface ---------------------------


def _arc_side(disk, slot):
    """0 if the side of ``disk`` facing the cut vertex of arc ``slot`` is
    its low side (towards the triangle's vertex or the quad's first pair)."""
    if disk.kind == "tri":
        return 0
    return 0 if slot < 2 else 1


class _SideWalk:
    """Adjacency of disk copies ``(disk, side)`` on the boundary of ``M``
    cut along the surface."""

    def __init__(self, tri, surface, crossings):
        self.tri = tri
        self.surface = surface
        self.crossings = crossings
        self.ends = [
            [arc_endpoints(crossings[d.tet], f, v, p) for f, v, p in d.arcs] for d in surface.disks
        ]

    def across(self, copy, slot):
        """Copy on the other side of arc ``slot`` and the matching slot."""
        n, side = copy
        m, slot2 = self.surface.side_match[(n, slot)]
        disks = self.surface.disks
        flip = _arc_side(disks[n], slot) ^ _arc_side(disks[m], slot2)
        return (m, side ^ flip), slot2

    def other_slot(self, n, slot, point):
        for s, ends in enumerate(self.ends[n]):
            if s != slot and point in ends:
                return s
        raise AssertionError("disk corner has a single side")

    def move_point(self, n, slot, point):
        d = self.surface.disks[n]
        j, perm = self.tri.gluings[d.tet][d.arcs[slot][0]]
        return _map_point(self.crossings, point, perm, j)

    def components(self, copies):
        uf = _UnionFind()
        for c in copies:
            uf.find(c)
            for s in range(len(self.ends[c[0]])):
                other, _ = self.across(c, s)
                if other in copies:
                    uf.union(c, other)
        return len({uf.find(c) for c in copies})

    def boundary_circles(self, copies):
        """Boundary circles of the subsurface made of ``copies``, as a list of
        sets of boundary arcs ``(copy, slot)``."""
        boundary = set()
        for c in copies:
            for s in range(len(self.ends[c[0]])):
                if self.across(c, s)[0] not in copies:
                    boundary.add((c, s))
        uf = _UnionFind()
        for arc in sorted(boundary):
            uf.find(arc)
            copy, slot = arc
            for point in self.ends[copy[0]][slot]:
                cur, s, pt = copy, slot, point
                for _ in range(4 * len(self.ends) + 8):
                    s = self.other_slot(cur[0], s, pt)
                    if (cur, s) in boundary:
                        uf.union(arc, (cur, s))
                        break
                    nxt, s2 = self.across(cur, s)
                    pt = self.move_point(cur[0], s, pt)
                    cur, s = nxt, s2
                else:
                    raise AssertionError("walk around a point did not close")
        groups = {}
        for arc in boundary:
            groups.setdefault(uf.find(arc), set()).add(arc)
        return sorted(groups.values(), key=min)


# -- collapsed structure ----------------------------------------------


@dataclass(frozen=True)
class Collection:
    kind: str  # "tips", "I-bundle" or "prism ring"
    pieces: tuple
    outcome: str  # "S3", "RP3" or "L31"
    annuli: int = 0
    disks: int = 0
    moebius: int = 0
    note: str = ""

    def to_json(self):
        out = {
            "kind": self.kind,
            "pieces": len(self.pieces),
            "outcome": self.outcome,
            "collapsing_annuli": self.annuli,
            "collapsing_disks": self.disks,
            "moebius_bands": self.moebius,
        }
        if self.note:
            out["note"] = self.note
        return out


@dataclass(frozen=True)
class SideSurface:
    """Collapsing surface made of sides shared by prisms of two different
    prism components (an annulus if a truncated prism takes part)."""

    components: tuple  # the two prism-component indices
    regions: int
    truncated: bool

    def to_json(self):
        return {
            "between": list(self.components),
            "regions": self.regions,
            "surface": "annulus" if self.truncated else "disk",
        }


def _group(pieces, regions, kinds, region_filter):
    uf = _UnionFind()
    for n, p in enumerate(pieces):
        if p.kind in kinds:
            uf.find(n)
    for _, key, a, b in regions:
        if pieces[a].kind in kinds and pieces[b].kind in kinds and region_filter(key):
            uf.union(a, b)
    groups = {}
    for n in list(uf.parent):
        groups.setdefault(uf.find(n), []).append(n)
    return sorted(tuple(sorted(g)) for g in groups.values())


def _bundle_partner(cells, copy):
    """The opposite horizontal face of the I-bundle bounded by ``copy``."""
    n, side = copy
    d = cells.surface.disks[n]
    target = (d.tet, d.kind, d.label, d.index + (1 if side else -1))
    for m, e in enumerate(cells.surface.disks):
        if (e.tet, e.kind, e.label, e.index) == target:
            return (m, 1 - side)
    raise AssertionError("I-bundle without an opposite face")


def _ring_monodromy(tri, cells, start):
    """Permutation of the top face's vertices after going once around a
    ring of prisms, starting at prism ``start``."""
    piece = cells.pieces[start]
    i = piece.tet
    pair = PARTITIONS[cells.quad_type[i] - 1][1 - piece.label]
    face0 = pair[0]
    phi = (0, 1, 2, 3)
    tet, face = i, face0
    for _ in range(2 * len(cells.pieces) + 2):
        j, perm = tri.gluings[tet][face]
        phi = compose(perm, phi)
        g = perm[face]
        qk = cells.quad_type[j]
        if not qk:
            raise AssertionError("prism ring reaches a quad-free tetrahedron")
        pair = next(p for p in PARTITIONS[qk - 1] if g in p)
        h = pair[1] if g == pair[0] else pair[0]
        swap = list(range(4))
        swap[g], swap[h] = h, g
        phi = compose(tuple(swap), phi)
        tet, face = j, h
        if (tet, face) == (i, face0):
            return tuple(phi[u] for u in range(4) if u != face0), tuple(u for u in range(4) if u != face0)
    raise AssertionError("prism ring does not close")


# -- crushing -------------------------------------------------------------


def _flatten_trace(tri, quad_type, i, f):
    """Follow face ``f`` of kept tetrahedron ``i`` through flattened quad
    tetrahedra to the kept face it ends on.  Returns ``(j, perm, path)``."""
    phi = (0, 1, 2, 3)
    tet, face = i, f
    path = [(i, f)]
    seen = set()
    while True:
        j, perm = tri.gluings[tet][face]
        phi = compose(perm, phi)
        g = perm[face]
        path.append((j, g))
        if not quad_type[j]:
            return j, phi, path
        if (j, g) in seen:
            raise CrushError("trace_cycle", f"trace from face {f} of tetrahedron {i} cycles", path)
        seen.add((j, g))
        pair = next(p for p in PARTITIONS[quad_type[j] - 1] if g in p)
        h = pair[1] if g == pair[0] else pair[0]
        swap = list(range(4))
        swap[g], swap[h] = h, g
        phi = compose(tuple(swap), phi)
        tet, face = j, h
        path.append((j, h))


def flatten(tri, quad_type):
    """Triangulation left after flattening every tetrahedron with a quad.

    Returns ``(triangulation, kept)`` where ``kept[n]`` is the original
    index of new tetrahedron ``n``.
    """
    kept = [i for i in range(tri.size) if not quad_type[i]]
    new_index = {i: n for n, i in enumerate(kept)}
    rows = []
    for i in kept:
        row = []
        for f in range(4):
            j, phi, path = _flatten_trace(tri, quad_type, i, f)
            if (j, phi[f]) == (i, f):
                raise CrushError("self_glued", f"face {f} of tetrahedron {i} traces back to itself", path)
            row.append((new_index[j], phi))
        rows.append(tuple(row))
    try:
        return Triangulation(tuple(rows)), kept
    except TriangulationError as exc:
        raise CrushError("invalid_result", f"crushed complex is not a valid triangulation: {exc}") from None


@dataclass(frozen=True)
class CrushReport:
    input_size: int
    sphere: object
    summands: tuple  # connected Triangulations
    origins: tuple  # per summand, original indices of its tetrahedra
    removed: int  # tetrahedra with quads
    collections: tuple
    core_components: int
    side_surfaces: tuple
    piece_counts: dict

    @property
    def counters(self):
        n = sum(c.annuli for c in self.collections) + sum(1 for s in self.side_surfaces if s.truncated)
        m = sum(c.disks for c in self.collections) + sum(1 for s in self.side_surfaces if not s.truncated)
        p = sum(c.moebius for c in self.collections)
        k = len(self.collections) + self.core_components
        return {"n": n, "m": m, "p": p, "k": k}

    @property
    def ledger(self):
        c = self.counters
        return {
            "s3": sum(1 for x in self.collections if x.outcome == "S3"),
            "rp3": sum(1 for x in self.collections if x.outcome == "RP3"),
            "l31": sum(1 for x in self.collections if x.outcome == "L31"),
            "s1xs2": c["n"] + c["m"] + c["p"] + 2 - c["k"],
        }

    def to_json(self):
        return {
            "input_tetrahedra": self.input_size,
            "sphere": ",".join(str(v) for v in self.sphere.coords),
            "removed_tetrahedra": self.removed,
            "summands": [
                {"tetrahedra": s.size, "origin": list(o)} for s, o in zip(self.summands, self.origins)
            ],
            "counters": self.counters,
            "ledger": self.ledger,
            "collections": [c.to_json() for c in self.collections],
            "prism_sides": [x.to_json() for x in self.side_surfaces],
            "pieces": dict(sorted(self.piece_counts.items())),
        }


def _collapse_structure(tri, cells, x):
    pieces = cells.pieces
    crossings = edge_crossings(tri, x)
    walk = _SideWalk(tri, cells.surface, crossings)
    faces_of = {}
    for copy, n in cells.face_copies.items():
        faces_of.setdefault(n, []).append(copy)

    collections = []
    corner = lambda key: len(key) == 3 and key[2] == 0
    strip = lambda key: len(key) == 3 and key[2] > 0
    central = lambda key: len(key) == 1

    for group in _group(pieces, cells.regions, {TIP}, corner):
        copies = {c for n in group for c in faces_of[n]}
        circles = walk.boundary_circles(copies)
        collections.append(Collection("tips", group, "S3", disks=len(circles)))

    for group in _group(pieces, cells.regions, {IBUNDLE_TRI, IBUNDLE_QUAD}, strip):
        copies = {c for n in group for c in faces_of[n]}
        twisted = walk.components(copies) == 1
        circles = walk.boundary_circles(copies)
        circle_of = {arc: k for k, arcs in enumerate(circles) for arc in arcs}
        annuli = moebius = 0
        seen = set()
        for k, arcs in enumerate(circles):
            if k in seen:
                continue
            copy, slot = min(arcs)
            image = circle_of[(_bundle_partner(cells, copy), slot)]
            seen.update((k, image))
            if image == k:
                moebius += 1
            else:
                annuli += 1
        collections.append(
            Collection("I-bundle", group, "RP3" if twisted else "S3", annuli=annuli, moebius=moebius)
        )

    core = 0
    component_of = {}
    for c, group in enumerate(_group(pieces, cells.regions, {PRISM, CENTRAL}, central)):
        for n in group:
            component_of[n] = c
        if any(pieces[n].kind == CENTRAL for n in group):
            core += 1
            continue
        mono, face = _ring_monodromy(tri, cells, group[0])
        if mono == face:
            note = "top and bottom identified without twist: collapses to a trivial summand"
            collections.append(Collection("prism ring", group, "S3", note=note))
        else:
            note = "top and bottom identified by a 1/3 twist: twice punctured L(3,1)"
            collections.append(Collection("prism ring", group, "L31", note=note))

    # sides shared by prisms of different components form collapsing surfaces
    contacts = {}
    for _, key, a, b in cells.regions:
        if len(key) == 3 and pieces[a].kind == PRISM and pieces[b].kind == PRISM:
            ca, cb = component_of[a], component_of[b]
            if ca != cb:
                entry = contacts.setdefault((min(ca, cb), max(ca, cb)), [0, False])
                entry[0] += 1
                entry[1] = entry[1] or bool(pieces[a].truncations or pieces[b].truncations)
    sides = tuple(SideSurface(pair, n, trunc) for pair, (n, trunc) in sorted(contacts.items()))
    return tuple(collections), core, sides


def homology_balance(tri, report):
    """Compare H_1 of ``tri`` with the summands plus the ledger.

    Free rank must equal the summands' ranks plus the S^1 x S^2 count, and
    the prime-power torsion must equal the summands' torsion plus one Z/2
    per RP^3 and one Z/3 per L(3,1).
    """
    ledger = report.ledger
    whole = h1(tri)
    parts = [h1(s) for s in report.summands]
    rank = sum(g.rank for g in parts) + ledger["s1xs2"]
    torsion = [q for g in parts for q in g.primary_parts()] + [2] * ledger["rp3"] + [3] * ledger["l31"]
    return {
        "rank": {"input": whole.rank, "accounted": rank},
        "torsion": {"input": list(whole.primary_parts()), "accounted": sorted(torsion)},
        "ok": whole.rank == rank and whole.primary_parts() == tuple(sorted(torsion)),
    }


def crush(tri, x, check=True):
    """Crush ``tri`` along the non-trivial normal sphere ``x``.

    With ``check`` the ledger is verified against integral homology and a
    ``CrushError("ledger_mismatch")`` is raised if it does not balance.
    """
    cells = decompose_cells(tri, x)
    collections, core, sides = _collapse_structure(tri, cells, x)
    summands, origins = (), ()
    if not all(cells.quad_type):
        flat, kept = flatten(tri, cells.quad_type)
        summands = tuple(connected_components(flat))
        labels = flat.component_labels()
        origins = tuple(
            tuple(kept[n] for n, lab in enumerate(labels) if lab == c) for c in range(len(summands))
        )
    removed = sum(1 for q in cells.quad_type if q)
    if sum(s.size for s in summands) != tri.size - removed:
        raise CrushError("conservation", "summand sizes do not add up to the kept tetrahedra")
    if len(summands) != core:
        raise CrushError(
            "core_mismatch", f"{len(summands)} summands but {core} core components in the cut complex"
        )
    report = CrushReport(tri.size, x, summands, origins, removed, collections, core, sides, cells.piece_counts())
    if report.ledger["s1xs2"] != sum(report.counters[v] for v in "nmp") + 2 - report.counters["k"]:
        raise AssertionError("ledger arithmetic")
    if check:
        balance = homology_balance(tri, report)
        if not balance["ok"]:
            raise CrushError("ledger_mismatch", f"ledger does not balance H_1: {balance}", balance)
    return report


crush_along = crush
