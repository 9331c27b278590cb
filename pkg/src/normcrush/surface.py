"""Explicit reconstruction of a normal surface from its coordinates.

Every elementary disk is built as a polygon whose sides are normal arcs.
An arc is named ``(tet, face, cut, position)``: it cuts off vertex ``cut``
in face ``face`` and is the ``position``-th such arc counted from ``cut``.
Arcs are matched across face gluings, points on edges are identified, and
the Euler characteristic is counted directly as V - E + F.
"""

from collections import deque
from dataclasses import dataclass

from .normal import QUAD_OFFSET, NormalError, NormalVector, admissibility_problems, edge_crossings
from .triangulation import EDGE_INDEX, EDGES, PARTITIONS, _UnionFind


@dataclass(frozen=True)
class Disk:
    tet: int
    kind: str  # "tri", "quad" or "oct"
    label: int  # cut vertex for triangles, partition type 1..3 otherwise
    index: int  # 1-based position in its stack
    arcs: tuple  # ((face, cut, position), ...)


def tet_disks(i, row, octagon=None):
    """Elementary disks of tetrahedron ``i`` with coordinates ``row``.

    Quad ``j`` of type {a,b}|{c,d} is counted from the {a,b} side;
    octagon ``j`` of the same type is counted from the {c,d} side of the
    faces ``a`` and ``b``.
    """
    tri_counts = row[:4]
    disks = []
    for v in range(4):
        for d in range(1, tri_counts[v] + 1):
            arcs = tuple((f, v, d) for f in range(4) if f != v)
            disks.append(Disk(i, "tri", v, d, arcs))
    for k in range(3):
        q = row[QUAD_OFFSET + k]
        (a, b), (c, d) = PARTITIONS[k]
        for j in range(1, q + 1):
            arcs = (
                (a, b, tri_counts[b] + j),
                (b, a, tri_counts[a] + j),
                (c, d, tri_counts[d] + q + 1 - j),
                (d, c, tri_counts[c] + q + 1 - j),
            )
            disks.append(Disk(i, "quad", k + 1, j, arcs))
    if octagon is not None and octagon[0] == i:
        _, kind, o = octagon
        (a, b), (c, d) = PARTITIONS[kind - 1]
        for j in range(1, o + 1):
            far = o + 1 - j
            arcs = (
                (a, c, tri_counts[c] + far),
                (a, d, tri_counts[d] + far),
                (b, c, tri_counts[c] + far),
                (b, d, tri_counts[d] + far),
                (c, a, tri_counts[a] + j),
                (c, b, tri_counts[b] + j),
                (d, a, tri_counts[a] + j),
                (d, b, tri_counts[b] + j),
            )
            disks.append(Disk(i, "oct", kind, j, arcs))
    return disks


def arc_endpoints(crossings_row, face, cut, position):
    """Local points ``(edge_index, position_from_low_end)`` of an arc."""
    out = []
    for w in range(4):
        if w == face or w == cut:
            continue
        u, x = min(cut, w), max(cut, w)
        k = EDGE_INDEX[(u, x)]
        s = position if cut == u else crossings_row[k] + 1 - position
        out.append((k, s))
    return tuple(out)


@dataclass(frozen=True)
class SurfaceComponent:
    disks: tuple  # indices into SurfaceComplex.disks
    euler: int
    orientable: bool
    vector: NormalVector


@dataclass(frozen=True)
class SurfaceComplex:
    disks: tuple
    points: int
    arc_count: int
    components: tuple
    weight: int
    side_match: dict  # (disk index, arc slot) -> (disk index, arc slot)

    @property
    def euler(self):
        return sum(c.euler for c in self.components)

    def component_count(self):
        return len(self.components)


def reconstruct_surface(tri, x):
    problems = admissibility_problems(tri, x)
    if problems:
        raise NormalError("inadmissible", "; ".join(problems))
    t = tri.size
    crossings = edge_crossings(tri, x)
    disks = []
    arc_owner = {}
    for i in range(t):
        for d in tet_disks(i, x.tet(i), x.octagon):
            for s, (f, v, p) in enumerate(d.arcs):
                arc_owner[(i, f, v, p)] = (len(disks), s)
            disks.append(d)

    # identify points on edges across gluings
    points = _UnionFind()
    for i in range(t):
        for k in range(6):
            for s in range(1, crossings[i][k] + 1):
                points.find((i, k, s))
    side_match = {}
    for (i, f, v, p), (di, s) in arc_owner.items():
        j, perm = tri.gluings[i][f]
        other = arc_owner[(j, perm[f], perm[v], p)]
        side_match[(di, s)] = other
        for pt in arc_endpoints(crossings[i], f, v, p):
            points.union((i,) + pt, (j,) + _map_point(crossings, pt, perm, j))

    # components of the surface
    comp = _UnionFind()
    for n in range(len(disks)):
        comp.find(n)
    for (a, _), (b, _) in side_match.items():
        comp.union(a, b)
    groups = {}
    for n in range(len(disks)):
        groups.setdefault(comp.find(n), []).append(n)

    point_root = {}
    for key in list(points.parent):
        point_root[key] = points.find(key)

    def disk_points(n):
        d = disks[n]
        pts = set()
        for f, v, p in d.arcs:
            for pt in arc_endpoints(crossings[d.tet], f, v, p):
                pts.add(point_root[(d.tet,) + pt])
        return pts

    components = []
    for members in sorted(groups.values()):
        pts = set()
        sides = 0
        for n in members:
            pts |= disk_points(n)
            sides += len(disks[n].arcs)
        euler = len(pts) - sides // 2 + len(members)
        orientable = _orientable(tri, disks, members, side_match, crossings)
        coords = [0] * (7 * t)
        oct_count = 0
        for n in members:
            d = disks[n]
            if d.kind == "tri":
                coords[7 * d.tet + d.label] += 1
            elif d.kind == "quad":
                coords[7 * d.tet + QUAD_OFFSET + d.label - 1] += 1
            else:
                oct_count += 1
        octagon = x.octagon[:2] + (oct_count,) if x.octagon is not None else None
        components.append(SurfaceComponent(tuple(members), euler, orientable, NormalVector(tuple(coords), octagon)))

    all_points = set(point_root.values())
    return SurfaceComplex(
        disks=tuple(disks),
        points=len(all_points),
        arc_count=len(arc_owner) // 2,
        components=tuple(components),
        weight=len(all_points),
        side_match=side_match,
    )


def _boundary_cycle(disk, crossings_row):
    """Sides of a disk in cyclic order, each with a direction: list of
    (arc slot, start point, end point) in local point coordinates."""
    ends = [arc_endpoints(crossings_row, f, v, p) for f, v, p in disk.arcs]
    start, current = ends[0][0], ends[0][1]
    directed = [(0, start, current)]
    used = {0}
    while len(used) < len(ends):
        for s, (a, b) in enumerate(ends):
            if s in used:
                continue
            if a == current:
                directed.append((s, a, b))
                current = b
                break
            if b == current:
                directed.append((s, b, a))
                current = a
                break
        else:
            raise AssertionError("disk boundary is not a cycle")
        used.add(s)
    assert current == start
    return directed


def _orientable(tri, disks, members, side_match, crossings):
    """Breadth-first orientation of disks; adjacent disks must traverse a
    shared arc in opposite directions."""
    direction = {}
    for n in members:
        d = disks[n]
        for s, a, b in _boundary_cycle(d, crossings[d.tet]):
            direction[(n, s)] = (a, b)
    sign = {members[0]: 1}
    queue = deque([members[0]])
    while queue:
        n = queue.popleft()
        d = disks[n]
        for s, (f, v, p) in enumerate(d.arcs):
            m, s2 = side_match[(n, s)]
            j, perm = tri.gluings[d.tet][f]
            a, b = direction[(n, s)]
            # image of the start point under the gluing
            mapped_start = _map_point(crossings, a, perm, j)
            a2, _ = direction[(m, s2)]
            same = mapped_start == a2
            want = -sign[n] if same else sign[n]
            if m not in sign:
                sign[m] = want
                queue.append(m)
            elif sign[m] != want:
                return False
    return True


def _map_point(crossings, point, perm, target):
    """Local point of tetrahedron ``target`` glued to ``point``."""
    k, s = point
    u, w = EDGES[k]
    pu, pw = perm[u], perm[w]
    k2 = EDGE_INDEX[(min(pu, pw), max(pu, pw))]
    s2 = s if pu < pw else crossings[target][k2] + 1 - s
    return (k2, s2)
