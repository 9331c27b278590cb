"""Pseudo-triangulations of closed orientable 3-manifolds.

A triangulation is a list of tetrahedra whose faces are glued in pairs.
Face ``f`` of a tetrahedron is the face opposite vertex ``f``.  A gluing
``(j, perm)`` on face ``f`` of tetrahedron ``i`` sends vertex ``v`` of ``i``
to vertex ``perm[v]`` of ``j``; ``perm[f]`` is the face of ``j`` it lands on.
"""

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations, permutations

IDENTITY = (0, 1, 2, 3)
EDGES = tuple(combinations(range(4), 2))
EDGE_INDEX = {e: k for k, e in enumerate(EDGES)}

# pair partitions of {0,1,2,3}; index k is quad/octagon type k+1
PARTITIONS = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))


def partner(ptype, v):
    """Vertex sharing a side with ``v`` in pair partition ``ptype`` (0..2)."""
    for a, b in PARTITIONS[ptype]:
        if v == a:
            return b
        if v == b:
            return a
    raise ValueError(v)


def inverse(perm):
    inv = [0] * 4
    for k, p in enumerate(perm):
        inv[p] = k
    return tuple(inv)


def compose(p, q):
    """``p ∘ q``: apply ``q`` first."""
    return tuple(p[q[k]] for k in range(4))


def parity(perm):
    """+1 for even permutations, -1 for odd."""
    sign = 1
    seen = [False] * 4
    for start in range(4):
        if seen[start]:
            continue
        length = 0
        k = start
        while not seen[k]:
            seen[k] = True
            k = perm[k]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


ODD_PERMS = tuple(p for p in permutations(range(4)) if parity(p) == -1)


class TriangulationError(ValueError):
    """Invalid triangulation data.  ``code`` names the violated condition."""

    def __init__(self, code, message, line=None):
        self.code = code
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        parent = self.parent
        parent.setdefault(x, x)
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


@dataclass(frozen=True)
class Skeleton:
    """Vertex, edge and face classes of a triangulation.

    ``vertex_of[i][v]`` is the class of vertex ``v`` of tetrahedron ``i``.
    ``edge_of[i][k]`` is the class of tetrahedron edge ``EDGES[k]`` and
    ``edge_sign[i][k]`` is +1 when that edge, read low-to-high, agrees
    with the class's canonical direction.
    """

    vertex_classes: tuple
    edge_classes: tuple
    face_classes: tuple
    vertex_of: tuple
    edge_of: tuple
    edge_sign: tuple
    face_of: tuple
    edge_ends: tuple = field(repr=False)

    @property
    def v(self):
        return len(self.vertex_classes)

    @property
    def e(self):
        return len(self.edge_classes)

    @property
    def f(self):
        return len(self.face_classes)

    @property
    def edge_degrees(self):
        return tuple(len(c) for c in self.edge_classes)

    def degree(self, tet, u, w):
        """Degree of the edge class through tetrahedron edge ``uw``."""
        return len(self.edge_classes[self.edge_of[tet][EDGE_INDEX[tuple(sorted((u, w)))]]])

    def euler_characteristic(self):
        return self.v - self.e + self.f - len(self.vertex_of)


class Triangulation:
    """Closed orientable pseudo-triangulation.

    ``gluings[i][f] = (j, perm)``.  Construction validates every invariant
    unless ``check=False`` (used internally while assembling).
    """

    def __init__(self, gluings, check=True):
        self.gluings = tuple(
            tuple((int(j), tuple(int(x) for x in p)) for j, p in row) for row in gluings
        )
        if check:
            self.validate()

    @property
    def size(self):
        return len(self.gluings)

    def __len__(self):
        return len(self.gluings)

    def __eq__(self, other):
        return isinstance(other, Triangulation) and self.gluings == other.gluings

    def __hash__(self):
        return hash(self.gluings)

    def __repr__(self):
        return f"Triangulation(t={self.size})"

    def adjacent(self, tet, face):
        return self.gluings[tet][face]

    # -- validation ---------------------------------------------------

    def validate(self):
        t = self.size
        for i, row in enumerate(self.gluings):
            if len(row) != 4:
                raise TriangulationError("open_face", f"tetrahedron {i} has {len(row)} faces")
            for f, (j, perm) in enumerate(row):
                if not 0 <= j < t:
                    raise TriangulationError("open_face", f"face ({i},{f}) glued to missing tetrahedron {j}")
                if sorted(perm) != [0, 1, 2, 3]:
                    raise TriangulationError("syntax", f"face ({i},{f}) has invalid permutation {perm}")
                g = perm[f]
                if j == i and g == f:
                    raise TriangulationError("self_glued", f"face ({i},{f}) glued to itself")
                back_j, back_perm = self.gluings[j][g]
                if back_j != i or back_perm != inverse(perm):
                    raise TriangulationError(
                        "involution", f"gluing ({i},{f})->({j},{g}) is not matched by its reverse"
                    )
        if self.orientation() is None:
            raise TriangulationError("non_orientable", "no consistent orientation exists")
        sk = self.skeleton  # raises on invalid edges
        for c, cls in enumerate(sk.vertex_classes):
            if self._link_euler(c) != 2:
                raise TriangulationError("non_manifold_vertex", f"link of vertex class {c} is not a sphere")
        return True

    def orientation(self):
        """Signs +1/-1 per tetrahedron making every gluing orientation
        reversing, or ``None`` if the complex is non-orientable."""
        signs = [0] * self.size
        for start in range(self.size):
            if signs[start]:
                continue
            signs[start] = 1
            queue = deque([start])
            while queue:
                i = queue.popleft()
                for j, perm in self.gluings[i]:
                    want = -signs[i] * parity(perm)
                    if signs[j] == 0:
                        signs[j] = want
                        queue.append(j)
                    elif signs[j] != want:
                        return None
        return tuple(signs)

    # -- skeleton -----------------------------------------------------

    @cached_property
    def skeleton(self):
        t = self.size
        vuf = _UnionFind()
        # oriented edge-slot union-find: node (i, k) with parity to root
        eparent = {}
        eflip = {}

        def efind(x):
            path = []
            while eparent.setdefault(x, x) != x:
                path.append(x)
                x = eparent[x]
            root = x
            # path compression with accumulated parity
            acc = 0
            for node in reversed(path):
                acc ^= eflip[node]
                eflip[node] = acc
                eparent[node] = root
            return root

        def eparity(x):
            efind(x)
            return eflip.get(x, 0) if eparent[x] != x else 0

        for i in range(t):
            for k in range(6):
                efind((i, k))
                eflip.setdefault((i, k), 0)
            for v in range(4):
                vuf.find((i, v))

        for i in range(t):
            for f, (j, perm) in enumerate(self.gluings[i]):
                for v in range(4):
                    if v != f:
                        vuf.union((i, v), (j, perm[v]))
                for u, w in EDGES:
                    if f in (u, w):
                        continue
                    pu, pw = perm[u], perm[w]
                    a = (i, EDGE_INDEX[(u, w)])
                    b = (j, EDGE_INDEX[tuple(sorted((pu, pw)))])
                    flip = 1 if pu > pw else 0
                    ra, rb = efind(a), efind(b)
                    pa, pb = eparity(a), eparity(b)
                    if ra == rb:
                        if pa ^ pb != flip:
                            raise TriangulationError(
                                "invalid_edge", f"edge {u}{w} of tetrahedron {i} is identified with itself reversed"
                            )
                    else:
                        eparent[rb] = ra
                        eflip[rb] = pa ^ pb ^ flip

        vroots = {}
        vertex_of = []
        for i in range(t):
            row = []
            for v in range(4):
                r = vuf.find((i, v))
                row.append(vroots.setdefault(r, len(vroots)))
            vertex_of.append(tuple(row))
        vclasses = [[] for _ in vroots]
        for i in range(t):
            for v in range(4):
                vclasses[vertex_of[i][v]].append((i, v))

        eroots = {}
        edge_of, edge_sign = [], []
        for i in range(t):
            row, srow = [], []
            for k in range(6):
                r = efind((i, k))
                row.append(eroots.setdefault(r, len(eroots)))
                srow.append(-1 if eparity((i, k)) else 1)
            edge_of.append(tuple(row))
            edge_sign.append(tuple(srow))
        eclasses = [[] for _ in eroots]
        for i in range(t):
            for k in range(6):
                eclasses[edge_of[i][k]].append((i, k))

        face_of = [[None] * 4 for _ in range(t)]
        fclasses = []
        for i in range(t):
            for f in range(4):
                if face_of[i][f] is None:
                    j, perm = self.gluings[i][f]
                    face_of[i][f] = len(fclasses)
                    face_of[j][perm[f]] = len(fclasses)
                    fclasses.append(((i, f), (j, perm[f])))

        # canonical endpoints of each edge class (start, end vertex classes)
        ends = []
        for cls in eclasses:
            i, k = cls[0]
            u, w = EDGES[k]
            if edge_sign[i][k] < 0:
                u, w = w, u
            ends.append((vertex_of[i][u], vertex_of[i][w]))

        return Skeleton(
            vertex_classes=tuple(tuple(c) for c in vclasses),
            edge_classes=tuple(tuple(c) for c in eclasses),
            face_classes=tuple(fclasses),
            vertex_of=tuple(vertex_of),
            edge_of=tuple(edge_of),
            edge_sign=tuple(edge_sign),
            face_of=tuple(tuple(r) for r in face_of),
            edge_ends=tuple(ends),
        )

    def _link_euler(self, vclass):
        sk = self.skeleton
        corners = sk.vertex_classes[vclass]
        uf = _UnionFind()
        for i, v in corners:
            for w in range(4):
                if w != v:
                    uf.find((i, v, w))
        for i, v in corners:
            for f, (j, perm) in enumerate(self.gluings[i]):
                if f == v:
                    continue
                for w in range(4):
                    if w != v and w != f:
                        uf.union((i, v, w), (j, perm[v], perm[w]))
        nv = len({uf.find((i, v, w)) for i, v in corners for w in range(4) if w != v})
        nf = len(corners)
        return nv - 3 * nf // 2 + nf

    # -- structure ----------------------------------------------------

    def is_connected(self):
        return self.size == 0 or max(self.component_labels()) == 0

    def component_labels(self):
        labels = [-1] * self.size
        count = 0
        for start in range(self.size):
            if labels[start] >= 0:
                continue
            labels[start] = count
            queue = deque([start])
            while queue:
                i = queue.popleft()
                for j, _ in self.gluings[i]:
                    if labels[j] < 0:
                        labels[j] = count
                        queue.append(j)
            count += 1
        return labels

    def subcomplex(self, tets):
        """Sub-triangulation on a gluing-closed set of tetrahedra, reindexed
        in the given order."""
        index = {old: new for new, old in enumerate(tets)}
        rows = []
        for old in tets:
            rows.append(tuple((index[j], p) for j, p in self.gluings[old]))
        return Triangulation(rows, check=False)

    def relabel(self, order):
        """Reindex tetrahedra: new tetrahedron ``n`` is old ``order[n]``."""
        return self.subcomplex(list(order))

    def disjoint_union(self, other):
        off = self.size
        rows = [row for row in self.gluings]
        rows += [tuple((j + off, p) for j, p in row) for row in other.gluings]
        return Triangulation(rows)

    def oriented(self):
        """Isomorphic copy in which every gluing permutation is odd.

        Tetrahedra with orientation sign -1 get vertices 0 and 1 swapped.
        """
        signs = self.orientation()
        swap = (1, 0, 2, 3)
        rows = []
        for i, row in enumerate(self.gluings):
            new_row = [None] * 4
            for f, (j, perm) in enumerate(row):
                p = perm
                if signs[j] < 0:
                    p = compose(swap, p)
                if signs[i] < 0:
                    p = compose(p, swap)
                nf = swap[f] if signs[i] < 0 else f
                new_row[nf] = (j, p)
            rows.append(tuple(new_row))
        return Triangulation(rows)


def connected_components(tri):
    """Split into gluing-connected pieces, each reindexed from 0 in the
    original order."""
    if tri.size == 0:
        return []
    labels = tri.component_labels()
    pieces = []
    for c in range(max(labels) + 1):
        tets = [i for i, lab in enumerate(labels) if lab == c]
        pieces.append(Triangulation(tri.subcomplex(tets).gluings))
    return pieces


def skeleton(tri):
    return tri.skeleton


# -- file format ------------------------------------------------------


def _perm_string(perm):
    return "".join(str(x) for x in perm)


def serialize(tri):
    lines = [f"tetrahedra {tri.size}"]
    for i, row in enumerate(tri.gluings):
        parts = " ".join(f"{j}/{_perm_string(p)}" for j, p in row)
        lines.append(f"{i}: {parts}")
    return "\n".join(lines) + "\n"


def parse_triangulation(text):
    """Parse the line-oriented triangulation format and validate."""
    header = None
    rows = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if header is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "tetrahedra" or not parts[1].isdigit():
                raise TriangulationError("syntax", "expected 'tetrahedra <t>'", lineno)
            header = int(parts[1])
            continue
        label, sep, rest = line.partition(":")
        if not sep or not label.strip().isdigit():
            raise TriangulationError("syntax", "expected '<i>: <j>/<perm> ...'", lineno)
        i = int(label)
        if i >= header:
            raise TriangulationError("syntax", f"tetrahedron index {i} out of range", lineno)
        if i in rows:
            raise TriangulationError("syntax", f"tetrahedron {i} listed twice", lineno)
        entries = rest.split()
        if len(entries) != 4:
            raise TriangulationError("open_face", f"tetrahedron {i} lists {len(entries)} faces, need 4", lineno)
        row = []
        for entry in entries:
            target, slash, pstr = entry.partition("/")
            if not slash or not target.isdigit() or len(pstr) != 4 or not pstr.isdigit():
                raise TriangulationError("syntax", f"bad gluing entry {entry!r}", lineno)
            perm = tuple(int(c) for c in pstr)
            if sorted(perm) != [0, 1, 2, 3]:
                raise TriangulationError("syntax", f"{pstr!r} is not a permutation", lineno)
            row.append((int(target), perm))
        rows[i] = tuple(row)
    if header is None:
        raise TriangulationError("syntax", "empty input")
    missing = [i for i in range(header) if i not in rows]
    if missing:
        raise TriangulationError("open_face", f"tetrahedra {missing} have no gluing line")
    return Triangulation([rows[i] for i in range(header)])


def read_triangulation(path):
    with open(path, encoding="utf-8") as fh:
        return parse_triangulation(fh.read())


def write_triangulation(tri, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(tri))
