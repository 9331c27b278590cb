"""Connected sums, vertex insertion and one-vertex conversion.

Everything is built from three moves on oriented triangulations:

* opening a face and filling the gap with the cone from a new vertex
  over the two copies of the face (two tetrahedra, one new vertex);
* replacing a folded tetrahedron (two of its faces glued to each other
  across their common edge) by the cone from a new vertex over its
  boundary (one extra tetrahedron, one new vertex);
* swapping a face of ``A`` with a face of ``B``.  If the face of ``A``
  has three distinct vertices it is an embedded disk, cutting along it
  leaves ``A`` minus a ball, and the swap produces ``A # B``.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations

from .triangulation import EDGE_INDEX, IDENTITY, Triangulation, compose, inverse, parity


class SumError(ValueError):
    def __init__(self, code, message):
        self.code = code
        super().__init__(message)


@dataclass(frozen=True)
class SumResult:
    triangulation: Triangulation
    metadata: dict = field(default_factory=dict)


def _require_valid(tri, name):
    if not isinstance(tri, Triangulation) or tri.size == 0:
        raise SumError("invalid_input", f"{name} must be a non-empty triangulation")
    tri.validate()
    if not tri.is_connected():
        raise SumError("invalid_input", f"{name} is not connected")


def _classes(tri, i, verts):
    return [tri.skeleton.vertex_of[i][v] for v in verts]


# -- faces with distinct vertices ---------------------------------------


def distinct_face(tri, count=3):
    """First face slot ``(tet, face)`` whose corners lie in at least
    ``count`` different vertex classes, or None."""
    for i in range(tri.size):
        for f in range(4):
            corners = _classes(tri, i, [v for v in range(4) if v != f])
            if len(set(corners)) >= count:
                return (i, f)
    return None


# -- cone faces and folded tetrahedra -----------------------------------


@dataclass(frozen=True)
class ConeFace:
    tet: int
    face: int
    apex: int  # tetrahedron vertex where the two identified edges meet
    good: bool  # the identified edges have distinct endpoints

    def to_json(self):
        return {"tet": self.tet, "face": self.face, "apex": self.apex, "good": self.good}


def _direction(sk, i, a, b):
    k = EDGE_INDEX[(min(a, b), max(a, b))]
    s = sk.edge_sign[i][k]
    return sk.edge_of[i][k], (s if a < b else -s)


def cone_faces(tri):
    """Faces in which two edges are identified, read away from a common
    apex in the same direction."""
    sk = tri.skeleton
    out = []
    for i in range(tri.size):
        for f in range(4):
            verts = [v for v in range(4) if v != f]
            for apex in verts:
                b, c = [v for v in verts if v != apex]
                if _direction(sk, i, apex, b) == _direction(sk, i, apex, c):
                    good = sk.vertex_of[i][apex] != sk.vertex_of[i][b]
                    out.append(ConeFace(i, f, apex, good))
    return out


def find_good_vertex(tri):
    """A vertex class at the apex of a good cone, with the cone as witness,
    or None."""
    for cone in cone_faces(tri):
        if cone.good:
            return tri.skeleton.vertex_of[cone.tet][cone.apex], cone
    return None


def _transposition(a, b):
    p = list(IDENTITY)
    p[a], p[b] = b, a
    return tuple(p)


def folded_tetrahedra(tri):
    """``(tet, a, b)`` for each tetrahedron whose faces ``a`` and ``b`` are
    glued to each other by the transposition of ``a`` and ``b``."""
    out = []
    for i in range(tri.size):
        for a in range(4):
            j, perm = tri.gluings[i][a]
            b = perm[a]
            if j == i and a < b and perm == _transposition(a, b):
                out.append((i, a, b))
    return out


# -- the three moves -----------------------------------------------------


def _oriented_slot(tri, slot):
    """``tri.oriented()`` together with the new name of face ``slot``."""
    out = tri.oriented()
    if slot is not None and tri.orientation()[slot[0]] < 0:
        slot = (slot[0], (1, 0, 2, 3)[slot[1]])
    return out, slot


def _rows(tri):
    return [list(row) for row in tri.gluings]


def _glue(rows, i, f, j, perm):
    rows[i][f] = (j, perm)
    rows[j][perm[f]] = (i, inverse(perm))


def open_face_cone(tri, slot):
    """Open face ``slot`` and fill it with the cone from a new vertex over
    both copies of the face.  Returns ``(triangulation, first new tet)``;
    the new tetrahedra use the labels of the tetrahedra they are attached
    to, with the new vertex in place of the opposite vertex."""
    i, f = slot
    j, psi = tri.gluings[i][f]
    g = psi[f]
    rows = _rows(tri)
    x, y = tri.size, tri.size + 1
    rows += [[None] * 4, [None] * 4]
    _glue(rows, i, f, x, IDENTITY)
    _glue(rows, j, g, y, IDENTITY)
    for u in range(4):
        if u != f:
            _glue(rows, x, u, y, psi)
    return Triangulation(rows), x


def replace_folded(tri, fold):
    """Replace a folded tetrahedron by the cone from a new vertex over its
    boundary.  ``fold = (tet, a, b)``; the two new tetrahedra are the old
    index (cone over face ``c``) and a new last index (cone over face
    ``d``), where ``c < d`` are the remaining vertices."""
    i, a, b = fold
    c, d = [v for v in range(4) if v not in (a, b)]
    rows = _rows(tri)
    outer_c = tri.gluings[i][c]
    outer_d = tri.gluings[i][d]
    y = tri.size
    rows.append([None] * 4)
    rows[i] = [None] * 4
    # X = cone over face c (apex at label c); Y = cone over face d (apex at label d)
    swap_cd = _transposition(c, d)
    rows[i][c] = outer_c
    j, p = outer_c
    if j == i and p[c] == d:
        # faces c and d were glued to each other
        _glue(rows, i, c, y, p)
    else:
        rows[j][p[c]] = (i, inverse(p))
    j, p = outer_d
    if not (j == i and p[d] == c):
        _glue(rows, y, d, j, p)
    # inner faces: X's faces a and b fold over the apex edge
    _glue(rows, i, a, i, _transposition(a, b))
    _glue(rows, y, a, y, _transposition(a, b))
    # the faces over edge ab (X face d, Y face c) meet
    _glue(rows, i, d, y, swap_cd)
    return Triangulation(rows), y


def swap_sum(a_tri, a_slot, b_tri, b_slot):
    """Exchange the gluing partners of face ``a_slot`` of ``A`` and face
    ``b_slot`` of ``B``.  Both inputs must be oriented (all gluings odd).
    The result is ``A # B`` when the face of ``A`` has three distinct
    vertices."""
    i1, f1 = a_slot
    i2, f2 = b_slot
    off = a_tri.size
    j1, psi1 = a_tri.gluings[i1][f1]
    j2, psi2 = b_tri.gluings[i2][f2]
    alpha = next(p for p in sorted(permutations(range(4))) if p[f1] == f2 and parity(p) == 1)
    rows = _rows(a_tri) + [[(j + off, p) for j, p in row] for row in b_tri.gluings]
    rows[i1][f1] = rows[j1][psi1[f1]] = None
    rows[i2 + off][f2] = rows[j2 + off][psi2[f2]] = None
    _glue(rows, i1, f1, j2 + off, compose(psi2, alpha))
    _glue(rows, j1, psi1[f1], i2 + off, compose(alpha, inverse(psi1)))
    return Triangulation(rows)


# -- vertex insertion ------------------------------------------------------


def _good_fold(tri):
    """A folded tetrahedron whose cone faces are good, with the face of the
    replacement that will have three distinct vertices."""
    sk = tri.skeleton
    for i, a, b in folded_tetrahedra(tri):
        c, d = [v for v in range(4) if v not in (a, b)]
        va = sk.vertex_of[i][a]
        if va != sk.vertex_of[i][d]:
            return (i, a, b), "x"
        if va != sk.vertex_of[i][c]:
            return (i, a, b), "y"
    return None


def add_vertex(tri, use_cone=True):
    """Homeomorphic triangulation with one more vertex.

    Uses one extra tetrahedron when ``use_cone`` is set and a folded
    tetrahedron with good cone faces exists, and two otherwise.  The
    metadata names a face with three distinct vertices when one exists.
    """
    _require_valid(tri, "M")
    tri = tri.oriented()
    v = tri.skeleton.v
    fold = _good_fold(tri) if use_cone else None
    if fold is not None:
        (i, a, b), which = fold
        c, d = [u for u in range(4) if u not in (a, b)]
        out, y = replace_folded(tri, (i, a, b))
        # X (index i) has apex c; its face b is (c, a, d).  Y has apex d.
        face = (i, b) if which == "x" else (y, b)
        method = "folded tetrahedron replaced by a cone (+1)"
        extra = {}
    else:
        step = add_vertex_at(tri, distinct_face(tri, 2) or (0, 0))
        out, face = step.triangulation, step.metadata["distinct_face"]
        method = step.metadata["method"]
        extra = {"cone_face": step.metadata["cone_face"]}
    if fold is not None:
        out, face = _oriented_slot(out, face)
    added = out.size - tri.size
    if out.skeleton.v != v + 1:
        raise SumError("internal", "vertex insertion did not add exactly one vertex")
    if face is not None and len(set(_classes(out, face[0], [u for u in range(4) if u != face[1]]))) != 3:
        raise SumError("internal", "expected face with three distinct vertices is missing")
    return SumResult(out, {"method": method, "added_tetrahedra": added, "distinct_face": face, **extra})


# -- connected sums ---------------------------------------------------------


def _checked(result, t, v, meta):
    if result.size != t or result.skeleton.v != v:
        raise SumError(
            "internal",
            f"connected sum has {result.size} tetrahedra and {result.skeleton.v} vertices, expected {t} and {v}",
        )
    meta.update({"tetrahedra": t, "vertices": v})
    return SumResult(result, meta)


def connect_sum(p_tri, n_tri, use_good_vertex=False):
    """Triangulation of ``P # N``.

    Sizes: ``t1 + t2 + 2`` tetrahedra unless both inputs have one vertex
    (``t1 + t2 + 4``, one vertex).  With ``use_good_vertex`` and a good
    folded tetrahedron in a multi-vertex input, ``t1 + t2 + 1``.
    """
    _require_valid(p_tri, "P")
    _require_valid(n_tri, "N")
    p_tri, n_tri = p_tri.oriented(), n_tri.oriented()
    t1, t2 = p_tri.size, n_tri.size
    v1, v2 = p_tri.skeleton.v, n_tri.skeleton.v
    meta = {"inputs": [[t1, v1], [t2, v2]], "good_vertex_available": False}

    def finish(base, other, steps):
        slot = steps[-1].metadata["distinct_face"]
        return swap_sum(base, slot, other, (0, 0))

    if v1 >= 2 or v2 >= 2:
        if v1 < 2:
            p_tri, n_tri, t1, t2, v1, v2 = n_tri, p_tri, t2, t1, v2, v1
            meta["swapped_roles"] = True
        meta["good_vertex_available"] = _good_fold(p_tri) is not None
        if use_good_vertex and meta["good_vertex_available"]:
            step = add_vertex(p_tri, use_cone=True)
            meta["case"] = "good vertex"
            out = finish(step.triangulation, n_tri, [step])
            return _checked(out, t1 + t2 + 1, v1 + v2 - 2, meta)
        step = add_vertex(p_tri, use_cone=False)
        out = finish(step.triangulation, n_tri, [step])
        if v2 >= 2:
            meta["case"] = "both multi-vertex"
            return _checked(out, t1 + t2 + 2, v1 + v2 - 2, meta)
        meta["case"] = "one one-vertex"
        return _checked(out, t1 + t2 + 2, v1 - 1, meta)
    first = add_vertex(p_tri, use_cone=False)
    # the first cone has a face with two distinct vertices; coning it again gives three
    second = add_vertex_at(first.triangulation, first.metadata["cone_face"])
    meta["case"] = "both one-vertex"
    out = finish(second.triangulation, n_tri, [second])
    return _checked(out, t1 + t2 + 4, 1, meta)


def add_vertex_at(tri, slot):
    """Two-tetrahedron vertex insertion at face ``slot``.

    ``distinct_face`` in the metadata is a face of the new cone with three
    distinct vertices, which exists when the chosen face has at least two;
    ``cone_face`` is a face of the cone with at least two.
    """
    tri = tri.oriented()
    out, x = open_face_cone(tri, slot)
    i, f = slot
    best = {}
    for u in range(4):
        if u != f:
            rest = [w for w in range(4) if w not in (u, f)]
            n = 2 if tri.skeleton.vertex_of[i][rest[0]] == tri.skeleton.vertex_of[i][rest[1]] else 3
            best.setdefault(n, (x, u))
    signs = out.orientation()

    def rename(slot):
        if slot is None or signs[slot[0]] > 0:
            return slot
        return (slot[0], (1, 0, 2, 3)[slot[1]])

    return SumResult(
        out.oriented(),
        {
            "method": "face opened and filled with a cone (+2)",
            "distinct_face": rename(best.get(3)),
            "cone_face": rename(best.get(3, best.get(2))),
        },
    )


def to_one_vertex(tri):
    """One-vertex triangulation of the same manifold with exactly
    ``t + 3(v - 1)`` tetrahedra, by repeated sums with the one-tetrahedron
    3-sphere."""
    _require_valid(tri, "M")
    t, v = tri.size, tri.skeleton.v
    current = tri.oriented()
    s3 = gadget("s3_one_tet")
    steps = 0
    while current.skeleton.v > 1:
        current = connect_sum(current, s3).triangulation
        steps += 1
    if current.size != t + 3 * (v - 1) or current.skeleton.v != 1:
        raise SumError("internal", "one-vertex conversion broke its size contract")
    return SumResult(current, {"sums_with_s3": steps, "tetrahedra": current.size, "vertices": 1})


# -- gadgets -------------------------------------------------------------------

_GADGETS = {
    "s3_one_tet": (((0, (1, 0, 2, 3)), (0, (1, 0, 2, 3)), (0, (1, 2, 3, 0)), (0, (3, 0, 1, 2))),),
    "s3_two_tet_good_vertex": (
        ((0, (1, 0, 2, 3)), (0, (1, 0, 2, 3)), (1, (3, 2, 0, 1)), (1, (3, 2, 0, 1))),
        ((0, (2, 3, 1, 0)), (0, (2, 3, 1, 0)), (1, (0, 1, 3, 2)), (1, (0, 1, 3, 2))),
    ),
}

GADGET_VERTICES = {"s3_one_tet": 1, "s3_two_tet_good_vertex": 3}


@lru_cache(maxsize=None)
def gadget(name):
    """Built-in 3-sphere triangulation ``s3_one_tet`` or
    ``s3_two_tet_good_vertex``."""
    if name not in _GADGETS:
        raise SumError("usage", f"unknown gadget {name!r}; choose from {sorted(_GADGETS)}")
    tri = Triangulation(_GADGETS[name])
    if tri.skeleton.v != GADGET_VERTICES[name]:
        raise SumError("internal", f"gadget {name} has the wrong vertex count")
    return tri
