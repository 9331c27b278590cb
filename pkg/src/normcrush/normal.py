"""Normal and almost normal coordinates.

Each tetrahedron carries seven coordinates ``[T0, T1, T2, T3, Q1, Q2, Q3]``.
``T_v`` counts triangles cutting off vertex ``v``; ``Q_k`` counts quads of
pair partition ``PARTITIONS[k-1]``.  An almost normal vector may also carry
octagons of a single type in a single tetrahedron, stored separately as
``(tet, kind, count)`` with ``kind`` in 1..3 indexing ``PARTITIONS``.
"""

from dataclasses import dataclass
from fractions import Fraction

from .triangulation import EDGE_INDEX, PARTITIONS, partner

QUAD_OFFSET = 4


class NormalError(ValueError):
    def __init__(self, code, message):
        self.code = code
        super().__init__(message)


@dataclass(frozen=True)
class NormalVector:
    coords: tuple
    octagon: tuple = None

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        if self.octagon is not None:
            object.__setattr__(self, "octagon", tuple(self.octagon))

    @property
    def tet_count(self):
        return len(self.coords) // 7

    def tet(self, i):
        return self.coords[7 * i: 7 * i + 7]

    @property
    def octagon_count(self):
        return self.octagon[2] if self.octagon else 0

    def columns(self):
        """Coordinates followed by the octagon count when present."""
        if self.octagon is None:
            return list(self.coords)
        return list(self.coords) + [self.octagon[2]]

    def scaled(self, k):
        oct_ = None if self.octagon is None else self.octagon[:2] + (self.octagon[2] * k,)
        return NormalVector(tuple(k * c for c in self.coords), oct_)

    def __add__(self, other):
        return haken_sum(None, self, other)

    def __str__(self):
        return format_vector(self)


def vector_from_columns(columns, t, octagon_slot=None):
    cols = list(columns)
    if octagon_slot is None:
        return NormalVector(tuple(cols[: 7 * t]))
    return NormalVector(tuple(cols[: 7 * t]), tuple(octagon_slot) + (cols[7 * t],))


def format_vector(x):
    text = ",".join(str(c) for c in x.coords)
    if x.octagon is not None:
        l, k, o = x.octagon
        text += f";oct {l} {k} {o}"
    return text


def parse_vector(text):
    body, _, oct_part = text.strip().partition(";")
    try:
        coords = tuple(int(c) for c in body.split(","))
    except ValueError:
        raise NormalError("syntax", f"cannot parse surface vector {text!r}") from None
    if len(coords) % 7:
        raise NormalError("length", f"vector has {len(coords)} entries, not a multiple of 7")
    octagon = None
    if oct_part:
        parts = oct_part.split()
        if len(parts) != 4 or parts[0] != "oct":
            raise NormalError("syntax", "octagon suffix must read ';oct l k o'")
        octagon = tuple(int(p) for p in parts[1:])
    return NormalVector(coords, octagon)


# -- arcs and the matching system -------------------------------------


def arc_terms(tet, face, cut, octagon_slot=None):
    """Columns contributing the arc cutting off ``cut`` in face ``face`` of
    tetrahedron ``tet``.  The octagon column, if any, is ``'oct'``."""
    terms = [7 * tet + cut]
    for k in range(3):
        if partner(k, cut) == face:
            terms.append(7 * tet + QUAD_OFFSET + k)
    if octagon_slot is not None and octagon_slot[0] == tet:
        kind = octagon_slot[1]
        if partner(kind - 1, cut) != face:
            terms.append("oct")
    return terms


@dataclass(frozen=True)
class MatchingSystem:
    """One equation per (face class, normal arc type).

    ``equations[r] = (left, right)`` lists the column indices whose sums
    must agree.  Columns of a face glued to another face of the same
    tetrahedron may appear on both sides, so the dense row can cancel.
    """

    tet_count: int
    equations: tuple
    octagon_slot: tuple = None

    @property
    def column_count(self):
        return 7 * self.tet_count + (1 if self.octagon_slot else 0)

    def rows(self):
        """Dense integer rows (sparse dicts ``column -> coefficient``)."""
        out = []
        for left, right in self.equations:
            row = {}
            for c in left:
                row[c] = row.get(c, 0) + 1
            for c in right:
                row[c] = row.get(c, 0) - 1
            out.append({c: v for c, v in row.items() if v})
        return out

    def matrix(self):
        n = self.column_count
        dense = []
        for row in self.rows():
            r = [0] * n
            for c, v in row.items():
                r[c] = v
            dense.append(r)
        return dense

    def residual(self, columns):
        return [sum(v * columns[c] for c, v in row.items()) for row in self.rows()]


def matching_system(tri, with_octagon=None):
    """Matching equations of ``tri``; ``with_octagon=(l, k)`` adds the
    octagon column of type ``k`` in tetrahedron ``l``."""
    t = tri.size
    oct_col = 7 * t

    def cols(tet, face, cut):
        return tuple(oct_col if c == "oct" else c for c in arc_terms(tet, face, cut, with_octagon))

    equations = []
    for (i, f), (j, g) in tri.skeleton.face_classes:
        perm = tri.gluings[i][f][1]
        for v in range(4):
            if v == f:
                continue
            equations.append((cols(i, f, v), cols(j, g, perm[v])))
    return MatchingSystem(t, tuple(equations), tuple(with_octagon) if with_octagon else None)


# -- basic vectors and predicates -------------------------------------


def vertex_link(tri, vclass):
    coords = [0] * (7 * tri.size)
    for i, v in tri.skeleton.vertex_classes[vclass]:
        coords[7 * i + v] += 1
    return NormalVector(tuple(coords))


def _check_length(tri, x):
    if len(x.coords) != 7 * tri.size:
        raise NormalError("length", f"vector has {len(x.coords)} entries, expected {7 * tri.size}")


def admissibility_problems(tri, x):
    """List of human-readable reasons ``x`` is not admissible."""
    _check_length(tri, x)
    problems = []
    if any(c < 0 for c in x.columns()):
        problems.append("negative entry")
    for i in range(tri.size):
        quads = [k for k in range(3) if x.coords[7 * i + QUAD_OFFSET + k]]
        if len(quads) > 1:
            problems.append(f"quad property: tetrahedron {i} has quad types {[k + 1 for k in quads]}")
    slot = None
    if x.octagon is not None:
        l, kind, o = x.octagon
        if not (0 <= l < tri.size and 1 <= kind <= 3):
            problems.append(f"octagon slot {(l, kind)} out of range")
            return problems
        slot = (l, kind)
        if o and any(x.coords[7 * l + QUAD_OFFSET + k] for k in range(3)):
            problems.append(f"octagon property: tetrahedron {l} has both octagons and quads")
    residual = matching_system(tri, slot).residual(x.columns())
    if any(residual):
        problems.append(f"matching equations violated in {sum(1 for r in residual if r)} rows")
    return problems


def is_admissible(tri, x):
    problems = admissibility_problems(tri, x)
    return not problems, problems


# -- Euler characteristic and weight ----------------------------------


def _inv_degree(tri, tet, u, w):
    return Fraction(1, tri.skeleton.degree(tet, u, w))


def chi_coefficients(tri, octagon_slot=None):
    """Coefficient of each column in the Euler characteristic functional."""
    coeffs = []
    for i in range(tri.size):
        for v in range(4):
            coeffs.append(sum(_inv_degree(tri, i, v, w) for w in range(4) if w != v) - Fraction(1, 2))
        for (a, b), (c, d) in PARTITIONS:
            cross = ((a, c), (a, d), (b, c), (b, d))
            coeffs.append(sum(_inv_degree(tri, i, u, w) for u, w in cross) - 1)
    if octagon_slot is not None:
        l, kind = octagon_slot
        (a, b), (c, d) = PARTITIONS[kind - 1]
        total = 2 * _inv_degree(tri, l, a, b) + 2 * _inv_degree(tri, l, c, d)
        total += sum(_inv_degree(tri, l, u, w) for u, w in ((a, c), (a, d), (b, c), (b, d)))
        coeffs.append(total - 3)
    return coeffs


def chi_linear(tri, x):
    """Euler characteristic as an exact linear functional of ``x``."""
    slot = x.octagon[:2] if x.octagon is not None else None
    coeffs = chi_coefficients(tri, slot)
    return sum((c * v for c, v in zip(coeffs, x.columns())), Fraction(0))


def edge_crossings(tri, x):
    """Number of points of the surface on each tetrahedron edge slot,
    as ``crossings[i][k]`` for ``EDGES[k]``."""
    out = []
    for i in range(tri.size):
        row = []
        for (u, w) in EDGE_INDEX:
            n = x.coords[7 * i + u] + x.coords[7 * i + w]
            for k in range(3):
                if partner(k, u) != w:
                    n += x.coords[7 * i + QUAD_OFFSET + k]
            if x.octagon is not None and x.octagon[0] == i:
                n += 2 * x.octagon[2] if partner(x.octagon[1] - 1, u) == w else x.octagon[2]
            row.append(n)
        out.append(row)
    return out


def weight(tri, x):
    """Number of points where the surface meets the 1-skeleton."""
    total = Fraction(0)
    sk = tri.skeleton
    for i, row in enumerate(edge_crossings(tri, x)):
        for k, n in enumerate(row):
            total += Fraction(n, len(sk.edge_classes[sk.edge_of[i][k]]))
    return total.numerator if total.denominator == 1 else total


def corner_count(x):
    """Total number of disk corners: 3 per triangle, 4 per quad, 8 per
    octagon."""
    triangles = sum(x.coords[7 * i + v] for i in range(x.tet_count) for v in range(4))
    quads = sum(x.coords[7 * i + QUAD_OFFSET + k] for i in range(x.tet_count) for k in range(3))
    return 3 * triangles + 4 * quads + 8 * x.octagon_count


def quad_stats(x):
    """(number of tetrahedra with a quad, total number of quads)."""
    types = total = 0
    for i in range(x.tet_count):
        q = sum(x.coords[7 * i + QUAD_OFFSET + k] for k in range(3))
        types += bool(q)
        total += q
    return types, total


def is_trivial(x):
    """True for surfaces made of triangles only: unions of vertex links."""
    return quad_stats(x)[1] == 0 and x.octagon_count == 0


def quad_types(x):
    """Per tetrahedron, the nonzero quad type (1..3) or 0."""
    out = []
    for i in range(x.tet_count):
        kinds = [k + 1 for k in range(3) if x.coords[7 * i + QUAD_OFFSET + k]]
        out.append(kinds[0] if len(kinds) == 1 else (0 if not kinds else tuple(kinds)))
    return out


def haken_sum(tri, x, y):
    """Sum of two compatible vectors; ``tri`` (optional) checks lengths."""
    if len(x.coords) != len(y.coords):
        raise NormalError("length", "vectors have different lengths")
    if tri is not None:
        _check_length(tri, x)
    for i, (a, b) in enumerate(zip(quad_types(x), quad_types(y))):
        if a and b and a != b:
            raise NormalError("incompatible", f"quad types differ in tetrahedron {i}")
    octagon = x.octagon or y.octagon
    if x.octagon and y.octagon:
        if x.octagon[:2] != y.octagon[:2]:
            raise NormalError("incompatible", "octagons in different slots")
        octagon = x.octagon[:2] + (x.octagon[2] + y.octagon[2],)
    elif octagon is not None:
        l = octagon[0]
        if any(z.coords[7 * l + QUAD_OFFSET + k] for z in (x, y) for k in range(3)):
            raise NormalError("incompatible", f"octagons and quads meet in tetrahedron {l}")
    return NormalVector(tuple(a + b for a, b in zip(x.coords, y.coords)), octagon)
