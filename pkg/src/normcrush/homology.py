"""Integral homology of triangulations via Smith normal form."""

from dataclasses import dataclass
from math import gcd

from .triangulation import EDGE_INDEX, TriangulationError, parity


def invariant_factors(matrix):
    """Nonzero diagonal entries of the Smith normal form of an integer
    matrix (list of rows), in divisor-chain order."""
    a = [list(row) for row in matrix if any(row)]
    if not a:
        return []
    ncols = len(a[0])
    diag = []
    top = 0
    nrows = len(a)
    while top < nrows and top < ncols:
        # pick the smallest nonzero entry in the remaining block
        best = None
        for r in range(top, nrows):
            row = a[r]
            for c in range(top, ncols):
                x = row[c]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), r, c)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        _, r, c = best
        a[top], a[r] = a[r], a[top]
        for row in a:
            row[top], row[c] = row[c], row[top]
        while True:
            p = a[top][top]
            done = True
            # clear column
            for r in range(top + 1, nrows):
                x = a[r][top]
                if x:
                    q = x // p
                    if q:
                        pr = a[top]
                        rr = a[r]
                        for k in range(top, ncols):
                            if pr[k]:
                                rr[k] -= q * pr[k]
                    if a[r][top]:
                        done = False
            # clear row
            for c2 in range(top + 1, ncols):
                x = a[top][c2]
                if x:
                    q = x // p
                    if q:
                        for row in a:
                            if row[top]:
                                row[c2] -= q * row[top]
                    if a[top][c2]:
                        done = False
            if done:
                break
            # move a smaller remainder to the pivot
            best = None
            for r in range(top, nrows):
                x = a[r][top]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), r, top)
            for c2 in range(top, ncols):
                x = a[top][c2]
                if x and abs(x) < best[0]:
                    best = (abs(x), top, c2)
            _, r, c2 = best
            a[top], a[r] = a[r], a[top]
            for row in a:
                row[top], row[c2] = row[c2], row[top]
        diag.append(abs(a[top][top]))
        top += 1
    # normalise to divisor chain
    for i in range(len(diag)):
        for j in range(i + 1, len(diag)):
            g = gcd(diag[i], diag[j])
            lcm = diag[i] * diag[j] // g if g else 0
            diag[i], diag[j] = g, lcm
    return sorted(diag)


@dataclass(frozen=True)
class HomologyGroup:
    rank: int
    torsion: tuple = ()

    def __str__(self):
        parts = []
        if self.rank:
            parts.append("Z" if self.rank == 1 else f"Z^{self.rank}")
        parts += [f"Z/{n}" for n in self.torsion]
        return " + ".join(parts) if parts else "0"

    def to_json(self):
        return {"rank": self.rank, "torsion": list(self.torsion)}

    def primary_parts(self):
        """Multiset of prime-power orders of the torsion subgroup."""
        out = []
        for n in self.torsion:
            p = 2
            while n > 1:
                if n % p == 0:
                    q = 1
                    while n % p == 0:
                        n //= p
                        q *= p
                    out.append(q)
                p += 1
        return tuple(sorted(out))


@dataclass(frozen=True)
class HomologyProfile:
    groups: tuple

    def __getitem__(self, k):
        return self.groups[k]

    @property
    def h1(self):
        return self.groups[1]

    def to_json(self):
        return [g.to_json() for g in self.groups]


def group_from_boundaries(n_cells, d_k, d_k1):
    """H_k from ``d_k: C_k -> C_{k-1}`` and ``d_{k+1}: C_{k+1} -> C_k``
    given as lists of rows (row = target cell)."""
    r_k = len(invariant_factors(d_k)) if d_k else 0
    inv = invariant_factors(d_k1) if d_k1 else []
    rank = n_cells - r_k - len(inv)
    return HomologyGroup(rank, tuple(x for x in inv if x > 1))


def _face_sign(tri, tet, face):
    """Orientation of face slot (tet, face), vertices in increasing order,
    relative to its face-class representative."""
    sk = tri.skeleton
    rep, _ = sk.face_classes[sk.face_of[tet][face]]
    if rep == (tet, face):
        return 1
    j, perm = tri.gluings[tet][face]
    verts = [v for v in range(4) if v != face]
    images = [perm[v] for v in verts]
    order = sorted(images)
    # permutation taking sorted order to images
    p = [order.index(x) for x in images] + [3]
    return parity(tuple(p))


def chain_complex(tri):
    """Boundary matrices (d1, d2, d3) as lists of rows."""
    sk = tri.skeleton
    t = tri.size
    d3 = [[0] * t for _ in range(sk.f)]
    for i in range(t):
        for f in range(4):
            d3[sk.face_of[i][f]][i] += (-1) ** f * _face_sign(tri, i, f)
    d2 = [[0] * sk.f for _ in range(sk.e)]
    for c, ((i, f), _) in enumerate(sk.face_classes):
        a, b, cc = [v for v in range(4) if v != f]
        for sign, (u, w) in ((1, (b, cc)), (-1, (a, cc)), (1, (a, b))):
            k = EDGE_INDEX[(u, w)]
            d2[sk.edge_of[i][k]][c] += sign * sk.edge_sign[i][k]
    d1 = [[0] * sk.e for _ in range(sk.v)]
    for c, (start, end) in enumerate(sk.edge_ends):
        d1[end][c] += 1
        d1[start][c] -= 1
    return d1, d2, d3


def _matmul_is_zero(a, b):
    if not a or not b:
        return True
    cols = len(b[0])
    for row in a:
        for c in range(cols):
            if sum(row[k] * b[k][c] for k in range(len(row)) if row[k]):
                return False
    return True


def homology(tri):
    """Integral homology H_0..H_3 of a connected closed triangulation."""
    if tri.size == 0 or not tri.is_connected():
        raise TriangulationError("disconnected", "homology needs a connected, nonempty triangulation")
    sk = tri.skeleton
    d1, d2, d3 = chain_complex(tri)
    assert _matmul_is_zero(d1, d2) and _matmul_is_zero(d2, d3), "boundary of boundary is nonzero"
    groups = (
        group_from_boundaries(sk.v, None, d1),
        group_from_boundaries(sk.e, d1, d2),
        group_from_boundaries(sk.f, d2, d3),
        group_from_boundaries(tri.size, d3, None),
    )
    return HomologyProfile(groups)


def h1(tri):
    return homology(tri).h1
