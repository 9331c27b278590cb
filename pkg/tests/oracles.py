"""Independent reference implementations used only by the tests."""

from fractions import Fraction
from itertools import combinations, permutations

from normcrush.homology import HomologyGroup, invariant_factors


# -- homology of the barycentric subdivision ---------------------------


def _flags(k):
    """Flags of length ``k`` inside one tetrahedron: increasing chains of
    vertex subsets, taken from full flags vertex < edge < face < tet."""
    out = set()
    for order in permutations(range(4)):
        chain = tuple(frozenset(order[: n + 1]) for n in range(4))
        for pick in combinations(range(4), k):
            out.add(tuple(chain[n] for n in pick))
    return sorted(out, key=lambda fl: [sorted(c) for c in fl])


def _key(node):
    i, fl = node
    return (i, [sorted(c) for c in fl])


def subdivision_homology(tri):
    """Homology via the barycentric subdivision as a delta-complex.

    Every simplex is ordered by cell dimension so no orientation signs need
    to be tracked; flags are identified along face gluings.
    """
    parent = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            lo, hi = sorted((ra, rb), key=_key)
            parent[hi] = lo

    flags = {k: _flags(k) for k in range(1, 5)}
    for i, row in enumerate(tri.gluings):
        for f, (j, perm) in enumerate(row):
            face = frozenset(v for v in range(4) if v != f)
            for k in range(1, 4):
                for fl in flags[k]:
                    if all(c <= face for c in fl):
                        image = tuple(frozenset(perm[v] for v in c) for c in fl)
                        union((i, fl), (j, image))
    cells = {}
    for k in range(1, 5):
        roots = sorted({find((i, fl)) for i in range(tri.size) for fl in flags[k]}, key=_key)
        cells[k] = {r: n for n, r in enumerate(roots)}
    mats = {}
    for k in range(2, 5):
        rows = [[0] * len(cells[k]) for _ in range(len(cells[k - 1]))]
        for r, col in cells[k].items():
            i, fl = r
            for drop in range(k):
                sub = fl[:drop] + fl[drop + 1:]
                rows[cells[k - 1][find((i, sub))]][col] += (-1) ** drop
        mats[k] = rows
    groups = []
    for dim in range(4):
        k = dim + 1
        n = len(cells[k])
        below = len(invariant_factors(mats[k])) if k > 1 else 0
        above = invariant_factors(mats[k + 1]) if k < 4 else []
        groups.append(HomologyGroup(n - below - len(above), tuple(x for x in above if x > 1)))
    return tuple(groups)


# -- double description ------------------------------------------------


def _primitive(vec):
    from math import gcd

    den = 1
    for x in vec:
        den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in vec]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    return tuple(x // g for x in ints) if g else tuple(ints)


def extreme_rays(rows, n, zero=()):
    """Extreme rays of {x >= 0, row . x = 0 for each row, x_j = 0 for j in
    zero} by the double description method.  ``rows`` are dicts
    ``column -> coefficient``.  Returns primitive integer tuples."""
    free = [j for j in range(n) if j not in set(zero)]
    rays = []
    for j in free:
        r = [0] * n
        r[j] = 1
        rays.append(tuple(r))
    for row in rows:
        val = [sum(c * r[j] for j, c in row.items()) for r in rays]
        pos = [r for r, v in zip(rays, val) if v > 0]
        neg = [r for r, v in zip(rays, val) if v < 0]
        new = [r for r, v in zip(rays, val) if v == 0]
        zsets = [frozenset(j for j in free if r[j] == 0) for r in rays]
        for p, vp in zip(rays, val):
            if vp <= 0:
                continue
            zp = frozenset(j for j in free if p[j] == 0)
            for q, vq in zip(rays, val):
                if vq >= 0:
                    continue
                zq = frozenset(j for j in free if q[j] == 0)
                common = zp & zq
                if any(common <= z for z, r in zip(zsets, rays) if r is not p and r is not q):
                    continue
                combo = [vp * qq - vq * pp for pp, qq in zip(p, q)]
                new.append(_primitive(combo))
        rays = sorted(set(new))
    return rays


# -- Euler characteristic by counting cells ----------------------------

_PAIRS = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))


def edge_points(coords, octagon, i, u, w):
    """Points of the surface on edge ``uw`` of tetrahedron ``i``."""
    row = coords[7 * i: 7 * i + 7]
    n = row[u] + row[w]
    for k, pair in enumerate(_PAIRS):
        split = not any({u, w} == set(p) for p in pair)
        n += row[4 + k] * split
        if octagon and octagon[0] == i and octagon[1] == k + 1:
            n += octagon[2] * (1 if split else 2)
    return n


def counted_euler(tri, x):
    """(chi, weight) of the surface ``x`` as vertices - arcs + disks.

    Each point on an edge is counted once per edge class, each arc is shared
    by two disks, and disks are counted per tetrahedron.
    """
    coords, octagon = x.coords, x.octagon
    t = tri.size
    disks = sum(coords)
    sides = 3 * sum(coords[7 * i + v] for i in range(t) for v in range(4))
    sides += 4 * sum(coords[7 * i + 4 + k] for i in range(t) for k in range(3))
    if octagon:
        disks += octagon[2]
        sides += 8 * octagon[2]
    sk = tri.skeleton
    seen = set()
    points = 0
    for i in range(t):
        for k, (u, w) in enumerate(combinations(range(4), 2)):
            e = sk.edge_of[i][k]
            if e not in seen:
                seen.add(e)
                points += edge_points(coords, octagon, i, u, w)
    assert sides % 2 == 0
    return points - sides // 2 + disks, points


def dd_maximum(rows, n, zero, costs):
    """Maximum of ``costs . x`` over the slice ``sum x = 1`` of the cone, or
    None when the cone is just the origin.  The maximum of a linear function
    over a polytope is attained at a vertex, and the vertices of the slice
    are its extreme rays scaled to unit sum."""
    rays = extreme_rays(rows, n, zero)
    if not rays:
        return None
    return max(Fraction(sum(Fraction(c) * v for c, v in zip(costs, r)), sum(r)) for r in rays)


def lp_cone_mismatches(tri, cones):
    """Compare the simplex optimum of chi on every cone with the
    double-description maximum.  Returns (cones compared, mismatches)."""
    from normcrush.lp import ConeSolver, on_extreme_ray, primitive_integer
    from normcrush.normal import chi_coefficients, matching_system

    compared, bad = 0, []
    for cone in cones:
        system = matching_system(tri, cone.octagon)
        n = system.column_count
        rows = system.rows()
        zero = cone.zero_columns() + [cone.triangle_column]
        costs = chi_coefficients(tri, cone.octagon)
        opt = ConeSolver(rows, n, cone.zero_columns()).maximize(costs, [cone.triangle_column])
        expected = dd_maximum(rows, n, zero, costs)
        compared += 1
        if expected is None:
            if opt.feasible:
                bad.append(cone)
        elif not opt.feasible or opt.value != expected:
            bad.append(cone)
        elif not on_extreme_ray(rows, n, primitive_integer(opt.vertex), zero):
            bad.append(cone)
    return compared, bad
