"""Brute-force enumeration of small closed orientable triangulations."""

from .triangulation import ODD_PERMS, Triangulation, TriangulationError


def _matchings(items):
    if not items:
        yield []
        return
    first = items[0]
    for k in range(1, len(items)):
        rest = items[1:k] + items[k + 1:]
        for m in _matchings(rest):
            yield [(first, items[k])] + m


def enumerate_gluings(t, connected=True):
    """Yield every valid closed triangulation on ``t`` tetrahedra whose
    gluing permutations are all odd (so tetrahedra are coherently oriented).

    Every closed orientable triangulation is isomorphic to one of these.
    """
    slots = [(i, f) for i in range(t) for f in range(4)]
    for matching in _matchings(slots):
        choices = []
        for (i, f), (j, g) in matching:
            choices.append([p for p in ODD_PERMS if p[f] == g])
        yield from _fill(t, matching, choices, 0, {}, connected)


def _fill(t, matching, choices, k, acc, connected):
    if k == len(matching):
        rows = [[None] * 4 for _ in range(t)]
        for (i, f), (j, perm) in acc.items():
            rows[i][f] = (j, perm)
        try:
            tri = Triangulation(rows)
        except TriangulationError:
            return
        if connected and not tri.is_connected():
            return
        yield tri
        return
    (i, f), (j, g) = matching[k]
    for perm in choices[k]:
        inv = [0] * 4
        for a, b in enumerate(perm):
            inv[b] = a
        acc[(i, f)] = (j, perm)
        acc[(j, g)] = (i, tuple(inv))
        yield from _fill(t, matching, choices, k + 1, acc, connected)
    del acc[(i, f)]
    del acc[(j, g)]
