import random
import sys
from pathlib import Path

import pytest
from hypothesis import settings

from normcrush import fixture
from normcrush.triangulation import ODD_PERMS, Triangulation, TriangulationError, inverse

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("default")


def random_triangulation(t, rng, one_vertex=False, tries=200000):
    """Random valid closed orientable triangulation on ``t`` tetrahedra
    (all gluings odd), by rejection sampling."""
    slots = [(i, f) for i in range(t) for f in range(4)]
    for _ in range(tries):
        rng.shuffle(slots)
        rows = [[None] * 4 for _ in range(t)]
        for k in range(0, len(slots), 2):
            (i, f), (j, g) = slots[k], slots[k + 1]
            perm = rng.choice([p for p in ODD_PERMS if p[f] == g])
            rows[i][f] = (j, perm)
            rows[j][g] = (i, inverse(perm))
        try:
            tri = Triangulation(rows)
        except TriangulationError:
            continue
        if not tri.is_connected() or (one_vertex and tri.skeleton.v != 1):
            continue
        return tri
    raise RuntimeError("no valid triangulation sampled")


def seeded(t, one_vertex=False):
    """Hypothesis strategy: a random triangulation from a drawn seed."""
    from hypothesis import strategies as st

    return st.integers(0, 2**31).map(lambda s: random_triangulation(t, random.Random(s), one_vertex))


@pytest.fixture(scope="session")
def fixtures():
    names = ("s3_one_tet", "s3_two_tet_good_vertex", "rp3", "l31", "s2xs1")
    return {name: fixture(name) for name in names}


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.summary_lines():
        terminalreporter.write_line(line)
