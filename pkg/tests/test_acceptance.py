"""The eleven acceptance criteria, one test each.

Each test records a PASS or FAIL line; the lines are printed together at
the end of the pytest run and when this file is run as a script.
"""

import functools
import random
import time
from math import comb

import pytest

from conftest import random_triangulation
from oracles import lp_cone_mismatches
from sampling import admissible_sample

from normcrush import fixture
from normcrush.census import enumerate_gluings
from normcrush.crush import crush, homology_balance
from normcrush.decompose import decide_s3, prime_decompose
from normcrush.homology import h1
from normcrush.normal import chi_linear, is_trivial, matching_system, quad_stats, vertex_link, weight
from normcrush.search import (
    SearchStats,
    enumerate_cones_almost_normal,
    enumerate_cones_full,
    enumerate_cones_one_quad,
    enumerate_cones_restricted,
    find_nontrivial_sphere,
    is_reducible_minimal,
    iter_sphere_findings,
    recognize_s3,
)
from normcrush.sums import add_vertex, connect_sum, gadget, to_one_vertex
from normcrush.surface import reconstruct_surface

RESULTS = {}

TITLES = {
    1: "matching system has 6t rows of two +1 and two -1 terms",
    2: "chi and weight agree with the reconstructed surface on >= 500 vectors",
    3: "vertex links are trivial spheres",
    4: "cone counts 4t*3^t, 36t*C(t,2) and 12t^2",
    5: "census verdicts for the 1- and 2-tetrahedron fixtures",
    6: "crush conservation and homology balance",
    7: "connected sum and one-vertex construction counts",
    8: "round trip RP3 # L(3,1) and empty decompositions of the gadgets",
    9: "restricted search is consistent with full search",
    10: "simplex optima equal double-description maxima for t <= 2",
    11: "restricted reducibility on a 20-tetrahedron composite",
}


def record(number):
    """Decorator storing PASS/FAIL and elapsed time for one criterion."""

    def wrap(fn):
        @functools.wraps(fn)
        def test(*args, **kwargs):
            start = time.perf_counter()
            try:
                detail = fn(*args, **kwargs)
            except BaseException as exc:
                RESULTS[number] = ("FAIL", time.perf_counter() - start, f"{type(exc).__name__}: {exc}"[:200])
                raise
            RESULTS[number] = ("PASS", time.perf_counter() - start, detail or "")

        return test

    return wrap


def summary_lines():
    lines = []
    for n in sorted(TITLES):
        status, secs, detail = RESULTS.get(n, ("NOT RUN", 0.0, ""))
        extra = f" [{detail}]" if detail else ""
        lines.append(f"criterion {n:2d}: {status:7s} {TITLES[n]} ({secs:.1f}s){extra}")
    return lines


ONE_VERTEX = ("s3_one_tet", "rp3", "l31", "s2xs1")


@pytest.fixture(scope="module")
def fx():
    names = ONE_VERTEX + ("s3_two_tet_good_vertex",)
    return {n: fixture(n) for n in names}


@record(1)
def test_criterion_01_matching_shape():
    rng = random.Random(1)
    tris = [random_triangulation(t, rng) for t in range(1, 7) for _ in range(5)]
    start = time.perf_counter()
    for tri in tris:
        system = matching_system(tri)
        assert len(system.equations) == 6 * tri.size
        for left, right in system.equations:
            assert len(left) == 2 and len(right) == 2
    elapsed = time.perf_counter() - start
    assert elapsed < 1
    return f"{len(tris)} triangulations, systems built in {elapsed:.2f}s"


@record(2)
def test_criterion_02_chi_oracle(fx):
    rng = random.Random(2)
    tris = list(fx.values()) + [random_triangulation(3, rng) for _ in range(2)]
    n = 0
    start = time.perf_counter()
    for tri in tris:
        for x in admissible_sample(tri, rng, per_cone=3):
            surface = reconstruct_surface(tri, x)
            assert chi_linear(tri, x) == surface.euler
            assert weight(tri, x) == surface.weight
            n += 1
    assert n >= 500
    assert time.perf_counter() - start < 60
    return f"{n} vectors"


@record(3)
def test_criterion_03_vertex_links(fx):
    rng = random.Random(3)
    tris = list(fx.values()) + [random_triangulation(t, rng) for t in (2, 3, 4) for _ in range(3)]
    links = 0
    for tri in tris:
        for v in range(tri.skeleton.v):
            x = vertex_link(tri, v)
            assert chi_linear(tri, x) == 2 and quad_stats(x) == (0, 0) and is_trivial(x)
            links += 1
    return f"{links} links"


class _Size:
    def __init__(self, t):
        self.size = t


@record(4)
def test_criterion_04_cone_counts():
    for t in range(2, 7):
        assert sum(1 for _ in enumerate_cones_full(_Size(t))) == 4 * t * 3**t
        assert sum(1 for _ in enumerate_cones_restricted(_Size(t))) == 36 * t * comb(t, 2)
    assert sum(1 for _ in enumerate_cones_one_quad(_Size(1))) == 12


@record(5)
def test_criterion_05_census(fx):
    census = {1: list(enumerate_gluings(1)), 2: list(enumerate_gluings(2))}
    for name in ONE_VERTEX:
        assert fx[name].gluings in {t.gluings for t in census[fx[name].size]}
    lps = {}

    def full(name):
        stats = SearchStats()
        found = find_nontrivial_sphere(fx[name], "full", stats=stats)
        lps[name] = stats.lps
        assert stats.lps <= 72
        return found

    s3 = fx["s3_one_tet"]
    assert full("s3_one_tet") is None and recognize_s3(s3).is_s3 and not h1(s3).torsion
    for name, order in (("rp3", 2), ("l31", 3)):
        tri = fx[name]
        full(name)
        assert h1(tri).rank == 0 and h1(tri).torsion == (order,)
        assert is_reducible_minimal(tri).verdict == "irreducible"
        assert not decide_s3(tri)
    assert not recognize_s3(fx["l31"]).is_s3
    finding = full("s2xs1")
    assert finding is not None and quad_stats(finding.vector)[0] <= 2
    assert crush(fx["s2xs1"], finding.vector).ledger["s1xs2"] == 1
    return "LPs " + ", ".join(f"{k}={v}" for k, v in lps.items())


@record(6)
def test_criterion_06_crush_conservation(fx):
    rng = random.Random(6)
    cases = [(fx[n], f.vector) for n in ("rp3", "s2xs1") for f in iter_sphere_findings(fx[n], "full")]
    rp3_rp3 = connect_sum(fx["rp3"], fx["rp3"]).triangulation
    cases.append((rp3_rp3, find_nontrivial_sphere(rp3_rp3, "full").vector))
    for _ in range(40):
        tri = random_triangulation(3, rng, one_vertex=True)
        cases += [(tri, f.vector) for f in iter_sphere_findings(tri, "full")]
    for tri, x in cases:
        report = crush(tri, x)
        assert sum(s.size for s in report.summands) == tri.size - quad_stats(x)[0]
        assert homology_balance(tri, report)["ok"]
    return f"{len(cases)} crushes"


@record(7)
def test_criterion_07_construction_counts(fx):
    census = list(enumerate_gluings(2))
    two = [t for t in census if t.skeleton.v == 2]
    multi = [t for t in census if t.skeleton.v >= 2]
    for a in multi[:4]:
        for b in multi[-4:]:
            out = connect_sum(a, b).triangulation
            assert (out.size, out.skeleton.v) == (a.size + b.size + 2, a.skeleton.v + b.skeleton.v - 2)
    for a in ONE_VERTEX:
        for b in ONE_VERTEX:
            out = connect_sum(fx[a], fx[b]).triangulation
            assert (out.size, out.skeleton.v) == (fx[a].size + fx[b].size + 4, 1)
    g = fx["s3_two_tet_good_vertex"]
    for b in ONE_VERTEX:
        plain = connect_sum(g, fx[b]).triangulation
        short = connect_sum(g, fx[b], use_good_vertex=True).triangulation
        assert short.size == plain.size - 1 and short.skeleton.v == plain.skeleton.v
    assert add_vertex(g).metadata["added_tetrahedra"] == 1
    for tri in two + [g] + multi[:6]:
        out = to_one_vertex(tri).triangulation
        assert (out.size, out.skeleton.v) == (tri.size + 3 * (tri.skeleton.v - 1), 1)


@record(8)
def test_criterion_08_round_trip(fx):
    start = time.perf_counter()
    composite = connect_sum(fx["rp3"], fx["l31"]).triangulation
    assert composite.size <= 9
    report = prime_decompose(composite, "restricted")
    assert report.primes() == ["Z/2", "Z/3"] and report.ledger["r1"] == 0
    for name in ("s3_one_tet", "s3_two_tet_good_vertex"):
        empty = prime_decompose(gadget(name))
        led = empty.ledger
        assert not empty.summands and not (led["r1"] or led["r2"] or led["r3"])
    assert time.perf_counter() - start < 300
    return f"H1 multiset {report.primes()}"


@record(9)
def test_criterion_09_restricted_in_full(fx):
    rng = random.Random(9)
    tris = [fx[n] for n in ONE_VERTEX] + [random_triangulation(3, rng, one_vertex=True) for _ in range(10)]
    for tri in tris:
        full = find_nontrivial_sphere(tri, "full")
        restricted = find_nontrivial_sphere(tri, "restricted")
        if full is None:
            assert restricted is None
        if restricted is not None:
            assert full is not None
    return f"{len(tris)} triangulations"


@record(10)
def test_criterion_10_lp_oracle(fx):
    compared = 0
    for tri in fx.values():
        n, bad = lp_cone_mismatches(tri, enumerate_cones_full(tri))
        assert not bad
        compared += n
        n, bad = lp_cone_mismatches(tri, enumerate_cones_almost_normal(tri))
        assert not bad
        compared += n
    return f"{compared} cones"


@record(11)
def test_criterion_11_scaling(fx):
    start = time.perf_counter()
    l31 = fx["l31"]
    composite = l31
    while composite.size < 20:
        composite = connect_sum(composite, l31).triangulation
    assert composite.size == 20 and composite.skeleton.v == 1
    stats = SearchStats()
    verdict = is_reducible_minimal(composite, stats=stats)
    assert verdict.verdict == "reducible"
    assert time.perf_counter() - start < 600
    return f"t={composite.size}, {stats.lps} LPs"


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
