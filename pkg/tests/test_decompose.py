import json

import pytest
from hypothesis import given, settings

from conftest import seeded

from normcrush.decompose import DecomposeError, decide_s3, edge_sphere, prime_decompose, reduce_vertices
from normcrush.homology import h1
from normcrush.normal import chi_linear, is_admissible
from normcrush.sums import connect_sum, gadget
from normcrush.triangulation import Triangulation, read_triangulation


@pytest.fixture(scope="module")
def rp3_l31(fixtures):
    return connect_sum(fixtures["rp3"], fixtures["l31"]).triangulation


def _empty(report):
    led = report.ledger
    return not report.summands and not (led["r1"] or led["r2"] or led["r3"])


@pytest.mark.parametrize("mode", ["full", "restricted"])
def test_rp3_l31_round_trip(rp3_l31, mode):
    report = prime_decompose(rp3_l31, mode)
    assert report.primes() == ["Z/2", "Z/3"]
    assert report.ledger["r1"] == 0
    assert report.balance["ok"]


def test_s2xs1_is_one_handle(fixtures):
    report = prime_decompose(fixtures["s2xs1"])
    assert not report.summands
    assert report.ledger["r1"] == 1


@pytest.mark.parametrize("name", ["s3_one_tet", "s3_two_tet_good_vertex"])
def test_gadget_spheres_decompose_to_nothing(name):
    report = prime_decompose(gadget(name))
    assert _empty(report)
    assert report.ledger["s3_dropped"] >= 1


def test_one_tet_sphere_is_one_recognition(fixtures):
    report = prime_decompose(fixtures["s3_one_tet"])
    assert report.ledger == {"r1": 0, "r2": 0, "r3": 0, "s3_dropped": 1}
    assert len(report.recognitions) == 1 and not report.iterations


@pytest.mark.parametrize("name, group", [("l31", "Z/3"), ("rp3", None)])
def test_lens_spaces(fixtures, name, group):
    report = prime_decompose(fixtures[name])
    assert report.primes() == ["Z/2" if group is None else group]


def test_summands_are_fixpoints(rp3_l31):
    report = prime_decompose(rp3_l31)
    assert report.summands
    for entry in report.summands:
        again = prime_decompose(entry["triangulation"])
        assert not again.iterations
        assert [s["triangulation"] for s in again.summands] == [entry["triangulation"]]


def test_deterministic(rp3_l31):
    a = json.dumps(prime_decompose(rp3_l31).to_json(), sort_keys=True)
    b = json.dumps(prime_decompose(rp3_l31).to_json(), sort_keys=True)
    assert a == b


def test_iterations_shrink_the_pieces(rp3_l31):
    report = prime_decompose(rp3_l31)
    start = report.input.get("one_vertex_tetrahedra", report.input["tetrahedra"])
    assert len(report.iterations) <= start
    for it in report.iterations:
        assert sum(it["pieces"]) < it["tetrahedra"]


def test_out_dir(tmp_path, fixtures):
    report = prime_decompose(fixtures["l31"], out_dir=str(tmp_path), name="piece")
    (entry,) = report.summands
    assert entry["file"].endswith("piece_0.tri")
    assert read_triangulation(entry["file"]) == entry["triangulation"]


def test_restricted_miss_is_contingent_only_when_trusted(fixtures):
    tri = fixtures["l31"]
    trusted = prime_decompose(tri, "restricted", assume_minimal=True)
    assert trusted.summands[0]["contingent_on_minimality"]
    checked = prime_decompose(tri, "restricted")
    assert not checked.summands[0]["contingent_on_minimality"]


def test_multi_vertex_input_is_converted(fixtures):
    report = prime_decompose(connect_sum(fixtures["s3_two_tet_good_vertex"], fixtures["l31"]).triangulation)
    assert "one_vertex_tetrahedra" in report.input
    assert report.primes() == ["Z/3"]


def test_bad_inputs(fixtures):
    with pytest.raises(DecomposeError) as info:
        prime_decompose(Triangulation([]))
    assert info.value.code == "invalid_input"
    with pytest.raises(DecomposeError) as info:
        prime_decompose(fixtures["rp3"], "sideways")
    assert info.value.code == "usage"


def test_report_json(rp3_l31):
    out = prime_decompose(rp3_l31).to_json()
    assert out["schema"] == 1
    assert set(out) >= {"input", "mode", "iterations", "summands", "ledger", "stats"}
    assert all({"file", "homology", "s3"} <= set(s) for s in out["summands"])
    json.dumps(out)


@given(seeded(3))
@settings(max_examples=30)
def test_decomposition_accounts_for_homology(tri):
    report = prime_decompose(tri)
    assert report.balance["ok"]
    for entry in report.summands:
        assert not entry["s3"]
        if not _group_nontrivial(entry["triangulation"]):
            assert entry["s3_decided_by"] == "almost normal search"


def _group_nontrivial(tri):
    g = h1(tri)
    return bool(g.rank or g.torsion)


def test_decide_s3(fixtures):
    assert decide_s3(fixtures["s3_one_tet"])
    assert decide_s3(gadget("s3_two_tet_good_vertex"))
    assert not decide_s3(fixtures["rp3"])
    assert not decide_s3(fixtures["s2xs1"])


def test_edge_spheres_are_normal_spheres(fixtures):
    tri = connect_sum(fixtures["s3_two_tet_good_vertex"], fixtures["rp3"]).triangulation
    found = 0
    for edge in range(len(tri.skeleton.edge_classes)):
        x = edge_sphere(tri, edge)
        if x is not None:
            found += 1
            assert is_admissible(tri, x)[0] and chi_linear(tri, x) == 2
    assert found
    edge, report = reduce_vertices(tri)
    assert sum(s.size for s in report.summands) < tri.size
