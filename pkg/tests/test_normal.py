import random
from fractions import Fraction

import pytest
from hypothesis import given

from conftest import random_triangulation, seeded
from oracles import counted_euler
from sampling import admissible_sample

from normcrush.normal import (
    NormalError,
    NormalVector,
    chi_linear,
    haken_sum,
    is_admissible,
    is_trivial,
    matching_system,
    parse_vector,
    quad_stats,
    vertex_link,
    weight,
)
from normcrush.surface import reconstruct_surface


def _sample_set(fixtures):
    rng = random.Random(7)
    tris = [fixtures[n] for n in ("s3_one_tet", "rp3", "l31", "s2xs1", "s3_two_tet_good_vertex")]
    tris += [random_triangulation(3, rng) for _ in range(2)]
    out = []
    for tri in tris:
        out += [(tri, x) for x in admissible_sample(tri, rng, per_cone=3)]
    return out


@pytest.fixture(scope="module")
def samples(fixtures):
    return _sample_set(fixtures)


def test_sample_is_large_and_admissible(samples):
    assert len(samples) >= 500
    assert all(is_admissible(tri, x)[0] for tri, x in samples)


def test_chi_matches_reconstructed_surface(samples):
    for tri, x in samples:
        surface = reconstruct_surface(tri, x)
        assert chi_linear(tri, x) == surface.euler
        assert weight(tri, x) == surface.weight


def test_chi_matches_cell_count(samples):
    for tri, x in samples:
        chi, points = counted_euler(tri, x)
        assert chi_linear(tri, x) == chi
        assert weight(tri, x) == points


@given(seeded(4))
def test_matching_system_shape(tri):
    system = matching_system(tri)
    assert len(system.equations) == 6 * tri.size
    for left, right in system.equations:
        assert len(left) == 2 and len(right) == 2


@given(seeded(3))
def test_vertex_links_are_trivial_spheres(tri):
    for v in range(tri.skeleton.v):
        link = vertex_link(tri, v)
        assert is_admissible(tri, link)[0]
        assert chi_linear(tri, link) == 2
        assert quad_stats(link) == (0, 0)
        assert is_trivial(link)


def test_haken_sum_is_additive(samples):
    rng = random.Random(3)
    by_tri = {}
    for tri, x in samples:
        by_tri.setdefault(tri, []).append(x)
    checked = 0
    for tri, xs in by_tri.items():
        for _ in range(40):
            x, y = rng.sample(xs, 2)
            try:
                z = haken_sum(tri, x, y)
            except NormalError as exc:
                assert exc.code == "incompatible"
                continue
            checked += 1
            assert is_admissible(tri, z)[0]
            assert chi_linear(tri, z) == chi_linear(tri, x) + chi_linear(tri, y)
            assert weight(tri, z) == weight(tri, x) + weight(tri, y)
    assert checked > 50


def test_quad_property_violation_is_reported(fixtures):
    tri = fixtures["rp3"]
    x = NormalVector((0, 0, 0, 0, 1, 1, 0) + (0,) * 7)
    ok, problems = is_admissible(tri, x)
    assert not ok
    assert any("quad property" in p for p in problems)


def test_wrong_length_raises(fixtures):
    with pytest.raises(NormalError) as info:
        is_admissible(fixtures["rp3"], NormalVector((0,) * 7))
    assert info.value.code == "length"


@pytest.mark.parametrize("text, code", [("1,2,x", "syntax"), ("1,2,3", "length"), ("0,0,0,0,0,0,0;oct 0 1", "syntax")])
def test_parse_vector_errors(text, code):
    with pytest.raises(NormalError) as info:
        parse_vector(text)
    assert info.value.code == code


def test_parse_vector_round_trip():
    x = NormalVector((1, 0, 0, 0, 0, 0, 0), (0, 2, 1))
    assert parse_vector(str(x)) == x


def test_chi_is_exact_rational(fixtures):
    tri = fixtures["l31"]
    value = chi_linear(tri, vertex_link(tri, 0))
    assert isinstance(value, Fraction) and value == 2


def test_one_tet_vertex_link_reads_corner_multiplicities(fixtures):
    tri = fixtures["s3_one_tet"]
    assert vertex_link(tri, 0).coords == (1, 1, 1, 1, 0, 0, 0)


def test_matching_residuals(fixtures):
    tri = fixtures["rp3"]
    system = matching_system(tri)
    # every equation has two columns a side, so the all-ones vector balances
    assert not any(system.residual([1] * 14))
    lone = [0] * 14
    lone[0] = 1
    assert any(system.residual(lone))


def test_chi_and_weight_scale_linearly(samples):
    for tri, x in samples[::10]:
        assert chi_linear(tri, x.scaled(2)) == 2 * chi_linear(tri, x)
        assert weight(tri, x.scaled(3)) == 3 * weight(tri, x)


def test_zero_vector(fixtures):
    tri = fixtures["l31"]
    zero = NormalVector((0,) * 14)
    assert weight(tri, zero) == 0
    x = vertex_link(tri, 0)
    assert haken_sum(tri, x, zero) == x


def test_incompatible_sum_names_the_tetrahedron(fixtures):
    x = NormalVector((0, 0, 0, 0, 1, 0, 0) + (0,) * 7)
    y = NormalVector((0, 0, 0, 0, 0, 1, 0) + (0,) * 7)
    with pytest.raises(NormalError, match="tetrahedron 0") as info:
        haken_sum(fixtures["rp3"], x, y)
    assert info.value.code == "incompatible"


def test_quad_type_counts_under_sums(samples):
    rng = random.Random(5)
    normal = [(tri, x) for tri, x in samples if x.octagon is None]
    for _ in range(300):
        (tri, x), (_, y) = rng.sample(normal, 2)
        if len(x.coords) != len(y.coords):
            continue
        try:
            z = haken_sum(None, x, y)
        except NormalError:
            continue
        n, m, both = quad_stats(x)[0], quad_stats(y)[0], quad_stats(z)[0]
        assert max(n, m) <= both <= n + m


def test_quad_stats_counts_tetrahedra():
    coords = [0] * 42
    coords[7 * 2 + 5] = 2
    coords[7 * 5 + 4] = 3
    assert quad_stats(NormalVector(tuple(coords))) == (2, 5)


def test_doubled_sphere_is_two_parallel_copies(fixtures):
    from normcrush.search import find_nontrivial_sphere

    tri = fixtures["s2xs1"]
    x = find_nontrivial_sphere(tri, "full").vector
    single = reconstruct_surface(tri, x)
    double = reconstruct_surface(tri, x.scaled(2))
    assert single.component_count() == 1 and single.euler == 2
    assert double.component_count() == 2
    assert all(c.vector == x and c.euler == 2 for c in double.components)


def test_vertex_link_surface(fixtures):
    tri = fixtures["l31"]
    surface = reconstruct_surface(tri, vertex_link(tri, 0))
    assert surface.component_count() == 1
    assert surface.components[0].euler == 2 and surface.components[0].orientable
