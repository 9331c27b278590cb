"""Normal 2-spheres, crushing and prime decomposition of triangulated
closed orientable 3-manifolds."""

from importlib import resources

from .crush import CrushError, CrushReport, crush
from .decompose import DecomposeError, DecompositionReport, decide_s3, prime_decompose, splitting_evidence
from .homology import HomologyGroup, h1, homology
from .normal import NormalVector, chi_linear, matching_system, parse_vector, weight
from .search import find_nontrivial_sphere, is_reducible_minimal, recognize_s3
from .sums import add_vertex, connect_sum, find_good_vertex, gadget, to_one_vertex
from .triangulation import Triangulation, TriangulationError, parse_triangulation, read_triangulation, serialize

__version__ = "0.1.0"

FIXTURES = ("s3_one_tet", "s3_two_tet_good_vertex", "rp3", "l31", "s2xs1")


def fixture(name):
    """Bundled triangulation: one of ``FIXTURES``."""
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; choose from {FIXTURES}")
    return parse_triangulation(resources.files(__package__).joinpath("data", f"{name}.tri").read_text())


def fixture_path(name):
    return str(resources.files(__package__).joinpath("data", f"{name}.tri"))
