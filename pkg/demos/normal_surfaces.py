"""
Normal surfaces in a two-tetrahedron S^2 x S^1
==============================================

Walk through the normal coordinates of a small triangulation: the
matching equations, a vertex link and the essential sphere that the cone
search finds.
"""

from normcrush import fixture
from normcrush.normal import chi_linear, matching_system, quad_stats, vertex_link, weight
from normcrush.search import SearchStats, find_nontrivial_sphere
from normcrush.surface import reconstruct_surface

tri = fixture("s2xs1")
sk = tri.skeleton
print(f"{tri.size} tetrahedra, {sk.v} vertex, {sk.e} edges, edge degrees {list(sk.edge_degrees)}")

# one equation per face class and arc type: 6t of them
system = matching_system(tri)
print(f"{len(system.equations)} matching equations on {system.column_count} columns")
for left, right in system.equations[:3]:
    print("   ", " + ".join(f"x{c}" for c in left), "=", " + ".join(f"x{c}" for c in right))

# the link of the only vertex: triangles only, Euler characteristic 2
link = vertex_link(tri, 0)
print("vertex link", link, "chi", chi_linear(tri, link), "weight", weight(tri, link))

# the search maximizes chi over each quad-type cone with one triangle zeroed
stats = SearchStats()
finding = find_nontrivial_sphere(tri, "full", stats=stats)
x = finding.vector
print(f"sphere {x} found after {stats.lps} linear programs in cone {finding.cone.to_json()}")
print("quad types, quads:", quad_stats(x))

# building the surface disk by disk confirms it is one connected sphere
surface = reconstruct_surface(tri, x)
print(f"{surface.component_count()} component, chi {surface.euler}, {surface.points} points on edges")

# doubling gives two parallel copies
double = reconstruct_surface(tri, x.scaled(2))
print("2x has", double.component_count(), "components with chi", [c.euler for c in double.components])
