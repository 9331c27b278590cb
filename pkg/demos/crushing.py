"""
Crushing RP^3 # RP^3 along its splitting sphere
===============================================

A connected sum of two projective spaces is built, the sphere that
separates the summands is found and the triangulation is crushed along it.
The crush keeps only the tetrahedra without quads and reports the pieces
it collapsed.
"""

from normcrush import connect_sum, fixture
from normcrush.crush import crush, decompose_cells, homology_balance
from normcrush.homology import h1
from normcrush.search import find_nontrivial_sphere

rp3 = fixture("rp3")
result = connect_sum(rp3, rp3)
tri = result.triangulation
print("connected sum:", result.metadata["case"], f"{tri.size} tetrahedra, H1 = {h1(tri)}")

x = find_nontrivial_sphere(tri, "full").vector
print("sphere:", x)

# how each tetrahedron is cut by the sphere
cells = decompose_cells(tri, x)
for i, stack in enumerate(cells.stacks):
    kinds = sorted(cells.pieces[n].polyhedron for n in stack)
    print(f"  tet {i}: {x.tet(i)} -> {', '.join(kinds)}")

report = crush(tri, x)
print("removed (quad) tetrahedra:", report.removed)
print("summands:", [f"{s.size} tets, H1 = {h1(s)}" for s in report.summands])
print("counters:", report.counters, "ledger:", report.ledger)

# the ledger and the summands together account for H1 of the input
print("balance:", homology_balance(tri, report))
