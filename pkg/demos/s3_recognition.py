"""
Recognizing the 3-sphere
========================

When a one-vertex triangulation has no normal sphere other than the vertex
link, it is the 3-sphere exactly when some cone with one octagon has a
vertex with chi minus the octagon count equal to 1.
"""

from normcrush import fixture, gadget
from normcrush.decompose import decide_s3
from normcrush.search import find_nontrivial_sphere, recognize_s3
from normcrush.surface import reconstruct_surface

one_tet = fixture("s3_one_tet")
print("normal sphere in the one-tetrahedron S3:", find_nontrivial_sphere(one_tet, "full"))
verdict = recognize_s3(one_tet)
print("verdict:", verdict.to_json())
surface = reconstruct_surface(one_tet, verdict.witness)
print("almost normal sphere:", surface.euler, "chi,", surface.components[0].vector.octagon_count, "octagon")

l31 = fixture("l31")
print("L(3,1):", recognize_s3(l31).to_json())

# RP3 contains a doubled projective plane, so the octagon search does not
# apply directly; crushing first settles it
print("RP3 is S3:", decide_s3(fixture("rp3")))

# the three-vertex gadget is a sphere too, decided through decomposition
print("three-vertex gadget is S3:", decide_s3(gadget("s3_two_tet_good_vertex")))
