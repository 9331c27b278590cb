"""
Restricted cones on larger triangulations
=========================================

A full sweep over quad types costs 4t * 3^t cones.  For a minimal
triangulation it is enough to look at cones with at most two quad types,
36t * C(t, 2) of them, which stays small as t grows.
"""

import time
from math import comb

from normcrush import connect_sum, fixture
from normcrush.search import SearchStats, is_reducible_minimal

for t in (2, 5, 10, 20):
    print(f"t = {t:2d}: full {4 * t * 3**t:>16,d} cones, restricted {36 * t * comb(t, 2):>8,d}")

l31 = fixture("l31")
composite = l31
while composite.size < 20:
    composite = connect_sum(composite, l31).triangulation
print(f"\nL(3,1) summed with itself: {composite.size} tetrahedra, {composite.skeleton.v} vertex")

start = time.perf_counter()
stats = SearchStats()
verdict = is_reducible_minimal(composite, stats=stats)
elapsed = time.perf_counter() - start
print(f"verdict {verdict.verdict} after {stats.lps} linear programs in {elapsed:.1f}s")
print("witness:", verdict.finding.to_json()["cone"])
print("caveat:", verdict.caveat)
