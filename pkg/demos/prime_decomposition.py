"""
Prime decomposition of RP^3 # L(3,1)
====================================

Sum two irreducible lens spaces and recover them.  The decomposition
loop searches for a sphere, crushes, and repeats on every piece until only
irreducible summands and recognized 3-spheres remain.
"""

import json

from normcrush import connect_sum, fixture, prime_decompose

composite = connect_sum(fixture("rp3"), fixture("l31")).triangulation
print(f"composite: {composite.size} tetrahedra, {composite.skeleton.v} vertex")

for mode in ("full", "restricted"):
    report = prime_decompose(composite, mode)
    print(f"\n{mode} mode: {report.stats}")
    for it in report.iterations:
        print(f"  piece {it['piece']} ({it['tetrahedra']} tets): {it['kind']} -> pieces {it['pieces']}, "
              f"ledger {it['crush_ledger']}")
    for s in report.summands:
        print(f"  summand {s['piece']}: {s['tetrahedra']} tets, H1 = {s['homology']} ({s['s3_decided_by']})")
    print("  ledger:", report.ledger)
    print("  prime H1 multiset:", report.primes())

# S^2 x S^1 has no irreducible summand, only a non-separating sphere
print("\nS2 x S1:", prime_decompose(fixture("s2xs1")).ledger)

# the report is plain JSON
print(json.dumps(report.to_json()["balance"], indent=1))
