"""Run the exhaustive structure battery on one Sylow realization.

Everything is a full loop over the 4096 x 4096 multiplication table:
centers, the upper central series, the distinguished extraspecial
subgroup of order 512, the six elementary abelian subgroups of order 64
and their intersection pattern, coset commutator shapes, the Frattini
quotient, and the uniqueness of the extraspecial subgroup among all
index-8 subgroups.
"""

import json

from d4fusion.groupmodels import build_affine_model
from d4fusion.structure import StructureContext, run_battery

bundle = build_affine_model()
ctx = StructureContext(bundle)

for report in run_battery(ctx) + run_battery(ctx, ids=["a8", "valuation"]):
    print("%-14s %-4s %6d ms   %s" % (report.lemma_id, report.status,
                                      report.elapsed_ms, report.claim))

print("\nselected witnesses:")
reports = {r.lemma_id: r for r in run_battery(ctx, ids=["cent", "sixe", "frattini"])}
print(json.dumps({k: r.to_json()["witnesses"] for k, r in reports.items()},
                 indent=2, default=str))
