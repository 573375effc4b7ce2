"""Replay the 2-adic valuation table for odd-characteristic group orders.

The point: among the classical and exceptional families, only the
plus-type dimension-8 orthogonal family reaches 2-part exactly 2^12 at
q = 3.  Closed-form rows are checked against direct polynomial
valuations on every evaluation.
"""

from d4fusion.valuations import all_families, closed_form_families, two_part_valuation

qs = (3, 5, 7, 11, 13)
print("%-10s" % "family", *("q=%-3d" % q for q in qs))
for family in all_families():
    row = [two_part_valuation(family, q) for q in qs]
    marker = " closed-form" if family in closed_form_families() else ""
    print("%-10s" % family, *("%-5d" % v for v in row), marker)

print("\nexactly 2^12 at q=3:",
      [f for f in all_families() if two_part_valuation(f, 3) == 12])
