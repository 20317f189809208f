"""Exact volumes, moments and polars of a small kite and its polar."""

from valuation_lab import MOMENT, MOMENT_MATRIX, VOLUME, convex_hull, polar
from valuation_lab.linalg import fmt

kite = convex_hull([(-1, 0), (2, 0), (0, 1), (0, -1)])
dual = polar(kite)

for name, P in [("kite", kite), ("polar", dual)]:
    print(name, [tuple(fmt(c) for c in v) for v in P.vertices])
    print("  volume", fmt(VOLUME(P)))
    print("  moment", [fmt(c) for c in MOMENT(P)])
    print("  moment matrix", [[fmt(c) for c in row] for row in MOMENT_MATRIX(P)])

# taking the polar twice gives back the same canonical object
assert polar(dual) == kite
