"""Exact linear inequalities for chain counts in graded posets.

The package computes, in exact rational arithmetic, the cone of linear
functionals of flag f-vectors that are nonnegative on every graded poset of
a fixed rank: its facets (indexed by antichains of intervals via the blocker
calculus), its extreme rays (via the double description method), witness
posets realizing the facet values in the limit, and the convolution algebra
connecting the cones across ranks.
"""

__version__ = "0.1.0"
