"""
pconvex: constructive Caratheodory reduction for p-convex hulls (0 < p < 1),
exact gauges of finitely generated p-bodies, operator norms, q-envelopes,
Banach-Mazur distance estimates and Monte Carlo experiments on random
Gluskin-type spaces.
"""

__version__ = "1.0.0"
