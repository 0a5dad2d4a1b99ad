"""Cohomology of small DG algebras, step by step.

Run with:  python3 demos/01_cohomology_basics.py
"""

from cdgalab.cdga import FreeCDGA, cohomology, truncate
from cdgalab.graded import FreeGCA

print("== the torus: an exterior algebra on two degree-1 generators ==")
gca = FreeGCA([("t1", 1), ("t2", 1)])
torus = FreeCDGA(gca, {})  # zero differential
t = truncate(torus, 3)
print("bases per degree:", t.labels[:3])

h = cohomology(t, 2)
print("cohomology dimensions:", h.dims)
print("[t1][t2] class coordinates:", h.cup(1, 0, 1, 1), "(nonzero: the top class)")

print()
print("== a two-sphere with its attached disk bundle: (x, y), dy = x^2 ==")
gca2 = FreeGCA([("x", 2), ("y", 3)])
cp1 = FreeCDGA(gca2, {"y": gca2.gen("x") * gca2.gen("x")})
t2 = truncate(cp1, 7)
h2 = cohomology(t2, 6)
print("dimensions (degrees 0..6):", h2.dims)
print("only 1 and [x] survive: y kills x^2 and everything above")
