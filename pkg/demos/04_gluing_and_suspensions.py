"""Fiber products as gluings: a circle from an interval, suspensions of spheres.

Run with:  python3 demos/04_gluing_and_suspensions.py
"""

from cdgalab.cdga import (
    DGMorphism,
    cohomology_dims,
    direct_sum,
    point_dga,
    power_quotient_dga,
)
from cdgalab.exactlin import QMatrix
from cdgalab.gluing import (
    fiber_product,
    interval_forms,
    mayer_vietoris,
    suspension_inclusion,
    suspension_model,
    suspension_triple,
    theta_equivalence_check,
)

print("== a circle: glue the two endpoints of an interval to one point ==")
a = interval_forms(3, cutoff=6)
qq = direct_sum(point_dga(6), point_dga(6))
ev = [QMatrix.zero(qq.dim(k), a.dim(k)) for k in range(7)]
ev[0] = QMatrix(2, a.dim(0), {(0, 0): 1, **{(1, c): 1 for c in range(a.dim(0))}})
f = DGMorphism(a, qq, ev)
b = point_dga(6)
gm = [QMatrix.zero(qq.dim(k), b.dim(k)) for k in range(7)]
gm[0] = QMatrix.from_rows([[1], [1]])
g = DGMorphism(b, qq, gm)
fp = fiber_product(f, g, 5)
print("H of the glued algebra:", cohomology_dims(fp.carrier, 4), " (the circle)")
mv = mayer_vietoris(fp, 4)
print("Mayer-Vietoris exact:", mv.ok(), "| connecting rank in degree 0:", mv.connecting_rank(0))

print()
print("== suspension of the 2-sphere, two ways ==")
m = power_quotient_dga(2, 2, 8)
s = suspension_model(m, 7)
print("suspension algebra cohomology:", cohomology_dims(s.carrier, 6))

f2, g2 = suspension_triple(m, 7)
fp2 = fiber_product(f2, g2, 7)
print("fiber-product model cohomology:", cohomology_dims(fp2.carrier, 6))
theta = suspension_inclusion(s, fp2)
ok, _ = theta_equivalence_check(fp2, s.carrier, theta, 6)
print("inclusion of the small model is a quasi-isomorphism:", ok)
