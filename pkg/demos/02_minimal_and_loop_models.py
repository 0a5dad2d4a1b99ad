"""Minimal Sullivan models and free-loop models.

Run with:  python3 demos/02_minimal_and_loop_models.py
"""

from cdgalab.cdga import cohomology_dims, power_quotient_dga, truncate
from cdgalab.sullivan import loop_model, minimal_model, minimality_check

print("== minimal model of Q[x]/(x^3), |x| = 2 ==")
target = power_quotient_dga(2, 3, 7)
res = minimal_model(target, 6)
for g in res.model.gca.generators:
    print(f"  generator {g.name} in degree {g.degree}, d({g.name}) = {res.model.diff[g.name]!r}")
print("minimal:", minimality_check(res.model)[0])

print()
print("== its free-loop model: every generator doubled, degree shifted down ==")
lm = loop_model(res.model)
for g in lm.gca.generators:
    print(f"  {g.name} (degree {g.degree}): d = {lm.diff[g.name]!r}")

print()
print("== loop-space cohomology of the 2-sphere ==")
lm1 = loop_model(minimal_model(power_quotient_dga(2, 2, 7), 6).model)
t = truncate(lm1, 6)
print("dimensions in degrees 0..4:", cohomology_dims(t, 4))
print("one class in every degree: the classical answer for the free loops on S^2")
