"""Polynomial differential forms on simplices: calculus, integration, axioms.

Run with:  python3 demos/03_forms_and_admissibility.py
"""

from fractions import Fraction
import random

from cdgalab.polyforms import (
    PolyForm,
    check_admissible_axioms,
    contraction,
    d,
    face_restrict,
    integrate,
    random_polyform,
)

print("== exterior calculus on the triangle ==")
t1 = PolyForm.coordinate(2, 1)
t2 = PolyForm.coordinate(2, 2)
w = t1 * t2
print("d(t1 t2) =", d(w))

print()
print("== exact integration ==")
top = PolyForm(2, {((1, 1), (1, 2)): Fraction(1)})
print("integral of t1 t2 dt1 dt2 over the triangle:", integrate(top))

print()
print("== Stokes, checked exactly on a random 1-form ==")
rng = random.Random(0)
omega = random_polyform(rng, 2, 1, 3)
lhs = integrate(d(omega))
rhs = sum((-1) ** i * integrate(face_restrict(omega, i)) for i in range(3))
print("  integral of d(omega):", lhs)
print("  signed boundary integrals:", rhs)
assert lhs == rhs

print()
print("== the cone contraction witnesses acyclicity ==")
closed = d(random_polyform(rng, 2, 0, 3))
primitive = contraction(closed)
print("  d(h(closed)) == closed:", d(primitive) == closed)

print()
print("== the five admissibility axioms, sampled ==")
rep = check_admissible_axioms(2, sample_budget=10, seed=0)
print("  all pass:", rep.ok(), "| samples:", rep.samples)
