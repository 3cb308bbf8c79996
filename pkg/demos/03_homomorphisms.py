"""
Homomorphisms, automorphisms and map families
=============================================

A map G -> H is a matrix of generator images; entry (i, j) is admissible
exactly when a_i * M_ij = 0 mod b_j.  Counting the choices gives
|Hom(G, H)| = prod gcd(a_i, b_j).
"""
import numpy as np

from groupnets.groups import make_group
from groupnets.homs import (
    EnumerationBudgetError,
    enumerate_automorphisms,
    enumerate_homs,
    hom_count,
    parse_family,
    sample_map,
)

Z4, Z6 = make_group([4]), make_group([6])
print("Hom(Z4, Z6):", [h.matrix for h in enumerate_homs(Z4, Z6)], "count", hom_count(Z4, Z6))
print("|Aut(Z8)| =", len(enumerate_automorphisms(make_group([8]))))
print("|Aut(Z2 x Z2)| =", len(enumerate_automorphisms(make_group([2, 2]))))

# the Aut family of Z2 is just the identity, which matters later
print("Aut(Z2):", [h.matrix for h in enumerate_automorphisms(make_group([2]))])

# families too large to list are sampled instead
big = make_group([2, 2, 2, 2, 2])
try:
    enumerate_homs(big, big)
except EnumerationBudgetError as exc:
    print("budget:", exc)
rng = np.random.default_rng(1)
phi = sample_map(parse_family("affine-aut"), big, rng)
print("a random affine automorphism of", big, ":", phi.hom.matrix, "+", phi.shift)
