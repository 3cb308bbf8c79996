"""
Density as a rank question
==========================

On a finite group the span of {psi o phi} is everything exactly when no
nonzero measure annihilates it.  That is a null-space computation.
"""
import numpy as np

from groupnets.density import annihilator, density_map, density_rank, is_discriminatory
from groupnets.groups import make_group
from groupnets.homs import FamilySpec
from groupnets.netlib import build_dictionary, delta0, table

# translates of psi = [1, 1, 0, 0] on Z4 miss one frequency
rep = density_rank(make_group([4]), table([1, 1, 0, 0]), FamilySpec("translations"))
print("Z4 translates: rank", rep.rank, "of", rep.ambient, " witness", np.round(rep.annihilator_basis[0].mass, 3))

# automorphisms alone are not enough on Z2: Aut(Z2) = {id}
Z2 = make_group([2])
v = is_discriminatory(Z2, table([1, 2]), FamilySpec("aut"))
print("Z2, Aut, psi=[1,2]: discriminatory", v.discriminatory, " witness", v.witness.mass)
D = build_dictionary(Z2, FamilySpec("aut"), table([1, 2]), 1)
print("  annihilator basis:", [m.mass for m in annihilator(D)])

# affine maps fix this: the point mass delta_0 reaches every point
print("Z5, affine-end, delta0 dense:", density_rank(make_group([5]), delta0(), FamilySpec("affine-end")).dense)

# a small survey
for r in density_map([f"Z{n}" for n in range(2, 7)], ["logistic", "delta0"], ["aut", "affine-end"]):
    print(f"  {r.group:4} {r.activation:18} {r.family:11} rank {r.rank}/{r.ambient} dense={r.dense}")
