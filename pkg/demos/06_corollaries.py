"""
Ordered windows, ReLU and feature maps
======================================

A window [-N, N] of Z is a compact piece of an ordered group, so ReLU
makes sense on it.  Affine maps x -> a x + b then give full rank.
"""
import numpy as np

from groupnets.density import counterexample_search, density_rank
from groupnets.groups import LatticeWindow, make_group
from groupnets.homs import FamilySpec
from groupnets.netlib import build_dictionary, fit_coefficients, random_table, relu

rng = np.random.default_rng(4)
for N in (1, 3, 6):
    W = LatticeWindow(1, N)
    fam = FamilySpec("affine-end")
    rep = density_rank(W, relu(), fam)
    D = build_dictionary(W, fam, relu(), 10_000)
    fit = fit_coefficients(D, rng.standard_normal(W.order), np.inf)
    print(f"W1@{N}: rank {rep.rank} of {2 * N + 1}, sup residual {fit.sup:.1e}")

# feature maps Z4 -> Z2 x Z2 with a random psi on the target
G = make_group([4])
fam = FamilySpec("hom", target="Z2xZ2")
rep = density_rank(G, random_table(make_group([2, 2]), rng), fam)
print("Hom(Z4, Z2xZ2):", rep.n_terms, "maps, rank", rep.rank, "of", rep.ambient)

# where Aut-only families stop discriminating
found = counterexample_search(4, [FamilySpec("aut")], rng, trials=1)
print("Aut witnesses up to order 4:", [str(w.group) for w in found])
