"""
Fitting group networks
======================

F(x) = sum_i alpha_i psi(phi_i(x)).  Coefficients come from least squares;
when the dictionary has full rank every target is reproduced exactly.
"""
import numpy as np

from groupnets.groups import make_group
from groupnets.homs import FamilySpec
from groupnets.netlib import build_dictionary, fit_coefficients, greedy_select, table

rng = np.random.default_rng(3)
Z8 = make_group([8])
psi = table(rng.standard_normal(8))
target = rng.standard_normal(8)

D = build_dictionary(Z8, FamilySpec("translations"), psi, 8, rng)
for p in (1, 2, np.inf):
    fit = fit_coefficients(D, target, p)
    print(f"full-rank fit, L^{p} residual {fit.lp:.2e}")

# matching pursuit adds one translate at a time
res = greedy_select(Z8, FamilySpec("translations"), psi, target, 8, rng)
print("greedy residuals:", np.round(res.residuals, 4))

# a single shared map spans one direction only, however many terms are used
shared = greedy_select(Z8, FamilySpec("affine-end"), psi, target, 8, rng, shared_map=True)
print("shared-map residuals:", np.round(shared.residuals, 4), "stalled:", shared.stalled)

# the one-column case on Z2: residual of [1, 0] against psi = [1, 2]
Z2 = make_group([2], "counting")
fit = fit_coefficients(build_dictionary(Z2, FamilySpec("aut"), table([1, 2]), 1), [1.0, 0.0])
print("Z2 projection residual:", fit.l2, "= 2/sqrt(5) =", 2 / np.sqrt(5))
