"""
Finite Abelian groups and their Haar measure
============================================

A group is a list of cyclic moduli.  Elements are coordinate tuples, stored
in mixed-radix order with the last coordinate running fastest.
"""
import numpy as np

from groupnets.groups import (
    TorusGrid,
    check_haar_invariance,
    haar_integrate,
    haar_measure,
    make_group,
    parse_group,
)

G = make_group([2, 3])
print(G, "order", G.order)
print("elements:", G.elements())
print("(1,2) + (1,2) =", G.add((1, 2), (1, 2)))
print("-(1,2) =", G.neg((1, 2)))

# Haar measure is fixed only up to scale; both scalings are available
Z6 = make_group([6])
print("integral of 1 on Z6, counting:", haar_integrate(Z6, np.ones(6), "counting"))
print("integral of 1 on Z6, probability:", haar_integrate(Z6, np.ones(6)))

# translating a set never changes its measure
Z3 = make_group([3])
B = [(1,), (2,)]
print("m(B) =", haar_measure(Z3, B), " invariant under +1:", check_haar_invariance(Z3, B, (1,)))

# sampled groups: a discretized circle and a window of the integer lattice
T = TorusGrid(1, 8)
delta = np.eye(8)[0]
print(T, "weight of one point:", haar_integrate(T, delta))
W = parse_group("W1@3")
print(W, "points:", W.points[:, 0].tolist(), " ordered:", W.less((-1,), (2,)))
try:
    W.add((3,), (1,))
except ValueError as exc:
    print("window overflow:", exc)
