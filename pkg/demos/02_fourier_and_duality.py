"""
Characters, the Fourier transform and the double dual
=====================================================

The dual of Z_m1 x ... x Z_mk uses the same moduli; the dual element c is
the character x -> exp(2 pi i sum_j c_j x_j / m_j).
"""
import numpy as np

from groupnets.fourier import (
    Character,
    SignedMeasure,
    convolve,
    fourier_transform,
    inverse_fourier,
    pushforward,
    verify_double_dual,
)
from groupnets.groups import make_group
from groupnets.homs import Homomorphism

Z4 = make_group([4])
print("chi_1(1) on Z4 =", Character(Z4, (1,))((1,)))

G = make_group([12], "counting")
rng = np.random.default_rng(0)
f = rng.standard_normal(12)
g = rng.standard_normal(12)
F = fourier_transform(G, f)
print("round trip error:", np.abs(inverse_fourier(G, F) - f).max())

# the transform turns convolution into a pointwise product
lhs = fourier_transform(G, convolve(G, f, g)).values
rhs = F.values * fourier_transform(G, g).values
print("convolution theorem error:", np.abs(lhs - rhs).max())

# pushing a measure forward sums its mass over each fiber
sigma = SignedMeasure(Z4, np.ones(4))
print("uniform on Z4 pushed by x -> 2x:", pushforward(sigma, Homomorphism.scalar(Z4, 2)).mass)

for moduli in ([6], [2, 4], [3, 3, 2]):
    print("double dual of", make_group(moduli), "is G again:", verify_double_dual(make_group(moduli)))
