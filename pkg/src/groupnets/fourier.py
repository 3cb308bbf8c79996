"""Characters, Fourier transforms, convolution and pushforward on finite groups.

The dual of ``Z_m1 x ... x Z_mk`` is presented with the same moduli: the dual
element ``c`` is the character ``chi_c(x) = exp(2 pi i sum_j c_j x_j / m_j)``.

Conventions (``w`` is the Haar weight of one element):

* forward   ``f_hat(c) = sum_x f(x) conj(chi_c(x)) w``
* inverse   ``f(x) = sum_c f_hat(c) chi_c(x) / (w |G|)``
* convolution ``(f * g)(x) = sum_y f(x - y) g(y) w``

so that ``(f * g)^ = f_hat g_hat`` and ``inverse(forward(f)) == f`` in both Haar
modes.  With probability Haar on ``G`` the inverse is plain counting measure on
the dual.  Phases are reduced exactly in integer arithmetic modulo
``lcm(m_1, ..., m_k)`` before exponentiation.  Sums are dense matrix products
in index order, which keeps results bit-stable on a given BLAS build.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .groups import FiniteAbelianGroup, values_on
from .homs import Homomorphism, Map

DOUBLE_DUAL_BUDGET = 256


@dataclass(frozen=True)
class Character:
    group: FiniteAbelianGroup
    coords: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", self.group.element(self.coords))

    def __call__(self, x) -> complex:
        return character_eval(self, x)


def dual_group(G: FiniteAbelianGroup) -> FiniteAbelianGroup:
    """Self-dual presentation: same moduli, counting measure."""
    return FiniteAbelianGroup(G.moduli, "counting")


def _lcm(G) -> int:
    return math.lcm(*G.moduli) if G.moduli else 1


def phase_numerators(G: FiniteAbelianGroup, c, x) -> np.ndarray:
    """``L * sum_j c_j x_j / m_j  mod L`` with ``L = lcm(moduli)``, elementwise over rows."""
    L = _lcm(G)
    scale = np.array([L // m for m in G.moduli], dtype=np.int64)
    c = np.asarray(c, dtype=np.int64)
    x = np.asarray(x, dtype=np.int64)
    return ((c * x) @ scale) % L if G.rank else np.zeros(np.broadcast(c, x).shape[:-1], dtype=np.int64)


def character_eval(c: Character, x) -> complex:
    G = c.group
    x = G.element(x)
    r = int(phase_numerators(G, c.coords, x))
    return complex(np.exp(2j * np.pi * r / _lcm(G)))


@lru_cache(maxsize=64)
def _phase_table(moduli: tuple[int, ...]) -> np.ndarray:
    G = FiniteAbelianGroup(moduli)
    L = _lcm(G)
    scale = np.array([L // m for m in moduli], dtype=np.int64)
    pts = G.points
    table = ((pts * scale) @ pts.T) % L if G.rank else np.zeros((1, 1), dtype=np.int64)
    table.setflags(write=False)
    return table


def character_table(G: FiniteAbelianGroup) -> np.ndarray:
    """``T[c, x] = chi_c(x)`` indexed by dual and group element index."""
    return np.exp(2j * np.pi * _phase_table(G.moduli) / _lcm(G))


@dataclass(frozen=True, eq=False)
class SpectrumTable:
    """Fourier coefficients indexed by dual element (same mixed-radix order as ``G``)."""

    group: FiniteAbelianGroup
    values: np.ndarray

    def __mul__(self, other: "SpectrumTable") -> "SpectrumTable":
        if not self.group.same_group(other.group):
            raise ValueError("spectra live on different groups")
        return SpectrumTable(self.group, self.values * other.values)

    def __getitem__(self, c):
        return self.values[self.group.index(self.group.element(c))]

    def to_list(self) -> list:
        return [[float(v.real), float(v.imag)] for v in np.asarray(self.values, dtype=complex)]


def fourier_transform(G: FiniteAbelianGroup, f) -> SpectrumTable:
    vals = np.asarray(values_on(G, f), dtype=complex)
    T = character_table(G)
    return SpectrumTable(G, (T.conj() @ vals) * G.haar_weight())


def inverse_fourier(G: FiniteAbelianGroup, F) -> np.ndarray:
    vals = F.values if isinstance(F, SpectrumTable) else np.asarray(F, dtype=complex)
    T = character_table(G)
    return (T.T @ vals) / (G.haar_weight() * G.order)


def convolve(G: FiniteAbelianGroup, f, g) -> np.ndarray:
    """Direct ``O(|G|^2)`` convolution over the subtraction table."""
    fv = values_on(G, f)
    gv = values_on(G, g)
    sub = G.add_table[:, G.neg_table]  # sub[x, y] = index of x - y
    return (fv[sub] @ gv) * G.haar_weight()


@dataclass(frozen=True, eq=False)
class SignedMeasure:
    """Point masses on a finite group, real or complex, scalar or vector valued."""

    group: FiniteAbelianGroup
    mass: np.ndarray

    def __post_init__(self):
        mass = np.asarray(self.mass)
        if mass.shape[0] != self.group.order:
            raise ValueError(f"measure has {mass.shape[0]} masses, group order is {self.group.order}")
        object.__setattr__(self, "mass", mass)

    @property
    def total_variation(self) -> float:
        m = self.mass.reshape(self.group.order, -1)
        return float(np.sum(np.linalg.norm(m, axis=1)))

    @property
    def total_mass(self):
        return self.mass.sum(axis=0)

    def integrate(self, f):
        """``int f d sigma`` (no Haar weight)."""
        return np.tensordot(values_on(self.group, f), self.mass, axes=(0, 0))


def pushforward(sigma: SignedMeasure, phi: Map) -> SignedMeasure:
    """``sigma_phi(B) = sigma(phi^-1(B))``: sum the mass over each fiber."""
    if not phi.source.same_group(sigma.group):
        raise ValueError(f"map source {phi.source} is not the measure's group {sigma.group}")
    H = phi.target
    out = np.zeros((H.order,) + sigma.mass.shape[1:], dtype=sigma.mass.dtype)
    np.add.at(out, phi.image_indices(), sigma.mass)
    return SignedMeasure(H, out)


def measure_transform(sigma: SignedMeasure) -> SpectrumTable:
    """``sigma_hat(c) = int conj(chi_c) d sigma``."""
    T = character_table(sigma.group)
    return SpectrumTable(sigma.group, T.conj() @ sigma.mass)


def convolve_measure(G: FiniteAbelianGroup, w, sigma: SignedMeasure) -> np.ndarray:
    """Density of ``w * sigma`` against Haar: ``h(x) = sum_y w(x - y) sigma({y})``.

    Its forward transform is ``w_hat * sigma_hat``.
    """
    wv = values_on(G, w)
    sub = G.add_table[:, G.neg_table]
    return wv[sub] @ sigma.mass


def dual_hom(phi: Homomorphism) -> Homomorphism:
    """Adjoint map on duals, ``chi_c o phi = chi_{phi^*(c)}``.

    For ``phi: G -> H`` with matrix ``M`` this is ``H^ -> G^`` with
    ``phi^*(c)_i = sum_j c_j a_i M_ij / b_j  (mod a_i)``; the quotient is
    integral because ``a_i M_ij = 0 mod b_j``.
    """
    G, H = phi.source, phi.target
    M = phi.array
    a = np.asarray(G.moduli, dtype=np.int64)
    b = np.asarray(H.moduli, dtype=np.int64)
    D = (a[:, None] * M) // b[None, :] if M.size else M
    return Homomorphism(dual_group(H), dual_group(G), D.T)


def _hom_phases_ok(values: np.ndarray, D: FiniteAbelianGroup, L: int) -> np.ndarray:
    """Row-wise check that integer phases ``values[n, c]`` form a character of ``D``."""
    add = D.add_table
    lhs = values[:, add]  # (n, |D|, |D|)
    rhs = (values[:, :, None] + values[:, None, :]) % L
    return np.all((lhs == rhs).reshape(len(values), -1), axis=1)


def verify_double_dual(G: FiniteAbelianGroup, budget: int = DOUBLE_DUAL_BUDGET) -> bool:
    """Exhaustively check that ``x -> (chi -> chi(x))`` maps ``G`` onto the double dual.

    Characters of the dual are found by brute force: every assignment of an
    ``L``-th root of unity to each dual generator that annihilates its order is
    extended additively and kept only if it is a homomorphism on all pairs.
    Everything is compared as exact integer phases modulo ``L``.
    """
    if G.order > budget:
        raise RuntimeError(f"|G| = {G.order} exceeds double-dual budget {budget}")
    D = dual_group(G)
    L = _lcm(G)
    ev = _phase_table(G.moduli).T  # ev[x, c] = phase of chi_c(x)

    gen_choices = [[r for r in range(L) if (m * r) % L == 0] for m in D.moduli]
    cand = np.array(
        np.meshgrid(*gen_choices, indexing="ij"), dtype=np.int64
    ).reshape(D.rank, -1).T if D.rank else np.zeros((1, 0), dtype=np.int64)
    # extend generator values additively over the dual points
    bidual = (D.points @ cand.T).T % L if D.rank else np.zeros((1, 1), dtype=np.int64)
    bidual = bidual[_hom_phases_ok(bidual, D, L)]

    each_is_character = bool(np.all(_hom_phases_ok(ev, D, L)))
    additive = bool(np.all(ev[G.add_table] == (ev[:, None, :] + ev[None, :, :]) % L))
    injective = len(np.unique(ev, axis=0)) == G.order
    image = {tuple(r) for r in ev}
    surjective = image == {tuple(r) for r in bidual}
    return each_is_character and additive and injective and surjective
