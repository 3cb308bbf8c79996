"""Desk-scale locally compact Abelian groups.

Three kinds of domain live here:

* :class:`FiniteAbelianGroup` -- a product of cyclic groups ``Z_m1 x ... x Z_mk``
  with a stored Haar normalization (counting or probability).
* :class:`TorusGrid` -- the ``R``-point-per-axis grid on the torus ``T^d``.  It is
  the finite subgroup ``Z_R^d`` of ``T^d`` and therefore a ``FiniteAbelianGroup``
  whose quadrature weights are ``1/R^d``.
* :class:`LatticeWindow` -- the box ``[-N, N]^d`` inside ``Z^d`` with the
  lexicographic order.  It is not closed under addition; sums that leave the
  window raise :class:`WindowOverflowError`.

Elements are plain tuples of ints.  Element ``i`` of a finite group is the
mixed-radix digit expansion of ``i`` with the last coordinate varying fastest
(the order of :func:`numpy.ndindex`).
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

HAAR_MODES = ("counting", "probability")


class WindowOverflowError(ValueError):
    """A sum of window points landed outside the window."""


def _check_mode(mode):
    if mode not in HAAR_MODES:
        raise ValueError(f"unknown Haar mode {mode!r}; expected one of {HAAR_MODES}")


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """``Z_m1 x ... x Z_mk`` in the given (not canonicalized) moduli basis."""

    moduli: tuple[int, ...]
    haar: str = "probability"

    def __post_init__(self):
        moduli = tuple(int(m) for m in self.moduli)
        if any(m < 1 for m in moduli):
            raise ValueError(f"moduli must be positive, got {moduli}")
        object.__setattr__(self, "moduli", tuple(m for m in moduli if m > 1))
        _check_mode(self.haar)

    kind = "finite"
    exactness = "exact"
    ordered = False

    @property
    def rank(self) -> int:
        """Number of cyclic factors."""
        return len(self.moduli)

    @property
    def order(self) -> int:
        return math.prod(self.moduli)

    def __len__(self):
        return self.order

    @property
    def identity(self) -> tuple[int, ...]:
        return (0,) * self.rank

    def with_haar(self, mode: str) -> "FiniteAbelianGroup":
        return type(self)(self.moduli, mode)

    def same_group(self, other) -> bool:
        """True when ``other`` has the identical moduli presentation."""
        return isinstance(other, FiniteAbelianGroup) and other.moduli == self.moduli

    # -- elements -----------------------------------------------------------
    @cached_property
    def _strides(self) -> np.ndarray:
        strides = np.ones(self.rank, dtype=np.int64)
        for j in range(self.rank - 2, -1, -1):
            strides[j] = strides[j + 1] * self.moduli[j + 1]
        return strides

    @cached_property
    def points(self) -> np.ndarray:
        """All elements as an ``(order, rank)`` integer array, in index order."""
        if self.rank == 0:
            return np.zeros((1, 0), dtype=np.int64)
        grids = np.indices(self.moduli, dtype=np.int64).reshape(self.rank, -1)
        pts = grids.T.copy()
        pts.setflags(write=False)
        return pts

    def elements(self) -> list[tuple[int, ...]]:
        return [tuple(int(c) for c in row) for row in self.points]

    def element(self, coords: Iterable[int]) -> tuple[int, ...]:
        """Validate the length of ``coords`` and reduce it into the group."""
        coords = tuple(int(c) for c in coords)
        if len(coords) != self.rank:
            raise ValueError(
                f"element {coords} has {len(coords)} coordinates, group {self} has {self.rank}"
            )
        return tuple(c % m for c, m in zip(coords, self.moduli))

    def index(self, coords) -> np.ndarray | int:
        """Mixed-radix index of one element or of each row of an array."""
        arr = np.asarray(coords, dtype=np.int64)
        if arr.shape[-1:] != (self.rank,) and not (self.rank == 0 and arr.size == 0):
            raise ValueError(f"coordinate shape {arr.shape} does not match rank {self.rank}")
        reduced = np.mod(arr, self.moduli) if self.rank else arr
        idx = reduced @ self._strides if self.rank else np.zeros(arr.shape[:-1], dtype=np.int64)
        return int(idx) if np.ndim(idx) == 0 else idx

    def from_index(self, i: int) -> tuple[int, ...]:
        return tuple(int(c) for c in self.points[i])

    # -- arithmetic ---------------------------------------------------------
    def add(self, a, b) -> tuple[int, ...]:
        a, b = self.element(a), self.element(b)
        return tuple((x + y) % m for x, y, m in zip(a, b, self.moduli))

    def neg(self, a) -> tuple[int, ...]:
        a = self.element(a)
        return tuple((-x) % m for x, m in zip(a, self.moduli))

    def sub(self, a, b) -> tuple[int, ...]:
        return self.add(a, self.neg(b))

    @cached_property
    def add_table(self) -> np.ndarray:
        """``add_table[i, j]`` is the index of ``element(i) + element(j)``."""
        pts = self.points
        summed = pts[:, None, :] + pts[None, :, :]
        return self.index(summed)

    @cached_property
    def neg_table(self) -> np.ndarray:
        return self.index(-self.points)

    # -- Haar measure -------------------------------------------------------
    def haar_weight(self, mode: str | None = None) -> float:
        mode = mode or self.haar
        _check_mode(mode)
        return 1.0 if mode == "counting" else 1.0 / self.order

    def haar_fraction(self, mode: str | None = None) -> Fraction:
        mode = mode or self.haar
        _check_mode(mode)
        return Fraction(1) if mode == "counting" else Fraction(1, self.order)

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.order, self.haar_weight())

    def embed(self, coords) -> np.ndarray:
        """Fixed real embedding ``x_j / m_j`` used by coordinate activations."""
        return np.asarray(coords, dtype=float) / np.asarray(self.moduli, dtype=float)

    def __str__(self):
        return "x".join(f"Z{m}" for m in self.moduli) or "Z1"


class TorusGrid(FiniteAbelianGroup):
    """``R`` equally spaced points per axis on ``T^d``; Haar mass ``1/R^d`` each."""

    kind = "torus_grid"
    exactness = "quadrature"

    def __init__(self, dims: int, resolution: int):
        if dims < 1 or resolution < 1:
            raise ValueError("torus grid needs dims >= 1 and resolution >= 1")
        super().__init__((resolution,) * dims, "probability")
        object.__setattr__(self, "dims", int(dims))
        object.__setattr__(self, "resolution", int(resolution))

    def __eq__(self, other):
        return isinstance(other, TorusGrid) and (other.dims, other.resolution) == (
            self.dims,
            self.resolution,
        )

    def __hash__(self):
        return hash(("torus", self.dims, self.resolution))

    def __repr__(self):
        return f"TorusGrid(dims={self.dims}, resolution={self.resolution})"

    def with_haar(self, mode):
        if mode != "probability":
            raise ValueError("torus grids carry probability (quadrature) weights only")
        return self

    @property
    def positions(self) -> np.ndarray:
        """Grid points as fractions of a turn, ``(j_1/R, ..., j_d/R)``."""
        return self.points / self.resolution

    @property
    def weight_fraction(self) -> Fraction:
        return Fraction(1, self.resolution**self.dims)

    def embed(self, coords):
        """Angle embedding ``2*pi*j/R``."""
        return 2 * np.pi * np.asarray(coords, dtype=float) / self.resolution

    def __str__(self):
        return f"T{self.dims}@{self.resolution}"


@dataclass(frozen=True)
class LatticeWindow:
    """The box ``[-radius, radius]^dims`` of ``Z^dims``, lexicographically ordered.

    Haar measure of ``Z^d`` is counting measure, so every point weighs 1.
    """

    dims: int
    radius: int
    haar: str = field(default="counting", init=False)

    kind = "lattice_window"
    exactness = "exact"
    ordered = True

    def __post_init__(self):
        if self.dims < 1 or self.radius < 0:
            raise ValueError("lattice window needs dims >= 1 and radius >= 0")

    @property
    def rank(self):
        return self.dims

    @property
    def order(self):
        return (2 * self.radius + 1) ** self.dims

    def __len__(self):
        return self.order

    @property
    def identity(self):
        return (0,) * self.dims

    @cached_property
    def points(self) -> np.ndarray:
        side = np.arange(-self.radius, self.radius + 1, dtype=np.int64)
        grid = np.array(list(itertools.product(side, repeat=self.dims)), dtype=np.int64)
        grid.setflags(write=False)
        return grid

    @property
    def weights(self):
        return np.ones(self.order)

    def haar_weight(self, mode=None):
        return 1.0

    def contains(self, coords) -> bool:
        arr = np.asarray(coords)
        return arr.shape == (self.dims,) and bool(np.all(np.abs(arr) <= self.radius))

    def element(self, coords):
        coords = tuple(int(c) for c in coords)
        if len(coords) != self.dims:
            raise ValueError(f"element {coords} does not have {self.dims} coordinates")
        if not self.contains(coords):
            raise WindowOverflowError(f"{coords} lies outside {self}")
        return coords

    def index(self, coords):
        """Index of in-window points; raises for points outside the window."""
        arr = np.asarray(coords, dtype=np.int64)
        if arr.shape[-1] != self.dims:
            raise ValueError(f"coordinate shape {arr.shape} does not match dims {self.dims}")
        if np.any(np.abs(arr) > self.radius):
            raise WindowOverflowError(f"points outside {self}")
        side = 2 * self.radius + 1
        strides = side ** np.arange(self.dims - 1, -1, -1, dtype=np.int64)
        idx = (arr + self.radius) @ strides
        return int(idx) if np.ndim(idx) == 0 else idx

    def add(self, a, b):
        a, b = self.element(a), self.element(b)
        return self.element(x + y for x, y in zip(a, b))

    def neg(self, a):
        return tuple(-x for x in self.element(a))

    def less(self, a, b) -> bool:
        """Strict lexicographic order."""
        return tuple(a) < tuple(b)

    def embed(self, coords):
        return np.asarray(coords, dtype=float)

    def __str__(self):
        return f"W{self.dims}@{self.radius}"


def make_group(moduli: Sequence[int], haar: str = "probability") -> FiniteAbelianGroup:
    """Build ``Z_m1 x ... x Z_mk``; factors of modulus 1 are dropped.

    >>> make_group([1, 3]).moduli
    (3,)
    """
    return FiniteAbelianGroup(tuple(moduli), haar)


_SPEC_FINITE = re.compile(r"^Z\d+(xZ\d+)*$")
_SPEC_SAMPLED = re.compile(r"^([TW])(\d+)@(\d+)$")


def parse_group(spec: str, haar: str = "probability"):
    """Parse ``"Z4xZ6"``, ``"T1@64"`` (torus dim 1, resolution 64) or ``"W2@5"``."""
    spec = spec.strip()
    if _SPEC_FINITE.match(spec):
        return make_group([int(t) for t in spec[1:].split("xZ")], haar)
    m = _SPEC_SAMPLED.match(spec)
    if m:
        kind, dims, size = m.group(1), int(m.group(2)), int(m.group(3))
        return TorusGrid(dims, size) if kind == "T" else LatticeWindow(dims, size)
    raise ValueError(f"cannot parse group spec {spec!r}")


def values_on(G, f) -> np.ndarray:
    """Tabulate ``f`` over the points of ``G`` (arrays pass through)."""
    if callable(f):
        return np.array([f(tuple(int(c) for c in row)) for row in G.points])
    arr = np.asarray(f)
    if arr.shape[0] != G.order:
        raise ValueError(f"table of length {arr.shape[0]} does not match |G|={G.order}")
    return arr


def haar_integrate(G, f: Callable | np.ndarray, mode: str | None = None):
    """``sum_x f(x) w(x)`` with the Haar (or quadrature) weights of ``G``."""
    vals = values_on(G, f)
    if isinstance(G, FiniteAbelianGroup) and not isinstance(G, TorusGrid):
        w = np.full(G.order, G.haar_weight(mode))
    else:
        w = G.weights
    return np.tensordot(w, vals, axes=(0, 0))


def haar_measure(G: FiniteAbelianGroup, subset, mode: str | None = None) -> float:
    """Haar mass of a set of elements."""
    idx = {G.index(G.element(b)) for b in subset}
    return len(idx) * G.haar_weight(mode)


def translate_set(G: FiniteAbelianGroup, subset, g) -> list[tuple[int, ...]]:
    return [G.add(g, b) for b in subset]


def check_haar_invariance(G: FiniteAbelianGroup, subset, g, mode: str | None = None) -> bool:
    """True iff ``m(B) == m(g + B)``."""
    return haar_measure(G, subset, mode) == haar_measure(G, translate_set(G, subset, g), mode)


def haar_invariance_violations(G: FiniteAbelianGroup, masks: np.ndarray, shifts: np.ndarray) -> int:
    """Count ``(B, g)`` pairs with ``m(B) != m(g + B)``.

    ``masks`` is a boolean ``(n_sets, |G|)`` membership matrix and ``shifts`` an
    array of element indices.  The translate ``g + B`` is rebuilt from the
    addition table, so the check does not assume translation is a bijection.
    """
    masks = np.asarray(masks, dtype=bool)
    w = G.haar_weight()
    base = masks.sum(axis=1) * w
    bad = 0
    for g in np.asarray(shifts).reshape(-1):
        translated = np.zeros_like(masks)
        rows, cols = np.nonzero(masks)
        translated[rows, G.add_table[g, cols]] = True
        bad += int(np.count_nonzero(translated.sum(axis=1) * w != base))
    return bad


def invariant_factor_groups(order: int) -> list[tuple[int, ...]]:
    """Invariant-factor moduli ``d1 | d2 | ... | dk`` for every group of ``order``.

    One presentation per isomorphism class.
    """
    out = []

    def rec(remaining, prev, acc):
        if remaining == 1:
            out.append(tuple(acc))
            return
        for d in range(prev, remaining + 1):
            if remaining % d == 0 and (not acc or d % acc[-1] == 0):
                # remaining factors must all be multiples of d
                rest = remaining // d
                if rest == 1 or rest % d == 0:
                    rec(rest, d, acc + [d])

    if order == 1:
        return [()]
    rec(order, 2, [])
    return out


def moduli_lists(max_order: int) -> list[tuple[int, ...]]:
    """Every ordered list of moduli ``>= 2`` with product ``<= max_order``."""
    out = [()]

    def rec(prod, acc):
        for m in range(2, max_order // prod + 1):
            nxt = acc + (m,)
            out.append(nxt)
            rec(prod * m, nxt)

    rec(1, ())
    return out
