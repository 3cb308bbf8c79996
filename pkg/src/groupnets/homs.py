"""Homomorphisms, affine maps and the map families networks draw from.

A homomorphism ``Z_a1 x ... x Z_ak -> Z_b1 x ... x Z_bl`` is stored as the
integer matrix whose row ``i`` is the image of the ``i``-th source generator.
Row ``i`` is admissible iff ``a_i * M[i, j] == 0 (mod b_j)`` for every ``j``,
which leaves ``gcd(a_i, b_j)`` choices per entry.  Points are row vectors, so
``phi(x) = x @ M  (mod b)``.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

from .groups import FiniteAbelianGroup, LatticeWindow, TorusGrid, parse_group

ENUMERATION_BUDGET = 1 << 16


class EnumerationBudgetError(RuntimeError):
    """A family is too large to list; draw from it with :func:`sample_map` instead."""


def _as_matrix(matrix, k, l) -> np.ndarray:
    arr = np.asarray(matrix, dtype=np.int64)
    if arr.size == 0:
        arr = arr.reshape(k, l)
    if arr.shape != (k, l):
        raise ValueError(f"matrix shape {arr.shape} does not match generator counts ({k}, {l})")
    return arr


def validate_hom(matrix, G: FiniteAbelianGroup, H: FiniteAbelianGroup) -> bool:
    """True iff ``matrix`` defines a homomorphism ``G -> H``.

    >>> validate_hom([[3]], make_group([4]), make_group([6]))
    True
    >>> validate_hom([[1]], make_group([4]), make_group([6]))
    False
    """
    M = _as_matrix(matrix, G.rank, H.rank)
    a = np.asarray(G.moduli, dtype=np.int64)[:, None]
    b = np.asarray(H.moduli, dtype=np.int64)[None, :]
    return bool(np.all((a * M) % b == 0))


def _freeze(M: np.ndarray) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(v) for v in row) for row in M)


@dataclass(frozen=True)
class Homomorphism:
    source: FiniteAbelianGroup
    target: FiniteAbelianGroup
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        a, b = self.source.moduli, self.target.moduli
        rows = self.matrix.tolist() if isinstance(self.matrix, np.ndarray) else self.matrix
        rows = [list(r) for r in rows] if len(a) else []
        if len(rows) != len(a) or any(len(r) != len(b) for r in rows):
            _as_matrix(self.matrix, len(a), len(b))  # raises with the shape message
        frozen = tuple(tuple(int(v) % bj for v, bj in zip(r, b)) for r in rows)
        for ai, r in zip(a, frozen):
            if any((ai * v) % bj for v, bj in zip(r, b)):
                raise ValueError(f"{frozen} is not a homomorphism {self.source} -> {self.target}")
        object.__setattr__(self, "matrix", frozen)

    @classmethod
    def identity(cls, G):
        return cls(G, G, np.eye(G.rank, dtype=np.int64))

    @classmethod
    def zero(cls, G, H):
        return cls(G, H, np.zeros((G.rank, H.rank), dtype=np.int64))

    @classmethod
    def scalar(cls, G, c: int):
        """Multiplication by ``c`` on every coordinate."""
        return cls(G, G, c * np.eye(G.rank, dtype=np.int64))

    @property
    def array(self) -> np.ndarray:
        return _as_matrix(self.matrix, self.source.rank, self.target.rank)

    @property
    def hom(self) -> "Homomorphism":
        return self

    @property
    def shift(self):
        return self.target.identity

    def __call__(self, x):
        return apply(self, x)

    def images(self) -> np.ndarray:
        """Image coordinates of every source point, ``(|G|, target.rank)``."""
        if self.target.rank == 0:
            return np.zeros((self.source.order, 0), dtype=np.int64)
        return (self.source.points @ self.array) % np.asarray(self.target.moduli)

    def image_indices(self) -> np.ndarray:
        return self.target.index(self.images())


@dataclass(frozen=True)
class AffineMap:
    """``x -> hom(x) + shift``."""

    hom: Homomorphism
    shift: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "shift", self.hom.target.element(self.shift))

    @classmethod
    def translation(cls, G, shift):
        return cls(Homomorphism.identity(G), shift)

    @property
    def source(self):
        return self.hom.source

    @property
    def target(self):
        return self.hom.target

    @property
    def matrix(self):
        return self.hom.matrix

    @property
    def array(self):
        return self.hom.array

    def __call__(self, x):
        return apply(self, x)

    def images(self):
        if self.target.rank == 0:
            return self.hom.images()
        return (self.hom.images() + np.asarray(self.shift)) % np.asarray(self.target.moduli)

    def image_indices(self):
        return self.target.index(self.images())


@dataclass(frozen=True)
class LatticeAffineMap:
    """Integer affine map ``x -> x @ M + s`` from a lattice window into ``Z^d``.

    Images are not confined to the window; activations evaluate them in the
    ambient lattice.
    """

    source: LatticeWindow
    matrix: tuple[tuple[int, ...], ...]
    shift: tuple[int, ...]

    def __post_init__(self):
        d = self.source.dims
        object.__setattr__(self, "matrix", _freeze(_as_matrix(self.matrix, d, d)))
        shift = tuple(int(s) for s in self.shift)
        if len(shift) != d:
            raise ValueError(f"shift {shift} does not have {d} coordinates")
        object.__setattr__(self, "shift", shift)

    @property
    def target(self):
        return self.source

    @property
    def array(self):
        return np.asarray(self.matrix, dtype=np.int64)

    def __call__(self, x):
        return apply(self, x)

    def images(self):
        return self.source.points @ self.array + np.asarray(self.shift, dtype=np.int64)


Map = Union[Homomorphism, AffineMap, LatticeAffineMap]


def apply(phi: Map, x) -> tuple[int, ...]:
    """Evaluate a map at one point.

    >>> apply(Homomorphism.scalar(make_group([8]), 3), (5,))
    (7,)
    """
    if isinstance(phi, LatticeAffineMap):
        x = phi.source.element(x)
        y = np.asarray(x, dtype=np.int64) @ phi.array + np.asarray(phi.shift, dtype=np.int64)
        return tuple(int(v) for v in y)
    x = phi.source.element(x)
    y = np.asarray(x, dtype=np.int64) @ phi.array if phi.source.rank else np.zeros(phi.target.rank, dtype=np.int64)
    return phi.target.element(y + np.asarray(phi.shift, dtype=np.int64))


def compose(f: Map, g: Map) -> Map:
    """``f o g``; affine if either factor is."""
    if not f.source.same_group(g.target):
        raise ValueError(f"cannot compose: target {g.target} of g is not source {f.source} of f")
    G, H = g.source, f.target
    if G.rank == 0 or H.rank == 0:
        M = np.zeros((G.rank, H.rank), dtype=np.int64)
    else:
        M = g.array @ f.array
    hom = Homomorphism(G, H, M)
    if isinstance(f, Homomorphism) and isinstance(g, Homomorphism):
        return hom
    return AffineMap(hom, f(g.shift))


def is_automorphism(f: Homomorphism) -> bool:
    """True iff ``f`` is an endomorphism with trivial kernel."""
    if not f.source.same_group(f.target):
        raise ValueError("automorphisms need source == target")
    img = f.image_indices()
    return len(np.unique(img)) == f.source.order


# -- enumeration ------------------------------------------------------------

def hom_count(G: FiniteAbelianGroup, H: FiniteAbelianGroup) -> int:
    """``|Hom(G, H)| = prod_{i,j} gcd(a_i, b_j)``."""
    return math.prod(math.gcd(a, b) for a in G.moduli for b in H.moduli)


def hom_matrices(G, H, budget: int = ENUMERATION_BUDGET) -> np.ndarray:
    """Every homomorphism ``G -> H`` as a stacked ``(N, k, l)`` matrix array."""
    n = hom_count(G, H)
    if n > budget:
        raise EnumerationBudgetError(
            f"|Hom({G}, {H})| = {n} exceeds budget {budget}; use sample_map"
        )
    k, l = G.rank, H.rank
    if k * l == 0:
        return np.zeros((1, k, l), dtype=np.int64)
    counts = [math.gcd(a, b) for a in G.moduli for b in H.moduli]
    steps = np.array([b // math.gcd(a, b) for a in G.moduli for b in H.moduli], dtype=np.int64)
    digits = np.indices(counts, dtype=np.int64).reshape(len(counts), -1).T
    return (digits * steps).reshape(-1, k, l)


def stacked_image_indices(G, H, matrices: np.ndarray) -> np.ndarray:
    """``(N, |G|)`` target indices of every point under each matrix."""
    if H.rank == 0:
        return np.zeros((len(matrices), G.order), dtype=np.int64)
    imgs = np.einsum("pk,nkl->npl", G.points, matrices) % np.asarray(H.moduli)
    return H.index(imgs)


def _bijective_rows(index_table: np.ndarray) -> np.ndarray:
    srt = np.sort(index_table, axis=1)
    return np.all(srt == np.arange(index_table.shape[1]), axis=1)


def enumerate_homs(G, H, budget: int = ENUMERATION_BUDGET) -> list[Homomorphism]:
    return [Homomorphism(G, H, M) for M in hom_matrices(G, H, budget).tolist()]


def automorphism_matrices(G, budget: int = ENUMERATION_BUDGET) -> np.ndarray:
    mats = hom_matrices(G, G, budget)
    keep = _bijective_rows(stacked_image_indices(G, G, mats))
    return mats[keep]


def enumerate_automorphisms(G, budget: int = ENUMERATION_BUDGET) -> list[Homomorphism]:
    return [Homomorphism(G, G, M) for M in automorphism_matrices(G, budget).tolist()]


# -- families ---------------------------------------------------------------

FAMILY_KINDS = (
    "aut",
    "end",
    "hom",
    "affine-end",
    "affine-aut",
    "translations",
    "torus-linear",
    "affine-torus",
)


@dataclass(frozen=True)
class FamilySpec:
    """A family of maps out of a group.

    ``target`` is the codomain spec for ``hom`` families.  ``k_max`` bounds the
    integer matrix entries of torus and lattice-window families; ``shift_max``
    bounds window shifts (default ``2 * radius + 1``).
    """

    kind: str
    target: str | None = None
    k_max: int | None = None
    shift_max: int | None = None
    budget: int = ENUMERATION_BUDGET
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}")
        if self.kind == "hom" and self.target is None:
            raise ValueError("hom family needs a target group")
        if self.kind in ("torus-linear", "affine-torus") and self.k_max is None:
            raise ValueError(f"{self.kind} family needs K")

    def __str__(self):
        if self.kind == "hom":
            return f"hom:{self.target}"
        params = []
        if self.k_max is not None:
            params.append(f"K={self.k_max}")
        if self.shift_max is not None:
            params.append(f"S={self.shift_max}")
        return self.kind + (":" + ",".join(params) if params else "")

    @property
    def affine(self) -> bool:
        return self.kind in ("affine-end", "affine-aut", "translations", "affine-torus")

    def target_group(self, G):
        if self.kind == "hom":
            return parse_group(self.target, getattr(G, "haar", "probability"))
        return G


_PARAM = re.compile(r"^([KS])=(-?\d+)$")


def parse_family(spec: str, **kwargs) -> FamilySpec:
    """Parse ``"aut"``, ``"affine-end"``, ``"hom:Z2xZ2"``, ``"torus-linear:K=8"``..."""
    spec = spec.strip().lower()
    kind, _, rest = spec.partition(":")
    if kind == "hom":
        if not rest:
            raise ValueError("hom family needs a target, e.g. hom:Z2xZ2")
        return FamilySpec("hom", target=rest.upper().replace("X", "x"), **kwargs)
    params = {}
    for item in filter(None, rest.split(",")):
        m = _PARAM.match(item.upper())
        if not m:
            raise ValueError(f"bad family parameter {item!r} in {spec!r}")
        params["k_max" if m.group(1) == "K" else "shift_max"] = int(m.group(2))
    return FamilySpec(kind, **params, **kwargs)


def _window_bounds(G: LatticeWindow, family: FamilySpec):
    k = 1 if family.k_max is None else family.k_max
    s = 2 * G.radius + 1 if family.shift_max is None else family.shift_max
    return k, s


def _window_matrices(G: LatticeWindow, family: FamilySpec) -> list[np.ndarray]:
    d = G.dims
    k, _ = _window_bounds(G, family)
    if family.kind == "translations":
        return [np.eye(d, dtype=np.int64)]
    vals = range(-k, k + 1)
    mats = [np.array(m, dtype=np.int64).reshape(d, d) for m in itertools.product(vals, repeat=d * d)]
    if family.kind in ("aut", "affine-aut"):
        mats = [m for m in mats if round(abs(np.linalg.det(m))) == 1]
    return mats


def _window_shifts(G, family):
    if family.kind in ("end", "aut"):
        return [(0,) * G.dims]
    _, s = _window_bounds(G, family)
    return list(itertools.product(range(-s, s + 1), repeat=G.dims))


def _torus_matrices(G: TorusGrid, family: FamilySpec) -> np.ndarray:
    d, R, K = G.dims, G.resolution, family.k_max
    raw = np.array(list(itertools.product(range(-K, K + 1), repeat=d * d)), dtype=np.int64)
    reduced = np.unique(raw % R, axis=0)
    return reduced.reshape(-1, d, d)


def family_size(G, family: FamilySpec) -> int:
    """Number of distinct maps in ``family`` on ``G``."""
    if isinstance(G, LatticeWindow):
        if family.kind not in ("aut", "end", "affine-end", "affine-aut", "translations"):
            raise ValueError(f"family {family} is not defined on lattice windows")
        k, s = _window_bounds(G, family)
        n_shift = 1 if family.kind in ("end", "aut") else (2 * s + 1) ** G.dims
        if family.kind in ("aut", "affine-aut"):
            n_mat = len(_window_matrices(G, family))
        elif family.kind == "translations":
            n_mat = 1
        else:
            n_mat = (2 * k + 1) ** (G.dims**2)
        return n_mat * n_shift
    kind = family.kind
    if kind in ("torus-linear", "affine-torus"):
        if not isinstance(G, TorusGrid):
            raise ValueError(f"family {family} needs a torus grid, got {G}")
        n = len(_torus_matrices(G, family))
        return n * (G.order if kind == "affine-torus" else 1)
    if kind == "translations":
        return G.order
    if kind in ("end", "affine-end"):
        return hom_count(G, G) * (G.order if kind == "affine-end" else 1)
    if kind == "hom":
        return hom_count(G, family.target_group(G))
    n_aut = len(automorphism_matrices(G, family.budget))
    return n_aut * (G.order if kind == "affine-aut" else 1)


def _finite_matrices(G, family) -> np.ndarray:
    kind = family.kind
    if kind == "translations":
        return np.eye(G.rank, dtype=np.int64)[None]
    if kind in ("end", "affine-end"):
        return hom_matrices(G, G, family.budget)
    if kind in ("aut", "affine-aut"):
        return automorphism_matrices(G, family.budget)
    if kind == "hom":
        return hom_matrices(G, family.target_group(G), family.budget)
    return _torus_matrices(G, family)


def enumerate_family(G, family: FamilySpec) -> list[Map]:
    """All maps of ``family`` on ``G`` in a fixed order (matrix-major, then shift)."""
    return list(_enumerate_family_cached(G, family))


@lru_cache(maxsize=32)
def _enumerate_family_cached(G, family: FamilySpec) -> tuple:
    n = family_size(G, family)
    if n > family.budget:
        raise EnumerationBudgetError(
            f"family {family} on {G} has {n} maps, budget {family.budget}; use sample_map"
        )
    if isinstance(G, LatticeWindow):
        return tuple(
            LatticeAffineMap(G, M, s)
            for M in _window_matrices(G, family)
            for s in _window_shifts(G, family)
        )
    H = family.target_group(G)
    homs = tuple(Homomorphism(G, H, M) for M in _finite_matrices(G, family).tolist())
    if not family.affine:
        return homs
    return tuple(AffineMap(h, s) for h in homs for s in G.elements())


def family_image_indices(G, family: FamilySpec, maps=None) -> np.ndarray:
    """``(n_maps, |G|)`` target indices for a finite-target family (vectorized)."""
    if maps is None:
        maps = enumerate_family(G, family)
    if not maps:
        return np.zeros((0, G.order), dtype=np.int64)
    H = maps[0].target
    mats = np.stack([m.array for m in maps]) if G.rank and H.rank else np.zeros((len(maps), G.rank, H.rank), dtype=np.int64)
    if H.rank == 0:
        return np.zeros((len(maps), G.order), dtype=np.int64)
    shifts = np.array([m.shift for m in maps], dtype=np.int64).reshape(len(maps), 1, H.rank)
    imgs = (np.einsum("pk,nkl->npl", G.points, mats) + shifts) % np.asarray(H.moduli)
    return H.index(imgs)


def _sample_hom_matrix(G, H, rng) -> np.ndarray:
    M = np.zeros((G.rank, H.rank), dtype=np.int64)
    for i, a in enumerate(G.moduli):
        for j, b in enumerate(H.moduli):
            g = math.gcd(a, b)
            M[i, j] = (b // g) * rng.integers(g)
    return M


def sample_map(family: FamilySpec, G, rng: np.random.Generator) -> Map:
    """Draw one map uniformly from ``family`` on ``G``.

    Automorphisms come from rejection sampling of uniform endomorphisms, which
    is uniform on ``Aut(G)`` without listing it.  Torus families draw each
    matrix entry uniformly from ``[-K, K]`` before reduction.
    """
    kind = family.kind
    if isinstance(G, LatticeWindow):
        mats = _window_matrices(G, family)
        if not mats:
            raise ValueError(f"family {family} on {G} is empty")
        M = mats[rng.integers(len(mats))]
        shifts = _window_shifts(G, family)
        return LatticeAffineMap(G, M, shifts[rng.integers(len(shifts))])
    H = family.target_group(G)
    if kind == "translations":
        hom = Homomorphism.identity(G)
    elif kind in ("end", "affine-end", "hom"):
        hom = Homomorphism(G, H, _sample_hom_matrix(G, H, rng))
    elif kind in ("aut", "affine-aut"):
        while True:
            hom = Homomorphism(G, G, _sample_hom_matrix(G, G, rng))
            if is_automorphism(hom):
                break
    else:
        if not isinstance(G, TorusGrid):
            raise ValueError(f"family {family} needs a torus grid, got {G}")
        K = family.k_max
        hom = Homomorphism(G, G, rng.integers(-K, K + 1, size=(G.rank, G.rank)))
    if not family.affine:
        return hom
    shift = G.from_index(int(rng.integers(G.order)))
    return AffineMap(hom, shift)


# -- serialization ----------------------------------------------------------

def map_to_dict(phi: Map) -> dict:
    out = {
        "source": str(phi.source),
        "target": str(phi.target),
        "matrix": [list(row) for row in phi.matrix],
    }
    if not isinstance(phi, Homomorphism):
        out["shift"] = list(phi.shift)
    return out


def map_from_dict(data: dict, haar: str = "probability") -> Map:
    G = parse_group(data["source"], haar)
    if isinstance(G, LatticeWindow):
        return LatticeAffineMap(G, data["matrix"], data.get("shift", (0,) * G.dims))
    H = parse_group(data["target"], haar)
    hom = Homomorphism(G, H, _as_matrix(data["matrix"], G.rank, H.rank))
    if "shift" in data:
        return AffineMap(hom, data["shift"])
    return hom
