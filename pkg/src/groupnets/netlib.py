"""Group neural networks ``F(x) = sum_i alpha_i psi(phi_i(x))`` and their fitting.

Each term carries its own map ``phi_i``; :func:`build_dictionary` and
:func:`greedy_select` also offer a ``shared_map`` mode that reuses one map
for every term, whose span is one-dimensional.

Activations read a group element through a fixed real embedding: ``x_j / m_j``
on finite groups, the angle ``2 pi j / R`` on torus grids and the raw integer
coordinates on lattice windows.  Scalar coordinate activations (logistic,
tanh) see ``scale * sum_j embed_j(x) + bias``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .groups import FiniteAbelianGroup, LatticeWindow, parse_group, values_on
from .homs import (
    FamilySpec,
    enumerate_family,
    family_image_indices,
    family_size,
    map_from_dict,
    map_to_dict,
    sample_map,
)

RANK_TOL = 1e-9
EMBEDDING_VERSION = 1


class ConfigurationError(ValueError):
    """An activation was paired with a domain it is not defined on."""


# -- activations ------------------------------------------------------------

@dataclass(frozen=True)
class Activation:
    """``psi: H -> X``; ``rule(coords, space)`` maps an ``(n, k)`` coordinate array
    to ``(n,)`` scalars or ``(n, dim)`` vectors."""

    name: str
    rule: Callable[[np.ndarray, Any], np.ndarray] = field(compare=False, repr=False)
    params: tuple = ()
    bounded: bool = True
    nonconstant: bool = True
    requires_order: bool = False
    nonnegative: bool = False
    needs_finite: bool = False

    def check(self, space):
        if self.requires_order and not getattr(space, "ordered", False):
            raise ConfigurationError(f"activation {self.name} needs an ordered domain, got {space}")
        if self.needs_finite and not isinstance(space, FiniteAbelianGroup):
            raise ConfigurationError(f"activation {self.name} is defined on finite groups only, got {space}")

    def __call__(self, coords, space) -> np.ndarray:
        self.check(space)
        coords = np.atleast_2d(np.asarray(coords, dtype=np.int64))
        return np.asarray(self.rule(coords, space))

    def table(self, space) -> np.ndarray:
        """Values at every point of ``space``."""
        return self(space.points, space)

    @property
    def spec(self) -> str:
        if not self.params:
            return self.name
        return self.name + ":" + ",".join(repr(p) if isinstance(p, float) else str(p) for p in self.params)


def _scalar_embedding(coords, space, scale, bias):
    return scale * space.embed(coords).sum(axis=1) + bias


def logistic(scale: float = 6.0, bias: float = -3.0) -> Activation:
    def rule(coords, space):
        return 1.0 / (1.0 + np.exp(-_scalar_embedding(coords, space, scale, bias)))

    return Activation("logistic", rule, (float(scale), float(bias)), nonnegative=True)


def tanh(scale: float = 6.0, bias: float = -3.0) -> Activation:
    def rule(coords, space):
        return np.tanh(_scalar_embedding(coords, space, scale, bias))

    return Activation("tanh", rule, (float(scale), float(bias)))


def _phase(coords, space, freq):
    freq = np.asarray(freq, dtype=float)
    if freq.shape != (space.rank,):
        raise ConfigurationError(f"frequency {tuple(freq)} does not match {space}")
    return 2 * np.pi * (coords / np.asarray(space.moduli, dtype=float)) @ freq


def cosine(*freq: int) -> Activation:
    """Real part of the character ``chi_freq``."""
    return Activation(
        "cosine", lambda c, s: np.cos(_phase(c, s, freq)), tuple(int(f) for f in freq), needs_finite=True
    )


def character(*freq: int) -> Activation:
    """The complex character ``chi_freq`` itself."""
    return Activation(
        "character", lambda c, s: np.exp(1j * _phase(c, s, freq)), tuple(int(f) for f in freq), needs_finite=True
    )


def delta0() -> Activation:
    """Indicator of the identity."""
    return Activation("delta0", lambda c, s: np.all(c == 0, axis=1).astype(float), nonnegative=True)


def _lex_positive(coords):
    nz = coords != 0
    first = np.argmax(nz, axis=1)
    lead = coords[np.arange(len(coords)), first]
    return nz.any(axis=1) & (lead > 0)


def _relu_rule(slope):
    def rule(coords, space):
        pos = _lex_positive(coords)
        out = np.where(pos[:, None], coords, slope * coords).astype(float)
        return out[:, 0] if coords.shape[1] == 1 else out

    return rule


def relu() -> Activation:
    """``max(x, 0)`` in the lexicographic order (vector valued when ``d > 1``)."""
    return Activation("relu", _relu_rule(0.0), bounded=False, requires_order=True, nonnegative=True)


def leaky_relu(slope: float = 0.1) -> Activation:
    return Activation("leaky-relu", _relu_rule(float(slope)), (float(slope),), bounded=False, requires_order=True)


def table(values: Sequence, name: str = "table") -> Activation:
    """Activation given by its value at each element index of a finite group."""
    vals = np.asarray(values)
    frozen = tuple(complex(v) if np.iscomplexobj(vals) else float(v) for v in vals.reshape(-1))
    if vals.ndim != 1:
        raise ValueError("table activations are scalar valued")

    def rule(coords, space):
        if space.order != len(vals):
            raise ConfigurationError(f"table of length {len(vals)} does not fit {space}")
        return vals[space.index(coords)]

    return Activation(
        name,
        rule,
        frozen,
        nonconstant=bool(np.any(vals != vals[0])),
        nonnegative=bool(np.isrealobj(vals) and np.all(vals >= 0)),
        needs_finite=True,
    )


def random_table(G, rng: np.random.Generator, low=-1.0, high=1.0) -> Activation:
    """Bounded non-constant random table activation on ``G`` (order >= 2)."""
    if G.order < 2:
        raise ValueError("no non-constant function on the trivial group")
    while True:
        vals = rng.uniform(low, high, size=G.order)
        if np.ptp(vals) > 0:
            return table(vals, "random")


def activation_from_spec(spec: str) -> Activation:
    """``logistic``, ``tanh``, ``delta0``, ``relu``, ``leaky-relu:0.1``,
    ``cosine:1,0``, ``character:1``, ``table:1,1,0,0``; optional numeric
    parameters follow the colon."""
    name, _, rest = spec.strip().partition(":")
    args = [a for a in rest.split(",") if a]
    if name in ("cosine", "character"):
        return {"cosine": cosine, "character": character}[name](*(int(a) for a in args))
    if name in ("table", "random"):
        return table([complex(a) if "j" in a else float(a) for a in args], name)
    ctor = {"logistic": logistic, "tanh": tanh, "delta0": delta0, "relu": relu, "leaky-relu": leaky_relu}
    if name not in ctor:
        raise ValueError(f"unknown activation {spec!r}")
    return ctor[name](*(float(a) for a in args))


# -- networks ---------------------------------------------------------------

def _map_values(act: Activation, phi) -> np.ndarray:
    return act(phi.images(), phi.target)


@dataclass(frozen=True)
class GroupNetwork:
    """``F(x) = sum_i alpha_i psi(map_i(x))``; no terms is the zero function."""

    group: Any
    activation: Activation
    terms: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((a, m) for a, m in self.terms))
        for _, phi in self.terms:
            if not _same_domain(phi.source, self.group):
                raise ValueError(f"term map on {phi.source} does not start at {self.group}")

    def evaluate(self) -> np.ndarray:
        """``F`` at every point of the group."""
        out = 0
        for alpha, phi in self.terms:
            out = out + alpha * _map_values(self.activation, phi)
        if isinstance(out, int):
            return np.zeros(self.group.order)
        return out

    def __call__(self, x):
        return eval_network(self, x)

    def to_dict(self) -> dict:
        return {
            "group": str(self.group),
            "activation": {"name": self.activation.name, "params": list(_jsonable(self.activation.params))},
            "terms": [{"alpha": _jsonable_scalar(a), "map": map_to_dict(m)} for a, m in self.terms],
        }

    @classmethod
    def from_dict(cls, data: dict, haar: str = "probability") -> "GroupNetwork":
        G = parse_group(data["group"], haar)
        act = data["activation"]
        activation = _activation_from_params(act["name"], act["params"])
        terms = [(_scalar_from_json(t["alpha"]), map_from_dict(t["map"], haar)) for t in data["terms"]]
        return cls(G, activation, tuple(terms))


def _jsonable_scalar(v):
    v = complex(v) if np.iscomplexobj(v) else float(v)
    return [v.real, v.imag] if isinstance(v, complex) else v


def _jsonable(params):
    return [_jsonable_scalar(p) if isinstance(p, (complex, float, np.floating)) else p for p in params]


def _scalar_from_json(v):
    return complex(*v) if isinstance(v, list) else v


def _activation_from_params(name, params):
    params = [_scalar_from_json(p) for p in params]
    if name in ("table", "random"):
        return table(params, name)
    if name in ("cosine", "character"):
        return {"cosine": cosine, "character": character}[name](*params)
    ctor = {"logistic": logistic, "tanh": tanh, "delta0": delta0, "relu": relu, "leaky-relu": leaky_relu}
    return ctor[name](*params)


def _same_domain(a, b) -> bool:
    if isinstance(a, LatticeWindow) or isinstance(b, LatticeWindow):
        return a == b
    return a.same_group(b)


def eval_network(net: GroupNetwork, x):
    """Value of ``net`` at a single point ``x``."""
    G = net.group
    x = G.element(x)
    total = 0
    for alpha, phi in net.terms:
        y = np.asarray([phi(x)], dtype=np.int64)
        total = total + alpha * net.activation(y, phi.target)[0]
    return total


# -- dictionaries -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Dictionary:
    """Columns ``psi o phi_i`` over every group point.

    ``columns`` has shape ``(|G| * dim, n_terms)``, rows ordered point-major
    then codomain component.
    """

    group: Any
    family: FamilySpec | None
    activation: Activation
    maps: tuple
    columns: np.ndarray
    dim: int = 1
    exhaustive: bool = False

    @property
    def n_terms(self) -> int:
        return self.columns.shape[1]

    @property
    def ambient(self) -> int:
        return self.group.order * self.dim

    @property
    def row_weights(self) -> np.ndarray:
        return np.repeat(self.group.weights, self.dim)

    def network(self, coefficients) -> GroupNetwork:
        return GroupNetwork(self.group, self.activation, tuple(zip(coefficients, self.maps)))


def _columns_for(G, activation, maps) -> tuple[np.ndarray, int]:
    if not maps:
        return np.zeros((G.order, 0)), 1
    if isinstance(G, LatticeWindow):
        blocks = [np.asarray(_map_values(activation, phi)) for phi in maps]
    else:
        H = maps[0].target
        tab = activation.table(H)
        idx = family_image_indices(G, None, list(maps))
        blocks = list(tab[idx])
    vals = np.stack(blocks, axis=-1)  # (n, m) or (n, d, m)
    dim = 1 if vals.ndim == 2 else vals.shape[1]
    return vals.reshape(G.order * dim, len(maps)), dim


def _check_target_activation(G, family, activation):
    H = family.target_group(G) if family is not None else G
    activation.check(H)


def build_dictionary(
    G,
    family: FamilySpec,
    activation: Activation,
    n_terms: int,
    rng: np.random.Generator | None = None,
    shared_map: bool = False,
) -> Dictionary:
    """Evaluate ``psi o phi`` for ``n_terms`` maps of ``family``.

    The whole family is used when it has at most ``n_terms`` members; otherwise
    ``n_terms`` maps are drawn (distinct where possible).  ``shared_map`` uses
    one drawn map for every term.
    """
    _check_target_activation(G, family, activation)
    rng = rng if rng is not None else np.random.default_rng(family.seed)
    size = family_size(G, family)
    if size == 0:
        raise ValueError(f"family {family} on {G} is empty")
    exhaustive = False
    if shared_map:
        maps = [sample_map(family, G, rng)] * n_terms
    elif size <= n_terms and size <= family.budget:
        maps = enumerate_family(G, family)
        exhaustive = True
    else:
        maps, seen = [], set()
        attempts = 0
        while len(maps) < n_terms and attempts < 20 * n_terms:
            phi = sample_map(family, G, rng)
            attempts += 1
            if phi not in seen:
                seen.add(phi)
                maps.append(phi)
    cols, dim = _columns_for(G, activation, maps)
    return Dictionary(G, family, activation, tuple(maps), cols, dim, exhaustive)


def dictionary_from_maps(G, activation: Activation, maps, family=None, exhaustive=False) -> Dictionary:
    maps = tuple(maps)
    if maps:
        activation.check(maps[0].target)
    cols, dim = _columns_for(G, activation, maps)
    return Dictionary(G, family, activation, maps, cols, dim, exhaustive)


def singular_values(D: Dictionary) -> np.ndarray:
    if D.columns.size == 0:
        return np.zeros(0)
    return np.linalg.svd(D.columns, compute_uv=False)


def numerical_rank(s: np.ndarray, tol: float = RANK_TOL) -> int:
    """Count singular values above ``tol`` times the largest."""
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


# -- errors -----------------------------------------------------------------

def _pointwise_norm(diff: np.ndarray, n: int) -> np.ndarray:
    diff = np.asarray(diff).reshape(n, -1)
    return np.linalg.norm(diff, axis=1)


def lp_error(G, f, g, p: float = 2.0) -> float:
    """``(sum_x |f(x) - g(x)|^p w(x))^(1/p)``; ``p = inf`` gives the max."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    diff = _pointwise_norm(values_on(G, f) - values_on(G, g), G.order)
    if math.isinf(p):
        return float(diff.max(initial=0.0))
    return float(np.sum(diff**p * G.weights) ** (1.0 / p))


def sup_error(points, f, g) -> float:
    """Largest pointwise distance over sampled ``points``."""
    pts = [tuple(int(c) for c in row) for row in np.asarray(points)]
    fv = np.array([f(x) for x in pts]) if callable(f) else np.asarray(f)
    gv = np.array([g(x) for x in pts]) if callable(g) else np.asarray(g)
    return float(_pointwise_norm(fv - gv, len(pts)).max(initial=0.0))


# -- fitting ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FitReport:
    coefficients: np.ndarray
    fitted: np.ndarray
    l2: float
    lp: float
    sup: float
    p: float
    rank: int
    tol: float

    def network(self, D: Dictionary) -> GroupNetwork:
        return D.network(self.coefficients)


def _target_vector(D: Dictionary, target) -> np.ndarray:
    t = values_on(D.group, target) if callable(target) else np.asarray(target)
    if t.size != D.ambient:
        raise ValueError(f"target has {t.size} entries, dictionary expects {D.ambient}")
    return t.reshape(D.ambient)


def fit_coefficients(D: Dictionary, target, p: float = 2.0, tol: float = RANK_TOL) -> FitReport:
    """Minimum-norm Haar-weighted least squares; residual reported in L2, Lp and sup.

    The fit itself is always L2: on a finite group all Lp norms are equivalent,
    so L2 density decides Lp density; ``p`` only selects what is reported.
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    t = _target_vector(D, target)
    sw = np.sqrt(D.row_weights)
    if D.n_terms == 0:
        coef = np.zeros(0)
        rank = 0
    else:
        coef, _, rank, _ = np.linalg.lstsq(D.columns * sw[:, None], t * sw, rcond=tol)
    fitted = D.columns @ coef if D.n_terms else np.zeros_like(t, dtype=float)
    shape = (D.group.order, D.dim) if D.dim > 1 else (D.group.order,)
    F, T = fitted.reshape(shape), t.reshape(shape)
    return FitReport(
        coefficients=coef,
        fitted=F,
        l2=lp_error(D.group, F, T, 2.0),
        lp=lp_error(D.group, F, T, p),
        sup=sup_error(D.group.points, F, T),
        p=p,
        rank=int(rank),
        tol=tol,
    )


@dataclass(frozen=True, eq=False)
class GreedyResult:
    network: GroupNetwork
    residuals: tuple[float, ...]
    stalled: bool
    coefficients: np.ndarray


def greedy_select(
    G,
    family: FamilySpec,
    activation: Activation,
    target,
    max_terms: int,
    rng: np.random.Generator | None = None,
    pool_size: int = 512,
    shared_map: bool = False,
    tol: float = RANK_TOL,
) -> GreedyResult:
    """Orthogonal matching pursuit over a candidate pool drawn from ``family``.

    Each step adds the candidate whose column, orthogonalized against the
    current selection, removes the most L2 residual, then refits every
    coefficient.  The pool is the whole family when it fits in ``pool_size``.
    Residuals are Haar-weighted L2 norms, starting with ``||target||``.
    """
    rng = rng if rng is not None else np.random.default_rng(family.seed)
    pool = build_dictionary(G, family, activation, 1 if shared_map else pool_size, rng, shared_map)
    sw = np.sqrt(pool.row_weights)
    A = pool.columns * sw[:, None]
    t = _target_vector(pool, target) * sw

    selected: list[int] = []
    Q = np.zeros((A.shape[0], 0), dtype=np.result_type(A, t, float))
    r = t.astype(Q.dtype)
    residuals = [float(np.linalg.norm(r))]
    scale = max(np.linalg.norm(A, axis=0).max(initial=0.0), 1e-300)
    stalled = False
    coef = np.zeros(0)
    while len(selected) < max_terms:
        perp = A - Q @ (Q.conj().T @ A)
        norms = np.linalg.norm(perp, axis=0)
        usable = norms > tol * scale
        usable[selected] = False
        if not usable.any():
            stalled = True
            break
        gain = np.zeros(A.shape[1])
        gain[usable] = np.abs(perp[:, usable].conj().T @ r) / norms[usable]
        best = int(np.argmax(gain))
        if gain[best] <= tol * max(residuals[0], 1e-300):
            stalled = True
            break
        q = perp[:, best] / norms[best]
        Q = np.column_stack([Q, q])
        selected.append(best)
        coef, *_ = np.linalg.lstsq(A[:, selected], t, rcond=None)
        r = t - A[:, selected] @ coef
        residuals.append(float(np.linalg.norm(r)))
    terms = tuple(zip(coef, (pool.maps[i] for i in selected)))
    return GreedyResult(GroupNetwork(G, activation, terms), tuple(residuals), stalled, coef)
