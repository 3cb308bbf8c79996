"""Rank and annihilator oracles for dictionary density on finite domains.

On a finite domain the closure of the span of ``{psi o phi}`` is everything iff
the only measure ``mu`` with ``sum_x psi(phi(x)) mu(x) = 0`` for every ``phi`` is
zero.  Two routes decide it here:

* :func:`density_rank` counts singular values of the dictionary;
* :func:`is_discriminatory` tries to reach every point mass by least squares and
  turns the first unreachable one into an annihilating measure.

Verdicts from sampled (non-exhaustive) families are lower bounds only.
"""
from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .fourier import SignedMeasure, fourier_transform
from .groups import FiniteAbelianGroup, invariant_factor_groups, make_group, parse_group
from .homs import FamilySpec, enumerate_family, family_size, parse_family
from .netlib import (
    RANK_TOL,
    Activation,
    Dictionary,
    activation_from_spec,
    build_dictionary,
    numerical_rank,
    random_table,
)

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "group",
    "family",
    "activation",
    "n_terms",
    "rank",
    "ambient",
    "dense",
    "lower_bound_flag",
    "tolerance",
    "seed",
)
SAMPLED_TERMS_PER_DIM = 4
WITNESS_TOL = 1e-10


def _normalize_measure(v: np.ndarray) -> np.ndarray:
    """Unit total variation, largest entry real and positive."""
    lead = v.reshape(-1)[int(np.argmax(np.abs(v.reshape(-1))))]
    v = v * (np.conj(lead) / abs(lead))
    if np.iscomplexobj(v) and np.allclose(v.imag, 0, atol=1e-15):
        v = v.real
    tv = np.sum(np.linalg.norm(v.reshape(v.shape[0], -1), axis=1))
    return v / tv


def _as_measure(D: Dictionary, vec: np.ndarray) -> SignedMeasure:
    n = D.group.order
    mass = vec.reshape(n, D.dim) if D.dim > 1 else vec.reshape(n)
    return SignedMeasure(D.group, _normalize_measure(mass))


def annihilator(D: Dictionary, tol: float = RANK_TOL) -> list[SignedMeasure]:
    """Basis of measures killing every column under ``sum_x col(x) mu(x)``.

    With ``D = U S V^H``, ``mu^T D = 0`` iff ``conj(mu)`` lies in the span of
    the left singular vectors beyond the numerical rank.
    """
    A = D.columns
    if A.shape[1] == 0:
        U, rank = np.eye(A.shape[0]), 0
    else:
        # U must be square; V is only needed in reduced form (wide dictionaries are huge)
        U, s, _ = np.linalg.svd(A, full_matrices=A.shape[0] > A.shape[1])
        rank = numerical_rank(s, tol)
    null = np.conj(U[:, rank:])
    return [_as_measure(D, null[:, i]) for i in range(null.shape[1])]


def pairing(D: Dictionary, mu: SignedMeasure) -> np.ndarray:
    """``sum_x psi(phi_i(x)) mu(x)`` for every dictionary column ``i``."""
    return mu.mass.reshape(-1) @ D.columns


@dataclass
class DensityReport:
    group: str
    family: str
    activation: str
    n_terms: int
    rank: int
    ambient: int
    dense: bool
    lower_bound: bool
    tolerance: float
    seed: int | None = None
    annihilator_basis: list = field(default_factory=list, repr=False)
    error: str | None = None

    def row(self) -> dict:
        return {
            "group": self.group,
            "family": self.family,
            "activation": self.activation,
            "n_terms": self.n_terms,
            "rank": self.rank,
            "ambient": self.ambient,
            "dense": self.dense,
            "lower_bound_flag": self.lower_bound,
            "tolerance": repr(self.tolerance),
            "seed": "" if self.seed is None else self.seed,
        }

    def to_json(self) -> dict:
        out = dict(self.row())
        out["tolerance"] = self.tolerance
        out["seed"] = self.seed
        out["error"] = self.error
        out["witnesses"] = [_measure_json(m) for m in self.annihilator_basis]
        return out


def _measure_json(mu: SignedMeasure):
    m = np.asarray(mu.mass)
    if np.iscomplexobj(m):
        return {"re": m.real.tolist(), "im": m.imag.tolist()}
    return m.tolist()


def _dictionary_for(G, activation, family, budget, rng) -> Dictionary:
    size = family_size(G, family)
    if size <= family.budget and (budget is None or size <= budget):
        n_terms = size
    else:
        n_terms = budget if budget is not None else SAMPLED_TERMS_PER_DIM * G.order
    return build_dictionary(G, family, activation, n_terms, rng)


def density_rank(
    G,
    activation: Activation,
    family: FamilySpec,
    budget: int | None = None,
    rng: np.random.Generator | None = None,
    tol: float = RANK_TOL,
) -> DensityReport:
    """Rank of the family dictionary; dense iff rank equals ``|G| * dim``."""
    D = _dictionary_for(G, activation, family, budget, rng)
    basis = annihilator(D, tol)
    rank = D.ambient - len(basis)
    return DensityReport(
        group=str(G),
        family=str(family),
        activation=activation.spec,
        n_terms=D.n_terms,
        rank=rank,
        ambient=D.ambient,
        dense=rank == D.ambient,
        lower_bound=not D.exhaustive,
        tolerance=tol,
        seed=family.seed,
        annihilator_basis=basis,
    )


class Verdict(NamedTuple):
    discriminatory: bool
    witness: SignedMeasure | None
    exhaustive: bool


def is_discriminatory(
    G,
    activation: Activation,
    family: FamilySpec,
    budget: int | None = None,
    rng: np.random.Generator | None = None,
    tol: float = RANK_TOL,
) -> Verdict:
    """Decide discrimination by reaching each point mass from the span.

    Each unit vector ``e_x`` is projected onto the (numerically truncated)
    span.  If some ``e_x`` leaves a residual, that residual is orthogonal to
    every column, so its conjugate is a nonzero annihilating measure.  A
    non-exhaustive family only certifies failure for the sampled subfamily.
    """
    D = _dictionary_for(G, activation, family, budget, rng)
    n = D.ambient
    if D.n_terms == 0:
        resid = np.eye(n)
    else:
        coef, *_ = np.linalg.lstsq(D.columns, np.eye(n), rcond=tol)
        resid = np.eye(n) - D.columns @ coef
    norms = np.linalg.norm(resid, axis=0)
    worst = int(np.argmax(norms))
    if norms[worst] <= 0.5 / np.sqrt(n):
        return Verdict(True, None, D.exhaustive)
    return Verdict(False, _as_measure(D, np.conj(resid[:, worst])), D.exhaustive)


@dataclass(frozen=True, eq=False)
class Witness:
    group: FiniteAbelianGroup
    family: FamilySpec
    activation: Activation
    measure: SignedMeasure
    max_pairing: float


def verify_witness(G, activation: Activation, family: FamilySpec, mu: SignedMeasure) -> float:
    """Largest ``|sum_x psi(phi(x)) mu(x)|`` over every enumerated map, evaluated map by map."""
    worst = 0.0
    mass = mu.mass
    for phi in enumerate_family(G, family):
        vals = activation(phi.images(), phi.target)
        worst = max(worst, float(np.abs(np.tensordot(vals, mass, axes=(0, 0))).max()))
    return worst


def counterexample_search(
    max_order: int,
    families: Sequence[FamilySpec],
    rng: np.random.Generator,
    trials: int,
    activations: Sequence[Activation] = (),
    tol: float = RANK_TOL,
) -> list[Witness]:
    """Bounded non-constant ``psi`` that fail to discriminate over a whole family.

    Scans one group per isomorphism class of order ``2..max_order``.  For each
    family that can be listed within its budget, every given activation plus
    ``trials`` random tables is tested; each witness is re-checked map by map
    and kept only if every pairing is below ``1e-10``.
    """
    found = []
    if trials <= 0 and not activations:
        return found
    for order in range(2, max_order + 1):
        for moduli in invariant_factor_groups(order):
            G = make_group(moduli)
            for family in families:
                if family_size(G, family) > family.budget:
                    log.info("skipping %s on %s: family exceeds budget", family, G)
                    continue
                candidates = [a for a in activations if a.bounded and a.nonconstant]
                candidates += [random_table(G, rng) for _ in range(trials)]
                for act in candidates:
                    verdict = is_discriminatory(G, act, family, tol=tol)
                    if verdict.discriminatory:
                        continue
                    worst = verify_witness(G, act, family, verdict.witness)
                    if worst < WITNESS_TOL:
                        found.append(Witness(G, family, act, verdict.witness, worst))
                    else:
                        log.warning("witness on %s/%s failed re-verification (%g)", G, family, worst)
    return found


def cell_seed(master: int, index: int) -> int:
    """Per-cell seed derived from ``(master, index)`` only."""
    return int(np.random.SeedSequence([master, index]).generate_state(1)[0])


def _resolve_activation(spec, G, rng) -> Activation:
    if isinstance(spec, Activation):
        return spec
    if spec == "random":
        return random_table(G, rng)
    return activation_from_spec(spec)


def density_map(
    groups: Iterable,
    activations: Iterable,
    families: Iterable,
    seed: int = 0,
    budget: int | None = None,
    tol: float = RANK_TOL,
) -> list[DensityReport]:
    """One :class:`DensityReport` per (group, activation, family) cell, in that nesting order.

    Cell failures are captured in ``report.error`` instead of aborting.
    """
    reports = []
    groups, activations, families = list(groups), list(activations), list(families)
    index = 0
    for g in groups:
        for a in activations:
            for f in families:
                s = cell_seed(seed, index)
                index += 1
                rng = np.random.default_rng(s)
                fam = parse_family(f) if isinstance(f, str) else f
                act_name = a if isinstance(a, str) else a.spec
                try:
                    G = parse_group(g) if isinstance(g, str) else g
                    act = _resolve_activation(a, G, rng)
                    rep = density_rank(G, act, fam, budget=budget, rng=rng, tol=tol)
                    rep.seed = s
                    if act.name == "random":
                        rep.activation = "random"
                except Exception as exc:  # recorded per row
                    rep = DensityReport(str(g), str(fam), act_name, 0, 0, 0, False, True, tol, s, error=f"{type(exc).__name__}: {exc}")
                reports.append(rep)
    return reports


def reports_to_csv(reports: Sequence[DensityReport], extra: dict | None = None) -> str:
    extra = extra or {}
    buf = io.StringIO()
    cols = list(CSV_COLUMNS) + ["error"] + list(extra)
    writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        row = r.row()
        row["error"] = r.error or ""
        row.update(extra)
        writer.writerow(row)
    return buf.getvalue()


def reports_to_json(reports: Sequence[DensityReport], extra: dict | None = None) -> str:
    payload = dict(extra or {})
    payload["cells"] = [r.to_json() for r in reports]
    return json.dumps(payload, indent=2, sort_keys=True)


def spectral_rank_cyclic(psi_values, tol: float = RANK_TOL) -> int:
    """Number of DFT coefficients of ``psi`` above ``tol`` times the largest."""
    psi = np.asarray(psi_values)
    mags = np.abs(fourier_transform(make_group([len(psi)]), psi).values)
    if mags.max(initial=0.0) == 0:
        return 0
    return int(np.count_nonzero(mags > tol * mags.max()))
