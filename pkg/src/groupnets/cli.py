"""Command-line experiment runner.

Precedence for every setting is: command-line flag > ``--config`` JSON file >
built-in default.  Output files land in ``--out`` (or ``$GROUPNETS_OUT``, or
the working directory) and carry the canonical config hash and tool version.

Exit status: 0 pass, 1 property failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from .density import (
    counterexample_search,
    density_map,
    reports_to_csv,
    reports_to_json,
)
from .fourier import convolve, fourier_transform, inverse_fourier, verify_double_dual, DOUBLE_DUAL_BUDGET
from .groups import FiniteAbelianGroup, haar_invariance_violations, parse_group
from .homs import EnumerationBudgetError, enumerate_family, map_to_dict, parse_family
from .netlib import RANK_TOL, activation_from_spec, build_dictionary, fit_coefficients, random_table

COMMANDS = ("density", "approx", "fourier-check", "enumerate", "counterexample")
OUT_ENV = "GROUPNETS_OUT"
DEFAULT_BATTERY = (
    "Z1", "Z2", "Z5", "Z8", "Z12", "Z2xZ2", "Z2xZ3", "Z4xZ6",
    "Z3xZ3xZ3", "Z2xZ2xZ2xZ2", "Z16", "T1@16", "T2@4",
)


class UsageError(Exception):
    pass


@dataclass
class ExperimentConfig:
    command: str
    groups: list = field(default_factory=list)
    families: list = field(default_factory=list)
    activations: list = field(default_factory=list)
    n_terms: int | None = None
    max_order: int = 8
    trials: int = 10
    p: float = 2.0
    seed: int = 0
    tol: float = RANK_TOL
    out: str | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"command: unknown command {self.command!r}")
        if self.p < 1:
            raise UsageError(f"p: must be >= 1, got {self.p}")

    def canonical(self) -> dict:
        data = asdict(self)
        data.pop("out")  # where results go does not change them
        if math.isinf(data["p"]):
            data["p"] = "inf"
        return data

    def canonical_json(self) -> str:
        return json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))

    @property
    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise UsageError(f"config: unknown key(s) {', '.join(unknown)}")
        data = dict(data)
        if data.get("p") == "inf":
            data["p"] = math.inf
        return cls(**data)


class _Once(argparse.Action):
    """Single-valued flag that refuses to be given twice."""

    def __call__(self, parser, namespace, values, option_string=None):
        if getattr(namespace, "_seen", None) is None:
            namespace._seen = set()
        if self.dest in namespace._seen:
            parser.error(f"{option_string} given more than once")
        namespace._seen.add(self.dest)
        setattr(namespace, self.dest, values)


def _p_value(text):
    return math.inf if text.lower() in ("inf", "infinity") else float(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="groupnets", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--group", dest="groups", action="append", help='e.g. "Z4xZ6", "T1@64", "W2@5"')
        p.add_argument("--family", dest="families", action="append", help='e.g. "aut", "hom:Z2xZ2", "torus-linear:K=8"')
        p.add_argument("--activation", dest="activations", action="append", help='e.g. "delta0", "table:1,1,0,0"')
        p.add_argument("--terms", dest="n_terms", type=int, action=_Once)
        p.add_argument("--max-order", dest="max_order", type=int, action=_Once)
        p.add_argument("--trials", type=int, action=_Once)
        p.add_argument("--p", type=_p_value, action=_Once)
        p.add_argument("--seed", type=int, action=_Once)
        p.add_argument("--tol", type=float, action=_Once)
        p.add_argument("--out", action=_Once)
        p.add_argument("--config", action=_Once, help="JSON config file")
    return parser


def parse_args(argv) -> ExperimentConfig:
    """Merge flags over an optional JSON config file over defaults."""
    parser = build_parser()
    ns = parser.parse_args(argv)
    data = {}
    if ns.config:
        try:
            data = json.loads(Path(ns.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"config: cannot read {ns.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise UsageError("config: top level must be a JSON object")
        if "command" in data and data["command"] != ns.command:
            raise UsageError(f"command: config says {data['command']!r}, command line says {ns.command!r}")
    data["command"] = ns.command
    for name in ("groups", "families", "activations", "n_terms", "max_order", "trials", "p", "seed", "tol", "out"):
        value = getattr(ns, name, None)
        if value is not None:
            data[name] = value
    return ExperimentConfig.from_dict(data)


# -- commands ---------------------------------------------------------------

def _header(cfg: ExperimentConfig) -> dict:
    return {"config_hash": cfg.config_hash, "tool_version": __version__}


def _write(out_dir: Path, name: str, text: str) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    path.write_text(text)
    return path


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def run_density(cfg, out_dir):
    reports = density_map(
        cfg.groups or ["Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8"],
        cfg.activations or ["logistic", "delta0"],
        cfg.families or ["aut", "affine-end"],
        seed=cfg.seed,
        budget=cfg.n_terms,
        tol=cfg.tol,
    )
    extra = _header(cfg)
    _write(out_dir, "density.csv", reports_to_csv(reports, extra))
    _write(out_dir, "density.json", reports_to_json(reports, extra) + "\n")
    return 0


def run_approx(cfg, out_dir):
    rng = np.random.default_rng(cfg.seed)
    G = parse_group((cfg.groups or ["Z8"])[0])
    family = parse_family((cfg.families or ["translations"])[0])
    spec = (cfg.activations or ["logistic"])[0]
    act = random_table(G, rng) if spec == "random" else activation_from_spec(spec)
    n_terms = cfg.n_terms or family.budget
    D = build_dictionary(G, family, act, n_terms, rng)
    target = rng.standard_normal(D.ambient)
    fit = fit_coefficients(D, target, cfg.p, cfg.tol)
    report = {
        **_header(cfg),
        "group": str(G),
        "family": str(family),
        "activation": act.spec,
        "n_terms": D.n_terms,
        "exhaustive": D.exhaustive,
        "rank": fit.rank,
        "ambient": D.ambient,
        "p": "inf" if math.isinf(fit.p) else fit.p,
        "residual_l2": fit.l2,
        "residual_lp": fit.lp,
        "residual_sup": fit.sup,
    }
    _write(out_dir, "approx.json", _dump(report))
    return 0


def fourier_checks(G, rng, trials) -> dict:
    """Round trip, convolution theorem, Plancherel, double dual and Haar invariance on one group."""
    n = G.order
    rt = conv = planch = 0.0
    for _ in range(trials):
        f = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        g = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        F, Gh = fourier_transform(G, f), fourier_transform(G, g)
        rt = max(rt, float(np.max(np.abs(inverse_fourier(G, F) - f)) / np.max(np.abs(f))))
        conv = max(conv, float(np.max(np.abs(fourier_transform(G, convolve(G, f, g)).values - F.values * Gh.values))))
        P = G.with_haar("probability")
        lhs = float(np.sum(np.abs(f) ** 2) / n)
        rhs = float(np.sum(np.abs(fourier_transform(P, f).values) ** 2))
        planch = max(planch, abs(lhs - rhs) / lhs)
    masks = rng.random((64, n)) < 0.5
    shifts = rng.integers(n, size=8)
    out = {
        "group": str(G),
        "round_trip_rel_error": rt,
        "convolution_error": conv,
        "plancherel_rel_error": planch,
        "haar_violations": haar_invariance_violations(G, masks, shifts),
        "double_dual": verify_double_dual(G) if n <= DOUBLE_DUAL_BUDGET else None,
    }
    out["pass"] = bool(
        rt < 1e-12 and conv < 1e-10 and planch < 1e-10 and out["haar_violations"] == 0 and out["double_dual"] is not False
    )
    return out


def run_fourier_check(cfg, out_dir):
    rng = np.random.default_rng(cfg.seed)
    groups = [parse_group(g) for g in (cfg.groups or DEFAULT_BATTERY)]
    results = []
    for G in groups:
        if not isinstance(G, FiniteAbelianGroup):
            raise UsageError(f"group: {G} is not a finite group")
        results.append(fourier_checks(G, rng, cfg.trials))
    ok = all(r["pass"] for r in results)
    _write(out_dir, "fourier_check.json", _dump({**_header(cfg), "pass": ok, "groups": results}))
    return 0 if ok else 1


def run_enumerate(cfg, out_dir):
    payload = {**_header(cfg), "families": []}
    for g in cfg.groups or ["Z4"]:
        G = parse_group(g)
        for f in cfg.families or ["aut"]:
            fam = parse_family(f)
            try:
                maps = [map_to_dict(m) for m in enumerate_family(G, fam)]
                entry = {"group": str(G), "family": str(fam), "count": len(maps), "maps": maps}
            except EnumerationBudgetError as exc:
                entry = {"group": str(G), "family": str(fam), "error": str(exc)}
            payload["families"].append(entry)
    _write(out_dir, "enumerate.json", _dump(payload))
    return 0


def run_counterexample(cfg, out_dir):
    rng = np.random.default_rng(cfg.seed)
    families = [parse_family(f) for f in cfg.families or ["aut"]]
    acts = [activation_from_spec(a) for a in cfg.activations]
    found = counterexample_search(cfg.max_order, families, rng, cfg.trials, acts, cfg.tol)
    rows = [
        {
            "group": str(w.group),
            "family": str(w.family),
            "activation": w.activation.spec,
            "witness": np.asarray(w.measure.mass).tolist(),
            "max_pairing": w.max_pairing,
        }
        for w in found
    ]
    _write(out_dir, "counterexamples.json", _dump({**_header(cfg), "witnesses": rows}))
    return 0


RUNNERS = {
    "density": run_density,
    "approx": run_approx,
    "fourier-check": run_fourier_check,
    "enumerate": run_enumerate,
    "counterexample": run_counterexample,
}


def run(cfg: ExperimentConfig) -> int:
    out_dir = Path(cfg.out or os.environ.get(OUT_ENV, "."))
    return RUNNERS[cfg.command](cfg, out_dir)


def main(argv=None) -> int:
    try:
        cfg = parse_args(sys.argv[1:] if argv is None else argv)
        return run(cfg)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code or 0)
    except (UsageError, ValueError) as exc:
        print(f"groupnets: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
