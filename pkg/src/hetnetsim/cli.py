"""Experiment runner.

Subcommands map one-to-one onto experiment kinds (coverage sweeps, bound vs
Monte-Carlo comparison, candidate counts, ASE comparison, open-fraction
sweeps, ordering checks), plus ``reproduce`` for the bundled experiment
specs and ``verify`` to confirm a CSV was produced from a given config.

Configuration files are JSON trees with a ``tiers`` array; targets may be
given in dB (``target_sir_db``) or linear (``target_sir``), and densities
are ratios (any common scale).  Output is a single CSV per run with ``#``
metadata comment lines; identical (spec, seed) inputs produce byte-identical
files regardless of worker count.

Exit codes: 0 success, 1 validation error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .analytic import (AnalyticError, ase_symmetric, coverage_bound_delta1,
                       coverage_bound_general, symmetric_parameters)
from .model import (Access, ConfigError, NetworkConfig, TierConfig,
                    TransmissionTechnique, config_digest, db_to_linear,
                    technique_shapes, validate)
from .montecarlo import (CREDITING_RULE, DEFAULT_REALIZATIONS, ase_from_tallies,
                         sweep_candidate_tallies, sweep_estimates, sweep_tallies,
                         target_matrix, theta_sweep_estimates)
from .ordering import (OrderingClaim, check_ccdf_dominance, check_coverage_ordering,
                       check_rate_ordering, default_dominance_grid)
from .sampling import PlacementKind
from .specfun import GammaRatioParams, gamma_ratio_ccdf

EXPERIMENT_KINDS = ("coverage_sweep", "bound_vs_mc", "ordering", "ase_compare",
                    "theta_sweep", "candidate_count")


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything needed to run one experiment and write one CSV."""

    kind: str
    out: str
    config: Optional[NetworkConfig] = None
    placement: Optional[tuple[PlacementKind, ...]] = None
    seed: int = 1
    realizations: int = DEFAULT_REALIZATIONS
    workers: int = 1
    sweep_db: Optional[tuple[float, float, float]] = None
    theta_axis: Optional[tuple[float, float, float]] = None
    theta_tier: int = 1
    paired: bool = False
    # curves: (label, per-tier technique overrides or None, per-tier targets_db
    # or None, density_scale)
    curves: tuple = ()
    ccdf_pairs: tuple = ()
    compare: Optional[tuple] = None  # (profile_a, profile_b, metric)
    rate_sweep: Optional[tuple[float, float, float]] = None


def _axis(bounds: tuple[float, float, float]) -> np.ndarray:
    start, stop, step = bounds
    if step <= 0:
        raise ConfigError(f"sweep step must be positive, got {step}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    if n < 1:
        raise ConfigError(f"empty sweep axis {bounds}")
    return start + step * np.arange(n)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return "nan"
        return format(float(value), ".10g")
    return str(value)


def emit_figure_data(kind: str, fieldnames: Sequence[str], rows: Sequence[Sequence],
                     metadata: dict, out) -> None:
    """Write rows with `#` metadata comments, stable order, fixed formatting."""
    path = Path(out)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# hetnetsim {__version__}", f"# kind={kind}"]
    for key in sorted(metadata):
        lines.append(f"# {key}={metadata[key]}")
    lines.append(",".join(fieldnames))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


# ----------------------------------------------------------------------
# configuration loading

def _tier_from_dict(d: dict, where: str) -> tuple[TierConfig, PlacementKind]:
    if "target_sir_db" in d:
        target = db_to_linear(float(d["target_sir_db"]))
    elif "target_sir" in d:
        target = float(d["target_sir"])
    else:
        raise ConfigError(f"{where}: needs target_sir_db or target_sir")
    placement = PlacementKind(d.get("placement", "ppp"))
    tier = TierConfig(
        power=float(d.get("power", 1.0)),
        density=float(d.get("density", 1.0)),
        target_sir=target,
        antennas=int(d.get("antennas", 1)),
        users_served=int(d.get("users_served", 1)),
        access=Access(d.get("access", "open")),
        resource_fraction=float(d.get("resource_fraction", 1.0)),
        rate_target=float(d.get("rate_target", 0.0)),
    )
    return tier, placement


def config_from_dict(data: dict) -> tuple[NetworkConfig, tuple[PlacementKind, ...]]:
    if "tiers" not in data or not data["tiers"]:
        raise ConfigError("configuration needs a non-empty 'tiers' array")
    tiers, placements = [], []
    for i, td in enumerate(data["tiers"]):
        tier, placement = _tier_from_dict(td, f"tier {i}")
        tiers.append(tier)
        placements.append(placement)
    config = NetworkConfig(
        tiers=tuple(tiers),
        path_loss_exponent=float(data.get("path_loss_exponent", 4.0)),
        sim_radius=(float(data["sim_radius"]) if data.get("sim_radius") else None),
        min_expected_bs_per_tier=int(data.get("min_expected_bs_per_tier", 500)),
    )
    return validate(config), tuple(placements)


def load_config(path) -> tuple[NetworkConfig, tuple[PlacementKind, ...]]:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    return config_from_dict(data)


def parse_technique(text: str) -> tuple[TransmissionTechnique, int]:
    """'siso' | 'su_bf:M' | 'sdma:M[:U]' -> (technique, antennas)."""
    parts = text.split(":")
    tag = parts[0]
    if tag == "siso":
        return TransmissionTechnique.siso(), 1
    if tag == "su_bf":
        if len(parts) != 2:
            raise ConfigError("su_bf needs an antenna count, e.g. su_bf:4")
        return TransmissionTechnique.su_bf(), int(parts[1])
    if tag == "sdma":
        if len(parts) == 2:
            m = int(parts[1])
            return TransmissionTechnique.sdma(m), m
        if len(parts) == 3:
            return TransmissionTechnique.sdma(int(parts[2])), int(parts[1])
        raise ConfigError("sdma needs antennas, e.g. sdma:4 (full) or sdma:4:2")
    raise ConfigError(f"unknown technique {text!r}")


def _apply_curve(config: NetworkConfig, techs: Optional[Sequence[str]],
                 targets_db: Optional[Sequence[float]],
                 density_scale: float = 1.0) -> NetworkConfig:
    tiers = list(config.tiers)
    if techs is not None:
        if len(techs) == 1:
            techs = list(techs) * len(tiers)
        if len(techs) != len(tiers):
            raise ConfigError("curve technique list must cover every tier")
        for k, text in enumerate(techs):
            technique, antennas = parse_technique(text)
            _, psi = technique_shapes(technique, antennas)
            tiers[k] = replace(tiers[k], antennas=antennas, users_served=psi)
    if targets_db is not None:
        if len(targets_db) != len(tiers):
            raise ConfigError("curve target list must cover every tier")
        for k, tdb in enumerate(targets_db):
            tiers[k] = replace(tiers[k], target_sir=db_to_linear(float(tdb)))
    if density_scale != 1.0:
        tiers = [replace(t, density=t.density * density_scale) for t in tiers]
    return validate(replace(config, tiers=tuple(tiers)))


def _base_metadata(spec: ExperimentSpec) -> dict:
    md = {
        "seed": spec.seed,
        "realizations": spec.realizations,
        "crediting": CREDITING_RULE,
    }
    if spec.config is not None:
        md["config_digest"] = config_digest(spec.config)
        md["placement"] = ",".join(p.value for p in (spec.placement or
                                                     (PlacementKind.PPP,) * len(spec.config.tiers)))
    return md


def _curve_specs(spec: ExperimentSpec):
    if spec.curves:
        return spec.curves
    return (("config", None, None, 1.0),)


def _curve_seed(spec: ExperimentSpec, position: int) -> int:
    # paired mode reuses the sampling streams across curves for low-variance
    # comparisons; unpaired mode decorrelates them
    return spec.seed if spec.paired else spec.seed + 7919 * position


# ----------------------------------------------------------------------
# experiment kinds

def _bound_for(config: NetworkConfig):
    try:
        if all(config.tiers[k].delta == 1 for k in config.open_tiers()):
            return coverage_bound_delta1(config)
        return coverage_bound_general(config)
    except AnalyticError as exc:
        sys.stderr.write(f"warning: bound quadrature did not converge: {exc}\n")
        return None


def _run_coverage_like(spec: ExperimentSpec, with_bound: bool) -> list[str]:
    if spec.sweep_db is None:
        raise ConfigError("this experiment needs --sweep-db START STOP STEP")
    betas_db = _axis(spec.sweep_db)
    betas = [db_to_linear(b) for b in betas_db]
    n_tiers = len(spec.config.tiers)
    fields = (["beta_db", "curve", "coverage", "ci_low", "ci_high"]
              + ["bound", "bound_exceeds_one"]
              + [f"tier{k}_coverage" for k in range(n_tiers)] + ["n"])
    rows = []
    for pos, (label, techs, targets_db, dscale) in enumerate(_curve_specs(spec)):
        cfg = _apply_curve(spec.config, techs, targets_db, dscale)
        estimates = sweep_estimates(cfg, spec.placement, _curve_seed(spec, pos),
                                    spec.realizations,
                                    target_matrix(cfg, betas), workers=spec.workers)
        for bdb, beta, (est, per) in zip(betas_db, betas, estimates):
            if with_bound:
                swept = _apply_curve(cfg, None, [bdb] * n_tiers)
                bound = _bound_for(swept)
                bval = bound.value if bound else math.nan
                bflag = bound.exceeds_one if bound else False
            else:
                bval, bflag = math.nan, False
            rows.append([bdb, label, est.value, est.ci_low, est.ci_high, bval, bflag]
                        + list(per.per_tier) + [est.n_realizations])
    md = _base_metadata(spec)
    md["sweep_db"] = "{}:{}:{}".format(*spec.sweep_db)
    emit_figure_data(spec.kind, fields, rows, md, spec.out)
    return [spec.out]


def _run_candidate_count(spec: ExperimentSpec) -> list[str]:
    if spec.sweep_db is None:
        raise ConfigError("candidate_count needs --sweep-db START STOP STEP")
    betas_db = _axis(spec.sweep_db)
    betas = [db_to_linear(b) for b in betas_db]
    fields = ["beta_db", "curve", "p_zero", "p_one", "p_multi", "mean_candidates", "n"]
    rows = []
    for pos, (label, techs, targets_db, dscale) in enumerate(_curve_specs(spec)):
        cfg = _apply_curve(spec.config, techs, targets_db, dscale)
        hists = sweep_candidate_tallies(cfg, spec.placement, _curve_seed(spec, pos),
                                        spec.realizations,
                                        target_matrix(cfg, betas), workers=spec.workers)
        for bdb, hist in zip(betas_db, hists):
            mean_x = sum(x * p for x, p in hist.counts.items())
            rows.append([bdb, label, hist.counts.get(0, 0.0), hist.counts.get(1, 0.0),
                         hist.prob_greater(1), mean_x, hist.n_realizations])
    md = _base_metadata(spec)
    md["sweep_db"] = "{}:{}:{}".format(*spec.sweep_db)
    emit_figure_data(spec.kind, fields, rows, md, spec.out)
    return [spec.out]


def _run_ase_compare(spec: ExperimentSpec) -> list[str]:
    if spec.sweep_db is None:
        raise ConfigError("ase_compare needs --sweep-db START STOP STEP")
    betas_db = _axis(spec.sweep_db)
    betas = [db_to_linear(b) for b in betas_db]
    fields = ["beta_db", "curve", "ase_mc", "ase_analytic", "coverage", "n"]
    rows = []
    for pos, (label, techs, targets_db, dscale) in enumerate(_curve_specs(spec)):
        cfg = _apply_curve(spec.config, techs, targets_db, dscale)
        covered, credit, served = sweep_tallies(cfg, spec.placement,
                                                _curve_seed(spec, pos),
                                                spec.realizations,
                                                target_matrix(cfg, betas),
                                                workers=spec.workers)
        for p, (bdb, beta) in enumerate(zip(betas_db, betas)):
            ase_mc = ase_from_tallies(cfg, [beta] * len(cfg.tiers), credit[p], served[p])
            cov = int(covered[p]) / spec.realizations
            try:
                swept = _apply_curve(cfg, None, [bdb] * len(cfg.tiers))
                alpha, antennas, users, target, total = symmetric_parameters(swept)
                if users == antennas:  # SISO or full SDMA have closed forms
                    technique = (TransmissionTechnique.siso() if antennas == 1
                                 else TransmissionTechnique.sdma(users))
                    ase_an = ase_symmetric(alpha, antennas, target, total, technique).value
                else:
                    ase_an = math.nan
            except ConfigError:
                ase_an = math.nan
            rows.append([bdb, label, ase_mc, ase_an, cov, spec.realizations])
    md = _base_metadata(spec)
    md["sweep_db"] = "{}:{}:{}".format(*spec.sweep_db)
    emit_figure_data(spec.kind, fields, rows, md, spec.out)
    return [spec.out]


def _run_theta_sweep(spec: ExperimentSpec) -> list[str]:
    if spec.theta_axis is None:
        raise ConfigError("theta_sweep needs --theta START STOP STEP")
    thetas = [float(t) for t in _axis(spec.theta_axis)]
    fields = ["theta", "curve", "coverage", "ci_low", "ci_high", "n"]
    rows = []
    for pos, (label, techs, targets_db, dscale) in enumerate(_curve_specs(spec)):
        cfg = _apply_curve(spec.config, techs, targets_db, dscale)
        estimates = theta_sweep_estimates(cfg, spec.theta_tier, thetas, spec.placement,
                                          _curve_seed(spec, pos), spec.realizations,
                                          workers=spec.workers)
        for theta, est in zip(thetas, estimates):
            rows.append([theta, label, est.value, est.ci_low, est.ci_high,
                         est.n_realizations])
    md = _base_metadata(spec)
    md["theta_axis"] = "{}:{}:{}".format(*spec.theta_axis)
    md["theta_tier"] = spec.theta_tier
    md["theta_mode"] = "per-station thinning, shared realizations"
    emit_figure_data(spec.kind, fields, rows, md, spec.out)
    return [spec.out]


def _run_ordering(spec: ExperimentSpec) -> list[str]:
    if spec.ccdf_pairs:
        grid = default_dominance_grid()
        fields = ["z", "curve", "ccdf"]
        rows = []
        params = [GammaRatioParams(int(k), int(m)) for k, m in spec.ccdf_pairs]
        for p in params:
            label = f"Z_{p.k}_{p.m}"
            vals = gamma_ratio_ccdf(p, grid)
            rows.extend([[z, label, v] for z, v in zip(grid, vals)])
        md = {"grid": "logspace(-3,3,200)"}
        for i in range(len(params)):
            for j in range(i + 1, len(params)):
                verdict = check_ccdf_dominance(params[i], params[j])
                md[f"verdict_Z_{params[i].k}_{params[i].m}_vs_Z_{params[j].k}_{params[j].m}"] = \
                    verdict.relation.value
        emit_figure_data("ordering", fields, rows, md, spec.out)
        return [spec.out]

    if spec.compare is None:
        raise ConfigError("ordering needs either --ccdf pairs or --technique-a/--technique-b")
    (tech_a, tech_b, metric) = spec.compare
    n_tiers = len(spec.config.tiers)
    shapes_a = [technique_shapes(*parse_technique(tech_a))] * n_tiers
    shapes_b = [technique_shapes(*parse_technique(tech_b))] * n_tiers
    claim = OrderingClaim(deltas1=tuple(d for d, _ in shapes_a),
                          psis1=tuple(p for _, p in shapes_a),
                          deltas2=tuple(d for d, _ in shapes_b),
                          psis2=tuple(p for _, p in shapes_b))
    if metric == "coverage":
        if spec.sweep_db is None:
            raise ConfigError("ordering coverage comparison needs --sweep-db")
        sweep = [db_to_linear(b) for b in _axis(spec.sweep_db)]
        report = check_coverage_ordering(claim, spec.config, spec.placement, spec.seed,
                                         spec.realizations, sweep, workers=spec.workers)
        sweep_col = list(_axis(spec.sweep_db))
        sweep_name = "beta_db"
    elif metric == "rate":
        if spec.rate_sweep is None:
            raise ConfigError("ordering rate comparison needs --rate-sweep")
        sweep = list(_axis(spec.rate_sweep))
        report = check_rate_ordering(claim, spec.config, spec.placement, spec.seed,
                                     spec.realizations, sweep, workers=spec.workers)
        sweep_col = sweep
        sweep_name = "rate_target"
    else:
        raise ConfigError(f"unknown ordering metric {metric!r}")
    fields = [sweep_name, "est_a", "est_b", "indicator_violations",
              "p_multi_a", "p_multi_b", "count_violations", "n"]
    rows = []
    for val, point in zip(sweep_col, report.points):
        rows.append([val, point.estimate1.value, point.estimate2.value,
                     point.indicator_violations, point.prob_multi_candidate1,
                     point.prob_multi_candidate2, point.count_violations,
                     report.n_realizations])
    md = _base_metadata(spec)
    md["metric"] = metric
    md["technique_a"] = tech_a
    md["technique_b"] = tech_b
    md["predicted_better"] = "a" if report.predicted_better == 1 else "b"
    md["bs_sir_violations"] = report.bs_sir_violations
    md["bs_total"] = report.bs_total
    emit_figure_data("ordering", fields, rows, md, spec.out)
    return [spec.out]


def run(spec: ExperimentSpec) -> list[str]:
    """Run one experiment; returns the list of files written."""
    if spec.kind not in EXPERIMENT_KINDS:
        raise ConfigError(f"unknown experiment kind {spec.kind!r}")
    if spec.kind != "ordering" or not spec.ccdf_pairs:
        if spec.config is None:
            raise ConfigError(f"{spec.kind} needs a network configuration")
        validate(spec.config)
        if spec.realizations < 1:
            raise ConfigError("realizations must be >= 1")
    if spec.kind == "coverage_sweep":
        return _run_coverage_like(spec, with_bound=False)
    if spec.kind == "bound_vs_mc":
        return _run_coverage_like(spec, with_bound=True)
    if spec.kind == "candidate_count":
        return _run_candidate_count(spec)
    if spec.kind == "ase_compare":
        return _run_ase_compare(spec)
    if spec.kind == "theta_sweep":
        return _run_theta_sweep(spec)
    return _run_ordering(spec)


# ----------------------------------------------------------------------
# reproduce specs bundled as package data

def _spec_from_json(data: dict, overrides) -> ExperimentSpec:
    config, placement = (None, None)
    if "config" in data:
        config, placement = config_from_dict(data["config"])
    curves = tuple((c["label"], c.get("techniques"), c.get("targets_db"),
                    float(c.get("density_scale", 1.0)))
                   for c in data.get("curves", ()))
    return ExperimentSpec(
        kind=data["kind"],
        out=overrides.get("out") or data.get("out", "experiment.csv"),
        config=config,
        placement=placement,
        seed=overrides.get("seed") if overrides.get("seed") is not None else data.get("seed", 1),
        realizations=(overrides.get("realizations")
                      if overrides.get("realizations") is not None
                      else data.get("realizations", DEFAULT_REALIZATIONS)),
        workers=overrides.get("workers") or 1,
        sweep_db=tuple(data["sweep_db"]) if "sweep_db" in data else None,
        theta_axis=tuple(data["theta_axis"]) if "theta_axis" in data else None,
        theta_tier=data.get("theta_tier", 1),
        paired=data.get("paired", False),
        curves=curves,
        ccdf_pairs=tuple(tuple(p) for p in data.get("ccdf_pairs", ())),
        compare=tuple(data["compare"]) if "compare" in data else None,
        rate_sweep=tuple(data["rate_sweep"]) if "rate_sweep" in data else None,
    )


def reproduce_names() -> list[str]:
    root = resources.files("hetnetsim").joinpath("reproduce_specs")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_reproduce_spec(name: str, overrides) -> ExperimentSpec:
    root = resources.files("hetnetsim").joinpath("reproduce_specs")
    candidate = root.joinpath(f"{name}.json")
    try:
        text = candidate.read_text()
    except FileNotFoundError:
        raise ConfigError(f"no reproduce spec named {name!r}; "
                          f"available: {', '.join(reproduce_names())}")
    return _spec_from_json(json.loads(text), overrides)


def _verify(config_path: str, csv_path: str) -> int:
    config, _ = load_config(config_path)
    digest = config_digest(config)
    found = None
    with open(csv_path) as fh:
        for line in fh:
            if line.startswith("# config_digest="):
                found = line.strip().split("=", 1)[1]
                break
    if found is None:
        print(f"{csv_path}: no config digest recorded")
        return 1
    if found != digest:
        print(f"{csv_path}: digest mismatch (file {found}, config {digest})")
        return 1
    print(f"{csv_path}: digest {digest} matches {config_path}")
    return 0


# ----------------------------------------------------------------------
# argument parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_common(p: argparse.ArgumentParser, needs_config=True):
    if needs_config:
        p.add_argument("--config", required=True, help="network configuration (JSON)")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--realizations", type=int, default=DEFAULT_REALIZATIONS)
    p.add_argument("--workers", type=int,
                   default=int(os.environ.get("HETNETSIM_WORKERS", os.cpu_count() or 1)))
    p.add_argument("--out", default=None, help="output CSV path")
    p.add_argument("--paired", action="store_true",
                   help="reuse sampling streams across curves for paired comparisons")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hetnetsim",
                     description="coverage / rate / ASE experiments for "
                                 "multi-antenna multi-tier networks")
    parser.add_argument("--version", action="version", version=f"hetnetsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for kind, needs_sweep in (("coverage-sweep", True), ("bound-vs-mc", True),
                              ("candidate-count", True), ("ase-compare", True)):
        p = sub.add_parser(kind, help=f"run a {kind.replace('-', ' ')} experiment")
        _add_common(p)
        p.add_argument("--sweep-db", nargs=3, type=float, required=needs_sweep,
                       metavar=("START", "STOP", "STEP"),
                       help="target SIR sweep in dB, applied to every tier")

    p = sub.add_parser("theta-sweep", help="coverage vs open-access fraction of one tier")
    _add_common(p)
    p.add_argument("--theta", nargs=3, type=float, required=True,
                   metavar=("START", "STOP", "STEP"))
    p.add_argument("--tier", type=int, default=1, help="tier to split (default 1)")

    p = sub.add_parser("ordering", help="dominance checks: exact CCDFs or coupled paired MC")
    _add_common(p, needs_config=False)
    p.add_argument("--config", default=None)
    p.add_argument("--ccdf", action="append", default=None, metavar="K,M",
                   help="emit the exact CCDF of Gamma(K)/Gamma(M); repeatable")
    p.add_argument("--technique-a", default=None, help="siso | su_bf:M | sdma:M[:U]")
    p.add_argument("--technique-b", default=None)
    p.add_argument("--metric", choices=("coverage", "rate"), default="coverage")
    p.add_argument("--sweep-db", nargs=3, type=float, default=None,
                   metavar=("START", "STOP", "STEP"))
    p.add_argument("--rate-sweep", nargs=3, type=float, default=None,
                   metavar=("START", "STOP", "STEP"))

    p = sub.add_parser("reproduce", help="run a bundled experiment spec")
    p.add_argument("name", nargs="?", default=None,
                   help="spec name; omit to list available specs")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--realizations", type=int, default=None)
    p.add_argument("--workers", type=int,
                   default=int(os.environ.get("HETNETSIM_WORKERS", os.cpu_count() or 1)))
    p.add_argument("--out", default=None)

    p = sub.add_parser("verify", help="check a CSV's config digest against a config file")
    p.add_argument("--config", required=True)
    p.add_argument("csv", help="CSV produced by this tool")
    return parser


def _default_out(command: str) -> str:
    return command.replace("-", "_") + ".csv"


def _dispatch(args) -> int:
    if args.command == "verify":
        return _verify(args.config, args.csv)

    if args.command == "reproduce":
        if args.name is None:
            print("available reproduce specs:", ", ".join(reproduce_names()))
            return 0
        overrides = {"seed": args.seed, "realizations": args.realizations,
                     "workers": args.workers, "out": args.out}
        spec = load_reproduce_spec(args.name, overrides)
        written = run(spec)
        for path in written:
            print(f"wrote {path}")
        return 0

    config, placement = (None, None)
    if getattr(args, "config", None):
        config, placement = load_config(args.config)

    kind = args.command.replace("-", "_")
    spec_kwargs = dict(
        kind=kind,
        out=args.out or _default_out(args.command),
        config=config,
        placement=placement,
        seed=args.seed,
        realizations=args.realizations,
        workers=args.workers,
        paired=getattr(args, "paired", False),
        sweep_db=tuple(args.sweep_db) if getattr(args, "sweep_db", None) else None,
    )
    if args.command == "theta-sweep":
        spec_kwargs["theta_axis"] = tuple(args.theta)
        spec_kwargs["theta_tier"] = args.tier
    if args.command == "ordering":
        if args.ccdf:
            pairs = []
            for text in args.ccdf:
                k, m = text.split(",")
                pairs.append((int(k), int(m)))
            spec_kwargs["ccdf_pairs"] = tuple(pairs)
        elif args.technique_a and args.technique_b:
            spec_kwargs["compare"] = (args.technique_a, args.technique_b, args.metric)
            spec_kwargs["rate_sweep"] = (tuple(args.rate_sweep)
                                         if args.rate_sweep else None)
        else:
            raise ConfigError("ordering needs --ccdf pairs or both --technique-a "
                              "and --technique-b")
    spec = ExperimentSpec(**spec_kwargs)
    written = run(spec)
    for path in written:
        print(f"wrote {path}")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except (ConfigError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except (OSError, RuntimeError) as exc:
        sys.stderr.write(f"runtime error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
