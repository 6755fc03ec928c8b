"""Stochastic-dominance checks: exact CCDF comparisons and coupled paired runs.

Two kinds of evidence are produced for ordering claims between shape
profiles ({delta_k}, {psi_k}) and ({delta'_k}, {psi'_k}):

* exact: the ratio Gamma(k1)/Gamma(m1) first-order dominates
  Gamma(k2)/Gamma(m2) when k1 >= k2 and m1 <= m2; ``check_ccdf_dominance``
  evaluates the exact CCDFs on a grid and classifies the relation,
  including genuine crossings (a high-shape ratio concentrates around its
  mean and cannot be dominated by a low-shape one even when the means are
  ordered).

* pathwise: paired simulations share every exponential draw across the two
  systems, so when the condition set holds, each station's SIR in the
  better-shaped system is >= its SIR in the other system realization by
  realization.  This turns a distributional claim into a zero-violation
  assertion immune to Monte-Carlo noise.  Single-antenna tiers are coupled
  through separate direct/interfering streams here (see sampling notes); a
  tied mark cannot be prefix-coupled in both directions at once.

When the condition set holds in neither direction the checks refuse to
predict rather than extrapolate.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .model import ConfigError, NetworkConfig, validate
from .montecarlo import (CoverageEstimate, DEFAULT_REALIZATIONS, paired_sweep,
                         rate_target_matrix, target_matrix, wilson_interval)
from .sampling import PlacementSpec
from .specfun import GammaRatioParams, gamma_ratio_ccdf

__all__ = [
    "Relation",
    "DominanceVerdict",
    "OrderingClaim",
    "OrderingPoint",
    "OrderingReport",
    "OrderingPreconditionError",
    "ratio_dominance_condition",
    "default_dominance_grid",
    "check_ccdf_dominance",
    "apply_shape_profile",
    "check_coverage_ordering",
    "check_rate_ordering",
]

DOMINANCE_TOLERANCE = 1e-9


class OrderingPreconditionError(ValueError):
    """The claim's condition set does not hold; no prediction is made."""


class Relation(str, enum.Enum):
    DOMINATES = "dominates"
    DOMINATED = "dominated"
    CROSSING = "crossing"
    INDISTINGUISHABLE = "indistinguishable"


@dataclass(frozen=True)
class DominanceVerdict:
    """Outcome of a CCDF comparison on a grid.

    ``max_violation`` is the largest deficit CCDF2 - CCDF1 observed, i.e.
    how far the first distribution fell below the second anywhere.
    """

    relation: Relation
    max_violation: float
    grid: tuple[float, ...]


def ratio_dominance_condition(k1: int, m1: int, k2: int, m2: int) -> bool:
    """Sufficient condition for Gamma(k1)/Gamma(m1) >=st Gamma(k2)/Gamma(m2)."""
    for v in (k1, m1, k2, m2):
        if v < 1:
            raise ValueError("shape parameters must be >= 1")
    return k1 >= k2 and m1 <= m2


def default_dominance_grid() -> np.ndarray:
    return np.logspace(-3.0, 3.0, 200)


def check_ccdf_dominance(params1: GammaRatioParams, params2: GammaRatioParams,
                         grid: Optional[Sequence[float]] = None,
                         tolerance: float = DOMINANCE_TOLERANCE) -> DominanceVerdict:
    """Compare exact CCDFs pointwise on a grid.

    ``dominates`` requires CCDF1 >= CCDF2 - tolerance everywhere; requiring
    violations in both directions to exceed the tolerance separates genuine
    crossings from roundoff.
    """
    g = default_dominance_grid() if grid is None else np.asarray(grid, dtype=float)
    if g.size == 0 or np.any(np.diff(g) <= 0):
        raise ValueError("grid must be non-empty and strictly increasing")
    s1 = gamma_ratio_ccdf(params1, g)
    s2 = gamma_ratio_ccdf(params2, g)
    deficit_1 = float(np.max(s2 - s1, initial=0.0))   # where 1 falls below 2
    deficit_2 = float(np.max(s1 - s2, initial=0.0))
    dom_12 = deficit_1 <= tolerance
    dom_21 = deficit_2 <= tolerance
    if dom_12 and dom_21:
        relation = (Relation.DOMINATES if deficit_1 == 0.0 and deficit_2 == 0.0
                    else Relation.INDISTINGUISHABLE)
    elif dom_12:
        relation = Relation.DOMINATES
    elif dom_21:
        relation = Relation.DOMINATED
    else:
        relation = Relation.CROSSING
    return DominanceVerdict(relation=relation, max_violation=max(deficit_1, 0.0),
                            grid=tuple(g))


@dataclass(frozen=True)
class OrderingClaim:
    """Two per-tier shape profiles to be ordered."""

    deltas1: tuple[int, ...]
    psis1: tuple[int, ...]
    deltas2: tuple[int, ...]
    psis2: tuple[int, ...]

    def __post_init__(self):
        n = len(self.deltas1)
        if not (len(self.psis1) == len(self.deltas2) == len(self.psis2) == n):
            raise ValueError("profiles must cover the same tiers")
        for d, p in zip(self.deltas1 + self.deltas2, self.psis1 + self.psis2):
            if d < 1 or p < 1:
                raise ValueError("shape parameters must be >= 1")

    def predicted_better(self, delta_indices: Sequence[int]) -> Optional[int]:
        """1 or 2 when the condition set orders the systems, else None.

        The direct-shape condition applies on ``delta_indices`` (the allowed
        tiers; all tiers in open access), the interfering-shape condition on
        every tier.
        """
        first = (all(self.deltas1[k] >= self.deltas2[k] for k in delta_indices)
                 and all(p1 <= p2 for p1, p2 in zip(self.psis1, self.psis2)))
        second = (all(self.deltas2[k] >= self.deltas1[k] for k in delta_indices)
                  and all(p2 <= p1 for p1, p2 in zip(self.psis1, self.psis2)))
        if first:
            return 1
        if second:
            return 2
        return None


def apply_shape_profile(config: NetworkConfig, deltas: Sequence[int],
                        psis: Sequence[int]) -> NetworkConfig:
    """Rewrite each tier's antennas/users to realize the given shape profile."""
    if len(deltas) != len(config.tiers) or len(psis) != len(config.tiers):
        raise ConfigError("profile length must match the tier count")
    tiers = tuple(
        replace(t, antennas=int(d) + int(p) - 1, users_served=int(p))
        for t, d, p in zip(config.tiers, deltas, psis))
    return validate(replace(config, tiers=tiers))


@dataclass(frozen=True)
class OrderingPoint:
    """Paired comparison at one sweep value (claim-order estimates)."""

    sweep_value: float
    estimate1: CoverageEstimate
    estimate2: CoverageEstimate
    indicator_violations: int
    prob_multi_candidate1: float
    prob_multi_candidate2: float
    count_violations: int


@dataclass(frozen=True)
class OrderingReport:
    claim: OrderingClaim
    metric: str
    predicted_better: int
    points: tuple[OrderingPoint, ...]
    bs_sir_violations: int
    bs_total: int
    n_realizations: int

    @property
    def pathwise_clean(self) -> bool:
        return (self.bs_sir_violations == 0
                and all(p.indicator_violations == 0 for p in self.points)
                and all(p.count_violations == 0 for p in self.points))


def _run_paired(claim: OrderingClaim, config: NetworkConfig, metric: str,
                thresholds: np.ndarray, sweep_values: Sequence[float],
                placement: PlacementSpec, seed: int, n: int,
                allowed_tiers: Optional[Sequence[int]], workers: int) -> OrderingReport:
    validate(config)
    allowed = tuple(allowed_tiers) if allowed_tiers is not None else config.open_tiers()
    direction = claim.predicted_better(allowed)
    if direction is None:
        raise OrderingPreconditionError(
            "no prediction: neither profile dominates the other on the "
            f"relevant tiers (deltas {claim.deltas1} vs {claim.deltas2}, "
            f"psis {claim.psis1} vs {claim.psis2})")
    cfg1 = apply_shape_profile(config, claim.deltas1, claim.psis1)
    cfg2 = apply_shape_profile(config, claim.deltas2, claim.psis2)
    better, worse = (cfg1, cfg2) if direction == 1 else (cfg2, cfg1)
    tallies = paired_sweep(better, worse, placement, seed, n, thresholds,
                           allowed_tiers, workers)
    points = []
    for i, val in enumerate(sweep_values):
        cov_b = int(tallies["cov_hi"][i])
        cov_w = int(tallies["cov_lo"][i])
        est_b = CoverageEstimate(cov_b / n, *wilson_interval(cov_b, n), n)
        est_w = CoverageEstimate(cov_w / n, *wilson_interval(cov_w, n), n)
        est1, est2 = (est_b, est_w) if direction == 1 else (est_w, est_b)
        xb = tallies["xgt1_hi"][i] / n
        xw = tallies["xgt1_lo"][i] / n
        x1, x2 = (xb, xw) if direction == 1 else (xw, xb)
        points.append(OrderingPoint(
            sweep_value=float(val), estimate1=est1, estimate2=est2,
            indicator_violations=int(tallies["indicator_violations"][i]),
            prob_multi_candidate1=float(x1), prob_multi_candidate2=float(x2),
            count_violations=int(tallies["count_violations"][i])))
    return OrderingReport(claim=claim, metric=metric, predicted_better=direction,
                          points=tuple(points), bs_sir_violations=int(tallies["bs_violations"]),
                          bs_total=int(tallies["bs_total"]), n_realizations=n)


def check_coverage_ordering(claim: OrderingClaim, config: NetworkConfig,
                            placement: PlacementSpec = None, seed: int = 0,
                            n: int = DEFAULT_REALIZATIONS,
                            sweep_targets: Optional[Sequence[float]] = None,
                            allowed_tiers: Optional[Sequence[int]] = None,
                            workers: int = 1) -> OrderingReport:
    """Coupled paired coverage comparison over a sweep of linear SIR targets.

    The predicted-better system's coverage indicator must dominate pathwise;
    the report counts violations (zero for a correct claim) next to the
    per-point estimates.
    """
    if sweep_targets is None:
        sweep_targets = [t.target_sir for t in config.tiers[:1]]
        thresholds = target_matrix(config)
    else:
        thresholds = target_matrix(config, sweep_targets)
    return _run_paired(claim, config, "coverage", thresholds, list(sweep_targets),
                       placement, seed, n, allowed_tiers, workers)


def check_rate_ordering(claim: OrderingClaim, config: NetworkConfig,
                        placement: PlacementSpec = None, seed: int = 0,
                        n: int = DEFAULT_REALIZATIONS,
                        sweep_rates: Optional[Sequence[float]] = None,
                        resource_fractions2: Optional[Sequence[float]] = None,
                        allowed_tiers: Optional[Sequence[int]] = None,
                        workers: int = 1) -> OrderingReport:
    """Coupled paired rate-coverage comparison over a sweep of rate targets.

    The ordering claim presumes both systems grant each user the same
    resource fraction per tier, so differing fractions are refused.
    """
    if resource_fractions2 is not None:
        own = tuple(t.resource_fraction for t in config.tiers)
        if tuple(resource_fractions2) != own:
            raise OrderingPreconditionError(
                "rate ordering requires equal per-tier resource fractions; "
                f"got {own} vs {tuple(resource_fractions2)}")
    if sweep_rates is None:
        sweep_rates = [t.rate_target for t in config.tiers[:1]]
        thresholds = rate_target_matrix(config)
    else:
        thresholds = rate_target_matrix(config, sweep_rates)
    return _run_paired(claim, config, "rate", thresholds, list(sweep_rates),
                       placement, seed, n, allowed_tiers, workers)
