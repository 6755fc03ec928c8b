"""Monte-Carlo estimators: coverage, rate coverage, candidate counts, ASE.

The typical user is covered when at least one station of an allowed tier
delivers SIR above that tier's target.  Noise is omitted throughout
(interference-limited regime).  Estimators tally integer per-realization
indicators, so merging partial tallies is order-insensitive and results do
not depend on the worker count.

Per-tier coverage splits the coverage event by crediting, among the
stations above target, the tier of the station maximizing SIR/target (ties
go to the lowest tier index).  The union event does not itself name a
serving station; this crediting rule is one consistent reading and is
recorded in the output metadata of the CLI.
"""

from __future__ import annotations

import math
import multiprocessing
from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import streams
from .model import ConfigError, NetworkConfig, validate
from .sampling import PlacementSpec, Realization, sample_realization

__all__ = [
    "CoverageEstimate",
    "PerTierCoverage",
    "CandidateCountHistogram",
    "DEFAULT_REALIZATIONS",
    "CREDITING_RULE",
    "wilson_interval",
    "sir_per_bs",
    "target_matrix",
    "rate_target_matrix",
    "sweep_tallies",
    "sweep_estimates",
    "ase_from_tallies",
    "estimate_coverage",
    "estimate_rate_coverage",
    "estimate_candidate_count",
    "estimate_ase",
    "sweep_candidate_tallies",
    "theta_sweep_estimates",
    "paired_sweep",
]

DEFAULT_REALIZATIONS = 20_000
CREDITING_RULE = "max-sir-over-target, ties to lowest tier"
_Z95 = 1.959963984540054


@dataclass(frozen=True)
class CoverageEstimate:
    """Estimate with a 95% Wilson interval."""

    value: float
    ci_low: float
    ci_high: float
    n_realizations: int

    @property
    def half_width(self) -> float:
        return (self.ci_high - self.ci_low) / 2.0


@dataclass(frozen=True)
class PerTierCoverage:
    """Coverage split by credited tier; entries sum to the overall value."""

    per_tier: tuple[float, ...]
    overall: float


@dataclass(frozen=True)
class CandidateCountHistogram:
    """Empirical distribution of the number of stations above target."""

    counts: dict[int, float]
    n_realizations: int

    def prob_greater(self, n: int) -> float:
        return sum(p for x, p in self.counts.items() if x > n)


def wilson_interval(successes: int, n: int) -> tuple[float, float]:
    """95% Wilson score interval; well behaved near 0 and 1."""
    if n <= 0:
        raise ValueError("interval needs at least one trial")
    p = successes / n
    z2 = _Z95 * _Z95
    denom = 1.0 + z2 / n
    centre = (p + z2 / (2.0 * n)) / denom
    half = _Z95 * math.sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom
    # the interval always contains the point estimate; guard the clamp
    # against rounding at the endpoints
    return max(0.0, min(p, centre - half)), min(1.0, max(p, centre + half))


def _powers(config: NetworkConfig) -> np.ndarray:
    return np.array([t.power for t in config.tiers])


def sir_per_bs(realization: Realization, config: NetworkConfig
               ) -> tuple[np.ndarray, np.ndarray]:
    """Per-station SIR: P_k h ||x||^-a over total received power minus own term.

    The denominator for station x uses x's own interference mark for the
    self-exclusion, so the whole vector costs O(n) via one precomputed sum.
    A station with no interferers gets the +inf sentinel.
    """
    alpha = config.path_loss_exponent
    tiers = realization.tier_index
    if tiers.size == 0:
        return tiers, np.empty(0)
    path = realization.distance ** -alpha
    p = _powers(config)[tiers]
    w = p * realization.interference_mark * path
    total = w.sum()
    num = p * realization.direct_mark * path
    denom = total - w
    with np.errstate(divide="ignore", invalid="ignore"):
        sir = np.where(denom > 0.0, num / denom, np.inf)
    return tiers, sir


def _sir_monotone(realization: Realization, config: NetworkConfig
                  ) -> tuple[np.ndarray, np.ndarray]:
    """SIR with prefix+suffix interference sums instead of total-minus-own.

    Equivalent up to rounding, but every floating-point operation is
    monotone in the marks, so coupled realizations keep sir_better >=
    sir_worse exactly, with zero tolerance.  Used by the paired checks.
    """
    alpha = config.path_loss_exponent
    tiers = realization.tier_index
    if tiers.size == 0:
        return tiers, np.empty(0)
    path = realization.distance ** -alpha
    p = _powers(config)[tiers]
    w = p * realization.interference_mark * path
    inclusive_suffix = np.cumsum(w[::-1])[::-1]
    prefix = np.concatenate(([0.0], np.cumsum(w)[:-1]))
    suffix = np.concatenate((inclusive_suffix[1:], [0.0]))
    denom = prefix + suffix
    num = p * realization.direct_mark * path
    with np.errstate(divide="ignore", invalid="ignore"):
        sir = np.where(denom > 0.0, num / denom, np.inf)
    return tiers, sir


def _allowed_lookup(config: NetworkConfig,
                    allowed_tiers: Optional[Sequence[int]]) -> np.ndarray:
    if allowed_tiers is None:
        allowed = config.open_tiers()
        if not allowed:
            raise ConfigError("coverage of a typical user needs at least one open-access tier")
    else:
        allowed = tuple(allowed_tiers)
        for k in allowed:
            if not 0 <= k < len(config.tiers):
                raise ConfigError(f"allowed tier index {k} out of range")
        if not allowed:
            raise ConfigError("allowed tier set must not be empty")
    mask = np.zeros(len(config.tiers), dtype=bool)
    mask[list(allowed)] = True
    return mask


def target_matrix(config: NetworkConfig,
                  sweep_targets: Optional[Sequence[float]] = None) -> np.ndarray:
    """(points, tiers) linear SIR thresholds.

    With no sweep, a single row of the per-tier configured targets; with a
    sweep, one row per linear value applied to every tier.
    """
    if sweep_targets is None:
        return np.array([[t.target_sir for t in config.tiers]])
    vals = np.asarray(sweep_targets, dtype=float)
    return np.repeat(vals[:, None], len(config.tiers), axis=1)


def rate_target_matrix(config: NetworkConfig,
                       sweep_rates: Optional[Sequence[float]] = None) -> np.ndarray:
    """SIR thresholds equivalent to per-tier rate targets.

    A station covers at rate T with resources O iff O*log2(1+SIR) > T, i.e.
    SIR > 2^(T/O) - 1.
    """
    fractions = np.array([t.resource_fraction for t in config.tiers])
    if sweep_rates is None:
        rates = np.array([[t.rate_target for t in config.tiers]])
    else:
        rates = np.repeat(np.asarray(sweep_rates, dtype=float)[:, None],
                          len(config.tiers), axis=1)
    return np.exp2(rates / fractions[None, :]) - 1.0


# ----------------------------------------------------------------------
# tally kernels (top-level so they pickle for worker processes)

def _coverage_chunk(payload):
    (config, placement, seed, thresholds, allowed_mask), lo, hi = payload
    n_pts, n_tiers = thresholds.shape
    covered = np.zeros(n_pts, dtype=np.int64)
    credit = np.zeros((n_pts, n_tiers), dtype=np.int64)
    served = np.zeros((n_pts, n_tiers), dtype=np.int64)
    rows = np.arange(n_pts)
    for index in range(lo, hi):
        real = sample_realization(config, placement, seed, index)
        tiers, sir = sir_per_bs(real, config)
        keep = allowed_mask[tiers]
        s, t = sir[keep], tiers[keep]
        if s.size == 0:
            continue
        thr = thresholds[:, t]
        ok = s[None, :] > thr
        cov = ok.any(axis=1)
        covered += cov
        # the serving station maximizes SIR over target among allowed
        # stations (ties to the lowest tier by array order); when the
        # realization is covered the server is necessarily above target
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = s[None, :] / thr
        server_tier = t[ratio.argmax(axis=1)]
        np.add.at(served, (rows, server_tier), 1)
        np.add.at(credit, (rows[cov], server_tier[cov]), 1)
    return covered, credit, served


def _count_chunk(payload):
    (config, placement, seed, thresholds, allowed_mask), lo, hi = payload
    n_pts = thresholds.shape[0]
    counters = [Counter() for _ in range(n_pts)]
    for index in range(lo, hi):
        real = sample_realization(config, placement, seed, index)
        tiers, sir = sir_per_bs(real, config)
        keep = allowed_mask[tiers]
        s, t = sir[keep], tiers[keep]
        if s.size == 0:
            exceed = np.zeros(n_pts, dtype=np.int64)
        else:
            exceed = (s[None, :] > thresholds[:, t]).sum(axis=1)
        for p in range(n_pts):
            counters[p][int(exceed[p])] += 1
    return counters


def _paired_chunk(payload):
    (cfg_hi, cfg_lo, placement, seed, thresholds, allowed_mask), lo, hi = payload
    n_pts = thresholds.shape[0]
    out = {
        "cov_hi": np.zeros(n_pts, dtype=np.int64),
        "cov_lo": np.zeros(n_pts, dtype=np.int64),
        "indicator_violations": np.zeros(n_pts, dtype=np.int64),
        "both": np.zeros(n_pts, dtype=np.int64),
        "xgt1_hi": np.zeros(n_pts, dtype=np.int64),
        "xgt1_lo": np.zeros(n_pts, dtype=np.int64),
        "count_violations": np.zeros(n_pts, dtype=np.int64),
        "bs_violations": 0,
        "bs_total": 0,
    }
    for index in range(lo, hi):
        r_hi = sample_realization(cfg_hi, placement, seed, index, proof_coupling=True)
        r_lo = sample_realization(cfg_lo, placement, seed, index, proof_coupling=True)
        tiers, sir_hi = _sir_monotone(r_hi, cfg_hi)
        _, sir_lo = _sir_monotone(r_lo, cfg_lo)
        keep = allowed_mask[tiers]
        s_hi, s_lo, t = sir_hi[keep], sir_lo[keep], tiers[keep]
        out["bs_violations"] += int((s_hi < s_lo).sum())
        out["bs_total"] += int(t.size)
        if t.size == 0:
            continue
        thr = thresholds[:, t]
        ok_hi = s_hi[None, :] > thr
        ok_lo = s_lo[None, :] > thr
        cov_hi = ok_hi.any(axis=1)
        cov_lo = ok_lo.any(axis=1)
        out["cov_hi"] += cov_hi
        out["cov_lo"] += cov_lo
        out["indicator_violations"] += cov_lo & ~cov_hi
        out["both"] += cov_lo & cov_hi
        x_hi = ok_hi.sum(axis=1)
        x_lo = ok_lo.sum(axis=1)
        out["xgt1_hi"] += x_hi > 1
        out["xgt1_lo"] += x_lo > 1
        out["count_violations"] += x_hi < x_lo
    return out


def _theta_chunk(payload):
    (config, placement, seed, split_tier, thetas, thresholds, allowed_mask), lo, hi = payload
    n_pts = len(thetas)
    covered = np.zeros(n_pts, dtype=np.int64)
    for index in range(lo, hi):
        real = sample_realization(config, placement, seed, index)
        tiers, sir = sir_per_bs(real, config)
        ok = sir > thresholds[0, tiers]
        base_allowed = allowed_mask[tiers] & (tiers != split_tier)
        split_sel = tiers == split_tier
        n_split = int(split_sel.sum())
        u = (streams.uniform_matrix(seed, index, split_tier,
                                    streams.ROLE_THINNING, n_split, 1)[:, 0]
             if n_split else np.empty(0))
        any_base = bool((ok & base_allowed).any())
        ok_split = ok[split_sel]
        for p, theta in enumerate(thetas):
            if any_base:
                covered[p] += 1
            elif n_split and bool((ok_split & (u < theta)).any()):
                covered[p] += 1
    return covered


def _chunk_ranges(n: int, workers: int) -> list[tuple[int, int]]:
    pieces = 1 if workers <= 1 else min(n, workers * 4)
    bounds = np.linspace(0, n, pieces + 1, dtype=int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def _run_chunks(kernel, static_args: tuple, n: int, workers: int) -> list:
    payloads = [(static_args, lo, hi) for lo, hi in _chunk_ranges(n, workers)]
    if workers > 1 and len(payloads) > 1:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(processes=workers) as pool:
            return pool.map(kernel, payloads)
    return [kernel(p) for p in payloads]


# ----------------------------------------------------------------------
# public estimators

def sweep_tallies(config: NetworkConfig, placement: PlacementSpec = None,
                  seed: int = 0, n: int = DEFAULT_REALIZATIONS,
                  thresholds: Optional[np.ndarray] = None,
                  allowed_tiers: Optional[Sequence[int]] = None,
                  workers: int = 1) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Integer tallies over n realizations: per threshold row, the covered
    count, the per-tier covered-and-served counts (a partition of the
    covered count), and the per-tier served counts regardless of coverage."""
    validate(config)
    if n < 1:
        raise ValueError("need at least one realization")
    if thresholds is None:
        thresholds = target_matrix(config)
    allowed_mask = _allowed_lookup(config, allowed_tiers)
    parts = _run_chunks(_coverage_chunk,
                        (config, placement, seed, thresholds, allowed_mask),
                        n, workers)
    covered = sum(p[0] for p in parts)
    credit = sum(p[1] for p in parts)
    served = sum(p[2] for p in parts)
    return covered, credit, served


def sweep_estimates(config: NetworkConfig, placement: PlacementSpec = None,
                    seed: int = 0, n: int = DEFAULT_REALIZATIONS,
                    thresholds: Optional[np.ndarray] = None,
                    allowed_tiers: Optional[Sequence[int]] = None,
                    workers: int = 1) -> list[tuple[CoverageEstimate, PerTierCoverage]]:
    """Coverage estimates for several threshold rows from one shared set of
    realizations (SIR is computed once per realization and compared against
    every row)."""
    if thresholds is None:
        thresholds = target_matrix(config)
    covered, credit, _ = sweep_tallies(config, placement, seed, n, thresholds,
                                       allowed_tiers, workers)
    results = []
    for p in range(thresholds.shape[0]):
        lo, hi = wilson_interval(int(covered[p]), n)
        est = CoverageEstimate(covered[p] / n, lo, hi, n)
        per = PerTierCoverage(tuple(credit[p] / n), covered[p] / n)
        results.append((est, per))
    return results


def estimate_coverage(config: NetworkConfig, placement: PlacementSpec = None,
                      seed: int = 0, n: int = DEFAULT_REALIZATIONS,
                      allowed_tiers: Optional[Sequence[int]] = None,
                      workers: int = 1) -> CoverageEstimate:
    """Probability that some allowed station beats its tier's SIR target."""
    [(est, _)] = sweep_estimates(config, placement, seed, n,
                                 target_matrix(config), allowed_tiers, workers)
    return est


def estimate_rate_coverage(config: NetworkConfig, placement: PlacementSpec = None,
                           seed: int = 0, n: int = DEFAULT_REALIZATIONS,
                           allowed_tiers: Optional[Sequence[int]] = None,
                           workers: int = 1) -> CoverageEstimate:
    """Probability that some allowed station delivers its tier's rate target."""
    [(est, _)] = sweep_estimates(config, placement, seed, n,
                                 rate_target_matrix(config), allowed_tiers, workers)
    return est


def estimate_candidate_count(config: NetworkConfig, placement: PlacementSpec = None,
                             seed: int = 0, n: int = DEFAULT_REALIZATIONS,
                             allowed_tiers: Optional[Sequence[int]] = None,
                             workers: int = 1) -> CandidateCountHistogram:
    """Distribution of the number of allowed stations above their targets."""
    validate(config)
    if n < 1:
        raise ValueError("need at least one realization")
    thresholds = target_matrix(config)
    allowed_mask = _allowed_lookup(config, allowed_tiers)
    parts = _run_chunks(_count_chunk,
                        (config, placement, seed, thresholds, allowed_mask),
                        n, workers)
    merged: Counter = Counter()
    for counters in parts:
        merged.update(counters[0])
    return CandidateCountHistogram(
        counts={x: c / n for x, c in sorted(merged.items())}, n_realizations=n)


def sweep_candidate_tallies(config: NetworkConfig, placement: PlacementSpec = None,
                            seed: int = 0, n: int = DEFAULT_REALIZATIONS,
                            thresholds: Optional[np.ndarray] = None,
                            allowed_tiers: Optional[Sequence[int]] = None,
                            workers: int = 1) -> list[CandidateCountHistogram]:
    """Candidate-count histograms for several threshold rows at once."""
    validate(config)
    if thresholds is None:
        thresholds = target_matrix(config)
    allowed_mask = _allowed_lookup(config, allowed_tiers)
    parts = _run_chunks(_count_chunk,
                        (config, placement, seed, thresholds, allowed_mask),
                        n, workers)
    out = []
    for p in range(thresholds.shape[0]):
        merged: Counter = Counter()
        for counters in parts:
            merged.update(counters[p])
        out.append(CandidateCountHistogram(
            counts={x: c / n for x, c in sorted(merged.items())}, n_realizations=n))
    return out


def ase_from_tallies(config: NetworkConfig, target_sirs: Sequence[float],
                     credit: np.ndarray, served: np.ndarray) -> float:
    """sum_k psi_k lambda_k log2(1+beta_k) * P(covered | served by tier k).

    The conditional per-tier coverage credit_k/served_k is what the ASE
    formula needs: lambda_k already accounts for how many tier-k stations
    there are, so the success probability must be conditional on attaching
    to that tier (for symmetric networks it is the same for every tier).
    """
    ase = 0.0
    for k, tier in enumerate(config.tiers):
        if served[k] == 0:
            continue
        conditional = credit[k] / served[k]
        ase += (tier.users_served * tier.density
                * math.log2(1.0 + target_sirs[k]) * conditional)
    return ase


def estimate_ase(config: NetworkConfig, placement: PlacementSpec = None,
                 seed: int = 0, n: int = DEFAULT_REALIZATIONS,
                 allowed_tiers: Optional[Sequence[int]] = None,
                 workers: int = 1) -> tuple[float, PerTierCoverage]:
    """Area spectral efficiency at the configured targets.

    Returns the ASE together with the per-tier coverage split (the credited
    partition, whose entries sum to the overall coverage probability).
    """
    covered, credit, served = sweep_tallies(config, placement, seed, n,
                                            target_matrix(config), allowed_tiers,
                                            workers)
    ase = ase_from_tallies(config, [t.target_sir for t in config.tiers],
                           credit[0], served[0])
    per = PerTierCoverage(tuple(credit[0] / n), int(covered[0]) / n)
    return ase, per


def theta_sweep_estimates(config: NetworkConfig, split_tier: int,
                          thetas: Sequence[float], placement: PlacementSpec = None,
                          seed: int = 0, n: int = DEFAULT_REALIZATIONS,
                          workers: int = 1) -> list[CoverageEstimate]:
    """Coverage when a fraction theta of one tier opens to the typical user.

    Implements the split as per-station thinning: each station of the split
    tier carries an independent uniform and is open access exactly when it
    falls below theta.  One shared set of realizations serves every theta,
    so the estimates are pathwise non-decreasing in theta and the sweep is
    far less noisy than independent runs; each point has the same marginal
    distribution as simulating the equivalent two-sub-tier configuration.
    """
    validate(config)
    if not 0 <= split_tier < len(config.tiers):
        raise ConfigError(f"split tier {split_tier} out of range")
    thetas = [float(t) for t in thetas]
    for t in thetas:
        if not 0.0 <= t <= 1.0:
            raise ConfigError(f"theta must be in [0, 1], got {t}")
    thresholds = target_matrix(config)
    # the split tier is (partially) open by construction; other tiers keep
    # their configured access
    mask = np.array([t.is_open for t in config.tiers])
    mask[split_tier] = True
    parts = _run_chunks(_theta_chunk,
                        (config, placement, seed, split_tier, thetas, thresholds, mask),
                        n, workers)
    covered = sum(parts)
    return [CoverageEstimate(int(c) / n, *wilson_interval(int(c), n), n)
            for c in covered]


def paired_sweep(config_better: NetworkConfig, config_worse: NetworkConfig,
                 placement: PlacementSpec = None, seed: int = 0,
                 n: int = DEFAULT_REALIZATIONS,
                 thresholds: Optional[np.ndarray] = None,
                 allowed_tiers: Optional[Sequence[int]] = None,
                 workers: int = 1) -> dict:
    """Coupled paired tallies for two configurations sharing all streams.

    Both configurations must have identical tier counts, densities, powers
    and geometry; they may differ only in their Gamma shape profiles.
    Realizations are built with ``proof_coupling=True`` so every exponential
    is shared and the per-station SIR of the better-shaped system is a
    pointwise upper bound, exactly, in floating point.
    """
    validate(config_better)
    validate(config_worse)
    if len(config_better.tiers) != len(config_worse.tiers):
        raise ConfigError("paired sweep needs the same number of tiers")
    for k, (a, b) in enumerate(zip(config_better.tiers, config_worse.tiers)):
        if a.density != b.density or a.power != b.power or a.access != b.access:
            raise ConfigError(f"tier {k}: paired sweep needs matching density, "
                              "power and access")
    if config_better.radius() != config_worse.radius():
        raise ConfigError("paired sweep needs matching simulation geometry")
    if thresholds is None:
        thresholds = target_matrix(config_better)
    allowed_mask = _allowed_lookup(config_better, allowed_tiers)
    parts = _run_chunks(_paired_chunk,
                        (config_better, config_worse, placement, seed,
                         thresholds, allowed_mask),
                        n, workers)
    merged = parts[0]
    for part in parts[1:]:
        for key, val in part.items():
            merged[key] = merged[key] + val
    merged["n_realizations"] = n
    return merged
