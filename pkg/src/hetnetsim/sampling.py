"""Random base-station layouts and channel-power marks.

A realization places every tier's stations on a disc centred on the typical
user (evaluating at the origin is justified for stationary layouts) and
attaches two Gamma channel-power marks per station: ``direct_mark`` with the
tier's direct-link shape delta and ``interference_mark`` with shape psi.
Marks are built as sums of unit exponentials drawn from per-(seed,
realization, tier, slot, role) counter-based streams, so

* the same (seed, index) always reproduces the same realization, bit for bit;
* two configurations that differ only in their Gamma shapes share every
  exponential, which turns distributional dominance into a pointwise one
  (the coupling used by the ordering checks).

Single-antenna tiers have no precoding, so the channel seen when a station
serves and when it interferes is physically the same: one exp(1) draw fills
both mark fields.  ``proof_coupling=True`` disables that tie and draws the
two fields from their separate role streams regardless; the paired ordering
checks need this, because a tied mark cannot be simultaneously
prefix-coupled to a larger direct shape and a larger interfering shape.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Union

import numpy as np

from . import streams
from .model import NetworkConfig, config_digest, validate

__all__ = [
    "PlacementKind",
    "BsRecord",
    "Realization",
    "hex_lattice_spacing",
    "sample_ppp_tier",
    "sample_hex_tier",
    "sample_gamma_mark",
    "sample_realization",
    "write_realization_csv",
]


class PlacementKind(str, enum.Enum):
    PPP = "ppp"
    HEX_GRID = "hex"


PlacementSpec = Union[None, PlacementKind, Sequence[PlacementKind]]


@dataclass(frozen=True)
class BsRecord:
    """One base station as seen from the origin."""

    tier_index: int
    distance: float
    direct_mark: float
    interference_mark: float


@dataclass(frozen=True)
class Realization:
    """One sampled layout, stored as per-station column arrays.

    Stations are ordered tier by tier, and within a tier in generation
    order, so slot indices (and therefore mark streams) are stable.
    """

    tier_index: np.ndarray
    distance: np.ndarray
    direct_mark: np.ndarray
    interference_mark: np.ndarray
    seed_info: tuple[int, int]
    config_digest: str

    def __len__(self) -> int:
        return self.distance.shape[0]

    def tier_counts(self, n_tiers: int) -> np.ndarray:
        return np.bincount(self.tier_index, minlength=n_tiers)

    def records(self) -> Iterator[BsRecord]:
        for k, r, h, g in zip(self.tier_index, self.distance,
                              self.direct_mark, self.interference_mark):
            yield BsRecord(int(k), float(r), float(h), float(g))


def _resolve_placement(placement: PlacementSpec, n_tiers: int) -> list[PlacementKind]:
    if placement is None:
        return [PlacementKind.PPP] * n_tiers
    if isinstance(placement, PlacementKind):
        return [placement] * n_tiers
    kinds = [PlacementKind(p) for p in placement]
    if len(kinds) != n_tiers:
        raise ValueError(f"placement list has {len(kinds)} entries for {n_tiers} tiers")
    return kinds


def sample_ppp_tier(density: float, radius: float,
                    rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Homogeneous Poisson layout on a disc: (radii, angles).

    Count ~ Poisson(density * pi * radius^2); given the count, points are
    i.i.d. uniform on the disc (r = radius * sqrt(U)).
    """
    if density < 0:
        raise ValueError(f"density must be >= 0, got {density}")
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    if density == 0:
        return np.empty(0), np.empty(0)
    n = rng.poisson(density * math.pi * radius * radius)
    r = radius * np.sqrt(rng.random(n))
    theta = 2.0 * math.pi * rng.random(n)
    return r, theta


def hex_lattice_spacing(density: float) -> float:
    """Nearest-neighbour spacing d of a hexagonal lattice with the given density.

    Each lattice cell has area sqrt(3)/2 * d^2, so density = 2 / (sqrt(3) d^2).
    """
    if density <= 0:
        raise ValueError(f"hex placement requires density > 0, got {density}")
    return math.sqrt(2.0 / (math.sqrt(3.0) * density))


def sample_hex_tier(density: float, radius: float, rng: np.random.Generator,
                    offset: Optional[tuple[float, float]] = None,
                    rotation: Optional[float] = None) -> tuple[np.ndarray, np.ndarray]:
    """Stationarized hexagonal lattice on a disc: (radii, angles).

    The lattice is translated by a uniform offset inside one cell and
    rotated uniformly, so statistics observed at the origin match those of a
    typical point.  ``offset`` (cell coordinates in [0,1)^2) and ``rotation``
    are overridable for deterministic geometry tests.
    """
    d = hex_lattice_spacing(density)
    if offset is None:
        u, v = rng.random(), rng.random()
    else:
        u, v = offset
    if rotation is None:
        rotation = 2.0 * math.pi * rng.random()
    # basis a1 = d*(1, 0), a2 = d*(1/2, sqrt(3)/2)
    half_h = d * math.sqrt(3.0) / 2.0
    reach = radius + 2.0 * d
    n_max = int(math.ceil(reach / half_h))
    m_max = int(math.ceil(reach / d + n_max / 2.0)) + 1
    m_idx, n_idx = np.meshgrid(np.arange(-m_max, m_max + 1),
                               np.arange(-n_max, n_max + 1), indexing="ij")
    x = d * (m_idx + 0.5 * n_idx + u + 0.5 * v)
    y = half_h * (n_idx + v)
    rr = np.hypot(x, y).ravel()
    ang = np.arctan2(y, x).ravel() + rotation
    keep = rr <= radius
    return rr[keep], np.mod(ang[keep], 2.0 * math.pi)


def sample_gamma_mark(shape: int, rng: np.random.Generator) -> float:
    """One Gamma(shape, 1) draw as the sum of ``shape`` unit exponentials.

    Built this way (rather than by a rejection sampler) so that two marks of
    different shapes drawn from generators with the same key share their
    exponential prefix and are therefore pointwise ordered.
    """
    if shape < 1:
        raise ValueError(f"shape must be >= 1, got {shape}")
    return float(rng.standard_exponential(shape).sum())


def _tier_marks(seed: int, index: int, tier_idx: int, count: int,
                delta: int, psi: int, tie_single_antenna: bool) -> tuple[np.ndarray, np.ndarray]:
    if count == 0:
        return np.empty(0), np.empty(0)
    if tie_single_antenna:
        g = streams.exponential_matrix(seed, index, tier_idx,
                                       streams.ROLE_INTERFERENCE, count, 1)[:, 0]
        return g.copy(), g
    # cumsum keeps prefix sums monotone in the shape even after rounding,
    # which the coupled ordering checks rely on
    h = streams.exponential_matrix(seed, index, tier_idx,
                                   streams.ROLE_DIRECT, count, delta).cumsum(axis=1)[:, -1]
    g = streams.exponential_matrix(seed, index, tier_idx,
                                   streams.ROLE_INTERFERENCE, count, psi).cumsum(axis=1)[:, -1]
    return h, g


def sample_realization(config: NetworkConfig, placement: PlacementSpec = None,
                       seed: int = 0, index: int = 0, *,
                       proof_coupling: bool = False) -> Realization:
    """Sample one layout with marks; fully determined by (seed, index)."""
    validate(config)
    kinds = _resolve_placement(placement, len(config.tiers))
    radius = config.radius()
    tier_chunks, dist_chunks, h_chunks, g_chunks = [], [], [], []
    for k, tier in enumerate(config.tiers):
        if tier.density <= 0:
            continue
        rng = streams.location_generator(seed, index, k)
        if kinds[k] == PlacementKind.PPP:
            r, _ = sample_ppp_tier(tier.density, radius, rng)
        else:
            r, _ = sample_hex_tier(tier.density, radius, rng)
        h, g = _tier_marks(seed, index, k, r.shape[0], tier.delta, tier.users_served,
                           tie_single_antenna=tier.is_siso and not proof_coupling)
        tier_chunks.append(np.full(r.shape[0], k, dtype=np.int64))
        dist_chunks.append(r)
        h_chunks.append(h)
        g_chunks.append(g)
    if tier_chunks:
        tiers = np.concatenate(tier_chunks)
        dist = np.concatenate(dist_chunks)
        h = np.concatenate(h_chunks)
        g = np.concatenate(g_chunks)
    else:
        tiers = np.empty(0, dtype=np.int64)
        dist = h = g = np.empty(0)
    return Realization(tier_index=tiers, distance=dist, direct_mark=h,
                       interference_mark=g, seed_info=(seed, index),
                       config_digest=config_digest(config))


def write_realization_csv(realization: Realization, path) -> None:
    """Debug dump: one row per station (tier, distance, h, g)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tier", "distance", "direct_mark", "interference_mark"])
        for rec in realization.records():
            writer.writerow([rec.tier_index, repr(rec.distance),
                             repr(rec.direct_mark), repr(rec.interference_mark)])
