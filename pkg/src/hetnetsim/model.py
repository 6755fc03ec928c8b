"""Network and tier configuration.

Only ratios of transmit powers and of deployment densities matter in the
interference-limited regime, so the absolute units of ``power`` and
``density`` are arbitrary; pick any convenient scale and keep it consistent
within a configuration.
"""

from __future__ import annotations

import enum
import hashlib
import json
import math
from dataclasses import dataclass, replace
from typing import Optional

__all__ = [
    "Access",
    "TransmissionTechnique",
    "TierConfig",
    "NetworkConfig",
    "ThetaSplit",
    "ConfigError",
    "technique_shapes",
    "validate",
    "split_theta",
    "config_digest",
    "db_to_linear",
    "linear_to_db",
]

DEFAULT_MIN_EXPECTED_BS = 500


class ConfigError(ValueError):
    """Raised when a configuration violates an invariant."""


class Access(str, enum.Enum):
    OPEN = "open"
    CLOSED = "closed"


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    return 10.0 * math.log10(value)


@dataclass(frozen=True)
class TransmissionTechnique:
    """How a tier uses its antennas: 'siso', 'su_bf' or 'sdma'.

    For SDMA the number of users sharing a resource block must be given
    explicitly; 2 <= users <= antennas, and users == antennas is the "full"
    case where every antenna serves a distinct user.
    """

    tag: str
    users: Optional[int] = None

    @classmethod
    def siso(cls) -> "TransmissionTechnique":
        return cls("siso")

    @classmethod
    def su_bf(cls) -> "TransmissionTechnique":
        return cls("su_bf")

    @classmethod
    def sdma(cls, users: int) -> "TransmissionTechnique":
        return cls("sdma", users)


def technique_shapes(technique: TransmissionTechnique, antennas: int) -> tuple[int, int]:
    """Map (technique, antenna count M) to Gamma shapes (delta, psi).

    delta is the direct-link shape M - psi + 1 under zero-forcing precoding
    with perfect CSI; psi is the interfering-link shape (users served per
    resource block).
    """
    if antennas < 1:
        raise ConfigError(f"antennas must be >= 1, got {antennas}")
    if technique.tag == "siso":
        if antennas != 1:
            raise ConfigError("siso requires exactly one antenna")
        return 1, 1
    if technique.tag == "su_bf":
        if antennas < 2:
            raise ConfigError("su_bf requires at least two antennas")
        return antennas, 1
    if technique.tag == "sdma":
        users = technique.users
        if users is None or users < 2:
            raise ConfigError("sdma requires an explicit users count >= 2")
        if users > antennas:
            raise ConfigError("users_served exceeds antennas")
        return antennas - users + 1, users
    raise ConfigError(f"unknown transmission technique {technique.tag!r}")


@dataclass(frozen=True)
class TierConfig:
    """One class of base stations.

    power             per-user transmit power (linear; only ratios matter)
    density           stations per unit area (zero legalises inert tiers
                      produced by theta-splitting; they are skipped by the
                      samplers)
    target_sir        SIR threshold, linear
    antennas          transmit antennas M
    users_served      users per resource block psi (psi <= M)
    access            open | closed
    resource_fraction share of time-frequency resources per served user
    rate_target       per-user rate threshold used by rate coverage
    """

    power: float
    density: float
    target_sir: float
    antennas: int = 1
    users_served: int = 1
    access: Access = Access.OPEN
    resource_fraction: float = 1.0
    rate_target: float = 0.0

    @property
    def delta(self) -> int:
        """Direct-link Gamma shape M - psi + 1."""
        return self.antennas - self.users_served + 1

    @property
    def is_siso(self) -> bool:
        return self.antennas == 1

    @property
    def is_open(self) -> bool:
        return self.access == Access.OPEN


@dataclass(frozen=True)
class NetworkConfig:
    """An ordered collection of tiers plus propagation and window geometry.

    ``sim_radius`` fixes the simulation disc radius explicitly; when None the
    radius is chosen so every positive-density tier expects at least
    ``min_expected_bs_per_tier`` stations, which keeps window-edge effects
    below the Monte-Carlo noise floor at the default realization counts.
    """

    tiers: tuple[TierConfig, ...]
    path_loss_exponent: float
    sim_radius: Optional[float] = None
    min_expected_bs_per_tier: int = DEFAULT_MIN_EXPECTED_BS

    def __post_init__(self):
        object.__setattr__(self, "tiers", tuple(self.tiers))

    def open_tiers(self) -> tuple[int, ...]:
        return tuple(k for k, t in enumerate(self.tiers) if t.is_open)

    def radius(self) -> float:
        if self.sim_radius is not None:
            return float(self.sim_radius)
        positive = [t.density for t in self.tiers if t.density > 0]
        if not positive:
            raise ConfigError("cannot size a simulation window: all tiers have zero density")
        return math.sqrt(self.min_expected_bs_per_tier / (math.pi * min(positive)))


@dataclass(frozen=True)
class ThetaSplit:
    """Split instruction: fraction theta of one tier becomes open access."""

    tier_index: int
    open_fraction: float

    def __post_init__(self):
        if not 0.0 <= self.open_fraction <= 1.0:
            raise ConfigError(f"open_fraction must be in [0, 1], got {self.open_fraction}")


def validate(config: NetworkConfig) -> NetworkConfig:
    """Check every invariant; return the config unchanged if all hold.

    Idempotent: configurations are immutable, so validating twice is a
    no-op. The error message names the first violated invariant.
    """
    if not config.tiers:
        raise ConfigError("configuration needs at least one tier")
    if not config.path_loss_exponent > 2.0:
        raise ConfigError(
            f"path_loss_exponent must exceed 2 (got {config.path_loss_exponent}): "
            "the interference constant diverges otherwise")
    if config.sim_radius is not None and not config.sim_radius > 0:
        raise ConfigError(f"sim_radius must be positive, got {config.sim_radius}")
    if config.min_expected_bs_per_tier < 1:
        raise ConfigError("min_expected_bs_per_tier must be a positive integer")
    for k, tier in enumerate(config.tiers):
        where = f"tier {k}"
        if not tier.power > 0:
            raise ConfigError(f"{where}: power must be positive, got {tier.power}")
        if tier.density < 0:
            raise ConfigError(f"{where}: density must be non-negative, got {tier.density}")
        if not tier.target_sir > 0:
            raise ConfigError(f"{where}: target_sir must be positive, got {tier.target_sir}")
        if tier.antennas < 1:
            raise ConfigError(f"{where}: antennas must be >= 1, got {tier.antennas}")
        if tier.users_served < 1:
            raise ConfigError(f"{where}: users_served must be >= 1, got {tier.users_served}")
        if tier.users_served > tier.antennas:
            raise ConfigError(f"{where}: users_served exceeds antennas "
                              f"({tier.users_served} > {tier.antennas})")
        if not 0.0 < tier.resource_fraction <= 1.0:
            raise ConfigError(f"{where}: resource_fraction must be in (0, 1], "
                              f"got {tier.resource_fraction}")
        if tier.rate_target < 0:
            raise ConfigError(f"{where}: rate_target must be >= 0, got {tier.rate_target}")
        if not isinstance(tier.access, Access):
            raise ConfigError(f"{where}: access must be Access.OPEN or Access.CLOSED")
    return config


def split_theta(config: NetworkConfig, split: ThetaSplit) -> NetworkConfig:
    """Replace one tier by an open/closed pair with densities theta*lambda
    and (1-theta)*lambda.

    Total density is preserved exactly; every other tier parameter is
    copied.  Degenerate fractions (0 or 1) leave a zero-density sub-tier in
    place, which samplers skip.
    """
    if not 0 <= split.tier_index < len(config.tiers):
        raise ConfigError(f"tier_index {split.tier_index} out of range "
                          f"for {len(config.tiers)} tiers")
    theta = split.open_fraction
    original = config.tiers[split.tier_index]
    lam = original.density
    open_part = replace(original, density=theta * lam, access=Access.OPEN)
    closed_part = replace(original, density=lam - theta * lam, access=Access.CLOSED)
    tiers = (config.tiers[:split.tier_index]
             + (open_part, closed_part)
             + config.tiers[split.tier_index + 1:])
    return replace(config, tiers=tiers)


def _config_dict(config: NetworkConfig) -> dict:
    return {
        "path_loss_exponent": config.path_loss_exponent,
        "sim_radius": config.sim_radius,
        "min_expected_bs_per_tier": config.min_expected_bs_per_tier,
        "tiers": [
            {
                "power": t.power,
                "density": t.density,
                "target_sir": t.target_sir,
                "antennas": t.antennas,
                "users_served": t.users_served,
                "access": t.access.value,
                "resource_fraction": t.resource_fraction,
                "rate_target": t.rate_target,
            }
            for t in config.tiers
        ],
    }


def config_digest(config: NetworkConfig) -> str:
    """Stable hex digest of a configuration, stamped into every output."""
    canonical = json.dumps(_config_dict(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]
