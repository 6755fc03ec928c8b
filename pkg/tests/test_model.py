import math
from dataclasses import replace

import pytest

from hetnetsim.model import (Access, ConfigError, NetworkConfig, ThetaSplit,
                             TierConfig, TransmissionTechnique, config_digest,
                             db_to_linear, linear_to_db, split_theta,
                             technique_shapes, validate)


def two_tier(antennas=4, users=4):
    return NetworkConfig(
        tiers=(TierConfig(power=1.0, density=1.0, target_sir=1.0,
                          antennas=antennas, users_served=users),
               TierConfig(power=0.01, density=2.0, target_sir=1.0,
                          antennas=antennas, users_served=users)),
        path_loss_exponent=3.8)


def test_validate_accepts_reference_config():
    cfg = validate(two_tier())
    assert [t.delta for t in cfg.tiers] == [1, 1]


def test_validate_rejects_users_over_antennas():
    cfg = two_tier(antennas=2, users=3)
    with pytest.raises(ConfigError, match="users_served exceeds antennas"):
        validate(cfg)


def test_validate_su_bf_delta():
    cfg = validate(two_tier(antennas=4, users=1))
    assert cfg.tiers[0].delta == 4


def test_validate_rejects_bad_alpha():
    with pytest.raises(ConfigError, match="path_loss_exponent"):
        validate(replace(two_tier(), path_loss_exponent=2.0))


def test_validate_rejects_empty_and_bad_fields():
    with pytest.raises(ConfigError):
        validate(NetworkConfig(tiers=(), path_loss_exponent=4.0))
    bad_power = replace(two_tier(), tiers=(TierConfig(0.0, 1.0, 1.0),))
    with pytest.raises(ConfigError, match="power"):
        validate(bad_power)
    bad_target = replace(two_tier(), tiers=(TierConfig(1.0, 1.0, 0.0),))
    with pytest.raises(ConfigError, match="target_sir"):
        validate(bad_target)
    bad_fraction = replace(
        two_tier(), tiers=(TierConfig(1.0, 1.0, 1.0, resource_fraction=1.5),))
    with pytest.raises(ConfigError, match="resource_fraction"):
        validate(bad_fraction)


def test_validate_idempotent():
    cfg = two_tier()
    assert validate(validate(cfg)) is cfg


def test_zero_density_allowed():
    cfg = replace(two_tier(), tiers=(TierConfig(1.0, 0.0, 1.0), TierConfig(1.0, 1.0, 1.0)))
    validate(cfg)


def test_split_theta_densities():
    cfg = two_tier()
    out = split_theta(cfg, ThetaSplit(1, 0.5))
    assert len(out.tiers) == 3
    assert [t.density for t in out.tiers] == [1.0, 1.0, 1.0]
    assert out.tiers[1].access == Access.OPEN
    assert out.tiers[2].access == Access.CLOSED


def test_split_theta_preserves_everything_else():
    cfg = two_tier()
    out = split_theta(cfg, ThetaSplit(1, 0.3))
    total_before = sum(t.density for t in cfg.tiers)
    total_after = sum(t.density for t in out.tiers)
    assert total_after == pytest.approx(total_before, abs=0.0)
    for part in (out.tiers[1], out.tiers[2]):
        src = cfg.tiers[1]
        assert (part.power, part.target_sir, part.antennas, part.users_served,
                part.resource_fraction, part.rate_target) == (
            src.power, src.target_sir, src.antennas, src.users_served,
            src.resource_fraction, src.rate_target)


@pytest.mark.parametrize("theta", [0.0, 1.0])
def test_split_theta_degenerate_keeps_zero_density_tier(theta):
    out = split_theta(two_tier(), ThetaSplit(1, theta))
    densities = [t.density for t in out.tiers]
    assert densities.count(0.0) == 1
    validate(out)


def test_split_theta_bad_index():
    with pytest.raises(ConfigError, match="out of range"):
        split_theta(two_tier(), ThetaSplit(5, 0.5))
    with pytest.raises(ConfigError):
        ThetaSplit(0, 1.5)


def test_technique_shapes():
    assert technique_shapes(TransmissionTechnique.su_bf(), 4) == (4, 1)
    assert technique_shapes(TransmissionTechnique.sdma(4), 4) == (1, 4)
    assert technique_shapes(TransmissionTechnique.sdma(2), 4) == (3, 2)
    assert technique_shapes(TransmissionTechnique.siso(), 1) == (1, 1)


@pytest.mark.parametrize("antennas", [2, 3, 8])
def test_technique_shapes_sum_rule(antennas):
    d, p = technique_shapes(TransmissionTechnique.su_bf(), antennas)
    assert d + p == antennas + 1
    d, p = technique_shapes(TransmissionTechnique.sdma(antennas), antennas)
    assert d + p == antennas + 1


def test_technique_shapes_invariants():
    with pytest.raises(ConfigError):
        technique_shapes(TransmissionTechnique.siso(), 2)
    with pytest.raises(ConfigError):
        technique_shapes(TransmissionTechnique.su_bf(), 1)
    with pytest.raises(ConfigError):
        technique_shapes(TransmissionTechnique.sdma(5), 4)
    with pytest.raises(ConfigError):
        technique_shapes(TransmissionTechnique.sdma(1), 4)


def test_db_conversions():
    assert db_to_linear(0.0) == 1.0
    assert db_to_linear(10.0) == pytest.approx(10.0)
    assert linear_to_db(db_to_linear(-4.0)) == pytest.approx(-4.0)


def test_radius_auto_sizing():
    cfg = two_tier()
    radius = cfg.radius()
    min_density = min(t.density for t in cfg.tiers)
    assert min_density * math.pi * radius ** 2 == pytest.approx(
        cfg.min_expected_bs_per_tier)
    fixed = replace(cfg, sim_radius=7.0)
    assert fixed.radius() == 7.0


def test_config_digest_stability():
    assert config_digest(two_tier()) == config_digest(two_tier())
    other = replace(two_tier(), path_loss_exponent=4.0)
    assert config_digest(other) != config_digest(two_tier())
