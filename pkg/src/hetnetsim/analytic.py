"""Closed-form and quadrature evaluation of the analytical results.

For Poisson layouts the interference I at the origin has Laplace transform

    L_I(s) = exp(-s^(2/alpha) * C),
    C = sum_j lambda_j P_j^(2/alpha) C(alpha, psi_j),

and the coverage probability is upper bounded (union bound over candidate
stations) by sum over allowed tiers of lambda_k * A_k with

    A_k = sum_{i=0}^{delta_k - 1} (1/i!) Int_{R^2} (-s)^i L_I^{(i)}(s) dx,
    s = beta_k ||x||^alpha / P_k.

Derivatives of L_I are exp(g) Bell-polynomial combinations of the
derivatives of g(s) = -C s^(2/alpha); writing u = C s^(2/alpha), the i-th
term reduces to e^(-u) times a polynomial Q_i(u) with positive
coefficients, and the polar substitution collapses each A_k to

    A_k = pi (P_k / beta_k)^(2/alpha) / C * Int_0^inf e^(-u) Q_i(u) du / i!

summed over i.  The integral depends only on (alpha, delta_k) and is done
by adaptive quadrature; delta_k = 1 for every tier gives the closed form

    P_c <= pi * sum_k lambda_k P_k^(2/alpha) beta_k^(-2/alpha) / C.

The union bound is not a probability: values above 1 are reported raw with
a flag, because the overshoot itself measures how loose the bound is.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy import integrate

from .model import ConfigError, NetworkConfig, TransmissionTechnique, technique_shapes, validate
from .specfun import interference_constant, log_gamma

__all__ = [
    "AnalyticResult",
    "LaplaceSpec",
    "AnalyticError",
    "aggregate_interference_constant",
    "laplace_spec",
    "laplace_interference",
    "laplace_derivatives",
    "coverage_bound_delta1",
    "coverage_bound_general",
    "symmetric_parameters",
    "ase_symmetric",
    "ase_ratio_exact",
    "ase_ratio_approx",
    "ase_low_sir_limit",
]

QUADRATURE_TOL = 1e-8


class AnalyticError(RuntimeError):
    """Quadrature failed to reach the requested accuracy."""

    def __init__(self, message: str, value: float, est_abs_error: float):
        super().__init__(message)
        self.value = value
        self.est_abs_error = est_abs_error


@dataclass(frozen=True)
class AnalyticResult:
    """A formula value plus how it was obtained.

    ``value`` is reported raw; when a union bound exceeds 1 the
    ``exceeds_one`` flag is set and ``clamped`` gives the [0, 1] version.
    """

    value: float
    method: str  # closed_form | quadrature | series_limit
    est_abs_error: float = 0.0
    exceeds_one: bool = False

    @property
    def clamped(self) -> float:
        return min(max(self.value, 0.0), 1.0)


@dataclass(frozen=True)
class LaplaceSpec:
    """Exponent data of the interference Laplace transform."""

    aggregate_constant: float
    alpha: float

    def __post_init__(self):
        if not self.aggregate_constant > 0:
            raise ValueError(f"aggregate constant must be positive, got {self.aggregate_constant}")
        if not self.alpha > 2:
            raise ValueError(f"alpha must exceed 2, got {self.alpha}")


def aggregate_interference_constant(config: NetworkConfig) -> float:
    """C = sum_j lambda_j P_j^(2/alpha) C(alpha, psi_j) over all tiers."""
    validate(config)
    alpha = config.path_loss_exponent
    total = 0.0
    for tier in config.tiers:
        if tier.density <= 0:
            continue
        total += (tier.density * tier.power ** (2.0 / alpha)
                  * interference_constant(alpha, tier.users_served).value)
    return total


def laplace_spec(config: NetworkConfig) -> LaplaceSpec:
    return LaplaceSpec(aggregate_interference_constant(config), config.path_loss_exponent)


def laplace_interference(spec: LaplaceSpec, s):
    """L_I(s) = exp(-s^(2/alpha) * C); equals 1 at s = 0, decreasing in s."""
    ss = np.asarray(s, dtype=float)
    if np.any(ss < 0):
        raise ValueError("Laplace transform argument must be >= 0")
    out = np.exp(-(ss ** (2.0 / spec.alpha)) * spec.aggregate_constant)
    return float(out) if np.isscalar(s) else out


@lru_cache(maxsize=256)
def _bell_u_coefficients(order: int, alpha: float) -> tuple[tuple[float, ...], ...]:
    """Polynomials Q_i with (-s)^i L^{(i)}(s) = e^(-u) Q_i(u), u = C s^(2/alpha).

    Built by the complete Bell recurrence B_{n+1} = sum_k binom(n,k)
    B_{n-k} g^{(k+1)} on coefficient vectors: g^{(k+1)} contributes one
    power of u and the falling product prod_{j=0..k} (2/alpha - j).  All
    Q_i coefficients are positive for alpha > 2.
    """
    delta = 2.0 / alpha
    falling = []
    prod = 1.0
    for j in range(order):
        prod *= delta - j
        falling.append(prod)
    coeffs = [np.array([1.0])]
    for n in range(order):
        nxt = np.zeros(n + 2)
        for k in range(n + 1):
            nxt[1:n - k + 2] += math.comb(n, k) * (-falling[k]) * coeffs[n - k]
        coeffs.append(nxt)
    return tuple(tuple(((-1.0) ** i) * c for c in coeffs[i]) for i in range(order + 1))


def laplace_derivatives(spec: LaplaceSpec, s: float, order: int) -> np.ndarray:
    """[L_I(s), L_I'(s), ..., L_I^(order)(s)] for s > 0."""
    if order < 0:
        raise ValueError("order must be >= 0")
    if s <= 0:
        raise ValueError("derivatives need s > 0 (the exponent has a fractional power)")
    q = _bell_u_coefficients(order, spec.alpha)
    u = spec.aggregate_constant * s ** (2.0 / spec.alpha)
    base = math.exp(-u)
    out = np.empty(order + 1)
    for i in range(order + 1):
        poly = sum(c * u ** b for b, c in enumerate(q[i]))
        out[i] = base * poly * (-1.0) ** i / s ** i
    return out


def _allowed_indices(config: NetworkConfig,
                     allowed_tiers: Optional[Sequence[int]]) -> tuple[int, ...]:
    if allowed_tiers is None:
        allowed = config.open_tiers()
        if not allowed:
            raise ConfigError("bound needs at least one allowed (open-access) tier")
        return allowed
    for k in allowed_tiers:
        if not 0 <= k < len(config.tiers):
            raise ConfigError(f"allowed tier index {k} out of range")
    return tuple(allowed_tiers)


def coverage_bound_delta1(config: NetworkConfig,
                          allowed_tiers: Optional[Sequence[int]] = None) -> AnalyticResult:
    """Closed-form union bound when every allowed tier has delta_k = 1.

    P_c <= pi * sum_{k allowed} lambda_k P_k^(2/a) beta_k^(-2/a)
           / sum_{j all} lambda_j P_j^(2/a) C(a, psi_j)
    """
    validate(config)
    allowed = _allowed_indices(config, allowed_tiers)
    for k in allowed:
        if config.tiers[k].delta != 1:
            raise ConfigError(f"tier {k} has delta={config.tiers[k].delta}; the closed form "
                              "requires delta=1 on every allowed tier")
    alpha = config.path_loss_exponent
    denom = aggregate_interference_constant(config)
    num = 0.0
    for k in allowed:
        tier = config.tiers[k]
        num += tier.density * tier.power ** (2.0 / alpha) * tier.target_sir ** (-2.0 / alpha)
    value = math.pi * num / denom
    return AnalyticResult(value=value, method="closed_form", est_abs_error=0.0,
                          exceeds_one=value > 1.0)


@lru_cache(maxsize=256)
def _shape_integral(alpha: float, delta: int) -> tuple[float, float]:
    """Int_0^inf e^(-u) sum_{i<delta} Q_i(u)/i! du and its error estimate."""
    q = _bell_u_coefficients(delta - 1, alpha)
    degree = delta - 1
    combined = np.zeros(degree + 1)
    fact = 1.0
    for i in range(delta):
        if i > 0:
            fact *= i
        combined[:i + 1] += np.asarray(q[i]) / fact
    coeffs = combined[::-1]  # np.polyval wants highest power first

    def integrand(u):
        return np.exp(-u) * np.polyval(coeffs, u)

    upper = degree + 10.0 * math.sqrt(degree + 1.0) + 45.0
    value, err = integrate.quad(integrand, 0.0, upper, epsabs=1e-12, epsrel=1e-12, limit=400)
    err += abs(integrand(upper))  # neglected tail
    return value, err


def coverage_bound_general(config: NetworkConfig,
                           allowed_tiers: Optional[Sequence[int]] = None,
                           tol: float = QUADRATURE_TOL) -> AnalyticResult:
    """Union bound on coverage for arbitrary integer shape profiles.

    Reduces every tier term to a one-dimensional integral of e^(-u) times a
    positive polynomial (see module docstring) and evaluates it by adaptive
    quadrature.  Raises AnalyticError when the error estimate exceeds
    ``tol``; the raw value is attached to the exception.
    """
    validate(config)
    allowed = _allowed_indices(config, allowed_tiers)
    alpha = config.path_loss_exponent
    denom = aggregate_interference_constant(config)
    value = 0.0
    err = 0.0
    for k in allowed:
        tier = config.tiers[k]
        if tier.density <= 0:
            continue
        integral, ierr = _shape_integral(alpha, tier.delta)
        prefactor = (math.pi * (tier.power / tier.target_sir) ** (2.0 / alpha) / denom)
        value += tier.density * prefactor * integral
        err += tier.density * prefactor * ierr
    if err > tol:
        raise AnalyticError(f"quadrature error estimate {err:.3e} exceeds {tol:.1e}",
                            value=value, est_abs_error=err)
    return AnalyticResult(value=value, method="quadrature", est_abs_error=err,
                          exceeds_one=value > 1.0)


def symmetric_parameters(config: NetworkConfig) -> tuple[float, int, int, float, float]:
    """(alpha, antennas, users, target, total density) of a symmetric network.

    Symmetric means every tier is open access with the same target SIR,
    antenna count and users served; only then is per-tier coverage equal
    across tiers and the closed-form ASE applicable.
    """
    validate(config)
    first = config.tiers[0]
    for k, tier in enumerate(config.tiers):
        if not tier.is_open:
            raise ConfigError(f"tier {k}: symmetric ASE formulas assume open access")
        if (tier.target_sir, tier.antennas, tier.users_served) != (
                first.target_sir, first.antennas, first.users_served):
            raise ConfigError(f"tier {k}: asymmetric parameters; use the Monte-Carlo path")
    total = sum(t.density for t in config.tiers)
    return (config.path_loss_exponent, first.antennas, first.users_served,
            first.target_sir, total)


def ase_symmetric(alpha: float, antennas: int, target_sir: float,
                  total_density: float, technique: TransmissionTechnique) -> AnalyticResult:
    """Closed-form ASE of a symmetric open-access network.

    Full SDMA: eta = M * pi/C(alpha, M) * beta^(-2/a) * log2(1+beta) * sum lambda;
    SISO: the same with M = 1.  No closed form exists for SU-BF (the bound
    is not tight there); use the Monte-Carlo estimator instead.
    """
    delta, psi = technique_shapes(technique, antennas)
    if technique.tag == "su_bf":
        raise ConfigError("no closed-form ASE for su_bf; use estimate_ase")
    if technique.tag == "sdma" and psi != antennas:
        raise ConfigError("closed-form SDMA ASE requires users == antennas (full SDMA)")
    if not target_sir > 0:
        raise ValueError(f"target_sir must be positive, got {target_sir}")
    if not total_density > 0:
        raise ValueError(f"total_density must be positive, got {total_density}")
    coverage = (math.pi / interference_constant(alpha, psi).value
                * target_sir ** (-2.0 / alpha))
    value = psi * coverage * math.log2(1.0 + target_sir) * total_density
    return AnalyticResult(value=value, method="closed_form", est_abs_error=0.0,
                          exceeds_one=coverage > 1.0)


def ase_ratio_exact(alpha: float, antennas: int) -> float:
    """ASE ratio (full SDMA over SISO, equal densities): M C(a,1)/C(a,M)."""
    return (antennas * interference_constant(alpha, 1).value
            / interference_constant(alpha, antennas).value)


def ase_ratio_approx(alpha: float, antennas: int, same_user_density: bool = False) -> float:
    """Large-M approximation Gamma(1+2/a) M^(1-2/a) of the ASE ratio.

    With ``same_user_density`` the SDMA deployment density is scaled down by
    M so both systems serve the same user density, and the ratio becomes
    Gamma(1+2/a) M^(-2/a) (decreasing in M).
    """
    if antennas < 1:
        raise ValueError(f"antennas must be >= 1, got {antennas}")
    two_over_a = 2.0 / alpha
    gamma_factor = math.exp(log_gamma(1.0 + two_over_a))
    exponent = -two_over_a if same_user_density else 1.0 - two_over_a
    return gamma_factor * antennas ** exponent


def ase_low_sir_limit(config: NetworkConfig) -> float:
    """ASE in the vanishing-target limit: sum_k psi_k lambda_k log2(1+beta_k).

    Coverage tends to 1 for every technique as the targets shrink, so the
    limit depends only on how many users each station serves; systems
    serving one user per resource block (SISO, SU-BF) coincide here.
    """
    validate(config)
    return sum(t.users_served * t.density * math.log2(1.0 + t.target_sir)
               for t in config.tiers)
