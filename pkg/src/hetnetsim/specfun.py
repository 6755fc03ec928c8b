"""Special-function kernels shared by the analytic and ordering machinery.

The interference constant

    C(alpha, psi) = (2*pi/alpha) * sum_{m=1}^{psi} binom(psi, m)
                    * B(psi - m + 2/alpha, m - 2/alpha)

appears in the exponent of the interference Laplace transform for a
path-loss exponent ``alpha`` and ``psi`` streams per interfering station.
The Beta arguments are positive for every m <= psi iff alpha > 2, which is
why the whole toolkit requires alpha > 2.

Also provided: the exact distribution of the ratio of two unit-scale Gamma
variables (integer shapes) and the CCDF of an integer-shape Gamma variable,
both of which drive the stochastic-dominance checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GammaRatioParams",
    "InterferenceConstant",
    "log_gamma",
    "beta",
    "interference_constant",
    "interference_constant_limit",
    "gamma_ratio_cdf",
    "gamma_ratio_ccdf",
    "gamma_ccdf_integer_shape",
]


@dataclass(frozen=True)
class GammaRatioParams:
    """Shapes of the ratio Gamma(k, 1) / Gamma(m, 1)."""

    k: int
    m: int

    def __post_init__(self):
        if not (isinstance(self.k, (int, np.integer)) and self.k >= 1):
            raise ValueError(f"numerator shape k must be an integer >= 1, got {self.k!r}")
        if not (isinstance(self.m, (int, np.integer)) and self.m >= 1):
            raise ValueError(f"denominator shape m must be an integer >= 1, got {self.m!r}")


@dataclass(frozen=True)
class InterferenceConstant:
    """Value of C(alpha, psi) together with the arguments that produced it."""

    alpha: float
    psi: int
    value: float


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    if x <= 0:
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def beta(x: float, y: float) -> float:
    """Euler Beta function B(x, y) = Gamma(x) Gamma(y) / Gamma(x + y).

    Evaluated through log-Gamma differences so large integer arguments
    (binomial sums with psi up to 64 and beyond) do not overflow.
    """
    if x <= 0 or y <= 0:
        raise ValueError(f"beta requires positive arguments, got ({x}, {y})")
    return math.exp(math.lgamma(x) + math.lgamma(y) - math.lgamma(x + y))


def interference_constant(alpha: float, psi: int) -> InterferenceConstant:
    """Interference constant C(alpha, psi) for alpha > 2, integer psi >= 1."""
    if alpha <= 2:
        raise ValueError(f"interference constant requires alpha > 2, got {alpha}")
    if not (isinstance(psi, (int, np.integer)) and psi >= 1):
        raise ValueError(f"psi must be an integer >= 1, got {psi!r}")
    two_over_a = 2.0 / alpha
    total = 0.0
    for m in range(1, int(psi) + 1):
        total += math.comb(int(psi), m) * beta(psi - m + two_over_a, m - two_over_a)
    return InterferenceConstant(alpha=float(alpha), psi=int(psi),
                                value=(2.0 * math.pi / alpha) * total)


def interference_constant_limit(alpha: float) -> float:
    """Large-psi scaling constant: C(alpha, psi) / psi^(2/alpha) -> pi*Gamma(1 - 2/alpha)."""
    if alpha <= 2:
        raise ValueError(f"limit constant requires alpha > 2, got {alpha}")
    return math.pi * math.exp(math.lgamma(1.0 - 2.0 / alpha))


def _ratio_survival(k: int, m: int, z: np.ndarray) -> np.ndarray:
    """P(Gamma(k,1)/Gamma(m,1) > z) for z >= 0, elementwise.

    Survival form of the ratio distribution:

        S(z) = (z+1)^(-m) * sum_{i=0}^{k-1} a_i w^i,
        w = z / (z+1),  a_0 = 1,  a_i = a_{i-1} * (m+i-1) / i.

    The running-product accumulation avoids repeated Gamma evaluations and
    the cancellation of forming each term from scratch.
    """
    w = z / (z + 1.0)
    term = np.ones_like(w)
    acc = np.ones_like(w)
    for i in range(1, k):
        term = term * w * ((m + i - 1) / i)
        acc = acc + term
    return np.exp(-m * np.log1p(z)) * acc


def gamma_ratio_ccdf(params: GammaRatioParams, z):
    """Exact CCDF of the Gamma-shape ratio at z (scalar or array), z >= 0."""
    zz = np.asarray(z, dtype=np.float64)
    if np.any(zz < 0):
        raise ValueError("gamma_ratio_ccdf requires z >= 0")
    out = _ratio_survival(params.k, params.m, zz)
    return float(out) if np.isscalar(z) else out


def gamma_ratio_cdf(params: GammaRatioParams, z):
    """Exact CDF of the Gamma-shape ratio at z (scalar or array), z >= 0."""
    zz = np.asarray(z, dtype=np.float64)
    if np.any(zz < 0):
        raise ValueError("gamma_ratio_cdf requires z >= 0")
    out = 1.0 - _ratio_survival(params.k, params.m, zz)
    return float(out) if np.isscalar(z) else out


def gamma_ccdf_integer_shape(delta: int, z):
    """P(X > z) for X ~ Gamma(delta, 1) with integer delta >= 1.

    Uses the finite form e^(-z) * sum_{i=0}^{delta-1} z^i / i!.
    """
    if not (isinstance(delta, (int, np.integer)) and delta >= 1):
        raise ValueError(f"shape must be an integer >= 1, got {delta!r}")
    zz = np.asarray(z, dtype=np.float64)
    if np.any(zz < 0):
        raise ValueError("gamma_ccdf_integer_shape requires z >= 0")
    term = np.ones_like(zz)
    acc = np.ones_like(zz)
    for i in range(1, int(delta)):
        term = term * zz / i
        acc = acc + term
    out = np.exp(-zz) * acc
    return float(out) if np.isscalar(z) else out
