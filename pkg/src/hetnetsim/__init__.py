"""Simulator and analytic toolkit for downlink multi-antenna multi-tier
cellular networks: Monte-Carlo coverage/rate/ASE estimation over random
station layouts, closed-form and quadrature coverage bounds, and
stochastic-ordering checks between transmission techniques."""

from .analytic import (AnalyticError, AnalyticResult, LaplaceSpec,
                       aggregate_interference_constant, ase_low_sir_limit,
                       ase_ratio_approx, ase_ratio_exact, ase_symmetric,
                       coverage_bound_delta1, coverage_bound_general,
                       laplace_derivatives, laplace_interference, laplace_spec,
                       symmetric_parameters)
from .model import (Access, ConfigError, NetworkConfig, ThetaSplit, TierConfig,
                    TransmissionTechnique, config_digest, db_to_linear,
                    linear_to_db, split_theta, technique_shapes, validate)
from .montecarlo import (CandidateCountHistogram, CoverageEstimate,
                         PerTierCoverage, estimate_ase, estimate_candidate_count,
                         estimate_coverage, estimate_rate_coverage, sir_per_bs,
                         sweep_estimates, theta_sweep_estimates, wilson_interval)
from .ordering import (DominanceVerdict, OrderingClaim, OrderingPreconditionError,
                       OrderingReport, Relation, apply_shape_profile,
                       check_ccdf_dominance, check_coverage_ordering,
                       check_rate_ordering, ratio_dominance_condition)
from .sampling import (BsRecord, PlacementKind, Realization, sample_gamma_mark,
                       sample_hex_tier, sample_ppp_tier, sample_realization,
                       write_realization_csv)
from .specfun import (GammaRatioParams, InterferenceConstant, beta,
                      gamma_ccdf_integer_shape, gamma_ratio_cdf,
                      gamma_ratio_ccdf, interference_constant,
                      interference_constant_limit, log_gamma)

__version__ = "0.1.0"
