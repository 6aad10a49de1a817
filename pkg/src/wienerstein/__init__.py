"""Stein discrepancies, cumulants and Wasserstein checks for second-chaos limit laws."""

from .cumulants import (CumulantVector, chaos_cumulant, cumulants_from_moments,
                        empirical_cumulants, exact_cumulants, moments_from_cumulants,
                        weighted_sum_cumulant)
from .discrepancy import DiscrepancyReport, delta, delta_cumulant, delta_product, delta_tail
from .errors import (BadInput, NumericalBudgetError, QuadratureBudgetExceeded,
                     SingularVandermonde, WienerSteinError)
from .matching import MatchReport, TargetThresholds, match, rational_independence_hint, thresholds
from .polyalg import (Poly, VandermondeSystem, elementary_symmetric, newton_girard, p_polynomial,
                      q_polynomial, theta, vandermonde_solve)
from .sampling import (SampleBatch, WassersteinEstimate, bound_experiment, estimate_wasserstein,
                       sample_chaos, sample_gamma_mixture, wasserstein_p)
from .spectrum import (CHISQ1, BaseLaw, GammaComponent, GammaMixtureSpec, Spectrum,
                       TargetSpectrum, chaos_target_as_gamma, normalize, reorder_decreasing)
from .stein_ops import (DifferentialOperator, apply, build_gamma_mixture_operator,
                        build_malliavin_operator, cf_ode_residual, mc_characterization_residual,
                        operators_proportional)

__version__ = "0.1.0"
