"""Invariant Pareto laws of a dissipative multiplicative wealth model."""

from .closed_form import (ExponentReport, characteristic_roots, dalpha_dkappa_fd,
                          exponent_sweep, pareto_exponent)
from .dirichlet import ClassMix, characteristic_value, find_tail_root
from .estimators import (HillTailEstimator, PowerLawRegressor, TailEstimate,
                         hill_estimator, loglog_slope)
from .experiments import confiscation_experiment, equivalence_check, measure_convergence_rate
from .log_grid import (GridDistribution, GridSpec, apply_operator, discrete_l1, iterate,
                       make_grid, pareto_fixed_point, residual)
from .montecarlo import AgentPopulation, mc_step, run_mc
from .params import DerivedCoefficients, ModelParams, derive_coefficients, validate_params

__version__ = "0.1.0"
