"""Spreading speeds for Fisher-KPP fronts in slowly varying periodic media.

A numerical workbench pairing closed-form/quadrature speed theory (the
period-averaged action j, effective Hamiltonian H, limiting speed w_inf,
two-value bounds), periodic principal eigenvalues, Hamilton-Jacobi
correctors, and a direct PDE simulator with front tracking.
"""

from .errors import (ConfigError, ConvergenceError, CoverageError,
                     DegenerateProfileError, DiscretizationError, DomainError,
                     InsufficientDataError, KppSpreadError, ParameterError,
                     SchemeError)
from .media import (Medium, PeriodicProfile, PhaseMap, Regime,
                    TwoValueSequences, affine_phase, classify_regime,
                    composed_medium, constant_profile, cosine_profile,
                    evaluate_mu, geometric_sequences, log_power_phase,
                    medium_from_dict, medium_to_dict, power_phase,
                    sampled_profile, sequences_from_phase, two_value_medium,
                    two_value_profile, x_over_log_phase)
from .theory import (SpeedBounds, H_of_p, bounds_for_profile,
                     bounds_for_two_value, homogeneous_speed, j_at_max,
                     j_of_k, min_radius_subsolution, threshold_bounds_thm1,
                     two_value_lower_bound_wstar, two_value_upper_bound_wlow,
                     w_infinity)
from .corrector import (ApproxEigenfunction, Corrector, build_corrector,
                        eigen_residual_profile, hj_residual, log_growth_check)
from .eigen import PeriodicOperator, operator_for, principal_eigenvalue, w_L
from .solver import (Field, Grid, RunResult, SignReport, SolverConfig,
                     Stepper, default_initial, run, step, verify_subsolution,
                     verify_supersolution_exp, verify_supersolution_ubar,
                     write_snapshot)
from .fronttrack import (FrontTrace, estimate_spreading_speeds,
                         front_position, windowed_speeds)
from .presets import list_presets, preset_config
from .report import SpeedReport, load_report, write_report
from .cli import convergence_study, run_scenario

__version__ = "0.1.0"
