"""Semiclassical wave packets through an avoided eigenvalue crossing.

A two-level cubic Schrodinger system with a linear band crossing softened
by a small gap develops a Landau-Zener transition when a coherent packet
rides the upper band through the crossing. This package integrates the
full system, the adiabatic profile equation that describes the packet away
from the crossing, and the microscopic two-level family that describes it
inside, and measures the transferred mass against the closed form
e^(-pi c^2 / xi0).

Layers, bottom up: params (scales and configuration), potential (the
two-level matrix symbol), classical (band trajectories and the lens
oscillator), profile (envelope equation), semiclassical (full PDE solver),
inner (crossing-window family and scattering coefficients), diagnostics
(experiment orchestration), cli (batch driver).
"""

from .classical import (ClassicalPath, OscillatorPair, TaylorTable,
                        crossing_path, curvature_integral,
                        integrate_trajectory, lens_forward, lens_inverse,
                        select_horizon, solve_oscillator, taylor_at_crossing)
from .diagnostics import (ConvergenceFit, ExperimentBundle, TransitionReport,
                          convergence_fit, convergence_sweep,
                          landau_zener_experiment, mode_masses, pick_numerics,
                          run_experiment)
from .errors import (BoundaryLeakError, ConfigError, CrosswaveError,
                     EnergyDriftError, HorizonError, MassDriftError,
                     NormDriftError, NumericalGuardError, ResolutionError,
                     ToleranceError, WronskianError)
from .fourier import SpatialGrid, resample_uniform, spectral_derivative
from .inner import (GrowthReport, InnerField, MatchingData, ScatteringData,
                    build_inner_data, derivative_growth_check,
                    extract_inner_field, integrate_lz_family, lambda_phase,
                    nonlinear_lz, numeric_scattering, rescale_to_physical,
                    scattering_coeffs, transition_probability)
from .params import (NumericsConfig, SemiclassicalParams, Tolerances,
                     derive_scales, load_config, parse_config_text,
                     resolution_check)
from .potential import (eigenpair, eigenpair_radical, eval_potential,
                        lambda_second, pointwise_propagator, project_modes)
from .profile import (ProfileState, initial_profile_custom,
                      initial_profile_gaussian, monitor_moments,
                      solve_profile_direct, solve_profile_lens)
from .semiclassical import (EvolveResult, SpinorField, build_initial_data,
                            coherent_state, error_norms, evolve,
                            outer_approximation)

__version__ = "0.1.0"

__all__ = [
    "BoundaryLeakError", "ClassicalPath", "ConfigError", "ConvergenceFit",
    "CrosswaveError", "EnergyDriftError", "EvolveResult", "ExperimentBundle",
    "GrowthReport", "HorizonError", "InnerField", "MassDriftError",
    "MatchingData", "NormDriftError", "NumericalGuardError", "NumericsConfig",
    "OscillatorPair", "ProfileState", "ResolutionError", "ScatteringData",
    "SemiclassicalParams", "SpatialGrid", "SpinorField", "TaylorTable",
    "Tolerances", "ToleranceError", "TransitionReport", "WronskianError",
    "build_initial_data", "build_inner_data", "coherent_state",
    "convergence_fit", "convergence_sweep", "crossing_path",
    "curvature_integral", "derivative_growth_check", "derive_scales",
    "eigenpair", "eigenpair_radical", "error_norms", "eval_potential",
    "evolve", "extract_inner_field", "initial_profile_custom",
    "initial_profile_gaussian", "integrate_lz_family",
    "integrate_trajectory", "lambda_phase", "lambda_second",
    "landau_zener_experiment", "lens_forward", "lens_inverse", "load_config",
    "mode_masses", "monitor_moments", "nonlinear_lz", "numeric_scattering",
    "outer_approximation", "parse_config_text", "pick_numerics",
    "pointwise_propagator", "project_modes", "rescale_to_physical",
    "resample_uniform", "resolution_check", "run_experiment",
    "scattering_coeffs", "select_horizon", "solve_oscillator",
    "solve_profile_direct", "solve_profile_lens", "spectral_derivative",
    "taylor_at_crossing", "transition_probability",
]
