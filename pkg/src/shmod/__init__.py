"""Pseudospectral laboratory for the stochastic Swift-Hohenberg equation and
its Ginzburg-Landau amplitude reduction."""

__version__ = "0.1.0"

from .grid import ComplexField, Grid, RealField, read_field, write_field
from .operators import (DiagonalOperator, apply_diagonal,
                        inv_Leps_scaled_on_band, op_L, op_L_eps,
                        op_semigroup_L, op_semigroup_L_eps, symbol_L,
                        symbol_L_eps)
from .bands import (AnsatzDecomposition, BandKernel, decompose, demodulate,
                    make_kernel, modulate, project, project_complement)
from .noise import (NoiseConfig, OUState, complex_white_increment,
                    ou_increment_variance, ou_mode_step,
                    spectral_variance_rate, stochastic_convolution_path,
                    stochastic_convolution_sample, white_increment)
from .sh import (BlowupStopped, ModelParams, Trajectory, modulated_carrier_ic,
                 rescale_from_original, rescale_to_original, simulate,
                 step_rescaled)
from .reduced import (GLCoefficients, gl5_coefficients, gl_coefficients,
                      quintic_reduced_step, reduced_quadratic_correction,
                      simulate_gl, simulate_paired, simulate_reduced, step_gl,
                      step_reduced)
from .analysis import (HolderNormConfig, LandauFit, ScalingStudy,
                       approximation_error, averaging_residual,
                       estimate_landau_coefficient, fit_scaling_exponent,
                       mode_concentration, weighted_holder_norm)
from .studies import (ConfigError, ReplayError, StudyConfig, StudyRecord,
                      emit_plotdata, parse_config_file, replay, run_study)
