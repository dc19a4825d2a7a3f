"""
beta-hankel - β-Hankel transforms and mild solutions of ∂ₜu − |x|^β Δu = ±|u|^b u
"""
from beta_hankel.estimates import NormReport, SmoothingRow, cm_norm, decay_exponent_fit, duhamel_estimate_audit, \
  smoothing_audit, smoothing_constant, spacetime_norm, x_norm, y_norm
from beta_hankel.evolution import BlowupReport, ContractionConstants, EvolutionConfig, blowup_envelope, blowup_fit, \
  duhamel, existence_time, measure_contraction_constants, picard_solve, semigroup_apply
from beta_hankel.hankel import TransformPlan, apply_operator_A, hankel_forward, hankel_inverse, plan_transform, \
  resolve_grids, spectral_multiply
from beta_hankel.kernels import KernelEval, delsarte_D, delsarte_identity, kernel_K, kernel_K_transform, \
  kernel_norm, semigroup_kernel, semigroup_quadrature, sharp_convolve, young_audit
from beta_hankel.model import ModelParams, NonlinearitySpec, Triplet, TripletKind, admissible_m, classify_triplet, \
  derive_params, nonlinearity
from beta_hankel.radial import GridFunction, RadialGrid, Space, build_grid, lp_norm_deta, sample
from beta_hankel.specfun import bessel_i_scaled, bessel_j, gamma_fn
from beta_hankel.trajectory import Trajectory
from beta_hankel.util import BetaHankelError, BlowupDetected, ConvergenceError, NumericalError, ValidationError

__all__ = [
  'derive_params', 'classify_triplet', 'admissible_m', 'nonlinearity',
  'ModelParams', 'NonlinearitySpec', 'Triplet', 'TripletKind',
  'gamma_fn', 'bessel_j', 'bessel_i_scaled',
  'RadialGrid', 'GridFunction', 'Space', 'build_grid', 'sample', 'lp_norm_deta',
  'TransformPlan', 'plan_transform', 'resolve_grids', 'hankel_forward', 'hankel_inverse', 'spectral_multiply',
  'apply_operator_A',
  'KernelEval', 'kernel_K', 'kernel_K_transform', 'kernel_norm', 'semigroup_kernel', 'semigroup_quadrature',
  'delsarte_D', 'delsarte_identity', 'sharp_convolve', 'young_audit',
  'EvolutionConfig', 'ContractionConstants', 'BlowupReport', 'Trajectory', 'semigroup_apply', 'duhamel',
  'existence_time', 'picard_solve', 'blowup_fit', 'blowup_envelope', 'measure_contraction_constants',
  'NormReport', 'SmoothingRow', 'spacetime_norm', 'cm_norm', 'x_norm', 'y_norm', 'smoothing_constant',
  'decay_exponent_fit', 'duhamel_estimate_audit', 'smoothing_audit',
  'BetaHankelError', 'ValidationError', 'NumericalError', 'ConvergenceError', 'BlowupDetected',
]
