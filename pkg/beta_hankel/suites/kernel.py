import math
import typing as T

import numpy as np

from beta_hankel.config import TAIL, RunConfig, data_radius, spectral_radius, spread_radius
from beta_hankel.estimates import decay_exponent_fit
from beta_hankel.evolution import semigroup_apply
from beta_hankel.kernels import kernel_K, kernel_norm, semigroup_kernel, semigroup_quadrature
from beta_hankel.radial import build_grid, lp_norm_deta, sample
from beta_hankel.suites.check import Check, gaussian, make_plan, physical_weights, relative_error

NORM_EXPONENTS = (1.0, 1.5, 2.0, 3.0, 4.0, math.inf)
SAMPLE_TIMES = (0.1, 1.0, 10.0)


def _positivity(config: RunConfig) -> T.List[Check]:
  params = config.params
  r = np.geomspace(1e-3, 5.0, 40)
  rho, rr = np.meshgrid(r, r, indexing='ij')
  worst_K, worst_tilde, asymmetry = math.inf, math.inf, 0.0
  lam, beta = params.lam, params.beta
  for t in SAMPLE_TIMES:
    worst_K = min(worst_K, float(kernel_K(r, t, params).min()))
    forward = semigroup_kernel(rho, rr, t, params)
    backward = semigroup_kernel(rr, rho, t, params)
    worst_tilde = min(worst_tilde, float(forward.min()))
    reduced = np.power(rr, lam) * np.power(rho, lam + beta) * forward
    swapped = np.power(rho, lam) * np.power(rr, lam + beta) * backward
    live = reduced > 0
    asymmetry = max(asymmetry, float(np.max(np.abs(reduced[live] - swapped[live]) / reduced[live], initial=0.0)))
  return [
    Check('kernel.positive_K', 'K(r, t) > 0', 0.0 if worst_K > 0 else 1.0, 0.0),
    Check('kernel.positive_semigroup_kernel', 'K̃(ρ, r, t) > 0', 0.0 if worst_tilde > 0 else 1.0, 0.0),
    Check('kernel.reduced_symmetry', 'r^λρ^{λ+β}K̃(ρ, r, t) is symmetric in (r, ρ)', asymmetry, 1e-10),
  ]


def _power_law(config: RunConfig) -> T.List[Check]:
  params = config.params
  times = np.geomspace(1e-2, 10.0, 12)
  r_max = spread_radius(params, float(times[-1]))
  # sup norms for k = 0 are taken at the first node, so start far below every kernel width
  grid = build_grid(1e-12, r_max, 4 * config.grid.panels, config.grid.order)
  expected_slope = lambda m: params.gamma * ((0.0 if math.isinf(m) else 1 / m) - 1)  # noqa: E731
  checks: T.List[Check] = []
  for m in NORM_EXPONENTS:
    measured = np.array([lp_norm_deta(sample(grid, lambda r: kernel_K(r, float(t), params), params), m)
                         for t in times])
    closed = np.array([kernel_norm(m, float(t), params) for t in times])
    label = f'm={m:g}'
    checks.append(Check(f'kernel.norm_power_law[{label}]', '‖K(·, t)/r^k‖_m ∝ t^{γ(1/m−1)}',
                        abs(decay_exponent_fit(times, measured) - expected_slope(m)), 1e-3))
    checks.append(Check(f'kernel.norm_closed_form[{label}]', '‖K(·, t)/r^k‖_m from the Gamma integral',
                        float(np.max(np.abs(measured - closed) / closed)), 1e-6))
  return checks


def _quadrature_route(config: RunConfig) -> T.List[Check]:
  params = config.params
  t = 1.0
  two_b = 2 - params.beta
  r_max = max(data_radius(params), spread_radius(params, t))
  rho_max = max(spectral_radius(params, 1.0), (TAIL / t) ** (1 / two_b))
  plan = make_plan(params, config.grid, r_max, rho_max)
  a = sample(plan.physical_grid, gaussian(params), params)
  spectral = semigroup_apply(a, t, plan)
  quadrature = semigroup_quadrature(a, t)
  return [Check('kernel.semigroup_routes', 'S(t)a by K̃ quadrature = H⁻¹ e^{−ρ^{2−β}t} H a',
                relative_error(quadrature.values, spectral.values, physical_weights(spectral)), 1e-6)]


def run(config: RunConfig) -> T.List[Check]:
  return _positivity(config) + _power_law(config) + _quadrature_route(config)
