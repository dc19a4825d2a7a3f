'''Round trip, isometry, linearity and the closed-form kernel pair of the transform.'''
import typing as T

import numpy as np

from beta_hankel.config import TAIL, RunConfig, data_radius, spectral_radius, spread_radius
from beta_hankel.hankel import hankel_forward, hankel_inverse
from beta_hankel.kernels import kernel_K, kernel_K_transform
from beta_hankel.radial import Space, sample
from beta_hankel.suites.check import Check, gaussian, make_plan, physical_weights, relative_error, spectral_weights

# (width, quadratic coefficient) of the test functions
PROFILES = ((1.0, 0.0), (0.7, 0.0), (1.0, 0.5))
KERNEL_TIMES = (0.1, 1.0, 10.0)


def _data_checks(config: RunConfig) -> T.List[Check]:
  params = config.params
  narrowest = min(width for width, _ in PROFILES)
  plan = make_plan(params, config.grid, data_radius(params, 1.1), spectral_radius(params, narrowest))
  checks: T.List[Check] = []
  functions = []
  for width, quadratic in PROFILES:
    label = f'width={width:g},quadratic={quadratic:g}'
    f = sample(plan.physical_grid, gaussian(params, width, quadratic=quadratic), params)
    functions.append(f)
    F = hankel_forward(f, plan)
    back = hankel_inverse(F, plan)
    weights = physical_weights(f)
    checks.append(Check(f'transform.round_trip[{label}]', 'inverse transform undoes the forward one',
                        relative_error(back.values, f.values, weights), 1e-6))
    physical = float(np.sum(f.values ** 2 * weights))
    spectral = float(np.sum(F.values ** 2 * spectral_weights(F)))
    checks.append(Check(f'transform.isometry[{label}]', '∫(Hφ)²ρ^{β+n−1}dρ = ∫φ²r^{n−1−β}dr',
                        abs(spectral - physical) / physical, 1e-6))
  f, g = functions[0], functions[1]
  combined = hankel_forward(f * 2.0 + g * 3.0, plan).values
  separate = 2.0 * hankel_forward(f, plan).values + 3.0 * hankel_forward(g, plan).values
  scale = float(np.abs(separate).max())
  checks.append(Check('transform.linearity', 'H is linear', float(np.abs(combined - separate).max()) / scale, 1e-12))
  return checks


def _kernel_checks(config: RunConfig) -> T.List[Check]:
  params = config.params
  two_b = 2 - params.beta
  checks: T.List[Check] = []
  for t in KERNEL_TIMES:
    # both sides of the pair fall below e^{−46} at the grid ends
    plan = make_plan(params, config.grid, spread_radius(params, t), (TAIL / t) ** (1 / two_b))
    K = sample(plan.physical_grid, lambda r: kernel_K(r, t, params), params)
    expected = sample(plan.spectral_grid, lambda rho: kernel_K_transform(rho, t, params), params, Space.SPECTRAL)
    forward = hankel_forward(K, plan)
    checks.append(Check(f'transform.kernel_forward[t={t:g}]', 'H K(·, t) = e^{−ρ^{2−β}t}ρ^{k−β}',
                        relative_error(forward.values, expected.values, spectral_weights(expected)), 1e-6))
    inverse = hankel_inverse(expected, plan)
    checks.append(Check(f'transform.kernel_inverse[t={t:g}]', 'H⁻¹[e^{−ρ^{2−β}t}ρ^{k−β}] = K(·, t)',
                        relative_error(inverse.values, K.values, physical_weights(K)), 1e-6))
  return checks


def run(config: RunConfig) -> T.List[Check]:
  return _data_checks(config) + _kernel_checks(config)
