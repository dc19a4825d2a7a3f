import math
import typing as T

import numpy as np

from beta_hankel.config import TAIL, RunConfig, data_radius, spectral_radius, spread_radius
from beta_hankel.evolution import semigroup_apply
from beta_hankel.kernels import semigroup_quadrature
from beta_hankel.model import derive_params
from beta_hankel.radial import integrate_weighted, sample
from beta_hankel.suites.check import Check, gaussian, make_plan, physical_weights, relative_error

# the Gaussian data e^{−r²/(4s)} of the heat check
HEAT_SPREAD = 0.5
HEAT_TIMES = (0.1, 1.0)
MASS_TIMES = (0.5, 1.0, 2.0, 3.0, 4.0, 5.0)
POSITIVITY_TIMES = (0.1, 1.0, 5.0)


def _heat(config: RunConfig) -> T.List[Check]:
  '''β = 0, n = 3 is the classical heat flow, which keeps Gaussians Gaussian.'''
  params = derive_params(3, 0.0, 0)
  s = HEAT_SPREAD
  width = math.sqrt(4 * s)
  r_max = math.sqrt(4 * (s + max(HEAT_TIMES)) * TAIL)
  plan = make_plan(params, config.grid, r_max, spectral_radius(params, width))
  a = sample(plan.physical_grid, lambda r: np.exp(-r * r / (4 * s)), params)
  checks: T.List[Check] = []
  for t in HEAT_TIMES:
    flow = semigroup_apply(a, t, plan)
    exact = (s / (s + t)) ** 1.5 * np.exp(-a.nodes ** 2 / (4 * (s + t)))
    checks.append(Check(f'flow.heat[t={t:g}]', 'β = 0, n = 3: S(t) is the heat semigroup',
                        relative_error(flow.values, exact, physical_weights(flow)), 1e-6))
  return checks


def _composition(config: RunConfig) -> Check:
  params = config.params
  t, s = 0.3, 0.7
  plan = make_plan(params, config.grid, max(data_radius(params), spread_radius(params, t + s)),
                   spectral_radius(params, 1.0))
  a = sample(plan.physical_grid, gaussian(params), params)
  twice = semigroup_apply(semigroup_apply(a, s, plan), t, plan)
  once = semigroup_apply(a, t + s, plan)
  return Check('flow.composition', 'S(t)S(s) = S(t+s)', relative_error(twice.values, once.values,
                                                                          physical_weights(once)), 1e-8)


def _mass_and_sign(config: RunConfig) -> T.List[Check]:
  '''Conservation of ∫u r^{n−1−β}dr for k = 0 and preservation of the sign.'''
  model = config.params
  params = derive_params(model.n, model.beta, 0)
  horizon = max(MASS_TIMES)
  plan = make_plan(params, config.grid, max(data_radius(params), spread_radius(params, horizon)),
                   spectral_radius(params, 1.0))
  a = sample(plan.physical_grid, gaussian(params), params)
  exponent = params.n - 1 - params.beta
  mass = integrate_weighted(a, exponent)
  drift = max(abs(integrate_weighted(semigroup_apply(a, t, plan), exponent) - mass) / mass for t in MASS_TIMES)
  # a sum of nonnegative terms
  lowest = min(float(semigroup_quadrature(a, t).values.min()) for t in POSITIVITY_TIMES)
  return [
    Check('flow.mass_conservation', '∫S(t)a r^{n−1−β}dr = ∫a r^{n−1−β}dr for k = 0', drift, 1e-6),
    Check('flow.positivity', 'S(t) keeps nonnegative data nonnegative', max(0.0, -lowest), 1e-12),
  ]


def run(config: RunConfig) -> T.List[Check]:
  return _heat(config) + [_composition(config)] + _mass_and_sign(config)
