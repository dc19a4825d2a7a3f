import itertools
import math

import numpy as np
import pytest as PT
import scipy.special as SS

from beta_hankel.config import RunConfig, data_radius, spectral_radius
from beta_hankel.hankel import apply_operator_A, hankel_forward, hankel_inverse, kernel_U, kernel_V, plan_transform, \
  resolve_grids, spectral_multiply
from beta_hankel.model import ModelParams, derive_params
from beta_hankel.radial import Space, build_grid, sample, zeros
from beta_hankel.suites.check import make_plan, physical_weights, relative_error, spectral_weights
from beta_hankel.suites.transform import PROFILES
from beta_hankel.util.errors import NumericalError, ValidationError
from tests import gaussian, plan_for

MODELS = [derive_params(3, 1.0, 0), derive_params(2, 0.5, 0), derive_params(3, 0.5, 1), derive_params(4, 1.5, 0)]


def test_kernels_at_beta_zero():
  params = derive_params(3, 0.0, 0)
  w = np.linspace(0.1, 30, 50)
  expected = math.sqrt(2 / math.pi) * np.sin(w) / w
  np.testing.assert_allclose(kernel_U(w, params), expected, rtol=1e-10, atol=1e-11)
  np.testing.assert_allclose(kernel_V(w, params), expected, rtol=1e-10, atol=1e-11)

def test_kernels_at_beta_one():
  params = derive_params(3, 1.0, 0)
  w = np.linspace(0.1, 30, 50)
  bessel = SS.jv(1, 2 * np.sqrt(w))
  np.testing.assert_allclose(kernel_U(w, params), w ** -1.5 * bessel, rtol=1e-9, atol=1e-11)
  np.testing.assert_allclose(kernel_V(w, params), w ** -0.5 * bessel, rtol=1e-9, atol=1e-11)


@PT.mark.parametrize('n', [2, 3, 4])
def test_classical_gaussian_pair(n: int):
  '''At β = 0, k = 0 the transform is the radial Fourier transform and e^{−r²/2} is its own image.'''
  params = derive_params(n, 0.0, 0)
  plan = plan_for(params, width=math.sqrt(2))
  F = hankel_forward(sample(plan.physical_grid, lambda r: np.exp(-r * r / 2), params), plan)
  assert F.space == Space.SPECTRAL
  np.testing.assert_allclose(F.values, np.exp(-F.nodes ** 2 / 2), rtol=0, atol=1e-9)

LATTICE = [derive_params(n, beta, k) for n, beta, k in itertools.product((2, 3), (0.0, 0.5, 1.0), (0, 1, 2))]

@PT.mark.parametrize('params', LATTICE, ids=lambda p: f'n={p.n},beta={p.beta},k={p.k}')
def test_round_trip_and_isometry(params: ModelParams):
  narrowest = min(width for width, _ in PROFILES)
  plan = make_plan(params, RunConfig().grid, data_radius(params, 1.1), spectral_radius(params, narrowest))
  for width, quadratic in PROFILES:
    f = sample(plan.physical_grid, gaussian(params, width, quadratic=quadratic), params)
    F = hankel_forward(f, plan)
    back = hankel_inverse(F, plan)
    assert relative_error(back.values, f.values, physical_weights(f)) < 1e-6
    physical = float(np.sum(f.values ** 2 * physical_weights(f)))
    spectral = float(np.sum(F.values ** 2 * spectral_weights(F)))
    assert spectral == PT.approx(physical, rel=1e-6)

@PT.mark.parametrize('params', MODELS, ids=lambda p: f'n={p.n},beta={p.beta},k={p.k}')
def test_round_trip_on_the_default_plan(params: ModelParams):
  plan = plan_for(params)
  f = sample(plan.physical_grid, gaussian(params), params)
  back = hankel_inverse(hankel_forward(f, plan), plan)
  assert relative_error(back.values, f.values, physical_weights(f)) < 1e-6

def test_linearity():
  params = MODELS[0]
  plan = plan_for(params)
  f = sample(plan.physical_grid, gaussian(params), params)
  g = sample(plan.physical_grid, gaussian(params, width=0.8), params)
  combined = hankel_forward(2.0 * f + g * -3.0, plan).values
  separate = 2.0 * hankel_forward(f, plan).values - 3.0 * hankel_forward(g, plan).values
  np.testing.assert_allclose(combined, separate, rtol=0, atol=1e-12 * np.abs(separate).max())


def test_symbol_multiplication():
  params = MODELS[0]
  plan = plan_for(params)
  F = hankel_forward(sample(plan.physical_grid, gaussian(params), params), plan)
  multiplied = spectral_multiply(F, params.symbol)
  np.testing.assert_allclose(multiplied.values, F.values * plan.symbol())
  with PT.raises(NumericalError, match='not finite'):
    spectral_multiply(F, lambda rho: np.full_like(rho, np.inf))
  with PT.raises(ValidationError, match='^space: '):
    spectral_multiply(zeros(plan.physical_grid, params), params.symbol)

def test_wrong_space_or_grid():
  params = MODELS[0]
  plan = plan_for(params)
  with PT.raises(ValidationError, match='^space: '):
    hankel_forward(zeros(plan.spectral_grid, params, Space.SPECTRAL), plan)
  with PT.raises(ValidationError, match='^grid: '):
    hankel_forward(zeros(build_grid(1e-3, 5, 2, 4), params), plan)
  with PT.raises(ValidationError, match='^space: '):
    hankel_inverse(zeros(plan.physical_grid, params), plan)


def test_resolved_grids_keep_the_phase_bounded():
  params = MODELS[0]
  physical, spectral = resolve_grids(params, 10.0, 200.0, panels=10, order=8)
  assert len(physical) > 10 * 8
  plan = plan_transform(physical, spectral, params)
  assert plan.kernel_matrix_U.shape == (len(spectral), len(physical))

def test_coarse_plan_is_rejected():
  params = MODELS[0]
  physical = build_grid(1e-8, 10.0, 4, 8)
  spectral = build_grid(1e-8, 200.0, 4, 8)
  with PT.raises(ValidationError, match='too coarse'):
    plan_transform(physical, spectral, params)

def test_nodes_per_period_floor():
  with PT.raises(ValidationError, match='^grid.nodes_per_period: '):
    resolve_grids(MODELS[0], 10.0, 10.0, nodes_per_period=4)


def test_operator_A_on_a_gaussian():
  params = derive_params(3, 0.0, 0)
  grid = build_grid(0.05, 4.0, 160, 8)
  result = apply_operator_A(sample(grid, lambda r: np.exp(-r * r), params))
  r = grid.nodes
  exact = (6 - 4 * r * r) * np.exp(-r * r)
  window = result.valid & (r > 0.5) & (r < 2.0)
  np.testing.assert_allclose(result.values[window], exact[window], rtol=0, atol=1e-3)
  assert np.interp(1.0, r, result.values) == PT.approx(2 / math.e, abs=1e-3)
  assert not result.valid[:2].any() and not result.valid[-2:].any()

def test_operator_A_includes_the_degree_potential():
  params = derive_params(3, 0.0, 1)
  grid = build_grid(0.05, 4.0, 160, 8)
  result = apply_operator_A(sample(grid, lambda r: r * np.exp(-r * r), params))
  r = grid.nodes
  exact = (10 * r - 4 * r ** 3) * np.exp(-r * r)
  window = result.valid & (r > 0.5) & (r < 2.0)
  np.testing.assert_allclose(result.values[window], exact[window], rtol=0, atol=1e-3)

def test_operator_A_rejects():
  params = MODELS[0]
  with PT.raises(ValidationError, match='^grid: '):
    apply_operator_A(zeros(build_grid(1e-3, 5, 1, 4), params))
  with PT.raises(ValidationError, match='^space: '):
    apply_operator_A(zeros(build_grid(1e-3, 5, 2, 4), params, Space.SPECTRAL))
