import math

import numpy as np
import pytest as PT

from beta_hankel.config import data_radius, spectral_radius, spread_radius
from beta_hankel.evolution import UNIT_CONSTANTS, BlowupReport, ContractionConstants, EvolutionConfig, \
  blowup_envelope, blowup_fit, check_envelope, duhamel, existence_time, linear_trajectory, \
  measure_contraction_constants, picard_solve, semigroup_apply
from beta_hankel.hankel import hankel_forward, hankel_inverse, plan_transform, resolve_grids
from beta_hankel.model import derive_params, nonlinearity, triplet_for
from beta_hankel.radial import lp_norm_deta, sample, zeros
from beta_hankel.suites.check import physical_weights, relative_error
from beta_hankel.trajectory import Trajectory, x_norm
from beta_hankel.util.errors import NumericalError, ValidationError
from tests import gaussian, plan_for

PARAMS = derive_params(3, 1.0, 0)


@PT.fixture(scope='module')
def plan():
  return plan_for(PARAMS)


def test_semigroup_at_zero_and_backwards(plan):
  a = sample(plan.physical_grid, gaussian(PARAMS), PARAMS)
  same = semigroup_apply(a, 0.0, plan)
  np.testing.assert_array_equal(same.values, a.values)
  assert same.values is not a.values
  with PT.raises(ValidationError, match='^t: '):
    semigroup_apply(a, -0.1, plan)

def test_semigroup_is_the_heat_flow_at_beta_zero():
  params = derive_params(3, 0.0, 0)
  s, t = 0.5, 1.0
  physical, spectral = resolve_grids(params, data_radius(params, math.sqrt(4 * (s + t))),
                                     spectral_radius(params, math.sqrt(4 * s)))
  heat_plan = plan_transform(physical, spectral, params)
  a = sample(heat_plan.physical_grid, lambda r: np.exp(-r * r / (4 * s)), params)
  flow = semigroup_apply(a, t, heat_plan)
  exact = (s / (s + t)) ** 1.5 * np.exp(-flow.nodes ** 2 / (4 * (s + t)))
  assert relative_error(flow.values, exact, physical_weights(flow)) < 1e-6

def test_semigroup_contracts_in_l2(plan):
  a = sample(plan.physical_grid, gaussian(PARAMS), PARAMS)
  norms = [lp_norm_deta(semigroup_apply(a, t, plan), 2) for t in (0.0, 0.1, 0.5, 1.0)]
  assert all(later <= earlier * (1 + 1e-9) for earlier, later in zip(norms[:-1], norms[1:]))


def test_duhamel_of_a_constant_forcing(plan):
  g = sample(plan.physical_grid, gaussian(PARAMS), PARAMS)
  t = 1.0
  forcing = Trajectory(np.array([0.0, t]), [g, g])
  G = hankel_forward(g, plan)
  symbol = plan.symbol()
  exact = hankel_inverse(G.with_values(-np.expm1(-symbol * t) / symbol * G.values), plan)
  measured = duhamel(forcing, t, plan, 200)
  assert relative_error(measured.values, exact.values, physical_weights(exact)) < 1e-3

def test_duhamel_of_nothing(plan):
  z = zeros(plan.physical_grid, PARAMS)
  forcing = Trajectory(np.array([0.0, 1.0]), [z, z])
  assert not duhamel(forcing, 1.0, plan, 4).values.any()
  assert not duhamel(forcing, 0.0, plan, 4).values.any()

def test_duhamel_needs_the_whole_interval(plan):
  z = zeros(plan.physical_grid, PARAMS)
  with PT.raises(ValidationError, match='^forcing: '):
    duhamel(Trajectory(np.array([0.0, 0.5]), [z, z]), 1.0, plan, 4)
  with PT.raises(ValidationError, match='^steps: '):
    duhamel(Trajectory(np.array([0.0, 1.0]), [z, z]), 1.0, plan, 0)


def test_existence_time():
  nl = nonlinearity(1, '+', PARAMS)
  assert existence_time(1.0, UNIT_CONSTANTS, nl, 4.0, PARAMS.gamma) == PT.approx(1 / 16)
  assert existence_time(2.0, UNIT_CONSTANTS, nl, 4.0, PARAMS.gamma) == PT.approx(1 / 64)
  assert existence_time(2.0, UNIT_CONSTANTS, nl, math.inf, PARAMS.gamma) == PT.approx(1 / 8)
  assert math.isinf(existence_time(0.0, UNIT_CONSTANTS, nl, 4.0, PARAMS.gamma))
  with PT.raises(ValidationError, match='critical exponent'):
    existence_time(1.0, UNIT_CONSTANTS, nl, 2.0, PARAMS.gamma)

def test_envelope():
  nl = nonlinearity(1, '+', PARAMS)
  envelope = blowup_envelope([0.0, 0.75, 1.0, 2.0], 1.0, UNIT_CONSTANTS, nl, 4.0, PARAMS.gamma)
  assert envelope[0] == PT.approx(0.25)
  assert envelope[1] == PT.approx(0.5)
  assert np.isnan(envelope[2:]).all()

def test_constants_must_be_positive():
  with PT.raises(ValidationError, match='positive'):
    ContractionConstants(0.0, 1.0)


def test_blowup_fit_noiseless():
  times = 1 - np.geomspace(1, 1e-4, 60)
  report = blowup_fit(times, (1 - times) ** -2.0)
  assert report.detected
  assert report.exponent_fit == PT.approx(2.0, abs=1e-6)
  assert report.T_star_fit == PT.approx(1.0, abs=1e-6)
  assert report.constant_fit == PT.approx(1.0, rel=1e-5)
  assert math.isnan(report.lower_bound_exponent)

def test_blowup_fit_noisy():
  rng = np.random.default_rng(1)
  times = 1 - np.geomspace(1, 1e-5, 120)
  values = (1 - times) ** -0.75 * (1 + 0.01 * rng.standard_normal(len(times)))
  nl = nonlinearity(1, '+', PARAMS)
  report = blowup_fit(times, values, nl, 4.0, PARAMS.gamma)
  assert report.exponent_fit == PT.approx(0.75, abs=0.05)
  assert report.T_star_fit == PT.approx(1.0, abs=1e-4)
  assert report.lower_bound_exponent == PT.approx(0.5)

@PT.mark.parametrize('times, values, message', [
  (np.linspace(0, 1, 5), np.ones(5), 'at least 8'),
  (np.linspace(0, 1, 10), np.linspace(1, 2, 10), 'no blow-up signature'),
  (np.linspace(0, 1, 10), np.linspace(-1, 2e3, 10), 'finite and positive'),
  (np.linspace(0, 1, 10), np.ones(9), 'equally long'),
])
def test_blowup_fit_rejects(times, values, message: str):
  with PT.raises(ValidationError, match=message):
    blowup_fit(times, values)

def test_check_envelope_ignores_quiet_runs(plan):
  report = BlowupReport(False)
  z = zeros(plan.physical_grid, PARAMS)
  traj = Trajectory(np.array([0.0]), [z])
  assert check_envelope(report, traj, UNIT_CONSTANTS, nonlinearity(1, '+', PARAMS), PARAMS.gamma) is report


def test_config_rejects():
  nl = nonlinearity(1, '+', PARAMS)
  with PT.raises(ValidationError, match='^evolution.t_end: '):
    EvolutionConfig(0.0, 1, nl)
  with PT.raises(ValidationError, match='^evolution.steps: '):
    EvolutionConfig(1.0, 0, nl)

def test_zero_data_stays_zero(plan):
  cfg = EvolutionConfig(1.0, 2, nonlinearity(1, '+', PARAMS))
  trajectory, blowup = picard_solve(zeros(plan.physical_grid, PARAMS), cfg, plan)
  assert not blowup.detected
  assert len(trajectory) == 1 + 2 * cfg.substeps
  assert trajectory.times[-1] == PT.approx(1.0)
  assert not trajectory.norms_q.any()
  assert [window.iterations for window in trajectory.windows] == [1, 1]

def test_small_data_follows_the_linear_flow(plan):
  u0 = sample(plan.physical_grid, gaussian(PARAMS, amplitude=1e-6), PARAMS)
  cfg = EvolutionConfig(0.5, 1, nonlinearity(1, '+', PARAMS))
  trajectory, blowup = picard_solve(u0, cfg, plan)
  assert not blowup.detected
  linear = semigroup_apply(u0, 0.5, plan)
  assert relative_error(trajectory.states[-1].values, linear.values, physical_weights(linear)) < 1e-5

def test_defocusing_decays(plan):
  u0 = sample(plan.physical_grid, gaussian(PARAMS, amplitude=2.0), PARAMS)
  cfg = EvolutionConfig(1.0, 4, nonlinearity(1, 'defocusing', PARAMS))
  trajectory, blowup = picard_solve(u0, cfg, plan)
  assert not blowup.detected
  assert trajectory.norms_q[-1] < trajectory.norms_q[0]

def test_initial_data_must_match_the_plan(plan):
  cfg = EvolutionConfig(1.0, 1, nonlinearity(1, '+', PARAMS))
  with PT.raises(ValidationError, match='^u0: '):
    picard_solve(zeros(plan.spectral_grid, PARAMS), cfg, plan)

def test_focusing_blowup(plan):
  nl = nonlinearity(1, 'focusing', PARAMS)
  u0 = sample(plan.physical_grid, gaussian(PARAMS, amplitude=5.0), PARAMS)
  cfg = EvolutionConfig(1.0, 10, nl, q=4.0)
  trajectory, blowup = picard_solve(u0, cfg, plan)
  assert blowup.detected
  # the peak of the data bounds T* from below by 1/5
  assert 0.19 < trajectory.times[-1] < 1.0
  assert 0.19 <= blowup.T_star_fit <= 0.5
  assert blowup.lower_bound_exponent == PT.approx(0.5)
  assert blowup.exponent_fit >= blowup.lower_bound_exponent - 0.1

def test_blowup_fit_next_to_the_last_sample():
  T_star = 0.25 + 1e-12
  times = T_star - 1e-9 * np.geomspace(1, 1e-4, 20)
  report = blowup_fit(times, 1 / (T_star - times))
  assert report.detected
  assert math.isfinite(report.T_star_fit) and report.T_star_fit > times[-1]
  assert report.T_star_fit == PT.approx(T_star, rel=1e-9)
  assert report.exponent_fit == PT.approx(1.0, abs=0.1)

def test_blowup_fit_needs_a_resolvable_window():
  times = np.full(10, 0.25)
  with PT.raises(NumericalError, match='too narrow'):
    blowup_fit(times, np.geomspace(1, 1e4, 10))

def test_small_data_at_the_critical_exponent_is_global():
  '''At q = q₀ the L^q norm is scale invariant: wide, flat data stands in for a long run.'''
  nl = nonlinearity(1, 'focusing', PARAMS)
  assert nl.q0 == PT.approx(2.0)
  t_end, width = 1e3, 1e3
  physical, spectral = resolve_grids(PARAMS, max(data_radius(PARAMS, width), spread_radius(PARAMS, t_end)),
                                     spectral_radius(PARAMS, width), panels=60)
  wide = plan_transform(physical, spectral, PARAMS)
  triplet = triplet_for(3, 2, PARAMS)
  u0 = sample(wide.physical_grid, gaussian(PARAMS, width, amplitude=2e-6), PARAMS)
  cfg = EvolutionConfig(t_end, 10, nl, q=2.0, triplet=triplet)
  trajectory, blowup = picard_solve(u0, cfg, wide)
  assert not blowup.detected
  assert trajectory.times[-1] == PT.approx(t_end)
  assert trajectory.norms_q.max() <= 1.01 * trajectory.norms_q[0]
  linear = linear_trajectory(u0, trajectory.times, wide, 2.0, triplet)
  assert x_norm(trajectory, triplet) <= 1.01 * x_norm(linear, triplet)

def test_picard_differences_use_the_solution_norm(plan):
  triplet = triplet_for(6, 4, PARAMS)
  u0 = sample(plan.physical_grid, gaussian(PARAMS, amplitude=0.5), PARAMS)
  nl = nonlinearity(1, 'focusing', PARAMS)
  plain, _ = picard_solve(u0, EvolutionConfig(0.05, 1, nl, q=4.0), plan)
  measured, _ = picard_solve(u0, EvolutionConfig(0.05, 1, nl, q=4.0, triplet=triplet), plan)
  first_plain, first_measured = plain.windows[0].diffs[0], measured.windows[0].diffs[0]
  # X = L^∞_t L^q ∩ L^m_t L^p dominates L^∞_t L^q
  assert first_measured >= first_plain * (1 - 1e-12)
  np.testing.assert_allclose(measured.states[-1].values, plain.states[-1].values, rtol=0,
                             atol=1e-8 * np.abs(plain.states[-1].values).max())


def test_linear_trajectory(plan):
  a = sample(plan.physical_grid, gaussian(PARAMS), PARAMS)
  traj = linear_trajectory(a, [0.0, 0.5, 1.0], plan, 2.0)
  assert len(traj) == 3
  np.testing.assert_array_equal(traj.states[0].values, a.values)

def test_contraction_constants(plan):
  triplet = triplet_for(6, 4, PARAMS)
  trials = [sample(plan.physical_grid, gaussian(PARAMS, width), PARAMS) for width in (0.8, 1.2)]
  constants = measure_contraction_constants(triplet, PARAMS, plan, trials, horizon=0.5, samples=12, steps=8)
  # X contains L^∞(L^q) and t = 0 is sampled
  assert constants.C1 >= 1 - 1e-12
  assert constants.C2 > 0
  assert constants.trial_C1 in (0, 1)
  assert 0 < constants.T_exist < math.inf
  assert constants.dict['norm'] == 'x'

def test_contraction_constants_in_the_weighted_norm(plan):
  triplet = triplet_for(6, 4, PARAMS)
  trials = [sample(plan.physical_grid, gaussian(PARAMS, width), PARAMS) for width in (0.8, 1.2)]
  x = measure_contraction_constants(triplet, PARAMS, plan, trials, horizon=0.5, samples=12, steps=8)
  y = measure_contraction_constants(triplet, PARAMS, plan, trials, horizon=0.5, norm='y', samples=12, steps=8)
  assert y.dict['norm'] == 'y'
  # both norms contain L^∞(L^q)
  assert y.C1 >= 1 - 1e-12
  assert 0.1 < y.C1 / x.C1 < 10
  assert 0.1 < y.C2 / x.C2 < 10
  assert 0 < y.T_exist < math.inf
  generalized = triplet_for(4, 2, PARAMS)
  only_y = measure_contraction_constants(generalized, PARAMS, plan, trials[:1], horizon=0.5, norm='y', samples=6,
                                         steps=4)
  assert only_y.C1 >= 1 - 1e-12 and only_y.C2 > 0

def test_contraction_constants_at_the_critical_exponent(plan):
  triplet = triplet_for(3, 2, PARAMS)
  trial = sample(plan.physical_grid, gaussian(PARAMS), PARAMS)
  constants = measure_contraction_constants(triplet, PARAMS, plan, [trial], horizon=0.5, samples=6, steps=4)
  assert math.isnan(constants.T_exist)

def test_contraction_constants_reject(plan):
  trial = sample(plan.physical_grid, gaussian(PARAMS), PARAMS)
  admissible = triplet_for(3, 2, PARAMS)
  generalized = triplet_for(4, 2, PARAMS)
  with PT.raises(ValidationError, match='^trials: '):
    measure_contraction_constants(admissible, PARAMS, plan, [])
  with PT.raises(ValidationError, match='not admissible'):
    measure_contraction_constants(generalized, PARAMS, plan, [trial])
  with PT.raises(ValidationError, match='^norm: '):
    measure_contraction_constants(admissible, PARAMS, plan, [trial], norm='z')
  with PT.raises(ValidationError, match='^trials: '):
    measure_contraction_constants(admissible, PARAMS, plan, [zeros(plan.physical_grid, PARAMS)])
