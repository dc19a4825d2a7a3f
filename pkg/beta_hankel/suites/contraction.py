'''Picard contraction on data of growing size and the stability of the measured constants.

Not part of the default selection: each data scale runs a full nonlinear window
and the constants are measured on two grids.
'''
import math
import typing as T
from fractions import Fraction

from beta_hankel.config import RunConfig, data_radius, spectral_radius
from beta_hankel.evolution import EvolutionConfig, existence_time, measure_contraction_constants, picard_solve
from beta_hankel.model import ModelParams, NonlinearitySpec, Triplet, admissible_bound, nonlinearity, triplet_for
from beta_hankel.radial import lp_norm_deta, sample
from beta_hankel.suites.check import Check, gaussian, make_plan

SCALES = (0.1, 0.3, 1.0, 3.0, 10.0)
RATIO_LIMIT = 0.55
# iterate differences below this fraction of the first one are round-off
NOISE_FLOOR = 1e-12
STABILITY = 0.1
TRIAL_WIDTHS = (0.7, 1.0, 1.4)


def trial_triplet(params: ModelParams, q: float = 2.0) -> Triplet:
  '''An admissible triplet at q, with p halfway to the admissible bound (capped at 3q).'''
  bound = admissible_bound(Fraction(q), params, Fraction(params.beta))
  top = 3 * q if isinstance(bound, float) and math.isinf(bound) else min(float(bound), 3 * q)
  return triplet_for((q + top) / 2, q, params)


def _supercritical(params: ModelParams, nl: NonlinearitySpec) -> Triplet:
  # existence times are finite only above q₀
  return trial_triplet(params, 2 * nl.q0)


def _ratios(config: RunConfig) -> T.List[Check]:
  params = config.params
  nl = nonlinearity(1.0, 'focusing', params)
  triplet = _supercritical(params, nl)
  plan = make_plan(params, config.grid, data_radius(params, max(TRIAL_WIDTHS)),
                   spectral_radius(params, min(TRIAL_WIDTHS)))
  trials = [sample(plan.physical_grid, gaussian(params, width), params) for width in TRIAL_WIDTHS]
  constants = measure_contraction_constants(triplet, params, plan, trials, nl=nl, samples=24)
  checks: T.List[Check] = []
  for scale in SCALES:
    u0 = sample(plan.physical_grid, gaussian(params, amplitude=scale), params)
    horizon = 0.5 * existence_time(lp_norm_deta(u0, triplet.q), constants, nl, triplet.q, params.gamma)
    cfg = EvolutionConfig(horizon, 1, nl, q=triplet.q, triplet=triplet)
    trajectory, _ = picard_solve(u0, cfg, plan)
    diffs = trajectory.windows[0].diffs
    ratios = [b / a for a, b in zip(diffs[:-1], diffs[1:]) if a > NOISE_FLOOR * diffs[0]]
    checks.append(Check(f'contraction.picard_ratio[scale={scale:g}]', 'the Picard map contracts on [0, T_exist]',
                        max(ratios, default=0.0), RATIO_LIMIT))
  return checks


def _stability(config: RunConfig) -> T.List[Check]:
  params = config.params
  triplet = _supercritical(params, nonlinearity(1.0, 'focusing', params))
  constants = []
  for refinement in (1, 2):
    grid = config.grid
    plan = make_plan(params, grid, data_radius(params, max(TRIAL_WIDTHS)), spectral_radius(params, min(TRIAL_WIDTHS)),
                     panels=grid.panels * refinement)
    trials = [sample(plan.physical_grid, gaussian(params, width), params) for width in TRIAL_WIDTHS]
    constants.append(measure_contraction_constants(triplet, params, plan, trials, horizon=0.5, samples=24))
  coarse, fine = constants
  return [
    Check('contraction.C1_grid_stability', 'C₁ does not depend on the grid', abs(fine.C1 / coarse.C1 - 1), STABILITY),
    Check('contraction.C2_grid_stability', 'C₂ does not depend on the grid', abs(fine.C2 / coarse.C2 - 1), STABILITY),
  ]


def run(config: RunConfig) -> T.List[Check]:
  return _ratios(config) + _stability(config)
