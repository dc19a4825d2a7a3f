import math
import typing as T

import numpy as np

from beta_hankel.config import RunConfig, data_radius, spectral_radius, spread_radius
from beta_hankel.estimates import smoothing_audit, smoothing_constant
from beta_hankel.radial import build_grid, sample
from beta_hankel.suites.check import Check, gaussian, make_plan

ANCHOR = '‖S(t)a/r^k‖_p ≤ C(β, μ, p, q) t^{γ(1/p−1/q)} ‖a/r^k‖_q'
PAIRS = ((2.0, 1.0), (4.0, 2.0), (math.inf, 2.0), (3.0, 1.5), (math.inf, 1.0), (4.0, 4.0))
SLACK = 1e-6


def run(config: RunConfig) -> T.List[Check]:
  '''The pointwise-in-time smoothing bound over t ∈ [10⁻², 10²].

  Short times run through the spectral route on a plan sized for t = 1; long
  times through kernel quadrature on a wide log grid, which needs no plan.
  '''
  params = config.params
  times = np.geomspace(1e-2, 1e2, 9)
  short = [float(t) for t in times if t <= 1]
  long = [float(t) for t in times if t > 1]
  plan = make_plan(params, config.grid, max(data_radius(params), spread_radius(params, 1.0)),
                   spectral_radius(params, 1.0))
  rows = smoothing_audit(sample(plan.physical_grid, gaussian(params), params), PAIRS, short, plan)
  wide = build_grid(config.grid.r_min, max(data_radius(params), spread_radius(params, float(times[-1]))),
                    2 * config.grid.panels, config.grid.order)
  rows += smoothing_audit(sample(wide, gaussian(params), params), PAIRS, long)
  checks: T.List[Check] = []
  for p, q in PAIRS:
    worst = max(row.ratio for row in rows if (row.p, row.q) == (p, q))
    checks.append(Check(f'smoothing[p={p:g},q={q:g}]', ANCHOR, worst - 1, SLACK))
  exact = max(abs(smoothing_constant(p, p, params) - 1) for p in (1.0, 2.0, 3.5, math.inf))
  checks.append(Check('smoothing.constant_at_p_equals_q', 'C(β, μ, p, p) = 1', exact, 0.0))
  return checks
