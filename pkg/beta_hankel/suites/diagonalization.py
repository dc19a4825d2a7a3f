import math
import typing as T

import numpy as np

from beta_hankel.config import RunConfig, data_radius, spectral_radius
from beta_hankel.hankel import BOUNDARY, apply_operator_A, hankel_forward, spectral_multiply
from beta_hankel.radial import sample
from beta_hankel.suites.check import Check, gaussian, make_plan, relative_error, spectral_weights

ANCHOR = 'H(r^β A_{μ(k)} φ) = ρ^{2−β} Hφ'
TOLERANCE = 1e-4
PROFILES = ((1.0, 0.0), (0.8, 0.3))
# cut near the origin so that r_min^{n+2k−β} stays below this
TRUNCATION = 1e-6
PANEL_RATIO = 1.25


def run(config: RunConfig) -> T.List[Check]:
  '''Compare the spectral symbol against finite differences of A_{μ(k)}.

  The physical grid starts close enough to 0 that the cut tail stays below
  TRUNCATION. Masked boundary nodes of A_{μ(k)}φ are zeroed before the
  transform and the outer spectral nodes are left out of the comparison.
  '''
  params = config.params
  r_min = min(1e-3, TRUNCATION ** (1 / (params.n + 2 * params.k - params.beta)))
  r_max = data_radius(params, 1.1)
  panels = int(math.ceil(math.log(r_max / r_min) / math.log(PANEL_RATIO)))
  narrowest = min(width for width, _ in PROFILES)
  plan = make_plan(params, config.grid, r_max, spectral_radius(params, narrowest), r_min=r_min, panels=panels)
  checks: T.List[Check] = []
  for width, quadratic in PROFILES:
    phi = sample(plan.physical_grid, gaussian(params, width, quadratic=quadratic), params)
    A_phi = apply_operator_A(phi)
    weighted = A_phi.with_values(np.where(A_phi.valid, np.power(A_phi.nodes, params.beta) * A_phi.values, 0.0))
    lhs = hankel_forward(weighted, plan)
    rhs = spectral_multiply(hankel_forward(phi, plan), params.symbol)
    weights = spectral_weights(rhs)
    weights[:BOUNDARY] = 0.0
    weights[-BOUNDARY:] = 0.0
    checks.append(Check(f'diagonalization[width={width:g},quadratic={quadratic:g}]', ANCHOR,
                        relative_error(lhs.values, rhs.values, weights), TOLERANCE))
  return checks
