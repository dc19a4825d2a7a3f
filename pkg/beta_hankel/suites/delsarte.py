'''The Delsarte kernel: its three integral identities and the ♯-convolution it defines.'''
import typing as T

import numpy as np

from beta_hankel.config import RunConfig, data_radius, spectral_radius
from beta_hankel.kernels import KernelEval, Variable, delsarte_identity, sharp_convolve, sharp_convolve_direct
from beta_hankel.model import ModelParams, derive_params
from beta_hankel.radial import sample
from beta_hankel.suites.check import Check, gaussian, make_plan

PARAMETER_SETS = ((3, 1.0, 0), (3, 0.5, 1), (2, 0.5, 0))
FIXED_POINTS = ((0.5, 0.7), (1.0, 1.0), (1.3, 0.4), (2.0, 1.5), (0.8, 2.2))
IDENTITIES: T.Dict[Variable, str] = {
  'x': '∫x^{k−β}D(x,y,z)x^{n−1}dx = C(yz)^{k−β}',
  'y': '∫y^k D(x,y,z)y^{n−1}dy = C x^k z^{k−β}',
  'z': '∫z^k D(x,y,z)z^{n−1}dz = C x^k y^{k−β}',
}
CONVOLUTION_POINTS = np.geomspace(0.3, 2.5, 8)
TOLERANCE = 1e-4


def _label(params: ModelParams) -> str:
  return f'n={params.n},beta={params.beta:g},k={params.k}'


def _identities(params: ModelParams) -> T.List[Check]:
  checks: T.List[Check] = []
  for which, anchor in IDENTITIES.items():
    worst = 0.0
    for fixed in FIXED_POINTS:
      measured, expected = delsarte_identity(which, fixed, params)
      worst = max(worst, abs(measured - expected) / abs(expected))
    checks.append(Check(f'delsarte.identity_{which}[{_label(params)}]', anchor, worst, TOLERANCE))
  return checks


def _degenerate(params: ModelParams) -> Check:
  '''Points on the edge of the triangle support must be flagged and set to 0.'''
  c, s = params.scale, params.stretch
  edges = []
  for y, z in FIXED_POINTS:
    side_y, side_z = c * y ** s, c * z ** s
    for side in (side_y + side_z, abs(side_y - side_z)):
      if side > 0:
        edges.append(((side / c) ** (1 / s), y, z))
  x, y, z = (np.array(column) for column in zip(*edges))
  evaluated = KernelEval(params, 1.0).delsarte(x, y, z)
  missed = np.sum(~evaluated.degenerate | (evaluated.values != 0))
  singular = 'singular' if evaluated.singular else 'regular'
  return Check(f'delsarte.degenerate[{_label(params)},{singular}]', 'degenerate triangles are flagged and give 0',
               float(missed), 0.0)


def _convolution(config: RunConfig, params: ModelParams) -> Check:
  cutoff = data_radius(params)
  # f♯g reaches out to where the stretched radius doubles
  plan = make_plan(params, config.grid, cutoff * 2 ** (1 / params.stretch), spectral_radius(params, 1.0))
  fn = gaussian(params)
  f = sample(plan.physical_grid, fn, params)
  spectral = sharp_convolve(f, f, plan)
  nodes = plan.physical_grid.nodes
  worst = 0.0
  for x in CONVOLUTION_POINTS:
    j = int(np.argmin(np.abs(nodes - x)))
    direct = sharp_convolve_direct(fn, fn, float(nodes[j]), params, cutoff)
    worst = max(worst, abs(float(spectral.values[j]) - direct) / abs(direct))
  return Check(f'delsarte.sharp_convolution[{_label(params)}]', 'H⁻¹(η^{β−k}Hf Hg) = ∫∫f(z)g(y)D(x,y,z)',
               worst, TOLERANCE)


def run(config: RunConfig) -> T.List[Check]:
  checks: T.List[Check] = []
  for n, beta, k in PARAMETER_SETS:
    params = derive_params(n, beta, k)
    checks.extend(_identities(params))
    checks.append(_degenerate(params))
    checks.append(_convolution(config, params))
  return checks
