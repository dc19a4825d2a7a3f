'''The `beta-hankel` subcommands.

Each takes a validated RunConfig and returns an Outcome: the report to print
and, when the run should end with a nonzero exit code, the error explaining why.
Files go to `config.out` when it is set and are always written before the error
surfaces.
'''
import json
import logging
import math
import typing as T
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import yaml

from beta_hankel.base import IterVal, plain
from beta_hankel.config import RunConfig
from beta_hankel.estimates import cm_norm, decay_exponent_fit, duhamel_estimate_audit, spacetime_norm, x_norm
from beta_hankel.evolution import EvolutionConfig, check_envelope, measure_contraction_constants, picard_solve
from beta_hankel.hankel import TransformPlan, plan_transform, resolve_grids
from beta_hankel.kernels import semigroup_quadrature
from beta_hankel.model import ModelParams, Triplet, TripletKind, admissible_m, classify_triplet, harmonic_dimension, \
  nonlinearity
from beta_hankel.radial import Array, GridFunction, RadialGrid, build_grid, lp_norm_deta, sample, zeros
from beta_hankel.suites import run_suites
from beta_hankel.suites.check import gaussian
from beta_hankel.suites.young import audit_rows, rows_csv
from beta_hankel.trajectory import Trajectory
from beta_hankel.util.errors import BetaHankelError, BlowupDetected, NumericalError, ValidationError
from beta_hankel.util.helpers import atomic_write, csv_text
from beta_hankel.util.lattice import parse_triplet_lattice

log = logging.getLogger(__name__)

Document = T.Dict[str, IterVal]


@dataclass
class Outcome:
  report: Document
  error: "BetaHankelError | None" = None


def _write(config: RunConfig, name: str, text: str):
  if config.out is not None:
    path = atomic_write(config.out / name, text)
    log.info(f'wrote {path}')


def render(report: Document, as_yaml: bool = False) -> str:
  if as_yaml:
    return yaml.dump(plain(report), sort_keys=False)
  return json.dumps(plain(report), indent=2) + '\n'


def _write_report(config: RunConfig, name: str, report: Document):
  _write(config, name, render(report))


def classify_lattice(text: str, params: ModelParams) -> T.List[Triplet]:
  '''Classify every (p, q) of a lattice; pairs outside q > 1, p ≥ q are "neither".'''
  beta = Fraction(params.beta)
  triplets: T.List[Triplet] = []
  for p, q in parse_triplet_lattice(text):
    if not q > 1 or p < q:
      triplets.append(Triplet(math.nan, float(p), float(q), TripletKind.NEITHER))
      continue
    triplets.append(classify_triplet(admissible_m(p, q, params), p, q, params, beta))
  return triplets


def cmd_params(config: RunConfig) -> Outcome:
  params = config.params
  report: Document = {
    'params': params.dict,
    'harmonic_dimension': harmonic_dimension(params.n, params.k),
    'stretch': params.stretch,
    'scale': params.scale,
  }
  if config.triplets is not None:
    triplets = classify_lattice(config.triplets, params)
    report['triplets'] = [triplet.dict for triplet in triplets]
    _write(config, 'triplets.csv', csv_text(('m', 'p', 'q', 'kind'), (
      (float(t.m), float(t.p), float(t.q), t.kind.value) for t in triplets)))
  _write_report(config, 'params.json', report)
  return Outcome(report)


def cmd_verify(config: RunConfig) -> Outcome:
  checks = run_suites(config, config.suites)
  failed = [check for check in checks if not check.passed]
  report: Document = {
    'params': config.params.dict,
    'suites': list(config.suites),
    'checks': [check.dict for check in checks],
    'passed': not failed,
  }
  _write_report(config, 'verify.json', report)
  if failed:
    names = ', '.join(check.name for check in failed[:5])
    return Outcome(report, NumericalError(f'{len(failed)} of {len(checks)} checks failed: {names}'))
  return Outcome(report)


def initial_data(config: RunConfig, grid: RadialGrid) -> GridFunction:
  params, data = config.params, config.data
  k, width, amplitude = params.k, data.width, data.amplitude
  if data.kind == 'zero':
    return zeros(grid, params)
  if data.kind == 'gaussian':
    return sample(grid, gaussian(params, width, amplitude), params)

  def bump(r: Array) -> Array:
    inside = r < width
    out = np.zeros_like(r)
    x = (r[inside] / width) ** 2
    out[inside] = amplitude * np.power(r[inside], k) * np.exp(1 - 1 / (1 - x))
    return out
  return sample(grid, bump, params)


def evolution_plan(config: RunConfig, t_span: float) -> TransformPlan:
  grid = config.grid
  physical, spectral = resolve_grids(config.params, config.physical_extent(t_span), config.spectral_extent(),
                                     r_min=grid.r_min, panels=grid.panels, order=grid.order,
                                     nodes_per_period=grid.nodes_per_period)
  return plan_transform(physical, spectral, config.params)


def _configured_triplet(config: RunConfig) -> "Triplet | None":
  if config.evolution.triplet is None:
    return None
  m, p, q = config.evolution.triplet
  return classify_triplet(m, p, q, config.params)


def cmd_evolve(config: RunConfig, fail_on_blowup: bool = False) -> Outcome:
  params, block = config.params, config.evolution
  nl = nonlinearity(config.nonlinearity.b, config.nonlinearity.sign, params)
  triplet = _configured_triplet(config)
  cfg = EvolutionConfig(block.t_end, block.steps, nl, q=block.q, triplet=triplet, substeps=block.substeps,
                        picard_tol=block.picard_tol, picard_max_iter=block.picard_max_iter,
                        blowup_threshold=block.blowup_threshold)
  plan = evolution_plan(config, block.t_end)
  u0 = initial_data(config, plan.physical_grid)
  trajectory, blowup = picard_solve(u0, cfg, plan)
  report: Document = {
    'params': params.dict,
    'evolution': cfg.dict,
    't_reached': float(trajectory.times[-1]),
    'samples': len(trajectory),
    'windows': [window.dict for window in trajectory.windows],
  }
  if triplet is not None and triplet.kind == TripletKind.ADMISSIBLE:
    report['norms'] = _solution_norms(trajectory, triplet)
    if blowup.detected:
      constants = measure_contraction_constants(triplet, params, plan, [u0], nl=nl)
      blowup = check_envelope(blowup, trajectory, constants, nl, params.gamma)
      report['constants'] = constants.dict
    elif triplet.p > nl.b + 1:
      forcing = Trajectory(trajectory.times, [s.with_values(nl(s.values)) for s in trajectory.states], block.q)
      audit = duhamel_estimate_audit(forcing, triplet, nl, params, plan, trial='evolve')
      report['duhamel_audit'] = audit.dict
  report['blowup'] = blowup.dict
  _write(config, 'trajectory.csv', trajectory.to_csv())
  if config.out is not None and block.dump_times:
    trajectory.dump_states(config.out / 'states', block.dump_times)
  _write_report(config, 'evolve.json', report)
  if blowup.detected and fail_on_blowup:
    return Outcome(report, BlowupDetected(blowup))
  return Outcome(report)


def _solution_norms(trajectory: Trajectory, triplet: Triplet) -> Document:
  return {
    'triplet': triplet.dict,
    'Linf_Lq': spacetime_norm(trajectory, math.inf, triplet.q),
    'Lm_Lp': spacetime_norm(trajectory, triplet.m, triplet.p),
    'Cm_Lp': cm_norm(trajectory, triplet.m, triplet.p),
    'X': x_norm(trajectory, triplet),
  }


def cmd_decay_fit(config: RunConfig) -> Outcome:
  '''Linear flow of the configured data by kernel quadrature; fit the decay of its L^p norm.'''
  params, decay = config.params, config.decay
  if config.data.kind == 'zero':
    raise ValidationError('zero data has no decay rate', 'data.kind')
  times = np.geomspace(decay.t_min, decay.t_max, decay.samples)
  grid = build_grid(config.grid.r_min, config.physical_extent(decay.t_max), 2 * config.grid.panels,
                    config.grid.order)
  a = initial_data(config, grid)
  norms = np.array([lp_norm_deta(semigroup_quadrature(a, float(t)), decay.p) for t in times])
  inv_p = 0.0 if math.isinf(decay.p) else 1 / decay.p
  inv_q = 0.0 if math.isinf(decay.q) else 1 / decay.q
  report: Document = {
    'params': params.dict,
    'p': decay.p,
    'q': decay.q,
    'fitted_exponent': decay_exponent_fit(times, norms),
    'smoothing_exponent': params.gamma * (inv_p - inv_q),
    'kernel_exponent': params.gamma * (inv_p - 1),
  }
  _write(config, 'decay.csv', csv_text(('t', 'norm'), zip(times.tolist(), norms.tolist())))
  _write_report(config, 'decay.json', report)
  return Outcome(report)


def cmd_young_audit(config: RunConfig) -> Outcome:
  rows = audit_rows(config)
  failed = [row for row in rows if not row.passed]
  report: Document = {
    'params': config.params.dict,
    'pairs': config.young.pairs,
    'seed': config.young.seed,
    'triples': [[float(v) for v in triple] for triple in config.young.triples],
    'worst_ratio': max((row.ratio for row in rows if not row.equality), default=math.nan),
    'failures': len(failed),
  }
  _write(config, 'young.csv', rows_csv(rows))
  _write_report(config, 'young.json', report)
  if failed:
    return Outcome(report, NumericalError(f'{len(failed)} of {len(rows)} Young rows exceed their bound'))
  return Outcome(report)

