'''Space-time norms, the explicit smoothing constant and numerical audits of the linear and Duhamel estimates.'''
import logging
import math
import typing as T
from dataclasses import dataclass

import numpy as np
import numpy.typing as NT
import scipy.special as SS

from beta_hankel.base import DictGenerator, Report
from beta_hankel.evolution import duhamel, semigroup_apply
from beta_hankel.hankel import TransformPlan
from beta_hankel.kernels import semigroup_quadrature
from beta_hankel.model import ModelParams, NonlinearitySpec, Triplet, TripletKind
from beta_hankel.radial import GridFunction, lp_norm_deta
from beta_hankel.trajectory import Trajectory, cm_norm, spacetime_norm, time_norm, weighted_sup, x_norm, y_norm
from beta_hankel.util.errors import ValidationError
from beta_hankel.util.helpers import atomic_write, csv_text

log = logging.getLogger(__name__)

__all__ = [
  'spacetime_norm', 'cm_norm', 'x_norm', 'y_norm', 'smoothing_constant', 'decay_exponent_fit', 'NormReport',
  'duhamel_estimate_audit', 'SmoothingRow', 'smoothing_audit', 'norm_reports_csv', 'smoothing_rows_csv',
]

MIN_DECAY_SAMPLES = 5


def smoothing_constant(p: float, q: float, params: ModelParams) -> float:
  '''C(β, μ, p, q) = [(2−β)^{2μ+1}Γ(μ+1)]^{1/p−1/q} m^{−γ/m} with 1 + 1/p = 1/m + 1/q.'''
  if not q >= 1:
    raise ValidationError(f'q must be at least 1, got {q}', 'q')
  if p < q:
    raise ValidationError(f'p={p} must be at least q={q}', 'p')
  inv_p = 0.0 if math.isinf(p) else 1 / p
  inv_q = 0.0 if math.isinf(q) else 1 / q
  difference = inv_p - inv_q
  inv_m = 1 + difference
  log_c = difference * ((2 * params.mu + 1) * math.log(2 - params.beta) + float(SS.gammaln(params.mu + 1)))
  if inv_m > 0:
    # m^{−γ/m} = (1/m)^{γ/m}
    log_c += params.gamma * inv_m * math.log(inv_m)
  return math.exp(log_c)


def decay_exponent_fit(times: NT.ArrayLike, values: NT.ArrayLike) -> float:
  '''Slope of log(value) against log(t).'''
  times = np.asarray(times, dtype=np.float64)
  values = np.asarray(values, dtype=np.float64)
  if times.shape != values.shape or times.ndim != 1:
    raise ValidationError('times and values must be equally long vectors', 'values')
  if len(times) < MIN_DECAY_SAMPLES:
    raise ValidationError(f'need at least {MIN_DECAY_SAMPLES} samples, got {len(times)}', 'values')
  if not (np.all(times > 0) and np.all(values > 0)):
    raise ValidationError('decay fits need positive times and values', 'values')
  slope, _ = np.polyfit(np.log(times), np.log(values), 1)
  return float(slope)


@dataclass(frozen=True)
class NormReport(Report):
  triplet: Triplet
  value_Lm_Lp: float
  value_Linf_Lq: float
  value_Cm: float
  fitted_exponent: float = math.nan
  trial: str = ''
  bound: float = math.nan
  bound_c: float = math.nan
  ratio: float = math.nan
  ratio_c: float = math.nan

  def __post_init__(self):
    for name in ('value_Lm_Lp', 'value_Linf_Lq', 'value_Cm'):
      if getattr(self, name) < 0:
        raise ValidationError(f'{name} is negative', name)

  def __iter__(self) -> DictGenerator:
    yield 'trial', self.trial
    yield from self.triplet
    yield 'value_Lm_Lp', self.value_Lm_Lp
    yield 'value_Linf_Lq', self.value_Linf_Lq
    yield 'value_Cm', self.value_Cm
    yield 'fitted_exponent', self.fitted_exponent
    yield 'bound', self.bound
    yield 'bound_c', self.bound_c
    yield 'ratio', self.ratio
    yield 'ratio_c', self.ratio_c


def norm_reports_csv(reports: T.Sequence[NormReport]) -> str:
  if not reports:
    return ''
  header = list(reports[0].dict)
  return csv_text(header, ([report.dict[key] for key in header] for report in reports))


def _ratio(lhs: float, rhs: float) -> float:
  if rhs == 0:
    return 0.0 if lhs == 0 else math.inf
  return lhs / rhs


def duhamel_estimate_audit(traj_f: Trajectory, triplet: Triplet, nl: NonlinearitySpec, params: ModelParams,
                           plan: TransformPlan, steps: int = 32, trial: str = '') -> NormReport:
  '''Both sides of the Duhamel estimates for the forcing `traj_f` on I = [0, T].

  For p ≤ q(b+1) the forcing enters through ‖f/r^k‖ in L^{m/(b+1)}(I; L^{p/(b+1)});
  above that through the interpolated product with θ = (p−q(b+1))/((b+1)(p−q)).
  `bound` uses the L^m-in-time norms, `bound_c` their 𝒞 counterparts. The
  ratios divide max(‖𝔾f‖_{L^∞L^q}, ‖𝔾f‖_{L^mL^p}) resp. max(‖𝔾f‖_{L^∞L^q}, ‖𝔾f‖_{𝒞_mL^p})
  by those bounds.
  '''
  if triplet.kind != TripletKind.ADMISSIBLE:
    raise ValidationError(f'{triplet.dict} is not admissible', 'triplet')
  b = nl.b
  m, p, q = triplet.m, triplet.p, triplet.q
  if not p > b + 1:
    raise ValidationError(f'the Duhamel estimates need p > b+1 = {b + 1:g}, got p={p}', 'p')
  if not len(traj_f):
    raise ValidationError('the forcing trajectory is empty', 'forcing')
  times = traj_f.times
  horizon = float(times[-1])
  response = Trajectory(times, [duhamel(traj_f, float(t), plan, steps) for t in times], q, triplet)
  value_inf = spacetime_norm(response, math.inf, q)
  value_m = spacetime_norm(response, m, p)
  value_c = cm_norm(response, m, p)
  power = horizon ** (1 - b * params.gamma / q) if horizon > 0 else 0.0
  if p <= q * (b + 1):
    norms = traj_f.quasi_norms(p / (b + 1))
    forcing_l = time_norm(times, norms, m / (b + 1))
    forcing_c = weighted_sup(times, norms, m / (b + 1))
  else:
    theta = nl.theta(p, q)
    low = time_norm(times, traj_f.quasi_norms(q / (b + 1)), math.inf)
    high = traj_f.quasi_norms(p / (b + 1))
    forcing_l = low ** theta * time_norm(times, high, m / (b + 1)) ** (1 - theta)
    forcing_c = low ** theta * weighted_sup(times, high, m / (b + 1)) ** (1 - theta)
  bound, bound_c = power * forcing_l, power * forcing_c
  return NormReport(triplet, value_m, value_inf, value_c, trial=trial, bound=bound, bound_c=bound_c,
                    ratio=_ratio(max(value_inf, value_m), bound), ratio_c=_ratio(max(value_inf, value_c), bound_c))


@dataclass(frozen=True)
class SmoothingRow(Report):
  t: float
  p: float
  q: float
  measured: float
  bound: float

  @property
  def ratio(self) -> float:
    return _ratio(self.measured, self.bound)

  def __iter__(self) -> DictGenerator:
    yield 't', self.t
    yield 'p', float(self.p)
    yield 'q', float(self.q)
    yield 'measured', self.measured
    yield 'bound', self.bound
    yield 'ratio', self.ratio


def smoothing_rows_csv(rows: T.Sequence[SmoothingRow]) -> str:
  return csv_text(('t', 'p', 'q', 'measured', 'bound', 'ratio'),
                  ((row.t, float(row.p), float(row.q), row.measured, row.bound, row.ratio) for row in rows))


def smoothing_audit(a: GridFunction, pairs: T.Sequence[T.Tuple[float, float]], times: T.Sequence[float],
                    plan: "TransformPlan | None" = None, switch_time: float = 1.0) -> T.List[SmoothingRow]:
  '''‖S(t)a/r^k‖_p/‖a/r^k‖_q against C(β, μ, p, q)·t^{γ(1/p−1/q)} at each time.

  Up to `switch_time` the flow goes through the spectral route on `plan`;
  later, and always without a plan, through quadrature of the positive kernel,
  which stays accurate once the kernel is wide compared to the grid.
  '''
  params = a.params
  rows: T.List[SmoothingRow] = []
  for t in times:
    if not t > 0:
      raise ValidationError(f'audit times must be positive, got {t}', 'times')
    flow = semigroup_apply(a, t, plan) if plan is not None and t <= switch_time else semigroup_quadrature(a, t)
    for p, q in pairs:
      constant = smoothing_constant(p, q, params)
      size = lp_norm_deta(a, q)
      inv = (0.0 if math.isinf(p) else 1 / p) - (0.0 if math.isinf(q) else 1 / q)
      rows.append(SmoothingRow(float(t), p, q, _ratio(lp_norm_deta(flow, p), size),
                               constant * t ** (params.gamma * inv)))
  log.debug(f'smoothing audit: {len(rows)} rows, worst ratio {max((r.ratio for r in rows), default=0.0):.6g}')
  return rows
