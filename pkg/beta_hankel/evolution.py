'''The linear flow S(t), the Duhamel operator and the Picard solver for

  ∂ₜu + r^β A_{μ(k)} u = ±|u|^b u,   u(0) = u₀.

Linear pieces act in spectral space, where S(t) is multiplication by
e^{−ρ^{2−β}t}; the nonlinearity is applied pointwise in physical space.
'''
import logging
import math
import typing as T
from dataclasses import dataclass, field, replace

import numpy as np
import numpy.typing as NT
import scipy.optimize as SO

from beta_hankel.base import DictGenerator, Report
from beta_hankel.hankel import TransformPlan, hankel_forward, hankel_inverse
from beta_hankel.model import ModelParams, NonlinearitySpec, Triplet, TripletKind, nonlinearity as make_nonlinearity
from beta_hankel.radial import Array, GridFunction, Space, lp_norm_deta
from beta_hankel.trajectory import PicardWindow, Trajectory, x_norm, y_norm
from beta_hankel.util.errors import ConvergenceError, NumericalError, ValidationError, require

log = logging.getLogger(__name__)

# Relative residual above which a growing iterate difference counts as divergence
DIVERGENCE_FLOOR = 1e-6
MIN_FIT_SAMPLES = 8
MIN_FIT_GROWTH = 1e3


@dataclass(frozen=True)
class EvolutionConfig(Report):
  t_end: float
  steps: int
  nonlinearity: NonlinearitySpec
  q: float = 2.0
  triplet: "Triplet | None" = None
  substeps: int = 8
  picard_tol: float = 1e-10
  picard_max_iter: int = 50
  blowup_threshold: float = 1e12
  # fraction of the estimated existence time a window may span
  safety: float = 0.5
  max_halvings: int = 12

  def __post_init__(self):
    require(math.isfinite(self.t_end) and self.t_end > 0, f't_end must be positive, got {self.t_end}',
            'evolution.t_end')
    require(self.steps >= 1, f'steps must be at least 1, got {self.steps}', 'evolution.steps')
    require(self.substeps >= 1, f'substeps must be at least 1, got {self.substeps}', 'evolution.substeps')
    require(self.picard_tol > 0, 'picard_tol must be positive', 'evolution.picard_tol')
    require(self.picard_max_iter >= 1, 'picard_max_iter must be at least 1', 'evolution.picard_max_iter')
    require(self.blowup_threshold > 0, 'blowup_threshold must be positive', 'evolution.blowup_threshold')
    require(0 < self.safety <= 1, f'safety must lie in (0, 1], got {self.safety}', 'evolution.safety')
    require(self.max_halvings >= 0, 'max_halvings must be non-negative', 'evolution.max_halvings')
    require(self.q >= 1, f'q must be at least 1, got {self.q}', 'evolution.q')

  def __iter__(self) -> DictGenerator:
    yield 't_end', self.t_end
    yield 'steps', self.steps
    yield 'substeps', self.substeps
    yield 'q', float(self.q)
    yield 'picard_tol', self.picard_tol
    yield 'picard_max_iter', self.picard_max_iter
    yield 'blowup_threshold', self.blowup_threshold
    yield 'nonlinearity', self.nonlinearity.dict
    yield 'triplet', self.triplet.dict if self.triplet is not None else None


@dataclass(frozen=True)
class ContractionConstants(Report):
  C1: float
  C2: float
  T_exist: float = math.nan
  trial_C1: int = -1
  trial_C2: int = -1
  norm: str = 'x'

  def __post_init__(self):
    require(self.C1 > 0 and self.C2 > 0, f'contraction constants must be positive, got {self.C1}, {self.C2}')

  def __iter__(self) -> DictGenerator:
    yield 'C1', self.C1
    yield 'C2', self.C2
    yield 'T_exist', self.T_exist
    yield 'trial_C1', self.trial_C1
    yield 'trial_C2', self.trial_C2
    yield 'norm', self.norm


UNIT_CONSTANTS = ContractionConstants(1.0, 1.0)


@dataclass(frozen=True)
class BlowupReport(Report):
  detected: bool
  T_star_fit: float = math.nan
  exponent_fit: float = math.nan
  lower_bound_exponent: float = math.nan
  constant_fit: float = math.nan
  lower_bound_constant: float = math.nan
  above_envelope: "bool | None" = None
  samples: int = 0

  def __iter__(self) -> DictGenerator:
    yield 'detected', self.detected
    yield 'T_star_fit', self.T_star_fit
    yield 'exponent_fit', self.exponent_fit
    yield 'lower_bound_exponent', self.lower_bound_exponent
    yield 'constant_fit', self.constant_fit
    yield 'lower_bound_constant', self.lower_bound_constant
    yield 'above_envelope', self.above_envelope
    yield 'samples', self.samples


def semigroup_apply(a: GridFunction, t: float, plan: TransformPlan) -> GridFunction:
  if a.space != Space.PHYSICAL:
    raise ValidationError('the semigroup acts on physical-space functions', 'space')
  if not t >= 0:
    raise ValidationError(f'the semigroup is only defined forward in time, got t={t}', 't')
  if t == 0:
    return a.with_values(a.values.copy())
  A = hankel_forward(a, plan)
  return hankel_inverse(A.with_values(np.exp(-plan.symbol() * t) * A.values), plan)


def duhamel(forcing: Trajectory, t: float, plan: TransformPlan, steps: int) -> GridFunction:
  '''∫₀ᵗ S(t−τ) f(τ) dτ by the composite midpoint rule, f interpolated linearly in τ.'''
  if not t >= 0:
    raise ValidationError(f't must be non-negative, got {t}', 't')
  require(steps >= 1, f'steps must be at least 1, got {steps}', 'steps')
  if not len(forcing):
    raise ValidationError('the forcing trajectory is empty', 'forcing')
  if forcing.times[0] > 1e-12 * max(1.0, t) or forcing.times[-1] < t * (1 - 1e-12):
    raise ValidationError(f'the forcing covers [{forcing.times[0]:g}, {forcing.times[-1]:g}], not [0, {t:g}]',
                          'forcing')
  symbol = plan.symbol()
  accumulated = np.zeros(len(plan.spectral_grid))
  if t > 0:
    h = t / steps
    for j in range(steps):
      tau = (j + 0.5) * h
      f = forcing.values_at(tau)
      accumulated += h * np.exp(-symbol * (t - tau)) * (plan.kernel_matrix_U @ f)
  values = plan.kernel_matrix_V @ accumulated
  return GridFunction(plan.physical_grid, values, Space.PHYSICAL, plan.params)


def existence_time(u0_norm: float, constants: ContractionConstants, nl: NonlinearitySpec, q: float,
                   gamma: float) -> float:
  '''Largest T with (2C₁)^b C₂ T^{1−bγ/q} ‖u₀‖^b ≤ 1/2.'''
  b = nl.b
  exponent = 1 - (0.0 if math.isinf(q) else b * gamma / q)
  if exponent <= 0:
    raise ValidationError(f'q={q} is not above the critical exponent q0={b * gamma:g}; '
                          'only small data exist globally there', 'q')
  if not u0_norm >= 0:
    raise ValidationError(f'the data norm must be non-negative, got {u0_norm}', 'u0_norm')
  if u0_norm == 0:
    return math.inf
  log_T = (-b * math.log(2 * constants.C1) - math.log(2 * constants.C2) - b * math.log(u0_norm)) / exponent
  return math.exp(log_T)


def blowup_rate(nl: NonlinearitySpec, q: float, gamma: float) -> float:
  return 1 / nl.b - (0.0 if math.isinf(q) else gamma / q)

def envelope_constant(constants: ContractionConstants, nl: NonlinearitySpec) -> float:
  return math.exp((-nl.b * math.log(2 * constants.C1) - math.log(2 * constants.C2)) / nl.b)


def blowup_envelope(times: NT.ArrayLike, T_star: float, constants: ContractionConstants, nl: NonlinearitySpec,
                    q: float, gamma: float) -> Array:
  '''[(2C₁)^{−b}/(2C₂)]^{1/b} (T* − t)^{−(1/b−γ/q)}; NaN from T* on.'''
  rate = blowup_rate(nl, q, gamma)
  constant = envelope_constant(constants, nl)
  times = np.asarray(times, dtype=np.float64)
  out = np.full(times.shape, math.nan)
  before = times < T_star
  out[before] = constant * np.power(T_star - times[before], -rate)
  return out


def _fit_tail(times: Array, values: Array) -> T.Tuple[Array, Array]:
  last = values[-1]
  tail = values >= last / 10
  # the last decade must be a contiguous tail
  start = len(values) - int(np.argmin(tail[::-1])) if not np.all(tail) else 0
  if len(values) - start < MIN_FIT_SAMPLES:
    start = len(values) - MIN_FIT_SAMPLES
  return times[start:], values[start:]


def _regress(gaps: Array, logs: Array, offset: float) -> T.Tuple[float, float, float]:
  x = -np.log(gaps + offset)
  slope, intercept = np.polyfit(x, logs, 1)
  residual = float(np.sum((intercept + slope * x - logs) ** 2))
  return float(slope), float(intercept), residual


def blowup_fit(times: NT.ArrayLike, values: NT.ArrayLike, nl: "NonlinearitySpec | None" = None,
               q: "float | None" = None, gamma: "float | None" = None) -> BlowupReport:
  '''Fit v(t) ≈ C (T* − t)^{−e} jointly in (T*, e, C) over the last decade of growth.

  T* is parametrized by its offset past the last sample, and offsets that
  would not move T* off that sample in floating point are never tried.
  '''
  times = np.asarray(times, dtype=np.float64)
  values = np.asarray(values, dtype=np.float64)
  if times.shape != values.shape or times.ndim != 1:
    raise ValidationError('times and values must be equally long vectors', 'norm_history')
  if len(values) < MIN_FIT_SAMPLES:
    raise ValidationError(f'need at least {MIN_FIT_SAMPLES} samples, got {len(values)}', 'norm_history')
  if not (np.all(np.isfinite(values)) and np.all(values > 0)):
    raise ValidationError('norm values must be finite and positive', 'norm_history')
  if values[-1] < MIN_FIT_GROWTH * values[0]:
    raise ValidationError(f'the norm grew by {values[-1] / values[0]:.3g}, no blow-up signature '
                          f'(at least {MIN_FIT_GROWTH:g} needed)', 'norm_history')
  tail_t, tail_v = _fit_tail(times, values)
  logs = np.log(tail_v)
  last = float(tail_t[-1])
  gaps = last - tail_t
  span = float(gaps[0])
  floor = 64 * float(np.spacing(last))
  offsets = np.unique(np.maximum(span * np.geomspace(1e-8, 10, 400), floor))
  offsets = offsets[last + offsets > last]
  if not len(offsets) or not span > 0:
    raise NumericalError(f'the fit window [{tail_t[0]:.17g}, {last:.17g}] is too narrow to place T*')
  try:
    residuals = [_regress(gaps, logs, float(d))[2] for d in offsets]
    best = float(offsets[int(np.nanargmin(residuals))])
    slope, intercept, _ = _regress(gaps, logs, best)

    def residual(x: Array) -> Array:
      log_c, exponent, log_offset = x
      return log_c + exponent * (-np.log(gaps + np.exp(log_offset))) - logs

    with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
      fit = SO.least_squares(residual, np.array([intercept, slope, math.log(best)]), method='lm',
                             xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=10000)
  except (np.linalg.LinAlgError, ValueError) as e:
    raise NumericalError(f'the blow-up fit is singular: {e}') from e
  log_c, exponent, log_offset = (float(v) for v in fit.x)
  T_star = last + math.exp(log_offset)
  if not (math.isfinite(T_star) and math.isfinite(exponent) and math.isfinite(log_c)):
    raise NumericalError('the blow-up fit did not converge to finite parameters')
  lower = blowup_rate(nl, q, gamma) if nl is not None and q is not None and gamma is not None else math.nan
  return BlowupReport(True, T_star, exponent, lower, math.exp(log_c), samples=len(tail_t))


def check_envelope(report: BlowupReport, traj: Trajectory, constants: ContractionConstants, nl: NonlinearitySpec,
                   gamma: float) -> BlowupReport:
  '''Record whether the measured norms stay above the lower-bound envelope at the fitted T*.'''
  if not (report.detected and math.isfinite(report.T_star_fit)):
    return report
  envelope = blowup_envelope(traj.times, report.T_star_fit, constants, nl, traj.q, gamma)
  finite = np.isfinite(envelope)
  above = bool(np.all(traj.norms_q[finite] >= envelope[finite] * (1 - 1e-9)))
  return replace(report, lower_bound_constant=envelope_constant(constants, nl), above_envelope=above)


class _WindowFailure(Exception):
  def __init__(self, reason: str, iterations: int, residual: float):
    super().__init__(reason)
    self.reason = reason
    self.iterations = iterations
    self.residual = residual


@dataclass
class _WindowResult:
  states: T.List[Array]
  iterations: int
  diffs: T.List[float] = field(default_factory=list)


def _window_norm(values: T.Sequence[Array], template: GridFunction, delta: float, cfg: EvolutionConfig,
                 iteration: int) -> float:
  '''Norm of a window's substep values: X (or Y) of the configured triplet, else L^∞_t L^q.'''
  try:
    triplet = cfg.triplet
    if triplet is None or triplet.kind == TripletKind.NEITHER:
      return float(max(lp_norm_deta(template.with_values(v), cfg.q) for v in values))
    window = Trajectory(delta * np.arange(len(values)), [template.with_values(v) for v in values], triplet.q, triplet)
    return x_norm(window, triplet) if triplet.kind == TripletKind.ADMISSIBLE else y_norm(window, triplet)
  except NumericalError as e:
    raise _WindowFailure(e.message, iteration, math.inf) from e

def _solve_window(u_start: GridFunction, length: float, cfg: EvolutionConfig, plan: TransformPlan) -> _WindowResult:
  '''Fixed point of u = S(τ)u_start + ∫ S(τ−σ)F(u(σ))dσ on substeps of one window.

  The Duhamel integral is marched on the substep grid with the exponential
  factor taken at each substep midpoint and F averaged over its ends.
  '''
  M = cfg.substeps
  delta = length / M
  symbol = plan.symbol()
  decay = np.exp(-symbol * delta)
  half_decay = np.exp(-symbol * delta / 2)
  U, V = plan.kernel_matrix_U, plan.kernel_matrix_V
  spectral0 = U @ u_start.values
  linear = [np.exp(-symbol * delta * j) * spectral0 for j in range(M + 1)]
  states = [u_start.values] + [V @ c for c in linear[1:]]
  diffs: T.List[float] = []
  residual = math.inf
  with np.errstate(over='ignore', invalid='ignore'):
    for iteration in range(1, cfg.picard_max_iter + 1):
      forcing = [U @ cfg.nonlinearity(s) for s in states]
      duhamel_part = np.zeros_like(spectral0)
      updated = [u_start.values]
      for j in range(1, M + 1):
        duhamel_part = decay * duhamel_part + delta * half_decay * (forcing[j - 1] + forcing[j]) / 2
        updated.append(V @ (linear[j] + duhamel_part))
      if not all(np.all(np.isfinite(s)) for s in updated):
        raise _WindowFailure('non-finite iterate', iteration, math.inf)
      changes = [a - b for a, b in zip(updated[1:], states[1:])]
      difference = _window_norm([np.zeros_like(u_start.values)] + changes, u_start, delta, cfg, iteration)
      size = _window_norm(updated, u_start, delta, cfg, iteration)
      diffs.append(difference)
      states = updated
      residual = difference / size if size > 0 else 0.0
      log.debug(f'window at {length:.3e}: iteration {iteration}, residual {residual:.3e}')
      if residual <= cfg.picard_tol:
        return _WindowResult(states, iteration, diffs)
      if len(diffs) >= 2 and diffs[-1] > diffs[-2] and residual > DIVERGENCE_FLOOR:
        raise _WindowFailure('diverging iterates', iteration, residual)
  raise _WindowFailure('no convergence', cfg.picard_max_iter, residual)


def picard_solve(u0: GridFunction, cfg: EvolutionConfig, plan: TransformPlan) -> T.Tuple[Trajectory, BlowupReport]:
  if u0.space != Space.PHYSICAL or not plan.physical_grid.same_as(u0.grid):
    raise ValidationError('the initial data must be a physical-space function on the plan\'s grid', 'u0')
  params = plan.params
  base = cfg.t_end / cfg.steps
  times: T.List[float] = [0.0]
  states: T.List[GridFunction] = [u0]
  windows: T.List[PicardWindow] = []
  t = 0.0
  u = u0
  detected = False
  while t < cfg.t_end * (1 - 1e-12) and not detected:
    sup = float(np.abs(u.values).max(initial=0.0))
    horizon = existence_time(sup, UNIT_CONSTANTS, cfg.nonlinearity, math.inf, params.gamma)
    length = min(base, cfg.safety * horizon, cfg.t_end - t)
    halvings = 0
    while True:
      try:
        result = _solve_window(u, length, cfg, plan)
        break
      except _WindowFailure as failure:
        halvings += 1
        if halvings > cfg.max_halvings:
          raise ConvergenceError(f'Picard iteration failed at t={t:.6g} ({failure.reason}) '
                                 f'after {cfg.max_halvings} window halvings', failure.iterations,
                                 failure.residual) from failure
        length /= 2
        log.warning(f'{failure.reason} at t={t:.6g}, halving the window to {length:.3e}')
    windows.append(PicardWindow(t, length, result.iterations, tuple(result.diffs), halvings))
    delta = length / cfg.substeps
    for j, values in enumerate(result.states[1:], start=1):
      state = u0.with_values(values)
      times.append(t + j * delta)
      states.append(state)
      if lp_norm_deta(state, cfg.q) > cfg.blowup_threshold:
        detected = True
        break
    t = times[-1] if detected else t + length
    u = states[-1]
  trajectory = Trajectory(np.array(times), states, cfg.q, cfg.triplet, windows)
  if not detected:
    return trajectory, BlowupReport(False)
  log.warning(f'the L^{cfg.q:g} norm passed {cfg.blowup_threshold:g} at t={times[-1]:.6g}')
  try:
    report = blowup_fit(trajectory.times, trajectory.norms_q, cfg.nonlinearity, cfg.q, params.gamma)
  except (ValidationError, NumericalError) as e:
    log.warning(f'blow-up detected but the rate fit failed: {e.message}')
    rate = blowup_rate(cfg.nonlinearity, cfg.q, params.gamma)
    report = BlowupReport(True, lower_bound_exponent=rate, samples=len(trajectory))
  return trajectory, report


def _trial_times(horizon: float, samples: int) -> Array:
  return np.concatenate([[0.0], np.geomspace(horizon * 1e-3, horizon, samples)])


def linear_trajectory(a: GridFunction, times: NT.ArrayLike, plan: TransformPlan, q: float = 2.0,
                      triplet: "Triplet | None" = None) -> Trajectory:
  times = np.asarray(times, dtype=np.float64)
  return Trajectory(times, [semigroup_apply(a, float(t), plan) for t in times], q, triplet)


def measure_contraction_constants(triplet: Triplet, params: ModelParams, plan: TransformPlan,
                                  trial_set: T.Sequence[GridFunction], horizon: float = 1.0,
                                  nl: "NonlinearitySpec | None" = None, norm: str = 'x',
                                  samples: int = 48, steps: int = 32) -> ContractionConstants:
  '''Measure C₁ = ‖S(·)ψ‖_X/‖ψ‖_q and C₂ = ‖𝔾F(S(·)ψ)‖_X/(T^{1−bγ/q}‖S(·)ψ‖_X^{b+1}) over trials.

  With norm='y' the time-weighted 𝒞_m norm replaces L^m in time, which is the
  setting of generalized triplets.
  '''
  if not trial_set:
    raise ValidationError('the trial set is empty', 'trials')
  if norm not in ('x', 'y'):
    raise ValidationError(f'norm must be x or y, got {norm!r}', 'norm')
  if norm == 'x' and triplet.kind != TripletKind.ADMISSIBLE:
    raise ValidationError(f'{triplet.dict} is not admissible', 'triplet')
  if norm == 'y' and not triplet.is_generalized:
    raise ValidationError(f'{triplet.dict} is not a generalized triplet', 'triplet')
  require(horizon > 0, f'horizon must be positive, got {horizon}', 'horizon')
  nl = make_nonlinearity(1, '+', params) if nl is None else nl
  solution_norm = x_norm if norm == 'x' else y_norm
  times = _trial_times(horizon, samples)
  q_exponent = 1 - (0.0 if math.isinf(triplet.q) else nl.b * params.gamma / triplet.q)
  best1, best2 = (0.0, -1), (0.0, -1)
  data_norm = 0.0
  for index, trial in enumerate(trial_set):
    size = lp_norm_deta(trial, triplet.q)
    if size == 0:
      raise ValidationError(f'trial {index} is zero', 'trials')
    data_norm = max(data_norm, size)
    flow = linear_trajectory(trial, times, plan, triplet.q, triplet)
    flow_norm = solution_norm(flow, triplet)
    best1 = max(best1, (flow_norm / size, index))
    forcing = Trajectory(times, [state.with_values(nl(state.values)) for state in flow.states], triplet.q)
    response = Trajectory(times, [duhamel(forcing, float(t), plan, steps) for t in times], triplet.q, triplet)
    scale = horizon ** q_exponent * flow_norm ** (nl.b + 1)
    best2 = max(best2, (solution_norm(response, triplet) / scale, index))
    log.debug(f'trial {index}: C1 {flow_norm / size:.6g}, C2 {best2[0]:.6g}')
  constants = ContractionConstants(best1[0], best2[0], trial_C1=best1[1], trial_C2=best2[1], norm=norm)
  try:
    T_exist = existence_time(data_norm, constants, nl, triplet.q, params.gamma)
  except ValidationError:
    T_exist = math.nan
  return ContractionConstants(constants.C1, constants.C2, T_exist, best1[1], best2[1], norm)
