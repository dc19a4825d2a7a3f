'''Time histories of radial states and the space-time norms taken over them.'''
import math
import typing as T
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import numpy.typing as NT
import scipy.integrate as SI

from beta_hankel.base import DictGenerator, Report
from beta_hankel.model import Triplet
from beta_hankel.radial import Array, GridFunction, Space, divide_rk, lp_norm_deta, write_csv
from beta_hankel.util.errors import ValidationError
from beta_hankel.util.helpers import atomic_write, csv_text


@dataclass(frozen=True)
class PicardWindow(Report):
  '''One marched window of the fixed-point solver.'''
  t_start: float
  length: float
  iterations: int
  diffs: T.Tuple[float, ...]
  halvings: int

  @property
  def ratios(self) -> T.List[float]:
    return [b / a for a, b in zip(self.diffs[:-1], self.diffs[1:]) if a > 0]

  def __iter__(self) -> DictGenerator:
    yield 't_start', self.t_start
    yield 'length', self.length
    yield 'iterations', self.iterations
    yield 'diffs', list(self.diffs)
    yield 'halvings', self.halvings


@dataclass(frozen=True, eq=False)
class Trajectory:
  times: Array
  states: T.Sequence[GridFunction]
  q: float = 2.0
  triplet: "Triplet | None" = None
  windows: T.Sequence[PicardWindow] = ()
  norms_q: Array = field(init=False)
  norms_p_weighted: Array = field(init=False)

  def __post_init__(self):
    times = np.asarray(self.times, dtype=np.float64)
    object.__setattr__(self, 'times', times)
    if times.ndim != 1 or len(times) != len(self.states):
      raise ValidationError(f'{len(times)} times for {len(self.states)} states', 'trajectory')
    if len(times) and (times[0] < 0 or np.any(np.diff(times) <= 0)):
      raise ValidationError('trajectory times must be non-negative and strictly increasing', 'trajectory')
    for state in self.states:
      if state.space != Space.PHYSICAL:
        raise ValidationError('trajectory states are physical-space functions', 'trajectory')
    object.__setattr__(self, 'norms_q', self.norms(self.q))
    if self.triplet is None:
      weighted = np.full(len(times), math.nan)
    else:
      weighted = np.power(times, self.triplet.inv_m) * self.norms(self.triplet.p)
    object.__setattr__(self, 'norms_p_weighted', weighted)

  def __len__(self) -> int:
    return len(self.times)

  def norms(self, p: float, k: "int | None" = None) -> Array:
    '''‖u(t)/r^k‖ in L^p_{dη} at every recorded time.'''
    return np.array([lp_norm_deta(state, p, k) for state in self.states], dtype=np.float64)

  def quasi_norms(self, p: float, k: "int | None" = None) -> Array:
    '''As `norms`, for any p > 0; below 1 this is no longer a norm.'''
    if not p > 0:
      raise ValidationError(f'p must be positive, got {p}', 'p')
    if p >= 1:
      return self.norms(p, k)
    out: T.List[float] = []
    for state in self.states:
      power = state.params.k if k is None else k
      ratio = divide_rk(state, power)
      exponent = 2 * power + state.params.n - 1 - state.params.beta
      out.append(float(np.sum(ratio ** p * np.power(state.nodes, exponent) * state.grid.weights)) ** (1 / p))
    return np.array(out, dtype=np.float64)

  def values_at(self, t: float) -> Array:
    '''Linear interpolation in time of the nodal values.'''
    times = self.times
    slack = 1e-12 * max(1.0, float(np.abs(times).max(initial=0.0)))
    if not len(times) or t < times[0] - slack or t > times[-1] + slack:
      raise ValidationError(f't={t} is outside the recorded interval', 't')
    if len(times) == 1:
      return self.states[0].values
    j = int(np.clip(np.searchsorted(times, t), 1, len(times) - 1))
    t0, t1 = times[j - 1], times[j]
    weight = min(max((t - t0) / (t1 - t0), 0.0), 1.0)
    return (1 - weight) * self.states[j - 1].values + weight * self.states[j].values

  def to_csv(self) -> str:
    return csv_text(('t', 'norm_q', 'norm_p_weighted'),
                    zip(self.times.tolist(), self.norms_q.tolist(), self.norms_p_weighted.tolist()))

  def write_csv(self, path: "str | Path") -> Path:
    return atomic_write(path, self.to_csv())

  def dump_states(self, directory: "str | Path", at_times: T.Iterable[float]) -> T.List[Path]:
    '''Write the recorded state nearest to each requested time as its own CSV.'''
    directory = Path(directory)
    written: T.List[Path] = []
    for t in at_times:
      j = int(np.argmin(np.abs(self.times - t)))
      written.append(write_csv(self.states[j], directory / f'state_t{self.times[j]:.6g}.csv'))
    return written


def time_norm(times: NT.ArrayLike, values: NT.ArrayLike, m: float) -> float:
  '''(∫ v(t)^m dt)^{1/m} by the trapezoid rule on the given grid; the max for m = ∞.'''
  values = np.asarray(values, dtype=np.float64)
  if math.isinf(m):
    return float(values.max(initial=0.0))
  return float(SI.trapezoid(values ** m, np.asarray(times, dtype=np.float64))) ** (1 / m)


def weighted_sup(times: NT.ArrayLike, values: NT.ArrayLike, m: float) -> float:
  '''sup_t t^{1/m} v(t).'''
  weight = 1.0 if math.isinf(m) else np.power(np.asarray(times, dtype=np.float64), 1 / m)
  return float(np.max(weight * np.asarray(values, dtype=np.float64), initial=0.0))


def _nonempty(traj: Trajectory):
  if not len(traj):
    raise ValidationError('the trajectory is empty', 'trajectory')


def _time_exponent(m: float):
  if not m >= 1:
    raise ValidationError(f'm must lie in [1, ∞], got {m}', 'm')


def spacetime_norm(traj: Trajectory, m: float, p: float, k: "int | None" = None) -> float:
  '''‖u/r^k‖ in L^m(I; L^p_{dη}).'''
  _nonempty(traj)
  _time_exponent(m)
  return time_norm(traj.times, traj.norms(p, k), m)


def cm_norm(traj: Trajectory, m: float, p: float, k: "int | None" = None) -> float:
  '''‖u/r^k‖ in 𝒞_m(I; L^p_{dη}), that is sup_t t^{1/m}‖u(t)/r^k‖_p.'''
  _nonempty(traj)
  _time_exponent(m)
  return weighted_sup(traj.times, traj.norms(p, k), m)


def x_norm(traj: Trajectory, triplet: Triplet, k: "int | None" = None) -> float:
  '''max(‖·‖_{L^∞ L^q}, ‖·‖_{L^m L^p}), the solution norm for admissible triplets.'''
  return max(spacetime_norm(traj, math.inf, triplet.q, k), spacetime_norm(traj, triplet.m, triplet.p, k))


def y_norm(traj: Trajectory, triplet: Triplet, k: "int | None" = None) -> float:
  '''max(‖·‖_{L^∞ L^q}, ‖·‖_{𝒞_m L^p}), the solution norm for generalized triplets.'''
  return max(spacetime_norm(traj, math.inf, triplet.q, k), cm_norm(traj, triplet.m, triplet.p, k))
