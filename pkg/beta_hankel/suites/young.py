'''Randomized audit of the Young inequality ‖f♯g‖_a ≤ C‖f‖_b‖g‖_c.'''
import math
import typing as T
from dataclasses import dataclass

import numpy as np

from beta_hankel.base import DictGenerator, Report
from beta_hankel.config import RunConfig, data_radius, spectral_radius
from beta_hankel.hankel import TransformPlan
from beta_hankel.kernels import young_audit
from beta_hankel.radial import GridFunction, sample
from beta_hankel.suites.check import Check, gaussian, make_plan
from beta_hankel.util.helpers import csv_text

ANCHOR = 'Young inequality for ♯ with C = Γ(μ+1)^{−1}(2−β)^{−μ}'
# round-off allowance on lhs ≤ rhs
SLACK = 1e-8
# a = b = c = 1 is an equality for nonnegative f, g
EQUALITY_SLACK = 1e-6
WIDTHS = (0.7, 1.4)


@dataclass(frozen=True)
class YoungRow(Report):
  pair: int
  a: float
  b: float
  c: float
  lhs: float
  rhs: float

  @property
  def equality(self) -> bool:
    return self.a == self.b == self.c == 1

  @property
  def ratio(self) -> float:
    return self.lhs / self.rhs if self.rhs > 0 else (0.0 if self.lhs == 0 else math.inf)

  @property
  def excess(self) -> float:
    '''How far the row is from passing; at most 0 when it passes.'''
    if self.equality:
      return abs(self.ratio - 1) - EQUALITY_SLACK
    return self.ratio - 1 - SLACK

  @property
  def passed(self) -> bool:
    return bool(self.excess <= 0)

  def __iter__(self) -> DictGenerator:
    yield 'pair', self.pair
    yield 'a', float(self.a)
    yield 'b', float(self.b)
    yield 'c', float(self.c)
    yield 'lhs', self.lhs
    yield 'rhs', self.rhs
    yield 'ratio', self.ratio
    yield 'pass', self.passed


def young_plan(config: RunConfig) -> TransformPlan:
  params = config.params
  # f♯g spreads to where the stretched radius of the widest factor doubles
  r_max = data_radius(params, max(WIDTHS)) * 2 ** (1 / params.stretch)
  return make_plan(params, config.grid, r_max, spectral_radius(params, min(WIDTHS)))


def random_pairs(plan: TransformPlan, count: int, seed: int) -> T.Iterator[T.Tuple[GridFunction, GridFunction]]:
  '''Nonnegative sums of two Gaussian profiles with random widths and amplitudes.'''
  params = plan.params
  rng = np.random.default_rng(seed)
  for _ in range(count):
    pair: T.List[GridFunction] = []
    for _ in range(2):
      widths = rng.uniform(*WIDTHS, size=2)
      amplitudes = rng.uniform(0.1, 2.0, size=2)
      profiles = [gaussian(params, float(w), float(h)) for w, h in zip(widths, amplitudes)]
      pair.append(sample(plan.physical_grid, lambda r: profiles[0](r) + profiles[1](r), params))
    yield pair[0], pair[1]


def audit_rows(config: RunConfig) -> T.List[YoungRow]:
  plan = young_plan(config)
  rows: T.List[YoungRow] = []
  for index, (f, g) in enumerate(random_pairs(plan, config.young.pairs, config.young.seed)):
    for a, b, c in config.young.triples:
      lhs, rhs = young_audit(f, g, a, b, c, plan)
      rows.append(YoungRow(index, a, b, c, lhs, rhs))
  return rows


def rows_csv(rows: T.Sequence[YoungRow]) -> str:
  header = ('pair', 'a', 'b', 'c', 'lhs', 'rhs', 'ratio', 'pass')
  return csv_text(header, ([row.dict[key] for key in header] for row in rows))


def run(config: RunConfig) -> T.List[Check]:
  rows = audit_rows(config)
  checks: T.List[Check] = []
  for a, b, c in config.young.triples:
    selected = [row for row in rows if (row.a, row.b, row.c) == (a, b, c)]
    worst = max(row.excess for row in selected)
    checks.append(Check(f'young[a={a:g},b={b:g},c={c:g}]', ANCHOR, worst, 0.0))
  return checks
