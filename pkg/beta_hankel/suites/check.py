import math
import typing as T
from dataclasses import dataclass

import numpy as np

from beta_hankel.base import DictGenerator, Report
from beta_hankel.config import GridBlock, RunConfig
from beta_hankel.hankel import TransformPlan, plan_transform, resolve_grids
from beta_hankel.model import ModelParams
from beta_hankel.radial import Array, GridFunction


@dataclass(frozen=True)
class Check(Report):
  '''One verified identity or bound: it passes when `measured` does not exceed `tolerance`.'''
  name: str
  anchor: str
  measured: float
  tolerance: float

  @property
  def passed(self) -> bool:
    # NaN never passes
    return bool(self.measured <= self.tolerance)

  def __iter__(self) -> DictGenerator:
    yield 'name', self.name
    yield 'anchor', self.anchor
    yield 'measured', float(self.measured)
    yield 'tolerance', float(self.tolerance)
    yield 'pass', self.passed


Suite = T.Callable[[RunConfig], T.List[Check]]


def gaussian(params: ModelParams, width: float = 1.0, amplitude: float = 1.0,
             quadratic: float = 0.0) -> T.Callable[[Array], Array]:
  '''r ↦ amplitude·r^k (1 + quadratic·x) e^{−x} with x = (r/width)^{2−β}.

  This is a Gaussian in the stretched radius; at quadratic = 0 it is a
  multiple of the heat kernel K(·, t) with t = width^{2−β}/(2−β)².
  '''
  k, two_b = params.k, 2 - params.beta

  def fn(r: Array) -> Array:
    x = np.power(r / width, two_b)
    return amplitude * np.power(r, k) * (1 + quadratic * x) * np.exp(-x)
  return fn


def relative_error(measured: Array, expected: Array, weights: "Array | None" = None) -> float:
  '''Weighted discrete L² distance relative to the expected values.'''
  weights = np.ones_like(expected) if weights is None else weights
  norm = math.sqrt(float(np.sum(weights * expected * expected)))
  distance = math.sqrt(float(np.sum(weights * (measured - expected) ** 2)))
  if norm == 0:
    return distance
  return distance / norm


def physical_weights(f: GridFunction) -> Array:
  '''Quadrature weights of L²(r^{n−1−β} dr).'''
  return np.power(f.nodes, f.params.n - 1 - f.params.beta) * f.grid.weights


def spectral_weights(F: GridFunction) -> Array:
  '''Quadrature weights of L²(ρ^{n−1+β} dρ), the norm H is isometric into.'''
  return np.power(F.nodes, F.params.n - 1 + F.params.beta) * F.grid.weights


def make_plan(params: ModelParams, grid: GridBlock, r_max: float, rho_max: float, *,
              r_min: "float | None" = None, panels: "int | None" = None) -> TransformPlan:
  physical, spectral = resolve_grids(
    params, r_max, rho_max, r_min=grid.r_min if r_min is None else r_min,
    panels=grid.panels if panels is None else panels, order=grid.order, nodes_per_period=grid.nodes_per_period)
  return plan_transform(physical, spectral, params)
