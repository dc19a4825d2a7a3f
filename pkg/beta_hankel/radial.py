import enum
import math
import typing as T
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import numpy.typing as NT

from beta_hankel.model import ModelParams
from beta_hankel.util.errors import NumericalError, ValidationError, require
from beta_hankel.util.helpers import atomic_write, csv_text

Array = NT.NDArray[np.float64]

# below this |f| counts as zero when dividing by r^k
ABS_FLOOR = 1e-300


class Space(str, enum.Enum):
  PHYSICAL = 'physical'
  SPECTRAL = 'spectral'

  @property
  def coordinate(self) -> str:
    return 'r' if self == Space.PHYSICAL else 'rho'


@dataclass(frozen=True, eq=False)
class RadialGrid:
  '''Gauss–Legendre nodes on log-spaced panels of [r_min, r_max].

  `breaks` are the boundaries of the pieces actually carrying a Gauss rule;
  there are more of them than `panels` when a panel had to be split.
  '''
  r_min: float
  r_max: float
  panels: int
  nodes_per_panel: int
  nodes: Array
  weights: Array
  breaks: Array

  def __len__(self) -> int:
    return len(self.nodes)

  def same_as(self, other: "RadialGrid") -> bool:
    return self is other or (
      len(self) == len(other) and bool(np.array_equal(self.nodes, other.nodes))
      and bool(np.array_equal(self.weights, other.weights))
    )


def build_grid(r_min: float, r_max: float, panels: int, order: int, *,
               stretch: float = 1.0, max_width: "float | None" = None) -> RadialGrid:
  '''Log-spaced panels between r_min and r_max with `order` Gauss–Legendre nodes each.

  With `max_width`, a panel [a, b] is cut into equal pieces in the coordinate
  r^stretch until every piece satisfies b^stretch − a^stretch ≤ max_width.
  '''
  require(math.isfinite(r_min) and r_min > 0, f'r_min must be positive, got {r_min}', 'grid.r_min')
  require(math.isfinite(r_max) and r_max > r_min, f'r_max must exceed r_min={r_min}, got {r_max}', 'grid.r_max')
  require(panels >= 1, f'need at least one panel, got {panels}', 'grid.panels')
  require(order >= 2, f'the Gauss order must be at least 2, got {order}', 'grid.order')
  require(stretch > 0, f'stretch must be positive, got {stretch}', 'grid.stretch')
  require(max_width is None or max_width > 0, f'max_width must be positive, got {max_width}', 'grid.max_width')
  edges = np.geomspace(r_min, r_max, panels + 1)
  edges[0], edges[-1] = r_min, r_max
  if max_width is not None:
    pieces: T.List[Array] = [edges[:1]]
    for a, b in zip(edges[:-1], edges[1:]):
      width = b ** stretch - a ** stretch
      count = max(1, int(math.ceil(width / max_width)))
      inner = np.linspace(a ** stretch, b ** stretch, count + 1) ** (1 / stretch)
      inner[-1] = b
      pieces.append(inner[1:])
    edges = np.concatenate(pieces)
  x, w = np.polynomial.legendre.leggauss(order)
  left, right = edges[:-1, None], edges[1:, None]
  half = (right - left) / 2
  nodes = ((left + right) / 2 + half * x).ravel()
  weights = (half * w).ravel()
  return RadialGrid(float(r_min), float(r_max), panels, order, nodes, weights, edges)


@dataclass(frozen=True, eq=False)
class GridFunction:
  grid: RadialGrid
  values: Array
  space: Space
  params: ModelParams
  # False where a value is extrapolated rather than computed
  mask: "NT.NDArray[np.bool_] | None" = field(default=None)

  def __post_init__(self):
    values = np.asarray(self.values, dtype=np.float64)
    object.__setattr__(self, 'values', values)
    if values.shape != self.grid.nodes.shape:
      raise ValidationError(f'{values.shape[0] if values.ndim else 0} values for {len(self.grid)} nodes', 'values')
    if not np.all(np.isfinite(values)):
      raise NumericalError(f'{int(np.sum(~np.isfinite(values)))} non-finite values in a {self.space.value} function')

  @property
  def nodes(self) -> Array:
    return self.grid.nodes

  @property
  def valid(self) -> "NT.NDArray[np.bool_]":
    return np.ones(len(self.grid), dtype=bool) if self.mask is None else self.mask

  def with_values(self, values: Array) -> "GridFunction":
    return replace(self, values=values, mask=None)

  def _check_compatible(self, other: "GridFunction"):
    if other.space != self.space or not self.grid.same_as(other.grid):
      raise ValidationError(f'cannot combine a {self.space.value} and a {other.space.value} function '
                            'on different grids', 'grid')

  def __add__(self, other: "GridFunction") -> "GridFunction":
    self._check_compatible(other)
    return self.with_values(self.values + other.values)

  def __sub__(self, other: "GridFunction") -> "GridFunction":
    self._check_compatible(other)
    return self.with_values(self.values - other.values)

  def __mul__(self, other: "GridFunction | float") -> "GridFunction":
    if isinstance(other, GridFunction):
      self._check_compatible(other)
      return self.with_values(self.values * other.values)
    return self.with_values(self.values * other)

  __rmul__ = __mul__

  def __neg__(self) -> "GridFunction":
    return self.with_values(-self.values)

  def __abs__(self) -> "GridFunction":
    return self.with_values(np.abs(self.values))

  def to_csv(self) -> str:
    return csv_text((self.space.coordinate, 'value'), zip(self.nodes.tolist(), self.values.tolist()))


def sample(grid: RadialGrid, fn: T.Callable[[Array], NT.ArrayLike], params: ModelParams,
           space: Space = Space.PHYSICAL) -> GridFunction:
  values = np.broadcast_to(np.asarray(fn(grid.nodes), dtype=np.float64), grid.nodes.shape).copy()
  return GridFunction(grid, values, space, params)


def zeros(grid: RadialGrid, params: ModelParams, space: Space = Space.PHYSICAL) -> GridFunction:
  return GridFunction(grid, np.zeros(len(grid)), space, params)


def integrate_weighted(f: GridFunction, weight_exponent: float) -> float:
  '''Σ f(r_i) r_i^e w_i ≈ ∫ f(r) r^e dr.'''
  total = float(np.sum(f.values * np.power(f.nodes, weight_exponent) * f.grid.weights))
  if not math.isfinite(total):
    raise NumericalError(f'weighted integral with exponent {weight_exponent} is not finite')
  return total


def divide_rk(f: GridFunction, k: int) -> Array:
  '''|f(r)|/r^k, formed in log space.'''
  magnitude = np.abs(f.values)
  if k == 0:
    return magnitude
  out = np.zeros_like(magnitude)
  live = magnitude > ABS_FLOOR
  out[live] = np.exp(np.log(magnitude[live]) - k * np.log(f.nodes[live]))
  return out


def lp_norm_deta(f: GridFunction, p: float, k: "int | None" = None) -> float:
  '''(∫ |f(r)/r^k|^p r^{2k+n−1−β} dr)^{1/p}; the grid max of |f/r^k| when p = ∞.'''
  if not p >= 1:
    raise ValidationError(f'p must be at least 1, got {p}', 'p')
  if f.space != Space.PHYSICAL:
    raise ValidationError('weighted Lebesgue norms are taken of physical-space functions', 'space')
  k = f.params.k if k is None else k
  ratio = divide_rk(f, k)
  if math.isinf(p):
    return float(ratio.max(initial=0.0))
  params = f.params
  total = float(np.sum(ratio ** p * np.power(f.nodes, 2 * k + params.n - 1 - params.beta) * f.grid.weights))
  if not math.isfinite(total):
    raise NumericalError(f'L^{p} norm is not finite')
  return total ** (1 / p)


def write_csv(f: GridFunction, path: "str | Path") -> Path:
  return atomic_write(path, f.to_csv())


def read_csv(path: "str | Path", grid: RadialGrid, params: ModelParams) -> GridFunction:
  lines = Path(path).read_text().strip().split('\n')
  header = lines[0].strip()
  spaces = {f'{space.coordinate},value': space for space in Space}
  if header not in spaces:
    raise ValidationError(f'expected a "r,value" or "rho,value" header, got {header!r}', str(path))
  try:
    rows = np.array([[float(cell) for cell in line.split(',')] for line in lines[1:]], dtype=np.float64)
  except ValueError as e:
    raise ValidationError(f'malformed row: {e}', str(path)) from e
  if rows.shape != (len(grid), 2) or not np.allclose(rows[:, 0], grid.nodes, rtol=1e-15, atol=0):
    raise ValidationError(f'the nodes in {path} do not match the grid', str(path))
  return GridFunction(grid, rows[:, 1], spaces[header], params)
