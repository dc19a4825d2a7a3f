'''The β-Hankel transform pair as dense quadrature matrices.

  H φ(ρ)   = ∫ U(rρ) φ(r) r^{n−1} dr,   U(w) = w^{(2−n−2β)/2} J_μ(2/(2−β) w^{(2−β)/2})
  H⁻¹ψ(r)  = ∫ V(rρ) ψ(ρ) ρ^{n−1} dρ,  V(w) = w^{(2−n)/2}    J_μ(2/(2−β) w^{(2−β)/2})

H diagonalizes r^β A_{μ(k)} with symbol ρ^{2−β}. The kernels oscillate in
(rρ)^{(2−β)/2}, so grids are refined in that coordinate rather than substituted.
'''
import logging
import math
import typing as T
from dataclasses import dataclass

import numpy as np
import numpy.polynomial.legendre as NL
import numpy.typing as NT

from beta_hankel.model import ModelParams
from beta_hankel.radial import Array, GridFunction, RadialGrid, Space, build_grid
from beta_hankel.specfun import bessel_j
from beta_hankel.util.errors import NumericalError, ValidationError

log = logging.getLogger(__name__)

# Fewest Gauss nodes allowed per period of the kernel at the largest rρ
MIN_NODES_PER_PERIOD = 8
# Nodes per Gauss piece for a 4th-order second derivative, and the masked layer at each end
STENCIL = 6
BOUNDARY = 2


def kernel_U(w: NT.ArrayLike, params: ModelParams) -> Array:
  w = np.asarray(w, dtype=np.float64)
  argument = params.scale * np.power(w, params.stretch)
  return np.power(w, (2 - params.n - 2 * params.beta) / 2) * bessel_j(params.mu, argument)

def kernel_V(w: NT.ArrayLike, params: ModelParams) -> Array:
  w = np.asarray(w, dtype=np.float64)
  argument = params.scale * np.power(w, params.stretch)
  return np.power(w, (2 - params.n) / 2) * bessel_j(params.mu, argument)


def _max_width(params: ModelParams, other_max: float, order: int, nodes_per_period: float) -> float:
  # widest piece (in r^s) keeping nodes_per_period nodes per 2π of phase c·(r ρ_max)^s
  return 2 * math.pi * order / (nodes_per_period * params.scale * other_max ** params.stretch)

def _phase_violation(grid: RadialGrid, params: ModelParams, other_max: float) -> float:
  widths = np.diff(grid.breaks ** params.stretch)
  phase = params.scale * other_max ** params.stretch * widths.max()
  return phase / (2 * math.pi * grid.nodes_per_panel / MIN_NODES_PER_PERIOD)


def resolve_grids(params: ModelParams, r_max: float, rho_max: float, *, r_min: float = 1e-8,
                  rho_min: "float | None" = None, panels: int = 40, order: int = 8,
                  nodes_per_period: float = 16) -> T.Tuple[RadialGrid, RadialGrid]:
  '''Physical and spectral grids resolving each other's kernel oscillation.'''
  if nodes_per_period < MIN_NODES_PER_PERIOD:
    raise ValidationError(f'at least {MIN_NODES_PER_PERIOD} nodes per period are needed, got {nodes_per_period}',
                          'grid.nodes_per_period')
  rho_min = r_min if rho_min is None else rho_min
  physical = build_grid(r_min, r_max, panels, order, stretch=params.stretch,
                        max_width=_max_width(params, rho_max, order, nodes_per_period))
  spectral = build_grid(rho_min, rho_max, panels, order, stretch=params.stretch,
                        max_width=_max_width(params, r_max, order, nodes_per_period))
  log.debug(f'resolved {len(physical)} physical and {len(spectral)} spectral nodes for {params.dict}')
  return physical, spectral


@dataclass(frozen=True, eq=False)
class TransformPlan:
  physical_grid: RadialGrid
  spectral_grid: RadialGrid
  params: ModelParams
  kernel_matrix_U: Array
  kernel_matrix_V: Array

  def symbol(self) -> Array:
    return self.params.symbol(self.spectral_grid.nodes)


def plan_transform(pg: RadialGrid, sg: RadialGrid, params: ModelParams) -> TransformPlan:
  for grid, other, name in ((pg, sg, 'physical'), (sg, pg, 'spectral')):
    excess = _phase_violation(grid, params, other.r_max)
    if excess > 1 + 1e-9:
      raise ValidationError(
        f'the {name} grid is too coarse for the kernel oscillation at {other.r_max:g}: fewer than '
        f'{MIN_NODES_PER_PERIOD} nodes per period (phase per piece {excess:.2f}x the limit)', 'grid')
  r, rho = pg.nodes, sg.nodes
  n = params.n
  U = kernel_U(np.outer(rho, r), params) * (np.power(r, n - 1) * pg.weights)[None, :]
  V = kernel_V(np.outer(r, rho), params) * (np.power(rho, n - 1) * sg.weights)[None, :]
  if not (np.all(np.isfinite(U)) and np.all(np.isfinite(V))):
    raise NumericalError('non-finite transform kernel entries; is r_min or rho_min too small for this μ?')
  return TransformPlan(pg, sg, params, U, V)


def _expect(f: GridFunction, space: Space, grid: RadialGrid):
  if f.space != space:
    raise ValidationError(f'expected a {space.value} function, got a {f.space.value} one', 'space')
  if not grid.same_as(f.grid):
    raise ValidationError(f'the {space.value} function does not live on the plan\'s grid', 'grid')


def hankel_forward(f: GridFunction, plan: TransformPlan) -> GridFunction:
  _expect(f, Space.PHYSICAL, plan.physical_grid)
  return GridFunction(plan.spectral_grid, plan.kernel_matrix_U @ f.values, Space.SPECTRAL, plan.params)


def hankel_inverse(F: GridFunction, plan: TransformPlan) -> GridFunction:
  _expect(F, Space.SPECTRAL, plan.spectral_grid)
  return GridFunction(plan.physical_grid, plan.kernel_matrix_V @ F.values, Space.PHYSICAL, plan.params)


def spectral_multiply(F: GridFunction, symbol: T.Callable[[Array], NT.ArrayLike]) -> GridFunction:
  if F.space != Space.SPECTRAL:
    raise ValidationError('spectral multipliers act on spectral functions', 'space')
  values = np.asarray(symbol(F.nodes), dtype=np.float64)
  if not np.all(np.isfinite(values)):
    raise NumericalError('the spectral symbol is not finite on every node')
  return F.with_values(F.values * values)


def _panel_derivatives(grid: RadialGrid) -> T.Tuple[Array, Array]:
  '''Matrices (pieces, m, m) of the first and second derivative of the interpolant through each piece's m nodes.'''
  m = grid.nodes_per_panel
  centre = (grid.breaks[1:] + grid.breaks[:-1]) / 2
  half = np.diff(grid.breaks) / 2
  x = (grid.nodes.reshape(-1, m) - centre[:, None]) / half[:, None]
  basis = NL.legvander(x, m - 1)
  unit = np.eye(m)
  first = NL.legvander(x, m - 2) @ NL.legder(unit, 1)
  second = NL.legvander(x, m - 3) @ NL.legder(unit, 2)
  # D = V′ V⁻¹, solved through the transposes
  transposed = np.swapaxes(basis, 1, 2)
  d1 = np.swapaxes(np.linalg.solve(transposed, np.swapaxes(first, 1, 2)), 1, 2)
  d2 = np.swapaxes(np.linalg.solve(transposed, np.swapaxes(second, 1, 2)), 1, 2)
  return d1 / half[:, None, None], d2 / (half * half)[:, None, None]


def apply_operator_A(f: GridFunction, params: "ModelParams | None" = None) -> GridFunction:
  '''A_{μ(k)} f = −f″ − (n−1)/r f′ + (μ(k)² − λ²)/r² f by finite differences.

  Each node is differentiated on the stencil of its own Gauss piece, which is
  of order m − 2 in the piece width for m nodes per piece. The two nodes at
  either end get the value of their nearest interior neighbour and are masked out.
  '''
  if f.space != Space.PHYSICAL:
    raise ValidationError('A_{μ(k)} acts on physical-space functions', 'space')
  params = f.params if params is None else params
  grid, r = f.grid, f.nodes
  if grid.nodes_per_panel < STENCIL or len(r) < 2 * BOUNDARY + 1:
    raise ValidationError(f'finite differences need at least {STENCIL} nodes per panel, '
                          f'got {grid.nodes_per_panel}', 'grid')
  d1, d2 = _panel_derivatives(grid)
  blocks = f.values.reshape(-1, grid.nodes_per_panel)
  first = np.einsum('pij,pj->pi', d1, blocks).reshape(-1)
  second = np.einsum('pij,pj->pi', d2, blocks).reshape(-1)
  potential = params.mu_k ** 2 - params.lam ** 2
  values = -second - (params.n - 1) / r * first + potential / (r * r) * f.values
  values[:BOUNDARY] = values[BOUNDARY]
  values[-BOUNDARY:] = values[-BOUNDARY - 1]
  mask = np.ones(len(r), dtype=bool)
  mask[:BOUNDARY] = False
  mask[-BOUNDARY:] = False
  return GridFunction(grid, values, Space.PHYSICAL, params, mask)
