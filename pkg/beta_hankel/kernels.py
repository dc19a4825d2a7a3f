'''Closed-form kernels of the radial flow and the ♯-convolution they act through.

  K(r, t)     = ((2−β)t)^{−μ−1} exp(−r^{2−β}/((2−β)²t)) r^k,   H K(·, t) = e^{−ρ^{2−β}t} ρ^{k−β}
  K̃(ρ, r, t)  : S(t)a(r) = ∫ K̃(ρ, r, t) a(ρ) ρ^{n−1} dρ
  D(x, y, z)  : the Delsarte kernel, supported where the stretched radii form a triangle
  f ♯ g       = H⁻¹(η^{β−k} Hf Hg)

Powers, exponentials and Gamma factors are accumulated in log space throughout;
μ reaches 8 and beyond for moderate k and the linear-space prefactors overflow.
'''
import logging
import math
import typing as T
from dataclasses import dataclass

import numpy as np
import numpy.typing as NT
import scipy.special as SS

from beta_hankel.base import DictGenerator, Report
from beta_hankel.hankel import TransformPlan, hankel_forward, hankel_inverse
from beta_hankel.model import ModelParams
from beta_hankel.radial import Array, GridFunction, Space, build_grid, lp_norm_deta
from beta_hankel.specfun import bessel_i_scaled, bessel_j
from beta_hankel.util.errors import NumericalError, ValidationError

log = logging.getLogger(__name__)

# Relative slack below which a stretched triangle counts as degenerate
DEGENERATE_TOL = 1e-12
EXPONENT_TOL = 1e-12


def _positive_time(t: float):
  if not (math.isfinite(t) and t > 0):
    raise ValidationError(f'time must be positive, got {t}', 't')


def log_delsarte_constant(params: ModelParams) -> float:
  return -float(SS.gammaln(params.mu + 1)) - params.mu * math.log(2 - params.beta)

def delsarte_constant(params: ModelParams) -> float:
  '''Γ(μ+1)^{−1}(2−β)^{−μ}, the value of s^{β−k}U(xs)/x^{k−β} as s → 0.'''
  return math.exp(log_delsarte_constant(params))


def kernel_K(r: NT.ArrayLike, t: float, params: ModelParams) -> Array:
  _positive_time(t)
  r = np.asarray(r, dtype=np.float64)
  if np.any(~(r >= 0)):
    raise ValidationError('kernel_K needs r ≥ 0', 'r')
  two_b = 2 - params.beta
  log_prefactor = -(params.mu + 1) * math.log(two_b * t)
  with np.errstate(divide='ignore'):
    log_r = np.log(r)
  exponent = log_prefactor - np.power(r, two_b) / (two_b ** 2 * t)
  if params.k:
    exponent = exponent + params.k * log_r
  return np.exp(exponent)


def kernel_K_transform(rho: NT.ArrayLike, t: float, params: ModelParams) -> Array:
  '''e^{−ρ^{2−β}t}ρ^{k−β}, the spectral side of kernel_K.'''
  _positive_time(t)
  rho = np.asarray(rho, dtype=np.float64)
  return np.exp(-params.symbol(rho) * t + (params.k - params.beta) * np.log(rho))


def kernel_norm(m: float, t: float, params: ModelParams) -> float:
  '''‖K(·, t)/r^k‖ in L^m_{dη}, from the Gamma integral; m = ∞ allowed.'''
  _positive_time(t)
  if not m >= 1:
    raise ValidationError(f'm must be at least 1, got {m}', 'm')
  gamma = params.gamma
  inv_m = 0.0 if math.isinf(m) else 1 / m
  log_norm = ((2 * gamma - 1) * inv_m - gamma) * math.log(2 - params.beta) \
      + inv_m * float(SS.gammaln(params.mu + 1)) + gamma * (inv_m - 1) * math.log(t)
  if inv_m:
    log_norm -= gamma * inv_m * math.log(m)
  return math.exp(log_norm)


def semigroup_kernel(rho: NT.ArrayLike, r: NT.ArrayLike, t: float, params: ModelParams) -> Array:
  '''K̃(ρ, r, t) with e^{z}I_μ(z) folded into exp(−(r^s − ρ^s)²/((2−β)²t)).'''
  _positive_time(t)
  rho, r = np.broadcast_arrays(np.asarray(rho, dtype=np.float64), np.asarray(r, dtype=np.float64))
  if np.any(~(rho > 0)) or np.any(~(r > 0)):
    raise ValidationError('semigroup_kernel needs positive radii', 'r')
  two_b = 2 - params.beta
  s = params.stretch
  scale = two_b ** 2 * t
  rs, rhos = np.power(r, s), np.power(rho, s)
  z = 2 * rs * rhos / scale
  scaled = np.asarray(bessel_i_scaled(params.mu, z), dtype=np.float64)
  with np.errstate(divide='ignore'):
    log_ive = np.log(scaled)
  # e^{−z}I_μ(z) underflows for tiny z and large μ; its leading term does not
  tiny = ~(scaled > 0)
  if np.any(tiny):
    log_ive[tiny] = params.mu * np.log(z[tiny] / 2) - float(SS.gammaln(params.mu + 1)) - z[tiny]
  log_value = -params.lam * np.log(r) - (params.lam + params.beta) * np.log(rho) - math.log(two_b * t) \
      - (rs - rhos) ** 2 / scale + log_ive
  return np.exp(log_value)


def semigroup_quadrature(a: GridFunction, t: float, params: "ModelParams | None" = None) -> GridFunction:
  '''S(t)a through the positive kernel K̃ on a's own grid.

  Unlike the spectral route this has no oscillation constraint, so it is the
  one to use for long times.
  '''
  if a.space != Space.PHYSICAL:
    raise ValidationError('the semigroup acts on physical-space functions', 'space')
  if t < 0:
    raise ValidationError(f'the semigroup is only defined forward in time, got t={t}', 't')
  if t == 0:
    return a.with_values(a.values.copy())
  params = a.params if params is None else params
  r = a.nodes
  weights = np.power(r, params.n - 1) * a.grid.weights
  matrix = semigroup_kernel(r[None, :], r[:, None], t, params) * weights[None, :]
  return a.with_values(matrix @ a.values)


@dataclass(frozen=True)
class DelsarteValues(Report):
  '''D at a batch of points, with the triangles too close to degenerate to evaluate.'''
  values: Array
  degenerate: "NT.NDArray[np.bool_]"
  mu: float

  @property
  def singular(self) -> bool:
    # Δ^{2μ−1} diverges on the triangle boundary
    return self.mu < 0.5

  def __iter__(self) -> DictGenerator:
    yield 'points', int(self.values.size)
    yield 'degenerate', int(np.sum(self.degenerate))
    yield 'singular', self.singular


@dataclass(frozen=True)
class KernelEval(Report):
  params: ModelParams
  t: float

  def __post_init__(self):
    _positive_time(self.t)

  def kernel(self, r: NT.ArrayLike) -> Array:
    return kernel_K(r, self.t, self.params)

  def transform(self, rho: NT.ArrayLike) -> Array:
    return kernel_K_transform(rho, self.t, self.params)

  def semigroup(self, rho: NT.ArrayLike, r: NT.ArrayLike) -> Array:
    return semigroup_kernel(rho, r, self.t, self.params)

  def norm(self, m: float) -> float:
    return kernel_norm(m, self.t, self.params)

  def delsarte(self, x: NT.ArrayLike, y: NT.ArrayLike, z: NT.ArrayLike) -> DelsarteValues:
    return delsarte_values(x, y, z, self.params)

  def __iter__(self) -> DictGenerator:
    yield 'params', self.params.dict
    yield 't', self.t
    yield 'delsarte_constant', delsarte_constant(self.params)
    yield 'norm_L1', self.norm(1.0)


def _sorted_sides(a: Array, b: Array, c: Array) -> T.Tuple[Array, Array, Array]:
  sides = np.sort(np.stack(np.broadcast_arrays(a, b, c)), axis=0)
  return sides[2], sides[1], sides[0]


def heron_area(a: NT.ArrayLike, b: NT.ArrayLike, c: NT.ArrayLike) -> Array:
  '''Triangle area from sorted sides, stable for needle-shaped triangles; NaN when none exists.'''
  big, mid, small = _sorted_sides(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64),
                                  np.asarray(c, dtype=np.float64))
  product = (big + (mid + small)) * (small - (big - mid)) * (small + (big - mid)) * (big + (mid - small))
  with np.errstate(invalid='ignore'):
    return np.where(product >= 0, np.sqrt(np.maximum(product, 0.0)) / 4, np.nan)


def delsarte_values(x: NT.ArrayLike, y: NT.ArrayLike, z: NT.ArrayLike, params: ModelParams) -> DelsarteValues:
  '''D(x, y, z), zero off the triangle support and on triangles within DEGENERATE_TOL of degenerate.'''
  x, y, z = np.broadcast_arrays(*(np.asarray(v, dtype=np.float64) for v in (x, y, z)))
  if np.any(~(x > 0)) or np.any(~(y > 0)) or np.any(~(z > 0)):
    raise ValidationError('delsarte_D needs positive radii', 'x')
  mu, beta, s, c = params.mu, params.beta, params.stretch, params.scale
  sides = [c * np.power(v, s) for v in (x, y, z)]
  big, mid, small = _sorted_sides(*sides)
  slack = small - (big - mid)
  degenerate = np.abs(slack) <= DEGENERATE_TOL * big
  inside = (slack > 0) & ~degenerate
  out = np.zeros(x.shape)
  report = DelsarteValues(out, degenerate, mu)
  if np.any(degenerate):
    message = f'{int(np.sum(degenerate))} degenerate triangles at μ={mu:g} set to 0'
    if report.singular:
      log.warning(f'{message}, where D is singular')
    else:
      log.debug(message)
  if not np.any(inside):
    return report
  xi, yi, zi = x[inside], y[inside], z[inside]
  log_xyz = np.log(xi) + np.log(yi) + np.log(zi)
  area = heron_area(sides[0][inside], sides[1][inside], sides[2][inside])
  log_value = (-params.lam - beta) * log_xyz + beta * np.log(xi) - math.log(1 - beta / 2) \
      - mu * (3 * math.log(c) + s * log_xyz) + (mu - 1) * math.log(2) + (2 * mu - 1) * np.log(area) \
      - float(SS.gammaln(mu + 0.5)) - 0.5 * math.log(math.pi)
  out[inside] = np.exp(log_value)
  return report


def delsarte_D(x: NT.ArrayLike, y: NT.ArrayLike, z: NT.ArrayLike, params: ModelParams) -> Array:
  return delsarte_values(x, y, z, params).values


Variable = T.Literal['x', 'y', 'z']


def delsarte_identity(which: Variable, fixed: T.Tuple[float, float], params: ModelParams,
                      nodes: int = 64) -> T.Tuple[float, float]:
  '''Integrate D over one of its variables and return (measured, expected).

    which='x', fixed=(y, z):  ∫ x^{k−β} D x^{n−1} dx = C (yz)^{k−β}
    which='y', fixed=(x, z):  ∫ y^k D y^{n−1} dy     = C x^k z^{k−β}
    which='z', fixed=(x, y):  ∫ z^k D z^{n−1} dz     = C x^k y^{k−β}

  The integration runs over T = side² across the triangle support, where D
  carries the Jacobi weight [(T_hi − T)(T − T_lo)]^{μ−1/2}.
  '''
  if which not in ('x', 'y', 'z'):
    raise ValidationError(f'which must be x, y or z, got {which!r}', 'which')
  a, b = fixed
  if not (a > 0 and b > 0):
    raise ValidationError(f'fixed radii must be positive, got {fixed}', 'fixed')
  mu, s, c, k, beta = params.mu, params.stretch, params.scale, params.k, params.beta
  side_a, side_b = c * a ** s, c * b ** s
  lo, hi = (side_a - side_b) ** 2, (side_a + side_b) ** 2
  mid, half = (hi + lo) / 2, (hi - lo) / 2
  xi, w = SS.roots_jacobi(nodes, mu - 0.5, mu - 0.5)
  square = mid + half * xi
  v = np.power(np.sqrt(square) / c, 1 / s)
  if which == 'x':
    values, exponent = delsarte_D(v, a, b, params), k - beta
    expected = (a * b) ** (k - beta)
  elif which == 'y':
    values, exponent = delsarte_D(a, v, b, params), k
    expected = a ** k * b ** (k - beta)
  else:
    values, exponent = delsarte_D(a, b, v, params), k
    expected = a ** k * b ** (k - beta)
  jacobian = v / (2 * s * square) * half
  smooth = values / np.power(1 - xi * xi, mu - 0.5)
  measured = float(np.sum(w * smooth * np.power(v, exponent + params.n - 1) * jacobian))
  if not math.isfinite(measured):
    raise NumericalError(f'the Delsarte identity over {which} is not finite at {fixed}')
  return measured, delsarte_constant(params) * expected


def _check_pair(f: GridFunction, g: GridFunction, plan: TransformPlan):
  for h in (f, g):
    if h.space != Space.PHYSICAL:
      raise ValidationError('the ♯-convolution takes physical-space functions', 'space')
    if not plan.physical_grid.same_as(h.grid):
      raise ValidationError('both factors must live on the plan\'s physical grid', 'grid')


def sharp_convolve(f: GridFunction, g: GridFunction, plan: TransformPlan) -> GridFunction:
  _check_pair(f, g, plan)
  F, G = hankel_forward(f, plan), hankel_forward(g, plan)
  weight = np.power(F.nodes, plan.params.alpha)
  return hankel_inverse(F.with_values(weight * (F.values * G.values)), plan)


def sharp_convolve_direct(f: T.Callable[[Array], Array], g: T.Callable[[Array], Array], x: float,
                          params: ModelParams, cutoff: float, nodes: int = 64) -> float:
  '''f ♯ g(x) = ∫∫ f(z) g(y) D(x, y, z) y^{n−1} z^{n−1} dy dz by brute force.

  With A = (2/(2−β)) r^{(2−β)/2} the support is |A_y − A_z| ≤ A_x ≤ A_y + A_z;
  in u = A_y + A_z, v = A_y − A_z it is the strip u ≥ A_x, |v| ≤ A_x, and D
  factors into Jacobi weights in u and v. Both f and g are taken to vanish
  beyond `cutoff`.
  '''
  if not (x > 0 and cutoff > x):
    raise ValidationError(f'need 0 < x < cutoff, got x={x}, cutoff={cutoff}', 'x')
  mu, s, c = params.mu, params.stretch, params.scale
  side_x = c * x ** s
  u_max = 2 * c * cutoff ** s
  xi_u, w_u = SS.roots_jacobi(nodes, 0.0, mu - 0.5)
  xi_v, w_v = SS.roots_jacobi(nodes, mu - 0.5, mu - 0.5)
  u = side_x + (u_max - side_x) * (xi_u + 1) / 2
  v = side_x * xi_v
  U, V = np.meshgrid(u, v, indexing='ij')
  side_y, side_z = (U + V) / 2, (U - V) / 2
  y, z = np.power(side_y / c, 1 / s), np.power(side_z / c, 1 / s)
  kernel = delsarte_D(x, y, z, params)
  # dy = y/(s A_y) dA_y and dA_y dA_z = du dv / 2
  measure = np.power(y, params.n) * np.power(z, params.n) / (s * s * side_y * side_z) / 2
  weight_u = np.power(1 + xi_u, mu - 0.5)[:, None]
  weight_v = np.power(1 - xi_v * xi_v, mu - 0.5)[None, :]
  integrand = f(z) * g(y) * kernel * measure / (weight_u * weight_v)
  total = float(w_u @ integrand @ w_v) * (u_max - side_x) / 2 * side_x
  if not math.isfinite(total):
    raise NumericalError(f'the direct ♯-convolution at x={x} is not finite')
  return total


def young_audit(f: GridFunction, g: GridFunction, a: float, b: float, c: float,
                plan: TransformPlan) -> T.Tuple[float, float]:
  '''Both sides of ‖f♯g‖_a ≤ Γ(μ+1)^{−1}(2−β)^{−μ}‖f‖_b‖g‖_c for 1 + 1/a = 1/b + 1/c.'''
  for name, value in (('a', a), ('b', b), ('c', c)):
    if not value >= 1:
      raise ValidationError(f'Young exponents must be at least 1, got {value}', name)
  inv = [0.0 if math.isinf(e) else 1 / e for e in (a, b, c)]
  if abs(1 + inv[0] - inv[1] - inv[2]) > EXPONENT_TOL:
    raise ValidationError(f'({a}, {b}, {c}) violates 1 + 1/a = 1/b + 1/c', 'young')
  lhs = lp_norm_deta(sharp_convolve(f, g, plan), a)
  rhs = delsarte_constant(plan.params) * lp_norm_deta(f, b) * lp_norm_deta(g, c)
  return lhs, rhs


WATSON_NU = (0.5, 1.0, 2.5)
WATSON_A = (0.5, 1.0, 2.0)
WATSON_P = (0.7, 1.0)


def watson_check(nu: float, a: float, p: float, panels: int = 40, order: int = 16) -> T.Tuple[float, float]:
  '''∫ J_ν(at) e^{−p²t²} t^{ν+1} dt by panel quadrature, against a^ν/(2p²)^{ν+1} e^{−a²/(4p²)}.'''
  if not (a > 0 and p > 0):
    raise ValidationError(f'a and p must be positive, got a={a}, p={p}', 'watson')
  # e^{−46} is below 1e-19, far past the checked digits
  grid = build_grid(1e-8, math.sqrt(46) / p, panels, order, max_width=0.25)
  t = grid.nodes
  integrand = np.asarray(bessel_j(nu, a * t), dtype=np.float64) * np.exp(-(p * t) ** 2) * np.power(t, nu + 1)
  lhs = float(np.sum(integrand * grid.weights))
  rhs = math.exp(nu * math.log(a) - (nu + 1) * math.log(2 * p * p) - a * a / (4 * p * p))
  return lhs, rhs
