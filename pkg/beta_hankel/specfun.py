'''Real-order Bessel functions, the scaled modified Bessel function and Gamma.

Every kernel in the package is assembled from these. J_μ is evaluated with its
ascending series below `series_switch` and with the Hankel large-argument
expansion above it; where the expansion cannot reach 1e-12 with the configured
number of terms (large μ close to the switch) the reference implementation in
scipy.special takes over.
'''
import logging
import math
import typing as T
from dataclasses import dataclass

import numpy as np
import numpy.typing as NT
import scipy.special as SS

from beta_hankel.util.errors import ValidationError, require

log = logging.getLogger(__name__)

Real = T.Union[float, NT.NDArray[np.float64]]

# The first omitted term of the asymptotic expansion must be below this (relative to its prefactor)
ASYMPTOTIC_TOL = 1e-12


@dataclass(frozen=True)
class SpecFunConfig:
  series_switch: float = 12.0
  series_terms_max: int = 200
  asymptotic_terms: int = 10
  abs_floor: float = 1e-300

  def __post_init__(self):
    require(self.series_switch > 0, 'series_switch must be positive', 'series_switch')
    require(self.series_terms_max >= 1, 'series_terms_max must be at least 1', 'series_terms_max')
    require(self.asymptotic_terms >= 1, 'asymptotic_terms must be at least 1', 'asymptotic_terms')


DEFAULT_CONFIG = SpecFunConfig()


def _check_order(mu: float):
  if not mu > -0.5:
    raise ValidationError(f'Bessel order must exceed -1/2, got {mu}', 'mu')

def _as_array(x: NT.ArrayLike) -> "tuple[NT.NDArray[np.float64], bool]":
  arr = np.asarray(x, dtype=np.float64)
  return np.atleast_1d(arr), arr.ndim == 0

def _check_argument(x: NT.NDArray[np.float64]):
  if np.any(np.isnan(x)) or np.any(x < 0):
    raise ValidationError('Bessel argument must be non-negative', 'x')

def _unwrap(values: NT.NDArray[np.float64], scalar: bool) -> Real:
  return float(values[0]) if scalar else values


def gamma_fn(x: NT.ArrayLike) -> Real:
  arr, scalar = _as_array(x)
  if np.any(~(arr > 0)):
    raise ValidationError('gamma_fn is only defined here for positive arguments', 'x')
  return _unwrap(np.asarray(SS.gamma(arr), dtype=np.float64), scalar)


def _series(mu: float, x: NT.NDArray[np.float64], config: SpecFunConfig) -> NT.NDArray[np.float64]:
  result = np.empty_like(x)
  zero = x == 0
  if mu == 0:
    result[zero] = 1.0
  else:
    result[zero] = 0.0 if mu > 0 else math.inf
  xs = x[~zero]
  if xs.size == 0:
    return result
  half = xs / 2
  # log-space first term keeps (x/2)^μ/Γ(μ+1) finite for large μ
  term = np.exp(mu * np.log(half) - SS.gammaln(mu + 1))
  total = term.copy()
  quarter = half * half
  for m in range(1, config.series_terms_max + 1):
    term = -term * quarter / (m * (m + mu))
    total += term
    if m > half.max() and np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), config.abs_floor)):
      break
  result[~zero] = total
  return result


def _asymptotic(mu: float, x: NT.NDArray[np.float64], config: SpecFunConfig) \
    -> "tuple[NT.NDArray[np.float64], NT.NDArray[np.bool_]]":
  four_mu2 = 4 * mu * mu
  p = np.ones_like(x)
  q = np.zeros_like(x)
  term = np.ones_like(x)
  smallest = np.ones_like(x)
  growing = np.zeros(x.shape, dtype=bool)
  for k in range(1, 2 * config.asymptotic_terms):
    term = term * (four_mu2 - (2 * k - 1) ** 2) / (k * 8 * x)
    magnitude = np.abs(term)
    # an asymptotic series is cut where its terms start growing
    growing |= magnitude > smallest
    use = ~growing
    sign = -1.0 if (k // 2) % 2 else 1.0
    if k % 2:
      q[use] += sign * term[use]
    else:
      p[use] += sign * term[use]
    smallest = np.where(use, np.minimum(smallest, magnitude), smallest)
  omitted = np.where(growing, smallest, np.abs(term * (four_mu2 - (4 * config.asymptotic_terms - 1) ** 2)
                                                 / (2 * config.asymptotic_terms * 8 * x)))
  omega = x - (mu / 2 + 0.25) * math.pi
  values = np.sqrt(2 / (math.pi * x)) * (p * np.cos(omega) - q * np.sin(omega))
  return values, omitted <= ASYMPTOTIC_TOL


def bessel_j(mu: float, x: NT.ArrayLike, config: SpecFunConfig = DEFAULT_CONFIG) -> Real:
  _check_order(mu)
  arr, scalar = _as_array(x)
  _check_argument(arr)
  out = np.empty_like(arr)
  small = arr <= config.series_switch
  if np.any(small):
    out[small] = _series(mu, arr[small], config)
  if np.any(~small):
    large = arr[~small]
    values, accurate = _asymptotic(mu, large, config)
    if not np.all(accurate):
      log.debug(f'J_{mu:g}: {int(np.sum(~accurate))} arguments beyond the asymptotic expansion, using scipy.special.jv')
      values[~accurate] = SS.jv(mu, large[~accurate])
    out[~small] = values
  return _unwrap(out, scalar)


def bessel_j_poisson(mu: float, x: NT.ArrayLike, nodes: "int | None" = None) -> Real:
  '''J_μ from its Poisson integral, by Gauss–Jacobi quadrature of the cosine part.

  Independent of bessel_j and only meant as an oracle; it loses digits to
  cancellation once (x/2)^μ/Γ(μ+1) gets large.
  '''
  _check_order(mu)
  arr, scalar = _as_array(x)
  _check_argument(arr)
  if nodes is None:
    nodes = 40 + int(math.ceil(float(arr.max(initial=0.0))))
  t, w = SS.roots_jacobi(nodes, mu - 0.5, mu - 0.5)
  integral = np.cos(np.outer(arr, t)) @ w
  with np.errstate(divide='ignore'):
    prefactor = np.power(arr / 2, mu) / (SS.gamma(mu + 0.5) * math.sqrt(math.pi))
  return _unwrap(np.asarray(prefactor * integral, dtype=np.float64), scalar)


def bessel_i_scaled(mu: float, x: NT.ArrayLike) -> Real:
  '''e^{−x}·I_μ(x); the unscaled value overflows long before the kernels need it to.'''
  _check_order(mu)
  arr, scalar = _as_array(x)
  _check_argument(arr)
  return _unwrap(np.asarray(SS.ive(mu, arr), dtype=np.float64), scalar)
