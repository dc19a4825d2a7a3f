import enum
import math
import numbers
import typing as T
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import numpy.typing as NT

from beta_hankel.base import Report, DictGenerator
from beta_hankel.util.errors import ValidationError, require

# Distance kept from the β = 2 singularity of every constant below
EPS_BETA = 1e-3
REL_SLACK = 1e-12

Exponent = T.Union[float, int, Fraction]


@dataclass(frozen=True, init=False)
class ModelParams(Report):
  '''Fixed (n, β, k) of a k-th radial model together with every exponent derived from them.'''
  n: int
  beta: float
  k: int
  lam: float
  mu_k: float
  mu: float
  gamma: float
  alpha: float

  def __init__(self, n: int, beta: float, k: int):
    super().__init__()
    object.__setattr__(self, 'n', n)
    object.__setattr__(self, 'beta', beta)
    object.__setattr__(self, 'k', k)
    object.__setattr__(self, 'lam', (n - 2) / 2)
    object.__setattr__(self, 'mu_k', (n - 2) / 2 + k)
    object.__setattr__(self, 'mu', 2 * ((n - 2) / 2 + k) / (2 - beta))
    object.__setattr__(self, 'gamma', (n - beta + 2 * k) / (2 - beta))
    object.__setattr__(self, 'alpha', beta - k)

  @property
  def stretch(self) -> float:
    '''The exponent (2−β)/2 of the stretched Bessel argument.'''
    return (2 - self.beta) / 2

  @property
  def scale(self) -> float:
    '''The factor 2/(2−β) in front of the stretched Bessel argument.'''
    return 2 / (2 - self.beta)

  @property
  def weight_exponent(self) -> float:
    '''Power of r in dη(r) = r^{2k+n−1−β} dr.'''
    return 2 * self.k + self.n - 1 - self.beta

  def symbol(self, rho: NT.ArrayLike) -> NT.NDArray[np.float64]:
    '''ρ^{2−β}, the multiplier r^β A_{μ(k)} turns into.'''
    return np.power(np.asarray(rho, dtype=np.float64), 2 - self.beta)

  def __iter__(self) -> DictGenerator:
    yield 'n', self.n
    yield 'beta', self.beta
    yield 'k', self.k
    yield 'lambda', self.lam
    yield 'mu_k', self.mu_k
    yield 'mu', self.mu
    yield 'gamma', self.gamma
    yield 'alpha', self.alpha


def derive_params(n: int, beta: float, k: int) -> ModelParams:
  require(isinstance(n, numbers.Integral) and n >= 2, f'n must be an integer ≥ 2, got {n}', 'n')
  require(isinstance(k, numbers.Integral) and k >= 0, f'k must be an integer ≥ 0, got {k}', 'k')
  require(math.isfinite(beta) and 0 <= beta <= 2 - EPS_BETA,
          f'beta must lie in [0, {2 - EPS_BETA}], the weight |x|^β is singular at β = 2; got {beta}', 'beta')
  params = ModelParams(int(n), float(beta), int(k))
  require(params.mu > -0.5, f'mu={params.mu} is outside the Poisson representation range μ > −1/2', 'mu')
  return params


def harmonic_dimension(n: int, k: int) -> int:
  '''Number of linearly independent degree-k spherical harmonics on S^{n−1}.'''
  require(n >= 2 and k >= 0, f'invalid (n, k) = ({n}, {k})')
  if k == 0:
    return 1
  return (2 * k + n - 2) * math.comb(n + k - 3, k - 1) // k


class TripletKind(str, enum.Enum):
  ADMISSIBLE = 'admissible'
  GENERALIZED = 'generalized'
  NEITHER = 'neither'


@dataclass(frozen=True)
class Triplet(Report):
  m: float
  p: float
  q: float
  kind: TripletKind

  @property
  def inv_m(self) -> float:
    return 0.0 if math.isinf(self.m) else 1 / self.m

  @property
  def is_generalized(self) -> bool:
    # admissible triplets are generalized ones with a stricter bound on p
    return self.kind != TripletKind.NEITHER

  def __iter__(self) -> DictGenerator:
    yield 'm', float(self.m)
    yield 'p', float(self.p)
    yield 'q', float(self.q)
    yield 'kind', self.kind.value


def _inv(x: Exponent) -> Exponent:
  if isinstance(x, float) and math.isinf(x):
    return 0
  return Fraction(1) / x if isinstance(x, (int, Fraction)) else 1 / x

def _rational(*values: T.Any) -> bool:
  return all(isinstance(v, (numbers.Rational)) for v in values)

def _strictly_below(value: Exponent, bound: Exponent) -> bool:
  if isinstance(bound, float) and math.isinf(bound):
    return not (isinstance(value, float) and math.isinf(value))
  if isinstance(value, float) and math.isinf(value):
    return False
  if _rational(value, bound):
    return value < bound
  return value < bound and not math.isclose(value, bound, rel_tol=REL_SLACK)

def _gamma_exact(params: ModelParams, beta: Exponent) -> Exponent:
  n, k = params.n, params.k
  if _rational(beta):
    return Fraction(n - beta + 2 * k) / (2 - beta)  # type: ignore
  return params.gamma


def admissible_m(p: Exponent, q: Exponent, params: ModelParams) -> float:
  '''The unique m with 1/m = γ(1/q − 1/p); ∞ when p = q.'''
  if not q > 1:
    raise ValidationError(f'q must exceed 1, got {q}', 'q')
  if p < q:
    raise ValidationError(f'p must be at least q={q}, got {p}', 'p')
  # finite floats are rationals, so this is exact up to the final rounding
  gamma = Fraction(params.n + 2 * params.k) - Fraction(params.beta)
  gamma /= 2 - Fraction(params.beta)
  inv_m = gamma * (Fraction(_inv(q)) - Fraction(_inv(p)))
  if inv_m == 0:
    return math.inf
  return float(1 / inv_m)


def admissible_bound(q: Exponent, params: ModelParams, beta: "Exponent | None" = None) -> Exponent:
  '''Upper bound on p for admissible triplets.'''
  n, k = params.n, params.k
  beta = params.beta if beta is None else beta
  if n > 2 - 2 * k:
    numerator = q * (n - beta + 2 * k)
    denominator = n + 2 * k - 2
    return Fraction(numerator) / denominator if _rational(q, beta) else numerator / denominator  # type: ignore
  return math.inf


def generalized_bound(q: Exponent, params: ModelParams, beta: "Exponent | None" = None) -> Exponent:
  '''Upper bound on p for generalized admissible triplets.'''
  n, k = params.n, params.k
  beta = params.beta if beta is None else beta
  if n > 2 * q + (1 - q) * beta - 2 * k:
    numerator = q * (n - beta + 2 * k)
    denominator = n + 2 * k - 2 * q + (q - 1) * beta
    return Fraction(numerator) / denominator if _rational(q, beta) else numerator / denominator  # type: ignore
  return math.inf


def classify_triplet(m: Exponent, p: Exponent, q: Exponent, params: ModelParams,
                     beta: "Exponent | None" = None) -> Triplet:
  '''Sort (m, p, q) into admissible, generalized or neither.

  Pass `beta` as a Fraction (equal to params.beta) to have the strict bounds compared exactly.
  '''
  for name, value in (('m', m), ('p', p), ('q', q)):
    if not value > 1:
      raise ValidationError(f'exponents must lie in (1, ∞], got {value}', name)
  beta = params.beta if beta is None else beta
  triplet = (float(m), float(p), float(q))
  if p < q:
    return Triplet(*triplet, TripletKind.NEITHER)
  gamma = _gamma_exact(params, beta)
  lhs, rhs = _inv(m), gamma * (_inv(q) - _inv(p))
  if _rational(lhs, rhs):
    related = lhs == rhs
  else:
    related = math.isclose(float(lhs), float(rhs), rel_tol=REL_SLACK, abs_tol=1e-15)
  if not related:
    return Triplet(*triplet, TripletKind.NEITHER)
  if _strictly_below(p, admissible_bound(q, params, beta)):
    return Triplet(*triplet, TripletKind.ADMISSIBLE)
  if _strictly_below(p, generalized_bound(q, params, beta)):
    return Triplet(*triplet, TripletKind.GENERALIZED)
  return Triplet(*triplet, TripletKind.NEITHER)


def triplet_for(p: Exponent, q: Exponent, params: ModelParams) -> Triplet:
  return classify_triplet(admissible_m(p, q, params), p, q, params)


class Sign(enum.IntEnum):
  FOCUSING = 1
  DEFOCUSING = -1


@dataclass(frozen=True)
class NonlinearitySpec(Report):
  '''F(u) = ±|u|^b u together with its critical exponent q₀ = γb.'''
  b: float
  sign: Sign
  q0: float

  def __call__(self, u: NT.NDArray[np.float64]) -> NT.NDArray[np.float64]:
    return float(self.sign) * np.abs(u) ** self.b * u

  def theta(self, p: float, q: float) -> float:
    '''Interpolation index used by the Duhamel estimates when p > q(b+1).'''
    return (p - q * (self.b + 1)) / ((self.b + 1) * (p - q))

  def __iter__(self) -> DictGenerator:
    yield 'b', self.b
    yield 'sign', 'focusing' if self.sign == Sign.FOCUSING else 'defocusing'
    yield 'q0', self.q0


def nonlinearity(b: float, sign: "Sign | str", params: ModelParams) -> NonlinearitySpec:
  require(b > 0, f'the nonlinearity power must be positive, got {b}', 'b')
  if isinstance(sign, str):
    lookup = {'+': Sign.FOCUSING, 'focusing': Sign.FOCUSING, '-': Sign.DEFOCUSING, 'defocusing': Sign.DEFOCUSING}
    if sign not in lookup:
      raise ValidationError(f'expected one of {", ".join(lookup)}, got {sign!r}', 'sign')
    sign = lookup[sign]
  return NonlinearitySpec(float(b), sign, params.gamma * b)
