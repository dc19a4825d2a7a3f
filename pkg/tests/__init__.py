import math
import typing as T

import hypothesis.strategies as HS

from beta_hankel.config import data_radius, spectral_radius
from beta_hankel.hankel import TransformPlan, plan_transform, resolve_grids
from beta_hankel.model import ModelParams, derive_params
from beta_hankel.suites.check import gaussian

_T = T.TypeVar('_T')

def maybe(strategy: HS.SearchStrategy[_T]) -> "HS.SearchStrategy[None | _T]":
  return HS.one_of(HS.none(), strategy)

dims = HS.integers(min_value=2, max_value=5)
betas = HS.one_of(HS.sampled_from([0.0, 0.5, 1.0, 1.5]), HS.floats(min_value=0, max_value=1.9))
degrees = HS.integers(min_value=0, max_value=3)
models = HS.builds(derive_params, dims, betas, degrees)
exponents = HS.floats(min_value=1.01, max_value=20, allow_nan=False)
exponents_or_inf = HS.one_of(exponents, HS.just(math.inf))

def plan_for(params: ModelParams, width: float = 1.0, panels: int = 40, order: int = 8) -> TransformPlan:
  r_max, rho_max = data_radius(params, width), spectral_radius(params, width)
  physical, spectral = resolve_grids(params, r_max, rho_max, r_min=1e-8, panels=panels, order=order)
  return plan_transform(physical, spectral, params)

__all__ = ['maybe', 'dims', 'betas', 'degrees', 'models', 'exponents', 'exponents_or_inf', 'gaussian', 'plan_for']
