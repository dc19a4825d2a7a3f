import logging
import math

import hypothesis.strategies as HS
import numpy as np
import pytest as PT
import scipy.special as SS
from hypothesis import given, settings

from beta_hankel.specfun import SpecFunConfig, bessel_i_scaled, bessel_j, bessel_j_poisson, gamma_fn
from beta_hankel.util.errors import ValidationError


@PT.mark.parametrize('x, expected', [(1, 1.0), (0.5, 1.7724538509055160), (5, 24.0)])
def test_gamma_values(x: float, expected: float):
  assert gamma_fn(x) == PT.approx(expected, rel=1e-12)

@given(HS.floats(min_value=0.05, max_value=30))
def test_gamma_recurrence(x: float):
  assert gamma_fn(x + 1) == PT.approx(x * gamma_fn(x), rel=1e-12)

def test_gamma_rejects_nonpositive():
  with PT.raises(ValidationError, match='positive arguments'):
    gamma_fn(0)
  with PT.raises(ValidationError, match='positive arguments'):
    gamma_fn(np.array([1.0, -2.0]))


def test_bessel_values():
  assert bessel_j(0.5, math.pi / 2) == PT.approx(2 / math.pi, abs=1e-14)
  assert bessel_j(0, 0) == 1
  assert bessel_j(1, 0) == 0
  assert bessel_j(1, 1) == PT.approx(0.44005058574493355, abs=1e-15)
  assert math.isinf(bessel_j(-0.25, 0))

def test_bessel_vectorized():
  x = np.array([0.0, 1.0, 20.0, 60.0])
  values = bessel_j(2.5, x)
  assert isinstance(values, np.ndarray)
  np.testing.assert_allclose(values, SS.jv(2.5, x), rtol=0, atol=1e-11)

@given(HS.floats(min_value=-0.4, max_value=10), HS.floats(min_value=0, max_value=100, allow_subnormal=False))
@settings(max_examples=400)
def test_bessel_against_reference(mu: float, x: float):
  assert bessel_j(mu, x) == PT.approx(float(SS.jv(mu, x)), rel=1e-10, abs=1e-10)

@given(HS.floats(min_value=-0.4, max_value=4), HS.floats(min_value=0, max_value=50, allow_subnormal=False))
@settings(deadline=None)
def test_bessel_against_poisson_integral(mu: float, x: float):
  assert bessel_j(mu, x) == PT.approx(bessel_j_poisson(mu, x), rel=1e-10, abs=1e-10)

@given(HS.floats(min_value=4, max_value=10), HS.floats(min_value=0, max_value=20, allow_subnormal=False))
@settings(deadline=None)
def test_bessel_against_poisson_integral_high_order(mu: float, x: float):
  assert bessel_j(mu, x) == PT.approx(bessel_j_poisson(mu, x), rel=1e-10, abs=1e-10)

def test_poisson_closed_forms():
  assert bessel_j_poisson(0.5, math.pi / 2) == PT.approx(2 / math.pi, abs=1e-14)
  assert bessel_j_poisson(0, 0) == PT.approx(1.0, abs=1e-14)
  assert bessel_j_poisson(1.7, 5) == PT.approx(bessel_j(1.7, 5), abs=1e-12)

@given(HS.floats(min_value=0.6, max_value=8), HS.floats(min_value=0.1, max_value=50))
def test_bessel_recurrence(mu: float, x: float):
  lhs = bessel_j(mu - 1, x) + bessel_j(mu + 1, x)
  assert lhs == PT.approx(2 * mu / x * bessel_j(mu, x), rel=0, abs=1e-8)

@PT.mark.parametrize('mu', [-0.4, 0.0, 0.5, 2.0, 7.5])
def test_small_argument_law(mu: float):
  x = 1e-4
  assert bessel_j(mu, x) * gamma_fn(mu + 1) * (x / 2) ** -mu == PT.approx(1.0, rel=1e-6)

def test_asymptotic_fallback_is_logged(caplog: PT.LogCaptureFixture):
  caplog.set_level(logging.DEBUG, logger='beta_hankel.specfun')
  assert bessel_j(10, 13.0) == PT.approx(float(SS.jv(10, 13.0)), abs=1e-14)
  assert 'scipy.special.jv' in caplog.text

def test_series_switch_is_configurable():
  config = SpecFunConfig(series_switch=40.0)
  assert bessel_j(1.5, 20.0, config) == PT.approx(float(SS.jv(1.5, 20.0)), abs=1e-9)

@PT.mark.parametrize('kwargs', [dict(series_switch=0), dict(series_terms_max=0), dict(asymptotic_terms=0)])
def test_config_rejects(kwargs: dict):
  with PT.raises(ValidationError):
    SpecFunConfig(**kwargs)

def test_bessel_rejects():
  with PT.raises(ValidationError, match='^mu: '):
    bessel_j(-0.5, 1.0)
  with PT.raises(ValidationError, match='^x: '):
    bessel_j(1.0, -1.0)
  with PT.raises(ValidationError, match='^x: '):
    bessel_j(1.0, math.nan)


def test_scaled_i_values():
  expected = math.exp(-1) * math.sqrt(2 / math.pi) * math.sinh(1)
  assert bessel_i_scaled(0.5, 1.0) == PT.approx(expected, rel=1e-12)
  assert bessel_i_scaled(0, 0) == 1
  assert bessel_i_scaled(2, 500.0) == PT.approx(1 / math.sqrt(2 * math.pi * 500), rel=5e-3)

def test_scaled_i_does_not_overflow():
  values = bessel_i_scaled(3.0, np.geomspace(1e-3, 1e4, 200))
  assert np.all(np.isfinite(values))
  assert np.all(values > 0)

def test_scaled_i_rejects():
  with PT.raises(ValidationError):
    bessel_i_scaled(1.0, -1.0)
