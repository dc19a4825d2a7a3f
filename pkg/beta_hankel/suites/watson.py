import itertools
import typing as T

from beta_hankel.config import RunConfig
from beta_hankel.kernels import WATSON_A, WATSON_NU, WATSON_P, watson_check
from beta_hankel.suites.check import Check

ANCHOR = 'Watson exponential integral ∫J_ν(at)e^{−p²t²}t^{ν+1}dt'
TOLERANCE = 1e-8


def run(config: RunConfig) -> T.List[Check]:
  '''The quadrature gate: 18 closed-form Watson integrals, independent of the model parameters.'''
  checks: T.List[Check] = []
  for nu, a, p in itertools.product(WATSON_NU, WATSON_A, WATSON_P):
    lhs, rhs = watson_check(nu, a, p)
    checks.append(Check(f'watson[nu={nu:g},a={a:g},p={p:g}]', ANCHOR, abs(lhs - rhs) / abs(rhs), TOLERANCE))
  return checks
