'''Verification suites behind `beta-hankel verify`.

Every suite is a module exposing `run(config) -> list[Check]`. Suites are
independent, so they fan out over a thread pool; results come back in
selection order whatever the thread count.
'''
import logging
import typing as T
from concurrent.futures import ThreadPoolExecutor

from ordered_set import OrderedSet

from beta_hankel.config import RunConfig
from beta_hankel.suites import contraction, delsarte, diagonalization, flow, kernel, smoothing, transform, watson, \
  young
from beta_hankel.suites.check import Check, Suite
from beta_hankel.util.errors import ValidationError

log = logging.getLogger(__name__)

SUITES: T.Dict[str, Suite] = {
  'watson': watson.run,
  'transform': transform.run,
  'diagonalization': diagonalization.run,
  'kernel': kernel.run,
  'delsarte': delsarte.run,
  'young': young.run,
  'smoothing': smoothing.run,
  'flow': flow.run,
  'contraction': contraction.run,
}
# `all` leaves out the slow opt-in suites
DEFAULT_SUITES = ('watson', 'transform', 'diagonalization', 'kernel', 'delsarte', 'young', 'smoothing', 'flow')


def select_suites(names: T.Iterable[str]) -> "OrderedSet[str]":
  selected: OrderedSet[str] = OrderedSet()
  for name in names:
    if name == 'all':
      selected.update(DEFAULT_SUITES)
    elif name in SUITES:
      selected.add(name)
    else:
      raise ValidationError(f'unknown suite {name!r}, expected one of all, {", ".join(SUITES)}', 'suites')
  if not selected:
    raise ValidationError('no suites selected', 'suites')
  return selected


def _run_one(name: str, config: RunConfig) -> T.List[Check]:
  checks = SUITES[name](config)
  failed = sum(not check.passed for check in checks)
  if failed:
    log.warning(f'{name}: {failed} of {len(checks)} checks failed')
  else:
    log.info(f'{name}: all {len(checks)} checks passed')
  return checks


def run_suites(config: RunConfig, names: T.Iterable[str]) -> T.List[Check]:
  selected = select_suites(names)
  with ThreadPoolExecutor(max_workers=config.threads) as pool:
    futures = [pool.submit(_run_one, name, config) for name in selected]
    return [check for future in futures for check in future.result()]


__all__ = ['Check', 'Suite', 'SUITES', 'DEFAULT_SUITES', 'select_suites', 'run_suites']
