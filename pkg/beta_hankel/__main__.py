#!/usr/bin/env python3
import importlib.metadata
import logging
import os
import sys
import typing as T

import docopt
import termcolor

from beta_hankel import BetaHankelError, __doc__ as pkg_doc, __name__ as root_name
from beta_hankel.commands import Outcome, cmd_decay_fit, cmd_evolve, cmd_params, cmd_verify, cmd_young_audit, render
from beta_hankel.config import build_config, load_config

log = logging.getLogger(root_name)

__doc__: str = pkg_doc + """
Usage:
  beta-hankel params [options] [--triplets=LATTICE]
  beta-hankel verify [options] [--suite=NAME...]
  beta-hankel evolve [options] [--fail-on-blowup]
  beta-hankel decay-fit [options]
  beta-hankel young-audit [options]
  beta-hankel -h
  beta-hankel --version

Options:
  -c --config=FILE    Run configuration in YAML or JSON
  -o --out=DIR        Write the CSV and JSON outputs to DIR
  --n=N               Spatial dimension, at least 2
  --beta=BETA         Weight exponent β, in [0, 2)
  --k=K               Spherical harmonic degree, at least 0
  -j --threads=N      Worker threads for the verification suites
  -y --yaml           Print the report as YAML instead of JSON
  -v --verbose        Log debug output
  --triplets=LATTICE  (p, q) lattice to classify, e.g. q=2,p=2..6
  --suite=NAME        Verification suite to run, "all" for the default set
  --fail-on-blowup    Exit with code 3 when the solution blows up
  --help -h           Show this help screen
  --version           Show the beta-hankel version
"""
Params = T.TypedDict('Params', {
  'params': bool, 'verify': bool, 'evolve': bool, 'decay-fit': bool, 'young-audit': bool,
  '--config': "str | None", '--out': "str | None", '--n': "str | None", '--beta': "str | None",
  '--k': "str | None", '--threads': "str | None", '--yaml': bool, '--verbose': bool,
  '--triplets': "str | None", '--suite': T.List[str], '--fail-on-blowup': bool,
})


def beta_hankel(params: Params):
  try:
    config = build_config(load_config(params['--config']), {
      'n': params['--n'], 'beta': params['--beta'], 'k': params['--k'],
      'suites': params['--suite'], 'triplets': params['--triplets'],
      'threads': params['--threads'], 'out': params['--out'],
    })
    outcome: Outcome
    if params['params']:
      outcome = cmd_params(config)
    elif params['verify']:
      outcome = cmd_verify(config)
    elif params['evolve']:
      outcome = cmd_evolve(config, params['--fail-on-blowup'])
    elif params['decay-fit']:
      outcome = cmd_decay_fit(config)
    else:
      outcome = cmd_young_audit(config)
    sys.stdout.write(render(outcome.report, params['--yaml']))
    if outcome.error is not None:
      raise outcome.error
  except BetaHankelError as err:
    log.error(str(err))
    sys.exit(err.exit_code)


def setup_logging(verbose: bool = False):
  level_colors = {
    logging.ERROR: 'red',
    logging.WARN: 'yellow',
  }

  class ColorFormatter(logging.Formatter):

    def format(self, record: logging.LogRecord):
      record.msg = termcolor.colored(str(record.msg), level_colors.get(record.levelno, None))  # type: ignore
      return super().format(record)

  stderr = logging.StreamHandler(sys.stderr)
  if os.isatty(2):
    stderr.setFormatter(ColorFormatter())
  log.setLevel(level=logging.DEBUG if verbose else logging.INFO)
  log.addHandler(stderr)


def main():
  try:
    version = 'v' + importlib.metadata.version('beta-hankel')
  except importlib.metadata.PackageNotFoundError:
    version = 'v0.0.0-dev'
  params = T.cast(Params, docopt.docopt(__doc__, version=version))
  setup_logging(params['--verbose'])
  beta_hankel(params)


if __name__ == '__main__':
  main()
