from beta_hankel.util.errors import BetaHankelError, ValidationError, NumericalError, ConvergenceError, \
  BlowupDetected, require

__all__ = [
  'BetaHankelError', 'ValidationError', 'NumericalError', 'ConvergenceError', 'BlowupDetected', 'require',
]
