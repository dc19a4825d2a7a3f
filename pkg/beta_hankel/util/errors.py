import typing as T

if T.TYPE_CHECKING:
  from beta_hankel.evolution import BlowupReport

class BetaHankelError(Exception):
  def __init__(self, message: str, exit_code: int = 1):
    super().__init__(message)
    self.message = message
    self.exit_code = exit_code

class ValidationError(BetaHankelError):
  field: "str | None"

  def __init__(self, message: str, field: "str | None" = None):
    super().__init__(f'{field}: {message}' if field is not None else message, 1)
    self.field = field

class NumericalError(BetaHankelError):
  def __init__(self, message: str):
    super().__init__(message, 2)

class ConvergenceError(NumericalError):
  iterations: int
  residual: float

  def __init__(self, message: str, iterations: int, residual: float):
    super().__init__(f'{message} (after {iterations} iterations, residual {residual:.3e})')
    self.iterations = iterations
    self.residual = residual

class BlowupDetected(BetaHankelError):
  report: "BlowupReport"

  def __init__(self, report: "BlowupReport"):
    super().__init__(
      f'solution blew up near t={report.T_star_fit:.6g} with fitted exponent {report.exponent_fit:.4f}', 3)
    self.report = report

def require(condition: bool, message: str, field: "str | None" = None) -> None:
  if not condition:
    raise ValidationError(message, field)
