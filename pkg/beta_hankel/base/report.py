import abc
import math
import typing as T

IterVal = T.Union[
  str, bool, int, float, None,
  T.List["IterVal"], T.Dict[str, "IterVal"]
]
DictGenerator = T.Generator[T.Tuple[str, IterVal], None, None]

def plain(value: IterVal) -> IterVal:
  # JSON has no inf/nan
  if isinstance(value, float) and not math.isfinite(value):
    return str(value)
  if isinstance(value, list):
    return [plain(v) for v in value]
  if isinstance(value, dict):
    return {k: plain(v) for k, v in value.items()}
  return value

class Report(abc.ABC):
  '''Anything that ends up in a JSON/YAML report.

  Subclasses yield (key, value) pairs in the order they should be written,
  keys in snake_case.
  '''

  @abc.abstractmethod
  def __iter__(self) -> DictGenerator:
    pass

  @property
  def dict(self) -> T.Dict[str, IterVal]:
    return {key: plain(value) for key, value in self}
