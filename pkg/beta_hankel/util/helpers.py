import math
import os
import tempfile
import typing as T
from pathlib import Path

def format_float(value: float) -> str:
  # 17 significant digits round-trip every double
  if not math.isfinite(value):
    return str(value)
  return f'{value:.17g}'

def csv_text(header: T.Sequence[str], rows: T.Iterable[T.Sequence[T.Any]]) -> str:
  lines = [','.join(header)]
  for row in rows:
    lines.append(','.join(format_float(v) if isinstance(v, float) else str(v) for v in row))
  return '\n'.join(lines) + '\n'

def atomic_write(path: "str | Path", text: str) -> Path:
  '''Write text next to path and rename it into place.'''
  path = Path(path)
  path.parent.mkdir(parents=True, exist_ok=True)
  fd, tmp = tempfile.mkstemp(prefix=f'.{path.name}.', dir=path.parent)
  try:
    with os.fdopen(fd, 'w', newline='\n') as handle:
      handle.write(text)
    os.replace(tmp, path)
  except BaseException:
    if os.path.exists(tmp):
      os.unlink(tmp)
    raise
  return path
