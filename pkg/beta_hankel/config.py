'''Run configuration, loaded from YAML or JSON and validated before any computation.

  model:       {n: 3, beta: 1, k: 0}
  grid:        {r_min: 1e-8, r_max: auto, rho_max: auto, panels: 40, order: 8}
  evolution:   {t_end: 1, steps: 10, substeps: 8, q: 2, triplet: [3, 3, 2], dump_times: [0.5]}
  nonlinearity: {b: 1, sign: focusing}
  data:        {kind: gaussian, amplitude: 1, width: 1}
  triplets:    "q=2,p=2..6"
  suites:      [watson, transform]
  young:       {pairs: 100, seed: 0, triples: [[2, 1.3333333333333333, 1.3333333333333333]]}
  decay:       {p: 2, q: 1, t_min: 1, t_max: 100, samples: 24}
  threads:     1
  out:         results
'''
import math
import typing as T
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import yaml
from ordered_set import OrderedSet

from beta_hankel.model import ModelParams, derive_params
from beta_hankel.util.errors import ValidationError

Mapping = T.Dict[str, T.Any]

# e^{−46} ≈ 1e-20, the level below which tails are dropped
TAIL = 46.0


def _number(value: T.Any, path: str, *, integer: bool = False, allow_inf: bool = False) -> T.Any:
  if isinstance(value, bool):
    raise ValidationError(f'expected a number, got {value!r}', path)
  if isinstance(value, str):
    try:
      value = float(value) if not integer else int(value)
    except ValueError:
      raise ValidationError(f'expected {"an integer" if integer else "a number"}, got {value!r}', path)
  if integer:
    if isinstance(value, float) and value.is_integer():
      value = int(value)
    if not isinstance(value, int):
      raise ValidationError(f'expected an integer, got {value!r}', path)
    return value
  if not isinstance(value, (int, float)):
    raise ValidationError(f'expected a number, got {value!r}', path)
  value = float(value)
  if math.isnan(value) or (math.isinf(value) and not allow_inf):
    raise ValidationError(f'expected a finite number, got {value!r}', path)
  return value


def _block(data: Mapping, name: str, allowed: T.Iterable[str]) -> Mapping:
  block = data.get(name) or {}
  if not isinstance(block, dict):
    raise ValidationError(f'expected a mapping, got {type(block).__name__}', name)
  unknown = OrderedSet(block) - OrderedSet(allowed)
  if unknown:
    raise ValidationError(f'unknown keys {", ".join(map(str, unknown))}', name)
  return T.cast(Mapping, block)


def _keys(cls: T.Any) -> T.List[str]:
  return [f.name for f in fields(cls)]


@dataclass(frozen=True)
class ModelBlock:
  n: int = 3
  beta: float = 1.0
  k: int = 0


@dataclass(frozen=True)
class GridBlock:
  r_min: float = 1e-8
  r_max: "float | None" = None
  rho_max: "float | None" = None
  panels: int = 40
  order: int = 8
  nodes_per_period: float = 16.0


@dataclass(frozen=True)
class EvolutionBlock:
  t_end: float = 1.0
  steps: int = 10
  substeps: int = 8
  picard_tol: float = 1e-10
  picard_max_iter: int = 50
  blowup_threshold: float = 1e12
  q: float = 2.0
  triplet: "T.Tuple[float, float, float] | None" = None
  dump_times: T.Tuple[float, ...] = ()


@dataclass(frozen=True)
class NonlinearityBlock:
  b: float = 1.0
  sign: str = 'focusing'


@dataclass(frozen=True)
class DataBlock:
  kind: str = 'gaussian'
  amplitude: float = 1.0
  width: float = 1.0


@dataclass(frozen=True)
class YoungBlock:
  pairs: int = 100
  seed: int = 0
  triples: T.Tuple[T.Tuple[float, float, float], ...] = ((2.0, 4 / 3, 4 / 3), (3.0, 1.5, 1.5), (1.0, 1.0, 1.0))


@dataclass(frozen=True)
class DecayBlock:
  p: float = 2.0
  q: float = 1.0
  t_min: float = 1.0
  t_max: float = 100.0
  samples: int = 24


DATA_KINDS = ('gaussian', 'bump', 'zero')
INTEGER_FIELDS = {'n', 'k', 'panels', 'order', 'steps', 'substeps', 'picard_max_iter', 'pairs', 'seed', 'samples'}


def _fill(cls: T.Any, data: Mapping, name: str) -> T.Any:
  block = _block(data, name, _keys(cls))
  values: Mapping = {}
  for key, raw in block.items():
    path = f'{name}.{key}'
    if raw is None or raw == 'auto':
      values[key] = None
    elif key == 'triplet':
      if not (isinstance(raw, (list, tuple)) and len(raw) == 3):
        raise ValidationError('expected [m, p, q]', path)
      values[key] = tuple(_number(v, path, allow_inf=True) for v in raw)
    elif key == 'dump_times':
      values[key] = tuple(_number(v, path) for v in (raw if isinstance(raw, list) else [raw]))
    elif key == 'triples':
      if not isinstance(raw, list) or not all(isinstance(t, (list, tuple)) and len(t) == 3 for t in raw):
        raise ValidationError('expected a list of [a, b, c]', path)
      values[key] = tuple(tuple(_number(v, path, allow_inf=True) for v in t) for t in raw)
    elif key in ('sign', 'kind'):
      values[key] = str(raw)
    else:
      values[key] = _number(raw, path, integer=key in INTEGER_FIELDS, allow_inf=key in ('q', 'p'))
  return cls(**values)


@dataclass(frozen=True)
class RunConfig:
  model: ModelBlock = field(default_factory=ModelBlock)
  grid: GridBlock = field(default_factory=GridBlock)
  evolution: EvolutionBlock = field(default_factory=EvolutionBlock)
  nonlinearity: NonlinearityBlock = field(default_factory=NonlinearityBlock)
  data: DataBlock = field(default_factory=DataBlock)
  young: YoungBlock = field(default_factory=YoungBlock)
  decay: DecayBlock = field(default_factory=DecayBlock)
  triplets: "str | None" = None
  suites: T.Tuple[str, ...] = ()
  threads: int = 1
  out: "Path | None" = None

  @property
  def params(self) -> ModelParams:
    return derive_params(self.model.n, self.model.beta, self.model.k)

  def validate(self) -> "RunConfig":
    self.params  # derive_params rejects a bad model block
    if self.data.kind not in DATA_KINDS:
      raise ValidationError(f'expected one of {", ".join(DATA_KINDS)}, got {self.data.kind!r}', 'data.kind')
    if not self.data.width > 0:
      raise ValidationError(f'the data width must be positive, got {self.data.width}', 'data.width')
    if self.threads < 1:
      raise ValidationError(f'need at least one thread, got {self.threads}', 'threads')
    grid = self.grid
    if not grid.r_min > 0:
      raise ValidationError(f'r_min must be positive, got {grid.r_min}', 'grid.r_min')
    for key in ('r_max', 'rho_max'):
      value = getattr(grid, key)
      if value is not None and not value > grid.r_min:
        raise ValidationError(f'{key} must exceed r_min={grid.r_min}, got {value}', f'grid.{key}')
    decay = self.decay
    if not 0 < decay.t_min < decay.t_max:
      raise ValidationError(f'need 0 < t_min < t_max, got {decay.t_min}, {decay.t_max}', 'decay')
    if decay.samples < 5:
      raise ValidationError(f'the decay fit needs at least 5 samples, got {decay.samples}', 'decay.samples')
    if self.young.pairs < 1:
      raise ValidationError(f'need at least one pair, got {self.young.pairs}', 'young.pairs')
    return self

  def physical_extent(self, t_span: float = 0.0) -> float:
    '''r_max from the config, else far enough out for the data and its spread over t_span.'''
    if self.grid.r_max is not None:
      return self.grid.r_max
    return max(data_radius(self.params, self.data.width), spread_radius(self.params, t_span))

  def spectral_extent(self) -> float:
    if self.grid.rho_max is not None:
      return self.grid.rho_max
    return spectral_radius(self.params, self.data.width)


def spread_radius(params: ModelParams, t_span: float) -> float:
  '''Radius beyond which the kernel of S(t_span) is below e^{−46}.'''
  two_b = 2 - params.beta
  return (two_b ** 2 * t_span * TAIL) ** (1 / two_b) if t_span > 0 else 0.0


def data_radius(params: ModelParams, width: float = 1.0) -> float:
  '''Radius beyond which r^k e^{−(r/width)^{2−β}} carries the factor e^{−46}.'''
  return width * TAIL ** (1 / (2 - params.beta))


def spectral_radius(params: ModelParams, width: float = 1.0) -> float:
  '''ρ_max where the transform of r^k e^{−(r/width)^{2−β}} carries the factor e^{−46}.'''
  two_b = 2 - params.beta
  return (TAIL * two_b * two_b) ** (1 / two_b) / width


def load_config(path: "str | Path | None") -> Mapping:
  if path is None:
    return {}
  try:
    text = Path(path).read_text()
  except OSError as e:
    raise ValidationError(f'unable to read {path}: {e.strerror}', 'config') from e
  try:
    data = yaml.safe_load(text)
  except yaml.YAMLError as e:
    raise ValidationError(f'unable to parse {path}: {e}', 'config') from e
  if data is None:
    return {}
  if not isinstance(data, dict):
    raise ValidationError(f'{path} must hold a mapping at the top level', 'config')
  return T.cast(Mapping, data)


TOP_LEVEL = ('model', 'grid', 'evolution', 'nonlinearity', 'data', 'young', 'decay', 'triplets', 'suites',
             'threads', 'out')


def build_config(data: Mapping, overrides: "Mapping | None" = None) -> RunConfig:
  '''Config from a loaded mapping; `overrides` holds command line values, `None` meaning unset.'''
  unknown = OrderedSet(data) - OrderedSet(TOP_LEVEL)
  if unknown:
    raise ValidationError(f'unknown keys {", ".join(map(str, unknown))}', 'config')
  suites = data.get('suites') or []
  if isinstance(suites, str):
    suites = [suites]
  if not isinstance(suites, list):
    raise ValidationError('expected a list of suite names', 'suites')
  triplets = data.get('triplets')
  config = RunConfig(
    model=_fill(ModelBlock, data, 'model'),
    grid=_fill(GridBlock, data, 'grid'),
    evolution=_fill(EvolutionBlock, data, 'evolution'),
    nonlinearity=_fill(NonlinearityBlock, data, 'nonlinearity'),
    data=_fill(DataBlock, data, 'data'),
    young=_fill(YoungBlock, data, 'young'),
    decay=_fill(DecayBlock, data, 'decay'),
    triplets=None if triplets is None else str(triplets),
    suites=tuple(str(s) for s in suites),
    threads=_number(data.get('threads', 1), 'threads', integer=True),
    out=Path(data['out']) if data.get('out') is not None else None,
  )
  overrides = overrides or {}
  model = {key: _number(value, f'model.{key}', integer=key != 'beta')
           for key, value in overrides.items() if key in ('n', 'beta', 'k') and value is not None}
  if model:
    config = replace(config, model=replace(config.model, **model))
  if overrides.get('suites'):
    config = replace(config, suites=tuple(overrides['suites']))
  if overrides.get('triplets') is not None:
    config = replace(config, triplets=str(overrides['triplets']))
  if overrides.get('threads') is not None:
    config = replace(config, threads=_number(overrides['threads'], 'threads', integer=True))
  if overrides.get('out') is not None:
    config = replace(config, out=Path(overrides['out']))
  return config.validate()
