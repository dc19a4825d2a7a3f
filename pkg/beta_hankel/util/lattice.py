'''The (p, q) lattice mini language.

  q=2,p=2..6          q fixed, p = 2, 3, 4, 5, 6
  q=2;3,p=3..6:0.5    two values of q, p stepping by 1/2
  q=2,p=4;inf         listed values, ∞ allowed

Ranges are inclusive. Numbers are read as exact fractions so that boundary
cases of the admissibility bounds compare exactly.
'''
import math
import typing as T
from fractions import Fraction

import parsec as P
from ordered_set import OrderedSet

from beta_hankel.util.errors import ValidationError

Value = T.Union[Fraction, float]
Lattice = T.List[T.Tuple[Value, Value]]

# A lattice this large is a typo, not an experiment
MAX_POINTS = 10000

whitespaces = P.regex(r'[ \t]*')

def lexeme(parser: "P.Parser[T.Any]") -> "P.Parser[T.Any]":
  return parser << whitespaces

def to_value(text: str) -> Value:
  return math.inf if text == 'inf' else Fraction(text)

number = lexeme(P.regex(r'inf|[0-9]+(\.[0-9]+)?([eE][-+]?[0-9]+)?')).parsecmap(to_value).desc('number or inf')

def expand(start: Value, stop: Value, step: Value) -> T.List[Value]:
  if math.isinf(start) or math.isinf(stop) or math.isinf(step):
    raise ValidationError('ranges must have finite bounds and step', 'triplets')
  if step <= 0:
    raise ValidationError(f'range step must be positive, got {step}', 'triplets')
  if (stop - start) / step > MAX_POINTS:
    raise ValidationError(f'range {start}..{stop}:{step} has more than {MAX_POINTS} points', 'triplets')
  values: T.List[Value] = []
  current = start
  while current <= stop:
    values.append(current)
    current += step
  return values

@P.generate('value or range')
def value_range() -> "T.Generator[P.Parser[T.Any], T.Any, T.List[Value]]":
  start = yield number
  stop = yield P.optional(lexeme(P.string('..')) >> number)
  if stop is None:
    return [start]
  step = yield P.optional(lexeme(P.string(':')) >> number)
  return expand(start, stop, step if step is not None else Fraction(1))

@P.generate('values')
def values() -> "T.Generator[P.Parser[T.Any], T.Any, T.List[Value]]":
  collected: T.List[Value] = list((yield value_range))
  while (yield P.optional(lexeme(P.string(';')))) is not None:
    collected.extend((yield value_range))
  return collected

assignment = (
  lexeme(P.regex(r'[pq]').desc('p or q')) + (lexeme(P.string('=')) >> values)
)

lattice = whitespaces >> P.sepBy1(assignment, lexeme(P.string(','))) << P.eof()


def parse_triplet_lattice(text: str) -> Lattice:
  try:
    assignments: T.List[T.Tuple[str, T.List[Value]]] = lattice.parse_strict(text)  # type: ignore
  except P.ParseError as e:
    raise ValidationError(f'unable to parse {text!r}: expected {e.expected} at column {e.index + 1}', 'triplets') from e
  names = [name for name, _ in assignments]
  for name in ('p', 'q'):
    if names.count(name) != 1:
      raise ValidationError(f'{name} must be assigned exactly once in {text!r}', 'triplets')
  ranges = dict(assignments)
  pairs: OrderedSet[T.Tuple[Value, Value]] = OrderedSet()
  for q in ranges['q']:
    for p in ranges['p']:
      pairs.add((p, q))
  return list(pairs)
