import math
import typing as ty
from fractions import Fraction

# explicit marker for ratios with a zero denominator
UNDEFINED = 'undefined'
INFINITE = 'inf'

MaybeFloat = ty.Union[float, str]


def ratio(numerator: float, denominator: float) -> MaybeFloat:
    if denominator == 0:
        return UNDEFINED
    return numerator / denominator


def percent_slots(percent: float, n: int) -> int:
    # exact ceiling of percent% of n, float noise must not add a slot
    return math.ceil(Fraction(repr(float(percent))) * n / 100)


def absolute_support(fraction: float, n: int) -> int:
    return max(1, math.ceil(Fraction(repr(float(fraction))) * n))


def format_number(value: MaybeFloat) -> str:
    if isinstance(value, str):
        return value
    if math.isinf(value):
        return INFINITE
    return repr(float(value))


def join_items(items: ty.Iterable[str]) -> str:
    return ';'.join(sorted(items))


def split_items(value: str) -> ty.FrozenSet[str]:
    return frozenset(v.strip() for v in value.split(';') if v.strip())
