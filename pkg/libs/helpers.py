import math
import re

_NUMBER = r'[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?'
_EXPONENT = rf'(?:{_NUMBER}|inf|Inf|INF|∞)'


def matches_number_format(s: str) -> bool:
    return bool(re.match(rf'^{_NUMBER}$', s.strip()))


def matches_exponent_format(s: str) -> bool:
    return bool(re.match(rf'^{_EXPONENT}$', s.strip()))


def matches_number_list_format(s: str) -> bool:
    return bool(re.match(rf'^\s*{_NUMBER}(?:\s*,\s*{_NUMBER})*\s*$', s))


def matches_int_list_format(s: str) -> bool:
    return bool(re.match(r'^\s*\d+(?:\s*,\s*\d+)*\s*$', s))


def matches_interval_format(s: str) -> bool:
    return bool(re.match(rf'^\s*{_NUMBER}\s*,\s*{_NUMBER}\s*$', s))


def matches_pair_list_format(s: str) -> bool:
    pair = rf'{_EXPONENT}\s*:\s*{_EXPONENT}'
    return bool(re.match(rf'^\s*{pair}(?:\s*,\s*{pair})*\s*$', s))


def parse_exponent(s: str) -> float:
    """a Lebesgue exponent: a number or inf"""
    if not matches_exponent_format(s):
        raise ValueError(f'not an exponent: {s!r}')
    s = s.strip()
    return math.inf if s.lower() in ('inf', '∞') else float(s)


def parse_number_list(s: str) -> list:
    """
    comma separated numbers
    :param s: e.g. '0.2,0.1,0.05'
    """
    if not matches_number_list_format(s):
        raise ValueError(f'not a comma separated list of numbers: {s!r}')
    return [float(v) for v in s.split(',')]


def parse_int_list(s: str) -> list:
    if not matches_int_list_format(s):
        raise ValueError(f'not a comma separated list of integers: {s!r}')
    return [int(v) for v in s.split(',')]


def parse_interval(s: str) -> tuple:
    """'a,b' -> (a, b)"""
    if not matches_interval_format(s):
        raise ValueError(f'not an interval a,b: {s!r}')
    a, b = (float(v) for v in s.split(','))
    return a, b


def parse_pair_list(s: str) -> list:
    """
    exponent pairs
    :param s: e.g. '4:2,inf:2'
    :return: [(p, q), ...]
    """
    if not matches_pair_list_format(s):
        raise ValueError(f'not a comma separated list of p:q pairs: {s!r}')
    pairs = []
    for pair in s.split(','):
        p, q = pair.split(':')
        pairs.append((parse_exponent(p), parse_exponent(q)))
    return pairs


def format_exponent(p: float) -> str:
    return 'inf' if math.isinf(p) else repr(float(p))
