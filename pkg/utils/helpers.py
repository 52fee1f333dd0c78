from fractions import Fraction
from typing import List, Union

from core.errors import InputError

Number = Union[int, float, Fraction]


def parse_rational(text) -> Fraction:
    """
    Convert '17/5', '0.5', '3' or a number into an exact Fraction.
    Decimal strings are read exactly ('0.1' is 1/10, not the binary float).
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, bool):
        raise InputError(f"Not a number: {text!r}")
    if isinstance(text, (int, float)):
        return Fraction(text)

    text = str(text).strip()
    if not text:
        raise InputError("Empty number")

    try:
        if '/' in text:
            num, den = text.split('/', 1)
            return Fraction(int(num), int(den))
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise InputError(f"Not a rational number: {text!r} ({e})")


def format_rational(value: Fraction) -> str:
    """Exact rendering: '17/5', or '3' for integers."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_float(value: Number) -> str:
    """Fixed 6-decimal rendering used for every float field."""
    return f"{float(value):.6f}"


def parse_int_list(text: str) -> List[int]:
    """Parse '1,2,3' (or whitespace separated) into integers."""
    if text is None:
        return []
    parts = text.replace(',', ' ').split()
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise InputError(f"Expected a list of integers, got {text!r}")
