"""Scalar arithmetic modes.

Every numeric parameter of an instance is held either as an exact
``Fraction`` (rational mode) or as a Python ``float`` (float mode).  The
solver code is written once against the common ``+ - * /`` protocol and
asks the active :class:`Field` whenever it needs to decide whether a value
is zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Scalar = Union[Fraction, float]

DEFAULT_EPS = 1e-9


@dataclass(frozen=True)
class Field:
    name: str
    eps: float = 0.0

    @property
    def exact(self) -> bool:
        return self.name == "rational"

    def convert(self, value) -> Scalar:
        if self.exact:
            if isinstance(value, float):
                # floats reaching rational mode are taken at their decimal repr
                return Fraction(repr(value))
            return Fraction(value)
        return float(value)

    def is_zero(self, value, scale: float = 1.0) -> bool:
        if self.exact:
            return value == 0
        return abs(value) <= self.eps * max(1.0, scale)

    def zero(self) -> Scalar:
        return Fraction(0) if self.exact else 0.0

    def one(self) -> Scalar:
        return Fraction(1) if self.exact else 1.0


RATIONAL = Field("rational")
FLOAT = Field("float", DEFAULT_EPS)

MODES = {"rational": RATIONAL, "float": FLOAT}


def get_field(mode: str | Field) -> Field:
    if isinstance(mode, Field):
        return mode
    try:
        return MODES[mode]
    except KeyError:
        raise ValueError(f"unknown arithmetic mode {mode!r}; expected 'rational' or 'float'") from None


def parse_scalar(text: str) -> Fraction:
    """Parse ``"p/q"``, an integer or a decimal literal exactly.

    >>> parse_scalar("-19/2")
    Fraction(-19, 2)
    >>> parse_scalar("0.1")
    Fraction(1, 10)
    """
    text = text.strip()
    if not text:
        raise ValueError("empty scalar")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"invalid scalar {text!r}") from exc


def format_scalar(value: Scalar) -> str:
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, float) and value.is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(value)
