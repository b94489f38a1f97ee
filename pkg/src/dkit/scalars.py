"""Scalar arithmetic modes.

Two modes are supported and never mixed silently:

* ``Mode.EXACT``  -- arbitrary-precision rationals (``fractions.Fraction``).
  ``Fraction`` keeps values in lowest terms with a positive denominator,
  which is exactly the normal form the rest of the toolkit relies on.
* ``Mode.FLOAT``  -- double-precision complex numbers (``complex``).

A scalar is the pair (mode, value); in Python the value types themselves
carry the distinction, and :func:`ensure_scalar` is the single gatekeeper
that admits a raw value into a given mode.
"""

from __future__ import annotations

import enum
from fractions import Fraction
from typing import Union

Scalar = Union[Fraction, complex]


class Mode(enum.Enum):
    EXACT = "exact"
    FLOAT = "float"

    def __str__(self) -> str:
        return self.value


def zero(mode: Mode) -> Scalar:
    return Fraction(0) if mode is Mode.EXACT else complex(0.0)


def one(mode: Mode) -> Scalar:
    return Fraction(1) if mode is Mode.EXACT else complex(1.0)


def ensure_scalar(value, mode: Mode) -> Scalar:
    """Admit ``value`` into ``mode``, rejecting cross-mode values.

    ``int`` is accepted by both modes (it is a literal, not a mode carrier);
    ``Fraction`` only in exact mode, ``float``/``complex`` only in float
    mode.  Anything else is a contract violation.
    """
    if isinstance(value, bool):
        raise TypeError(f"bool is not a scalar: {value!r}")
    if mode is Mode.EXACT:
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, Fraction):
            return value
        raise TypeError(f"exact mode cannot hold {type(value).__name__} value {value!r}")
    if isinstance(value, (int, float, complex)):
        return complex(value)
    raise TypeError(f"float mode cannot hold {type(value).__name__} value {value!r}")


def parse_scalar(raw, mode: Mode) -> Scalar:
    """Parse a scalar from its interchange form.

    Accepted forms: integers; strings ``"num/den"`` (exact rational),
    decimal strings such as ``"0.25"`` (read with decimal semantics), and
    in float mode complex strings such as ``"1+2j"`` or plain numbers.
    Exact mode rejects non-integral JSON numbers: a binary float does not
    say which decimal it stood for, so the file must spell the value as a
    string.
    """
    if isinstance(raw, bool):
        raise ValueError(f"boolean is not a scalar: {raw!r}")
    if mode is Mode.EXACT:
        if isinstance(raw, int):
            return Fraction(raw)
        if isinstance(raw, float):
            if raw == int(raw):
                return Fraction(int(raw))
            raise ValueError(
                f"exact mode needs integers or strings, got float {raw!r} "
                f'(write it as a string, e.g. "1/4" or "0.25")'
            )
        if isinstance(raw, str):
            try:
                return Fraction(raw)
            except (ValueError, ZeroDivisionError) as exc:
                raise ValueError(f"cannot parse {raw!r} as a rational: {exc}") from None
        raise ValueError(f"cannot parse {type(raw).__name__} as an exact scalar")
    if isinstance(raw, (int, float)):
        return complex(raw)
    if isinstance(raw, str):
        try:
            return complex(Fraction(raw))
        except (ValueError, ZeroDivisionError):
            pass
        try:
            return complex(raw.replace(" ", ""))
        except ValueError:
            raise ValueError(f"cannot parse {raw!r} as a float scalar") from None
    raise ValueError(f"cannot parse {type(raw).__name__} as a float scalar")


def format_scalar(value: Scalar) -> str:
    """Render a scalar so that parse_scalar round-trips it losslessly."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, complex):
        if value.imag == 0.0:
            return repr(value.real)
        return repr(value).strip("()")
    if isinstance(value, int):
        return str(value)
    raise TypeError(f"not a scalar: {value!r}")


def to_float_scalar(value: Scalar) -> complex:
    return complex(value)


def magnitude(value: Scalar):
    """Absolute value; a Fraction in exact mode, a float otherwise."""
    if isinstance(value, Fraction):
        return abs(value)
    return abs(value)
