"""Arbitrary-precision arithmetic contract shared by the whole package.

All numerical work is done with MPFR/MPC floats through :mod:`gmpy2`.
This module pins down the conventions every other module relies on:

* decimal-digit to bit-precision conversion (word-aligned, so the actual
  precision rises in steps of about 19 decimal digits),
* the binary-exponent convention ``x = (-1)^s * 2^e * f`` with mantissa
  ``1/2 <= f < 1`` (so ``exponent_of(1.0) == 1``),
* exact scalars that stay rational until a working precision is chosen,
* decimal-string parsing and printing that round-trips at a stated digit
  count.

Values are immutable; per-evaluation precision is set through thread-local
gmpy2 contexts, so independent evaluations can run concurrently.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

import gmpy2
from gmpy2 import mpc, mpfr, mpq, mpz

__all__ = [
    "LG2",
    "WORD_BITS",
    "ZERO_EXPONENT",
    "PrecisionSpec",
    "APComplex",
    "ExactScalar",
    "digits_to_bits",
    "bits_to_digits",
    "context",
    "exponent_of",
    "to_decimal_string",
    "complex_to_strings",
]

#: log10(2); converts binary exponents/bit counts to decimal digits.
LG2 = math.log10(2.0)

#: Allocation granularity of the underlying bignum mantissas.
WORD_BITS = 64

#: Sentinel exponent for an exact zero; orders below every integer, so
#: running-max bookkeeping never misclassifies a zero term.
ZERO_EXPONENT = float("-inf")

#: The runtime representation of arbitrary-precision complex values.
APComplex = mpc


@lru_cache(maxsize=None)
def _ceil_bits_for_digits(digits: int) -> int:
    # Smallest b with 2**b >= 10**digits, computed exactly in integers.
    return (mpz(10) ** digits).bit_length()


def digits_to_bits(digits: int) -> int:
    """Bit precision for an intended precision of ``digits`` decimal digits.

    Returns the smallest multiple of :data:`WORD_BITS` that is at least
    ``ceil(digits * log2(10))``.  Exact integer arithmetic is used so the
    boundary cases never depend on float rounding.
    """
    if digits < 1:
        raise ValueError(f"digits must be >= 1, got {digits}")
    raw = _ceil_bits_for_digits(digits)
    return ((raw + WORD_BITS - 1) // WORD_BITS) * WORD_BITS


def bits_to_digits(bits: int) -> int:
    """Largest decimal digit count certainly representable in ``bits`` bits.

    Inverse of :func:`digits_to_bits` in the sense that
    ``digits_to_bits(bits_to_digits(M)) <= M`` (with equality on word
    boundaries) and ``bits_to_digits(digits_to_bits(P)) >= P``.
    """
    if bits < 1:
        raise ValueError(f"bits must be >= 1, got {bits}")
    return (mpz(2) ** bits).num_digits(10) - 1


@dataclass(frozen=True)
class PrecisionSpec:
    """Intended decimal precision and the word-aligned bit precision used.

    Attributes:
        decimal_digits: intended precision P in decimal digits.
        bit_precision: actual mantissa size M in bits; a multiple of 64
            with ``M >= ceil(P * log2(10))``.
    """

    decimal_digits: int
    bit_precision: int

    def __post_init__(self) -> None:
        if self.decimal_digits < 1:
            raise ValueError("decimal_digits must be positive")
        if self.bit_precision < 1:
            raise ValueError("bit_precision must be positive")
        if self.bit_precision % WORD_BITS != 0:
            raise ValueError(
                f"bit_precision must be a multiple of {WORD_BITS}, "
                f"got {self.bit_precision}"
            )
        if self.bit_precision < _ceil_bits_for_digits(self.decimal_digits):
            raise ValueError(
                f"{self.bit_precision} bits cannot hold "
                f"{self.decimal_digits} decimal digits"
            )

    @classmethod
    def from_digits(cls, digits: int) -> "PrecisionSpec":
        return cls(digits, digits_to_bits(digits))

    @classmethod
    def from_bits(cls, bits: int) -> "PrecisionSpec":
        if bits % WORD_BITS != 0:
            bits = ((bits + WORD_BITS - 1) // WORD_BITS) * WORD_BITS
        return cls(bits_to_digits(bits), bits)

    def bump_digits(self, extra: int) -> "PrecisionSpec":
        """A new spec with ``extra`` more intended decimal digits."""
        return PrecisionSpec.from_digits(self.decimal_digits + extra)


def context(prec: Union[PrecisionSpec, int]):
    """gmpy2 context manager at the given precision (bits of mantissa).

    Accepts a :class:`PrecisionSpec` or a raw bit count.  Complex results
    are enabled; everything else is left at gmpy2 defaults.
    """
    bits = prec.bit_precision if isinstance(prec, PrecisionSpec) else int(prec)
    return gmpy2.context(precision=bits, allow_complex=True)


def exponent_of(x) -> Union[int, float]:
    """Binary exponent of ``max(|re|, |im|)`` with mantissa in [1/2, 1).

    Returns :data:`ZERO_EXPONENT` for an exact zero.  The component-wise
    maximum differs from the exponent of ``|x|`` by at most one bit, which
    the guard digits of the error model absorb.
    """
    if isinstance(x, mpc):
        re, im = x.real, x.imag
        e_re = ZERO_EXPONENT if re.is_zero() else gmpy2.get_exp(re)
        e_im = ZERO_EXPONENT if im.is_zero() else gmpy2.get_exp(im)
        return max(e_re, e_im)
    if not isinstance(x, mpfr):
        x = mpfr(x)
    return ZERO_EXPONENT if x.is_zero() else gmpy2.get_exp(x)


# --------------------------------------------------------------------------
# Exact scalars
# --------------------------------------------------------------------------

_RATIONAL_RE = re.compile(r"^[+-]?\d+\s*/\s*[+-]?\d+$")
_DECIMAL_RE = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")
# a+bi / a-bi / bi / i forms, decimal or rational parts
_PART = r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?(?:/\d+)?"
_COMPLEX_RE = re.compile(
    rf"^(?P<re>{_PART})?(?P<im>[+-](?:{_PART})?)?[ij]$"
)

ScalarLike = Union["ExactScalar", int, float, complex, str, Fraction, mpq, mpfr, mpc]

#: mpfr values with |binary exponent| above this are kept as fixed-precision
#: floats instead of being expanded into exact dyadic rationals.
_MAX_DYADIC_EXP = 1 << 20


def _to_mpq(value) -> mpq:
    """Exact conversion to mpq; raises TypeError when not exactly convertible."""
    if isinstance(value, mpq):
        return value
    if isinstance(value, (int, mpz)):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError("non-finite float is not an exact scalar")
        return mpq(Fraction(value))
    if isinstance(value, mpfr):
        if not gmpy2.is_finite(value):
            raise ValueError("non-finite value is not an exact scalar")
        if value.is_zero():
            return mpq(0)
        if abs(gmpy2.get_exp(value)) > _MAX_DYADIC_EXP:
            raise TypeError("exponent too large for exact rational form")
        man, exp = value.as_mantissa_exp()
        exp = int(exp)
        if exp >= 0:
            return mpq(man * (mpz(2) ** exp))
        return mpq(man, mpz(2) ** (-exp))
    raise TypeError(f"cannot convert {type(value).__name__} exactly")


def _parse_real_text(text: str) -> mpq:
    text = text.strip()
    if _RATIONAL_RE.match(text):
        num, den = text.split("/")
        den_q = mpz(den.strip())
        if den_q == 0:
            raise ValueError(f"zero denominator in rational {text!r}")
        return mpq(mpz(num.strip()), den_q)
    if _DECIMAL_RE.match(text):
        # decimal strings are exact rationals; rounding happens only when a
        # working precision is chosen
        return mpq(Fraction(text))
    raise ValueError(f"cannot parse scalar {text!r}")


class ExactScalar:
    """A scalar that is exactly rational whenever possible.

    Tagged union of a complex-rational arm (``re``, ``im`` as exact
    rationals; the usual case, covering integers, ``p/q`` strings, decimal
    strings, floats, and any finite mpfr/mpc with a sane exponent) and a
    fixed-precision :class:`APComplex` arm for values that only exist in
    rounded form.  Conversion to a working precision is correctly rounded.
    """

    __slots__ = ("_re", "_im", "_ap")

    def __init__(self, re=0, im=0, _ap: mpc = None):
        if _ap is not None:
            self._re = None
            self._im = None
            self._ap = _ap
        else:
            self._re = _to_mpq(re)
            self._im = _to_mpq(im)
            self._ap = None

    # -- construction -----------------------------------------------------

    @classmethod
    def from_value(cls, value: ScalarLike) -> "ExactScalar":
        if isinstance(value, ExactScalar):
            return value
        if isinstance(value, str):
            return cls.parse(value)
        if isinstance(value, complex):
            return cls(value.real, value.imag)
        if isinstance(value, mpc):
            try:
                return cls(_to_mpq(value.real), _to_mpq(value.imag))
            except TypeError:
                return cls(_ap=value)
        try:
            return cls(_to_mpq(value))
        except TypeError:
            return cls(_ap=mpc(value))

    @classmethod
    def parse(cls, text: str) -> "ExactScalar":
        """Parse ``p/q``, decimal, or ``a+bi`` (also ``a+bj``) forms."""
        text = text.strip().replace(" ", "")
        if not text:
            raise ValueError("empty scalar string")
        if text[-1] in "ij":
            m = _COMPLEX_RE.match(text)
            if not m:
                raise ValueError(f"cannot parse complex scalar {text!r}")
            re_part = m.group("re")
            im_part = m.group("im")
            if im_part is None:
                # forms like "2i" or "i": the whole leading part is imaginary
                im_part, re_part = re_part, None
                if im_part is None:
                    im_part = "1"
            if im_part in ("+", "-"):
                im_part += "1"
            re_q = _parse_real_text(re_part) if re_part else mpq(0)
            return cls(re_q, _parse_real_text(im_part))
        return cls(_parse_real_text(text))

    @classmethod
    def zero(cls) -> "ExactScalar":
        return cls(0)

    # -- predicates --------------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self._ap is None

    def is_zero(self) -> bool:
        if self.is_exact:
            return self._re == 0 and self._im == 0
        return self._ap == 0

    def is_real(self) -> bool:
        if self.is_exact:
            return self._im == 0
        return self._ap.imag.is_zero()

    def is_nonneg_integer(self) -> bool:
        if self.is_exact:
            return self._im == 0 and self._re.denominator == 1 and self._re >= 0
        return (
            self._ap.imag.is_zero()
            and gmpy2.is_integer(self._ap.real)
            and self._ap.real >= 0
        )

    def equals_integer(self, n: int) -> bool:
        if self.is_exact:
            return self._im == 0 and self._re == n
        return self._ap == n

    # -- exact views -------------------------------------------------------

    @property
    def real_rational(self) -> mpq:
        """Exact rational real part; requires the exact arm and im == 0."""
        if not self.is_exact:
            raise TypeError("scalar is not exactly rational")
        if self._im != 0:
            raise TypeError("scalar is not real")
        return self._re

    def rational_parts(self):
        if not self.is_exact:
            raise TypeError("scalar is not exactly rational")
        return self._re, self._im

    # -- conversion ---------------------------------------------------------

    def to_mpfr(self, prec: Union[PrecisionSpec, int]) -> mpfr:
        """Correctly rounded real value at the given precision (real scalars)."""
        bits = prec.bit_precision if isinstance(prec, PrecisionSpec) else int(prec)
        if not self.is_real():
            raise TypeError("scalar has a nonzero imaginary part")
        with context(bits):
            if self.is_exact:
                return mpfr(self._re)
            return mpfr(self._ap.real)

    def to_mpc(self, prec: Union[PrecisionSpec, int]) -> mpc:
        """Correctly rounded complex value at the given precision."""
        bits = prec.bit_precision if isinstance(prec, PrecisionSpec) else int(prec)
        with context(bits):
            if self.is_exact:
                return mpc(mpfr(self._re), mpfr(self._im))
            return mpc(self._ap)

    # -- exact arithmetic (falls back to the float arm when needed) --------

    def _binary(self, other, op):
        other = ExactScalar.from_value(other)
        if self.is_exact and other.is_exact:
            a_re, a_im = self._re, self._im
            b_re, b_im = other._re, other._im
            return ExactScalar(*op(a_re, a_im, b_re, b_im))
        bits = max(
            self._ap.precision[0] if self._ap is not None else 0,
            other._ap.precision[0] if other._ap is not None else 0,
            2 * WORD_BITS,
        )
        with context(bits):
            a, b = self.to_mpc(bits), other.to_mpc(bits)
            return ExactScalar(_ap=op.float_op(a, b))

    def __add__(self, other):
        def op(ar, ai, br, bi):
            return ar + br, ai + bi

        op.float_op = lambda a, b: a + b
        return self._binary(other, op)

    def __sub__(self, other):
        def op(ar, ai, br, bi):
            return ar - br, ai - bi

        op.float_op = lambda a, b: a - b
        return self._binary(other, op)

    def __mul__(self, other):
        def op(ar, ai, br, bi):
            return ar * br - ai * bi, ar * bi + ai * br

        op.float_op = lambda a, b: a * b
        return self._binary(other, op)

    def __truediv__(self, other):
        def op(ar, ai, br, bi):
            d = br * br + bi * bi
            if d == 0:
                raise ZeroDivisionError("division by exact zero scalar")
            return (ar * br + ai * bi) / d, (ai * br - ar * bi) / d

        op.float_op = lambda a, b: a / b
        return self._binary(other, op)

    def __neg__(self):
        if self.is_exact:
            return ExactScalar(-self._re, -self._im)
        return ExactScalar(_ap=-self._ap)

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, other):
        return ExactScalar.from_value(other).__sub__(self)

    def __rtruediv__(self, other):
        return ExactScalar.from_value(other).__truediv__(self)

    # -- equality / repr -----------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, (ExactScalar, int, float, complex, Fraction, mpq)):
            return NotImplemented
        other = ExactScalar.from_value(other)
        if self.is_exact and other.is_exact:
            return self._re == other._re and self._im == other._im
        if self.is_exact != other.is_exact:
            return False
        return self._ap == other._ap

    def __hash__(self):
        if self.is_exact:
            return hash((self._re, self._im))
        return hash(self._ap)

    def __repr__(self) -> str:
        return f"ExactScalar({self.to_text()!r})"

    def to_text(self) -> str:
        """Canonical text form: ``p/q`` / integer for exact reals, ``a+bi``
        for exact complex values, and a decimal form for the float arm."""
        if self.is_exact:
            if self._im == 0:
                return str(self._re)
            return f"{self._re}{'+' if self._im >= 0 else ''}{self._im}i"
        ap = self._ap
        digits = max(bits_to_digits(ap.precision[0]), 2)
        re_s = to_decimal_string(ap.real, digits)
        im_s = to_decimal_string(ap.imag, digits)
        if ap.imag.is_zero():
            return re_s
        sign = "+" if not im_s.startswith("-") else ""
        return f"{re_s}{sign}{im_s}i"


# --------------------------------------------------------------------------
# Decimal printing
# --------------------------------------------------------------------------


def to_decimal_string(x: mpfr, digits: int) -> str:
    """Print ``x`` with ``digits`` significant decimal digits.

    Parsing the result back at ``digits_to_bits(digits)`` bits and printing
    again reproduces the string, so values round-trip at the stated P.
    """
    if digits < 1:
        raise ValueError("digits must be >= 1")
    if x.is_zero():
        return "0"
    if not gmpy2.is_finite(x):
        return str(x)
    return f"{x:.{digits - 1}e}"


def complex_to_strings(z: mpc, digits: int) -> dict:
    """JSON-friendly ``{"re": ..., "im": ...}`` decimal form of ``z``."""
    return {
        "re": to_decimal_string(z.real, digits),
        "im": to_decimal_string(z.imag, digits),
    }
