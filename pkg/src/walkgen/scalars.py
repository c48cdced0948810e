"""Scalar helpers for the exact and floating backends.

Exact scalars are :class:`fractions.Fraction` when real and
:class:`GaussianRational` when they carry an imaginary part.  Every
arithmetic result is normalised, so purely real computations never leave
``Fraction``.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational

from .errors import NotASquareError, UsageError

__all__ = [
    "GaussianRational",
    "gauss",
    "to_exact",
    "to_float",
    "exact_abs",
    "exact_sqrt",
    "is_real",
    "format_scalar",
    "parse_scalar",
]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {type(x).__name__} to Fraction")


class GaussianRational:
    """Complex number with rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=0):
        object.__setattr__(self, "re", _frac(re))
        object.__setattr__(self, "im", _frac(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    def __reduce__(self):
        return (GaussianRational, (self.re, self.im))

    @property
    def real(self) -> Fraction:
        return self.re

    @property
    def imag(self) -> Fraction:
        return self.im

    def conjugate(self):
        return gauss(self.re, -self.im)

    def norm(self) -> Fraction:
        """Squared modulus, exact."""
        return self.re * self.re + self.im * self.im

    @staticmethod
    def _parts(other):
        if isinstance(other, GaussianRational):
            return other.re, other.im
        if isinstance(other, (int, Fraction)):
            return other, 0
        return None

    def __add__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return gauss(self.re + p[0], self.im + p[1])

    __radd__ = __add__

    def __sub__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return gauss(self.re - p[0], self.im - p[1])

    def __rsub__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return gauss(p[0] - self.re, p[1] - self.im)

    def __mul__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        a, b = self.re, self.im
        c, d = p
        return gauss(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        c, d = p
        den = c * c + d * d
        if den == 0:
            raise ZeroDivisionError("division by zero")
        a, b = self.re, self.im
        return gauss((a * c + b * d) / den, (b * c - a * d) / den)

    def __rtruediv__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        c, d = p
        a, b = self.re, self.im
        den = self.norm()
        return gauss((c * a + d * b) / den, (d * a - c * b) / den)

    def __neg__(self):
        return gauss(-self.re, -self.im)

    def __pos__(self):
        return self

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        p = self._parts(other)
        if p is None:
            if isinstance(other, complex):
                return complex(self) == other
            return NotImplemented
        return self.re == p[0] and self.im == p[1]

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self) -> float:
        return math.hypot(self.re, self.im)

    def __repr__(self):
        return f"GaussianRational({self.re!s}, {self.im!s})"

    def __str__(self):
        return format_scalar(self)


def gauss(re, im=0):
    """Normalised exact complex: a ``Fraction`` when ``im == 0``."""
    im = _frac(im)
    if im == 0:
        return _frac(re)
    return GaussianRational(re, im)


def to_exact(x):
    """Convert ``x`` to an exact scalar (Fraction or GaussianRational).

    Floats are converted to the exact binary value they hold, so ``0.5``
    becomes ``1/2`` but ``0.1`` becomes a large dyadic fraction.
    """
    if isinstance(x, GaussianRational):
        return gauss(x.re, x.im)
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        return Fraction(int(x))
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise UsageError(f"non-finite value {x!r} has no exact form")
        return Fraction(x)
    if isinstance(x, complex):
        return gauss(to_exact(x.real), to_exact(x.imag))
    if isinstance(x, str):
        return parse_scalar(x, exact=True)
    if hasattr(x, "item"):  # numpy scalar
        return to_exact(x.item())
    if isinstance(x, Rational):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact scalar")


def to_float(x):
    """Convert to ``float`` (real values) or ``complex``."""
    if isinstance(x, GaussianRational):
        return complex(x)
    if isinstance(x, complex):
        return x if x.imag != 0 else x.real
    if hasattr(x, "item"):
        return to_float(x.item())
    return float(x)


def is_real(x) -> bool:
    if isinstance(x, GaussianRational):
        return x.im == 0
    if isinstance(x, complex):
        return x.imag == 0
    return True


def exact_abs(x):
    """|x| exactly when possible (reals), otherwise a float."""
    if isinstance(x, GaussianRational):
        r = _rational_sqrt(x.norm())
        return r if r is not None else abs(x)
    if isinstance(x, complex):
        return abs(x)
    return abs(x)


def _rational_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def exact_sqrt(x):
    """Square root of an exact scalar with the canonical branch.

    The returned root has positive real part, or zero real part and
    nonnegative imaginary part.  Raises :class:`NotASquareError` when the
    root is not a Gaussian rational.
    """
    x = to_exact(x)
    if isinstance(x, Fraction):
        if x >= 0:
            r = _rational_sqrt(x)
            if r is None:
                raise NotASquareError(f"{x} is not the square of a rational")
            return r
        r = _rational_sqrt(-x)
        if r is None:
            raise NotASquareError(f"{x} is not the square of a Gaussian rational")
        return gauss(0, r)
    # (a + bi)^2 = re + im i  =>  a^2 = (re + |x|)/2, b = im / (2a)
    m = _rational_sqrt(x.norm())
    if m is None:
        raise NotASquareError(f"{x} is not the square of a Gaussian rational")
    a = _rational_sqrt((x.re + m) / 2)
    if a is None or a == 0:
        raise NotASquareError(f"{x} is not the square of a Gaussian rational")
    return gauss(a, x.im / (2 * a))


def format_scalar(x) -> str:
    """Text form used in CSV/JSON output; inverse of :func:`parse_scalar`."""
    if isinstance(x, GaussianRational):
        sign = "-" if x.im < 0 else "+"
        return f"{x.re}{sign}{abs(x.im)}j"
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, complex):
        if x.imag == 0:
            return repr(float(x.real))
        return repr(complex(x)).strip("()")
    if isinstance(x, float):
        return repr(float(x))
    if isinstance(x, int):
        return str(int(x))
    return format_scalar(to_float(x))


_EXACT_COMPLEX = re.compile(r"^\s*([+-]?\d+(?:/\d+)?)([+-])(\d+(?:/\d+)?)j\s*$")


def parse_scalar(text: str, exact: bool = True):
    """Parse ``"3/8"``, ``"1/2-3/4j"``, ``"0.25"`` or ``"0.5+1j"``."""
    s = text.strip()
    m = _EXACT_COMPLEX.match(s)
    if m:
        re_part = Fraction(m.group(1))
        im_part = Fraction(m.group(3))
        if m.group(2) == "-":
            im_part = -im_part
        z = gauss(re_part, im_part)
        return z if exact else to_float(z)
    if s.endswith("j"):
        z = complex(s)
        return to_exact(z) if exact else to_float(z)
    if exact:
        return Fraction(s)
    return float(Fraction(s)) if "/" in s else float(s)
