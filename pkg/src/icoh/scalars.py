"""Exact arithmetic over the Gaussian rationals Q[i].

Every coefficient in the engine is a ``GaussScalar``: a pair of
``fractions.Fraction`` values (real and imaginary part).  There is no
floating point anywhere; equality is exact and hashing is well defined.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

Rational = Fraction
RationalLike = Union[int, Fraction]
ScalarLike = Union[int, Fraction, "GaussScalar"]


class GaussScalar:
    """An element a + b*i of Q[i], with a, b exact rationals."""

    __slots__ = ("re", "im")

    re: Fraction
    im: Fraction

    def __init__(self, re: RationalLike = 0, im: RationalLike = 0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("GaussScalar is immutable")

    # -- coercion -----------------------------------------------------
    @staticmethod
    def coerce(x: ScalarLike) -> "GaussScalar":
        if isinstance(x, GaussScalar):
            return x
        if isinstance(x, (int, Fraction)):
            return GaussScalar(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to GaussScalar")

    # -- predicates ---------------------------------------------------
    def is_zero(self) -> bool:
        return not self.re and not self.im

    def is_real(self) -> bool:
        return not self.im

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- ring/field operations ----------------------------------------
    def __add__(self, other: ScalarLike) -> "GaussScalar":
        o = GaussScalar.coerce(other)
        return GaussScalar(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other: ScalarLike) -> "GaussScalar":
        o = GaussScalar.coerce(other)
        return GaussScalar(self.re - o.re, self.im - o.im)

    def __rsub__(self, other: ScalarLike) -> "GaussScalar":
        o = GaussScalar.coerce(other)
        return GaussScalar(o.re - self.re, o.im - self.im)

    def __mul__(self, other: ScalarLike) -> "GaussScalar":
        o = GaussScalar.coerce(other)
        return GaussScalar(self.re * o.re - self.im * o.im,
                           self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other: ScalarLike) -> "GaussScalar":
        o = GaussScalar.coerce(other)
        n = o.re * o.re + o.im * o.im
        if not n:
            raise ZeroDivisionError("division by zero in Q[i]")
        return GaussScalar((self.re * o.re + self.im * o.im) / n,
                           (self.im * o.re - self.re * o.im) / n)

    def __rtruediv__(self, other: ScalarLike) -> "GaussScalar":
        return GaussScalar.coerce(other) / self

    def __neg__(self) -> "GaussScalar":
        return GaussScalar(-self.re, -self.im)

    def __pos__(self) -> "GaussScalar":
        return self

    def inverse(self) -> "GaussScalar":
        return ONE / self

    def conj(self) -> "GaussScalar":
        return GaussScalar(self.re, -self.im)

    def norm_sq(self) -> Fraction:
        """|x|^2 = re^2 + im^2, an exact nonnegative rational."""
        return self.re * self.re + self.im * self.im

    # -- comparison / hashing ------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = GaussScalar(other)
        if not isinstance(other, GaussScalar):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self) -> int:
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    # -- rendering ------------------------------------------------------
    def __str__(self) -> str:
        return render_scalar(self)

    def __repr__(self) -> str:
        return f"GaussScalar({self.re!r}, {self.im!r})"


ZERO = GaussScalar(0)
ONE = GaussScalar(1)
MINUS_ONE = GaussScalar(-1)
I = GaussScalar(0, 1)
HALF_I = GaussScalar(0, Fraction(1, 2))


def gauss(re: RationalLike = 0, im: RationalLike = 0) -> GaussScalar:
    return GaussScalar(re, im)


def two_re(x: GaussScalar) -> Fraction:
    """2*Re(x) without leaving the rationals."""
    return 2 * x.re


def _render_imag(im: Fraction) -> str:
    if im == 1:
        return "i"
    if im == -1:
        return "-i"
    return f"{im}*i"


def render_scalar(x: GaussScalar) -> str:
    """Canonical text form: '0', '3/2', '-i', '2*i', '1-2/3*i', ..."""
    if x.is_zero():
        return "0"
    if not x.im:
        return str(x.re)
    if not x.re:
        return _render_imag(x.im)
    sign = "+" if x.im > 0 else ""
    return f"{x.re}{sign}{_render_imag(x.im)}"
