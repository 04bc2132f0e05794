"""Coefficient backends: exact Gaussian rationals and floating complex.

The exact backend stores coefficients as pairs of arbitrary-precision
rationals (real and imaginary part), so recombination identities can be
checked with zero tolerance.  The floating backend is plain ``complex``
with a declared comparison tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational


@dataclass(frozen=True)
class QQi:
    """Gaussian rational: re + im*i with Fraction parts."""

    re: Fraction
    im: Fraction

    def __add__(self, other: "QQi") -> "QQi":
        return QQi(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "QQi") -> "QQi":
        return QQi(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "QQi":
        return QQi(-self.re, -self.im)

    def __mul__(self, other: "QQi") -> "QQi":
        return QQi(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __truediv__(self, other: "QQi") -> "QQi":
        d = other.re * other.re + other.im * other.im
        if d == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return QQi(
            (self.re * other.re + self.im * other.im) / d,
            (self.im * other.re - self.re * other.im) / d,
        )

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __abs__(self) -> float:
        return abs(complex(self))

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    @staticmethod
    def of(value) -> "QQi":
        if isinstance(value, QQi):
            return value
        if isinstance(value, Rational):
            return QQi(Fraction(value), Fraction(0))
        if isinstance(value, complex):
            return QQi(Fraction(value.real), Fraction(value.imag))
        if isinstance(value, float):
            return QQi(Fraction(value), Fraction(0))
        raise TypeError(f"cannot build Gaussian rational from {value!r}")


QQI_ZERO = QQi(Fraction(0), Fraction(0))
QQI_ONE = QQi(Fraction(1), Fraction(0))


@dataclass(frozen=True)
class Backend:
    """Coefficient arithmetic tag: 'exact' or 'floating' with tolerance eps."""

    tag: str
    eps: float = 0.0

    def __post_init__(self):
        if self.tag not in ("exact", "floating"):
            raise ValueError(f"unknown backend tag {self.tag!r}")
        if self.tag == "exact" and self.eps != 0.0:
            raise ValueError("exact backend has zero tolerance by definition")
        if self.eps < 0:
            raise ValueError("tolerance must be non-negative")

    @property
    def exact(self) -> bool:
        return self.tag == "exact"

    def coerce(self, value):
        """Bring a scalar into this backend's coefficient type."""
        if self.exact:
            return QQi.of(value)
        if isinstance(value, QQi):
            return complex(value)
        return complex(value)

    def zero(self):
        return QQI_ZERO if self.exact else 0j

    def one(self):
        return QQI_ONE if self.exact else 1 + 0j

    def is_zero(self, value) -> bool:
        """Structural zero test used for canonicalization (no tolerance)."""
        if self.exact:
            return value.is_zero()
        return value == 0

    def is_negligible(self, value, scale: float = 1.0) -> bool:
        """Tolerance-aware zero test (relative to ``scale``)."""
        if self.exact:
            return value.is_zero()
        return abs(value) <= self.eps * max(1.0, scale)


EXACT = Backend("exact", 0.0)


def floating(eps: float = 1e-12) -> Backend:
    return Backend("floating", eps)
