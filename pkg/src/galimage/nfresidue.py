"""Coefficient fields Q(beta) = Q[x]/(m), their degree-one primes, and reduction.

Elements are stored the way modular-forms databases serialise Hecke
eigenvalues: an integer polynomial in beta over a single positive denominator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from . import ffarith as ff
from .errors import DenominatorAtEll, IndexObstruction, ValidationFailed


def _trim(coeffs):
    out = list(coeffs)
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def int_poly_mul(a, b):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def int_poly_rem_monic(a, m):
    """Remainder of an integer polynomial modulo a monic one (stays integral)."""
    a = list(a)
    d = len(m) - 1
    for i in range(len(a) - 1, d - 1, -1):
        c = a[i]
        if c:
            for j in range(d + 1):
                a[i - d + j] -= c * m[j]
    return _trim(a[:d])


def resultant_exact(a, b) -> int | Fraction:
    """Res(a, b) over Q by the Euclidean algorithm on Fractions."""
    a = _trim(Fraction(c) for c in a)
    b = _trim(Fraction(c) for c in b)
    if not a or not b:
        return 0
    res = Fraction(1)
    while True:
        da, db = len(a) - 1, len(b) - 1
        if db == 0:
            out = res * b[0] ** da
            return int(out) if out.denominator == 1 else out
        r = list(a)
        for i in range(len(r) - 1, db - 1, -1):
            c = r[i] / b[-1]
            if c:
                for j in range(db + 1):
                    r[i - db + j] -= c * b[j]
        r = _trim(r[:db])
        if not r:
            return 0
        if da % 2 and db % 2:
            res = -res
        res *= b[-1] ** (da - (len(r) - 1))
        a, b = b, r


@dataclass(frozen=True)
class NumberFieldDesc:
    """Q[x]/(min_poly) for a monic integer polynomial, lowest degree first."""

    min_poly: tuple

    def __post_init__(self):
        object.__setattr__(self, "min_poly", tuple(int(c) for c in self.min_poly))
        if len(self.min_poly) < 2 or self.min_poly[-1] != 1:
            raise ValidationFailed("monic", f"field polynomial {self.min_poly} must be monic of degree >= 1")

    @property
    def degree(self) -> int:
        return len(self.min_poly) - 1

    @cached_property
    def discriminant(self) -> int:
        m = self.min_poly
        d = self.degree
        dm = tuple(i * c for i, c in enumerate(m))[1:]
        sign = -1 if (d * (d - 1) // 2) % 2 else 1
        return sign * int(resultant_exact(m, dm))

    def element(self, numerator, denominator=1) -> "NFElement":
        return NFElement(self, tuple(numerator), denominator)

    def zero(self):
        return NFElement(self, (), 1)

    def one(self):
        return NFElement(self, (1,), 1)

    def generator(self):
        return NFElement(self, (0, 1), 1)


@dataclass(frozen=True)
class NFElement:
    """numerator(beta) / denominator with gcd(content, denominator) = 1."""

    field: NumberFieldDesc
    numerator: tuple
    denominator: int = 1

    def __post_init__(self):
        num = tuple(int(c) for c in self.numerator)
        den = int(self.denominator)
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            num, den = tuple(-c for c in num), -den
        if len(_trim(num)) > self.field.degree:
            num = int_poly_rem_monic(num, self.field.min_poly)
        num = _trim(num)
        g = math.gcd(den, *num) if num else den
        object.__setattr__(self, "numerator", tuple(c // g for c in num))
        object.__setattr__(self, "denominator", den // g)

    @classmethod
    def _coerce(cls, field, other):
        if isinstance(other, NFElement):
            if other.field != field:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, int):
            return NFElement(field, (other,), 1)
        if isinstance(other, Fraction):
            return NFElement(field, (other.numerator,), other.denominator)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(self.field, other)
        if other is NotImplemented:
            return other
        n = max(len(self.numerator), len(other.numerator))
        a = self.numerator + (0,) * (n - len(self.numerator))
        b = other.numerator + (0,) * (n - len(other.numerator))
        num = tuple(x * other.denominator + y * self.denominator for x, y in zip(a, b))
        return NFElement(self.field, num, self.denominator * other.denominator)

    __radd__ = __add__

    def __neg__(self):
        return NFElement(self.field, tuple(-c for c in self.numerator), self.denominator)

    def __sub__(self, other):
        other = self._coerce(self.field, other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(self.field, other)
        if other is NotImplemented:
            return other
        num = int_poly_rem_monic(int_poly_mul(self.numerator, other.numerator), self.field.min_poly)
        return NFElement(self.field, num, self.denominator * other.denominator)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers are not supported")
        out = self.field.one()
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def is_zero(self) -> bool:
        return not self.numerator

    def is_rational(self) -> bool:
        return len(self.numerator) <= 1

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return Fraction(self.numerator[0] if self.numerator else 0, self.denominator)

    def norm(self) -> Fraction:
        """Exact norm down to Q via Res(m, numerator) / denominator^degree."""
        res = resultant_exact(self.field.min_poly, self.numerator)
        return Fraction(res) / self.denominator ** self.field.degree

    def __repr__(self):
        terms = [f"{c}*b^{i}" if i else str(c) for i, c in enumerate(self.numerator) if c] or ["0"]
        body = " + ".join(terms)
        return f"({body})/{self.denominator}" if self.denominator != 1 else body


@dataclass(frozen=True)
class ResiduePrime:
    """A degree-one prime (ell, beta - root) of the field."""

    ell: int
    root: int
    field: NumberFieldDesc

    def __post_init__(self):
        if not ff.is_prime(self.ell):
            raise ValidationFailed("ell prime", f"{self.ell} is not prime")
        object.__setattr__(self, "root", self.root % self.ell)
        m = ff.poly(self.field.min_poly, self.ell)
        if ff.poly_eval(m, self.root, self.ell):
            raise ValidationFailed("root of m", f"m({self.root}) != 0 mod {self.ell}")
        if self.field.discriminant % self.ell == 0:
            raise IndexObstruction(
                f"{self.ell} divides disc(m) = {self.field.discriminant}; "
                "degree-one primes cannot be read off from roots of m"
            )
        if ff.poly_eval(ff.poly_deriv(m, self.ell), self.root, self.ell) == 0:
            raise ValidationFailed("simple root", f"{self.root} is a repeated root mod {self.ell}")

    @property
    def gf(self) -> ff.PrimeField:
        return ff.PrimeField(self.ell)

    def label(self) -> str:
        return f"({self.ell}, b - {self.root})"


def degree_one_primes(field: NumberFieldDesc, ell: int) -> list[ResiduePrime]:
    if field.discriminant % ell == 0:
        raise IndexObstruction(f"{ell} divides disc(m) = {field.discriminant}")
    return [ResiduePrime(ell, c, field) for c in ff.roots(ff.poly(field.min_poly, ell), ell)]


def reduce(elem: NFElement, lam: ResiduePrime) -> int:
    ell = lam.ell
    if elem.denominator % ell == 0:
        raise DenominatorAtEll(f"denominator {elem.denominator} of {elem!r} is divisible by {ell}")
    return ff.poly_eval(ff.poly(elem.numerator, ell), lam.root, ell) * pow(elem.denominator, -1, ell) % ell


def reduced_poly(elem: NFElement, ell: int) -> tuple:
    """The numerator times denominator^-1 as a polynomial over F_ell."""
    if elem.denominator % ell == 0:
        raise DenominatorAtEll(f"denominator {elem.denominator} of {elem!r} is divisible by {ell}")
    return ff.poly_scale(ff.poly(elem.numerator, ell), pow(elem.denominator, -1, ell), ell)


def shifted_resultant(elem: NFElement, shift: int, ell: int, scale: int = 1) -> int:
    """Res(m, scale * g - shift) mod ell, g the reduction of elem's polynomial."""
    g = ff.poly_scale(reduced_poly(elem, ell), scale, ell)
    h = ff.poly_sub(g, (shift % ell,), ell)
    return ff.resultant(ff.poly(elem.field.min_poly, ell), h, ell)


def norm_shifted(elem: NFElement, shift: int, ell: int) -> bool:
    """True iff ell divides Norm(elem - shift); evaluated entirely in F_ell[x]."""
    return shifted_resultant(elem, shift, ell) == 0
