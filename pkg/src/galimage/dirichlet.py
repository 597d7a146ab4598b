"""Dirichlet characters carried inside a coefficient field.

A character is given by its values on generators of (Z/N)^x, each value an
element of the newform's coefficient field.  Everything else (evaluation,
conductor, descent) is derived from those values, never from a separately
chosen embedding of the roots of unity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

from . import ffarith as ff
from .errors import NoDescent, NotCoprime, OrderCollision, ValidationFailed
from .nfresidue import NFElement, NumberFieldDesc, ResiduePrime, reduce

MAX_TABLE = 2_000_000


@dataclass(frozen=True)
class CharacterDesc:
    modulus: int
    order: int
    generators: tuple
    values: tuple
    conductor_hint: int | None = None
    field: NumberFieldDesc = field(default=NumberFieldDesc((0, 1)), compare=False)

    def __post_init__(self):
        if self.modulus < 1:
            raise ValidationFailed("modulus", f"{self.modulus} is not positive")
        if len(self.generators) != len(self.values):
            raise ValidationFailed("char_values", "one value per generator")
        for g, v in zip(self.generators, self.values):
            if math.gcd(g, self.modulus) != 1:
                raise ValidationFailed("char_values", f"generator {g} is not a unit mod {self.modulus}")
            if v ** self.order != v.field.one():
                raise ValidationFailed("char_order", f"value at {g} is not an {self.order}-th root of unity")
        if self.conductor_hint is not None and self.conductor_hint != self.conductor:
            raise ValidationFailed(
                "char_conductor", f"stated conductor {self.conductor_hint}, recomputed {self.conductor}"
            )

    @classmethod
    def trivial(cls, modulus: int, fld: NumberFieldDesc | None = None) -> "CharacterDesc":
        fld = fld or NumberFieldDesc((0, 1))
        gens = tuple(ff.unit_generators(modulus)) if modulus > 2 else ()
        return cls(modulus, 1, gens, tuple(fld.one() for _ in gens), None, fld)

    @property
    def is_trivial(self) -> bool:
        return all(v == v.field.one() for v in self.values)

    # exponent vectors: x = prod g_i^{e_i} mod N
    @cached_property
    def _table(self) -> dict:
        N = self.modulus
        if N <= 2:
            return {0 if N == 1 else 1: ()}
        size = ff.euler_phi(N)
        if size > MAX_TABLE:
            raise ValidationFailed("modulus", f"(Z/{N})^x too large to tabulate ({size} elements)")
        zero = (0,) * len(self.generators)
        table = {1 % N: zero}
        frontier = [1 % N]
        while frontier:
            nxt = []
            for x in frontier:
                ex = table[x]
                for i, g in enumerate(self.generators):
                    y = x * g % N
                    if y not in table:
                        table[y] = ex[:i] + (ex[i] + 1,) + ex[i + 1:]
                        nxt.append(y)
            frontier = nxt
        if len(table) != size:
            raise ValidationFailed("char_values", f"generators {self.generators} do not generate (Z/{N})^x")
        return table

    @cached_property
    def _value_orders(self) -> tuple:
        out = []
        for v in self.values:
            d = next(d for d in ff.divisors(self.order) if v ** d == v.field.one())
            out.append(d)
        return out

    def _exponents(self, x: int) -> tuple:
        N = self.modulus
        if math.gcd(x, N) != 1:
            raise NotCoprime(f"{x} is not coprime to the modulus {N}")
        ex = self._table[x % N]
        return tuple(e % d for e, d in zip(ex, self._value_orders))

    def value(self, x: int) -> NFElement:
        out = self.field.one() if not self.values else self.values[0].field.one()
        for v, e in zip(self.values, self._exponents(x)):
            if e:
                out = out * v ** e
        return out

    def is_one(self, x: int) -> bool:
        return not any(self._exponents(x))

    @cached_property
    def conductor(self) -> int:
        if self.is_trivial:
            return 1
        N = self.modulus
        nontrivial = [x for x in self._table if not self.is_one(x)]
        for d in ff.divisors(N):
            if all(x % d != 1 % d for x in nontrivial):
                return d
        return N

    def kernel(self) -> frozenset:
        return frozenset(x for x in self._table if self.is_one(x))


def eval_mod_lambda(chi: CharacterDesc, x: int, lam: ResiduePrime) -> int:
    if math.gcd(x, chi.modulus) != 1:
        raise NotCoprime(f"{x} is not coprime to {chi.modulus}")
    if (lam.ell - 1) % chi.order:
        raise OrderCollision(f"character order {chi.order} does not divide {lam.ell} - 1")
    if chi.is_trivial:
        return 1 % lam.ell
    return reduce(chi.value(x), lam)


def p_part_trivial(chi: CharacterDesc, p: int) -> bool:
    return chi.conductor % p != 0


def _unit_lift(g: int, small: int, big: int) -> int:
    """A unit mod big congruent to g mod small (small | big)."""
    x = g % small if small > 1 else 1
    while math.gcd(x, big) != 1:
        x += small
    return x


def _order_of(values, bound: int) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, next(d for d in ff.divisors(bound) if v ** d == v.field.one()))
    return out


def descend(chi: CharacterDesc, new_modulus: int) -> CharacterDesc:
    if chi.modulus % new_modulus:
        raise NoDescent(f"{new_modulus} does not divide {chi.modulus}")
    if new_modulus % chi.conductor:
        raise NoDescent(f"conductor {chi.conductor} does not divide {new_modulus}")
    fld = chi.values[0].field if chi.values else chi.field
    gens = tuple(ff.unit_generators(new_modulus)) if new_modulus > 2 else ()
    vals = tuple(chi.value(_unit_lift(g, new_modulus, chi.modulus)) for g in gens)
    return CharacterDesc(new_modulus, _order_of(vals, chi.order), gens, vals, None, fld)


def prime_to_p_part(chi: CharacterDesc, p: int) -> CharacterDesc:
    """The component of chi on the prime-to-p factor of its modulus."""
    N = chi.modulus
    pe = 1
    while N % (pe * p) == 0:
        pe *= p
    rest = N // pe
    fld = chi.values[0].field if chi.values else chi.field
    gens = tuple(ff.unit_generators(rest)) if rest > 2 else ()
    # lift each generator to a unit that is 1 mod the p-part
    vals = []
    for g in gens:
        x = g if pe == 1 else (g * pe * pow(pe, -1, rest) + rest * pow(rest, -1, pe)) % N
        vals.append(chi.value(x))
    return CharacterDesc(rest, _order_of(vals, chi.order), gens, tuple(vals), None, fld)


def parity(chi: CharacterDesc) -> int:
    if chi.modulus <= 2:
        return 1
    v = chi.value(chi.modulus - 1)
    if v == v.field.one():
        return 1
    if v == -v.field.one():
        return -1
    raise ValidationFailed("parity", "chi(-1) is neither 1 nor -1")


def same_orbit(a: CharacterDesc, b: CharacterDesc) -> bool:
    """Galois-conjugate characters are exactly those with equal kernels."""
    if a.modulus != b.modulus or a.order != b.order:
        return False
    if a.is_trivial or b.is_trivial:
        return a.is_trivial and b.is_trivial
    return a.kernel() == b.kernel()
