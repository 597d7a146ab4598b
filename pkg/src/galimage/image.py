"""The image of rho once it is known to contain SL2(F_ell).

G is the preimage under det of the value group Delta of det rho, so it is
pinned down by Delta alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import ffarith as ff
from .dirichlet import descend, eval_mod_lambda, p_part_trivial
from .errors import PreconditionFailed, ValidationFailed
from .nfresidue import ResiduePrime, reduce

ENUMERATION_CAP = 10 ** 7
FAST_PATH_ABOVE = 200_000


@dataclass(frozen=True)
class ImageDescription:
    M: int
    delta: tuple
    delta_order: int
    group_order: int
    is_full: bool
    projective: str
    forced_mode: bool

    def group_name(self, ell: int) -> str:
        if self.is_full:
            return f"GL2(F_{ell})"
        return f"{{g in GL2(F_{ell}) : det g in Delta}}"

    def projective_name(self, ell: int) -> str:
        return f"{self.projective}2(F_{ell})"


def group_order(ell: int, delta_order: int) -> int:
    if (ell - 1) % delta_order:
        raise ValidationFailed("delta order", f"{delta_order} does not divide {ell} - 1")
    return ell * (ell - 1) * (ell + 1) * delta_order


def subgroup_generated(gens, ell: int) -> tuple:
    """Subgroup of F_ell^x generated by gens (cyclic, so of order lcm of orders)."""
    order = 1
    for g in gens:
        order = math.lcm(order, ff.multiplicative_order(g, ell))
    if ell == 2:
        return (1,)
    z = ff.primitive_root(ell)
    h = pow(z, (ell - 1) // order, ell)
    return tuple(sorted(pow(h, e, ell) for e in range(order)))


def check_subgroup(delta, ell: int) -> None:
    s = set(delta)
    if 1 not in s:
        raise ValidationFailed("delta subgroup", "1 missing")
    for a in s:
        if pow(a, -1, ell) not in s:
            raise ValidationFailed("delta subgroup", f"inverse of {a} missing")
        for b in s:
            if a * b % ell not in s:
                raise ValidationFailed("delta subgroup", f"{a}*{b} not in Delta")


def _det_value(x: int, k: int, chi_small, lam: ResiduePrime) -> int:
    ell = lam.ell
    return pow(x, k - 1, ell) * eval_mod_lambda(chi_small, x % chi_small.modulus, lam) % ell


def delta_by_enumeration(M: int, k: int, chi_small, lam: ResiduePrime) -> tuple:
    if M > ENUMERATION_CAP:
        raise ValidationFailed("enumeration cap", f"M = {M} exceeds {ENUMERATION_CAP}")
    vals = {_det_value(x, k, chi_small, lam) for x in range(1, M + 1) if math.gcd(x, M) == 1}
    return tuple(sorted(vals))


def delta_by_generators(M: int, k: int, chi_small, lam: ResiduePrime) -> tuple:
    gens = ff.unit_generators(M) if M > 2 else [1]
    return subgroup_generated([_det_value(g, k, chi_small, lam) for g in gens] or [1], lam.ell)


def forced_delta(f, lam: ResiduePrime) -> tuple:
    """x^(k-1) for x in F_ell^x together with the reduced nebentypus values."""
    ell = lam.ell
    z = ff.primitive_root(ell) if ell > 2 else 1
    chi = f.nebentypus
    gens = [pow(z, f.weight - 1, ell)]
    gens += [reduce(v, lam) for v in chi.values]
    return subgroup_generated(gens, ell)


def compute_image(f, lam: ResiduePrime, p: int, certified: bool, forced: bool | None = None) -> ImageDescription:
    if not certified:
        raise PreconditionFailed("large image has not been certified")
    ell, N = lam.ell, f.level
    M = math.lcm(ell, N // p)
    if forced is None:
        forced = not p_part_trivial(f.nebentypus, p)
    if forced:
        delta = forced_delta(f, lam)
    else:
        chi_small = descend(f.nebentypus, N // p)
        if M <= FAST_PATH_ABOVE:
            delta = delta_by_enumeration(M, f.weight, chi_small, lam)
        else:
            delta = delta_by_generators(M, f.weight, chi_small, lam)
    check_subgroup(delta, ell)
    fld = ff.PrimeField(ell)
    if ell == 2:
        projective, is_full = "PSL=PGL", True
    else:
        is_full = len(delta) == ell - 1
        projective = "PSL" if all(ff.is_square(a, fld) for a in delta) else "PGL"
    return ImageDescription(M, delta, len(delta), group_order(ell, len(delta)), is_full, projective, forced)
