"""What the fields cut out by rho must look like.

k is the degree ell+1 field fixed by the stabiliser of a point of P^1(F_ell),
K the degree ell^2-1 field fixed by the stabiliser of a nonzero vector.  With
tame ramification at p, the p-exponent of a discriminant is d minus the
number of inertia orbits, and the signature is read off from complex
conjugation acting with eigenvalues 1 and -1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import ffarith as ff
from .errors import NotSquarefree, PreconditionFailed
from .nfresidue import reduce, resultant_exact

ZERO_TRACE_PATTERN = "degrees in {1, 2}, at least one 2"


@dataclass(frozen=True)
class FieldPrediction:
    name: str
    degree: int
    signature: tuple | None
    ramified_within: tuple
    p: int
    p_exponent: int
    tame_at_p: bool
    galois_closure_group: str
    projective_image: str
    notes: tuple = field(default=())


@dataclass(frozen=True)
class FrobFilter:
    r: int
    a_r_zero: bool
    implied_pattern: str | None


@dataclass(frozen=True)
class Compatible:
    primes_checked: tuple


@dataclass(frozen=True)
class Incompatible:
    witness_r: int
    pattern: tuple


def predict_fields(f, lam, p: int, image) -> tuple[FieldPrediction, FieldPrediction]:
    if image is None:
        raise PreconditionFailed("field predictions need a certified image")
    ell, N = lam.ell, f.level
    ram = tuple(ff.prime_divisors(ell * N))
    proj = image.projective_name(ell) if ell > 2 else f"PGL2(F_{ell})"
    common = (
        "ramification at p is tame (assumed, as in the large-image argument)",
        f"ramification at {ell} is probably wild",
    )
    if ell == 2:
        sig_k = sig_K = None
    else:
        sig_k = (2, (ell - 1) // 2)
        sig_K = (ell - 1, ell * (ell - 1) // 2)
    k = FieldPrediction("k", ell + 1, sig_k, ram, p, (ell + 1) - 2, True, proj, proj, common)
    K = FieldPrediction(
        "K", ell * ell - 1, sig_K, ram, p, (ell * ell - 1) - 2 * (ell - 1), True,
        image.group_name(ell), proj, common + ("primes above p do not ramify in K/k",),
    )
    for pred in (k, K):
        if pred.signature is not None and pred.signature[0] + 2 * pred.signature[1] != pred.degree:
            raise AssertionError("signature does not add up to the degree")
    return k, K


def frob_filter(f, lam, r: int) -> FrobFilter:
    if (lam.ell * f.level) % r == 0:
        raise PreconditionFailed(f"{r} divides ell N")
    zero = reduce(f.a(r), lam) == 0
    return FrobFilter(r, zero, ZERO_TRACE_PATTERN if zero else None)


def poly_discriminant(coeffs) -> int:
    """disc(T) = (-1)^(n(n-1)/2) Res(T, T') / lc(T), integer coefficients lowest first."""
    n = len(coeffs) - 1
    dT = [i * c for i, c in enumerate(coeffs)][1:]
    res = Fraction(resultant_exact(coeffs, dT))
    out = (-1) ** (n * (n - 1) // 2) * res / coeffs[-1]
    return int(out)


def pattern_ok(pattern) -> bool:
    return set(pattern) <= {1, 2} and 2 in pattern


def check_candidate_poly(T_k, f, lam, prime_bound: int):
    ell, N = lam.ell, f.level
    T_k = tuple(int(c) for c in T_k)
    if len(T_k) - 1 != ell + 1:
        raise PreconditionFailed(f"T_k has degree {len(T_k) - 1}, expected {ell + 1}")
    disc = poly_discriminant(T_k)
    checked = []
    for r in ff.primes_up_to(min(prime_bound, f.an_bound)):
        if (ell * N * disc) % r == 0 or T_k[-1] % r == 0:
            continue
        if reduce(f.a(r), lam):
            continue
        try:
            pattern = ff.factor_degree_pattern(T_k, r)
        except NotSquarefree:
            continue
        checked.append(r)
        if not pattern_ok(pattern):
            return Incompatible(r, tuple(pattern))
    return Compatible(tuple(checked))


def search_filter(k: FieldPrediction, filters) -> dict:
    """A database query document for the degree ell+1 field."""
    return {
        "degree": str(k.degree),
        "signature": [str(x) for x in k.signature] if k.signature else None,
        "ramified_within": [str(q) for q in k.ramified_within],
        "p": str(k.p),
        "p_exponent": str(k.p_exponent),
        "group": k.galois_closure_group,
        "frob_constraints": [
            {"r": str(flt.r), "pattern": flt.implied_pattern} for flt in filters if flt.a_r_zero
        ],
    }
