"""Irreducibility witnesses: a prime r whose Frobenius charpoly is irreducible mod lambda."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import ffarith as ff
from .dirichlet import eval_mod_lambda
from .errors import InsufficientCoefficients, PreconditionFailed
from .nfresidue import ResiduePrime, reduce

DEFAULT_CONFIDENCE_BITS = 40


@dataclass(frozen=True)
class Attempt:
    r: int
    t: int
    d: int
    irreducible: bool
    roots: tuple = ()


@dataclass(frozen=True)
class WitnessReport:
    witness_r: int
    charpoly: tuple           # (t, d): x^2 - t x + d over F_ell
    attempts: tuple


@dataclass(frozen=True)
class SuspicionReport:
    """No witness within budget.  Heuristic only: never a proof of reducibility."""

    budget: int
    attempts: tuple


def irreducible_proportion(ell: int) -> Fraction:
    """Least share, over subgroups G of GL2(F_ell) containing SL2, of elements
    with irreducible characteristic polynomial.

    The minimum is attained when det G lies in the squares; all of GL2 gives
    ell / (2 (ell + 1)) instead.  A budget computed from the minimum is valid
    for every admissible G.
    """
    return Fraction(1, 3) if ell == 2 else Fraction(ell - 1, 2 * (ell + 1))


def default_budget(ell: int, confidence_bits: int = DEFAULT_CONFIDENCE_BITS) -> int:
    return budget_for(irreducible_proportion(ell), confidence_bits)


def budget_for(q: Fraction, confidence_bits: int) -> int:
    """Smallest B with (1 - q)^B <= 2^-bits, in exact rationals."""
    if confidence_bits < 1:
        raise ValueError("confidence_bits must be positive")
    miss = 1 - q
    target = Fraction(1, 2 ** confidence_bits)
    B, acc = 1, miss
    while acc > target:
        acc *= miss
        B += 1
    return B


def charpoly_at(f, lam: ResiduePrime, r: int) -> tuple[int, int]:
    ell = lam.ell
    t = reduce(f.a(r), lam)
    d = pow(r, f.weight - 1, ell) * eval_mod_lambda(f.nebentypus, r, lam) % ell
    return t, d


def find_witness(f, lam: ResiduePrime, budget: int | None = None):
    ell, N = lam.ell, f.level
    if N % ell == 0:
        raise PreconditionFailed(f"ell = {ell} divides the level {N}")
    budget = budget or default_budget(ell)
    if budget < 1:
        raise ValueError("budget must be at least 1")
    field = ff.PrimeField(ell)
    attempts = []
    r = 1
    while len(attempts) < budget:
        r += 1
        if not ff.is_prime(r) or (ell * N) % r == 0:
            continue
        if r > f.an_bound:
            raise InsufficientCoefficients(f.label, r, f.an_bound)
        t, d = charpoly_at(f, lam, r)
        irr = ff.quad_irreducible(t, d, field)
        roots = () if irr else tuple(ff.roots(ff.poly((d, -t, 1), ell), ell))
        attempts.append(Attempt(r, t, d, irr, roots))
        if irr:
            return WitnessReport(r, (t, d), tuple(attempts))
    return SuspicionReport(budget, tuple(attempts))
