"""Ruling out that f mod lambda comes from a lower level.

A candidate f' with eigenvalues b_n in Q(beta') = Q[x]/(m') is congruent to
f mod lambda (up to the twist n^i) only if ell divides

    Norm(n^i b_n - c_n) = Res(m', n^i g_n - c_n) / den^deg

for every n prime to ell N, where c_n is a_n(f) mod lambda.  One nonzero
residue therefore rules out (f', i) for every prime of Q(beta') above ell.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import ffarith as ff
from . import level1
from .dirichlet import descend, p_part_trivial, prime_to_p_part
from .errors import InsufficientCoefficients, PreconditionFailed, ValidationFailed
from .nfresidue import NFElement, ResiduePrime, reduce, resultant_exact, shifted_resultant
from .store import CandidateQuery, DataSource, NewformRecord, fetch_candidates

log = logging.getLogger(__name__)

NOT_OLD = "NotOld"
POSSIBLY_OLD = "PossiblyOld"


@dataclass(frozen=True)
class TwistEvidence:
    twist: int
    n: int
    residue: int


@dataclass(frozen=True)
class EliminationEvidence:
    candidate_label: str
    stage: str                 # "prefilter" or "sweep"
    twists: tuple

    def __post_init__(self):
        for t in self.twists:
            if t.residue == 0:
                raise ValidationFailed("evidence", f"zero residue recorded for {self.candidate_label}")


@dataclass(frozen=True)
class SurvivorReport:
    candidate_label: str
    surviving_twists: tuple
    primes_checked: tuple
    eliminated: tuple = ()     # TwistEvidence for the twists that did fall


@dataclass(frozen=True)
class Level1Evidence:
    method: str
    scan_order: tuple
    precision: int
    cells: tuple               # level1.CellResult

    @property
    def survivors(self):
        return [(c.weight, c.twist) for c in self.cells if c.survives]


@dataclass(frozen=True)
class OldnessVerdict:
    status: str
    p: int
    mode: str                  # "standard" or "forced"
    test_primes: tuple
    prefilter_primes: tuple
    prefilter_survivors: tuple
    candidates: tuple
    evidence: tuple
    survivors: tuple
    level1: Level1Evidence | None = None
    notes: tuple = field(default=())


def twist_residue(cand: NewformRecord, n: int, twist: int, c: int, ell: int) -> int:
    """Res(m', n^twist g_n - c) mod ell."""
    return shifted_resultant(cand.a(n), c, ell, pow(n, twist, ell))


def exact_twist_resultant(b: NFElement, n: int, twist: int, c: int) -> int:
    """The same resultant over Z: Res(m', n^twist num - c den), no reduction."""
    num = [n ** twist * x for x in b.numerator] or [0]
    num[0] -= c * b.denominator
    return int(resultant_exact(b.field.min_poly, num))


def _check_primes(f, cand, test_primes, ell):
    N = f.level
    for n in test_primes:
        if (ell * N) % n == 0:
            raise ValidationFailed("test primes", f"{n} divides ell N = {ell * N}")
    top = min(f.an_bound, cand.an_bound)
    missing = [n for n in test_primes if n > top]
    if missing:
        short = f if f.an_bound < cand.an_bound else cand
        raise InsufficientCoefficients(short.label, min(missing), short.an_bound)


def eliminate_candidate(f: NewformRecord, lam: ResiduePrime, cand: NewformRecord, test_primes,
                        reduced: dict | None = None):
    """Per twist, the first test prime with a nonzero residue; survivors otherwise."""
    ell = lam.ell
    test_primes = tuple(test_primes)
    _check_primes(f, cand, test_primes, ell)
    c = reduced or {n: reduce(f.a(n), lam) for n in test_primes}
    found, alive = [], []
    for i in range(ell - 1):
        for n in test_primes:
            res = twist_residue(cand, n, i, c[n], ell)
            if res:
                found.append(TwistEvidence(i, n, res))
                break
        else:
            alive.append(i)
    if alive:
        return SurvivorReport(cand.label, tuple(alive), test_primes, tuple(found))
    return EliminationEvidence(cand.label, "sweep", tuple(found))


def _prefilter(cand, lam, primes, reduced):
    """A zero-trace prime r with ell not dividing Norm(b_r) rules out every twist at once."""
    ell = lam.ell
    for r in primes:
        if shifted_resultant(cand.a(r), 0, ell) != 0:
            tw = tuple(TwistEvidence(i, r, twist_residue(cand, r, i, reduced[r], ell)) for i in range(ell - 1))
            return EliminationEvidence(cand.label, "prefilter", tw)
    return None


def _sweep_one(args):
    f, lam, cand, prefilter_primes, test_primes, reduced = args
    ev = _prefilter(cand, lam, prefilter_primes, reduced)
    if ev is not None:
        return ev, False
    return eliminate_candidate(f, lam, cand, test_primes, reduced), True


def default_test_primes(ell: int, N: int, bound: int) -> tuple:
    return tuple(r for r in ff.primes_up_to(bound) if (ell * N) % r)


def small_character(f: NewformRecord, p: int, force_p_part: bool):
    """The nebentypus a lower-level form must carry, and which mode produced it."""
    chi = f.nebentypus
    if p_part_trivial(chi, p):
        return descend(chi, f.level // p), "standard"
    if not force_p_part:
        raise PreconditionFailed(f"the {p}-part of the nebentypus is not trivial (conductor {chi.conductor})")
    return prime_to_p_part(chi, p), "forced"


def check_p(N: int, p: int) -> None:
    if not ff.is_prime(p) or N % p:
        raise PreconditionFailed(f"{p} is not a prime dividing N = {N}")
    if N % (p * p) == 0:
        raise PreconditionFailed(f"{p}^2 divides N = {N}")


def oldness_verdict(f: NewformRecord, lam: ResiduePrime, p: int, source: DataSource | None = None,
                    test_prime_bound: int = 200, prefilter_bound: int = 100, force_p_part: bool = False,
                    extend: bool = True, workers: int | None = None) -> OldnessVerdict:
    ell, N = lam.ell, f.level
    check_p(N, p)
    chi_small, mode = small_character(f, p, force_p_part)
    source = source or DataSource()
    cands = fetch_candidates(CandidateQuery.for_oldness(chi_small, ell), source)

    bound = min(test_prime_bound, f.an_bound)
    test_primes = default_test_primes(ell, N, bound)
    reduced = {n: reduce(f.a(n), lam) for n in test_primes}
    zero = tuple(r for r in test_primes if reduced[r] == 0)
    prefilter_primes = tuple(r for r in zero if r <= prefilter_bound)

    jobs = [(f, lam, c, prefilter_primes, test_primes, reduced) for c in cands]
    if workers and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_one, jobs))
    else:
        results = [_sweep_one(j) for j in jobs]

    # survivors get more primes, doubling the bound while coefficients last
    notes = []
    top = min([f.an_bound] + [c.an_bound for c in cands])
    while extend and any(isinstance(r, SurvivorReport) for r, _ in results) and bound < top:
        bound = min(2 * bound, top)
        wider = default_test_primes(ell, N, bound)
        more = {n: reduce(f.a(n), lam) for n in wider if n not in reduced}
        reduced.update(more)
        notes.append(f"test primes extended to {bound} for surviving candidates")
        by_label = {c.label: c for c in cands}
        results = [
            (eliminate_candidate(f, lam, by_label[r.candidate_label], wider, reduced), True)
            if isinstance(r, SurvivorReport) else (r, s)
            for r, s in results
        ]
        test_primes = wider

    evidence = tuple(r for r, _ in results if isinstance(r, EliminationEvidence))
    survivors = tuple(r for r, _ in results if isinstance(r, SurvivorReport))
    passed = tuple(c.label for c, (_, s) in zip(cands, results) if s)

    l1 = None
    if chi_small.conductor == 1:
        order = tuple(r for r in test_primes if reduced[r] == 0) + tuple(r for r in test_primes if reduced[r])
        B = level1.required_precision(ell, max(order)) if order else 0
        cells = level1.eigensystem_scan(reduced, list(order), ell, B or None)
        l1 = Level1Evidence("eigensystem-kernel", order, B, tuple(cells))

    old = bool(survivors) or bool(l1 and l1.survivors)
    return OldnessVerdict(
        POSSIBLY_OLD if old else NOT_OLD, p, mode, test_primes, prefilter_primes, passed,
        tuple(c.label for c in cands), evidence, survivors, l1, tuple(notes),
    )
