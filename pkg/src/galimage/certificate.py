"""The decision procedure end to end, and offline re-verification of its output."""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone

from . import __version__
from . import ffarith as ff
from . import level1
from .dirichlet import CharacterDesc, p_part_trivial
from .errors import CertificateParseError, GalImageError, PreconditionFailed
from .fieldinv import frob_filter, predict_fields, search_filter
from .image import check_subgroup, compute_image
from .nfresidue import ResiduePrime, reduce
from .oldness import (
    NOT_OLD,
    check_p,
    exact_twist_resultant,
    oldness_verdict,
    small_character,
    twist_residue,
)
from .store import CandidateQuery, DataSource, fetch_candidates, fetch_newform
from .witness import DEFAULT_CONFIDENCE_BITS, SuspicionReport, charpoly_at, default_budget, find_witness

log = logging.getLogger(__name__)

SCHEMA = "galimage.certificate/1"
LARGE_IMAGE = "LARGE_IMAGE"
POSSIBLY_OLD = "POSSIBLY_OLD"
INCONCLUSIVE = "INCONCLUSIVE_REDUCIBLE_SUSPECTED"
PRECONDITION_FAILED = "PRECONDITION_FAILED"
EXIT_CODES = {LARGE_IMAGE: 0, POSSIBLY_OLD: 2, INCONCLUSIVE: 3, PRECONDITION_FAILED: 4}


@dataclass
class Options:
    p: int | None = None
    budget_bits: int = DEFAULT_CONFIDENCE_BITS
    test_prime_bound: int = 200
    prefilter_bound: int = 100
    force_p_part: bool = False
    workers: int | None = None


def _s(x):
    """Integers to decimal strings, recursively; everything else as is."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return str(x)
    if isinstance(x, dict):
        return {k: _s(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_s(v) for v in x]
    raise TypeError(f"cannot serialise {type(x).__name__}")


def canonical_digest(doc: dict) -> str:
    body = {k: v for k, v in doc.items() if k not in ("timestamp", "digest")}
    return hashlib.sha256(json.dumps(body, separators=(",", ":")).encode()).hexdigest()


def choose_p(f, force_p_part: bool = False) -> int:
    """Smallest p with p || N and trivial p-part; with the override, any p || N."""
    N = f.level
    exact = [p for p, e in ff.factorint(N) if e == 1] if N > 1 else []
    for p in exact:
        if p_part_trivial(f.nebentypus, p):
            return p
    if force_p_part and exact:
        return exact[0]
    raise PreconditionFailed(f"no prime p with p || {N} and trivial p-part of the nebentypus")


def level_skippable(N: int, eps: CharacterDesc | None = None) -> bool:
    """Levels with a prime p || N never carry new exotic images (trivial nebentypus)."""
    if eps is not None and not eps.is_trivial:
        raise PreconditionFailed("only stated for trivial nebentypus")
    return N > 1 and any(e == 1 for _, e in ff.factorint(N))


# -- serialisation of the pieces -----------------------------------------------

def _witness_doc(w):
    attempts = [
        {"r": a.r, "t": a.t, "d": a.d, "irreducible": a.irreducible, "roots": list(a.roots)}
        for a in w.attempts
    ]
    if isinstance(w, SuspicionReport):
        return {"found": False, "budget": w.budget, "attempts": attempts,
                "note": "heuristic only: no prime in budget had an irreducible charpoly"}
    return {"found": True, "witness_r": w.witness_r, "charpoly": {"t": w.charpoly[0], "d": w.charpoly[1]},
            "attempts": attempts}


def _oldness_doc(v, chi_small, ell):
    l1 = None
    if v.level1 is not None:
        l1 = {
            "method": v.level1.method,
            "scan_order": list(v.level1.scan_order),
            "precision": v.level1.precision,
            "weights": level1.weight_cells(ell),
            "cells": [
                {"weight": c.weight, "twist": c.twist, "kernel_dims": list(c.kernel_dims),
                 "eliminating_prime": c.eliminating_prime}
                for c in v.level1.cells
            ],
            "survivors": [list(s) for s in v.level1.survivors],
        }
    return {
        "status": v.status,
        "p": v.p,
        "mode": v.mode,
        "candidate_query": {
            "level_divisors": ff.divisors(chi_small.modulus),
            "weight_range": [2, ell + 2],
            "char_modulus": chi_small.modulus,
            "char_conductor": chi_small.conductor,
        },
        "test_primes": list(v.test_primes),
        "prefilter_primes": list(v.prefilter_primes),
        "prefilter_survivors": list(v.prefilter_survivors),
        "candidates": list(v.candidates),
        "evidence": [
            {"candidate": e.candidate_label, "stage": e.stage,
             "twists": [{"twist": t.twist, "n": t.n, "residue": t.residue} for t in e.twists]}
            for e in v.evidence
        ],
        "survivors": [
            {"candidate": s.candidate_label, "surviving_twists": list(s.surviving_twists),
             "primes_checked": list(s.primes_checked),
             "eliminated_twists": [{"twist": t.twist, "n": t.n, "residue": t.residue} for t in s.eliminated]}
            for s in v.survivors
        ],
        "level1": l1,
        "notes": list(v.notes),
    }


def _image_doc(im, ell):
    return {
        "M": im.M, "delta": list(im.delta), "delta_order": im.delta_order, "group_order": im.group_order,
        "is_full": im.is_full, "projective": im.projective, "group": im.group_name(ell),
        "projective_group": im.projective_name(ell), "forced_mode": im.forced_mode,
    }


def _pred_doc(pred):
    return {
        "degree": pred.degree,
        "signature": list(pred.signature) if pred.signature else None,
        "ramified_within": list(pred.ramified_within),
        "p": pred.p,
        "p_exponent": pred.p_exponent,
        "tame_at_p": pred.tame_at_p,
        "galois_closure_group": pred.galois_closure_group,
        "projective_image": pred.projective_image,
        "notes": list(pred.notes),
    }


# -- certify --------------------------------------------------------------------

def certify(label: str, ell: int, root: int, options: Options | None = None,
            source: DataSource | None = None) -> dict:
    opts = options or Options()
    source = source or DataSource()
    doc = {
        "schema": SCHEMA,
        "input": _s({
            "label": label, "ell": ell, "root": root, "p": opts.p,
            "overrides": {"force_p_part": opts.force_p_part},
            "budget_bits": opts.budget_bits, "test_prime_bound": opts.test_prime_bound,
            "prefilter_bound": opts.prefilter_bound, "tool_version": __version__,
            "data_digests": {},
        }),
        "preconditions": None, "witness": None, "oldness": None, "image": None,
        "field_predictions": None, "verdict": None, "diagnostics": [],
    }
    try:
        _run(doc, label, ell, root, opts, source)
    except GalImageError as exc:
        doc["verdict"] = PRECONDITION_FAILED
        doc["diagnostics"].append(f"{type(exc).__name__}: {exc}")
    digests = {}
    for name in [label] + list((doc.get("oldness") or {}).get("candidates", [])):
        d = source.digest(name)
        if d:
            digests[name] = d
    doc["input"]["data_digests"] = dict(sorted(digests.items()))
    doc["digest"] = canonical_digest(doc)
    doc["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return doc


def _run(doc, label, ell, root, opts, source):
    if not ff.is_prime(ell):
        raise PreconditionFailed(f"ell = {ell} is not prime")
    f = fetch_newform(label, source)
    N = f.level
    pre = {"ell_not_dividing_N": N % ell != 0}
    doc["preconditions"] = pre
    if N % ell == 0:
        raise PreconditionFailed(f"ell = {ell} divides N = {N}")
    lam = ResiduePrime(ell, root, f.field)
    pre["residual_degree_one"] = True
    pre["ell_not_dividing_disc"] = True
    p = opts.p if opts.p is not None else choose_p(f, opts.force_p_part)
    check_p(N, p)
    doc["input"]["p"] = str(p)
    pre["p"] = str(p)
    pre["p_exactly_divides_N"] = True
    pre["p_part_trivial"] = p_part_trivial(f.nebentypus, p)
    if not pre["p_part_trivial"]:
        if not opts.force_p_part:
            raise PreconditionFailed(f"the {p}-part of the nebentypus is not trivial")
        doc["diagnostics"].append(
            f"the {p}-part of the nebentypus is not trivial; continuing under --force-p-part (forced mode)")

    w = find_witness(f, lam, default_budget(ell, opts.budget_bits))
    doc["witness"] = _s(_witness_doc(w))
    if isinstance(w, SuspicionReport):
        doc["verdict"] = INCONCLUSIVE
        return

    chi_small, _ = small_character(f, p, opts.force_p_part)
    v = oldness_verdict(f, lam, p, source, opts.test_prime_bound, opts.prefilter_bound,
                        opts.force_p_part, workers=opts.workers)
    doc["oldness"] = _s(_oldness_doc(v, chi_small, ell))
    if v.status != NOT_OLD:
        doc["verdict"] = POSSIBLY_OLD
        return

    im = compute_image(f, lam, p, certified=True, forced=not pre["p_part_trivial"])
    doc["image"] = _s(_image_doc(im, ell))
    k, K = predict_fields(f, lam, p, im)
    filters = [frob_filter(f, lam, r) for r in v.test_primes]
    doc["field_predictions"] = _s({
        "k": _pred_doc(k), "K": _pred_doc(K),
        "search_filter": search_filter(k, filters),
    })
    doc["verdict"] = LARGE_IMAGE


# -- verify ---------------------------------------------------------------------

@dataclass
class VerifyResult:
    ok: bool
    checks: int = 0
    failures: list = field(default_factory=list)

    @property
    def first_failure(self):
        return self.failures[0] if self.failures else None


def load_certificate(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CertificateParseError(f"not a certificate: {exc}") from None
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA:
        raise CertificateParseError("unknown certificate schema")
    for key in ("input", "verdict", "digest"):
        if key not in doc:
            raise CertificateParseError(f"missing field {key!r}")
    return doc


class _Checker:
    def __init__(self):
        self.result = VerifyResult(True)

    def __call__(self, name, cond):
        self.result.checks += 1
        if not cond:
            self.result.ok = False
            self.result.failures.append(name)
        return cond


def verify(doc: dict | str, source: DataSource | None = None) -> VerifyResult:
    """Recompute every recorded check from the certificate and the local records."""
    if isinstance(doc, str):
        doc = load_certificate(doc)
    source = source or DataSource(offline=True)
    check = _Checker()
    try:
        _verify(doc, source, check)
        check("digest", doc["digest"] == canonical_digest(doc))
    except GalImageError as exc:
        check(f"recomputation raised {type(exc).__name__}: {exc}", False)
    except (KeyError, TypeError, ValueError) as exc:
        check(f"malformed certificate: {type(exc).__name__}: {exc}", False)
    return check.result


def _verify(doc, source, check):
    inp = doc["input"]
    label, ell, root = inp["label"], int(inp["ell"]), int(inp["root"])
    for name, digest in inp["data_digests"].items():
        check(f"data digest {name}", source.digest(name) == digest)
    verdict = doc["verdict"]
    if verdict == PRECONDITION_FAILED:
        check("diagnostics present", bool(doc["diagnostics"]))
        return
    f = fetch_newform(label, source)
    lam = ResiduePrime(ell, root, f.field)
    N = f.level
    p = int(inp["p"])
    check("ell does not divide N", N % ell != 0)
    check("p exactly divides N", N % p == 0 and N % (p * p) != 0 and ff.is_prime(p))
    trivial = p_part_trivial(f.nebentypus, p)
    check("p-part recorded", doc["preconditions"]["p_part_trivial"] == trivial)
    check("override needed and present", trivial or inp["overrides"]["force_p_part"])

    w = doc["witness"]
    prev = 1
    for a in w["attempts"]:
        r = int(a["r"])
        check(f"attempt r={r} increasing", r > prev)
        skipped = [q for q in ff.primes_up_to(r - 1) if q > prev]
        check(f"attempt r={r} skips only primes dividing ell N", all((ell * N) % q == 0 for q in skipped))
        check(f"attempt r={r} coprime to ell N", (ell * N) % r != 0)
        prev = r
        t, d = charpoly_at(f, lam, r)
        check(f"charpoly at r={r}", (t, d) == (int(a["t"]), int(a["d"])))
        check(f"irreducibility at r={r}", ff.quad_irreducible(t, d, ff.PrimeField(ell)) == a["irreducible"])
    if w["found"]:
        r = int(w["witness_r"])
        t, d = int(w["charpoly"]["t"]), int(w["charpoly"]["d"])
        check("witness is the last attempt", w["attempts"][-1]["r"] == w["witness_r"])
        check("witness charpoly irreducible", ff.quad_irreducible(t, d, ff.PrimeField(ell)))
        check("witness charpoly matches record", (t, d) == charpoly_at(f, lam, r))
    else:
        check("inconclusive verdict without witness", verdict == INCONCLUSIVE)
        return

    old = doc["oldness"]
    _verify_oldness(old, f, lam, p, ell, inp, source, check)
    if verdict == LARGE_IMAGE:
        check("large image needs NotOld", old["status"] == NOT_OLD)
        im = compute_image(f, lam, p, certified=True, forced=not trivial)
        rec = doc["image"]
        delta = [int(x) for x in rec["delta"]]
        check_subgroup_ok = True
        try:
            check_subgroup(delta, ell)
        except GalImageError:
            check_subgroup_ok = False
        check("delta closed under products and inverses", check_subgroup_ok)
        check("delta recomputed", delta == list(im.delta))
        check("M", int(rec["M"]) == im.M)
        check("group order", int(rec["group_order"]) == im.group_order)
        check("projective class", rec["projective"] == im.projective and rec["is_full"] == im.is_full)
        k, K = predict_fields(f, lam, p, im)
        fp = doc["field_predictions"]
        check("prediction k", fp["k"] == _s(_pred_doc(k)))
        check("prediction K", fp["K"] == _s(_pred_doc(K)))
    elif verdict == POSSIBLY_OLD:
        check("possibly old verdict matches oldness", old["status"] != NOT_OLD)


def _verify_oldness(old, f, lam, p, ell, inp, source, check):
    force = inp["overrides"]["force_p_part"]
    chi_small, _ = small_character(f, p, force)
    cands = fetch_candidates(CandidateQuery.for_oldness(chi_small, ell), source)
    by_label = {c.label: c for c in cands}
    check("candidate list", sorted(by_label) == sorted(old["candidates"]))
    covered = {}
    for ev in old["evidence"]:
        cand = by_label.get(ev["candidate"])
        if not check(f"evidence candidate {ev['candidate']} known", cand is not None):
            continue
        for t in ev["twists"]:
            i, n, res = int(t["twist"]), int(t["n"]), int(t["residue"])
            tag = f"{cand.label} twist {i} n={n}"
            check(f"{tag}: n prime to ell N", (ell * f.level) % n != 0 and ff.is_prime(n))
            c = reduce(f.a(n), lam)
            got = twist_residue(cand, n, i, c, ell)
            check(f"{tag}: residue reproduces", got == res)
            check(f"{tag}: residue nonzero", res % ell != 0)
            check(f"{tag}: exact resultant not divisible by ell",
                  exact_twist_resultant(cand.a(n), n, i, c) % ell != 0)
            covered.setdefault(cand.label, set()).add(i)
    if old["status"] == NOT_OLD:
        for label in by_label:
            check(f"{label}: every twist eliminated", covered.get(label) == set(range(ell - 1)))
        check("no survivors", not old["survivors"])
    for s in old["survivors"]:
        cand = by_label[s["candidate"]]
        primes = [int(n) for n in s["primes_checked"]]
        for i in (int(x) for x in s["surviving_twists"]):
            ok = all(twist_residue(cand, n, i, reduce(f.a(n), lam), ell) == 0 for n in primes)
            check(f"{cand.label} twist {i} survives its primes", ok)
        for t in s["eliminated_twists"]:
            i, n, res = int(t["twist"]), int(t["n"]), int(t["residue"])
            tag = f"{cand.label} twist {i} n={n}"
            got = twist_residue(cand, n, i, reduce(f.a(n), lam), ell)
            check(f"{tag}: residue reproduces", got == res)
            check(f"{tag}: residue nonzero", res % ell != 0)
        split = [int(x) for x in s["surviving_twists"]] + [int(t["twist"]) for t in s["eliminated_twists"]]
        check(f"{cand.label}: twists partitioned", sorted(split) == list(range(ell - 1)))
    l1 = old["level1"]
    if chi_small.conductor == 1:
        if not check("level-1 test present", l1 is not None):
            return
        order = [int(r) for r in l1["scan_order"]]
        eigen = {r: reduce(f.a(r), lam) for r in order}
        cells = level1.eigensystem_scan(eigen, order, ell, int(l1["precision"]) or None)
        want = {(c.weight, c.twist): (list(c.kernel_dims), c.eliminating_prime) for c in cells}
        got = {(int(c["weight"]), int(c["twist"])):
               ([int(x) for x in c["kernel_dims"]],
                None if c["eliminating_prime"] is None else int(c["eliminating_prime"]))
               for c in l1["cells"]}
        check("level-1 cells cover every weight and twist", set(got) == set(want))
        for key in sorted(want):
            if key in got:
                check(f"level-1 kernel dims at weight {key[0]} twist {key[1]}", got[key] == want[key])
        if old["status"] == NOT_OLD:
            check("level-1 test empty", all(c.eliminating_prime is not None for c in cells))


def verdict_exit_code(verdict: str) -> int:
    return EXIT_CODES.get(verdict, 1)
