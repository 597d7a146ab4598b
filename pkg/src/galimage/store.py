"""Newform records: canonical serialisation, fixtures, disk cache, remote ingestion."""

from __future__ import annotations

import json
import logging
import math
import os
import re
import tempfile
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from . import ffarith as ff
from .dirichlet import CharacterDesc, descend, parity, same_orbit
from .level1 import dim_cusp_level1
from .errors import (
    GalImageError,
    InsufficientCoefficients,
    NetworkUnavailable,
    NoDescent,
    NotFound,
    ValidationFailed,
)
from .nfresidue import NFElement, NumberFieldDesc

log = logging.getLogger(__name__)

SCHEMA = "galimage.newform/1"
INDEX_SCHEMA = "galimage.index/1"
LABEL_RE = re.compile(r"^([1-9]\d*)\.([1-9]\d*)\.([a-z]+)\.([a-z]+)$")
DEFAULT_BASE_URL = "https://www.lmfdb.org"
CACHE_ENV = "GALIMAGE_CACHE_DIR"
FIELD_ORDER = (
    "schema", "label", "level", "weight", "char_modulus", "char_conductor", "char_order",
    "char_values", "field_poly", "an_bound", "an_numerators", "an_denominators", "provenance",
)


@dataclass(frozen=True)
class NewformRecord:
    label: str
    level: int
    weight: int
    nebentypus: CharacterDesc
    field: NumberFieldDesc
    an: dict = field(compare=False, repr=False)
    an_bound: int = 0
    provenance: str = ""

    def a(self, n: int) -> NFElement:
        if n == 1:
            return self.field.one()
        if n > self.an_bound:
            raise InsufficientCoefficients(self.label, n, self.an_bound)
        return self.an[n]

    @property
    def char_orbit(self) -> str:
        return self.label.split(".")[2]

    def to_json(self) -> dict:
        chi = self.nebentypus
        d = self.field.degree

        def pad(nums):
            return [str(c) for c in nums] + ["0"] * (d - len(nums))

        doc = {
            "schema": SCHEMA,
            "label": self.label,
            "level": str(self.level),
            "weight": str(self.weight),
            "char_modulus": str(chi.modulus),
            "char_conductor": str(chi.conductor),
            "char_order": str(chi.order),
            "char_values": [[str(g), pad(v.numerator), str(v.denominator)] for g, v in zip(chi.generators, chi.values)],
            "field_poly": [str(c) for c in self.field.min_poly],
            "an_bound": str(self.an_bound),
            "an_numerators": [pad(self.an[n].numerator) for n in range(2, self.an_bound + 1)],
            "an_denominators": [str(self.an[n].denominator) for n in range(2, self.an_bound + 1)],
            "provenance": self.provenance,
        }
        return doc

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1) + "\n"


def _int(doc, key):
    try:
        return int(doc[key])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationFailed(key, f"missing or not an integer string: {exc}") from None


def parse_record(text: str, validate: bool = True) -> NewformRecord:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationFailed("json", str(exc)) from None
    if doc.get("schema") != SCHEMA:
        raise ValidationFailed("schema", f"expected {SCHEMA}, got {doc.get('schema')!r}")
    label = doc.get("label", "")
    if not LABEL_RE.match(label):
        raise ValidationFailed("label", f"{label!r} is not a newform label")
    fld = NumberFieldDesc(tuple(int(c) for c in doc["field_poly"]))
    vals = []
    gens = []
    for g, nums, den in doc["char_values"]:
        gens.append(int(g))
        vals.append(NFElement(fld, tuple(int(c) for c in nums), int(den)))
    chi = CharacterDesc(
        _int(doc, "char_modulus"), _int(doc, "char_order"), tuple(gens), tuple(vals),
        _int(doc, "char_conductor"), fld,
    )
    bound = _int(doc, "an_bound")
    nums, dens = doc["an_numerators"], doc["an_denominators"]
    if len(nums) != bound - 1 or len(dens) != bound - 1:
        raise ValidationFailed("an_bound", f"expected {bound - 1} coefficients, got {len(nums)}/{len(dens)}")
    an = {n: NFElement(fld, tuple(int(c) for c in nums[n - 2]), int(dens[n - 2])) for n in range(2, bound + 1)}
    rec = NewformRecord(label, _int(doc, "level"), _int(doc, "weight"), chi, fld, an, bound, doc.get("provenance", ""))
    if validate:
        validate_record(rec)
    return rec


def validate_record(rec: NewformRecord, mult_bound: int = 100) -> None:
    chi = rec.nebentypus
    if chi.modulus != rec.level:
        raise ValidationFailed("char_modulus", f"{chi.modulus} != level {rec.level}")
    if parity(chi) != (-1) ** rec.weight:
        raise ValidationFailed("parity", f"chi(-1) != (-1)^{rec.weight}")
    top = min(mult_bound, rec.an_bound)
    for m in range(2, top + 1):
        for n in range(m + 1, top // m + 1):
            if math.gcd(m, n) == 1 and rec.a(m * n) != rec.a(m) * rec.a(n):
                raise ValidationFailed("multiplicativity", f"a_{m * n} != a_{m} a_{n}")
    for p in ff.primes_up_to(math.isqrt(rec.an_bound)):
        if rec.level % p:
            lhs = rec.a(p * p)
            rhs = rec.a(p) * rec.a(p) - chi.value(p) * p ** (rec.weight - 1)
            if lhs != rhs:
                raise ValidationFailed("hecke recursion", f"a_{p * p} != a_{p}^2 - eps({p}) {p}^{rec.weight - 1}")


# -- LMFDB ingestion ----------------------------------------------------------

def record_from_lmfdb(newform: dict, hecke: dict) -> NewformRecord:
    """Build a record from mf_newforms and mf_hecke_nf rows.

    Hecke eigenvalues there are coordinates on a Hecke-ring basis
    nu_i = (sum_j num[i][j] beta^j) / den[i]; we flatten to the power basis.
    """
    fld = NumberFieldDesc(tuple(int(c) for c in hecke["field_poly"]))
    d = fld.degree
    basis_nums = hecke.get("hecke_ring_numerators") or [[int(i == j) for j in range(d)] for i in range(d)]
    basis_dens = hecke.get("hecke_ring_denominators") or [1] * d
    basis = [NFElement(fld, tuple(int(c) for c in num), int(den)) for num, den in zip(basis_nums, basis_dens)]

    def elt(coords):
        out = fld.zero()
        for c, b in zip(coords, basis):
            if int(c):
                out = out + b * int(c)
        return out

    an_list = hecke["an"]
    if d == 1 and an_list and not isinstance(an_list[0], list):
        an_list = [[c] for c in an_list]
    an = {n: elt(coords) for n, coords in enumerate(an_list, start=1) if n >= 2}
    if an_list and elt(an_list[0]) != fld.one():
        raise ValidationFailed("a_1", "first coefficient is not 1")
    gens, vals = [], []
    for g, coords in hecke.get("hecke_ring_character_values") or []:
        gens.append(int(g))
        vals.append(elt(coords))
    N = int(newform["level"])
    if not gens:
        chi = CharacterDesc.trivial(N, fld)
    else:
        chi = CharacterDesc(N, int(newform["char_order"]), tuple(gens), tuple(vals),
                            int(newform["char_conductor"]), fld)
    rec = NewformRecord(newform["label"], N, int(newform["weight"]), chi, fld, an, len(an_list),
                        "LMFDB mf_newforms / mf_hecke_nf")
    validate_record(rec)
    return rec


# -- data sources -------------------------------------------------------------

def _package_fixtures() -> Path:
    return Path(str(resources.files("galimage") / "fixtures"))


@dataclass
class DataSource:
    """Where records come from: committed fixtures, then the disk cache, then the network."""

    fixtures_dir: Path | None = None
    cache_dir: Path | None = None
    offline: bool = False
    base_url: str = DEFAULT_BASE_URL
    timeout: float = 30.0
    retries: int = 3
    backoff: float = 1.0

    def __post_init__(self):
        self.fixtures_dir = Path(self.fixtures_dir) if self.fixtures_dir else _package_fixtures()
        if self.cache_dir is None and os.environ.get(CACHE_ENV):
            self.cache_dir = os.environ[CACHE_ENV]
        self.cache_dir = Path(self.cache_dir) if self.cache_dir else None
        self._memo: dict[str, NewformRecord] = {}

    # index of spaces for which the fixture directory is complete
    def fixture_index(self) -> dict:
        path = self.fixtures_dir / "index.json"
        if not path.exists():
            return {}
        doc = json.loads(path.read_text(encoding="utf-8"))
        if doc.get("schema") != INDEX_SCHEMA:
            raise ValidationFailed("index schema", str(doc.get("schema")))
        return doc["spaces"]

    def local_text(self, label: str) -> str | None:
        for root in (self.fixtures_dir, self.cache_dir):
            if root is not None:
                path = root / f"{label}.record"
                if path.exists():
                    return path.read_text(encoding="utf-8")
        return None

    def digest(self, label: str) -> str | None:
        import hashlib

        text = self.local_text(label)
        return hashlib.sha256(text.encode()).hexdigest() if text is not None else None

    def _get_json(self, path: str, params: dict) -> dict:
        import requests

        url = self.base_url.rstrip("/") + path
        params = dict(params, _format="json")
        last = None
        for attempt in range(self.retries):
            try:
                resp = requests.get(url, params=params, timeout=self.timeout)
                resp.raise_for_status()
                return resp.json()
            except (requests.RequestException, ValueError) as exc:
                last = exc
                time.sleep(self.backoff * 2 ** attempt)
        raise NetworkUnavailable(f"{url}: {last}")

    def _store(self, label: str, text: str, raw: str | None = None) -> None:
        if self.cache_dir is None:
            return
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        for name, body in ((f"{label}.record", text), (f"{label}.raw.json", raw)):
            if body is None or (self.cache_dir / name).exists():
                continue
            fd, tmp = tempfile.mkstemp(dir=self.cache_dir, prefix=".tmp-")
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(body)
            os.replace(tmp, self.cache_dir / name)

    def remote_labels(self, level: int, weight: int, orbit: str | None = None) -> list[str]:
        params = {"level": level, "weight": weight, "_fields": "label"}
        if orbit:
            params["char_orbit_label"] = orbit
        doc = self._get_json("/api/mf_newforms/", params)
        return sorted(row["label"] for row in doc.get("data", []))

    def fetch_remote(self, label: str) -> NewformRecord:
        nf = self._get_json("/api/mf_newforms/", {"label": label})
        hk = self._get_json("/api/mf_hecke_nf/", {"label": label})
        if not nf.get("data") or not hk.get("data"):
            raise NotFound(label)
        rec = record_from_lmfdb(nf["data"][0], hk["data"][0])
        self._store(label, rec.dumps(), json.dumps({"mf_newforms": nf, "mf_hecke_nf": hk}, indent=1))
        return rec


def fetch_newform(label: str, source: DataSource | None = None) -> NewformRecord:
    source = source or DataSource()
    if not LABEL_RE.match(label):
        raise NotFound(f"{label!r} is not a newform label")
    if label in source._memo:
        return source._memo[label]
    text = source.local_text(label)
    if text is not None:
        rec = parse_record(text)
        if rec.label != label:
            raise ValidationFailed("label", f"file for {label} holds {rec.label}")
    elif source.offline:
        raise NetworkUnavailable(f"{label} not in fixtures or cache and offline mode is on")
    else:
        rec = source.fetch_remote(label)
    source._memo[label] = rec
    return rec


@dataclass(frozen=True)
class CandidateQuery:
    level_divisors: tuple
    weight_range: tuple
    nebentypus: CharacterDesc

    def __post_init__(self):
        lo, hi = self.weight_range
        if lo < 1 or hi < lo:
            raise ValidationFailed("weight_range", str(self.weight_range))
        for d in self.level_divisors:
            if self.nebentypus.modulus % d:
                raise ValidationFailed("level_divisors", f"{d} does not divide {self.nebentypus.modulus}")

    @classmethod
    def for_oldness(cls, chi_small: CharacterDesc, ell: int) -> "CandidateQuery":
        M = chi_small.modulus
        return cls(tuple(ff.divisors(M)), (2, ell + 2), chi_small)


def _orbit_matches(rec: NewformRecord, chi: CharacterDesc) -> bool:
    try:
        target = descend(chi, rec.level)
    except NoDescent:
        return False
    return same_orbit(rec.nebentypus, target)


def fetch_candidates(query: CandidateQuery, source: DataSource | None = None) -> list[NewformRecord]:
    """All newforms of the requested levels and weights whose character matches.

    Offline, a (level, weight) space is only answered from fixtures when the
    fixture index lists it as complete; otherwise the remote database is asked.
    """
    source = source or DataSource()
    index = source.fixture_index()
    lo, hi = query.weight_range
    out = []
    for level in sorted(query.level_divisors):
        try:
            target = descend(query.nebentypus, level)
        except NoDescent:
            continue
        for k in range(lo, hi + 1):
            if parity(target) != (-1) ** k:
                continue
            if level == 1 and dim_cusp_level1(k) == 0:
                continue
            key = f"{level}.{k}.a" if target.is_trivial else f"{level}.{k}"
            if key in index:
                labels = index[key]
            elif source.offline:
                raise NetworkUnavailable(f"space {key} is not covered by fixtures and offline mode is on")
            else:
                labels = source.remote_labels(level, k, "a" if target.is_trivial else None)
            for label in labels:
                rec = fetch_newform(label, source)
                if _orbit_matches(rec, query.nebentypus):
                    out.append(rec)
    out.sort(key=lambda r: (r.level, r.weight, r.label))
    return out


__all__ = [
    "CandidateQuery", "DataSource", "GalImageError", "NewformRecord", "fetch_candidates",
    "fetch_newform", "parse_record", "record_from_lmfdb", "validate_record",
]
