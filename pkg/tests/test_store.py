import json

import pytest

from galimage.dirichlet import CharacterDesc
from galimage.errors import NetworkUnavailable, NotFound, ValidationFailed
from galimage.store import (
    CACHE_ENV,
    CandidateQuery,
    DataSource,
    fetch_candidates,
    fetch_newform,
    parse_record,
    record_from_lmfdb,
)


def test_example_records(ex1, ex2):
    assert (ex1.level, ex1.weight) == (9099, 2)
    assert ex1.nebentypus.is_trivial
    assert ex1.field.min_poly == (-2, 0, 1)
    assert (ex2.level, ex2.weight) == (71, 3)
    assert ex2.nebentypus.order == 2 and ex2.nebentypus.conductor == 71
    assert ex2.field.min_poly == (2825, -40, 108, 0, 1)


def test_example1_coefficients(ex1):
    # q - 2q^4 + (3 + sqrt2) q^5 + ...
    assert ex1.a(2).is_zero() and ex1.a(3).is_zero()
    assert ex1.a(4).as_fraction() == -2
    assert ex1.a(5) == ex1.field.element((3, 1))


def test_bad_label(source):
    with pytest.raises(NotFound):
        fetch_newform("not.a.label", source)


def test_offline_miss(source):
    with pytest.raises(NetworkUnavailable):
        fetch_newform("11.2.a.a", source)


def test_round_trip(source):
    for label in ("9099.2.a.g", "71.3.b.a", "27.2.a.a"):
        text = source.local_text(label)
        assert parse_record(text).dumps() == text


def test_validation_names_invariant(source):
    doc = json.loads(source.local_text("27.2.a.a"))
    doc["an_numerators"][8][0] = "5"          # a_10 != a_2 a_5
    with pytest.raises(ValidationFailed) as err:
        parse_record(json.dumps(doc))
    assert err.value.invariant == "multiplicativity"

    doc = json.loads(source.local_text("27.2.a.a"))
    doc["weight"] = "3"
    with pytest.raises(ValidationFailed) as err:
        parse_record(json.dumps(doc))
    assert err.value.invariant == "parity"

    doc = json.loads(source.local_text("27.2.a.a"))
    doc["an_bound"] = "301"
    with pytest.raises(ValidationFailed):
        parse_record(json.dumps(doc))


def test_insufficient_coefficients(ex1):
    from galimage.errors import InsufficientCoefficients

    with pytest.raises(InsufficientCoefficients):
        ex1.a(ex1.an_bound + 1)


def test_candidates_example1(source):
    q = CandidateQuery((1, 3, 9, 27), (2, 9), CharacterDesc.trivial(27))
    labels = [r.label for r in fetch_candidates(q, source)]
    assert "27.2.a.a" in labels
    assert labels == sorted(labels, key=lambda s: (int(s.split(".")[0]), int(s.split(".")[1]), s))
    assert all(r.level in (1, 3, 9, 27) for r in fetch_candidates(q, source))


def test_candidates_level1(source):
    q = CandidateQuery((1,), (2, 43), CharacterDesc.trivial(1))
    recs = fetch_candidates(q, source)
    assert recs and min(r.weight for r in recs) == 12
    assert fetch_candidates(CandidateQuery((1,), (2, 3), CharacterDesc.trivial(1)), source) == []


def test_candidate_query_validated():
    with pytest.raises(ValidationFailed):
        CandidateQuery((5,), (2, 9), CharacterDesc.trivial(27))
    with pytest.raises(ValidationFailed):
        CandidateQuery((1,), (9, 2), CharacterDesc.trivial(27))


def test_offline_uncovered_space(source):
    q = CandidateQuery((1, 11), (2, 4), CharacterDesc.trivial(11))
    with pytest.raises(NetworkUnavailable):
        fetch_candidates(q, source)


def test_cache_env_and_flag(tmp_path, monkeypatch):
    monkeypatch.setenv(CACHE_ENV, str(tmp_path / "env"))
    assert DataSource().cache_dir == tmp_path / "env"
    assert DataSource(cache_dir=tmp_path / "flag").cache_dir == tmp_path / "flag"


def test_cache_is_write_once(tmp_path, source):
    ds = DataSource(cache_dir=tmp_path, offline=True)
    text = source.local_text("27.2.a.a")
    ds._store("99.2.a.a", text, '{"raw": 1}')
    ds._store("99.2.a.a", "overwritten", '{"raw": 2}')
    assert (tmp_path / "99.2.a.a.record").read_text() == text
    assert json.loads((tmp_path / "99.2.a.a.raw.json").read_text()) == {"raw": 1}
    assert not list(tmp_path.glob(".tmp-*"))


def _lmfdb_rows(rec):
    """Rows shaped like the database's newform and Hecke tables, built from a record."""
    d = rec.field.degree

    def coords(e):
        assert e.denominator == 1
        return [int(c) for c in e.numerator] + [0] * (d - len(e.numerator))

    chi = rec.nebentypus
    nf = {"label": rec.label, "level": rec.level, "weight": rec.weight,
          "char_order": chi.order, "char_conductor": chi.conductor}
    hk = {"field_poly": list(rec.field.min_poly),
          "an": [coords(rec.field.one())] + [coords(rec.a(n)) for n in range(2, rec.an_bound + 1)],
          "hecke_ring_character_values": [[g, coords(v)] for g, v in zip(chi.generators, chi.values)]}
    return nf, hk


def test_record_from_lmfdb_rows(source):
    rec = fetch_newform("27.4.a.a", source)
    nf, hk = _lmfdb_rows(rec)
    hk["hecke_ring_character_values"] = []
    back = record_from_lmfdb(nf, hk)
    assert back.label == rec.label and back.an_bound == rec.an_bound
    assert all(back.a(n) == rec.a(n) for n in range(2, 60))


def test_fetch_remote_with_mocked_http(tmp_path, source, monkeypatch):
    rec = fetch_newform("27.2.a.a", source)
    nf, hk = _lmfdb_rows(rec)
    nf["label"] = "27.2.a.z"
    calls = []

    class Resp:
        def __init__(self, body):
            self.body = body

        def raise_for_status(self):
            pass

        def json(self):
            return self.body

    def fake_get(url, params, timeout):
        calls.append(url)
        return Resp({"data": [nf if url.endswith("mf_newforms/") else hk]})

    import requests

    monkeypatch.setattr(requests, "get", fake_get)
    ds = DataSource(fixtures_dir=tmp_path / "none", cache_dir=tmp_path / "cache", base_url="http://db.invalid")
    got = fetch_newform("27.2.a.z", ds)
    assert got.a(5) == rec.a(5)
    assert (tmp_path / "cache" / "27.2.a.z.record").exists()
    assert (tmp_path / "cache" / "27.2.a.z.raw.json").exists()
    assert calls[0].startswith("http://db.invalid/api/")
    # the second read comes from the cache, not the network
    n = len(calls)
    fetch_newform("27.2.a.z", DataSource(fixtures_dir=tmp_path / "none", cache_dir=tmp_path / "cache"))
    assert len(calls) == n


def test_network_retries_then_fails(tmp_path, monkeypatch):
    import requests

    tries = []

    def boom(url, params, timeout):
        tries.append(url)
        raise requests.ConnectionError("down")

    monkeypatch.setattr(requests, "get", boom)
    ds = DataSource(fixtures_dir=tmp_path, retries=3, backoff=0.0)
    with pytest.raises(NetworkUnavailable):
        fetch_newform("11.2.a.a", ds)
    assert len(tries) == 3
