import copy
import json

import pytest

from galimage import ffarith as ff
from galimage.certificate import (
    INCONCLUSIVE,
    LARGE_IMAGE,
    POSSIBLY_OLD,
    PRECONDITION_FAILED,
    Options,
    canonical_digest,
    certify,
    choose_p,
    level_skippable,
    load_certificate,
    verify,
)
from galimage.dirichlet import CharacterDesc
from galimage.errors import CertificateParseError, PreconditionFailed
from galimage.nfresidue import NumberFieldDesc
from galimage.store import DataSource, NewformRecord


@pytest.fixture(scope="module")
def cert1(source):
    return certify("9099.2.a.g", 7, 3, Options(p=337), source)


@pytest.fixture(scope="module")
def cert_conj(source):
    return certify("9099.2.a.g", 7, 4, Options(p=337), source)


def test_example1_certificate(cert1):
    assert cert1["verdict"] == LARGE_IMAGE
    assert cert1["witness"]["witness_r"] == "2"
    assert cert1["witness"]["charpoly"] == {"t": "0", "d": "2"}
    assert cert1["image"]["is_full"] is True
    assert cert1["input"]["data_digests"]["9099.2.a.g"]


def test_all_integers_are_strings(cert1):
    def walk(x):
        if isinstance(x, dict):
            for v in x.values():
                walk(v)
        elif isinstance(x, list):
            for v in x:
                walk(v)
        else:
            assert not isinstance(x, (int, float)) or isinstance(x, bool)

    walk(cert1)


def test_round_trip_verifies(cert1, cert_conj, source):
    for doc in (cert1, cert_conj):
        res = verify(json.dumps(doc), source)
        assert res.ok, res.failures
        assert res.checks > 100


def test_deterministic(cert1, source):
    again = certify("9099.2.a.g", 7, 3, Options(p=337), source)
    strip = lambda d: {k: v for k, v in d.items() if k != "timestamp"}
    assert strip(again) == strip(cert1)
    assert canonical_digest(again) == cert1["digest"]


def test_altered_residue_is_named(cert1, source):
    doc = copy.deepcopy(cert1)
    tw = doc["oldness"]["evidence"][0]["twists"][0]
    tw["residue"] = str((int(tw["residue"]) + 1) % 7 or 1)
    res = verify(doc, source)
    assert not res.ok
    assert "residue reproduces" in res.first_failure
    assert res.failures[-1] == "digest"


def test_altered_witness_is_caught(cert1, source):
    doc = copy.deepcopy(cert1)
    doc["witness"]["charpoly"]["d"] = "3"
    res = verify(doc, source)
    assert not res.ok and "witness charpoly matches record" in res.failures


def test_dropped_evidence_is_caught(cert1, source):
    doc = copy.deepcopy(cert1)
    doc["oldness"]["evidence"][-1]["twists"].pop()
    res = verify(doc, source)
    assert not res.ok and "every twist eliminated" in res.first_failure


def test_truncated_file():
    with pytest.raises(CertificateParseError):
        load_certificate('{"schema": "galimage.certi')
    with pytest.raises(CertificateParseError):
        load_certificate('{"schema": "something else"}')


def test_conjugate_possibly_old(cert_conj):
    assert cert_conj["verdict"] == POSSIBLY_OLD
    assert cert_conj["image"] is None
    names = {s["candidate"] for s in cert_conj["oldness"]["survivors"]}
    assert "27.2.a.a" in names


def test_example2_needs_override(source):
    doc = certify("71.3.b.a", 41, 11, Options(p=71), source)
    assert doc["verdict"] == PRECONDITION_FAILED
    assert any("71-part" in d for d in doc["diagnostics"])
    assert verify(doc, source).ok


def test_ell_dividing_level(source):
    doc = certify("9099.2.a.g", 3, 1, Options(p=337), source)
    assert doc["verdict"] == PRECONDITION_FAILED
    assert doc["preconditions"]["ell_not_dividing_N"] is False


def test_choose_p(ex1, ex2):
    assert choose_p(ex1) == 337
    with pytest.raises(PreconditionFailed):
        choose_p(ex2)
    assert choose_p(ex2, force_p_part=True) == 71


def test_auto_p(source):
    doc = certify("9099.2.a.g", 7, 3, Options(), source)
    assert doc["input"]["p"] == "337" and doc["verdict"] == LARGE_IMAGE


def test_level_skippable():
    assert level_skippable(9099)
    assert not level_skippable(27)
    assert not level_skippable(1)
    with pytest.raises(PreconditionFailed):
        level_skippable(71, CharacterDesc(71, 2, (7,), (NumberFieldDesc((0, 1)).element((-1,)),)))


def sigma_record(level=11, bound=400):
    """An Eisenstein-like eigensystem: a_n = sigma_1 of the prime-to-level part of n."""
    Q = NumberFieldDesc((0, 1))
    an = {}
    for n in range(2, bound + 1):
        m = n
        while m % level == 0:
            m //= level
        an[n] = Q.element((sum(ff.divisors(m)),))
    return NewformRecord(f"{level}.2.a.z", level, 2, CharacterDesc.trivial(level), Q, an, bound, "toy")


def test_inconclusive_toy(tmp_path):
    rec = sigma_record()
    (tmp_path / "11.2.a.z.record").write_text(rec.dumps())
    src = DataSource(fixtures_dir=tmp_path, offline=True)
    doc = certify("11.2.a.z", 5, 0, Options(), src)
    assert doc["verdict"] == INCONCLUSIVE
    assert doc["witness"]["found"] is False
    assert len(doc["witness"]["attempts"]) == int(doc["witness"]["budget"])
    assert doc["oldness"] is None
    assert verify(doc, src).ok


def test_fewer_bits_fewer_attempts(tmp_path):
    (tmp_path / "11.2.a.z.record").write_text(sigma_record().dumps())
    src = DataSource(fixtures_dir=tmp_path, offline=True)
    doc = certify("11.2.a.z", 5, 0, Options(budget_bits=4), src)
    assert doc["verdict"] == INCONCLUSIVE and doc["witness"]["budget"] == "7"


def test_altered_survivor_residue_is_caught(cert_conj, source):
    doc = copy.deepcopy(cert_conj)
    tw = doc["oldness"]["survivors"][0]["eliminated_twists"][0]
    tw["residue"] = str(int(tw["residue"]) % 6 + 1)
    res = verify(doc, source)
    assert not res.ok and "residue reproduces" in res.first_failure
