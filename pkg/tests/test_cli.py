import json
import shutil
import subprocess
import sys

import pytest

from galimage.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_certify_example1(tmp_path, capsys):
    out = tmp_path / "ex1.json"
    code, _, err = run(["certify", "9099.2.a.g", "--ell", "7", "--root", "3", "--p", "337",
                        "--offline", "--out", str(out)], capsys)
    assert code == 0
    assert "LARGE_IMAGE" in err and "x^2 - 0x + 2" in err
    doc = json.loads(out.read_text())
    assert doc["verdict"] == "LARGE_IMAGE"
    code, stdout, _ = run(["verify", str(out)], capsys)
    assert code == 0 and stdout.startswith("ok:")


def test_certify_to_stdout(capsys):
    code, stdout, _ = run(["certify", "9099.2.a.g", "--ell", "7", "--root", "4", "--p", "337", "--offline"], capsys)
    assert code == 2
    assert json.loads(stdout)["verdict"] == "POSSIBLY_OLD"


def test_example2_exit_codes(capsys):
    base = ["certify", "71.3.b.a", "--ell", "41", "--root", "11", "--p", "71", "--offline"]
    code, _, err = run(base, capsys)
    assert code == 4 and "PRECONDITION_FAILED" in err
    code, _, err = run(base + ["--force-p-part"], capsys)
    assert code == 0 and "PSL2(F_41)" in err


def test_verify_tampered(tmp_path, capsys):
    out = tmp_path / "c.json"
    run(["certify", "9099.2.a.g", "--ell", "7", "--root", "3", "--offline", "--out", str(out)], capsys)
    doc = json.loads(out.read_text())
    doc["oldness"]["evidence"][0]["twists"][0]["residue"] = "0"
    out.write_text(json.dumps(doc))
    code, stdout, _ = run(["verify", str(out)], capsys)
    assert code == 1 and stdout.startswith("FAILED:") and "residue" in stdout


def test_verify_truncated(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema": "galimage.cert')
    code, _, err = run(["verify", str(bad)], capsys)
    assert code == 1 and "parse error" in err


def test_bad_label(capsys):
    code, _, err = run(["fetch", "not.a.label", "--offline"], capsys)
    assert code == 1 and "NotFound" in err


def test_fetch_prints_record(capsys):
    code, stdout, _ = run(["fetch", "27.2.a.a", "--offline"], capsys)
    assert code == 0 and json.loads(stdout)["label"] == "27.2.a.a"


@pytest.mark.parametrize("N,answer", [(9099, "true"), (27, "false"), (1, "false")])
def test_skip_check(N, answer, capsys):
    code, stdout, _ = run(["skip-check", str(N)], capsys)
    assert code == 0 and stdout.strip() == answer


def test_cache_dir_flag(tmp_path, capsys):
    code, _, _ = run(["fetch", "27.2.a.a", "--offline", "--cache-dir", str(tmp_path)], capsys)
    assert code == 0


def test_console_script_installed():
    exe = shutil.which("galimage")
    cmd = [exe] if exe else [sys.executable, "-m", "galimage.cli"]
    proc = subprocess.run(cmd + ["skip-check", "9099"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "true"
