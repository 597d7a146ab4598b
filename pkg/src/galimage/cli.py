"""Command line entry point: galimage {certify,verify,fetch,skip-check}."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .certificate import Options, certify, level_skippable, verdict_exit_code, verify
from .errors import CertificateParseError, GalImageError
from .store import DataSource, fetch_newform


def _source(args) -> DataSource:
    return DataSource(fixtures_dir=args.fixtures, cache_dir=args.cache_dir, offline=args.offline)


def _add_source_flags(sp):
    sp.add_argument("--offline", action="store_true", help="never touch the network")
    sp.add_argument("--cache-dir", help="record cache (default: $GALIMAGE_CACHE_DIR)")
    sp.add_argument("--fixtures", help="fixture directory (default: the bundled one)")


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_certify(args) -> int:
    opts = Options(
        p=args.p, budget_bits=args.budget_bits, test_prime_bound=args.test_prime_bound,
        prefilter_bound=args.prefilter_bound, force_p_part=args.force_p_part, workers=args.workers,
    )
    doc = certify(args.label, args.ell, args.root, opts, _source(args))
    _emit(json.dumps(doc, indent=1) + "\n", args.out)
    summary = [f"verdict: {doc['verdict']}"]
    w = doc.get("witness")
    if w and w.get("found"):
        summary.append(f"witness r={w['witness_r']} charpoly x^2 - {w['charpoly']['t']}x + {w['charpoly']['d']}")
    if doc.get("image"):
        im = doc["image"]
        summary.append(f"image: |Delta|={im['delta_order']} projective {im['projective_group']}")
    summary += doc["diagnostics"]
    print("\n".join(summary), file=sys.stderr)
    return verdict_exit_code(doc["verdict"])


def cmd_verify(args) -> int:
    try:
        text = Path(args.certificate).read_text(encoding="utf-8")
        result = verify(text, _source(args))
    except CertificateParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 1
    if result.ok:
        print(f"ok: {result.checks} checks reproduced")
        return 0
    print(f"FAILED: {result.first_failure} ({len(result.failures)} of {result.checks} checks failed)")
    return 1


def cmd_fetch(args) -> int:
    rec = fetch_newform(args.label, _source(args))
    _emit(rec.dumps(), args.out)
    return 0


def cmd_skip_check(args) -> int:
    print("true" if level_skippable(args.N) else "false")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="galimage", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("certify", help="run the large-image decision procedure")
    c.add_argument("label")
    c.add_argument("--ell", type=int, required=True)
    c.add_argument("--root", type=int, required=True, help="c in lambda = (ell, beta - c)")
    c.add_argument("--p", type=int, help="prime exactly dividing N (default: smallest admissible)")
    c.add_argument("--budget-bits", type=int, default=40)
    c.add_argument("--test-prime-bound", type=int, default=200)
    c.add_argument("--prefilter-bound", type=int, default=100)
    c.add_argument("--force-p-part", action="store_true",
                   help="proceed although the p-part of the nebentypus is not trivial")
    c.add_argument("--workers", type=int)
    c.add_argument("--out")
    _add_source_flags(c)
    c.set_defaults(func=cmd_certify)

    v = sub.add_parser("verify", help="recompute every check recorded in a certificate")
    v.add_argument("certificate")
    _add_source_flags(v)
    v.set_defaults(func=cmd_verify, offline=True)

    f = sub.add_parser("fetch", help="fetch, validate and print a newform record")
    f.add_argument("label")
    f.add_argument("--out")
    _add_source_flags(f)
    f.set_defaults(func=cmd_fetch)

    s = sub.add_parser("skip-check", help="can an exotic-image search skip level N?")
    s.add_argument("N", type=int)
    s.set_defaults(func=cmd_skip_check)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except GalImageError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
