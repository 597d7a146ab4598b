"""Cross-check committed fixtures against PARI/GP's modular forms package.

    pip install cypari
    python tools/check_with_pari.py [fixture_dir] [--big]

Compares traces and norms of every a_n (embedding independent), and the
exact q-expansion for 71.3.b.a whose field polynomial PARI shares.  --big
also checks 9099.2.a.g (splits only the <= 2-dimensional part of the space).
"""

import json
import sys
from pathlib import Path

from cypari import pari

pari.allocatemem(4 * 10**9)


def gp_elt(nums, den):
    return "(" + "+".join(f"({c})*y^{i}" for i, c in enumerate(nums)) + f")/{den}"


def invariants(field_poly, elts):
    m = "+".join(f"({c})*y^{i}" for i, c in enumerate(field_poly))
    out = []
    for e in elts:
        out.append(str(pari(f"[trace(Mod({e},{m})), norm(Mod({e},{m}))]")))
    return out


def load(path):
    rec = json.loads(Path(path).read_text())
    elts = [gp_elt(n, d) for n, d in zip(rec["an_numerators"], rec["an_denominators"])]
    return rec, elts


def coeff_list(F, bound):
    v = pari.mfcoefs(F, bound)
    return [str(pari.lift(v[n])) for n in range(2, bound + 1)]


def main():
    args = [a for a in sys.argv[1:] if not a.startswith("--")]
    root = Path(args[0] if args else "src/galimage/fixtures")
    big = "--big" in sys.argv
    bad = 0
    groups = {}
    for path in sorted(root.glob("*.record")):
        rec, elts = load(path)
        key = (int(rec["level"]), int(rec["weight"]), int(rec["char_order"]))
        groups.setdefault(key, []).append((rec, elts))
    for (N, k, order), recs in sorted(groups.items()):
        if N > 1000 and not big:
            continue
        char = "Mod(70,71)" if order == 2 else "1"
        if N > 1000:
            mf = pari(f"mfinit([{N},{k},1],0)")
            vF, vK = pari.mfsplit(mf, 2, 0)
            orbits = []
            for vec, pol in zip(vF, vK):
                if pari.poldegree(pol) != 2:
                    continue
                F = pari.mflinear(mf, vec)
                orbits.append((pol, F))
        else:
            mf = pari(f"mfinit([{N},{k},{char}],0)")
            forms = pari.mfeigenbasis(mf)
            fields = pari.mffields(mf)
            orbits = [(fields[i], forms[i]) for i in range(len(forms))]
        bound = int(recs[0][0]["an_bound"])
        pinv = []
        for pol, F in orbits:
            coeffs = coeff_list(F, bound)
            fp = [int(c) for c in pari.Vecrev(pol)]
            pinv.append((fp, coeffs, invariants(fp, coeffs)))
        for rec, elts in recs:
            mine = invariants([int(c) for c in rec["field_poly"]], elts)
            match = [p for p in pinv if p[2] == mine]
            status = "ok" if len(match) == 1 else "MISMATCH"
            if match and [int(c) for c in rec["field_poly"]] == match[0][0]:
                exact = all(pari(f"{a} - ({b})") == 0 for a, b in zip(elts, match[0][1]))
                status += ", exact q-expansion " + ("equal" if exact else "differs (other embedding)")
            bad += not status.startswith("ok")
            print(f"{rec['label']:>12}  {status}")
        if len(recs) != len(pinv) and N <= 1000 and order == 1:
            print(f"  count differs at {N}.{k}: fixtures {len(recs)}, PARI {len(pinv)}")
            bad += 1
    sys.exit(1 if bad else 0)


if __name__ == "__main__":
    main()
