"""Manin-symbol modular symbols for Gamma_0(N) with a character of order <= 2.

Fixture-generation helper only: the package never imports this module.  It
needs python-flint for fast exact (fmpq_mat) and modular (nmod_mat) row
reduction.

Conventions: a Manin symbol is [X^i Y^(k-2-i), (c:d)], the right action of
g = [[a, b], [c, d]] is P(X, Y) -> P(aX + bY, cX + dY) together with
(u, v) -> (ua + vc, ub + vd), and [P, (lu, lv)] = eps(l) [P, (u, v)].
"""

from fractions import Fraction
from math import comb, gcd

import flint
import numpy as np


def factorint(n):
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1
    if n > 1:
        out.append((n, 1))
    return out


def primes_upto(n):
    sieve = bytearray([1]) * (n + 1)
    sieve[:2] = b"\x00\x00"
    for i in range(2, int(n ** 0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    return [i for i, v in enumerate(sieve) if v]


def heilbronn_merel(n):
    """Matrices [[a,b],[c,d]] of determinant n with a > b >= 0, d > c >= 0."""
    out = []
    for a in range(1, n + 1):
        for d in range(max(1, -(-n // a)), n + 2 - a):
            e = a * d - n
            if e == 0:
                out.extend((a, 0, c, d) for c in range(d))
                out.extend((a, b, 0, d) for b in range(1, a))
            else:
                for b in range(1, a):
                    if e % b == 0 and e // b < d:
                        out.append((a, b, e // b, d))
    return out


class P1:
    """The projective line over Z/N, assembled from local lines by CRT."""

    def __init__(self, N):
        self.N = N
        self.local = []
        idem = []
        for p, e in factorint(N):
            pe = p ** e
            rest = N // pe
            idem.append(rest * pow(rest, -1, pe) % N if pe != N else 1)
            self.local.append((p, pe, pe + pe // p))
        self.idem = idem
        self.size = 1
        for _, _, s in self.local:
            self.size *= s

    def _local_rep(self, j, idx):
        p, pe, _ = self.local[j]
        if idx < pe:
            return 1, idx
        return p * (idx - pe), 1

    def rep(self, index):
        if self.N == 1:
            return 0, 1
        c = d = 0
        for j in reversed(range(len(self.local))):
            idx = index % self.local[j][2]
            index //= self.local[j][2]
            lc, ld = self._local_rep(j, idx)
            c += lc * self.idem[j]
            d += ld * self.idem[j]
        return c % self.N, d % self.N

    def normalize(self, c, d):
        """Return (index, unit) with (c, d) = unit * rep(index), or None."""
        if self.N == 1:
            return 0, 1
        index = 0
        unit = 0
        for j, (p, pe, size) in enumerate(self.local):
            lc, ld = c % pe, d % pe
            if lc % p:
                s = lc
                idx = ld * pow(lc, -1, pe) % pe
            elif ld % p:
                s = ld
                idx = pe + (lc * pow(ld, -1, pe) % pe) // p
            else:
                return None
            index = index * size + idx
            unit += s * self.idem[j]
        return index, unit % self.N


def _poly_action(i, w, a, b, c, d):
    """Coefficients of (aX+bY)^i (cX+dY)^(w-i) on X^j Y^(w-j)."""
    left = [comb(i, s) * a ** s * b ** (i - s) for s in range(i + 1)]
    right = [comb(w - i, s) * c ** s * d ** (w - i - s) for s in range(w - i + 1)]
    out = [0] * (w + 1)
    for s, x in enumerate(left):
        if x:
            for t, y in enumerate(right):
                out[s + t] += x * y
    return out


class ModularSymbols:
    """Plus (sign=1) or minus quotient of weight-k modular symbols.

    ``eps`` maps an integer unit mod N to +1/-1.  ``modulus`` None means the
    base field is Q, otherwise F_modulus.
    """

    def __init__(self, N, k, eps=None, sign=1, modulus=None):
        self.N, self.k, self.w = N, k, k - 2
        self.eps = eps or (lambda x: 1)
        self.modulus = modulus
        self.p1 = P1(N)
        self.nsym = (k - 1) * self.p1.size
        self._build(sign)

    def act(self, sym, g):
        """Manin symbol times matrix g, as a dict {sym: int coeff}."""
        a, b, c, d = g
        i, idx = divmod(sym, self.p1.size)
        u, v = self.p1.rep(idx)
        nrm = self.p1.normalize(u * a + v * c, u * b + v * d)
        if nrm is None:
            return {}
        j, unit = nrm
        e = self.eps(unit)
        coeffs = _poly_action(i, self.w, a, b, c, d)
        return {s * self.p1.size + j: e * x for s, x in enumerate(coeffs) if x}

    def _build(self, sign):
        n = self.nsym
        parent = list(range(n))
        factor = [1] * n  # sym = factor * parent-chain
        zero = [False] * n

        def find(x):
            f = 1
            while parent[x] != x:
                f *= factor[x]
                x = parent[x]
            return x, f

        def union(x, y, c):
            # impose x = c * y
            rx, fx = find(x)
            ry, fy = find(y)
            rel = c * fy * fx  # rx = rel * ry  (fx = +-1)
            if rx == ry:
                if rel != 1:
                    zero[rx] = True
                return
            parent[rx] = ry
            factor[rx] = rel
            if zero[rx]:
                zero[ry] = True

        sigma = (0, -1, 1, 0)
        star = (-1, 0, 0, 1)
        for x in range(n):
            (y, c), = self.act(x, sigma).items()
            union(x, y, -c)
            (y, c), = self.act(x, star).items()
            union(x, y, sign * c)
        roots = {}
        self.cls = []
        for x in range(n):
            r, f = find(x)
            if zero[r]:
                self.cls.append((None, 0))
                continue
            if r not in roots:
                roots[r] = len(roots)
            self.cls.append((roots[r], f))
        ncls = len(roots)
        self.root_sym = [0] * ncls
        for r, j in roots.items():
            self.root_sym[j] = r

        tau = (0, -1, 1, -1)
        tau2 = (-1, 1, -1, 0)
        rows = set()
        for x in range(n):
            row = {}
            for part in ({x: 1}, self.act(x, tau), self.act(x, tau2)):
                for s, c in part.items():
                    j, f = self.cls[s]
                    if j is not None:
                        row[j] = row.get(j, 0) + c * f
            row = tuple(sorted((j, c) for j, c in row.items() if c))
            if row:
                rows.add(row)
        rows = sorted(rows)
        if self.modulus is None:
            mat = flint.fmpq_mat(len(rows) or 1, ncls)
        else:
            mat = flint.nmod_mat(len(rows) or 1, ncls, self.modulus)
        for r, row in enumerate(rows):
            for j, c in row:
                mat[r, j] = c
        red, rank = mat.rref()
        pivots = []
        col = 0
        for r in range(rank):
            while red[r, col] == 0:
                col += 1
            pivots.append(col)
        pivset = set(pivots)
        self.free = [j for j in range(ncls) if j not in pivset]
        self.dim = len(self.free)
        where = {j: t for t, j in enumerate(self.free)}
        if self.modulus is None:
            coords = [[Fraction(0)] * self.dim for _ in range(ncls)]
            for j, t in where.items():
                coords[j][t] = Fraction(1)
            for r, pc in enumerate(pivots):
                for j, t in where.items():
                    v = red[r, j]
                    if v != 0:
                        coords[pc][t] = -Fraction(int(v.p), int(v.q))
        else:
            q = self.modulus
            coords = np.zeros((ncls, self.dim), dtype=np.int64)
            for j, t in where.items():
                coords[j, t] = 1
            free_arr = np.array(self.free, dtype=np.int64)
            for r, pc in enumerate(pivots):
                vals = [int(red[r, j]) for j in self.free]
                coords[pc] = (-np.array(vals, dtype=np.int64)) % q
        self.coords = coords

    def reduce(self, combo):
        """Coordinates of a dict {sym: coeff} in the quotient basis."""
        if self.modulus is None:
            out = [Fraction(0)] * self.dim
            for s, c in combo.items():
                j, f = self.cls[s]
                if j is None or not c:
                    continue
                cf = c * f
                for t, v in enumerate(self.coords[j]):
                    if v:
                        out[t] += cf * v
            return out
        q = self.modulus
        out = np.zeros(self.dim, dtype=np.int64)
        for s, c in combo.items():
            j, f = self.cls[s]
            if j is None or not c:
                continue
            out = (out + (c * f % q) * self.coords[j]) % q
        return out

    def hecke_image(self, sym, n):
        combo = {}
        for h in heilbronn_merel(n):
            for s, c in self.act(sym, h).items():
                combo[s] = combo.get(s, 0) + c
        return self.reduce(combo)

    def basis_sym(self, t):
        return self.root_sym[self.free[t]]

    def hecke_matrix(self, n):
        """D x D matrix whose column t is T_n applied to basis element t."""
        cols = [self.hecke_image(self.basis_sym(t), n) for t in range(self.dim)]
        if self.modulus is None:
            m = flint.fmpq_mat(self.dim, self.dim)
            for t, col in enumerate(cols):
                for s, v in enumerate(col):
                    if v:
                        m[s, t] = flint.fmpq(v.numerator, v.denominator)
            return m
        return np.array(cols, dtype=np.int64).T.copy()
