"""Exact newform decomposition of small modular-symbol spaces (fixture tool)."""

import cmath
from fractions import Fraction

import flint

from modsym import ModularSymbols, factorint, primes_upto


def _q(v):
    return flint.fmpq(v.numerator, v.denominator) if isinstance(v, Fraction) else flint.fmpq(v)


def rref_info(m):
    red, rank = m.rref()
    pivots = []
    col = 0
    for r in range(rank):
        while red[r, col] == 0:
            col += 1
        pivots.append(col)
    return red, rank, pivots


def nullspace(m):
    """Columns spanning the right kernel of an fmpq_mat."""
    red, rank, pivots = rref_info(m)
    n = m.ncols()
    free = [j for j in range(n) if j not in set(pivots)]
    out = flint.fmpq_mat(n, len(free))
    for t, j in enumerate(free):
        out[j, t] = 1
        for r, pc in enumerate(pivots):
            out[pc, t] = -red[r, j]
    return out


def restrict(T, B):
    """Matrix of T on the T-stable column span of B."""
    red, rank, pivots = rref_info(B.transpose())
    m = B.ncols()
    rows = pivots  # B restricted to these rows is invertible
    Bs = flint.fmpq_mat(m, m)
    TB = T * B
    TBs = flint.fmpq_mat(m, m)
    for a, r in enumerate(rows):
        for c in range(m):
            Bs[a, c] = B[r, c]
            TBs[a, c] = TB[r, c]
    return Bs.inv() * TBs


def poly_at_matrix(f, A):
    n = A.nrows()
    out = flint.fmpq_mat(n, n)
    ident = flint.fmpq_mat(n, n)
    for i in range(n):
        ident[i, i] = 1
    for c in reversed(f.coeffs()):
        out = out * A + ident * c
    return out


def column_block(B, cols):
    out = flint.fmpq_mat(B.nrows(), cols.ncols())
    out = B * cols
    return out


class Newform:
    """Galois orbit of a newform: coefficient field Q(alpha), a_p = g_p(alpha)."""

    def __init__(self, N, k, minpoly, coeff_polys, eps):
        self.N, self.k = N, k
        self.minpoly = minpoly  # fmpq_poly, monic, integral
        self.ap = coeff_polys  # p -> fmpq_poly in alpha
        self.eps = eps

    def mulmod(self, a, b):
        return (a * b) % self.minpoly

    def an_table(self, bound):
        x = flint.fmpq_poly([0, 1])
        one = flint.fmpq_poly([1])
        an = {1: one}
        for p in primes_upto(bound):
            ap = self.ap[p]
            an[p] = ap
            pk = p * p
            prev2, prev = one, ap
            while pk <= bound:
                if self.N % p == 0:
                    cur = self.mulmod(prev, ap)
                else:
                    chi = self.eps(p)
                    cur = self.mulmod(prev, ap) - prev2 * (chi * p ** (self.k - 1))
                an[pk] = cur
                prev2, prev = prev, cur
                pk *= p
        for n in range(2, bound + 1):
            if n in an:
                continue
            fac = factorint(n)
            val = one
            for p, e in fac:
                val = self.mulmod(val, an[p ** e])
            an[n] = val
        return an


def decompose(N, k, eps=None, split_primes=None, want_bound=200):
    """Return the newforms (Galois orbits) of S_k(N, eps) as Newform objects."""
    eps = eps or (lambda x: 1)
    M = ModularSymbols(N, k, eps)
    good = [p for p in primes_upto(200) if N % p]
    split_primes = split_primes or good[:8]
    mats = {}

    def T(p):
        if p not in mats:
            mats[p] = M.hecke_matrix(p)
        return mats[p]

    ident = flint.fmpq_mat(M.dim, M.dim)
    for i in range(M.dim):
        ident[i, i] = 1
    pieces = [ident] if M.dim else []
    info = {0: []}
    done = []
    for p in split_primes:
        nxt = []
        for B in pieces:
            A = restrict(T(p), B)
            fac = A.charpoly().factor()[1]
            for f, e in fac:
                K = nullspace(poly_at_matrix(f ** e, A))
                nxt.append(B * K)
        pieces = nxt
    forms = []
    for B in pieces:
        m = B.ncols()
        gen = None
        eisen = False
        for p in split_primes:
            A = restrict(T(p), B)
            cp = A.charpoly()
            bound = 2 * p ** ((k - 1) / 2) + 1e-6
            if any(abs(complex(z)) > bound for z in _roots(cp)):
                eisen = True
                break
            fac = cp.factor()[1]
            if gen is None and len(fac) == 1 and fac[0][1] == 1:
                gen = (p, A)
        if eisen or gen is None:
            continue
        p0, A = gen
        v = flint.fmpq_mat(m, 1)
        v[0, 0] = 1
        kry = flint.fmpq_mat(m, m)
        cur = v
        for j in range(m):
            for i in range(m):
                kry[i, j] = cur[i, 0]
            cur = A * cur
        if kry.rank() < m:
            raise RuntimeError("e_1 is not cyclic")
        kinv = kry.inv()
        coeff = {}
        for p in primes_upto(want_bound):
            c = kinv * (restrict(T(p), B) * v)
            coeff[p] = flint.fmpq_poly([c[i, 0] for i in range(m)])
        minpoly = A.charpoly()
        forms.append(Newform(N, k, minpoly, coeff, eps))
    return forms


def _roots(poly):
    import numpy as np

    cs = [float(c) for c in reversed(poly.coeffs())]
    return np.roots(cs) if len(cs) > 1 else []
