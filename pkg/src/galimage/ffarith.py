"""Arithmetic over prime fields F_p: elements, polynomials, small matrices.

Field elements are plain ints in [0, p).  Polynomials are tuples of field
elements, lowest degree first, with no trailing zeros (the zero polynomial is
the empty tuple).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache

from .errors import NotSquarefree

WORD_LIMIT = 1 << 31

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24 (covers 64-bit)."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    if n % 2 == 0:
        return 2
    rng = random.Random(n)
    while True:
        c = rng.randrange(1, n)
        f = lambda x: (x * x + c) % n
        x = y = rng.randrange(2, n)
        d = 1
        while d == 1:
            x = f(x)
            y = f(f(y))
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d


@lru_cache(maxsize=4096)
def factorint(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorisation as ((p, e), ...) with p increasing."""
    if n < 1:
        raise ValueError("factorint needs a positive integer")
    out: dict[int, int] = {}
    for p in (2, 3, 5, 7, 11, 13):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    p = 17
    while n > 1 and p * p <= n and p < 10000:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 2
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
        else:
            d = _pollard_rho(m)
            stack += [d, m // d]
    return tuple(sorted(out.items()))


def prime_divisors(n: int) -> list[int]:
    return [p for p, _ in factorint(n)]


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorint(n):
        divs = [d * p ** i for d in divs for i in range(e + 1)]
    return sorted(divs)


def euler_phi(n: int) -> int:
    out = n
    for p in prime_divisors(n) if n > 1 else ():
        out = out // p * (p - 1)
    return out


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, math.isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, n + 1, i)))
    return [i for i in range(n + 1) if sieve[i]]


def primitive_root(pe: int) -> int:
    """Smallest primitive root modulo an odd prime power (or 2, 4)."""
    if pe in (2, 4):
        return pe - 1
    (p, e), = factorint(pe)
    if p == 2:
        raise ValueError("no primitive root modulo 2^e for e >= 3")
    qs = prime_divisors(p - 1)
    g = next(g for g in range(2, p) if all(pow(g, (p - 1) // q, p) != 1 for q in qs))
    if e > 1 and pow(g, p - 1, p * p) == 1:
        g += p
    return g


def unit_generators(n: int) -> list[int]:
    """One generator per cyclic factor of (Z/n)^x, CRT-lifted to 1 elsewhere."""
    gens = []
    for p, e in factorint(n) if n > 1 else ():
        pe = p ** e
        if p == 2:
            local = [] if e == 1 else ([pe - 1] if e == 2 else [pe - 1, 5])
        else:
            local = [primitive_root(pe)]
        idem = (n // pe) * pow(n // pe, -1, pe) % n if pe != n else 1
        gens.extend((g * idem + 1 - idem) % n for g in local)
    return gens


def multiplicative_order(a: int, p: int) -> int:
    """Order of a in F_p^x."""
    a %= p
    if a == 0:
        raise ZeroDivisionError("0 has no multiplicative order")
    order = p - 1
    for q, _ in factorint(p - 1) if p > 2 else ():
        while order % q == 0 and pow(a, order // q, p) == 1:
            order //= q
    return order


@dataclass(frozen=True)
class PrimeField:
    """The prime field F_modulus."""

    modulus: int

    def __post_init__(self):
        if not isinstance(self.modulus, int) or not is_prime(self.modulus):
            raise ValueError(f"{self.modulus!r} is not prime")
        if self.modulus >= WORD_LIMIT:
            raise ValueError(f"modulus {self.modulus} exceeds the word-size limit 2^31")

    def __call__(self, a: int) -> int:
        return a % self.modulus

    def add(self, a, b):
        return (a + b) % self.modulus

    def sub(self, a, b):
        return (a - b) % self.modulus

    def mul(self, a, b):
        return a * b % self.modulus

    def neg(self, a):
        return -a % self.modulus

    def inv(self, a):
        return pow(a, -1, self.modulus)

    def pow(self, a, e):
        return pow(a, e, self.modulus)


def is_square(a: int, field: PrimeField) -> bool:
    p = field.modulus
    a %= p
    if p == 2 or a == 0:
        return True
    return pow(a, (p - 1) // 2, p) == 1


def quad_irreducible(t: int, d: int, field: PrimeField) -> bool:
    """Whether x^2 - t x + d has no root in the field."""
    p = field.modulus
    t, d = t % p, d % p
    if p == 2:
        return all((x * x - t * x + d) % 2 for x in (0, 1))
    disc = (t * t - 4 * d) % p
    return disc != 0 and not is_square(disc, field)


# -- polynomials --------------------------------------------------------------

def poly(coeffs, p: int) -> tuple[int, ...]:
    """Normalise integer coefficients (lowest degree first) into F_p[x]."""
    out = [c % p for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def deg(a) -> int:
    return len(a) - 1


def poly_add(a, b, p):
    n = max(len(a), len(b))
    return poly([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)], p)


def poly_sub(a, b, p):
    n = max(len(a), len(b))
    return poly([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)], p)


def poly_scale(a, c, p):
    return poly([x * c for x in a], p)


def poly_mul(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return poly(out, p)


def poly_divmod(a, b, p):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1] * inv % p
        q[i] = c
        if c:
            for j, y in enumerate(b):
                a[i + j] = (a[i + j] - c * y) % p
    return poly(q, p), poly(a[: len(b) - 1], p)


def poly_rem(a, b, p):
    return poly_divmod(a, b, p)[1]


def poly_monic(a, p):
    return poly_scale(a, pow(a[-1], -1, p), p) if a else a


def poly_gcd(a, b, p):
    while b:
        a, b = b, poly_rem(a, b, p)
    return poly_monic(a, p)


def poly_deriv(a, p):
    return poly([i * c for i, c in enumerate(a)][1:], p)


def poly_eval(a, x, p):
    acc = 0
    for c in reversed(a):
        acc = (acc * x + c) % p
    return acc


def poly_powmod(base, e, mod, p):
    result = (1,)
    base = poly_rem(base, mod, p)
    while e:
        if e & 1:
            result = poly_rem(poly_mul(result, base, p), mod, p)
        base = poly_rem(poly_mul(base, base, p), mod, p)
        e >>= 1
    return result


def resultant(a, b, p: int) -> int:
    """Res(a, b) over F_p by the Euclidean algorithm."""
    if not a or not b:
        return 0
    res = 1
    while True:
        da, db = deg(a), deg(b)
        if db == 0:
            return res * pow(b[0], da, p) % p
        r = poly_rem(a, b, p)
        if not r:
            return 0
        if da % 2 and db % 2:
            res = -res
        res = res * pow(b[-1], da - deg(r), p) % p
        a, b = b, r


def roots(a, p: int) -> list[int]:
    """Sorted roots in F_p of a nonzero polynomial."""
    a = poly_monic(a, p)
    if deg(a) <= 0:
        return []
    if p < 64:
        return [x for x in range(p) if poly_eval(a, x, p) == 0]
    x = (0, 1)
    g = poly_gcd(a, poly_sub(poly_powmod(x, p, a, p), x, p), p)
    found: list[int] = []
    rng = random.Random(p)
    stack = [g]
    while stack:
        h = stack.pop()
        if deg(h) == 0:
            continue
        if deg(h) == 1:
            found.append(-h[0] % p)
            continue
        while True:
            shift = rng.randrange(p)
            w = poly_powmod((shift, 1), (p - 1) // 2, h, p)
            s = poly_gcd(h, poly_sub(w, (1,), p), p)
            if 0 < deg(s) < deg(h):
                stack += [s, poly_divmod(h, s, p)[0]]
                break
    return sorted(found)


def factor_degree_pattern(coeffs, r: int) -> list[int]:
    """Degrees of the irreducible factors of an integer polynomial mod r.

    Distinct-degree splitting via gcd(x^(r^d) - x, f); no full factorisation.
    """
    f = poly_monic(poly(coeffs, r), r)
    if deg(f) < 1:
        return []
    if deg(poly_gcd(f, poly_deriv(f, r), r)) > 0:
        raise NotSquarefree(f"polynomial is not squarefree modulo {r}")
    x = (0, 1)
    h = x
    pattern: list[int] = []
    d = 0
    while deg(f) > 0:
        d += 1
        if 2 * d > deg(f):
            pattern.append(deg(f))
            break
        h = poly_powmod(h, r, f, r)
        g = poly_gcd(f, poly_sub(h, x, r), r)
        if deg(g) > 0:
            pattern += [d] * (deg(g) // d)
            f = poly_divmod(f, g, r)[0]
            h = poly_rem(h, f, r) if deg(f) > 0 else h
    return sorted(pattern)


# -- matrices -------------------------------------------------------------------

def rref(rows, p: int):
    """Reduced row echelon form; returns (rows, pivot columns)."""
    m = [[x % p for x in row] for row in rows]
    ncols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [x * inv % p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def nullspace(rows, ncols: int, p: int) -> list[list[int]]:
    """Basis of {v : rows * v = 0} as a list of column vectors."""
    if not rows:
        return [[int(i == j) for i in range(ncols)] for j in range(ncols)]
    red, pivots = rref(rows, p)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for row, pc in zip(red, pivots):
            v[pc] = -row[f] % p
        basis.append(v)
    return basis


def mat_mul(a, b, p: int):
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) % p for col in bt] for row in a]
