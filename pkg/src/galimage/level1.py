"""Cusp forms of level one, modulo ell or over Z.

Bases come from Eisenstein series and Delta (the Victor Miller construction),
Hecke operators act through the usual coefficient formula, and the occurrence
test intersects kernels of T_r - lambda_r over F_ell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import ffarith as ff
from .errors import DenominatorAtEll, InsufficientPrecision, OddWeight


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """B_n with B_1 = -1/2, via sum_{j<=n} C(n+1, j) B_j = 0."""
    if n == 0:
        return Fraction(1)
    acc = sum(math.comb(n + 1, j) * bernoulli(j) for j in range(n))
    return -acc / (n + 1)


def dim_cusp_level1(k: int) -> int:
    if k % 2:
        raise OddWeight(f"weight {k} is odd")
    if k < 12:
        return 0
    return k // 12 - (1 if k % 12 == 2 else 0)


class QSeries:
    """Truncated q-expansion a_0 + a_1 q + ... + a_{B-1} q^{B-1}.

    With modulus=None the coefficients are exact integers (object dtype).
    """

    __slots__ = ("coeffs", "modulus")

    def __init__(self, coeffs, modulus: int | None = None):
        if modulus is None:
            arr = np.array([int(c) for c in coeffs], dtype=object)
        elif modulus < 1 << 20:
            arr = np.asarray(coeffs, dtype=np.int64) % modulus
        else:
            arr = np.array([int(c) % modulus for c in coeffs], dtype=object)
        self.coeffs = arr
        self.modulus = modulus

    @property
    def precision(self) -> int:
        return len(self.coeffs)

    def _wrap(self, arr):
        out = QSeries.__new__(QSeries)
        out.coeffs = arr % self.modulus if self.modulus else arr
        out.modulus = self.modulus
        return out

    def _check(self, other):
        if self.modulus != other.modulus:
            raise ValueError("q-series over different coefficient rings")
        return min(self.precision, other.precision)

    def __add__(self, other):
        B = self._check(other)
        return self._wrap(self.coeffs[:B] + other.coeffs[:B])

    def __sub__(self, other):
        B = self._check(other)
        return self._wrap(self.coeffs[:B] - other.coeffs[:B])

    def __mul__(self, other):
        if isinstance(other, int):
            return self._wrap(self.coeffs * other)
        B = self._check(other)
        return self._wrap(np.convolve(self.coeffs[:B], other.coeffs[:B])[:B])

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = self._wrap(np.array([1] + [0] * (self.precision - 1), dtype=self.coeffs.dtype))
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __getitem__(self, n):
        if n >= self.precision:
            raise InsufficientPrecision(n + 1, self.precision)
        return int(self.coeffs[n])

    def __eq__(self, other):
        return isinstance(other, QSeries) and self.modulus == other.modulus and \
            self.precision == other.precision and all(int(a) == int(b) for a, b in zip(self.coeffs, other.coeffs))

    def __repr__(self):
        head = ", ".join(str(int(c)) for c in self.coeffs[:8])
        return f"QSeries([{head}, ...], B={self.precision}, mod={self.modulus})"


def _sigma_table(k: int, B: int, modulus):
    out = [0] * B
    for d in range(1, B):
        dk = pow(d, k, modulus) if modulus else d ** k
        for m in range(d, B, d):
            out[m] += dk
    return out


def eisenstein(k: int, B: int, modulus: int | None = None) -> QSeries:
    """E_k = 1 - (2k / B_k) sum sigma_{k-1}(n) q^n."""
    c = Fraction(-2 * k) / bernoulli(k)
    if modulus is not None and c.denominator % modulus == 0:
        raise DenominatorAtEll(f"E_{k} has denominator {c.denominator} divisible by {modulus}")
    if c.denominator != 1 and modulus is None:
        raise ValueError(f"E_{k} is not integral")
    cm = c.numerator * (pow(c.denominator, -1, modulus) if modulus else 1)
    sig = _sigma_table(k - 1, B, modulus)
    return QSeries([1] + [cm * s for s in sig[1:]], modulus)


def delta_product(B: int, modulus: int | None = None) -> QSeries:
    """q prod (1 - q^n)^24, integral by construction."""
    coeffs = [0] * B
    if B > 1:
        coeffs[1] = 1
    series = QSeries(coeffs, modulus)
    for n in range(1, B):
        factor = [0] * B
        factor[0] = 1
        factor[n] = -1
        series = series * QSeries(factor, modulus) ** 24
    return series


def delta(B: int, modulus: int | None = None) -> QSeries:
    """(E_4^3 - E_6^2) / 1728, or the product formula when 1728 is not invertible."""
    if modulus is not None and 1728 % modulus == 0:
        return delta_product(B, modulus)
    e4, e6 = eisenstein(4, B, modulus), eisenstein(6, B, modulus)
    diff = e4 ** 3 - e6 ** 2
    if modulus is None:
        if any(int(c) % 1728 for c in diff.coeffs):
            raise ValueError("E4^3 - E6^2 not divisible by 1728")
        return QSeries([int(c) // 1728 for c in diff.coeffs], None)
    return diff * pow(1728, -1, modulus)


@dataclass
class VMBasis:
    weight: int
    modulus: int | None
    forms: list

    @property
    def dim(self) -> int:
        return len(self.forms)

    @property
    def precision(self) -> int:
        return self.forms[0].precision if self.forms else 0


_E_REST = {0: (0, 0), 4: (1, 0), 6: (0, 1), 8: (2, 0), 10: (1, 1), 14: (2, 1)}


def vm_basis(k: int, ell: int | None, B: int) -> VMBasis:
    """Echelon basis g_1..g_d of S_k(SL2(Z)) with a_i(g_j) = delta_ij, 1 <= i, j <= d.

    ell=None runs the exact integer pipeline.
    """
    d = dim_cusp_level1(k)
    if d == 0:
        return VMBasis(k, ell, [])
    if B < d + 1:
        raise InsufficientPrecision(d + 1, B)
    a, b = _E_REST[k - 12 * d]
    try:
        e4, e6 = eisenstein(4, B, ell), eisenstein(6, B, ell)
        D = delta(B, ell)
    except DenominatorAtEll:
        e4 = e6 = None
        D = delta_product(B, ell)
    if e4 is None and (a or b or d > 1):
        raise DenominatorAtEll(f"weight {k} needs Eisenstein series that do not reduce mod {ell}")
    rest = (e4 ** a if a else None)
    if b:
        rest = e6 ** b if rest is None else rest * e6 ** b
    e6sq = e6 ** 2 if d > 1 else None
    forms = []
    for j in range(1, d + 1):
        g = D ** j
        if d - j:
            g = g * e6sq ** (d - j)
        if rest is not None:
            g = g * rest
        forms.append(g)
    # clear the coefficients a_i for i > j against later forms, bottom-up
    for j in range(d - 1, -1, -1):
        for i in range(j + 1, d):
            c = forms[j][i + 1]
            if c:
                forms[j] = forms[j] - forms[i] * c
    return VMBasis(k, ell, forms)


def _hecke_coeff(g: QSeries, m: int, n: int, k: int, modulus) -> int:
    """a_m(T_n g) = sum_{e | gcd(m, n)} e^{k-1} a_{mn/e^2}(g)."""
    total = 0
    for e in ff.divisors(math.gcd(m, n)):
        w = pow(e, k - 1, modulus) if modulus else e ** (k - 1)
        total += w * g[m * n // (e * e)]
    return total % modulus if modulus else total


def hecke_matrix(basis: VMBasis, n: int) -> list[list[int]]:
    """Matrix of T_n in the echelon coordinates: entry (i, j) = a_i(T_n g_j)."""
    d = basis.dim
    if d == 0:
        return []
    if basis.precision < n * d + 1:
        raise InsufficientPrecision(n * d + 1, basis.precision)
    return [[_hecke_coeff(basis.forms[j], i + 1, n, basis.weight, basis.modulus) for j in range(d)]
            for i in range(d)]


def required_precision(ell: int, r_max: int) -> int:
    weights = [k for k in range(12, ell + 3, 2) if dim_cusp_level1(k)]
    d_max = max((dim_cusp_level1(k) for k in weights), default=0)
    # T_r reads index m*r for m <= d; one extra block of r keeps a margin
    return max(d_max * r_max + 1, r_max * (d_max + 1))


@dataclass(frozen=True)
class CellResult:
    weight: int
    twist: int
    kernel_dims: tuple       # dim W after each test prime, in scan order
    eliminating_prime: int | None

    @property
    def survives(self) -> bool:
        return self.eliminating_prime is None


def kernel_scan(mats: dict, eigen: dict, order: list, twist: int, ell: int, d: int) -> tuple:
    """Successive dims of the intersection of ker(T_r - r^twist c_r) over the scan."""
    rows: list = []
    dims = []
    for r in order:
        lam = pow(r, twist, ell) * eigen[r] % ell
        T = mats[r]
        rows += [[(T[i][j] - (lam if i == j else 0)) % ell for j in range(d)] for i in range(d)]
        rows, _ = ff.rref(rows, ell)
        dims.append(d - len(rows))
        if dims[-1] == 0:
            break
    return tuple(dims)


def weight_cells(ell: int) -> list[int]:
    return [k for k in range(12, ell + 3, 2) if dim_cusp_level1(k) > 0]


@lru_cache(maxsize=64)
def _hecke_data(k: int, ell: int, B: int, primes: tuple) -> tuple:
    """Dimension and T_r matrices for one weight; pure, so memoised across scans."""
    basis = vm_basis(k, ell, B)
    return basis.dim, {r: hecke_matrix(basis, r) for r in primes}


def eigensystem_scan(eigen: dict, order: list, ell: int, B: int | None = None) -> list[CellResult]:
    """Run the occurrence test for every weight in [12, ell + 2] and twist in [0, ell - 2].

    eigen maps each test prime r to c_r = a_r(f) mod lambda; order is the scan order.
    """
    cells = []
    if not order:
        return [CellResult(k, j, (), None) for k in weight_cells(ell) for j in range(ell - 1)]
    B = B or required_precision(ell, max(order))
    for k in weight_cells(ell):
        d, mats = _hecke_data(k, ell, B, tuple(sorted(set(order))))
        for j in range(ell - 1):
            dims = kernel_scan(mats, eigen, order, j, ell, d)
            elim = order[len(dims) - 1] if dims and dims[-1] == 0 else None
            cells.append(CellResult(k, j, dims, elim))
    return cells


def eigensystem_occurs(f, lam, test_primes, B: int | None = None) -> list[tuple[int, int]]:
    """Pairs (k', j) whose eigensystem could be congruent to f mod lambda."""
    from .nfresidue import reduce

    eigen = {r: reduce(f.a(r), lam) for r in test_primes}
    return [(c.weight, c.twist) for c in eigensystem_scan(eigen, list(test_primes), lam.ell, B) if c.survives]
