"""Halting midpoint orbits and the polynomials that label them.

A beta whose midpoint orbit lands exactly on 1/2 after k steps is the
positive root of

    p_n(z) = z^(k+1) - b_0 z^k - b_1 z^(k-1) - ... - b_k

where b_0 ... b_k are the binary digits of 2n + 1 (most significant first,
so b_0 = b_k = 1).  Not every n produces such a beta; the admissible ones
are those whose root is correctly bracketed by the roots of their binary
ancestors n // 2, n // 4, ...  The number of admissible n with a
polynomial of degree p equals the number of binary necklaces (Lyndon
words) of length p.

The digits also drive integer recurrences ("beta-Fibonacci" sequences),
the shift matrix whose characteristic polynomial is p_n, and the
reciprocal q-series 1 - sum b_j zeta^(j+1) whose zeros in the unit disk
give transfer-operator eigenvalues.
"""

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import fixedpoint
from .core_maps import check_beta
from .errors import BitOutOfRange, Divergent, TroubleSpot
from .hessenberg import midpoint_orbit

ROOT_TIE_TOL = 1e-11
ORBIT_HALT_TOL = 1e-9


def _mobius(n):
    result = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            result = -result
        d += 1
    return -result if n > 1 else result


def necklace_count(n):
    """Number of binary necklaces of length n: (1/n) sum_{d|n} 2^d mu(n/d)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return sum(_mobius(n // d) * 2**d for d in range(1, n + 1) if n % d == 0) // n


def poly_bits(n):
    """Digits b_0 ... b_k of p_n: the binary expansion of 2n + 1."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return np.array([int(c) for c in format(2 * n + 1, "b")], dtype=np.uint8)


def poly_coeffs(bits):
    """Coefficients of z^(k+1) - sum b_j z^(k-j), highest power first."""
    b = np.asarray(bits, dtype=float)
    return np.concatenate([[1.0], -b])


def poly_eval(bits, z):
    """p(z) = z^(k+1) - sum_j b_j z^(k-j) by Horner's rule."""
    acc = np.ones_like(np.asarray(z), dtype=np.result_type(z, float))
    for b in bits:
        acc = acc * z - b
    return acc


@dataclass(frozen=True)
class OrbitPoly:
    """An admissible polynomial p_n with its unique positive root."""

    index: int
    bits: tuple
    root: float

    @property
    def degree(self):
        return len(self.bits)

    @property
    def binary(self):
        return "".join(str(b) for b in self.bits)


class _RootTable:
    """Positive roots of p_n for n = 0 .. size-1, grown on demand.

    All roots in a block are found together: 80 vectorised bisection steps
    on [1, 2] followed by 5 Newton steps.  p_0(z) = z - 1 has root 1.
    The table only ever grows, so sharing it between callers is safe.
    """

    def __init__(self):
        self.roots = np.array([1.0])

    def upto(self, size):
        if size > self.roots.size:
            ns = np.arange(self.roots.size, size)
            self.roots = np.concatenate([self.roots, _solve_block(ns)])
        return self.roots


def _solve_block(ns):
    m = 2 * ns + 1
    L = np.floor(np.log2(m)).astype(int)
    # guard against log2 rounding at exact powers of two
    L = np.where(m >> (L + 1) > 0, L + 1, L)
    L = np.where(m >> L == 0, L - 1, L)
    width = L.max() + 1
    bits = np.zeros((ns.size, width))
    for j in range(width):
        shift = L - j
        ok = shift >= 0
        bits[ok, j] = (m[ok] >> shift[ok]) & 1
    active = np.arange(width)[None, :] <= L[:, None]

    def p_and_dp(z):
        acc = np.ones_like(z)
        der = np.zeros_like(z)
        for j in range(width):
            act = active[:, j]
            der = np.where(act, der * z + acc, der)
            acc = np.where(act, acc * z - bits[:, j], acc)
        return acc, der

    lo = np.ones(ns.size)
    hi = np.full(ns.size, 2.0)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        pos = p_and_dp(mid)[0] > 0
        hi = np.where(pos, mid, hi)
        lo = np.where(pos, lo, mid)
    r = 0.5 * (lo + hi)
    for _ in range(5):
        f, df = p_and_dp(r)
        step = np.where(df != 0, f / np.where(df != 0, df, 1.0), 0.0)
        r_new = r - step
        r = np.where((r_new >= 1.0) & (r_new <= 2.0), r_new, r)
    return r


_ROOTS = _RootTable()


def _root(n):
    return float(_ROOTS.upto(n + 1)[n])


def is_admissible(n, roots=None):
    """The ancestor-bracketing test for index n >= 1.

    Walk the ancestors n // 2, n // 4, ...; whenever the child on the walk
    is even, its ancestor's root must not lie below root(n).  Roots that
    coincide with an ancestor's (to 1e-11) are duplicates and rejected.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    r = roots if roots is not None else _ROOTS.upto(n + 1)
    prev, anc = n, n // 2
    while anc > 0:
        if prev % 2 == 0 and r[anc] < r[n]:
            return False
        if abs(r[anc] - r[n]) < ROOT_TIE_TOL:
            return False
        prev, anc = anc, anc // 2
    return True


def admissible_polys(order):
    """All admissible p_n of degree ``order``, sorted by n.

    These are the indices 2^(order-2) <= n < 2^(order-1) passing
    ``is_admissible``.
    """
    if order < 2:
        raise ValueError("order must be at least 2")
    lo, hi = 2 ** (order - 2), 2 ** (order - 1)
    roots = _ROOTS.upto(hi)
    return [
        OrbitPoly(n, tuple(int(b) for b in poly_bits(n)), float(roots[n]))
        for n in range(lo, hi)
        if is_admissible(n, roots)
    ]


def orbit_poly(n):
    """The polynomial p_n (admissible or not) with its positive root."""
    return OrbitPoly(n, tuple(int(b) for b in poly_bits(n)), _root(n))


def positive_root(poly):
    """The unique root of p_n in (1, 2]."""
    if isinstance(poly, OrbitPoly):
        return poly.root
    return _root(int(poly))


def orbit_encoding(beta, k, tol=ORBIT_HALT_TOL):
    """Digits b_j = [m_j >= 1/2] of the midpoint orbit, at most ``k`` of them.

    The list ends early, with the final 1 of the halting point 1/2, if the
    orbit comes within ``tol`` of 1/2.  The default tolerance allows for
    the amplification of root round-off along orbits of length ~15.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    return midpoint_orbit(beta, k, tol=tol).bits


def beta_fibonacci(bits, m):
    """First ``m`` terms of F_j = sum_i b_i F_(j-1-i), started from F_0 = 1.

    Exact Python integers.  Terms F_(negative) are zero.  This is the
    sequence with generating function 1 / (1 - b_0 z - ... - b_k z^(k+1))
    (the leading zeros of the z^k-shifted form are dropped).
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    b = [int(x) for x in bits]
    if not b:
        raise ValueError("bits must be non-empty")
    F = [1]
    for j in range(1, m):
        F.append(sum(b[i] * F[j - 1 - i] for i in range(min(len(b), j)) if b[i]))
    return F


def beta_fibonacci_of(beta, m):
    """beta-Fibonacci sequence from the midpoint-orbit digits of ``beta``.

    The digits come from the exact fixed-point orbit of the decimal value
    of beta, so the sequence is correct however long it is.
    """
    beta = check_beta(beta)
    orb = midpoint_orbit(beta, max(m, 1), tol=0.0, backend="fixed")
    return beta_fibonacci(orb.bits, m)


def doubled_bits(bits):
    """b_0 .. b_(k-1), 0, b_0 .. b_k: a finite string twice as long."""
    b = [int(x) for x in bits]
    return np.array(b[:-1] + [0] + b, dtype=np.uint8)


def periodic_bits(bits, length):
    """The repeating string (b_0 .. b_(k-1), 0)^infinity, truncated."""
    b = [int(x) for x in bits]
    period = b[:-1] + [0]
    reps = -(-length // len(period))
    return np.array((period * reps)[:length], dtype=np.uint8)


def ogf_check(bits, m=40):
    """Coefficients of (sum_j z^j G_j) * (1 - sum_i b_i z^(i+1)) up to z^(m-1).

    G is the beta-Fibonacci sequence with k leading zeros, so the product
    is z^k exactly.  Returned as a list of integers.
    """
    b = [int(x) for x in bits]
    k = len(b) - 1
    G = [0] * k + beta_fibonacci(b, m)
    G = G[:m]
    q = [1] + [-x for x in b]
    return [sum(q[i] * G[j - i] for i in range(min(j, len(b)) + 1)) for j in range(m)]


def shift_matrix(poly):
    """(k+1) x (k+1) matrix with first column b and ones on the superdiagonal.

    Its characteristic polynomial is +/- p_n, and the top row of B^m is
    (F_m, F_(m-1), ..., F_(m-k)) for the beta-Fibonacci sequence.
    """
    bits = poly.bits if isinstance(poly, OrbitPoly) else poly_bits(int(poly))
    d = len(bits)
    B = np.zeros((d, d), dtype=np.int64)
    B[:, 0] = bits
    B[np.arange(d - 1), np.arange(1, d)] = 1
    return B


def matrix_power_exact(B, m):
    """B^m with arbitrary-precision integer entries."""
    M = np.asarray(B).astype(object)
    out = np.identity(M.shape[0], dtype=int).astype(object)
    for _ in range(m):
        out = out.dot(M)
    return out


def charpoly_check(B, samples=None):
    """max |det(B - xI) - (-1)^d p(x)| over d + 1 sample points in [0.5, 2]."""
    B = np.asarray(B, dtype=float)
    d = B.shape[0]
    bits = B[:, 0]
    xs = np.linspace(0.5, 2.0, samples or d + 1)
    sign = (-1) ** d
    res = [abs(np.linalg.det(B - x * np.eye(d)) - sign * poly_eval(bits, x)) for x in xs]
    return float(max(res))


def q_series(bits, zeta):
    """q(zeta) = 1 - sum_j b_j zeta^(j+1) for a finite digit string (exact)."""
    z = np.asarray(zeta, dtype=complex)
    acc = np.zeros_like(z)
    for b in reversed([int(x) for x in bits]):
        acc = (acc + b) * z
    out = 1.0 - acc
    return complex(out) if out.ndim == 0 else out


def q_series_periodic(bits, zeta):
    """q of the periodic string (b_0..b_(k-1), 0)^inf: q_fin / (1 - zeta^(k+1))."""
    z = np.asarray(zeta, dtype=complex)
    if np.any(np.abs(z) >= 1.0):
        raise Divergent("periodic q-series needs |zeta| < 1")
    out = q_series(bits, z) / (1.0 - z ** len(bits))
    return complex(out) if np.ndim(out) == 0 else out


def beta_q_series(beta, zeta, terms=400):
    """q for the (possibly infinite) midpoint-orbit digits of beta."""
    beta = check_beta(beta)
    z = complex(zeta)
    if abs(z) > 1.0:
        raise Divergent("the infinite q-series only converges for |zeta| <= 1")
    orb = midpoint_orbit(beta, terms)
    if orb.halt is not None:
        return q_series_periodic(orb.bits, z) if abs(z) < 1.0 else q_series(orb.bits, z)
    return q_series(orb.bits, z)


def q_zeros(bits, polish=3):
    """All zeros of the polynomial 1 - sum b_j zeta^(j+1), Newton-polished."""
    b = [int(x) for x in bits]
    coeffs = np.array([-x for x in reversed(b)] + [1.0])
    z = np.roots(coeffs).astype(complex)
    dcoeffs = np.polyder(coeffs)
    for _ in range(polish):
        d = np.polyval(dcoeffs, z)
        z = np.where(d != 0, z - np.polyval(coeffs, z) / np.where(d != 0, d, 1), z)
    return z[np.argsort(np.abs(z), kind="stable")]


def bshift_operator_eigencheck(poly, zero, rows=60):
    """Residual of the coherent vector v_j = zeta^j under the digit operator.

    The operator has <0|B|j> = b_j / beta and <j+1|B|j> = 1 / beta, where
    beta is the root of ``poly``.  With lambda = 1 / (beta zeta) the
    residual max_i |(Bv)_i - lambda v_i| vanishes exactly when
    q(zeta) = 0.
    """
    bits = np.asarray(poly.bits if isinstance(poly, OrbitPoly) else poly_bits(int(poly)), dtype=float)
    beta = positive_root(poly)
    z = complex(zero)
    if z == 0:
        raise ValueError("zeta must be non-zero")
    lam = 1.0 / (beta * z)
    v = z ** np.arange(rows)
    B = np.zeros((rows, rows))
    nb = min(rows, bits.size)
    B[0, :nb] = bits[:nb] / beta
    B[np.arange(1, rows), np.arange(rows - 1)] = 1.0 / beta
    return float(np.max(np.abs(B @ v - lam * v)))


def factor_coeffs(poly, root):
    """Cofactor of (z - r) in p_n: a_0 = 1, a_j = r a_(j-1) - b_(j-1).

    Equivalently a_j = r^j + sum_{i<j} c_i r^(j-1-i) with c_i = -b_i, so
    p_n(z) = (z - r) sum_j a_j z^(k-j).  Returns a_0 .. a_k.
    """
    bits = poly.bits if isinstance(poly, OrbitPoly) else poly_bits(int(poly))
    r = complex(root) if np.iscomplexobj(root) else float(root)
    a = [1.0]
    for b in bits[:-1]:
        a.append(r * a[-1] - b)
    return a


def hare_series(k, terms=60):
    """Root of z^(k+1) - z^k - ... - 1 (k+1 ones) by Lagrange inversion.

    With y = 1/alpha the defining equation becomes y = 1/2 + y^(k+2)/2,
    whose inversion gives

        1/alpha = 1/2 + (1/2) sum_{j>=1} (1/j) C(j(k+2), j-1) 2^(-j(k+2)).

    The terms decay like ((k+2)^(k+2) / ((k+1)^(k+1) 2^(k+2)))^j, which is
    slowest for k = 1 (ratio 27/32).  Summed exactly in rationals.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    e = k + 2
    s = Fraction(1, 2)
    for j in range(1, terms + 1):
        s += Fraction(math.comb(j * e, j - 1), 2 * j * 2 ** (j * e))
    return float(1 / s)


def midpoint_digits(beta, terms=600, bits=None):
    """c_p = 2 m_p - t^(p+1)(1) for p < terms, in integer fixed point.

    m_p comes from the beta-shift orbit of beta/2 and t^(p+1)(1) from the
    beta-transform orbit of 1; the two are iterated independently.  Since
    m_p = (beta/2) t^p(1), each c_p should be exactly a digit.  A value
    further than 2^-40 from 0 or 1 means the precision ran out and raises
    BitOutOfRange.
    """
    beta = check_beta(beta)
    if terms < 1:
        raise ValueError("terms must be positive")
    bits = bits or fixedpoint.bits_for_orbit(beta, terms + 1)
    one = 1 << bits
    half = one >> 1
    slack = one >> 40
    B = fixedpoint.to_fixed(beta, bits)
    X = B >> 1
    U = one
    out = np.empty(terms, dtype=np.uint8)
    for p in range(terms):
        U = (B * U) >> bits
        if U >= one:
            U -= one
        diff = 2 * X - U
        if abs(diff) <= slack:
            out[p] = 0
        elif abs(diff - one) <= slack:
            out[p] = 1
        else:
            raise BitOutOfRange(f"c_{p} = {diff / one!r} is not a digit")
        X = (B * X) >> bits if X < half else (B * (X - half)) >> bits
    return out


def midpoint_identity(beta, terms=600, bits=None):
    """|beta - sum_p c_p beta^(-p)| for the digits of ``midpoint_digits``.

    The sum is truncated after ``terms`` digits, so the residual is at
    most beta^(1-terms) / (beta - 1) plus rounding.  At beta = 2 every c_p
    is 1 and the residual is the geometric tail 2^(1 - terms).
    """
    beta = check_beta(beta)
    c = midpoint_digits(beta, terms, bits)
    total = 0.0
    for x in c[::-1]:
        total = total / beta + float(x)
    return abs(beta - total)


def midpoint_product(beta, terms):
    """Partial product prod_{p<terms} 4 m_p / beta over the midpoint orbit."""
    beta = check_beta(beta)
    if terms < 0:
        raise ValueError("terms must be non-negative")
    if terms == 0:
        return 1.0
    orb = midpoint_orbit(beta, terms)
    if orb.halt is not None:
        raise TroubleSpot(orb.halt)
    return float(np.prod(4.0 * orb.points / beta))


def poly_table(max_order, seq_terms=12):
    """Rows of the admissible-polynomial table as plain dicts."""
    rows = []
    for order in range(2, max_order + 1):
        for p in admissible_polys(order):
            rows.append(
                {
                    "index": p.index,
                    "binary": p.binary,
                    "degree": p.degree,
                    "root": p.root,
                    "sequence": beta_fibonacci(p.bits, seq_terms),
                }
            )
    return rows


def write_poly_table(path, max_order, seq_terms=12):
    with open(path, "w") as fh:
        json.dump(poly_table(max_order, seq_terms), fh, indent=1)
