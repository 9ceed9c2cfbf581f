"""The transfer operator in the midpoint wavelet basis.

The midpoint orbit m_0 = beta/2, m_{p+1} = T(m_p) cuts [0, beta/2] into
ever finer pieces.  Wavelet psi_p is a Haar-like step centred on m_p whose
support is bracketed by the nearest earlier midpoints (with 0 as an extra
sentinel below).  In this basis the transfer operator

    [L f](y) = (f(y/beta) + f(y/beta + 1/2)) / beta     for y <= beta/2

is upper Hessenberg: <n|L|m> = 0 whenever n > m + 1.

Matrix elements are exact.  The antiderivative of psi_m is a tent (or a
ramp for psi_0), so the integral of L psi_m over any interval is a
difference of tent values; <n|L|m> then combines four such differences.
"""

import bisect
import struct
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from . import fixedpoint
from .core_maps import check_beta
from .errors import NoConvergence, TroubleSpot
from .stepfn import StepFn

HALT_TOL = 1e-12


@dataclass(frozen=True)
class MidpointOrbit:
    """Points m_0, m_1, ... and the index k where m_k hit 1/2 (if any)."""

    beta: float
    points: np.ndarray
    halt: Optional[int] = None

    @property
    def bits(self):
        """Orbit encoding b_j = [m_j >= 1/2]; includes the halting 1/2."""
        return (self.points >= 0.5).astype(np.uint8)


def midpoint_orbit(beta, n, tol=HALT_TOL, backend="float", bits=None):
    """Up to ``n`` points of the midpoint orbit.

    The orbit stops early, with ``halt = k``, when |m_k - 1/2| < ``tol``;
    the halting point is then stored as exactly 1/2.

    ``backend="float"`` iterates in double precision.  Past roughly 60 steps
    this is a pseudo-orbit rather than the true one, but it is the orbit
    that published tables of spectral data were computed from.
    ``backend="fixed"`` runs the exact orbit of the decimal value of
    ``beta`` in integer fixed point; there ``tol=0`` demands exact equality.
    """
    beta = check_beta(beta)
    if n < 1:
        raise ValueError("n must be at least 1")
    pts = []
    halt = None
    if backend == "float":
        x = beta / 2.0
        for k in range(n):
            if abs(x - 0.5) < tol or x == 0.5:
                pts.append(0.5)
                halt = k
                break
            pts.append(x)
            x = beta * x if x < 0.5 else beta * (x - 0.5)
        return MidpointOrbit(beta, np.array(pts), halt)
    if backend != "fixed":
        raise ValueError(f"unknown backend {backend!r}")
    bits = bits or fixedpoint.bits_for_orbit(beta, n)
    scale = 1 << bits
    B = fixedpoint.to_fixed(beta, bits)
    H = scale >> 1
    tol_int = int(tol * scale)
    X = B >> 1
    for k in range(n):
        if abs(X - H) < tol_int or X == H:
            pts.append(0.5)
            halt = k
            break
        pts.append(fixedpoint.to_float(X, bits))
        X = (B * X) >> bits if X < H else (B * (X - H)) >> bits
    return MidpointOrbit(beta, np.array(pts), halt)


@dataclass(frozen=True)
class Wavelet:
    """psi_p: +C/(m_p - m_l) on [m_l, m_p], -C/(m_u - m_p) on (m_p, m_u].

    For p = 0 it is the constant 1/sqrt(beta/2) on [0, beta/2].
    """

    index: int
    lo: float
    center: float
    hi: float
    norm: float

    def antiderivative(self, x):
        """Integral of psi from 0 to x."""
        x = np.asarray(x, dtype=float)
        if self.index == 0:
            return np.clip(x, 0.0, self.hi) * self.norm
        return np.interp(x, [self.lo, self.center, self.hi], [0.0, self.norm, 0.0])

    def as_stepfn(self):
        if self.index == 0:
            return StepFn(np.array([0.0, self.hi]), np.array([self.norm]))
        return StepFn(
            np.array([self.lo, self.center, self.hi]),
            np.array([self.norm / (self.center - self.lo), -self.norm / (self.hi - self.center)]),
        )

    def __call__(self, x):
        return self.as_stepfn()(x)


def _brackets(points):
    """Nearest earlier midpoint below and above each m_p (p >= 1)."""
    top = points[0]
    seen = [0.0, top]
    lo = np.empty(points.size)
    hi = np.empty(points.size)
    lo[0], hi[0] = 0.0, top
    for p in range(1, points.size):
        m = points[p]
        i = bisect.bisect_left(seen, m)
        if seen[i] == m:
            raise TroubleSpot(p, f"midpoint m_{p} repeats an earlier midpoint")
        lo[p], hi[p] = seen[i - 1], seen[i]
        seen.insert(i, m)
    return lo, hi


def is_degenerate(beta):
    """beta = 2: every midpoint equals 1, so only psi_0 exists."""
    return check_beta(beta) == 2.0


def wavelet_basis(beta, n):
    """psi_0 ... psi_{n-1}; raises TroubleSpot if the orbit halts first.

    At beta = 2 the basis collapses to the single constant wavelet.
    """
    beta = check_beta(beta)
    s0 = 1.0 / np.sqrt(beta / 2.0)
    if is_degenerate(beta) or n == 1:
        return [Wavelet(0, 0.0, beta / 2.0, beta / 2.0, s0)]
    orb = midpoint_orbit(beta, n)
    if orb.halt is not None and orb.halt < n:
        raise TroubleSpot(orb.halt)
    m = orb.points
    lo, hi = _brackets(m)
    C = np.sqrt((m - lo) * (hi - m) / (hi - lo))
    basis = [Wavelet(0, 0.0, beta / 2.0, beta / 2.0, s0)]
    basis += [Wavelet(p, lo[p], m[p], hi[p], C[p]) for p in range(1, n)]
    return basis


@dataclass
class HessMatrix:
    """Truncated transfer-operator matrix with its wavelet basis."""

    beta: float
    entries: np.ndarray
    basis: list = field(repr=False)
    degenerate: bool = False

    @property
    def dim(self):
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def to_csv(self, path):
        """Row-major CSV with full precision ("%.17g")."""
        np.savetxt(path, self.entries, fmt="%.17g", delimiter=",")

    def to_binary(self, path):
        """Two little-endian uint32 dims, then row-major little-endian f64."""
        write_binary(path, self.entries)


def write_binary(path, a):
    a = np.asarray(a, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(struct.pack("<II", *a.shape))
        fh.write(np.ascontiguousarray(a).tobytes())


def read_binary(path):
    with open(path, "rb") as fh:
        rows, cols = struct.unpack("<II", fh.read(8))
        return np.frombuffer(fh.read(), dtype="<f8").reshape(rows, cols).copy()


def _G(w, beta, y):
    """Integral of L psi over [0, y] for y <= beta/2."""
    yb = np.asarray(y) / beta
    return w.antiderivative(yb) + w.antiderivative(yb + 0.5) - w.antiderivative(0.5)


def _column(basis, beta, m, rows):
    """<n|L|m> for n in ``rows`` (all >= 0)."""
    w = basis[m]
    out = np.empty(len(rows))
    lo = np.array([basis[n].lo for n in rows])
    ce = np.array([basis[n].center for n in rows])
    hi = np.array([basis[n].hi for n in rows])
    C = np.array([basis[n].norm for n in rows])
    g_lo, g_ce, g_hi = _G(w, beta, lo), _G(w, beta, ce), _G(w, beta, hi)
    r0 = rows == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        val = C * ((g_ce - g_lo) / (ce - lo) - (g_hi - g_ce) / (hi - ce))
    out[:] = np.where(r0, C * (g_ce - g_lo), val)
    return out


def operator_matrix(beta, n, full=False):
    """N x N matrix <i|L|j> in the midpoint wavelet basis.

    Only entries with i <= j + 1 are computed; the rest are set to exactly
    zero.  ``full=True`` evaluates every entry instead (used to confirm
    numerically that the skipped ones really vanish).
    """
    beta = check_beta(beta)
    basis = wavelet_basis(beta, n)
    if len(basis) == 1:
        return HessMatrix(beta, np.ones((1, 1)), basis, degenerate=is_degenerate(beta))
    A = np.zeros((n, n))
    for j in range(n):
        last = n if full else min(j + 2, n)
        rows = np.arange(last)
        A[:last, j] = _column(basis, beta, j, rows)
    return HessMatrix(beta, A, basis)


def assert_hessenberg(A):
    """Raise if any entry below the first sub-diagonal is non-zero."""
    a = np.asarray(A)
    if np.any(np.tril(a, -2) != 0):
        raise AssertionError("matrix is not upper Hessenberg")
    return True


def spectrum(matrix):
    """All eigenvalues (dense Francis QR via LAPACK), largest modulus first."""
    a = np.asarray(matrix, dtype=float)
    try:
        ev = scipy.linalg.eigvals(a, check_finite=True)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    return ev[np.argsort(-np.abs(ev), kind="stable")]


def fp_vector(matrix):
    """Coefficients of the invariant density in the wavelet basis.

    Row 0 of the matrix is e_0 (L preserves the integral), so 1 is an exact
    eigenvalue of every truncation.  The eigenvector is obtained by fixing
    v_0 = 1/sqrt(beta/2), which gives the expansion unit integral, and
    solving the remaining rows of (A - I) v = 0.
    """
    a = np.asarray(matrix, dtype=float)
    beta = matrix.beta if isinstance(matrix, HessMatrix) else None
    n = a.shape[0]
    v0 = 1.0 / np.sqrt(beta / 2.0) if beta is not None else 1.0
    v = np.zeros(n)
    v[0] = v0
    if n > 1:
        M = a[1:, 1:] - np.eye(n - 1)
        v[1:] = scipy.linalg.solve(M, -a[1:, 0] * v0)
    return v


def expansion(basis, coeffs):
    """The step function sum_m coeffs[m] psi_m."""
    pts = [0.0]
    for w in basis[: len(coeffs)]:
        pts += [w.lo, w.center, w.hi]
    b = np.unique(pts)
    mids = 0.5 * (b[1:] + b[:-1])
    vals = np.zeros(mids.size)
    for c, w in zip(coeffs, basis):
        vals += c * w(mids)
    return StepFn(b, vals)


def fp_density(matrix):
    """Invariant density reconstructed from ``fp_vector``."""
    return expansion(matrix.basis, fp_vector(matrix))


def gen_function_zeros(v, N=None):
    """Zeros of the truncated generating function sum_{m<N} v_m z^m."""
    c = np.asarray(v)[: (N or len(v))]
    if c.size < 2:
        return np.array([], dtype=complex)
    return np.roots(c[::-1]).astype(complex)


def wavelet_moments(beta, p, n):
    """Integral of x^(n-1) psi_p(x) over [0, 1], in closed form."""
    if n < 1:
        raise ValueError("n must be at least 1")
    w = wavelet_basis(beta, p + 1)[p]
    if p == 0:
        return w.norm * w.hi**n / n
    ml, mp, mu = w.lo, w.center, w.hi
    return w.norm / n * ((mp**n - ml**n) / (mp - ml) - (mu**n - mp**n) / (mu - mp))


def identity_resolution_check(beta, N, f):
    """L2 distance between ``f`` and its projection on psi_0..psi_{N-1}."""
    basis = wavelet_basis(beta, N)
    coeffs = [f.inner(w.as_stepfn()) for w in basis]
    proj = expansion(basis, coeffs)
    b, u, v = f.merge(proj)
    return float(np.sqrt(np.sum((u - v) ** 2 * np.diff(b))))


def gram_matrix(basis):
    """Exact pairwise inner products of a list of wavelets."""
    sf = [w.as_stepfn() for w in basis]
    n = len(sf)
    g = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            g[i, j] = g[j, i] = sf[i].inner(sf[j])
    return g
