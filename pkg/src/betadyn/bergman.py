"""Polynomials generated by a Hessenberg matrix, and their moment matrix.

An unreduced upper-Hessenberg matrix A defines polynomials through

    z p_n(z) = sum_{k <= n+1} A_{kn} p_k(z),      p_0 = 1,

so the vector p(z) = (p_n(z)) is a left eigenvector of A for every z.
Collecting coefficients p_n(z) = sum_k p_{nk} z^k gives a lower-triangular
matrix P; its inverse R expresses the monomials in the p-basis
(z^n = sum_k r_{nk} p_k), and M = R R^T is the associated moment matrix.

The diagonal p_{nn} grows like beta^n for the transfer operator of the beta
shift, so coefficients are stored divided by scale^n (``PolyMatrix.scale``);
every routine here works on the scaled form.
"""

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import NoLimit, ReducibleMatrix
from .hessenberg import HessMatrix, operator_matrix

RATIO_WINDOW = 20
RATIO_SPREAD = 1e-4
JUMP_THRESHOLD = 0.05


@dataclass
class PolyMatrix:
    """Lower-triangular coefficients; true entry [n, k] = scaled[n, k] * scale**n."""

    scaled: np.ndarray
    scale: float = 1.0

    @property
    def N(self):
        return self.scaled.shape[0]

    @property
    def coeffs(self):
        """Unscaled coefficients (may overflow for large N)."""
        n = np.arange(self.N, dtype=float)
        return self.scaled * (self.scale ** n)[:, None]

    def evaluate(self, z):
        """Scaled values p_n(z) / scale^n for n < N."""
        z = complex(z)
        powers = z ** np.arange(self.N)
        return self.scaled @ powers

    def column_sums(self):
        """sum_k p_{nk}, i.e. p_n(1), divided by scale^n."""
        return self.scaled.sum(axis=1)


@dataclass
class MomentMatrix:
    entries: np.ndarray

    @property
    def N(self):
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)


@dataclass
class Asymptotics:
    """Limits of the moment matrix: row ratio C, entry limit B, point weight A."""

    C: float
    B: float
    A: float
    diagnostics: dict = field(default_factory=dict, repr=False)


def _entries(A):
    a = np.asarray(A, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    return a


def bergman_polys(A, N, scale=None):
    """Coefficient matrix of p_0 .. p_{N-1} generated by the Hessenberg matrix A.

    Uses A_{n+1,n} p_{n+1,j} = p_{n,j-1} - sum_{k<=n} A_{kn} p_{kj}.  A must be
    at least N x N (entries up to A_{N-1,N-2} are used).  ``scale`` defaults
    to the beta of a HessMatrix, else 1.
    """
    if scale is None:
        scale = A.beta if isinstance(A, HessMatrix) else 1.0
    a = _entries(A)
    if N < 1 or a.shape[0] < N:
        raise ValueError("need 1 <= N <= dimension of A")
    sub = np.diagonal(a, -1)[: N - 1]
    bad = np.nonzero(sub == 0)[0]
    if bad.size:
        raise ReducibleMatrix(f"sub-diagonal entry A[{bad[0] + 1},{bad[0]}] is zero")
    s = float(scale)
    Q = np.zeros((N, N))
    Q[0, 0] = 1.0
    for n in range(N - 1):
        row = np.zeros(N)
        row[1:] = Q[n, :-1]
        w = a[: n + 1, n] * s ** (np.arange(n + 1) - n)
        row -= w @ Q[: n + 1]
        Q[n + 1] = row / (s * a[n + 1, n])
    return PolyMatrix(Q, s)


def poly_inverse(P):
    """R = P^{-1} by forward substitution: p_nn r_nm = -sum_{m<=k<n} p_nk r_km.

    The recurrence is invariant under scaling rows of P, so it runs on the
    scaled coefficients; R itself is returned unscaled (scale 1).
    """
    Q = P.scaled
    N = P.N
    d = np.diagonal(Q)
    if np.any(d == 0):
        raise ValueError("diagonal must be non-zero")
    R = np.zeros((N, N))
    for n in range(N):
        R[n, n] = 1.0 / (d[n] * P.scale**n)
        for m in range(n):
            R[n, m] = -(Q[n, m:n] @ R[m:n, m]) / d[n]
    return PolyMatrix(R, 1.0)


def triangular_residual(P, R):
    """max |(P R - I)_{nm}| / scale^n: the product residual with each row of P
    divided by its growth factor, so that all rows are O(1)."""
    N = P.N
    target = np.diag(P.scale ** -np.arange(N, dtype=float))
    return float(np.max(np.abs(P.scaled @ R.scaled - target)))


def monomial_rows(A, N):
    """Rows A^n e_0, n < N: the p-basis coefficients of z^n.

    Multiplying z^n = sum_k c_k p_k by z and applying the recurrence gives
    c -> A c, so these rows equal the rows of R = P^{-1} without inverting
    anything.  Used as an independent check on ``poly_inverse``.
    """
    a = _entries(A)
    out = np.zeros((N, N))
    v = np.zeros(a.shape[0])
    v[0] = 1.0
    for n in range(N):
        out[n] = v[:N]
        v = a @ v
    return out


def moment_matrix(R):
    """M = R R^T."""
    r = R.scaled if isinstance(R, PolyMatrix) else np.asarray(R, dtype=float)
    return MomentMatrix(r @ r.T)


def _richardson(ratios):
    """Aitken-accelerated tail of a ratio sequence (raw value where it stalls)."""
    r = np.asarray(ratios)
    d1 = r[1:-1] - r[:-2]
    d2 = r[2:] - 2 * r[1:-1] + r[:-2]
    out = r[2:].copy()
    ok = np.abs(d2) > 1e-14 * np.maximum(1.0, np.abs(r[2:]))
    out[ok] = r[:-2][ok] - d1[ok] ** 2 / d2[ok]
    # reject accelerations that leave the hull of the data they came from
    lo = np.minimum(np.minimum(r[:-2], r[1:-1]), r[2:])
    hi = np.maximum(np.maximum(r[:-2], r[1:-1]), r[2:])
    wild = (out < lo - np.abs(hi - lo)) | (out > hi + np.abs(hi - lo))
    out[wild] = r[2:][wild]
    return out


def asymptotics(M, window=RATIO_WINDOW, columns=4, spread_tol=RATIO_SPREAD):
    """Estimate C = lim M_{nm}/M_{n-1,m}, B = lim M_{nm}, A = lim M_{nm}/C^{n+m+1}.

    The last ``window`` row ratios of the first ``columns`` columns are
    Aitken-extrapolated.  C is their median and the spread (max - min) must
    stay below ``spread_tol``, otherwise NoLimit is raised with the
    estimates attached.  B is the mean of the last row over those columns;
    A is the point-mass weight fitted to the same entries.
    """
    m = np.asarray(M, dtype=float)
    N = m.shape[0]
    if N < window + 3:
        raise ValueError(f"need at least {window + 3} rows")
    cols = range(min(columns, N))
    est = []
    raw = []
    for c in cols:
        col = m[N - window - 1 :, c]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = col[1:] / col[:-1]
        raw.append(ratios)
        est.append(_richardson(ratios))
    est = np.array(est)
    diag = {"estimates": est, "ratios": np.array(raw)}
    if not np.all(np.isfinite(est)):
        raise NoLimit("row ratios are not finite", diag)
    spread = float(est.max() - est.min())
    diag["spread"] = spread
    if spread > spread_tol:
        raise NoLimit(f"row ratios did not stabilise (spread {spread:.3g})", diag)
    C = float(np.median(est))
    last = np.array([m[N - 1, c] for c in cols])
    B = float(last.mean())
    A = float(np.mean([m[N - 1, c] / C ** (N - 1 + c + 1) for c in cols]))
    return Asymptotics(C, B, A, diag)


def moment_asymptotics(beta, N=120, **kw):
    """C, B, A for the transfer operator of the beta shift truncated at N."""
    H = operator_matrix(beta, N + 1)
    R = poly_inverse(bergman_polys(H, N))
    return asymptotics(moment_matrix(R), **kw)


def sweep(betas, N=120, **kw):
    """Rows (beta, C, B, A, spread); failed estimates are reported as NaN."""
    rows = []
    for b in np.atleast_1d(betas):
        try:
            a = moment_asymptotics(float(b), N, **kw)
            rows.append((float(b), a.C, a.B, a.A, a.diagnostics["spread"]))
        except NoLimit as exc:
            sp = (exc.diagnostics or {}).get("spread", np.nan)
            rows.append((float(b), np.nan, np.nan, np.nan, sp))
    return rows


def write_sweep_csv(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["beta", "C", "B", "A", "spread"])
        for r in rows:
            w.writerow([f"{v:.17g}" for v in r])


def detect_jump(betas, values, threshold=JUMP_THRESHOLD):
    """Location (midpoint) of the largest step between neighbours, or None if below threshold."""
    v = np.asarray(values, dtype=float)
    b = np.asarray(betas, dtype=float)
    steps = np.abs(np.diff(v))
    if steps.size == 0 or not np.any(np.isfinite(steps)):
        return None
    i = int(np.nanargmax(steps))
    if steps[i] < threshold:
        return None
    return 0.5 * (b[i] + b[i + 1])


def poly_zeros(P, n=None):
    """Zeros of p_n (default n = N-1) from its coefficients."""
    n = P.N - 1 if n is None else n
    c = P.scaled[n, : n + 1]
    return np.roots(c[::-1]) if n > 0 else np.array([])


def match_multisets(a, b):
    """Largest distance under the optimal pairing of two equal-size point sets."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.size != b.size:
        raise ValueError("sets differ in size")
    if a.size == 0:
        return 0.0
    cost = np.abs(a[:, None] - b[None, :])
    i, j = linear_sum_assignment(cost)
    return float(cost[i, j].max())


def zeros_vs_eigenvalues(A, n):
    """Distance between zeros of p_n and eigenvalues of the leading n x n block."""
    a = _entries(A)
    P = bergman_polys(A, n + 1)
    ev = np.linalg.eigvals(a[:n, :n])
    return match_multisets(poly_zeros(P, n), ev)


def shift_residual(A, N):
    """max |P^{-1} A^T P - K| over the leading (N-1) x (N-1) block, K the up-shift.

    A^T P is formed row by row in scaled form before multiplying by R.
    """
    a = _entries(A)
    P = bergman_polys(A, N)
    R = poly_inverse(P)
    s = P.scale
    n = np.arange(N, dtype=float)
    # (A^T P)[i, :] = sum_k A[k, i] p_k ; keep everything in scaled form
    W = (a[:N, :N].T * s ** (n[None, :] - n[:, None])) @ P.scaled
    Kp = R.scaled @ (W * (s ** n)[:, None])
    K = np.eye(N, k=1)
    return float(np.max(np.abs(Kp - K)[: N - 1, : N - 1]))


def left_eigen_residual(A, N, z):
    """Relative residual of A^T p(z) = z p(z) over the rows not touched by truncation."""
    a = _entries(A)
    P = bergman_polys(A, N)
    q = P.evaluate(z)
    s = P.scale
    n = np.arange(N, dtype=float)
    lhs = (a[:N, :N].T * s ** (n[None, :] - n[:, None])) @ q
    rhs = z * q
    scale = np.abs(a[:N, :N].T * s ** (n[None, :] - n[:, None])) @ np.abs(q)
    r = np.abs(lhs - rhs)[: N - 1] / np.maximum(scale[: N - 1], 1e-300)
    return float(r.max())


def alternative_probe(A, N, count=5, samples=(0.3, 0.2 + 0.4j, -0.5, 0.6j)):
    """Check that f(z) = sum a_k p_k(z) vanishes for right eigenvectors a of A.

    For each of the ``count`` largest eigenpairs (lam, a) of the leading
    N x N block with |lam| < 1, returns (lam, ratios) where ratios[i] is
    |f(z_i)| / sum |a_k p_k(z_i)| at the sample points.  (At z = lam itself
    f need not vanish: lam f(z) = z f(z) only forces f = 0 for z != lam.)
    """
    a = _entries(A)[:N, :N]
    P = bergman_polys(A, N)
    w, V = np.linalg.eig(a)
    weights = P.scale ** np.arange(N, dtype=float)
    out = []
    for i in np.argsort(-np.abs(w)):
        lam = w[i]
        if abs(lam) >= 1 - 1e-9:
            continue
        ratios = []
        for z in samples:
            terms = V[:, i] * P.evaluate(z) * weights
            ratios.append(float(abs(terms.sum()) / np.abs(terms).sum()))
        out.append((complex(lam), ratios))
        if len(out) == count:
            break
    return out
