"""Invariant measures of the beta shift and related spectral functions.

The invariant density is computed three independent ways:

* ``parry_measure`` sums indicator functions along the midpoint orbit,
  rho(x) ~ sum_n [x < m_n] beta^-n;
* ``fp_recurse`` iterates the transfer operator on a grid until it stops
  changing;
* ``density_histogram`` simply bins long random orbits.

Replacing 1 by z/beta in the Parry series gives the "rotated" function
whose image under the transfer operator differs from v/z by a constant;
the same series evaluated at 1/2 is the disk function D(beta; zeta) whose
zeros are eigenvalues 1/(beta zeta) of the operator.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse

from .core_maps import beta_shift, check_beta
from .errors import Divergent, NoConvergence
from .hessenberg import midpoint_orbit
from .stepfn import StepFn


def _auto_terms(beta, eps=1e-17):
    return int(np.ceil(np.log(1.0 / eps) / np.log(beta))) + 2


# ---------------------------------------------------------------- histograms


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    counts: np.ndarray
    samples: int
    iters: int

    @property
    def bins(self):
        return self.counts.size

    @property
    def density(self):
        """Normalised so that the density integrates to 1."""
        return self.counts / (self.counts.sum() * np.diff(self.edges))

    def as_stepfn(self):
        return StepFn(self.edges, self.density)


def density_histogram(beta, bins=800, samples=24000, iters=4000, seed=0,
                      kind="beta_shift", step=None, dither=True):
    """Histogram of beta-shift orbits started at uniform random points.

    Every iterate after the start is binned, so the total count is
    ``samples * iters``.  Start points come from a Philox counter-based
    generator keyed by ``seed``.  Slopes in (0, 1] are accepted: there all
    mass collapses onto 0.  ``step`` may supply any other map ``f(beta, x)``.

    Start points behave as if they had infinitely many random digits.  A
    step stretches the float grid by beta, so after each step the image is
    moved by a uniform amount in +-(beta/2) * spacing(x), standing in for
    the digits that double precision never held.  Where the map loses no
    digits this rounds straight back; where it does (subtracting 1/2 in a
    doubling map) the vacated low bits come out random.  Without it the
    beta = 2 orbits shift every bit out in about 53 steps and collapse
    onto 0.  Pass ``dither=False`` to iterate the plain doubles.
    """
    beta = check_beta(beta, extended=True)
    if min(bins, samples, iters) < 1:
        raise ValueError("bins, samples and iters must be positive")
    rng = np.random.Generator(np.random.Philox(key=seed))
    x = rng.random(samples)
    counts = np.zeros(bins, dtype=np.int64)
    f = step or (lambda b, v: beta_shift(b, v))
    for _ in range(iters):
        y = f(beta, x)
        if dither:
            gap = beta * np.spacing(x)
            y = np.clip(y + (rng.random(samples) - 0.5) * gap, 0.0, 1.0)
        x = y
        idx = np.minimum((x * bins).astype(np.int64), bins - 1)
        counts += np.bincount(idx, minlength=bins)
    return Histogram(np.linspace(0.0, 1.0, bins + 1), counts, samples, iters)


# ------------------------------------------------------------- Parry measure


def parry_measure(beta, terms=None, coords="shift"):
    """Invariant density as an exact step function.

    In shift coordinates (support [0, beta/2]) the density is proportional
    to sum_n [x < m_n] beta^-n over the midpoint orbit.  ``coords="transform"``
    returns the same density for t(u) = beta u mod 1, rho(u) ~ sum_n
    [u < t^n(1)] beta^-n on [0, 1].  If the orbit halts at 1/2 the series
    terminates there (the next midpoint is 0).
    """
    beta = check_beta(beta)
    terms = terms or _auto_terms(beta)
    orb = midpoint_orbit(beta, terms)
    m = orb.points
    w = beta ** -np.arange(m.size, dtype=float)
    top = beta / 2.0
    b = np.unique(np.concatenate([[0.0, top], m]))
    order = np.argsort(m)
    ms, ws = m[order], w[order]
    # value on [b_i, b_{i+1}) = total weight of midpoints strictly above b_i
    tail = np.concatenate([np.cumsum(ws[::-1])[::-1], [0.0]])
    vals = tail[np.searchsorted(ms, b[:-1], side="right")]
    f = StepFn(b, vals).normalized()
    if coords == "shift":
        return f
    if coords == "transform":
        g = f.rescaled(2.0 / beta)
        return StepFn(g.breakpoints, g.values * beta / 2.0)
    raise ValueError("coords must be 'shift' or 'transform'")


def plateaus(f, tol=1e-12):
    """Distinct consecutive plateau values of a step function on its support."""
    vals = [f.values[0]]
    for v in f.values[1:]:
        if abs(v - vals[-1]) > tol * max(1.0, abs(v)):
            vals.append(v)
    return np.array(vals)


def ulam_matrix(beta, grid):
    """Sparse matrix of the transfer operator acting on cell averages.

    Entry (j, i) is the fraction of cell i lying in the preimage of cell j,
    times the cell count; applying it to cell averages of a
    piecewise-constant density is exact and conserves total mass.
    """
    e = np.linspace(0.0, 1.0, grid + 1)
    lo = np.minimum(e[:-1], beta / 2.0) / beta
    hi = np.minimum(e[1:], beta / 2.0) / beta
    rows, cols, vals = [], [], []
    for shift in (0.0, 0.5):
        a, b = lo + shift, hi + shift
        ia = np.minimum((a * grid).astype(np.int64), grid - 1)
        ib = np.minimum((b * grid).astype(np.int64), grid - 1)
        same = ia == ib
        j = np.arange(grid)
        rows += [j[same], j[~same], j[~same]]
        cols += [ia[same], ia[~same], ib[~same]]
        vals += [(b - a)[same] * grid,
                 ((ia[~same] + 1) / grid - a[~same]) * grid,
                 (b[~same] - ib[~same] / grid) * grid]
    r, c, v = (np.concatenate(t) for t in (rows, cols, vals))
    keep = v > 0
    return scipy.sparse.csr_matrix((v[keep], (r[keep], c[keep])), shape=(grid, grid))


def fp_recurse(beta, grid=4096, sweeps=100000, tol=1e-12):
    """Fixed point of the transfer operator by direct iteration on a grid.

    The density is kept as cell averages on ``grid`` equal cells of [0, 1].
    One sweep applies [L f](y) = (f(y/beta) + f(y/beta + 1/2)) / beta
    exactly to the piecewise-constant iterate and re-averages over the
    cells (``ulam_matrix``).  Stops when the sup-norm change falls below
    ``tol``; raises NoConvergence once ``sweeps`` is exhausted.
    """
    beta = check_beta(beta)
    if grid < 2:
        raise ValueError("grid must be at least 2")
    P = ulam_matrix(beta, grid)
    rho = np.ones(grid)
    change = np.inf
    for _ in range(sweeps):
        new = P @ rho
        change = np.max(np.abs(new - rho))
        rho = new
        if change < tol:
            break
    else:
        raise NoConvergence(f"fp_recurse: change {change:.3g} after {sweeps} sweeps")
    rho /= rho.mean()
    return StepFn(np.linspace(0.0, 1.0, grid + 1), rho)


# ------------------------------------------------------ rotated Parry series


def _indicator_matrix(beta, x, terms):
    m = midpoint_orbit(beta, terms).points
    xa = np.asarray(x, dtype=float)
    return (xa[..., None] < m).astype(float), m.size


def rotated_parry(beta, z, x, terms=400):
    """v(x) = sum_{n<terms} [x < m_n] (z/beta)^n; converges for |z| < beta."""
    beta = check_beta(beta)
    if abs(z) >= beta:
        raise Divergent("rotated series needs |z| < beta")
    d, n = _indicator_matrix(beta, x, terms)
    zeta = complex(z) / beta
    out = d @ (zeta ** np.arange(n))
    return out.item() if np.ndim(out) == 0 else out


def transfer(beta, f, y):
    """[L f](y) for a vectorised callable ``f``."""
    ya = np.asarray(y, dtype=float)
    val = (f(ya / beta) + f(ya / beta + 0.5)) / beta
    return np.where(ya <= beta / 2.0, val, 0.0)


def constancy_check(beta, z, probes=100, terms=400):
    """Spread (max - min) of [L v](y) - v(y)/z over y in [0, beta/2).

    The rotated function satisfies L v = v/z + C(beta; z) with C independent
    of y, so the spread is zero up to truncation and rounding.
    """
    beta = check_beta(beta)
    y = (np.arange(probes) + 0.5) / probes * (beta / 2.0)
    v = lambda x: rotated_parry(beta, z, x, terms)  # noqa: E731
    r = transfer(beta, v, y) - v(y) / z
    return float(max(np.ptp(r.real), np.ptp(r.imag)))


# ------------------------------------------------------------ disk function


def _disk_bits(beta, terms):
    """d_n(1/2) = [1/2 < m_n], and the period if the orbit halts.

    A halting orbit (m_k = 1/2) is continued periodically, m_{k+1} = m_0,
    i.e. with the "less_equal" convention at 1/2.  That continuation is
    what makes D vanish at the reciprocal root (zeta = 1/phi for phi).
    """
    orb = midpoint_orbit(beta, terms)
    d = (orb.points > 0.5).astype(float)
    return d, (None if orb.halt is None else orb.halt + 1)


def disk_function(beta, zeta, terms=400):
    """D(beta; zeta) = -1 + zeta * sum_n zeta^n d_n(1/2).

    For non-halting orbits the sum is truncated after ``terms`` terms (tail
    below |zeta|^terms / (1 - |zeta|)) and |zeta| >= 1 is refused.  Halting
    orbits are periodic and summed in closed form, valid everywhere except
    at the poles zeta^period = 1.
    """
    beta = check_beta(beta)
    d, period = _disk_bits(beta, terms)
    z = np.asarray(zeta, dtype=complex)
    if period is None:
        if np.any(np.abs(z) >= 1.0):
            raise Divergent("disk function needs |zeta| < 1")
        out = -1.0 + z * np.polyval(d[::-1], z)
    else:
        out = -1.0 + z * np.polyval(d[::-1], z) / (1.0 - z**period)
    return out.item() if out.ndim == 0 else out


@dataclass(frozen=True)
class DiskZero:
    zeta: complex
    residual: float
    eigenvalue: complex


def _disk_poly(beta, terms):
    """Coefficients (highest first) of the polynomial whose zeros are D's."""
    d, period = _disk_bits(beta, terms)
    low = np.zeros(d.size + 1)
    low[0] = -1.0
    low[1:] += d
    if period is not None:
        low[period] += 1.0          # (-1)(1 - zeta^period) + zeta P(zeta)
    return low[::-1], period


def disk_zeros(beta, terms=400, grid=400, margin=0.02, tol=1e-10):
    """Zeros of D(beta; .) in |zeta| < 1 - margin.

    A polar grid of |D| is scanned for local minima, each of which seeds a
    Newton iteration on the (truncated, hence polynomial) series.
    """
    beta = check_beta(beta)
    c, period = _disk_poly(beta, terms)
    dc = np.polyder(c)
    rmax = 1.0 - margin
    if period is not None:
        seeds = np.roots(c)
    else:
        r = (np.arange(grid) + 0.5) / grid * rmax
        th = np.arange(grid) * (2 * np.pi / grid)
        Z = r[:, None] * np.exp(1j * th[None, :])
        A = np.abs(np.polyval(c, Z))
        nb = [np.roll(A, s, axis=1) for s in (-1, 1)]
        up, dn = A[2:, :], A[:-2, :]
        core = A[1:-1, :]
        is_min = (core <= up) & (core <= dn) & (core <= nb[0][1:-1]) & (core <= nb[1][1:-1])
        for s in (-1, 1):
            is_min &= core <= np.roll(up, s, axis=1)
            is_min &= core <= np.roll(dn, s, axis=1)
        seeds = Z[1:-1, :][is_min]
    found = []
    for z in seeds:
        for _ in range(60):
            f = np.polyval(c, z)
            step = f / np.polyval(dc, z)
            z = z - step
            if abs(step) < 1e-15 * max(1.0, abs(z)):
                break
        if not abs(z) < rmax:
            continue
        if period is not None and abs(1.0 - z**period) < 1e-9:
            continue
        res = abs(np.polyval(c, z))
        if res < tol and all(abs(z - w.zeta) > 1e-8 for w in found):
            found.append(DiskZero(complex(z), float(res), complex(1.0 / (beta * z))))
    found.sort(key=lambda w: (-abs(w.zeta), w.zeta.imag))
    return found


# ------------------------------------------------------------ tree function


def gamma_compose(beta, bits, y):
    """(gamma_{b_0} ... gamma_{b_n})(y) with gamma_b(y) = b/2 + y/beta.

    Closed form: (1/2) sum_j b_j beta^-j + y beta^-(n+1).
    """
    beta = check_beta(beta)
    b = np.asarray(bits, dtype=float)
    n = b.size - 1
    return float(0.5 * np.sum(b * beta ** -np.arange(b.size)) + y * beta ** -(n + 1.0))


def tree_function(beta, bits, y):
    """1 if y and every prefix composition stay <= beta/2, else 0."""
    beta = check_beta(beta)
    top = beta / 2.0
    if not y <= top:
        return 0
    b = np.asarray(bits, dtype=float)
    w = beta ** -np.arange(b.size)
    prefix = 0.5 * np.cumsum(b * w) + y * w * (1.0 / beta)
    return int(np.all(prefix <= top))


# -------------------------------------------------------------- Julia raster


def julia_row(beta, depth):
    """Dyadic-tree values J(c / 2^depth) for c = 0 .. 2^depth - 1.

    J(1/2) = beta; a node J(k/2^n) spawns a_0 = min(beta/2, beta J) to its
    left and a_1 = max(0, beta J - beta/2) to its right, one level down.
    Column 0 (x = 0) is left at 0.
    """
    beta = check_beta(beta, extended=True)
    width = 1 << depth
    row = np.zeros(width)
    row[width >> 1] = beta
    for n in range(1, depth):
        step = width >> (n + 1)
        parents = np.arange(width >> n, width, width >> (n - 1))
        vals = row[parents]
        row[parents - step] = np.minimum(beta / 2.0, beta * vals)
        row[parents + step] = np.maximum(0.0, beta * vals - beta / 2.0)
    return row


def julia_raster(betas, depth=10):
    """Stack of ``julia_row`` values, one row per beta (first row first)."""
    return np.array([julia_row(b, depth) for b in betas])
