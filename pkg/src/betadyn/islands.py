"""The beta shift with a widened middle, and where its stable orbits live.

The discontinuity of the beta shift at x = 1/2 is replaced by a middle
segment on [1/2 - eps, 1/2 + eps] joining the two arms:

    f(x) = beta x                       x < 1/2 - eps
         = beta/4 - s beta (1/4 - eps) g(w)   |x - 1/2| < eps
         = beta (x - 1/2)               x >= 1/2 + eps

with w = (2x - 1) / (2 eps) running from -1 to +1 across the middle.  The
families differ only in the interpolating shape g:

    zigzag    g(w) = w
    soft      g(w) = 1 - 2 cos(pi (1 + w) / 4)      (flat at the left seam)
    sine      g(w) = sin(pi w / 2)                  (flat at both seams)
    kink      g(w) = sgn(w) |w|^p                   (flat at the centre)
    adj_kink  g(w) = alpha + (1 - alpha) |w|^p      for w >= 0,
                     alpha - (1 + alpha) |w|^p      for w < 0

The sign s = sigma is +1 for zigzag and soft; with s = +1 all families are
continuous, with s = -1 the sine and kink maps break into three pieces.
Islands of stability (attracting cycles) show up as parameter regions of
short Poincare recurrence time.
"""

from dataclasses import dataclass, replace

import numpy as np

from .core_maps import check_beta

FAMILIES = ("zigzag", "soft", "sine", "kink", "adj_kink")
DEFAULT_DELTA = 0.009
DEFAULT_BUDGET = 512
DEFAULT_STARTS = 8
DEFAULT_WARMUP = 1000
FD_STEP = 1e-7


@dataclass(frozen=True)
class IslandMapSpec:
    family: str
    beta: float
    eps: float
    sigma: int = 1
    p: float = 5.0
    alpha: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        check_beta(self.beta)
        if not 0.0 < self.eps < 0.25:
            raise ValueError("eps must lie in (0, 1/4)")
        if self.sigma not in (1, -1):
            raise ValueError("sigma must be +1 or -1")
        if self.p < 1:
            raise ValueError("p must be at least 1")
        if not -1.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (-1, 1)")

    @property
    def seams(self):
        return 0.5 - self.eps, 0.5 + self.eps


def _shape(spec, w):
    return _shape_of(spec.family, w, spec.p, spec.alpha)


def _shape_of(fam, w, p, alpha):
    if fam == "zigzag":
        return w
    if fam == "soft":
        return 1.0 - 2.0 * np.cos(0.25 * np.pi * (1.0 + w))
    if fam == "sine":
        return np.sin(0.5 * np.pi * w)
    aw = np.abs(w) ** p
    if fam == "kink":
        return np.sign(w) * aw
    return np.where(w >= 0, alpha + (1.0 - alpha) * aw, alpha - (1.0 + alpha) * aw)


def _step_arrays(family, b, e, sigma, p, alpha, x):
    """The widened map with beta ``b`` and eps ``e`` broadcast against x."""
    s = sigma if family in ("sine", "kink", "adj_kink") else 1
    w = (2.0 * x - 1.0) / (2.0 * e)
    mid = 0.25 * b - s * b * (0.25 - e) * _shape_of(family, np.clip(w, -1.0, 1.0), p, alpha)
    return np.where(x < 0.5 - e, b * x, np.where(x < 0.5 + e, mid, b * (x - 0.5)))


def island_step(spec, x):
    """One step of the widened map described by ``spec``."""
    xa = np.asarray(x, dtype=float)
    y = _step_arrays(spec.family, spec.beta, spec.eps, spec.sigma, spec.p, spec.alpha, xa)
    return float(y) if y.ndim == 0 else y


def seam_mismatch(spec):
    """Largest jump of the map across the two seams x = 1/2 -+ eps."""
    lo, hi = spec.seams
    b = spec.beta
    left = abs(island_step(spec, lo) - b * lo)
    right = abs(island_step(spec, np.nextafter(hi, 0.0)) - b * (hi - 0.5))
    return max(left, right)


def recurrence_time(spec, x0, delta=DEFAULT_DELTA, budget=DEFAULT_BUDGET, step=None):
    """Smallest n >= 1 with |x0 - f^n(x0)| < delta, or ``budget`` if none.

    Works elementwise for an array of start points.  ``step`` overrides the
    map (any callable x -> f(x)); by default it is ``island_step(spec, .)``.
    """
    if delta <= 0 or budget < 1:
        raise ValueError("need delta > 0 and budget >= 1")
    f = step or (lambda x: island_step(spec, x))
    x0a = np.atleast_1d(np.asarray(x0, dtype=float))
    times, _ = _recurrence(f, x0a, delta, budget)
    return int(times[0]) if np.ndim(x0) == 0 else times


def _recurrence(f, x0, delta, budget):
    times = np.full(x0.shape, budget, dtype=np.int64)
    censored = np.ones(x0.shape, dtype=bool)
    x = x0.copy()
    for n in range(1, budget + 1):
        x = np.asarray(f(x), dtype=float)
        hit = censored & (np.abs(x - x0) < delta)
        times[hit] = n
        censored &= ~hit
        if not censored.any():
            break
    return times, censored


@dataclass
class RecurrenceGrid:
    """Mean recurrence time per (eps, beta) cell; rows are eps, columns beta."""

    betas: np.ndarray
    epss: np.ndarray
    times: np.ndarray
    censored: np.ndarray
    budget: int

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write("eps,beta,mean_time,censored_fraction\n")
            for i, e in enumerate(self.epss):
                for j, b in enumerate(self.betas):
                    fh.write(f"{e:.17g},{b:.17g},{self.times[i, j]:.17g},{self.censored[i, j]:.17g}\n")


def tongue_scan(
    family,
    betas,
    epss,
    delta=DEFAULT_DELTA,
    budget=DEFAULT_BUDGET,
    seed=0,
    starts=DEFAULT_STARTS,
    warmup=DEFAULT_WARMUP,
    **params,
):
    """Mean Poincare recurrence time over a grid of (beta, eps) values.

    Each cell runs ``starts`` random start points (drawn from a per-cell
    substream of ``seed``, so the result does not depend on evaluation
    order), discards ``warmup`` iterations so that the point sits on the
    attractor, then records the recurrence time of the point reached.
    Censored runs count as ``budget`` in the mean and are reported
    separately as a fraction.
    """
    betas = np.atleast_1d(np.asarray(betas, dtype=float))
    epss = np.atleast_1d(np.asarray(epss, dtype=float))
    nb, ne = betas.size, epss.size
    root = np.random.SeedSequence(seed)
    cell_seeds = root.spawn(ne * nb)
    x = np.empty((ne * nb, starts))
    for c in range(ne * nb):
        i, j = divmod(c, nb)
        IslandMapSpec(family, betas[j], epss[i], **params)  # validates every cell
        x[c] = np.random.Generator(np.random.Philox(cell_seeds[c])).random(starts)
    spec = IslandMapSpec(family, betas[0], epss[0], **params)
    b = np.repeat(betas[None, :], ne, axis=0).reshape(-1, 1)
    e = np.repeat(epss[:, None], nb, axis=1).reshape(-1, 1)
    f = lambda y: _step_arrays(family, b, e, spec.sigma, spec.p, spec.alpha, y)
    for _ in range(warmup):
        x = f(x)
    t, c = _recurrence(f, x, delta, budget)
    times = t.mean(axis=1).reshape(ne, nb)
    cens = c.mean(axis=1).reshape(ne, nb)
    return RecurrenceGrid(betas, epss, times, cens, budget)


def corner_locator(eps):
    """Corner of the bifurcation diagram: beta = (1+2eps)/(1-2eps), x = eps beta."""
    if not 0.0 < eps < 0.25:
        raise ValueError("eps must lie in (0, 1/4)")
    b = (1.0 + 2.0 * eps) / (1.0 - 2.0 * eps)
    return b, eps * b


def soft_island_start(eps):
    """Predicted start of the primary soft-map island: delta + (2 - delta)(phi - 1)."""
    d = corner_locator(eps)[0]
    return d + (2.0 - d) * (0.5 * (np.sqrt(5.0) - 1.0))


def kink_island_centres(kmax, alpha=0.0):
    """First-order island positions (2 / (1 - alpha))^(1/k), k = 1..kmax."""
    return np.array([(2.0 / (1.0 - alpha)) ** (1.0 / k) for k in range(1, kmax + 1)])


def _derivative(spec, x):
    """f'(x) by central differences, one-sided within h of a seam."""
    h = FD_STEP
    lo, hi = spec.seams
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    d = np.empty(xs.size)
    for i, v in enumerate(xs):
        near = [s for s in (lo, hi) if abs(v - s) < h]
        if not near:
            d[i] = (island_step(spec, v + h) - island_step(spec, v - h)) / (2 * h)
        elif v >= near[0]:
            d[i] = (island_step(spec, v + h) - island_step(spec, v)) / h
        else:
            d[i] = (island_step(spec, v) - island_step(spec, v - h)) / h
    return d


def _iterate(spec, x, n):
    for _ in range(n):
        x = island_step(spec, x)
    return x


def stable_cycles(spec, period, grid=4000, tol=1e-10):
    """Attracting cycles of exact period ``period`` found by grid + bisection.

    Sign changes of f^period(x) - x on a uniform grid are refined by
    bisection; a bracket counts as a cycle point only if the refined
    residual is below ``tol`` (this rejects jumps of a discontinuous map).
    The multiplier is the product of f' along the orbit.  Returns a list of
    (x, multiplier) for cycles with |multiplier| < 1, one entry per cycle.
    """
    if period < 1:
        raise ValueError("period must be at least 1")
    xs = np.linspace(0.0, 1.0, grid + 1)
    g = _iterate(spec, xs, period) - xs
    found = []
    for i in np.nonzero(np.sign(g[:-1]) * np.sign(g[1:]) <= 0)[0]:
        a, b = xs[i], xs[i + 1]
        ga = g[i]
        for _ in range(60):
            m = 0.5 * (a + b)
            gm = _iterate(spec, m, period) - m
            if np.sign(gm) == np.sign(ga):
                a, ga = m, gm
            else:
                b = m
        x = 0.5 * (a + b)
        if abs(_iterate(spec, x, period) - x) > tol:
            continue
        orbit = [x]
        for _ in range(period - 1):
            orbit.append(island_step(spec, orbit[-1]))
        if any(abs(orbit[k] - x) < 1e-8 for k in range(1, period)):
            continue  # lower period
        mult = float(np.prod(_derivative(spec, np.array(orbit))))
        if abs(mult) < 1.0 and not any(min(abs(np.array(c[2]) - x)) < 1e-8 for c in found):
            found.append((x, mult, orbit))
    return [(x, m) for x, m, _ in found]


def band_has_stable_cycle(family, betas, eps, periods, **params):
    """For each beta, the periods (from ``periods``) with an attracting cycle."""
    out = {}
    for b in np.atleast_1d(betas):
        spec = IslandMapSpec(family, float(b), eps, **params)
        out[float(b)] = [k for k in periods if stable_cycles(spec, k)]
    return out


def with_beta(spec, beta):
    return replace(spec, beta=float(beta))
