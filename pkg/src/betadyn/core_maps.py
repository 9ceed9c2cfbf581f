"""The base iterated maps of the unit interval.

All maps take a slope parameter ``beta`` in (1, 2] and act on points of
[0, 1].  The beta shift

    T(x) = beta * x            for x < 1/2
    T(x) = beta * (x - 1/2)    for 1/2 <= x <= 1

is the central object; the others (beta transform, tent, logistic and
three tent-like variants) share its parameter axis.  Every function here
accepts scalars or numpy arrays.
"""

import numpy as np

from . import fixedpoint
from .errors import DomainExcluded

MAP_KINDS = (
    "beta_shift",
    "beta_transform",
    "tent",
    "logistic",
    "sidetent",
    "fliptent",
    "sidetarp",
)
MIDPOINT_RULES = ("strict_less", "less_equal", "exclude")


def check_beta(beta, extended=False):
    """Validate a slope parameter and return it as a float.

    With ``extended=True`` any value in (0, 2] is accepted; this is used for
    the density histograms, which are meaningful (if dull) below 1.
    """
    b = float(beta)
    lo_ok = b > 0.0 if extended else b > 1.0
    if not (lo_ok and b <= 2.0) or not np.isfinite(b):
        rng = "(0, 2]" if extended else "(1, 2]"
        raise ValueError(f"beta must lie in {rng}, got {beta!r}")
    return b


def _scalar_out(x_in, y):
    return float(y) if np.ndim(x_in) == 0 else y


def beta_shift(beta, x, midpoint_rule="strict_less"):
    """One step of the beta shift with the chosen convention at x = 1/2.

    ``strict_less`` sends 1/2 to 0 (the right branch), ``less_equal`` sends
    it to beta/2 (the left branch, which makes halting orbits periodic),
    and ``exclude`` refuses the points 0, 1/2 and 1.
    """
    xa = np.asarray(x, dtype=float)
    if midpoint_rule == "strict_less":
        left = xa < 0.5
    elif midpoint_rule == "less_equal":
        left = xa <= 0.5
    elif midpoint_rule == "exclude":
        if np.any((xa == 0.0) | (xa == 0.5) | (xa == 1.0)):
            raise DomainExcluded("x in {0, 1/2, 1} is excluded by this convention")
        left = xa < 0.5
    else:
        raise ValueError(f"unknown midpoint rule {midpoint_rule!r}")
    y = np.where(left, beta * xa, beta * (xa - 0.5))
    return _scalar_out(x, y)


def beta_transform(beta, u):
    """t(u) = beta*u mod 1, written branchwise so that t(1) = beta - 1.

    Keeping the right branch closed at 1 makes the conjugacy
    T^n(x) = (beta/2) t^n(2x/beta) hold on all of [0, 1].
    """
    ua = np.asarray(u, dtype=float)
    y = np.where(ua < 1.0 / beta, beta * ua, beta * ua - 1.0)
    return _scalar_out(u, y)


def tent(beta, x):
    """Tent map: beta*x on the left, beta*(1-x) on the right."""
    xa = np.asarray(x, dtype=float)
    y = np.where(xa < 0.5, beta * xa, beta * (1.0 - xa))
    return _scalar_out(x, y)


def logistic(beta, x):
    """Logistic map normalised to share the beta axis: 2*beta*x*(1-x)."""
    xa = np.asarray(x, dtype=float)
    return _scalar_out(x, 2.0 * beta * xa * (1.0 - xa))


def sidetent(beta, u):
    """Tent with a raised left leg: beta*(u-1)+2 left of (beta-1)/beta."""
    ua = np.asarray(u, dtype=float)
    y = np.where(ua < (beta - 1.0) / beta, beta * (ua - 1.0) + 2.0, beta * (1.0 - ua))
    return _scalar_out(u, y)


def fliptent(beta, u):
    """beta*u left of 1/beta, then the reflected branch 2 - beta*u."""
    ua = np.asarray(u, dtype=float)
    y = np.where(ua < 1.0 / beta, beta * ua, 2.0 - beta * ua)
    return _scalar_out(u, y)


def sidetarp(beta, u):
    """beta*u left of 1/beta, then beta*(1-u)."""
    ua = np.asarray(u, dtype=float)
    y = np.where(ua < 1.0 / beta, beta * ua, beta * (1.0 - ua))
    return _scalar_out(u, y)


_STEPS = {
    "beta_transform": beta_transform,
    "tent": tent,
    "logistic": logistic,
    "sidetent": sidetent,
    "fliptent": fliptent,
    "sidetarp": sidetarp,
}


def map_function(kind):
    """The map ``kind`` as a callable f(beta, x), without parameter checks."""
    if kind == "beta_shift":
        return beta_shift
    try:
        return _STEPS[kind]
    except KeyError:
        raise ValueError(f"unknown map kind {kind!r}; expected one of {MAP_KINDS}") from None


def step(kind, beta, x, midpoint_rule="strict_less"):
    """Apply one step of the map named ``kind``.

    ``midpoint_rule`` only affects ``beta_shift``.
    """
    beta = check_beta(beta)
    if kind == "beta_shift":
        return beta_shift(beta, x, midpoint_rule)
    try:
        f = _STEPS[kind]
    except KeyError:
        raise ValueError(f"unknown map kind {kind!r}; expected one of {MAP_KINDS}") from None
    return f(beta, x)


def iterate(kind, beta, x0, n, midpoint_rule="strict_less"):
    """Trajectory ``[x0, f(x0), ..., f^n(x0)]`` as an array.

    For array-valued ``x0`` the result has shape ``(n + 1,) + x0.shape``.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    x = np.asarray(x0, dtype=float)
    out = np.empty((n + 1,) + x.shape)
    out[0] = x
    for k in range(n):
        x = np.asarray(step(kind, beta, x, midpoint_rule))
        out[k + 1] = x
    return out


def digits(beta, x, n, backend="float", bits=None):
    """The first ``n`` beta-digits k_j = [T^j(x) >= 1/2] of ``x``.

    ``backend="fixed"`` runs the orbit in integer fixed point (precision
    ``bits``, chosen automatically when omitted) so that digit strings far
    beyond the ~50 reliable double-precision digits are exact for the
    decimal value of ``beta``.
    """
    beta = check_beta(beta)
    if n < 1:
        raise ValueError("n must be at least 1")
    if backend == "fixed":
        bits = bits or fixedpoint.bits_for_orbit(beta, n)
        H = 1 << (bits - 1)
        orb = fixedpoint.shift_orbit(beta, x, n - 1, bits)
        return np.array([1 if X >= H else 0 for X in orb], dtype=np.uint8)
    if backend != "float":
        raise ValueError(f"unknown backend {backend!r}")
    traj = iterate("beta_shift", beta, x, n - 1)
    return (traj >= 0.5).astype(np.uint8)


def iterated_shift(beta, x, p):
    """T^p(x) from the digit expansion rather than by iteration.

    T^p(x) = beta^p x - (beta/2) sum_{m<p} k_m beta^(p-m-1).
    """
    beta = check_beta(beta)
    if p == 0:
        return float(x)
    k = digits(beta, x, p)
    m = np.arange(p)
    return float(beta**p * x - 0.5 * beta * np.sum(k * beta ** (p - m - 1.0)))


def conjugate_check(beta, x, n):
    """Largest gap between T^k(x) and (beta/2) t^k(2x/beta), k = 0..n."""
    beta = check_beta(beta)
    u = 2.0 * x / beta
    if not 0.0 <= u <= 1.0:
        raise ValueError("need 2x/beta in [0, 1]")
    xs = iterate("beta_shift", beta, x, n)
    us = iterate("beta_transform", beta, u, n)
    return float(np.max(np.abs(xs - 0.5 * beta * us)))
