"""Beta-expansions as digit strings.

Reconstruction of a point from its digits, the compressor/expander pair
that trades base beta for base 2, the longest admissible run of ones,
membership in the "shift with holes" sets, and the skewed Takagi and
Haar curves built from the left/right self-similarity of the beta maps.
"""

import math

import numpy as np

from .core_maps import check_beta, digits
from .errors import Unbounded


def reconstruct(beta, bits):
    """x = (1/2) sum_n k_n beta^(-n) for the digit string ``bits``."""
    k = np.asarray(bits, dtype=float)
    if k.size == 0:
        raise ValueError("bits must be non-empty")
    return float(0.5 * np.sum(k * float(beta) ** -np.arange(k.size)))


def binary_digits(y, n):
    """First ``n`` binary digits of y in [0, 1] under the doubling map.

    Follows the doubling convention b(x) = 2x - 1 for x >= 1/2 so that
    y = 1 produces the all-ones string.  Doubling is exact in floating
    point, so the digits are those of the double ``y``.
    """
    x = float(y)
    out = np.zeros(n, dtype=np.uint8)
    for j in range(n):
        if x >= 0.5:
            out[j] = 1
            x = 2.0 * x - 1.0
        else:
            x = 2.0 * x
    return out


def compressor(beta, y, prefix=48, backend="float"):
    """cpr(y): the beta-digits of y read back as a binary fraction.

    Truncation error is at most 2^-prefix.
    """
    beta = check_beta(beta)
    k = digits(beta, y, prefix, backend=backend)
    return float(np.sum(k * 0.5 ** np.arange(1, prefix + 1)))


def expander(beta, y, prefix=60):
    """pdr(y): the binary digits of y read back in base beta.

    Bounded by beta / (2 (beta - 1)), its value at y = 1.  Truncation
    error is at most beta^(1-prefix) / (2 (beta - 1)).
    """
    beta = check_beta(beta)
    return reconstruct(beta, binary_digits(y, prefix))


def expander_tail_bound(beta, prefix):
    """Truncation bound for ``expander``/``reconstruct`` at ``prefix`` digits."""
    return 0.5 * beta ** (1 - prefix) / (beta - 1.0)


def max_ones_run(beta, tol=1e-12):
    """Longest run of consecutive 1-digits any beta-expansion can contain.

    The run length n must satisfy 2 beta^(n-1) <= beta^n + 1, i.e.
    (2 - beta) beta^(n-1) <= 1, which rearranges to the closed form
    1 + floor(-log(2 - beta) / log(beta)).  The inequality is evaluated
    directly with a small tolerance because at beta-golden boundaries
    (the golden ratio among them) equality holds exactly and the floor of a
    rounded logarithm can land on the wrong side.
    """
    beta = check_beta(beta)
    if beta >= 2.0:
        raise Unbounded("at beta = 2 every digit string is admissible")
    n = 1
    while (2.0 - beta) * beta**n <= 1.0 + tol:
        n += 1
    return n


def max_ones_run_closed_form(beta):
    """The closed form 1 + floor(-log(2-beta)/log(beta)), unguarded."""
    beta = check_beta(beta)
    if beta >= 2.0:
        raise Unbounded("at beta = 2 every digit string is admissible")
    return 1 + math.floor(-math.log(2.0 - beta) / math.log(beta))


def hole_member(a, c, x, depth):
    """Is x in H(a, c) = U_{n<=depth} U_{k<2^n} ((a+k)/2^n, (c+k)/2^n)?

    H is the set of points whose doubling orbit enters the open hole
    (a, c) within ``depth`` steps.  Evaluated by the direct union formula,
    so there is no orbit round-off.  Works elementwise on arrays.
    """
    if not a < c:
        raise ValueError("need a < c")
    xa = np.asarray(x, dtype=float)
    hit = np.zeros(xa.shape, dtype=bool)
    for n in range(depth + 1):
        s = xa * 2.0**n
        # need an integer k in [0, 2^n) with s - c < k < s - a
        k = np.floor(s - a)
        k = np.where(k == s - a, k - 1, k)
        ok = (k > s - c) & (k >= 0) & (k < 2**n)
        hit |= ok
    return bool(hit) if xa.ndim == 0 else hit


def interval_member(a, c, x, depth):
    """Membership in I(a, c) = [0, 1] minus H(a, c)."""
    xa = np.asarray(x, dtype=float)
    inside = (xa >= 0.0) & (xa <= 1.0) & ~np.asarray(hole_member(a, c, xa, depth))
    return bool(inside) if xa.ndim == 0 else inside


def _tri(beta, u):
    return np.where(u < 1.0 / beta, beta * u, (1.0 - u) * beta / (beta - 1.0))


def _haar_mother(beta, u):
    return np.where(u < 1.0 / beta, beta, -beta / (beta - 1.0))


def _unfold(beta, u):
    return np.where(u < 1.0 / beta, beta * u, (u - 1.0 / beta) / (1.0 - 1.0 / beta))


def _curve(beta, w, x, order, piece):
    beta = check_beta(beta)
    if abs(w) >= 1:
        raise ValueError("|w| must be below 1")
    if order < 1:
        raise ValueError("order must be at least 1")
    u = np.asarray(x, dtype=float)
    total = np.zeros(u.shape)
    wk = 1.0
    for _ in range(order):
        total = total + wk * piece(beta, u)
        u = _unfold(beta, u)
        wk *= w
    return float(total) if total.ndim == 0 else total


def takagi(beta, w, x, order=40):
    """Skewed blancmange curve: triangles with apex height 1 at 1/beta.

    tak(x) = sum_{k<order} w^k tri(r^k(x)) where ``r`` maps both legs of
    the triangle back onto [0, 1].  Satisfies tak(x/beta) = x + w tak(x)
    and tak(1/beta + x(1 - 1/beta)) = 1 - x + w tak(x) up to |w|^order.
    """
    return _curve(beta, w, x, order, _tri)


def haar(beta, w, x, order=40):
    """Companion curve built from the mother wavelet h = beta, -beta/(beta-1).

    har(x) = sum_k w^k h(r^k(x)); it obeys har(x/beta) = beta + w har(x).
    """
    return _curve(beta, w, x, order, _haar_mother)
