"""Multiplication as an operation on bit strings.

A number in [0, 1] is the bit string x = 0.b_0 b_1 b_2 ... with
x = sum_n b_n 2^(-n-1), stored as a uint8 array, most significant first.
The product K x of K = 0.c_0 c_1 ... and x is built in three stages:

    S: column sums     s_0 = 0,  s_(n+1) = sum_{k<=n} b_k c_(n-k)
    C: carry           d_n = s_n + floor(d_(n+1) / 2)
    A: remainder       a_n = d_n mod 2

so K x = 0.a_0 a_1 a_2 ...  The carry recursion runs from the far end of
the string, so a finite prefix needs a guard window of extra columns.
Replacing C by another column map F gives the "carry variants", and
dropping C altogether gives the shift-and-XOR product K (x) x = A(S).
"""

import math
from dataclasses import dataclass

import numpy as np

from .core_maps import check_beta
from .errors import InsufficientPrefix
from .symbolic import compressor


def as_bits(bits):
    b = np.asarray(bits, dtype=np.uint8)
    if b.ndim != 1:
        raise ValueError("bit strings are one-dimensional")
    if np.any(b > 1):
        raise ValueError("bits must be 0 or 1")
    return b


def bits_of(value, n):
    """First n binary digits of a float in [0, 1) (exact for doubles)."""
    v = float(value)
    if not 0.0 <= v < 1.0:
        raise ValueError("value must lie in [0, 1)")
    out = np.zeros(n, dtype=np.uint8)
    for j in range(n):
        v *= 2.0
        if v >= 1.0:
            out[j] = 1
            v -= 1.0
    return out


def bits_to_int(bits):
    """The integer whose binary digits are ``bits`` (MSB first)."""
    b = as_bits(bits)
    return int("".join(map(str, b.tolist())) or "0", 2)


def int_to_bits(value, n):
    """The n-bit big-endian binary string of a non-negative integer."""
    if value < 0 or value >= 1 << n:
        raise ValueError("value does not fit in n bits")
    return np.array([int(c) for c in format(value, f"0{n}b")], dtype=np.uint8) if n else np.zeros(0, np.uint8)


def bits_value(bits):
    """sum b_n 2^(-n-1) as a float."""
    b = as_bits(bits).astype(float)
    return float(np.sum(b * 0.5 ** np.arange(1, b.size + 1)))


def format_bits(bits):
    """Text form "0.1011..." of a bit string."""
    return "0." + "".join(str(int(v)) for v in as_bits(bits))


def parse_bits(text):
    """Inverse of ``format_bits``; the "0." prefix is optional."""
    t = text.strip()
    if t.startswith("0."):
        t = t[2:]
    if any(c not in "01" for c in t):
        raise ValueError(f"not a binary string: {text!r}")
    return np.array([int(c) for c in t], dtype=np.uint8)


def bits_to_hex(bits):
    """Packed hex form "<nbits>:<hex>", zero-padded to whole bytes."""
    b = as_bits(bits)
    return f"{b.size}:{np.packbits(b).tobytes().hex()}"


def hex_to_bits(text):
    """Inverse of ``bits_to_hex``."""
    n, _, h = text.strip().partition(":")
    n = int(n)
    raw = np.frombuffer(bytes.fromhex(h), dtype=np.uint8)
    return np.unpackbits(raw)[:n].copy()


def guard_window(n):
    """C = 1 + floor(log2(2n + 1)): bits needed to write any d_n <= 2n + 1."""
    return 1 + int(math.floor(math.log2(2 * n + 1)))


def _window_for(out_bits):
    """Smallest n with n - C(n) >= out_bits - 1, and C(n)."""
    n = out_bits
    while n - guard_window(n) < out_bits - 1:
        n += 1
    return n, guard_window(n)


def column_sums(K, x, n):
    """s_0 .. s_n from the first n bits of K and x (missing bits are zero)."""
    c = np.zeros(n, dtype=np.int64)
    b = np.zeros(n, dtype=np.int64)
    kk, xx = as_bits(K)[:n], as_bits(x)[:n]
    c[: kk.size] = kk
    b[: xx.size] = xx
    s = np.zeros(n + 1, dtype=np.int64)
    if n:
        s[1:] = np.convolve(b, c)[:n]
    return s


@dataclass(frozen=True)
class CarryTape:
    """Column sums s, propagated towers d and remainder bits a."""

    s: np.ndarray
    d: np.ndarray
    a: np.ndarray

    def check(self):
        n = np.arange(self.s.size)
        ok = np.all(self.s <= n) and np.all(self.d <= 2 * n + 1) and np.all(self.a == self.d % 2)
        return bool(ok)


def propagate(s, seed=None, f=None):
    """The carry pass d_n = f(s_n) + floor(d_(n+1) / 2), run from the end.

    ``seed`` is the value assumed for the last tower; by default the last
    column receives no carry.  ``f`` is applied to each column sum first
    (the identity for ordinary multiplication).
    """
    s = np.asarray(s, dtype=np.int64)
    fs = s if f is None else np.array([f(int(v)) for v in s], dtype=np.int64)
    d = np.empty_like(fs)
    if fs.size == 0:
        return d
    d[-1] = fs[-1] if seed is None else seed
    for n in range(fs.size - 2, -1, -1):
        d[n] = fs[n] + (d[n + 1] >> 1)
    return d


def carry_tape(K, x, n, seed=None):
    s = column_sums(K, x, n)
    d = propagate(s, seed)
    return CarryTape(s, d, (d & 1).astype(np.uint8))


def _check_prefix(K, x, need):
    for name, v in (("K", K), ("x", x)):
        if len(v) < need:
            raise InsufficientPrefix(f"{name} has {len(v)} bits, {need} needed")


def shift_add_mul(K, x, out_bits, strategy="seed", seed=None, extra=0, exact=False):
    """First ``out_bits`` bits of the product K x.

    ``exact=True`` treats K and x as complete (dyadic) strings, zero past
    their end, and propagates from the last non-zero column; the result is
    then the exact product.

    Otherwise K and x are prefixes of infinite strings and need
    n = out_bits - 1 + C bits, C = 1 + floor(log2(2n+1)) being the guard
    window (plus ``extra`` further bits).  Two completions of the carry
    recursion are available:

    ``strategy="seed"``  set the tower at column n to ``seed`` (default:
        its own column sum) and discard the last C columns;
    ``strategy="scan"``  scan forward from column out_bits for a column
        whose carry into its predecessor vanishes, and propagate from
        there.
    """
    if out_bits < 1:
        raise ValueError("out_bits must be at least 1")
    K, x = as_bits(K), as_bits(x)
    if exact:
        n = max(K.size + x.size, out_bits)
        s = column_sums(K, x, n)
        return (propagate(s, 0)[:out_bits] & 1).astype(np.uint8)
    n, C = _window_for(out_bits)
    n += extra
    _check_prefix(K, x, n)
    s = column_sums(K, x, n)
    if strategy == "seed":
        d = propagate(s, seed)
    elif strategy == "scan":
        d = _scan_propagate(s, out_bits)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    return (d[:out_bits] & 1).astype(np.uint8)


def _scan_propagate(s, start):
    """Propagate from the first column N >= start with no carry leaving it.

    With towers computed under the assumption of no incoming carry at the
    end, a column N with d_N <= 1 passes no carry to N - 1; the prefix is
    then exact up to the carry that the unseen tail pushes into the window.
    """
    d = propagate(s, None)
    for N in range(start, s.size):
        if d[N] <= 1:
            return propagate(s[: N + 1], d[N])
    return d


def xor_mul(K, x, out_bits):
    """Shift-and-XOR product K (x) x = 0.s_0 s_1 ... with s_0 = 0.

    s_(n+1) = XOR_{k<=n} b_k c_(n-k).  Bit n only needs the first n bits
    of each input, so short inputs are zero-extended.
    """
    if out_bits < 1:
        raise ValueError("out_bits must be at least 1")
    return (column_sums(K, x, out_bits - 1) & 1).astype(np.uint8)


def clmul(a, b):
    """Carry-less product of non-negative integers (vectorised over arrays)."""
    a = np.asarray(a, dtype=np.uint64)
    b = np.asarray(b, dtype=np.uint64)
    out = np.zeros(np.broadcast(a, b).shape, dtype=np.uint64)
    bits = int(np.max(a)).bit_length() if a.size else 0
    for j in range(bits):
        out ^= np.where((a >> np.uint64(j)) & np.uint64(1), b << np.uint64(j), np.uint64(0))
    return out


def xor_mul_int(K, x, n):
    """xor_mul on n-bit strings packed as integers; returns the 2n-bit result.

    Equal to clmul(K, x) read as the string 0.s_0 ... s_(2n-1).
    """
    return clmul(K, x)


def xor_beta_shift(beta_bits, x, steps=1, out_bits=None):
    """Iterate the XOR analogue of the beta shift on a bit string.

    ``beta_bits`` are the binary digits of K = beta / 2 in (1/2, 1]; one
    step drops the first bit of x (the Bernoulli shift B) and forms
    2 (K (x) B(x)), i.e. the XOR product with its always-zero leading bit
    removed.  Each step consumes one bit of x, so ``x`` must have at least
    ``steps + out_bits`` bits.
    """
    K = as_bits(beta_bits)
    y = as_bits(x)
    out_bits = out_bits or y.size - steps
    if y.size < steps + out_bits:
        raise InsufficientPrefix(f"x needs {steps + out_bits} bits")
    for k in range(steps):
        width = y.size - 1
        y = xor_mul(K, y[1:], width + 1)[1:]
    return y[:out_bits]


def xor_beta_shift_value(beta, x, steps=1, bits=53):
    """xor_beta_shift on a float: digits of beta/2 and x, read back as a float."""
    beta = check_beta(beta)
    K = bits_of(beta / 2.0, bits) if beta < 2.0 else np.ones(bits, dtype=np.uint8)
    xb = bits_of(x, bits + steps)
    return bits_value(xor_beta_shift(K, xb, steps, bits))


def cantor_pipeline(K, x, variant, out_bits, exact=False, seed=None):
    """The stages S, F, C, A of multiplication with a column map F = f x f x ...

    Returns a dict with the column sums ``s``, the mapped sums ``fs``, the
    propagated towers ``d`` and the output bits ``a`` (first ``out_bits``).
    ``variant`` is a callable f on non-negative integers, or one of the
    names in ``VARIANTS``.
    """
    f = VARIANTS[variant] if isinstance(variant, str) else variant
    K, x = as_bits(K), as_bits(x)
    if exact:
        n = max(K.size + x.size, out_bits)
    else:
        n, _ = _window_for(out_bits)
        _check_prefix(K, x, n)
    s = column_sums(K, x, n)
    fs = np.array([f(int(v)) for v in s], dtype=np.int64)
    d = propagate(fs, 0 if exact else seed)
    return {"s": s, "fs": fs, "d": d, "a": (d[:out_bits] & 1).astype(np.uint8)}


VARIANTS = {
    "identity": lambda n: n,
    "mod2": lambda n: n % 2,
    "plus1": lambda n: n + 1,
    "minus1": lambda n: max(0, n - 1),
    "max1": lambda n: max(n, 1),
    "max2": lambda n: max(n, 2),
    "max3": lambda n: max(n, 3),
}


def xor_bijection_check(K, n):
    """Is x -> first n bits of 2 (K (x) x) a bijection on n-bit strings?

    Checked exhaustively over all 2^n strings.
    """
    K = as_bits(K)
    if K.size < n:
        raise InsufficientPrefix(f"K needs {n} bits")
    kint = bits_to_int(K[:n])
    xs = np.arange(1 << n, dtype=np.uint64)
    prod = clmul(np.uint64(kint), xs)
    # 2n-bit result 0.s_0 .. s_(2n-1); keep s_1 .. s_n
    top = (prod >> np.uint64(n - 1)) & np.uint64((1 << n) - 1)
    return bool(np.unique(top).size == 1 << n)


def ecpr(beta, x, prefix=48):
    """Compressor extended to all real x by cpr(x/beta) = cpr(x)/2.

    ecpr(x) = 2^n cpr(x / beta^n) for beta^n <= 2x < beta^(n+1), and
    ecpr(-x) = -ecpr(x).
    """
    beta = check_beta(beta)
    x = float(x)
    if x < 0:
        return -ecpr(beta, -x, prefix)
    n = 0
    while 2.0 * x >= beta:
        x /= beta
        n += 1
    return 2.0**n * compressor(beta, x, prefix)


def log_periodic(g, beta, w, x):
    """g'_w(x) = w^n g(x / beta^n) for beta^n <= x < beta^(n+1), x > 0.

    ``g`` is any function on [1, beta); the extension satisfies
    g'_w(beta x) = w g'_w(x).
    """
    if beta <= 1:
        raise ValueError("beta must exceed 1")
    x = float(x)
    if x <= 0:
        raise ValueError("x must be positive")
    n = math.floor(math.log(x) / math.log(beta))
    y = x / beta**n
    # guard the floor against rounding at the cell edges
    if y >= beta:
        n, y = n + 1, y / beta
    elif y < 1.0:
        n, y = n - 1, y * beta
    return w**n * g(y)
