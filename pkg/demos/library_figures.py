"""Data for the figures that have no dedicated ``betadyn`` subcommand.

Each subcommand writes one CSV table or PPM image built from the library:

    python3 demos/library_figures.py <figure> --out PATH

Run with ``--help`` for the list.  Images put the largest parameter on the
top row and use the same green = mean, red = high, blue = low colouring
as ``betadyn bifurcate``.
"""

import argparse

import numpy as np
import scipy.linalg

from betadyn import bergman as bg
from betadyn import carrymul as cm
from betadyn import core_maps as cmaps
from betadyn import hessenberg as hs
from betadyn import islands as il
from betadyn import measures as me
from betadyn import orbits as ob
from betadyn import render
from betadyn import symbolic as sy
from betadyn.errors import TroubleSpot

BETAS = (1.2, 1.4, 1.6, 1.8, 2.0)


def _table(out, header, columns):
    render.write_csv(out, header, zip(*columns))


def _image(out, values, colormap="paper_grb"):
    render.write_ppm(out, render.colorize(values, colormap))


def _density_rows(step, betas, cols, samples, iters, seed=0):
    rows = np.empty((len(betas), cols))
    for i, b in enumerate(betas):
        h = me.density_histogram(b, bins=cols, samples=samples, iters=iters, seed=seed + i, step=step)
        rows[i] = h.density
    return rows


# ---------------------------------------------------------------- maps and digits


def fig_maps(args):
    """Graphs of the interval maps at one beta."""
    x = np.linspace(0.0, 1.0, args.cols)
    cols = [x] + [np.asarray(cmaps.map_function(k)(args.beta, x)) for k in cmaps.MAP_KINDS]
    _table(args.out, ["x", *cmaps.MAP_KINDS], cols)


def _cpr(beta, y, prefix=48):
    k = cmaps.digits(beta, y, prefix)
    return 0.5 ** np.arange(1, prefix + 1) @ k


def fig_compressor(args):
    """cpr_beta(y) on [0, 1] for several beta."""
    y = np.linspace(0.0, 1.0, args.cols)
    _table(args.out, ["y", *(f"beta={b}" for b in BETAS)], [y] + [_cpr(b, np.minimum(y, b / 2)) for b in BETAS])


def fig_expander(args):
    """pdr_beta(y) on [0, 1] for several beta."""
    y = np.linspace(0.0, 1.0, args.cols)
    _table(args.out, ["y", *(f"beta={b}" for b in BETAS)],
           [y] + [np.array([sy.expander(b, v) for v in y]) for b in BETAS])


def fig_compressor_range(args):
    """How much of [0, beta/2] the compressor sends into each output bin."""
    betas = render.parameter_axis(1.0 + 1.0 / args.rows, 2.0, args.rows)
    counts = np.empty((args.rows, args.cols))
    for i, b in enumerate(betas):
        out = _cpr(b, np.linspace(0.0, b / 2, args.samples))
        counts[i] = np.bincount(np.minimum((out * args.cols).astype(int), args.cols - 1), minlength=args.cols)
    _image(args.out, counts)


def fig_takagi(args):
    """Skew Takagi curve and its first partial sums (beta 1.6, w 0.7)."""
    x = np.linspace(0.0, 1.0, args.cols)
    orders = (1, 2, 3, 4, 40)
    _table(args.out, ["x", *(f"order={k}" for k in orders)], [x] + [sy.takagi(1.6, 0.7, x, k) for k in orders])


def fig_haar(args):
    """Skew Haar wavelet: mother and fourth partial sum (beta 1.6, w 0.7)."""
    x = np.linspace(0.0, 1.0, args.cols, endpoint=False)
    _table(args.out, ["x", "order=1", "order=4"], [x, sy.haar(1.6, 0.7, x, 1), sy.haar(1.6, 0.7, x, 4)])


# ---------------------------------------------------------------- tree functions


def _tree(beta, x, y, depth):
    return me.tree_function(beta, sy.binary_digits(x, depth), y)


def fig_gamma(args):
    """Gamma compositions along the binary digits of x (beta 1.6, y = 0 and 0.7)."""
    x = np.linspace(0.0, 1.0, args.cols, endpoint=False)
    cols, header = [x], ["x"]
    for y in (0.0, 0.7):
        for n in (1, 2, 4, 8, 24):
            cols.append(np.array([me.gamma_compose(1.6, sy.binary_digits(v, n), y) for v in x]))
            header.append(f"y={y},n={n}")
        cols.append(np.array([_tree(1.6, v, y, args.depth) for v in x], dtype=float))
        header.append(f"y={y},tree")
    _table(args.out, header, cols)


def fig_tree(args):
    """Tree function over (x, y) at one beta: green where 1, black where 0."""
    ys = np.linspace(1.0, 0.0, args.rows)
    xs = np.linspace(0.0, 1.0, args.cols, endpoint=False)
    t = np.array([[_tree(args.beta, x, y, args.depth) for x in xs] for y in ys], dtype=float)
    _image(args.out, t)


def fig_tree_beta(args):
    """Tree function over (x, beta) at fixed y."""
    betas = render.parameter_axis(1.0 + 1e-9, 2.0, args.rows)
    xs = np.linspace(0.0, 1.0, args.cols, endpoint=False)
    t = np.array([[_tree(b, x, args.y, args.depth) for x in xs] for b in betas], dtype=float)
    _image(args.out, t)


def fig_tree_unified(args):
    """Largest y (on a grid) with tree function 1, over (x, beta)."""
    betas = render.parameter_axis(1.0 + 1e-9, 2.0, args.rows)
    xs = np.linspace(0.0, 1.0, args.cols, endpoint=False)
    ys = np.linspace(0.0, 1.0, 21)
    top = np.zeros((args.rows, args.cols))
    for i, b in enumerate(betas):
        for j, x in enumerate(xs):
            bits = sy.binary_digits(x, args.depth)
            ok = [y for y in ys if me.tree_function(b, bits, y)]
            top[i, j] = max(ok) if ok else 0.0
    render.write_ppm(args.out, render.paper_grb(2.0 * top))


# ---------------------------------------------------------------- transfer operator


def fig_matrix(args):
    """|<n|L|m>| for n, m < 48; red >= 0.66, green 0.33, blue <= 0.16."""
    a = np.abs(hs.operator_matrix(args.beta, 48).entries)
    render.write_ppm(args.out, render.paper_grb(a / 0.33))


def fig_eigenfunction(args):
    """Eigenfunction for the eigenvalue nearest -1/beta."""
    A = hs.operator_matrix(args.beta, args.dim)
    ev, vec = scipy.linalg.eig(A.entries)
    k = np.argmin(np.abs(ev + 1.0 / args.beta))
    f = hs.expansion(A.basis, vec[:, k].real)
    x = np.linspace(0.0, 1.0, args.cols, endpoint=False)
    _table(args.out, ["x", f"eigenvalue={ev[k].real:.6f}{ev[k].imag:+.6f}i"], [x, f(x)])


def fig_fp_coefficients(args):
    """Invariant-density coefficients v_n against n for several beta."""
    betas = (1.1, 1.3, 1.5, 1.7, 1.9)
    vs = [hs.fp_vector(hs.operator_matrix(b, args.dim)) for b in betas]
    _table(args.out, ["n", *(f"beta={b}" for b in betas)], [np.arange(args.dim)] + vs)


def fig_fp_vs_beta(args):
    """v_1 .. v_5 as beta varies (NaN at the trouble spots)."""
    betas = np.linspace(1.01, 1.99, args.cols)
    v = np.full((args.cols, 5), np.nan)
    for i, b in enumerate(betas):
        try:
            v[i] = hs.fp_vector(hs.operator_matrix(b, args.dim))[1:6]
        except TroubleSpot:
            pass
    _table(args.out, ["beta", *(f"v{k}" for k in range(1, 6))], [betas] + list(v.T))


def fig_orbit_coefficients(args):
    """Midpoint orbit m_p against the rescaled coefficients 10 v_p beta^p."""
    v = hs.fp_vector(hs.operator_matrix(args.beta, args.dim))
    m = hs.midpoint_orbit(args.beta, args.dim).points[: args.dim]
    p = np.arange(m.size)
    _table(args.out, ["p", "midpoint", "scaled_coefficient"], [p, m, 10.0 * v[: m.size] * args.beta ** p])


def fig_midpoints(args):
    """First five midpoints m_0 .. m_4 as beta varies (NaN after a halt)."""
    betas = np.linspace(1.0 + 1e-6, 2.0, args.cols)
    m = np.full((args.cols, 5), np.nan)
    for i, b in enumerate(betas):
        pts = hs.midpoint_orbit(b, 5).points[:5]
        m[i, : pts.size] = pts
    _table(args.out, ["beta", *(f"m{k}" for k in range(5))], [betas] + list(m.T))


def fig_subdiagonal(args):
    """Sub-diagonal entries <n+1|L|n> for n < dim - 1."""
    cols = [np.arange(args.dim - 1)]
    for b in (1.1, 1.6):
        cols.append(np.diag(hs.operator_matrix(b, args.dim).entries, -1))
    _table(args.out, ["n", "beta=1.1", "beta=1.6"], cols)


def fig_bergman_diagonal(args):
    """Diagonal Bergman coefficients p_nn / beta^n."""
    A = hs.operator_matrix(args.beta, args.dim + 1)
    P = bg.bergman_polys(A, args.dim)
    n = np.arange(args.dim)
    _table(args.out, ["n", "p_nn/beta^n"], [n, np.diag(P.coeffs) / args.beta ** n])


# ---------------------------------------------------------------- golden means


def _all_roots(kmax):
    return np.sort([float(p.root) for k in range(2, kmax + 1) for p in ob.admissible_polys(k)])


def fig_root_distribution(args):
    """Normalised bin counts of the admissible roots of order <= k on (1, 2)."""
    cols, header = [], []
    for k in (args.order - 4, args.order - 2, args.order):
        r = _all_roots(k)
        counts, edges = np.histogram(r, bins=1303, range=(1.0, 2.0))
        if not cols:
            cols.append(0.5 * (edges[:-1] + edges[1:]))
            header.append("beta")
        cols.append(counts / (r.size * np.diff(edges)))
        header.append(f"order<={k}")
    _table(args.out, header, cols)


def fig_root_gaps(args):
    """Reciprocal gaps 1 / (N (r_{n+1} - r_n)) between sorted roots."""
    r = _all_roots(args.order)
    _table(args.out, ["root", "inverse_gap"], [r[:-1], 1.0 / (r.size * np.diff(r))])


# ---------------------------------------------------------------- widened maps and carries


def fig_island_maps(args):
    """Density bifurcation diagram of a widened beta shift."""
    def step(b, x):
        return il.island_step(il.IslandMapSpec(args.family, b, args.eps, args.sigma, args.p, args.alpha), x)

    betas = render.parameter_axis(args.beta_min, args.beta_max, args.rows)
    _image(args.out, _density_rows(step, betas, args.cols, args.samples, args.iters))


def fig_carry_variants(args):
    """Bifurcation diagram of x -> K * B(x) with column sums mapped by f, K = beta/2."""
    f = cm.VARIANTS[args.variant]

    def step(b, xs):
        K = cm.bits_of(b / 2.0, 52) if b < 2.0 else np.ones(52, dtype=np.uint8)
        out = np.empty_like(xs)
        for i, x in enumerate(xs):
            bx = cm.bits_of(x, 53)[1:]
            out[i] = cm.bits_value(cm.cantor_pipeline(K, bx, f, 52, exact=True)["a"])
        return out

    betas = render.parameter_axis(1.0 + 1.0 / args.rows, 2.0, args.rows)
    rows = np.empty((args.rows, args.cols))
    for i, b in enumerate(betas):
        h = me.density_histogram(b, bins=args.cols, samples=args.samples, iters=args.iters, seed=i,
                                 step=step, dither=False)
        rows[i] = h.density
    _image(args.out, rows)


def fig_xor_curves(args):
    """Shift-and-XOR products (2/3) (x) x and (4/5) (x) x against x."""
    x = np.linspace(0.0, 1.0, args.cols, endpoint=False)
    cols = [x]
    for K in (2 / 3, 4 / 5):
        kb = cm.bits_of(K, 53)
        cols.append(np.array([cm.bits_value(cm.xor_mul(kb, cm.bits_of(v, 53), 53)) for v in x]))
    _table(args.out, ["x", "K=2/3", "K=4/5"], cols)


FIGURES = {
    "maps": fig_maps,
    "compressor": fig_compressor,
    "expander": fig_expander,
    "compressor-range": fig_compressor_range,
    "takagi": fig_takagi,
    "haar": fig_haar,
    "gamma": fig_gamma,
    "tree": fig_tree,
    "tree-beta": fig_tree_beta,
    "tree-unified": fig_tree_unified,
    "matrix": fig_matrix,
    "eigenfunction": fig_eigenfunction,
    "fp-coefficients": fig_fp_coefficients,
    "fp-vs-beta": fig_fp_vs_beta,
    "orbit-coefficients": fig_orbit_coefficients,
    "midpoints": fig_midpoints,
    "subdiagonal": fig_subdiagonal,
    "bergman-diagonal": fig_bergman_diagonal,
    "root-distribution": fig_root_distribution,
    "root-gaps": fig_root_gaps,
    "island-maps": fig_island_maps,
    "carry-variants": fig_carry_variants,
    "xor-curves": fig_xor_curves,
}

DEFAULTS = {
    "maps": {"beta": 1.6},
    "compressor-range": {"rows": 200, "cols": 400, "samples": 4000},
    "tree": {"beta": 1.6, "rows": 200, "cols": 400},
    "tree-beta": {"rows": 200, "cols": 400},
    "tree-unified": {"rows": 100, "cols": 200},
    "matrix": {"beta": 1.6},
    "eigenfunction": {"beta": 1.6, "dim": 400},
    "fp-coefficients": {"dim": 100},
    "fp-vs-beta": {"dim": 40, "cols": 400},
    "orbit-coefficients": {"beta": 1.1, "dim": 200},
    "subdiagonal": {"dim": 500},
    "bergman-diagonal": {"beta": 1.2, "dim": 120},
    "island-maps": {"rows": 200, "cols": 200, "samples": 500, "iters": 200},
    "carry-variants": {"rows": 48, "cols": 96, "samples": 40, "iters": 30},
}


def build_parser():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("figure", choices=FIGURES, help="which table or image to produce")
    ap.add_argument("--out", required=True, help="output path (.csv or .ppm)")
    ap.add_argument("--beta", type=float, default=None, help="slope, where one is used")
    ap.add_argument("--rows", type=int, default=None, help="image rows")
    ap.add_argument("--cols", type=int, default=None, help="samples along x, or image columns")
    ap.add_argument("--samples", type=int, default=None, help="orbits or preimages per row")
    ap.add_argument("--iters", type=int, default=None, help="iterations per orbit")
    ap.add_argument("--dim", type=int, default=None, help="matrix dimension")
    ap.add_argument("--depth", type=int, default=24, help="binary digits of x for tree functions (default 24)")
    ap.add_argument("--y", type=float, default=0.0, help="tree-function y (default 0)")
    ap.add_argument("--order", type=int, default=12, help="largest polynomial order for root plots (default 12)")
    ap.add_argument("--family", choices=il.FAMILIES, default="zigzag", help="widened-map family (default zigzag)")
    ap.add_argument("--eps", type=float, default=0.04, help="widened-map half width (default 0.04)")
    ap.add_argument("--sigma", type=int, choices=(1, -1), default=1, help="orientation (default 1)")
    ap.add_argument("--p", type=float, default=5.0, help="kink exponent (default 5)")
    ap.add_argument("--alpha", type=float, default=0.0, help="kink offset (default 0)")
    ap.add_argument("--beta-min", type=float, default=1.0 + 1e-9, help="island-maps smallest beta")
    ap.add_argument("--beta-max", type=float, default=2.0, help="island-maps largest beta")
    ap.add_argument("--variant", choices=cm.VARIANTS, default="mod2", help="carry variant (default mod2)")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    base = {"beta": 1.6, "rows": 100, "cols": 1000, "samples": 1000, "iters": 200, "dim": 200}
    base.update(DEFAULTS.get(args.figure, {}))
    for k, v in base.items():
        if getattr(args, k) is None:
            setattr(args, k, v)
    FIGURES[args.figure](args)


if __name__ == "__main__":
    main()
