"""Command-line front end: ``betadyn <subcommand> [flags]``.

Exit codes: 0 success, 2 bad usage, 3 file I/O failure, 4 numeric failure
(no convergence, trouble spot, unstable limit, ...).
"""

import argparse
import sys

import numpy as np

from . import bergman, carrymul, hessenberg, islands, measures, orbits, render
from .core_maps import MAP_KINDS
from .errors import BetaDynError

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 0, 2, 3, 4


class UsageError(ValueError):
    pass


def _fmt(args, allowed):
    fmt = args.format or allowed[0]
    if fmt not in allowed:
        raise UsageError(f"--format must be one of {', '.join(allowed)} for '{args.command}'")
    return fmt


def _positive(name, value, least=1):
    if value < least:
        raise UsageError(f"--{name} must be at least {least}")


def _beta_range(args):
    if not args.beta_min < args.beta_max:
        raise UsageError("--beta-min must be below --beta-max")


# ------------------------------------------------------------- subcommands


def cmd_bifurcate(args):
    fmt = _fmt(args, ("ppm", "pgm", "csv"))
    _beta_range(args)
    _positive("rows", args.rows, 2)
    _positive("cols", args.cols, 2)
    raster, betas, dens = render.bifurcation_raster(
        args.map, args.beta_min, args.beta_max, args.rows, args.cols,
        args.samples, args.iters, args.seed, args.colormap)
    if fmt == "csv":
        xs = (np.arange(args.cols) + 0.5) / args.cols
        render.write_csv(args.out, ["beta", "x", "density"],
                         ((b, x, d) for b, row in zip(betas, dens) for x, d in zip(xs, row)))
    else:
        render.write_raster(args.out, raster, fmt)


def cmd_density(args):
    fmt = _fmt(args, ("csv", "json"))
    _positive("bins", args.bins, 2)
    if args.method == "histogram":
        f = measures.density_histogram(args.beta, args.bins, args.samples, args.iters, args.seed).as_stepfn()
    elif args.method == "parry":
        f = measures.parry_measure(args.beta)
    else:
        f = measures.fp_recurse(args.beta, grid=args.bins)
    edges = np.linspace(0.0, 1.0, args.bins + 1)
    vals = f.bin_averages(edges)
    rows = [(float(a), float(b), float(v)) for a, b, v in zip(edges[:-1], edges[1:], vals)]
    if fmt == "csv":
        render.write_csv(args.out, ["x_lo", "x_hi", "density"], rows)
    else:
        render.write_json(args.out, {"beta": args.beta, "method": args.method,
                                     "edges": edges, "density": vals})


def cmd_spectrum(args):
    fmt = _fmt(args, ("csv", "json"))
    _positive("dim", args.dim, 1)
    ev = hessenberg.spectrum(hessenberg.operator_matrix(args.beta, args.dim))
    if fmt == "csv":
        render.write_csv(args.out, ["re", "im"], ((complex(z),) for z in ev))
    else:
        render.write_json(args.out, {"beta": args.beta, "dim": args.dim, "eigenvalues": ev})


def cmd_orbits(args):
    fmt = _fmt(args, ("csv", "json"))
    _positive("order", args.order, 2)
    polys = orbits.admissible_polys(args.order)
    if fmt == "csv":
        seq = lambda p: " ".join(map(str, orbits.beta_fibonacci(p.bits, args.terms)))
        render.write_csv(args.out, ["index", "binary", "degree", "root", "sequence"],
                         ((p.index, p.binary, p.degree, float(p.root), seq(p)) for p in polys))
    else:
        render.write_json(args.out, [
            {"index": p.index, "binary": p.binary, "degree": p.degree, "root": p.root,
             "sequence": orbits.beta_fibonacci(p.bits, args.terms)} for p in polys])


def _island_params(args):
    return {"sigma": args.sigma, "p": args.p, "alpha": args.alpha}


def cmd_islands(args):
    fmt = _fmt(args, ("csv", "json"))
    _beta_range(args)
    _positive("cols", args.cols, 2)
    _positive("order", args.order, 1)
    rows = []
    for b in np.linspace(args.beta_min, args.beta_max, args.cols):
        spec = islands.IslandMapSpec(args.family, float(b), args.eps, **_island_params(args))
        for k in range(1, args.order + 1):
            for x, mult in islands.stable_cycles(spec, k):
                rows.append((float(b), k, x, mult))
    if fmt == "csv":
        render.write_csv(args.out, ["beta", "period", "x", "multiplier"], rows)
    else:
        render.write_json(args.out, [dict(zip(("beta", "period", "x", "multiplier"), r)) for r in rows])


def cmd_recur(args):
    fmt = _fmt(args, ("ppm", "pgm", "csv"))
    _beta_range(args)
    _positive("rows", args.rows, 2)
    _positive("cols", args.cols, 2)
    if not 0 < args.eps_max < 0.25:
        raise UsageError("--eps-max must lie in (0, 1/4)")
    betas = np.linspace(args.beta_min, args.beta_max, args.cols)
    epss = np.linspace(args.eps_max, args.eps_max / args.rows, args.rows)  # largest eps on top
    grid = islands.tongue_scan(args.family, betas, epss, args.delta, args.budget, args.seed,
                               **_island_params(args))
    if fmt == "csv":
        grid.to_csv(args.out)
        return
    # short recurrence times bright, long ones dark, on a log scale
    t = np.log(grid.times) / np.log(args.budget)
    img = render.gray(1.0 - t, 1.0)
    render.write_raster(args.out, render.Raster(img), fmt)


def cmd_mul(args):
    fmt = _fmt(args, ("json", "csv"))
    _positive("bits", args.bits, 1)
    K = carrymul.parse_bits(args.k)
    x = carrymul.parse_bits(args.x)
    if args.mode == "carry":
        out = carrymul.shift_add_mul(K, x, args.bits, exact=args.exact)
    else:
        out = carrymul.xor_mul(K, x, args.bits)
    text = carrymul.format_bits(out)
    if fmt == "json":
        render.write_json(args.out, {"k": args.k, "x": args.x, "mode": args.mode,
                                     "product": text, "hex": carrymul.bits_to_hex(out)})
    else:
        render.write_csv(args.out, ["k", "x", "mode", "product"], [(args.k, args.x, args.mode, text)])


def cmd_bergman(args):
    fmt = _fmt(args, ("csv", "json"))
    _positive("dim", args.dim, 23)
    if args.beta is not None:
        a = bergman.moment_asymptotics(args.beta, args.dim)
        rows = [(args.beta, a.C, a.B, a.A, a.diagnostics["spread"])]
    else:
        _beta_range(args)
        _positive("cols", args.cols, 2)
        rows = bergman.sweep(np.linspace(args.beta_min, args.beta_max, args.cols), args.dim)
    if fmt == "csv":
        bergman.write_sweep_csv(args.out, rows)
    else:
        render.write_json(args.out, [dict(zip(("beta", "C", "B", "A", "spread"), r)) for r in rows])


def cmd_julia(args):
    fmt = _fmt(args, ("pgm", "ppm", "csv"))
    _beta_range(args)
    _positive("rows", args.rows, 2)
    if not 1 <= args.depth <= 12:
        raise UsageError("--depth must lie in 1..12")
    raster, betas, vals = render.julia_image(args.beta_min, args.beta_max, args.rows, args.depth,
                                             args.colormap)
    if fmt == "csv":
        width = vals.shape[1]
        render.write_csv(args.out, ["beta", "x", "value"],
                         ((b, c / width, v) for b, row in zip(betas, vals) for c, v in enumerate(row)))
    else:
        render.write_raster(args.out, raster, fmt)


# ------------------------------------------------------------------ parser


def _common(p, beta_range=None, seed=False):
    p.add_argument("--out", required=True, metavar="PATH", help="output file")
    p.add_argument("--format", choices=("pgm", "ppm", "csv", "json"),
                   help="output format (default: first listed for the subcommand)")
    if beta_range:
        p.add_argument("--beta-min", type=float, default=beta_range[0],
                       help=f"smallest beta (default {beta_range[0]})")
        p.add_argument("--beta-max", type=float, default=beta_range[1],
                       help=f"largest beta (default {beta_range[1]})")
    if seed:
        p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")


def _island_flags(p, family):
    p.add_argument("--family", choices=islands.FAMILIES, default=family,
                   help=f"widened-map family (default {family})")
    p.add_argument("--sigma", type=int, choices=(1, -1), default=1, help="orientation of the middle (default 1)")
    p.add_argument("--p", type=float, default=5.0, help="kink exponent (default 5)")
    p.add_argument("--alpha", type=float, default=0.0, help="kink offset (default 0)")


def build_parser():
    ap = argparse.ArgumentParser(prog="betadyn", description="Beta-shift dynamics toolkit.")
    sub = ap.add_subparsers(dest="command", required=True, metavar="<subcommand>")

    p = sub.add_parser("bifurcate", help="density bifurcation diagram (formats ppm, pgm, csv)")
    _common(p, (1.0, 2.0), seed=True)
    p.add_argument("--map", choices=MAP_KINDS, default="beta_shift", help="map (default beta_shift)")
    p.add_argument("--rows", type=int, default=400, help="beta rows (default 400)")
    p.add_argument("--cols", type=int, default=400, help="x bins (default 400)")
    p.add_argument("--samples", type=int, default=2000, help="orbits per row (default 2000)")
    p.add_argument("--iters", type=int, default=400, help="iterations per orbit (default 400)")
    p.add_argument("--colormap", choices=render.COLORMAPS, default="paper_grb",
                   help="colour scheme (default paper_grb)")
    p.set_defaults(func=cmd_bifurcate)

    p = sub.add_parser("density", help="invariant density at one beta (formats csv, json)")
    _common(p, seed=True)
    p.add_argument("--beta", type=float, default=1.6, help="slope (default 1.6)")
    p.add_argument("--method", choices=("histogram", "parry", "ulam"), default="parry",
                   help="how to compute it (default parry)")
    p.add_argument("--bins", type=int, default=800, help="output bins on [0,1] (default 800)")
    p.add_argument("--samples", type=int, default=24000, help="histogram orbits (default 24000)")
    p.add_argument("--iters", type=int, default=4000, help="histogram iterations (default 4000)")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("spectrum", help="transfer-operator eigenvalues (formats csv, json)")
    _common(p)
    p.add_argument("--beta", type=float, default=1.6, help="slope (default 1.6)")
    p.add_argument("--dim", type=int, default=200, help="matrix dimension (default 200)")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("orbits", help="admissible orbit polynomials of one order (formats csv, json)")
    _common(p)
    p.add_argument("--order", type=int, default=5, help="orbit length (default 5)")
    p.add_argument("--terms", type=int, default=12, help="recurrence terms listed (default 12)")
    p.set_defaults(func=cmd_orbits)

    p = sub.add_parser("islands", help="attracting cycles of a widened map (formats csv, json)")
    _common(p, (1.01, 2.0))
    _island_flags(p, "kink")
    p.add_argument("--eps", type=float, default=0.12, help="half-width of the middle (default 0.12)")
    p.add_argument("--cols", type=int, default=101, help="beta samples (default 101)")
    p.add_argument("--order", type=int, default=4, help="largest period searched (default 4)")
    p.set_defaults(func=cmd_islands)

    p = sub.add_parser("recur", help="mean recurrence-time map over (beta, eps) (formats ppm, pgm, csv)")
    _common(p, (1.01, 2.0), seed=True)
    _island_flags(p, "soft")
    p.add_argument("--eps-max", type=float, default=0.2, help="largest eps, top row (default 0.2)")
    p.add_argument("--rows", type=int, default=100, help="eps rows (default 100)")
    p.add_argument("--cols", type=int, default=200, help="beta columns (default 200)")
    p.add_argument("--delta", type=float, default=islands.DEFAULT_DELTA,
                   help=f"return distance (default {islands.DEFAULT_DELTA})")
    p.add_argument("--budget", type=int, default=islands.DEFAULT_BUDGET,
                   help=f"iteration cap (default {islands.DEFAULT_BUDGET})")
    p.set_defaults(func=cmd_recur)

    p = sub.add_parser("mul", help="carry or XOR product of two bit strings (formats json, csv)")
    _common(p)
    p.add_argument("--k", required=True, help="multiplier, e.g. 0.1011")
    p.add_argument("--x", required=True, help="multiplicand, e.g. 0.0110")
    p.add_argument("--mode", choices=("carry", "xor"), default="carry", help="(default carry)")
    p.add_argument("--bits", type=int, default=16, help="output bits (default 16)")
    p.add_argument("--exact", action="store_true", help="treat inputs as finite (zero tails)")
    p.set_defaults(func=cmd_mul)

    p = sub.add_parser("bergman", help="moment-matrix limits C, B, A (formats csv, json)")
    _common(p, (1.1, 1.95))
    p.add_argument("--beta", type=float, default=None, help="single beta instead of a sweep")
    p.add_argument("--cols", type=int, default=60, help="sweep points (default 60)")
    p.add_argument("--dim", type=int, default=120, help="polynomials used (default 120)")
    p.set_defaults(func=cmd_bergman)

    p = sub.add_parser("julia", help="dyadic-tree Julia raster (formats pgm, ppm, csv)")
    _common(p, (1.0, 2.0))
    p.add_argument("--rows", type=int, default=256, help="beta rows (default 256)")
    p.add_argument("--depth", type=int, default=10, help="tree depth; width 2^depth (default 10)")
    p.add_argument("--colormap", choices=render.COLORMAPS, default="gray", help="(default gray)")
    p.set_defaults(func=cmd_julia)
    return ap


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        args.func(args)
    except BetaDynError as exc:
        print(f"betadyn: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"betadyn: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"betadyn: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
