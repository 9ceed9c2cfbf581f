"""Rasters and tables: bifurcation diagrams, colour maps and file writers.

Rasters are row-major uint8 arrays.  Diagrams over a parameter range put
the smallest parameter on the bottom row, so row 0 holds the largest.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .core_maps import map_function
from .measures import density_histogram, julia_raster

COLORMAPS = ("paper_grb", "gray")
GRB_HIGH = 2.0
GRB_LOW = 0.5


@dataclass
class Raster:
    pixels: np.ndarray  # (height, width, 3) or (height, width), uint8
    metadata: dict = field(default_factory=dict)

    @property
    def height(self):
        return self.pixels.shape[0]

    @property
    def width(self):
        return self.pixels.shape[1]


def paper_grb(ratio, high=GRB_HIGH, low=GRB_LOW):
    """Colour values by their ratio to the mean.

    ratio == 1 is pure green, ratio >= ``high`` pure red, ratio <= ``low``
    pure blue, interpolated on a log scale in between; zero is black.
    """
    r = np.asarray(ratio, dtype=float)
    out = np.zeros(r.shape + (3,), dtype=np.uint8)
    pos = r > 0
    with np.errstate(divide="ignore"):
        up = np.clip(np.log(np.where(pos, r, 1.0)) / np.log(high), 0.0, 1.0)
        down = np.clip(np.log(np.where(pos, r, 1.0)) / np.log(low), 0.0, 1.0)
    t = up - down  # in [-1, 1]
    red = np.where(t > 0, t, 0.0)
    blue = np.where(t < 0, -t, 0.0)
    green = 1.0 - np.abs(t)
    rgb = np.stack([red, green, blue], axis=-1)
    out[pos] = np.round(255.0 * rgb[pos]).astype(np.uint8)
    return out


def gray(values, vmax=None):
    """Linear grey levels, 0 -> black, ``vmax`` (default the maximum) -> white."""
    v = np.asarray(values, dtype=float)
    top = np.nanmax(v) if vmax is None else vmax
    if not top > 0:
        return np.zeros(v.shape, dtype=np.uint8)
    return np.round(255.0 * np.clip(v / top, 0.0, 1.0)).astype(np.uint8)


def colorize(values, colormap="paper_grb", rowwise_mean=True, high=GRB_HIGH, low=GRB_LOW):
    """RGB image of a 2-D array; paper_grb compares each row to its own mean."""
    v = np.asarray(values, dtype=float)
    if colormap == "gray":
        g = gray(v)
        return np.repeat(g[..., None], 3, axis=-1)
    if colormap != "paper_grb":
        raise ValueError(f"unknown colormap {colormap!r}; expected one of {COLORMAPS}")
    mean = v.mean(axis=1, keepdims=True) if rowwise_mean else v.mean()
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(mean > 0, v / mean, 0.0)
    return paper_grb(ratio, high, low)


def parameter_axis(lo, hi, rows):
    """Row parameters with the largest on top (row 0)."""
    if rows < 2:
        raise ValueError("need at least 2 rows")
    return np.linspace(hi, lo, rows)


def _row_seed(seed, row):
    return int(np.random.SeedSequence([seed, row]).generate_state(1)[0])


def bifurcation_densities(kind, beta_min, beta_max, rows, cols, samples, iters, seed=0):
    """(betas, densities): one normalised histogram of the map per row."""
    f = map_function(kind)
    if cols < 2:
        raise ValueError("need at least 2 columns")
    betas = parameter_axis(beta_min, beta_max, rows)
    dens = np.empty((rows, cols))
    for i, b in enumerate(betas):
        h = density_histogram(b, bins=cols, samples=samples, iters=iters,
                              seed=_row_seed(seed, i), step=f)
        dens[i] = h.density
    return betas, dens


def bifurcation_raster(kind, beta_min, beta_max, rows=400, cols=400, samples=2000, iters=400,
                       seed=0, colormap="paper_grb"):
    betas, dens = bifurcation_densities(kind, beta_min, beta_max, rows, cols, samples, iters, seed)
    meta = {"map": kind, "beta_min": beta_min, "beta_max": beta_max, "x_min": 0.0, "x_max": 1.0}
    return Raster(colorize(dens, colormap), meta), betas, dens


def julia_image(beta_min, beta_max, rows, depth, colormap="gray"):
    """Julia-tree values, one row per beta (largest on top).

    The left arm keeps values in [0, beta/2]; the right arm can exceed beta,
    so the grey scale saturates at 2.
    """
    if depth > 12:
        raise ValueError("depth must be at most 12")
    betas = parameter_axis(beta_min, beta_max, rows)
    vals = julia_raster(betas, depth)
    if colormap == "gray":
        img = np.repeat(gray(vals, 2.0)[..., None], 3, axis=-1)
    else:
        img = colorize(vals, colormap)
    return Raster(img, {"beta_min": beta_min, "beta_max": beta_max, "depth": depth}), betas, vals


# ------------------------------------------------------------------ writers


def _header(magic, w, h):
    return f"{magic}\n{w} {h}\n255\n".encode("ascii")


def write_pgm(path, pixels):
    """Binary greyscale (P5), maxval 255."""
    p = np.asarray(pixels)
    if p.ndim == 3:
        p = np.round(p.astype(float).mean(axis=-1))
    p = np.ascontiguousarray(p, dtype=np.uint8)
    with open(path, "wb") as fh:
        fh.write(_header("P5", p.shape[1], p.shape[0]))
        fh.write(p.tobytes())


def write_ppm(path, pixels):
    """Binary colour (P6), maxval 255."""
    p = np.asarray(pixels)
    if p.ndim == 2:
        p = np.repeat(p[..., None], 3, axis=-1)
    p = np.ascontiguousarray(p, dtype=np.uint8)
    with open(path, "wb") as fh:
        fh.write(_header("P6", p.shape[1], p.shape[0]))
        fh.write(p.tobytes())


def _cell(v):
    if isinstance(v, (complex, np.complexfloating)):
        return [f"{v.real:.17g}", f"{v.imag:.17g}"]
    if isinstance(v, (float, np.floating)):
        return [f"{v:.17g}"]
    return [str(v)]


def write_csv(path, header, rows):
    """Header line, then one line per row; reals as %.17g, complex as re,im."""
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(c for v in row for c in _cell(v)) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(_jsonable(obj), fh, indent=1)
        fh.write("\n")


def write_raster(path, raster, fmt):
    if fmt == "pgm":
        write_pgm(path, raster.pixels)
    elif fmt == "ppm":
        write_ppm(path, raster.pixels)
    else:
        raise ValueError(f"raster format must be pgm or ppm, got {fmt!r}")
