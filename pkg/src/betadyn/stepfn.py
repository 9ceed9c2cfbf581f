"""Piecewise-constant functions on an interval.

A ``StepFn`` stores sorted breakpoints ``x_0 < x_1 < ... < x_n`` and one
value per interval ``[x_i, x_{i+1})``; it vanishes outside [x_0, x_n).
Integrals, products and distances between step functions are exact
finite sums, which is all the invariant-measure and wavelet code needs.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class StepFn:
    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.breakpoints, dtype=float)
        v = np.asarray(self.values)
        if b.ndim != 1 or v.ndim != 1 or b.size != v.size + 1:
            raise ValueError("need len(breakpoints) == len(values) + 1")
        if np.any(np.diff(b) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_points(cls, points, values_fn):
        """Build from unsorted, possibly repeated breakpoints.

        ``values_fn`` receives the interval midpoints and returns values.
        """
        b = np.unique(np.asarray(points, dtype=float))
        mids = 0.5 * (b[1:] + b[:-1])
        return cls(b, np.asarray(values_fn(mids)))

    def __call__(self, x):
        xa = np.asarray(x, dtype=float)
        i = np.searchsorted(self.breakpoints, xa, side="right") - 1
        inside = (i >= 0) & (i < self.values.size)
        out = np.where(inside, self.values[np.clip(i, 0, self.values.size - 1)], 0)
        return out.item() if out.ndim == 0 else out

    @property
    def widths(self):
        return np.diff(self.breakpoints)

    def integral(self):
        return np.sum(self.values * self.widths).item()

    def normalized(self):
        return StepFn(self.breakpoints, self.values / self.integral())

    def cumulative(self, x):
        """Exact integral from the left end up to ``x`` (piecewise linear)."""
        c = np.concatenate([[0.0], np.cumsum(self.values * self.widths)])
        return np.interp(x, self.breakpoints, c)

    def bin_averages(self, edges):
        """Exact mean value over each bin ``[edges[i], edges[i+1])``."""
        edges = np.asarray(edges, dtype=float)
        c = self.cumulative(edges)
        return np.diff(c) / np.diff(edges)

    def merge(self, other):
        """Values of both functions on the common refinement."""
        b = np.union1d(self.breakpoints, other.breakpoints)
        mids = 0.5 * (b[1:] + b[:-1])
        return b, self(mids), other(mids)

    def __mul__(self, other):
        if isinstance(other, StepFn):
            b, u, v = self.merge(other)
            return StepFn(b, u * v)
        return StepFn(self.breakpoints, self.values * other)

    __rmul__ = __mul__

    def inner(self, other):
        """Exact integral of the product."""
        b, u, v = self.merge(other)
        return float(np.sum(u * v * np.diff(b)))

    def l1_distance(self, other):
        b, u, v = self.merge(other)
        return float(np.sum(np.abs(u - v) * np.diff(b)))

    def rescaled(self, scale):
        """The function x -> f(x / scale), i.e. stretched by ``scale``."""
        return StepFn(self.breakpoints * scale, self.values)


def from_bins(edges, values):
    """Step function with one value per histogram bin."""
    return StepFn(np.asarray(edges, dtype=float), np.asarray(values))


def indicator(a, b):
    """Indicator function of [a, b)."""
    return StepFn(np.array([a, b], dtype=float), np.array([1.0]))
