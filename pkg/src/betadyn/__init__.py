"""Beta-shift dynamics: maps, symbolic codes, invariant measures, transfer
operators, periodic orbits, widened-map islands, carry arithmetic and
Hessenberg polynomials."""

from . import (
    bergman,
    carrymul,
    core_maps,
    errors,
    hessenberg,
    islands,
    measures,
    orbits,
    render,
    symbolic,
)
from .errors import (
    BetaDynError,
    BitOutOfRange,
    Divergent,
    DomainExcluded,
    InsufficientPrefix,
    NoConvergence,
    NoLimit,
    ReducibleMatrix,
    TroubleSpot,
    Unbounded,
)

__version__ = "0.1.0"
