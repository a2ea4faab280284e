"""Tensor-product sample grids with a fixed (C-order) point ordering."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Grid:
    axes: tuple
    weights: np.ndarray = None  # per-point quadrature weights, midpoint grids only

    @property
    def shape(self):
        return tuple(len(a) for a in self.axes)

    @property
    def points(self):
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def __len__(self):
        return int(np.prod(self.shape))


def product_grid(ranges, counts, periodic=None):
    """Sample grid; periodic axes omit the right endpoint.

    ``ranges`` is a list of ``(lo, hi)``; ``counts`` the number of points per axis.
    """
    if len(ranges) != len(counts):
        raise ValueError("ranges and counts differ in length")
    periodic = periodic or [False] * len(counts)
    axes = []
    for (lo, hi), n, per in zip(ranges, counts, periodic):
        if n < 2:
            raise ValueError("grid counts must be at least 2 per axis")
        axes.append(np.linspace(lo, hi, n, endpoint=not per))
    return Grid(tuple(axes))


def midpoint_grid(ranges, counts):
    """Cell midpoints with cell-volume weights (midpoint quadrature rule)."""
    axes, widths = [], []
    for (lo, hi), n in zip(ranges, counts):
        if n < 1:
            raise ValueError("midpoint grids need at least one cell per axis")
        w = (hi - lo) / n
        axes.append(lo + w * (np.arange(n) + 0.5))
        widths.append(w)
    weights = np.full(int(np.prod(counts)), float(np.prod(widths)))
    return Grid(tuple(axes), weights)


def parse_grid(text):
    """``"32x16"`` -> ``(32, 16)``."""
    try:
        counts = tuple(int(p) for p in text.lower().split("x"))
    except ValueError as exc:
        raise ValueError(f"bad grid {text!r}; expected e.g. 32x16") from exc
    if any(c < 2 for c in counts):
        raise ValueError("grid counts must be at least 2 per axis")
    return counts
