"""Axis-parallel cubes on the torus and their grid geometry.

A cube is a product of arcs of equal length; the side is expressed in
normalized measure units, so a cube of side t has Haar measure t^d and the
side-1 cube is the whole torus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

__all__ = ["TorusCube", "wrap_angle", "axis_overlap", "cell_weights", "member_mask", "cubes_intersect"]


def wrap_angle(x):
    """Map angles to [-pi, pi)."""
    return (np.asarray(x) + math.pi) % TWO_PI - math.pi


@dataclass(frozen=True)
class TorusCube:
    center: tuple
    side: float  # normalized units, in (0, 1]
    dim: int

    def __post_init__(self):
        if not (0 < self.side <= 1 + 1e-12):
            raise ValueError(f"cube side {self.side} outside (0, 1]")
        if len(self.center) != self.dim:
            raise ValueError("center dimension mismatch")
        object.__setattr__(self, "side", min(float(self.side), 1.0))
        object.__setattr__(self, "center", tuple(float(wrap_angle(c)) for c in self.center))

    @property
    def half_width(self) -> float:
        """Half edge length in radians."""
        return self.side * math.pi

    @property
    def measure(self) -> float:
        return self.side ** self.dim

    def to_dict(self) -> dict:
        return {"center": list(self.center), "side": self.side, "dim": self.dim}

    @classmethod
    def from_dict(cls, d: dict) -> "TorusCube":
        return cls(tuple(d["center"]), float(d["side"]), int(d["dim"]))


def axis_overlap(centers: np.ndarray, cell_width: float, cube_center: float,
                 half_width: float) -> np.ndarray:
    """Arc length of each grid cell's intersection with [c-h, c+h] on the circle.

    Handles wrap-around by summing over the three periodic copies of the cell.
    """
    lo = wrap_angle(centers - cube_center) - 0.5 * cell_width
    hi = lo + cell_width
    total = np.zeros_like(lo)
    for shift in (-TWO_PI, 0.0, TWO_PI):
        total += np.clip(np.minimum(hi + shift, half_width)
                         - np.maximum(lo + shift, -half_width), 0.0, None)
    return np.minimum(total, cell_width)


def cell_weights(field, cube: TorusCube):
    """Normalized-measure weight of every grid cell inside the cube.

    Returns (index_slices, weights) where weights has the shape of the
    nonzero window; exact for the piecewise-constant data model.
    """
    m = field.resolution
    centers = field.axis_centers()
    w_axes, windows = [], []
    for a in range(cube.dim):
        w = axis_overlap(centers, field.cell_width, cube.center[a], cube.half_width) / TWO_PI
        nz = np.nonzero(w > 0)[0]
        if nz.size == 0:
            return None, None
        w_axes.append(w[nz])
        windows.append(nz)
    weights = w_axes[0]
    for a in range(1, cube.dim):
        weights = np.multiply.outer(weights, w_axes[a])
    return np.ix_(*windows), weights


def member_mask(field, cube: TorusCube, rtol: float = 1e-9) -> np.ndarray:
    """Boolean mask of cells whose center lies in the (closed) cube."""
    centers = field.axis_centers()
    h = cube.half_width * (1 + rtol)
    masks = [np.abs(wrap_angle(centers - cube.center[a])) <= h for a in range(cube.dim)]
    out = masks[0]
    for a in range(1, cube.dim):
        out = np.logical_and.outer(out, masks[a])
    return out


def cubes_intersect(a: TorusCube, b: TorusCube, tol: float = 1e-12) -> bool:
    """True if the open cubes overlap with positive measure on every axis."""
    for ca, cb in zip(a.center, b.center):
        gap = abs(float(wrap_angle(ca - cb)))
        # arc centers are gap apart; the short and the long way around
        direct = a.half_width + b.half_width - gap
        wrapped = a.half_width + b.half_width - (TWO_PI - gap)
        if max(direct, wrapped) <= tol:
            return False
    return True
