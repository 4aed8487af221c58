"""Nonincreasing step functions on (0, oo).

A StepFunction is the canonical home of decreasing rearrangements: it is
nonnegative, nonincreasing, right-continuous and piecewise constant, with
finitely many breakpoints.  Singular value sequences are identified with
step functions of unit-width steps.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonIntegrable

__all__ = [
    "StepFunction",
    "indicator",
    "from_atoms",
    "dilation",
    "disjoint_sum",
]


@dataclass(frozen=True)
class StepFunction:
    """g(t) = values[i] on (breakpoints[i-1], breakpoints[i]), 0 beyond the last.

    breakpoints are strictly increasing positive reals (the last may be +inf),
    values are nonincreasing and nonnegative, one per interval.  total_support
    records the measure of the ambient space the function was rearranged from
    (1.0 for the normalized torus, +inf for the half line).
    """

    breakpoints: np.ndarray
    values: np.ndarray
    total_support: float = math.inf

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)
        if bp.shape != vals.shape or bp.ndim != 1:
            raise ValueError("breakpoints and values must be 1-d arrays of equal length")
        if bp.size:
            if not np.all(bp > 0):
                raise ValueError("breakpoints must be positive")
            if not np.all(np.diff(bp) > 0):
                raise ValueError("breakpoints must be strictly increasing")
            if np.any(vals < 0):
                raise ValueError("values must be nonnegative")
            if np.any(np.diff(vals) > 1e-15 * max(1.0, vals[0])):
                raise ValueError("values must be nonincreasing")
            if math.isfinite(self.total_support) and bp[-1] > self.total_support * (1 + 1e-12):
                raise ValueError("support exceeds total_support")

    # -- basic geometry -------------------------------------------------

    @property
    def widths(self) -> np.ndarray:
        if not self.breakpoints.size:
            return np.zeros(0)
        return np.diff(np.concatenate(([0.0], self.breakpoints)))

    @property
    def support(self) -> float:
        """Measure of {g > 0}."""
        pos = self.values > 0
        if not pos.any():
            return 0.0
        return float(self.breakpoints[np.nonzero(pos)[0][-1]])

    def is_zero(self) -> bool:
        return not self.values.size or bool(np.all(self.values == 0))

    def __call__(self, t):
        """Evaluate at t > 0 (vectorized, right-continuous)."""
        t = np.asarray(t, dtype=float)
        if not self.values.size:
            out = np.zeros_like(t)
            return out if out.ndim else 0.0
        idx = np.searchsorted(self.breakpoints, t, side="right")
        padded = np.concatenate((self.values, [0.0]))
        out = padded[np.minimum(idx, self.values.size)]
        return out if out.ndim else float(out)

    # -- calculus --------------------------------------------------------

    def integral(self, upto: float = math.inf) -> float:
        """Integral over (0, upto), in closed form."""
        if not self.values.size:
            return 0.0
        left = np.concatenate(([0.0], self.breakpoints[:-1]))
        right = np.minimum(self.breakpoints, upto)
        lens = np.clip(right - left, 0.0, None)
        mass = lens * self.values
        if np.any(np.isinf(lens) & (self.values > 0)):
            return math.inf
        return float(np.sum(mass[lens > 0]))

    def prefix_integral_breakpoints(self) -> np.ndarray:
        """Cumulative integral evaluated at each breakpoint."""
        w = self.widths
        return np.cumsum(w * self.values)

    def truncate(self, horizon: float) -> "StepFunction":
        """Restrict to (0, horizon); values beyond are dropped."""
        if horizon <= 0:
            return StepFunction(np.zeros(0), np.zeros(0), total_support=self.total_support)
        keep = np.concatenate(([0.0], self.breakpoints[:-1])) < horizon
        bp = np.minimum(self.breakpoints[keep], horizon)
        return StepFunction(bp, self.values[keep], total_support=self.total_support)

    def scale(self, c: float) -> "StepFunction":
        if c < 0:
            raise ValueError("scale factor must be nonnegative")
        return StepFunction(self.breakpoints, self.values * c, total_support=self.total_support)

    def level_measure(self, s: float) -> float:
        """Measure of {g > s}; with the rearrangement this is the distribution function."""
        above = self.values > s
        if not above.any():
            return 0.0
        return float(self.breakpoints[np.nonzero(above)[0][-1]])

    # -- serialization ----------------------------------------------------

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t_left", "t_right", "value"])
            left = 0.0
            for right, v in zip(self.breakpoints, self.values):
                w.writerow([repr(left), repr(float(right)), repr(float(v))])
                left = float(right)

    @classmethod
    def from_csv(cls, path, total_support: float = math.inf) -> "StepFunction":
        rights, vals = [], []
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                rights.append(float(row["t_right"]))
                vals.append(float(row["value"]))
        return cls(np.array(rights), np.array(vals), total_support=total_support)


def indicator(measure: float, height: float = 1.0, total_support: float = math.inf) -> StepFunction:
    """height * chi_(0, measure)."""
    if measure <= 0 or height == 0:
        return StepFunction(np.zeros(0), np.zeros(0), total_support=total_support)
    return StepFunction(np.array([measure]), np.array([float(height)]), total_support=total_support)


def from_atoms(values, measures=None, uniform_measure: float | None = None,
               total_support: float = math.inf) -> StepFunction:
    """Rearrange a collection of atoms (value, measure) into a StepFunction.

    With uniform_measure set, breakpoints are cumulative_count * measure so
    that level measures match atom counting bit for bit.
    """
    vals = np.abs(np.asarray(values, dtype=float).ravel())
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    if uniform_measure is not None:
        nz = vals > 0
        vals = vals[nz]
        if not vals.size:
            return StepFunction(np.zeros(0), np.zeros(0), total_support=total_support)
        # merge equal consecutive values; breakpoints from integer counts
        change = np.nonzero(np.diff(vals))[0]
        ends = np.concatenate((change, [vals.size - 1]))
        counts = ends + 1
        return StepFunction(counts * uniform_measure, vals[ends], total_support=total_support)
    meas = np.asarray(measures, dtype=float).ravel()[order]
    keep = (vals > 0) & (meas > 0)
    vals, meas = vals[keep], meas[keep]
    if not vals.size:
        return StepFunction(np.zeros(0), np.zeros(0), total_support=total_support)
    change = np.nonzero(np.diff(vals))[0]
    ends = np.concatenate((change, [vals.size - 1]))
    bp = np.cumsum(meas)[ends]
    return StepFunction(bp, vals[ends], total_support=total_support)


def dilation(g: StepFunction, u: float) -> StepFunction:
    """(sigma_u g)(t) = g(t / u); stretches the support by the factor u."""
    if u <= 0:
        raise ValueError("dilation factor must be positive")
    ts = g.total_support * u if math.isfinite(g.total_support) else math.inf
    return StepFunction(g.breakpoints * u, g.values, total_support=ts)


def disjoint_sum(parts: list[StepFunction]) -> StepFunction:
    """Rearrangement of the disjoint sum of the given step functions."""
    vals, meas = [], []
    has_inf_tail = False
    for g in parts:
        w = g.widths
        vals.append(g.values)
        meas.append(w)
        if np.any(np.isinf(w) & (g.values > 0)):
            has_inf_tail = True
    if not vals:
        return StepFunction(np.zeros(0), np.zeros(0))
    if has_inf_tail:
        raise NonIntegrable("disjoint sum with infinite-measure positive part")
    return from_atoms(np.concatenate(vals), np.concatenate(meas))
