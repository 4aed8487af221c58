"""Per-cube polynomial projections, finite-rank approximants, and the
homogeneous Sobolev seminorms driving their error certificates.

Seminorm conventions (Lebesgue measure on [-pi, pi]^d and its subcubes):
  d = 1, s = 1/2: Gagliardo double integral with kernel |x - y|^{-2}, midpoint
      rule over cell pairs, diagonal pairs excluded (below grid scale).
  d = 2, s = 1:   integral of |grad u|^2 with the gradient from spectral
      differentiation of the periodic grid data.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import (DegenerateCube, GridMismatch, NegativeWeight,
                     UnsupportedDimension, ZeroFunction, ZeroSeminorm)
from .fields import SampledFunction, torus_function
from .geometry import TorusCube, cell_weights, member_mask, wrap_angle
from .orlicz import LLOGL, OrliczGauge, j_functional
from .covering import Covering, build_equal_j_covering

TWO_PI = 2.0 * math.pi

__all__ = [
    "CellProjector",
    "FiniteRankOperator",
    "poly_projector",
    "build_Kn",
    "apply_Kn",
    "weighted_error",
    "hom_seminorm",
    "sobolev_norm",
    "comparison_constant_probe",
    "scaled_holder_check",
    "random_fourier_coeffs",
    "evaluate_fourier",
    "random_band_limited",
]


def _basis_dimension(d: int) -> int:
    """Number of monomials of total degree < d/2."""
    return 1 if d <= 2 else 1 + d


@dataclass
class CellProjector:
    """Orthonormal polynomial basis (degree < d/2) on one cube, under the
    quadrature inner product given by the cube's fractional cell weights."""

    cube: TorusCube
    window: tuple
    weights: np.ndarray
    basis: np.ndarray  # (nbasis, *window_shape)

    @property
    def dimension(self) -> int:
        return self.basis.shape[0]

    def coefficients(self, u: SampledFunction) -> np.ndarray:
        uw = u.values[self.window]
        return np.tensordot(self.basis, self.weights * uw, axes=uw.ndim)

    def evaluate(self, coeffs: np.ndarray) -> np.ndarray:
        return np.tensordot(coeffs, self.basis, axes=1)

    def project(self, u: SampledFunction) -> np.ndarray:
        """P u on the cube window."""
        return self.evaluate(self.coefficients(u))


def poly_projector(cube: TorusCube, grid: SampledFunction) -> CellProjector:
    """Build the projection basis on a cube of the given grid.

    d <= 2 keeps only constants; d = 3 keeps the affine functions in the
    wrapped displacement from the cube center, orthonormalized by
    Gram-Schmidt under the quadrature inner product.
    """
    d = grid.dim
    window, w = cell_weights(grid, cube)
    if window is None:
        raise DegenerateCube("cube misses the grid entirely")
    nb = _basis_dimension(d)
    if int(np.count_nonzero(w > 0)) < nb:
        raise DegenerateCube(f"cube holds {np.count_nonzero(w > 0)} cells < basis dimension {nb}")
    monomials = [np.ones_like(w)]
    if nb > 1:
        centers = grid.axis_centers()
        for a in range(d):
            disp = wrap_angle(centers[window[a]] - cube.center[a])
            monomials.append(np.broadcast_to(disp, w.shape).astype(float).copy())
    basis = []
    for mono in monomials:
        b = mono.astype(float)
        for prev in basis:
            b = b - np.sum(w * b * prev) * prev
        nrm = math.sqrt(float(np.sum(w * b * b)))
        if nrm < 1e-14:
            raise DegenerateCube("degenerate quadrature: basis collapses")
        basis.append(b / nrm)
    return CellProjector(cube, window, w, np.stack(basis))


@dataclass
class FiniteRankOperator:
    """K = sum_k M_{Delta_k} P_k over a first-hit partition of a covering."""

    cells: list  # (delta_mask, CellProjector)
    covering: Covering
    grid_shape: tuple

    @property
    def rank_bound(self) -> int:
        return sum(p.dimension for mask, p in self.cells if mask.any())

    def to_json(self, path) -> None:
        payload = [{"cube": p.cube.to_dict(), "cells": int(mask.sum()),
                    "basis_dim": p.dimension} for mask, p in self.cells]
        with open(path, "w") as fh:
            json.dump({"rank_bound": self.rank_bound, "cells": payload}, fh, indent=1)


def build_Kn(f: SampledFunction, n: int, gauge: OrliczGauge = LLOGL,
             covering: Covering | None = None) -> FiniteRankOperator:
    """Finite-rank approximant over the equal-budget covering of f."""
    cov = covering if covering is not None else build_equal_j_covering(f, n, gauge)
    taken = np.zeros(f.values.shape, dtype=bool)
    cells = []
    for cube in cov.cubes:
        members = member_mask(f, cube)
        delta = members & ~taken
        taken |= members
        if not delta.any():
            continue
        cells.append((delta, poly_projector(cube, f)))
    return FiniteRankOperator(cells, cov, f.values.shape)


def apply_Kn(K: FiniteRankOperator, u: SampledFunction) -> SampledFunction:
    if u.values.shape != K.grid_shape:
        raise GridMismatch(f"operator grid {K.grid_shape} vs input {u.values.shape}")
    out = np.zeros_like(u.values)
    for delta, proj in K.cells:
        pu = proj.project(u)
        buf = out[proj.window]
        sub = delta[proj.window]
        buf[sub] = pu[sub]
        out[proj.window] = buf
    return u.with_values(out)


def weighted_error(f: SampledFunction, u: SampledFunction, K: FiniteRankOperator) -> float:
    """integral f |u - K u|^2 under f's measure convention."""
    if np.min(f.values) < 0:
        raise NegativeWeight("weight function must be nonnegative")
    if not f.same_grid(u):
        raise GridMismatch("f and u must share a grid")
    resid = u.values - apply_Kn(K, u).values
    return float(np.sum(f.values * resid * resid) * f.cell_measure)


# -- homogeneous Sobolev seminorms --------------------------------------------


def _lebesgue_weights(u: SampledFunction, domain: TorusCube | None):
    """Per-cell Lebesgue weights (radians^d) of the domain, with the window."""
    if domain is None:
        full = np.full(u.values.shape, u.cell_width ** u.dim)
        return tuple(np.ix_(*[np.arange(u.resolution)] * u.dim)), full
    window, w = cell_weights(u, domain)
    if window is None:
        return None, None
    return window, w * TWO_PI ** u.dim


def _spectral_gradient(values: np.ndarray) -> list[np.ndarray]:
    """Gradient of periodic grid data by Fourier differentiation."""
    m = values.shape[0]
    k = np.fft.fftfreq(m, d=1.0 / m)
    if m % 2 == 0:
        k[m // 2] = 0.0
    spec = np.fft.fftn(values)
    grads = []
    for axis in range(values.ndim):
        shape = [1] * values.ndim
        shape[axis] = m
        grads.append(np.real(np.fft.ifftn(spec * (1j * k.reshape(shape)))))
    return grads


def hom_seminorm(u: SampledFunction, s: float | None = None,
                 domain: TorusCube | None = None) -> float:
    """Homogeneous W^{d/2,2} seminorm of u on the whole torus or a subcube."""
    d = u.dim
    if d >= 3:
        raise UnsupportedDimension("seminorms implemented for d in {1, 2}")
    if s is None:
        s = d / 2.0
    if not math.isclose(s, d / 2.0):
        raise UnsupportedDimension(f"only the critical order s = d/2 is supported, got {s}")
    window, w = _lebesgue_weights(u, domain)
    if window is None:
        return 0.0
    if d == 2:
        gx, gy = _spectral_gradient(u.values)
        dens = gx * gx + gy * gy
        return math.sqrt(float(np.sum(dens[window] * w)))
    # d = 1: Gagliardo sum over cell pairs, diagonal excluded
    vals = u.values[window[0]]
    if domain is None:
        pos = u.axis_centers()
    else:
        pos = wrap_angle(u.axis_centers()[window[0]] - domain.center[0]) + domain.center[0]
    dv = np.subtract.outer(vals, vals)
    dx = np.subtract.outer(pos, pos)
    ww = np.multiply.outer(w, w)
    with np.errstate(divide="ignore", invalid="ignore"):
        integrand = np.where(np.abs(dx) >= 0.5 * u.cell_width, dv * dv / (dx * dx), 0.0)
    return math.sqrt(float(np.sum(integrand * ww)))


def sobolev_norm(u: SampledFunction, domain: TorusCube | None = None) -> float:
    """Full (non-homogeneous) W^{d/2,2} norm on the cube picture."""
    window, w = _lebesgue_weights(u, domain)
    l2sq = float(np.sum(u.values[window] ** 2 * w))
    return math.sqrt(l2sq + hom_seminorm(u, domain=domain) ** 2)


# -- random band-limited test functions ---------------------------------------


def random_fourier_coeffs(d: int, kmax: int, seed: int, decay: float) -> dict:
    """Gaussian coefficients c_k ~ |k|^(-decay) on half the band (conjugate
    modes implied); the represented function is real."""
    rng = np.random.default_rng(seed)
    coeffs = {}
    for mode in np.ndindex(*((2 * kmax + 1,) * d)):
        k = tuple(int(i) - kmax for i in mode)
        if all(ki == 0 for ki in k) or k < tuple([0] * d):
            continue
        amp = float(np.sqrt(sum(ki * ki for ki in k))) ** (-decay)
        coeffs[k] = amp * (rng.standard_normal() + 1j * rng.standard_normal())
    return coeffs


def evaluate_fourier(coeffs: dict, d: int, resolution: int, scale: float = 1.0) -> SampledFunction:
    """Sample u(scale * x) = sum_k 2 Re(c_k exp(i k . scale x)) on the torus grid."""
    proto = torus_function(d, resolution, np.zeros((resolution,) * d))
    grids = proto.center_grids()
    vals = np.zeros((resolution,) * d)
    for k, c in coeffs.items():
        phase = sum(ki * g for ki, g in zip(k, grids)) * scale
        vals += 2.0 * (c.real * np.cos(phase) - c.imag * np.sin(phase))
    return torus_function(d, resolution, vals)


def random_band_limited(d: int, resolution: int, kmax: int, seed: int,
                        decay: float | None = None) -> SampledFunction:
    """Seeded band-limited field with critical-regularity texture by default."""
    coeffs = random_fourier_coeffs(d, kmax, seed, d if decay is None else decay)
    return evaluate_fourier(coeffs, d, resolution)


# -- probes --------------------------------------------------------------------


def _orthogonalize_constants(u: SampledFunction, window, w) -> np.ndarray:
    uw = u.values[window]
    mass = float(np.sum(w))
    return uw - float(np.sum(w * uw)) / mass


def comparison_constant_probe(d: int, trials: int = 50, resolution: int = 64,
                              kmax: int = 10, seed: int = 7) -> dict:
    """Empirical constant in ||u||_{W^{s,2}} <= C ||u||_hom for mean-zero u.

    Returns the max and the full list of ratios over seeded random fields.
    """
    if d >= 3:
        raise UnsupportedDimension("probe limited to d in {1, 2}")
    ratios = []
    for t in range(trials):
        u = random_band_limited(d, resolution, kmax, seed + t, decay=d / 2 + 1)
        u = u.with_values(u.values - u.values.mean())
        hom = hom_seminorm(u)
        if hom < 1e-12:
            continue
        ratios.append(sobolev_norm(u) / hom)
    return {"max_ratio": max(ratios), "ratios": ratios, "trials": trials}


def scaled_holder_check(f: SampledFunction, u: SampledFunction, cube: TorusCube,
                        gauge: OrliczGauge = LLOGL) -> float:
    """Ratio integral_cube |f| u_orth^2 / (J(cube) ||u_orth||_hom^2).

    u is orthogonalized against degree < d/2 polynomials (constants here)
    under the cube quadrature before evaluation.
    """
    if not f.same_grid(u):
        raise GridMismatch("f and u must share a grid")
    window, w = cell_weights(f, cube)
    if window is None:
        raise ZeroSeminorm("cube misses the grid")
    u_orth = _orthogonalize_constants(u, window, w)
    # constants drop out of both seminorm conventions
    hom = hom_seminorm(u, domain=cube)
    if hom < 1e-12 or float(np.max(np.abs(u_orth))) < 1e-14:
        raise ZeroSeminorm("test function is polynomial on the cube")
    lhs = float(np.sum(np.abs(f.values[window]) * u_orth * u_orth * w))
    if lhs == 0.0:
        return 0.0
    jval = j_functional(f, cube, gauge)
    if jval <= 0:
        raise ZeroFunction("f vanishes on the cube")
    return lhs / (jval * hom * hom)
