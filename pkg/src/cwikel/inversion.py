"""Euclidean-space machinery: inversion transforms, the right-hand-side
norms of the Euclidean estimate, and the counterexample family showing that
no symmetric-norm bound survives on the whole space.

The whole space is modeled as a periodized box of half-width L; L and the
lattice cutoff N are convergence knobs reported with every sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .errors import BoxTooSmall, NegativeFunction, OriginSingularity
from .fields import Box, SampledFunction, box_function, decreasing_rearrangement
from .orlicz import LLOGL, OrliczGauge, luxemburg_gauge, marcinkiewicz_psi_norm, orlicz_norm
from .spectral import SingularSpectrum, assemble_cwikel, psd_eigenvalues, weak_quasinorm
from .stepfn import indicator

__all__ = [
    "GrowthRecord",
    "unit_ball_mask",
    "inversion_V",
    "inversion_U",
    "rd_rhs_norm",
    "split_norm",
    "appendix_a_checks",
    "counterexample_family",
    "counterexample_growth",
    "small_ball_lower_bound",
]


def _require_box(f: SampledFunction) -> None:
    if not isinstance(f.domain, Box):
        raise ValueError("operation requires a box field")


def unit_ball_mask(f: SampledFunction, radius: float = 1.0) -> np.ndarray:
    """Cells whose center lies strictly inside the ball of the given radius."""
    return f.radii() < radius


def _inversion(f: SampledFunction, exponent: float) -> SampledFunction:
    """out(t) = |t|^exponent f(t / |t|^2) by multilinear interpolation.

    Cells closer to the origin than one grid cell are masked to zero; their
    image lies beyond the representable box anyway once resolution exceeds
    2 L^2 cells per axis.
    """
    _require_box(f)
    r = f.radii()
    cut = f.cell_width
    if float(np.min(r)) <= 0:
        raise OriginSingularity("grid carries a cell centered at the origin")
    grids = f.center_grids()
    r_safe = np.maximum(r, cut)
    pullback = np.stack([g / (r_safe * r_safe) for g in grids], axis=-1)
    axes = [f.axis_centers()] * f.dim
    interp = RegularGridInterpolator(axes, f.values, method="linear",
                                     bounds_error=False, fill_value=0.0)
    vals = interp(pullback.reshape(-1, f.dim)).reshape(f.values.shape)
    out = np.where(r >= cut, r_safe ** exponent * vals, 0.0)
    return f.with_values(out)


def inversion_V(f: SampledFunction) -> SampledFunction:
    """(V f)(t) = |t|^{-2d} f(t/|t|^2); preserves L1 mass, swaps the inside
    and the outside of the unit ball."""
    return _inversion(f, -2.0 * f.dim)


def inversion_U(xi: SampledFunction) -> SampledFunction:
    """(U xi)(t) = |t|^{-d} xi(t/|t|^2); unitary on L2, involutive."""
    return _inversion(xi, -float(xi.dim))


def masked_orlicz_norm(f: SampledFunction, mask: np.ndarray,
                       gauge: OrliczGauge = LLOGL) -> float:
    vals = f.values[mask]
    if vals.size == 0 or not np.any(vals):
        return 0.0
    return luxemburg_gauge(vals, np.full(vals.size, f.cell_measure), gauge)


def log_weighted_mass(f: SampledFunction, mask: np.ndarray | None = None) -> float:
    """integral |f(s)| log(1 + |s|) ds over the masked cells."""
    w = np.log1p(f.radii())
    vals = np.abs(f.values) * w
    if mask is not None:
        vals = np.where(mask, vals, 0.0)
    return float(np.sum(vals) * f.cell_measure)


def rd_rhs_norm(f: SampledFunction, gauge: OrliczGauge = LLOGL) -> float:
    """||f||_M + integral |f| log(1+|s|): the Euclidean right-hand side."""
    _require_box(f)
    return orlicz_norm(decreasing_rearrangement(f), gauge) + log_weighted_mass(f)


def split_norm(f: SampledFunction, gauge: OrliczGauge = LLOGL) -> float:
    """||f chi_B||_M + ||(V f) chi_B||_M over the unit ball B."""
    _require_box(f)
    ball = unit_ball_mask(f)
    return masked_orlicz_norm(f, ball, gauge) + masked_orlicz_norm(inversion_V(f), ball, gauge)


def appendix_a_checks(f: SampledFunction, gauge: OrliczGauge = LLOGL,
                      slack: float = 0.05) -> dict:
    """Evaluate the three exterior/interior exchange inequalities.

    f is masked to the exterior of the unit ball first.  The first two carry
    explicit constants (2d+2 and 1) and are asserted with quadrature slack;
    the third has an unnamed constant which is reported.
    """
    _require_box(f)
    d = f.dim
    ext = ~unit_ball_mask(f)
    f_ext = f.with_values(np.where(ext, f.values, 0.0))
    vf = inversion_V(f_ext)
    ball = unit_ball_mask(f)
    vf_ball = masked_orlicz_norm(vf, ball, gauge)
    f_ext_norm = masked_orlicz_norm(f_ext, ext, gauge)
    logmass = log_weighted_mass(f_ext, ext)
    const1 = 2 * d + 2
    rhs1 = const1 * (f_ext_norm + logmass)
    checks = {
        "interior_bound": {
            "lhs": vf_ball, "rhs": rhs1, "constant": const1,
            "holds": vf_ball <= rhs1 * (1 + slack),
        },
        "exterior_bound": {
            "lhs": f_ext_norm, "rhs": vf_ball, "constant": 1,
            "holds": f_ext_norm <= vf_ball * (1 + slack),
        },
        "log_mass_bound": {
            "lhs": logmass, "rhs": vf_ball,
            "empirical_constant": logmass / vf_ball if vf_ball > 0 else 0.0,
        },
    }
    return checks


def counterexample_family(n: int, d: int, half_width: float | None = None,
                          resolution: int | None = None) -> SampledFunction:
    """Union of n^d balls of radius 1/n centered at the integer points
    {0..n-1}^d; equimeasurable with the unit-ball indicator for every n."""
    if n < 2:
        raise ValueError("n must be >= 2")
    L = float(n + 1) if half_width is None else float(half_width)
    if L < n + 1:
        raise BoxTooSmall(f"need half-width >= {n + 1}, got {L}")
    m = resolution if resolution is not None else 4096
    proto = box_function(d, L, m, np.zeros((m,) * d))
    grids = proto.center_grids()
    vals = np.zeros((m,) * d)
    r = 1.0 / n
    for center in np.ndindex(*((n,) * d)):
        dist2 = sum((g - c) ** 2 for g, c in zip(grids, center))
        vals[dist2 < r * r] = 1.0
    return proto.with_values(vals)


@dataclass
class GrowthRecord:
    ns: list
    q_values: list
    norms: list  # ||f_n||_M per n, constant by equimeasurability
    slope: float
    intercept: float
    fitted: list
    residuals: list
    cutoff: int
    dim: int

    def rows(self):
        return [(n, q, fit, res) for n, q, fit, res in
                zip(self.ns, self.q_values, self.fitted, self.residuals)]


def _ols_sqrt_log(ns, qs):
    x = np.sqrt(np.log(np.asarray(ns, dtype=float)))
    A = np.stack([np.ones_like(x), x], axis=1)
    sol, *_ = np.linalg.lstsq(A, np.asarray(qs, dtype=float), rcond=None)
    fitted = A @ sol
    return float(sol[1]), float(sol[0]), fitted


def counterexample_growth(ns, d: int, N: int, resolution: int | None = None,
                          gauge: OrliczGauge = LLOGL) -> GrowthRecord:
    """Weak 2,inf quasi-norms of the half operator for the ball family.

    All members live on the common box of half-width max(ns)+1 so the
    lattices are identical; q_n is fitted against a + b sqrt(log n).
    """
    ns = sorted(int(n) for n in ns)
    if ns[0] < 2:
        raise ValueError("family needs n >= 2")
    L = float(max(ns) + 1)
    if resolution is None:
        resolution = 32768 if d == 1 else 4096
    if resolution < 2 * (2 * N + 1):
        raise BoxTooSmall("resolution cannot carry the requested band")
    qs, norms = [], []
    for n in ns:
        f_n = counterexample_family(n, d, half_width=L, resolution=resolution)
        mu = np.sqrt(np.sort(psd_eigenvalues(assemble_cwikel(f_n, N)))[::-1])
        qs.append(weak_quasinorm(SingularSpectrum(mu), 2.0))
        norms.append(orlicz_norm(decreasing_rearrangement(f_n), gauge))
    slope, intercept, fitted = _ols_sqrt_log(ns, qs)
    residuals = [q - fit for q, fit in zip(qs, fitted)]
    return GrowthRecord(ns=ns, q_values=qs, norms=norms, slope=slope,
                        intercept=intercept, fitted=list(fitted),
                        residuals=residuals, cutoff=N, dim=d)


def small_ball_lower_bound(r_list, d: int, N: int, half_width: float = 2.0,
                           resolution: int = 1024) -> dict:
    """Operator norm of the small-ball Cwikel matrix against the
    log-enhanced Marcinkiewicz norm of the matching indicator."""
    rows = []
    vol_unit = {1: 2.0, 2: math.pi, 3: 4.0 * math.pi / 3.0}[d]
    for r in r_list:
        if not (0 < r < 1):
            raise ValueError("radii must lie in (0, 1)")
        f = box_function(d, half_width, resolution, np.zeros((resolution,) * d))
        f = f.with_values(unit_ball_mask(f, radius=r).astype(float))
        op_norm = float(np.max(psd_eigenvalues(assemble_cwikel(f, N))))
        mpsi = marcinkiewicz_psi_norm(indicator(vol_unit * r ** d))
        rows.append({"r": r, "op_norm": op_norm, "mpsi": mpsi,
                     "ratio": op_norm / mpsi})
    ratios = [row["ratio"] for row in rows]
    return {"rows": rows, "min_ratio": min(ratios), "max_ratio": max(ratios)}
