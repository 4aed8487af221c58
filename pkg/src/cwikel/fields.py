"""Scalar fields sampled on uniform grids over a torus or a Euclidean box.

The data model is piecewise constant: each grid cell is an atom carrying the
cell-center value.  Torus fields use the normalized Haar measure (total mass
one); box fields use the Lebesgue measure.  Every quadrature in the package
is the midpoint rule on this model, which makes it exact for the model.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import IoError
from .stepfn import StepFunction, from_atoms

__all__ = [
    "Torus",
    "Box",
    "SampledFunction",
    "torus_function",
    "box_function",
    "decreasing_rearrangement",
    "band_coefficients",
]


@dataclass(frozen=True)
class Torus:
    """[-pi, pi)^d with opposite faces glued, normalized Haar measure."""

    half_width: float = math.pi
    kind: str = "torus"


@dataclass(frozen=True)
class Box:
    """[-L, L)^d with the Lebesgue measure."""

    half_width: float
    kind: str = "box"


@dataclass(frozen=True, eq=False)
class SampledFunction:
    dim: int
    domain: Torus | Box
    resolution: int
    values: np.ndarray
    measure: str  # "normalized" | "lebesgue"

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        expected = (self.resolution,) * self.dim
        if vals.shape != expected:
            raise ValueError(f"values shape {vals.shape} != {expected}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("values must be finite")
        if isinstance(self.domain, Torus) and self.measure != "normalized":
            raise ValueError("torus fields use the normalized Haar measure")
        if isinstance(self.domain, Box) and self.measure != "lebesgue":
            raise ValueError("box fields use the Lebesgue measure")
        object.__setattr__(self, "values", vals)

    # -- grid geometry ---------------------------------------------------

    @property
    def half_width(self) -> float:
        return self.domain.half_width

    @property
    def cell_width(self) -> float:
        """Cell edge length in coordinate units."""
        return 2.0 * self.half_width / self.resolution

    @property
    def cell_measure(self) -> float:
        """Measure of one grid cell under the declared convention."""
        if self.measure == "normalized":
            return 1.0 / self.resolution ** self.dim
        return self.cell_width ** self.dim

    @property
    def total_measure(self) -> float:
        return self.cell_measure * self.values.size

    def axis_centers(self) -> np.ndarray:
        """Cell-center coordinates along one axis."""
        m, L = self.resolution, self.half_width
        return -L + (np.arange(m) + 0.5) * (2.0 * L / m)

    def center_grids(self) -> list[np.ndarray]:
        """Meshgrid (ij indexing) of cell-center coordinates."""
        c = self.axis_centers()
        return list(np.meshgrid(*([c] * self.dim), indexing="ij"))

    def same_grid(self, other: "SampledFunction") -> bool:
        return (self.dim == other.dim and self.resolution == other.resolution
                and type(self.domain) is type(other.domain)
                and math.isclose(self.half_width, other.half_width))

    def with_values(self, values: np.ndarray) -> "SampledFunction":
        return SampledFunction(self.dim, self.domain, self.resolution, values, self.measure)

    def radii(self) -> np.ndarray:
        """Euclidean distance of every cell center from the origin."""
        grids = self.center_grids()
        return np.sqrt(sum(g * g for g in grids))

    # -- serialization -----------------------------------------------------

    def save(self, path) -> None:
        """Write a .grid file: one JSON header line, then the CSV value grid."""
        path = Path(path)
        header = {
            "dim": self.dim,
            "domain": {"kind": self.domain.kind, "half_width": self.half_width},
            "resolution": self.resolution,
            "measure": self.measure,
        }
        try:
            with open(path, "w") as fh:
                fh.write(json.dumps(header) + "\n")
                flat = self.values.reshape(-1, self.resolution) if self.dim > 1 else self.values.reshape(1, -1)
                for row in flat:
                    fh.write(",".join(repr(float(v)) for v in row) + "\n")
        except OSError as exc:
            raise IoError(str(exc)) from exc

    @classmethod
    def load(cls, path) -> "SampledFunction":
        path = Path(path)
        try:
            with open(path) as fh:
                header = json.loads(fh.readline())
                rows = [np.fromstring(line, sep=",") for line in fh if line.strip()]
        except (OSError, json.JSONDecodeError) as exc:
            raise IoError(f"cannot read grid file {path}: {exc}") from exc
        dim = int(header["dim"])
        res = int(header["resolution"])
        kind = header["domain"]["kind"]
        L = float(header["domain"]["half_width"])
        domain = Torus() if kind == "torus" else Box(L)
        vals = np.concatenate(rows).reshape((res,) * dim)
        return cls(dim, domain, res, vals, header["measure"])


def torus_function(dim: int, resolution: int, fn_or_values) -> SampledFunction:
    """Sample a callable at cell centers of the d-torus, or wrap an array."""
    if callable(fn_or_values):
        proto = SampledFunction(dim, Torus(), resolution,
                                np.zeros((resolution,) * dim), "normalized")
        vals = fn_or_values(*proto.center_grids())
        vals = np.broadcast_to(np.asarray(vals, dtype=float), (resolution,) * dim).copy()
    else:
        vals = np.asarray(fn_or_values, dtype=float)
    return SampledFunction(dim, Torus(), resolution, vals, "normalized")


def box_function(dim: int, half_width: float, resolution: int, fn_or_values) -> SampledFunction:
    if callable(fn_or_values):
        proto = SampledFunction(dim, Box(half_width), resolution,
                                np.zeros((resolution,) * dim), "lebesgue")
        vals = fn_or_values(*proto.center_grids())
        vals = np.broadcast_to(np.asarray(vals, dtype=float), (resolution,) * dim).copy()
    else:
        vals = np.asarray(fn_or_values, dtype=float)
    return SampledFunction(dim, Box(half_width), resolution, vals, "lebesgue")


def decreasing_rearrangement(f: SampledFunction) -> StepFunction:
    """mu(f): sort the cell atoms of |f| by value, cumulate their measures."""
    return from_atoms(f.values, uniform_measure=f.cell_measure,
                      total_support=f.total_measure)


def band_coefficients(f: SampledFunction, kmax: int) -> np.ndarray:
    """Fourier coefficients of f on the centered band |k|_inf <= kmax.

    Coefficient convention: fhat(k) = mean over the domain of f(x) e^{-i xi_k x}
    with xi_k = pi k / L, evaluated by the midpoint rule (exact for trig
    polynomials below the Nyquist band).  Index [i1, ..., id] holds mode
    k = (i1 - kmax, ..., id - kmax).
    """
    m, d = f.resolution, f.dim
    if m < 2 * kmax + 1:
        from .errors import AliasError
        raise AliasError(f"resolution {m} cannot carry modes up to {kmax}")
    spec = np.fft.rfftn(f.values) / m ** d
    size = 2 * kmax + 1
    out = np.zeros((size,) * d, dtype=complex)
    # phase from cell-centered samples on [-L, L): e^{i pi k (1 - 1/m)} per axis
    ks = np.arange(-kmax, kmax + 1)
    phase1 = np.exp(1j * math.pi * ks * (1.0 - 1.0 / m))
    half = m // 2 + 1
    for idx in np.ndindex(*((size,) * d)):
        k = tuple(i - kmax for i in idx)
        if k[-1] >= 0:
            src = tuple(ki % m for ki in k[:-1]) + (k[-1],)
            if src[-1] >= half:
                continue
            val = spec[src]
        else:
            src = tuple((-ki) % m for ki in k[:-1]) + (-k[-1],)
            val = np.conj(spec[src])
        ph = 1.0
        for ki in k:
            ph *= phase1[ki + kmax]
        out[idx] = ph * val
    # enforce exact conjugate symmetry (real f); FFT output is only
    # symmetric up to rounding, downstream Hermiticity checks are exact
    out = 0.5 * (out + np.conj(out[(slice(None, None, -1),) * d]))
    return out
