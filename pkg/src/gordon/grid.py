"""Uniform rectangular grids, masked fields, and finite-difference primitives.

Everything downstream (solution families, transforms, harmonic maps) is built
on the three containers defined here plus a handful of second-order stencil
and quadrature operations.  Fields are immutable after construction; every
operation returns a new field and propagates validity masks so that singular
points never contaminate residual norms.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass

import numpy as np

# A point is masked out when a formula denominator drops below this, or any
# intermediate exceeds the magnitude cap.
SINGULARITY_EPS = 1e-8
MAGNITUDE_CAP = 1e12


@dataclass(frozen=True)
class Grid2D:
    """Uniform tensor grid on [x0, x1] x [y0, y1] with nx x ny samples."""

    x0: float
    x1: float
    y0: float
    y1: float
    nx: int
    ny: int

    def __post_init__(self):
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise ValueError("grid bounds must be ordered: x1 > x0 and y1 > y0")
        if self.nx < 5 or self.ny < 5:
            raise ValueError("need nx >= 5 and ny >= 5 for five-point stencils")

    @property
    def hx(self) -> float:
        return (self.x1 - self.x0) / (self.nx - 1)

    @property
    def hy(self) -> float:
        return (self.y1 - self.y0) / (self.ny - 1)

    def x(self) -> np.ndarray:
        return np.linspace(self.x0, self.x1, self.nx)

    def y(self) -> np.ndarray:
        return np.linspace(self.y0, self.y1, self.ny)

    def mesh(self):
        """Coordinate arrays X, Y of shape (nx, ny); entry (i, j) is (x_i, y_j)."""
        return np.meshgrid(self.x(), self.y(), indexing="ij")

    def index_of_x(self, x: float) -> int:
        """Index of the grid line x = const, or raise if x is off-grid."""
        i = int(round((x - self.x0) / self.hx))
        if i < 0 or i >= self.nx or abs(self.x0 + i * self.hx - x) > 1e-9 * max(1.0, self.hx):
            raise ValueError(f"x = {x} does not coincide with a grid line")
        return i

    def index_of_y(self, y: float) -> int:
        j = int(round((y - self.y0) / self.hy))
        if j < 0 or j >= self.ny or abs(self.y0 + j * self.hy - y) > 1e-9 * max(1.0, self.hy):
            raise ValueError(f"y = {y} does not coincide with a grid line")
        return j

    def to_json(self) -> dict:
        return dataclasses.asdict(self)

    @staticmethod
    def from_json(d: dict) -> "Grid2D":
        return Grid2D(d["x0"], d["x1"], d["y0"], d["y1"], int(d["nx"]), int(d["ny"]))


def make_grid(x0, x1, y0, y1, nx, ny) -> Grid2D:
    return Grid2D(float(x0), float(x1), float(y0), float(y1), int(nx), int(ny))


@dataclass(frozen=True)
class ScalarField:
    """Real values on a Grid2D with a validity mask (True = valid).

    Invalid entries hold 0.0 so that arithmetic on the raw array stays finite.
    """

    grid: Grid2D
    values: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        shape = (self.grid.nx, self.grid.ny)
        if self.values.shape != shape or self.mask.shape != shape:
            raise ValueError(f"field arrays must have shape {shape}")
        if not np.all(np.isfinite(self.values[self.mask])):
            raise ValueError("field has non-finite values at valid points")
        self.values.setflags(write=False)
        self.mask.setflags(write=False)

    def sup_norm(self, interior: bool = True):
        """(sup |value| over valid points, number of valid points).

        With interior=True the one-cell boundary frame is excluded, matching
        how stencil outputs are reported.
        """
        m = self.mask.copy()
        if interior:
            m[0, :] = m[-1, :] = False
            m[:, 0] = m[:, -1] = False
        n = int(np.count_nonzero(m))
        if n == 0:
            return float("nan"), 0
        return float(np.max(np.abs(self.values[m]))), n


@dataclass(frozen=True)
class ComplexField:
    """Complex values u = re + i*im on a Grid2D with a validity mask."""

    grid: Grid2D
    re: np.ndarray
    im: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        shape = (self.grid.nx, self.grid.ny)
        for a in (self.re, self.im, self.mask):
            if a.shape != shape:
                raise ValueError(f"field arrays must have shape {shape}")
        ok = self.mask
        if not (np.all(np.isfinite(self.re[ok])) and np.all(np.isfinite(self.im[ok]))):
            raise ValueError("field has non-finite values at valid points")
        self.re.setflags(write=False)
        self.im.setflags(write=False)
        self.mask.setflags(write=False)

    def complex_values(self) -> np.ndarray:
        return self.re + 1j * self.im


def field(grid: Grid2D, values: np.ndarray, mask: np.ndarray | None = None) -> ScalarField:
    """Build a ScalarField, masking out non-finite or capped entries."""
    values = np.asarray(values, dtype=float)
    ok = np.isfinite(values) & (np.abs(values) <= MAGNITUDE_CAP)
    if mask is not None:
        ok = ok & mask
    vals = np.where(ok, values, 0.0)
    return ScalarField(grid, vals, ok)


def complex_field(grid: Grid2D, re, im, mask: np.ndarray | None = None) -> ComplexField:
    re = np.asarray(re, dtype=float)
    im = np.asarray(im, dtype=float)
    ok = (
        np.isfinite(re)
        & np.isfinite(im)
        & (np.abs(re) <= MAGNITUDE_CAP)
        & (np.abs(im) <= MAGNITUDE_CAP)
    )
    if mask is not None:
        ok = ok & mask
    return ComplexField(grid, np.where(ok, re, 0.0), np.where(ok, im, 0.0), ok)


def _shrink_mask(mask: np.ndarray) -> np.ndarray:
    """Valid iff the point and its four axis neighbours are valid (interior only)."""
    out = np.zeros_like(mask)
    out[1:-1, 1:-1] = (
        mask[1:-1, 1:-1]
        & mask[2:, 1:-1]
        & mask[:-2, 1:-1]
        & mask[1:-1, 2:]
        & mask[1:-1, :-2]
    )
    return out


def laplacian(f: ScalarField) -> ScalarField:
    """Five-point Laplacian, second order; boundary and mask-adjacent points invalid."""
    g = f.grid
    v = f.values
    out = np.zeros_like(v)
    out[1:-1, 1:-1] = (v[2:, 1:-1] + v[:-2, 1:-1] - 2 * v[1:-1, 1:-1]) / g.hx**2 + (
        v[1:-1, 2:] + v[1:-1, :-2] - 2 * v[1:-1, 1:-1]
    ) / g.hy**2
    return field(g, out, _shrink_mask(f.mask))


def partial_x(f: ScalarField) -> ScalarField:
    g = f.grid
    v = f.values
    out = np.zeros_like(v)
    out[1:-1, :] = (v[2:, :] - v[:-2, :]) / (2 * g.hx)
    m = np.zeros_like(f.mask)
    m[1:-1, :] = f.mask[1:-1, :] & f.mask[2:, :] & f.mask[:-2, :]
    return field(g, out, m)


def partial_y(f: ScalarField) -> ScalarField:
    g = f.grid
    v = f.values
    out = np.zeros_like(v)
    out[:, 1:-1] = (v[:, 2:] - v[:, :-2]) / (2 * g.hy)
    m = np.zeros_like(f.mask)
    m[:, 1:-1] = f.mask[:, 1:-1] & f.mask[:, 2:] & f.mask[:, :-2]
    return field(g, out, m)


def wirtinger(u: ComplexField):
    """(d/dz u, d/dzbar u) with dz = (dx - i dy)/2, dzbar = (dx + i dy)/2."""
    g = u.grid
    rx = partial_x(ScalarField(g, u.re, u.mask))
    ry = partial_y(ScalarField(g, u.re, u.mask))
    ix = partial_x(ScalarField(g, u.im, u.mask))
    iy = partial_y(ScalarField(g, u.im, u.mask))
    mask = rx.mask & ry.mask & ix.mask & iy.mask
    ux = rx.values + 1j * ix.values
    uy = ry.values + 1j * iy.values
    dz = (ux - 1j * uy) / 2
    dzb = (ux + 1j * uy) / 2
    return (
        complex_field(g, dz.real, dz.imag, mask),
        complex_field(g, dzb.real, dzb.imag, mask),
    )


def _cumtrapz_anchored(values: np.ndarray, t: np.ndarray, k0: int, axis: int) -> np.ndarray:
    """Cumulative trapezoid along `axis`, zero at index k0.

    Summation order is fixed (ascending index) so results are bit-identical
    across runs.
    """
    v = np.moveaxis(values, axis, 0)
    dt = np.diff(t).reshape((-1,) + (1,) * (v.ndim - 1))
    seg = (v[1:] + v[:-1]) / 2 * dt
    c = np.concatenate([np.zeros((1,) + v.shape[1:]), np.cumsum(seg, axis=0)], axis=0)
    c = c - c[k0]
    return np.moveaxis(c, 0, axis)


def _contiguous_valid(mask: np.ndarray, k0: int, axis: int) -> np.ndarray:
    """Valid iff every point between index k0 and here (inclusive) is valid."""
    m = np.moveaxis(mask, axis, 0)
    out = np.zeros_like(m)
    out[k0] = m[k0]
    acc = m[k0].copy()
    for k in range(k0 + 1, m.shape[0]):
        acc = acc & m[k]
        out[k] = acc
    acc = m[k0].copy()
    for k in range(k0 - 1, -1, -1):
        acc = acc & m[k]
        out[k] = acc
    return np.moveaxis(out, 0, axis)


def cumulative_integral_x(f: ScalarField, x_start: float) -> ScalarField:
    """Row-wise trapezoidal cumulative integral from the grid line x = x_start."""
    g = f.grid
    i0 = g.index_of_x(x_start)
    c = _cumtrapz_anchored(f.values, g.x(), i0, axis=0)
    return field(g, c, _contiguous_valid(f.mask, i0, axis=0))


def cumulative_integral_y(f: ScalarField, y_start: float) -> ScalarField:
    """Column-wise trapezoidal cumulative integral from the grid line y = y_start."""
    g = f.grid
    j0 = g.index_of_y(y_start)
    c = _cumtrapz_anchored(f.values, g.y(), j0, axis=1)
    return field(g, c, _contiguous_valid(f.mask, j0, axis=1))


# ---------------------------------------------------------------------------
# CSV / JSON wire formats


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def dump_scalar_csv(f: ScalarField, path: str) -> None:
    """Write `x,y,value,valid` rows, looping y in the outer loop."""
    x = f.grid.x()
    y = f.grid.y()
    with open(path, "w") as fh:
        fh.write("x,y,value,valid\n")
        for j in range(f.grid.ny):
            for i in range(f.grid.nx):
                fh.write(
                    f"{_fmt(x[i])},{_fmt(y[j])},{_fmt(f.values[i, j])},{int(f.mask[i, j])}\n"
                )


def dump_complex_csv(u: ComplexField, path: str) -> None:
    """Write `x,y,re,im,valid` rows, looping y in the outer loop."""
    x = u.grid.x()
    y = u.grid.y()
    with open(path, "w") as fh:
        fh.write("x,y,re,im,valid\n")
        for j in range(u.grid.ny):
            for i in range(u.grid.nx):
                fh.write(
                    f"{_fmt(x[i])},{_fmt(y[j])},{_fmt(u.re[i, j])},{_fmt(u.im[i, j])},"
                    f"{int(u.mask[i, j])}\n"
                )


def dump_grid_sidecar(grid: Grid2D, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(grid.to_json(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_rows(path: str, ncols: int):
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    if data.ndim == 1:
        data = data[None, :]
    if data.shape[1] != ncols:
        raise ValueError(f"{path}: expected {ncols} columns")
    return data


def _grid_from_columns(xs: np.ndarray, ys: np.ndarray) -> Grid2D:
    ux = np.unique(xs)
    uy = np.unique(ys)
    return make_grid(ux[0], ux[-1], uy[0], uy[-1], len(ux), len(uy))


def load_scalar_csv(path: str) -> ScalarField:
    data = _load_rows(path, 4)
    g = _grid_from_columns(data[:, 0], data[:, 1])
    vals = data[:, 2].reshape(g.ny, g.nx).T
    mask = data[:, 3].reshape(g.ny, g.nx).T.astype(bool)
    return field(g, vals, mask)


def load_complex_csv(path: str) -> ComplexField:
    data = _load_rows(path, 5)
    g = _grid_from_columns(data[:, 0], data[:, 1])
    re = data[:, 2].reshape(g.ny, g.nx).T
    im = data[:, 3].reshape(g.ny, g.nx).T
    mask = data[:, 4].reshape(g.ny, g.nx).T.astype(bool)
    return complex_field(g, re, im, mask)
