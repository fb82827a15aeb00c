"""Transformation between sinh-Gordon and sine-Gordon solutions.

The first-order system coupling a sinh-Gordon solution w and a sine-Gordon
solution theta is

    w_x - theta_y = -2 sinh(w) sin(theta)        (r1)
    w_y + theta_x = -2 cosh(w) cos(theta)        (r2)

Given one side, the other is constructed by quadrature: seed the transverse
axis line first, then sweep all parallel lines, enforcing one equation with
RK4 and reporting the other as a residual.  Two closed-form shortcuts for w
printed for special theta families are also provided; they are evaluated
verbatim and *checked against* the quadrature construction, never trusted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .grid import (
    Grid2D,
    ScalarField,
    SINGULARITY_EPS,
    cumulative_integral_x,
    cumulative_integral_y,
    field,
    partial_x,
    partial_y,
)
from .profiles import SampledProfile

MARCH_SUBSTEPS = 8
W_CAP = 30.0  # |w| beyond this overflows cosh/sinh scales; treat as blow-up
_FD_STEP = 1e-5  # small-step derivative for analytic callables


@dataclass(frozen=True)
class BacklundPair:
    w: ScalarField
    theta: ScalarField
    provenance: str  # which side was given, which constructed

    def __post_init__(self):
        if self.w.grid != self.theta.grid:
            raise ValueError("pair fields must share one grid")

    @property
    def grid(self) -> Grid2D:
        return self.w.grid


def backlund_residuals(pair: BacklundPair):
    """(r1, r2) central-difference residuals of the coupled system."""
    w, th = pair.w, pair.theta
    wx, wy = partial_x(w), partial_y(w)
    tx, ty = partial_x(th), partial_y(th)
    m1 = wx.mask & ty.mask & th.mask
    m2 = wy.mask & tx.mask & th.mask
    r1 = wx.values - ty.values + 2 * np.sinh(w.values) * np.sin(th.values)
    r2 = wy.values + tx.values + 2 * np.cosh(w.values) * np.cos(th.values)
    return field(pair.grid, r1, m1), field(pair.grid, r2, m2)


class _FieldData:
    """Value/derivative provider for a field during a march.

    Wraps either an analytic callable (values at arbitrary points,
    derivatives by small-step central differences) or a sampled field
    (cubic splines along the march axis; cross derivatives by axis
    gradients first).
    """

    def __init__(self, f: ScalarField, analytic=None):
        self.grid = f.grid
        if analytic is not None:
            d = _FD_STEP
            self.value = lambda x, y: analytic(x, y)
            self.dx = lambda x, y: (analytic(x + d, y) - analytic(x - d, y)) / (2 * d)
            self.dy = lambda x, y: (analytic(x, y + d) - analytic(x, y - d)) / (2 * d)
        else:
            g = f.grid
            v = f.values
            gx = np.gradient(v, g.hx, axis=0)
            gy = np.gradient(v, g.hy, axis=1)
            sy = CubicSpline(g.y(), v, axis=1)
            sy_dx = CubicSpline(g.y(), gx, axis=1)
            sx = CubicSpline(g.x(), v, axis=0)
            sx_dy = CubicSpline(g.x(), gy, axis=0)
            # column evaluators: y scalar -> vector over the grid x-axis
            self._col = sy
            self._col_dx = sy_dx
            # row evaluators: x scalar -> vector over the grid y-axis
            self._row = sx
            self._row_dy = sx_dy
            self.value = None

    # sampled-path accessors used by the marches below
    def on_row(self, x):
        return self._row(x)

    def on_row_dy(self, x):
        return self._row_dy(x)

    def on_col(self, y):
        return self._col(y)

    def on_col_dx(self, y):
        return self._col_dx(y)


def _rk4_vec(f, t0, u0, t1, nsub):
    """Vector RK4 for du/dt = f(t, u) from t0 to t1."""
    h = (t1 - t0) / nsub
    t, u = t0, u0
    for _ in range(nsub):
        k1 = f(t, u)
        k2 = f(t + h / 2, u + h / 2 * k1)
        k3 = f(t + h / 2, u + h / 2 * k2)
        k4 = f(t + h, u + h * k3)
        u = u + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = t + h
    return u


def _sweep(axis, k0, u0, step_fn):
    """March a state vector outward from index k0 along `axis`.

    step_fn(t_from, u, t_to) -> new state.  Entries that leave [-W_CAP, W_CAP]
    or go non-finite are frozen and flagged invalid from there on.
    """
    n = len(axis)
    m = np.shape(u0)
    out = np.zeros((n,) + m)
    valid = np.zeros((n,) + m, dtype=bool)
    out[k0] = u0
    valid[k0] = np.isfinite(u0) & (np.abs(u0) <= W_CAP)
    for direction in (1, -1):
        u = np.array(u0, dtype=float)
        alive = valid[k0].copy()
        for k in range(k0 + direction, n if direction == 1 else -1, direction):
            with np.errstate(over="ignore", invalid="ignore"):
                u = step_fn(axis[k - direction], u, axis[k])
            bad = ~np.isfinite(u) | (np.abs(u) > W_CAP)
            alive = alive & ~bad
            u = np.where(alive, u, 0.0)
            out[k] = u
            valid[k] = alive
    return out, valid


def theta_to_w(theta: ScalarField, w00: float, analytic=None) -> ScalarField:
    """Construct w from theta by quadrature, with w(0,0) = w00.

    Seeds w along y = 0 by w_x = theta_y - 2 sinh(w) sin(theta), then marches
    every column by w_y = -theta_x - 2 cosh(w) cos(theta).  `analytic`, when
    given, is a vectorized (x, y) -> theta callable used for in-cell values
    and derivatives; otherwise cubic splines over the sampled field are used.
    """
    g = theta.grid
    i0, j0 = g.index_of_x(0.0), g.index_of_y(0.0)
    data = _FieldData(theta, analytic)
    x, y = g.x(), g.y()

    if analytic is not None:
        def row_rhs(t, w):
            return data.dy(t, 0.0) - 2 * np.sinh(w) * np.sin(data.value(t, 0.0))

        def col_rhs(t, w):
            return -data.dx(x, t) - 2 * np.cosh(w) * np.cos(data.value(x, t))
    else:
        def row_rhs(t, w):
            return data.on_row_dy(t)[j0] - 2 * np.sinh(w) * np.sin(data.on_row(t)[j0])

        def col_rhs(t, w):
            return -data.on_col_dx(t) - 2 * np.cosh(w) * np.cos(data.on_col(t))

    def row_step(t_from, u, t_to):
        return _rk4_vec(row_rhs, t_from, u, t_to, MARCH_SUBSTEPS)

    def col_step(t_from, u, t_to):
        return _rk4_vec(col_rhs, t_from, u, t_to, MARCH_SUBSTEPS)

    seed, seed_ok = _sweep(x, i0, np.float64(w00), row_step)
    vals, ok = _sweep(y, j0, seed, col_step)
    # _sweep ran over y with state vectors over x: transpose to (nx, ny)
    vals, ok = vals.T, ok.T
    ok = ok & seed_ok[:, None] & theta.mask
    return field(g, np.where(ok, vals, 0.0), ok)


def w_to_theta(w: ScalarField, theta00: float, analytic=None) -> ScalarField:
    """Construct theta from w by quadrature, with theta(0,0) = theta00.

    Seeds theta along x = 0 by theta_y = w_x + 2 sinh(w) sin(theta), then
    marches every row by theta_x = -w_y - 2 cosh(w) cos(theta).
    """
    g = w.grid
    i0, j0 = g.index_of_x(0.0), g.index_of_y(0.0)
    data = _FieldData(w, analytic)
    x, y = g.x(), g.y()

    if analytic is not None:
        def col_rhs(t, th):
            return data.dx(0.0, t) + 2 * np.sinh(data.value(0.0, t)) * np.sin(th)

        def row_rhs(t, th):
            return -data.dy(t, y) - 2 * np.cosh(data.value(t, y)) * np.cos(th)
    else:
        def col_rhs(t, th):
            return data.on_col_dx(t)[i0] + 2 * np.sinh(data.on_col(t)[i0]) * np.sin(th)

        def row_rhs(t, th):
            return -data.on_row_dy(t) - 2 * np.cosh(data.on_row(t)) * np.cos(th)

    def col_step(t_from, u, t_to):
        return _rk4_vec(col_rhs, t_from, u, t_to, MARCH_SUBSTEPS)

    def row_step(t_from, u, t_to):
        return _rk4_vec(row_rhs, t_from, u, t_to, MARCH_SUBSTEPS)

    seed, seed_ok = _sweep(y, j0, np.float64(theta00), col_step)
    vals, ok = _sweep(x, i0, seed, row_step)
    ok = ok & seed_ok[None, :] & w.mask
    return field(g, np.where(ok, vals, 0.0), ok)


# ---------------------------------------------------------------------------
# printed closed forms (evaluated verbatim; the quadrature march is the oracle)


def closed_form_w_product(theta: ScalarField, K: np.ndarray, Fx: SampledProfile | None = None) -> ScalarField:
    """Printed w for product-form theta = 2 arctan(F(x) G(y)).

    K is the sampled logarithmic derivative H'/H of H = 1/G along the grid
    y-axis (non-finite entries are masked).  With Y(y) the y-quadrature of
    cos(theta) along x = 0 and X(x,y) the x-quadrature of sin(theta),

        tanh(w/2) = (2 - K tan Y + M tanh(M X / 2)) / (M + (2 - K tan Y) tanh(M X / 2)),

    M = sqrt(K^2 + 4).  The derivation holds K fixed during the x-quadrature
    even though K depends on y, so agreement with the march degrades away
    from y = 0; compare before use.
    """
    g = theta.grid
    K = np.asarray(K, dtype=float)
    if K.shape != (g.ny,):
        raise ValueError("K must be sampled on the grid y-axis")
    if Fx is not None:
        k = int(np.argmin(np.abs(Fx.t)))
        if abs(Fx.t[k]) > 1e-9 or abs(Fx.dp[k]) > 1e-8:
            raise ValueError("closed form requires F'(0) = 0")
    i0 = g.index_of_x(0.0)
    cos_th = field(g, np.cos(theta.values), theta.mask)
    sin_th = field(g, np.sin(theta.values), theta.mask)
    Yf = cumulative_integral_y(cos_th, 0.0)
    Y = Yf.values[i0, :]  # Y depends on y only (evaluated along x = 0)
    Xf = cumulative_integral_x(sin_th, 0.0)

    Kk = np.where(np.isfinite(K), K, 0.0)
    M = np.sqrt(Kk**2 + 4)
    A = 2 - Kk * np.tan(Y)  # (ny,)
    T = np.tanh(M[None, :] / 2 * Xf.values)
    num = A[None, :] + M[None, :] * T
    den = M[None, :] + A[None, :] * T
    ok = (
        np.isfinite(K)[None, :]
        & Yf.mask[i0, :][None, :]
        & Xf.mask
        & (np.abs(den) >= SINGULARITY_EPS)
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        t = num / den
    ok = ok & (1 - np.abs(t) >= SINGULARITY_EPS)
    t = np.where(ok, t, 0.0)
    return field(g, np.log1p(t) - np.log1p(-t), ok)


def closed_form_w_tanh(theta: ScalarField, c: np.ndarray, w00: float) -> ScalarField:
    """Printed w for tanh-form theta with sin(theta) = tanh(C(x) + D(y)), d(0) = 0.

    With X(x) the x-quadrature of sin(theta) along y = 0, Y(x,y) the
    y-quadrature of cos(theta), q = sqrt(|4 - c^2|)/2 and L = 2q/(c - 2):

        tanh(w/2) = L (T0 e^{-2X} + L tan(q Y)) / (L - T0 e^{-2X} tan(q Y)),

    T0 = tanh(w00/2).  Masked where c is within the singularity threshold of
    +/-2 (L degenerates).
    """
    g = theta.grid
    c = np.asarray(c, dtype=float)
    if c.shape != (g.nx,):
        raise ValueError("c must be sampled on the grid x-axis")
    j0 = g.index_of_y(0.0)
    sin_th = field(g, np.sin(theta.values), theta.mask)
    cos_th = field(g, np.cos(theta.values), theta.mask)
    Xf = cumulative_integral_x(sin_th, 0.0)
    X = Xf.values[:, j0]
    Yf = cumulative_integral_y(cos_th, 0.0)

    disc = np.abs(4 - c**2)
    ok_x = (disc >= SINGULARITY_EPS) & (np.abs(c - 2) >= SINGULARITY_EPS) & Xf.mask[:, j0]
    q = np.sqrt(disc) / 2
    with np.errstate(divide="ignore", invalid="ignore"):
        L = np.sqrt(disc) / (c - 2)
    E = np.tanh(w00 / 2) * np.exp(-2 * X)  # (nx,)
    tq = np.tan(q[:, None] * Yf.values)
    num = L[:, None] * (E[:, None] + L[:, None] * tq)
    den = L[:, None] - E[:, None] * tq
    ok = ok_x[:, None] & Yf.mask & (np.abs(den) >= SINGULARITY_EPS)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = num / den
    ok = ok & (1 - np.abs(t) >= SINGULARITY_EPS)
    t = np.where(ok, t, 0.0)
    return field(g, np.log1p(t) - np.log1p(-t), ok)
