"""Catalog of closed-form solutions, harmonic maps, and target metrics.

Each catalog entry records the defining formula, a recommended rectangle on
which the formula is smooth and the finite-difference checks meet their
tolerances, and (for sine-Gordon solutions) the probed sign convention
sigma, meaning the field satisfies laplacian(theta) = sigma * 2 sin(2 theta).

Residual verifiers for both PDEs live here as well.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .grid import (
    Grid2D,
    ScalarField,
    ComplexField,
    SINGULARITY_EPS,
    complex_field,
    field,
    laplacian,
)

SQRT2 = np.sqrt(2.0)


def _arctanh2(t):
    """2*arctanh(t) in log form; caller masks |t| >= 1."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log1p(t) - np.log1p(-t)


@dataclass(frozen=True)
class SolutionFamily:
    id: str
    kind: str  # sinh_solution | sine_solution | harmonic_map | target_metric
    formula: str
    rectangle: tuple  # (x0, x1, y0, y1) recommended evaluation window
    sign: int = 0  # sigma for sine families; 0 = undetermined
    params: dict = dc_field(default_factory=dict)
    curvature_rect: tuple | None = None  # sub-window for pullback curvature
    partner: str | None = None  # sinh-side family for the correspondence check
    partner_params: dict = dc_field(default_factory=dict)
    convention: str | None = None  # recorded correspondence ratio, exp(±2w)


@dataclass(frozen=True)
class MetricSample:
    """Diagonal-dominant first fundamental form E dx^2 + 2 Fc dx dy + G dy^2."""

    grid: Grid2D
    E: np.ndarray
    Fc: np.ndarray
    G: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        shape = (self.grid.nx, self.grid.ny)
        for a in (self.E, self.Fc, self.G, self.mask):
            if a.shape != shape:
                raise ValueError(f"metric arrays must have shape {shape}")


def make_metric(grid: Grid2D, E, Fc, G, mask=None) -> MetricSample:
    """Build a MetricSample, masking non-finite or non-positive-definite points."""
    E = np.asarray(E, dtype=float)
    Fc = np.asarray(Fc, dtype=float)
    G = np.asarray(G, dtype=float)
    ok = (
        np.isfinite(E)
        & np.isfinite(Fc)
        & np.isfinite(G)
        & (E > 0)
        & (G > 0)
        & (E * G - Fc**2 > 0)
    )
    if mask is not None:
        ok = ok & mask
    z = lambda a: np.where(ok, a, 0.0)
    return MetricSample(grid, z(E), z(Fc), z(G), ok)


CATALOG: dict[str, SolutionFamily] = {}


def _register(fam: SolutionFamily):
    CATALOG[fam.id] = fam


_register(SolutionFamily(
    id="W_TAN_SPECIAL",
    kind="sinh_solution",
    formula="sinh(w) = (sinh2x + sinh2y)/(1 - sinh2x*sinh2y)",
    rectangle=(-0.3, 0.3, -0.3, 0.3),
))
_register(SolutionFamily(
    id="W_ONE_SOLITON",
    kind="sinh_solution",
    formula="w = 2*artanh(exp(2*s*x)); valid where s*x < 0",
    rectangle=(-1.2, -0.3, -0.5, 0.5),
    params={"exponent_sign": 1.0},
))
_register(SolutionFamily(
    id="THETA_CONST_HALFPI",
    kind="sine_solution",
    formula="theta = pi/2 (constant)",
    rectangle=(-0.5, 0.5, -0.5, 0.5),
    sign=0,  # sin(2*theta) vanishes, so both signs fit
))
_register(SolutionFamily(
    id="THETA_EX2",
    kind="sine_solution",
    formula="tan(theta/2) = 2y*sec(2x)",
    rectangle=(-0.15, 0.15, -0.15, 0.15),
    sign=-1,
))
_register(SolutionFamily(
    id="W_EX2",
    kind="sinh_solution",
    formula="tanh(w/2) = (cosy*(sin2x - 2y) + siny)/(cosy + (2y + sin2x)*siny)",
    rectangle=(-0.15, 0.15, -0.15, 0.15),
))
_register(SolutionFamily(
    id="THETA_SQRT2",
    kind="sine_solution",
    formula="tan(theta/2) = (cosh(r*x) - cosh(r*y))/(cosh(r*x) + cosh(r*y)), r = sqrt(2)",
    rectangle=(0.2, 1.0, -0.35, 0.35),
    sign=-1,
))
_register(SolutionFamily(
    id="W_SQRT2",
    kind="sinh_solution",
    formula="tanh(w/2) = r*sinh(r*y)/(r*sinh(r*x) - 2*cosh(r*x)), r = sqrt(2)",
    rectangle=(0.2, 1.0, -0.35, 0.35),
))
_register(SolutionFamily(
    id="U_EX_SECTION3",
    kind="harmonic_map",
    formula="R = sech2y - sinh2x*tanh2y; S = sinh2x*sech2y + tanh2y - 2y",
    rectangle=(0.1, 0.5, -0.2, 0.2),
    curvature_rect=(0.3, 0.5, -0.15, 0.15),
    partner="W_TAN_SPECIAL",
    convention="exp(-2w)",
))
_register(SolutionFamily(
    id="U_EX1",
    kind="harmonic_map",
    formula="R = y; S = eps*sinh(2x)/2 with eps = +1 on x > 0",
    rectangle=(0.3, 1.0, -0.5, 0.5),
    curvature_rect=(0.3, 1.0, -0.5, 0.5),
    partner="W_ONE_SOLITON",
    partner_params={"exponent_sign": -1.0},
    convention="exp(+2w)",
))
_register(SolutionFamily(
    id="U_EX2",
    kind="harmonic_map",
    formula="R = (cos2y*cos^2(2x) + 4y*(sin2x + sin2y - y*cos2y))/(4y^2 + cos^2(2x)); "
    "S = 2x + (4y*cos2x*cos2y - 2*cos2x*(sin2x + sin2y))/(4y^2 + cos^2(2x))",
    rectangle=(-0.15, -0.05, -0.1, 0.1),
    curvature_rect=(-0.15, -0.07, 0.02, 0.09),
    partner="W_EX2",
    convention="exp(-2w)",
))
_register(SolutionFamily(
    id="U_SQRT2",
    kind="harmonic_map",
    formula="S = exp(2x)*(2 + 3*cosh(2rx) - cosh(2ry) - 2r*sinh(2rx))/(2 + cosh(2rx) + cosh(2ry)); "
    "R = 4*exp(2x)*cosh(ry)*(2*cosh(rx) - r*sinh(rx))/(2 + cosh(2rx) + cosh(2ry)) - 2, r = sqrt(2)",
    rectangle=(0.2, 1.0, -0.35, 0.35),
    curvature_rect=(0.2, 0.9, 0.05, 0.3),
    partner="W_SQRT2",
    convention="exp(-2w)",
))
_register(SolutionFamily(
    id="METRIC_SECTION3",
    kind="target_metric",
    formula="E = 4*cosh^2(2x)*cosh^2(2y)/(1 - sinh2x*sinh2y)^2; "
    "G = 4*(sinh2x + sinh2y)^2/(1 - sinh2x*sinh2y)^2; Fc = 0",
    rectangle=(0.05, 0.3, 0.05, 0.3),
))
_register(SolutionFamily(
    id="METRIC_EX2",
    kind="target_metric",
    formula="diagonal metric 4*(3 + 8y^2 - cos4x + 4*sin2x*(sin2y - 2y*cos2y))^2/D^2 dx^2 "
    "+ 4*(8y*cos2y - 4*sin2x + sin2y*(8y^2 + cos4x - 3))^2/D^2 dy^2, "
    "D = cos2y*(1 - 8y^2 + cos4x) + 8y*(sin2x + sin2y)",
    rectangle=(0.2, 0.4, 0.05, 0.25),
))

FAMILY_IDS = tuple(CATALOG.keys())


def get_family(fid: str) -> SolutionFamily:
    try:
        return CATALOG[fid]
    except KeyError:
        raise KeyError(f"unknown family id: {fid}") from None


def default_grid(fid: str, h: float = 1 / 400, rect: tuple | None = None) -> Grid2D:
    """Grid over a family's recommended rectangle at spacing ~h."""
    x0, x1, y0, y1 = rect if rect is not None else get_family(fid).rectangle
    nx = int(round((x1 - x0) / h)) + 1
    ny = int(round((y1 - y0) / h)) + 1
    return Grid2D(x0, x1, y0, y1, max(nx, 5), max(ny, 5))


# ---------------------------------------------------------------------------
# closed-form evaluation (plain ndarray versions are reused by the march code,
# which needs off-grid samples for its analytic derivatives)


def w_tan_special(x, y):
    num = np.sinh(2 * x) + np.sinh(2 * y)
    den = 1 - np.sinh(2 * x) * np.sinh(2 * y)
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.arcsinh(num / den)
    return w, np.abs(den) >= SINGULARITY_EPS


def w_one_soliton(x, y, s=1.0):
    q = np.exp(2 * s * x)
    ok = 1 - q >= SINGULARITY_EPS
    return _arctanh2(np.where(ok, q, 0.0)), ok


def theta_ex2(x, y):
    c = np.cos(2 * x)
    ok = np.abs(c) >= SINGULARITY_EPS
    with np.errstate(divide="ignore", invalid="ignore"):
        th = 2 * np.arctan(2 * y / c)
    return th, ok


def w_ex2(x, y):
    num = np.cos(y) * (np.sin(2 * x) - 2 * y) + np.sin(y)
    den = np.cos(y) + (2 * y + np.sin(2 * x)) * np.sin(y)
    ok = np.abs(den) >= SINGULARITY_EPS
    with np.errstate(divide="ignore", invalid="ignore"):
        t = num / den
    ok = ok & (1 - np.abs(t) >= SINGULARITY_EPS)
    return _arctanh2(np.where(ok, t, 0.0)), ok


def theta_sqrt2(x, y):
    cx = np.cosh(SQRT2 * x)
    cy = np.cosh(SQRT2 * y)
    return 2 * np.arctan((cx - cy) / (cx + cy)), np.ones(np.shape(cx - cy), dtype=bool)


def w_sqrt2(x, y):
    den = SQRT2 * np.sinh(SQRT2 * x) - 2 * np.cosh(SQRT2 * x)
    ok = np.abs(den) >= SINGULARITY_EPS
    with np.errstate(divide="ignore", invalid="ignore"):
        t = SQRT2 * np.sinh(SQRT2 * y) / den
    ok = ok & (1 - np.abs(t) >= SINGULARITY_EPS)
    return _arctanh2(np.where(ok, t, 0.0)), ok


def u_ex_section3(x, y):
    R = 1 / np.cosh(2 * y) - np.sinh(2 * x) * np.tanh(2 * y)
    S = np.sinh(2 * x) / np.cosh(2 * y) + np.tanh(2 * y) - 2 * y
    return R, S, S >= SINGULARITY_EPS


def u_ex1(x, y, eps=1.0):
    R = y * np.ones_like(x)
    S = eps * np.sinh(2 * x) / 2
    return R, S, S >= SINGULARITY_EPS


def u_ex2(x, y):
    den = 4 * y**2 + np.cos(2 * x) ** 2
    ok = np.abs(den) >= SINGULARITY_EPS
    with np.errstate(divide="ignore", invalid="ignore"):
        R = (np.cos(2 * y) * np.cos(2 * x) ** 2 + 4 * y * (np.sin(2 * x) + np.sin(2 * y) - y * np.cos(2 * y))) / den
        S = 2 * x + (4 * y * np.cos(2 * x) * np.cos(2 * y) - 2 * np.cos(2 * x) * (np.sin(2 * x) + np.sin(2 * y))) / den
    ok = ok & (S >= SINGULARITY_EPS)
    return R, S, ok


def u_sqrt2(x, y):
    r = SQRT2
    den = 2 + np.cosh(2 * r * x) + np.cosh(2 * r * y)
    e2x = np.exp(2 * x)
    S = e2x * (2 + 3 * np.cosh(2 * r * x) - np.cosh(2 * r * y) - 2 * r * np.sinh(2 * r * x)) / den
    R = 4 * e2x * np.cosh(r * y) * (2 * np.cosh(r * x) - r * np.sinh(r * x)) / den - 2
    return R, S, S >= SINGULARITY_EPS


def metric_section3(x, y):
    den = (1 - np.sinh(2 * x) * np.sinh(2 * y)) ** 2
    ok = den >= SINGULARITY_EPS**2
    with np.errstate(divide="ignore", invalid="ignore"):
        E = 4 * np.cosh(2 * x) ** 2 * np.cosh(2 * y) ** 2 / den
        G = 4 * (np.sinh(2 * x) + np.sinh(2 * y)) ** 2 / den
    return E, np.zeros_like(E), G, ok


def metric_ex2(x, y):
    D = np.cos(2 * y) * (1 - 8 * y**2 + np.cos(4 * x)) + 8 * y * (np.sin(2 * x) + np.sin(2 * y))
    ok = np.abs(D) >= SINGULARITY_EPS
    nE = 3 + 8 * y**2 - np.cos(4 * x) + 4 * np.sin(2 * x) * (np.sin(2 * y) - 2 * y * np.cos(2 * y))
    nG = 8 * y * np.cos(2 * y) - 4 * np.sin(2 * x) + np.sin(2 * y) * (8 * y**2 + np.cos(4 * x) - 3)
    with np.errstate(divide="ignore", invalid="ignore"):
        E = 4 * nE**2 / D**2
        G = 4 * nG**2 / D**2
    return E, np.zeros_like(E), G, ok


def scalar_callable(fid: str, params: dict | None = None):
    """Vectorized (x, y) -> value function for a scalar family, or None.

    Used by the transform marches, which need values at off-grid substeps.
    Invalid points come back as nan.
    """
    params = params or {}
    table = {
        "W_TAN_SPECIAL": w_tan_special,
        "W_ONE_SOLITON": lambda x, y: w_one_soliton(x, y, params.get("exponent_sign", 1.0)),
        "THETA_CONST_HALFPI": lambda x, y: (np.full(np.shape(x * y), np.pi / 2), np.ones(np.shape(x * y), bool)),
        "THETA_EX2": theta_ex2,
        "W_EX2": w_ex2,
        "THETA_SQRT2": theta_sqrt2,
        "W_SQRT2": w_sqrt2,
    }
    fn = table.get(fid)
    if fn is None:
        return None

    def call(x, y):
        v, ok = fn(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        return np.where(ok, v, np.nan)

    return call


def eval_family(fid: str, grid: Grid2D, params: dict | None = None):
    """Evaluate a catalog family on a grid.

    Returns ScalarField (solutions), ComplexField (harmonic maps), or
    MetricSample (target metrics).
    """
    fam = get_family(fid)
    params = {**fam.params, **(params or {})}
    X, Y = grid.mesh()
    if fam.kind in ("sinh_solution", "sine_solution"):
        v = scalar_callable(fid, params)(X, Y)
        return field(grid, np.nan_to_num(v, nan=0.0), np.isfinite(v))
    if fam.kind == "harmonic_map":
        fn = {"U_EX_SECTION3": u_ex_section3, "U_EX2": u_ex2, "U_SQRT2": u_sqrt2}.get(fid)
        if fn is None:
            R, S, ok = u_ex1(X, Y, params.get("eps", 1.0))
        else:
            R, S, ok = fn(X, Y)
        return complex_field(grid, R, S, ok)
    fn = {"METRIC_SECTION3": metric_section3, "METRIC_EX2": metric_ex2}[fid]
    E, Fc, G, ok = fn(X, Y)
    return make_metric(grid, E, Fc, G, ok)


def hopf_weight(fid: str, grid: Grid2D) -> ScalarField | None:
    """Conformal weight e^F of a harmonic map's target metric, on the source grid.

    None means the plain Poincare half-plane weight 1/S^2 applies (the weight
    then comes from the map itself).  Maps whose printed target metric is not
    in half-plane coordinates carry an explicit weight field here; it is read
    off the printed metric as e^F = E_metric / (R_x^2 + S_x^2).
    """
    X, Y = grid.mesh()
    if fid == "U_EX_SECTION3":
        den = (1 - np.sinh(2 * X) * np.sinh(2 * Y)) ** 2
        ok = den >= SINGULARITY_EPS**2
        with np.errstate(divide="ignore", invalid="ignore"):
            wgt = np.cosh(2 * Y) ** 2 / den
        return field(grid, np.where(ok, wgt, 0.0), ok)
    if fid == "U_EX2":
        E, _, _, okm = metric_ex2(X, Y)
        d = 1e-5
        Rp, Sp, okp = u_ex2(X + d, Y)
        Rm, Sm, okmn = u_ex2(X - d, Y)
        rx = (Rp - Rm) / (2 * d)
        sx = (Sp - Sm) / (2 * d)
        g = rx**2 + sx**2
        ok = okm & okp & okmn & (g >= SINGULARITY_EPS)
        with np.errstate(divide="ignore", invalid="ignore"):
            wgt = E / g
        return field(grid, np.where(ok, wgt, 0.0), ok)
    return None


# ---------------------------------------------------------------------------
# PDE residuals


def residual_sinh_gordon(w: ScalarField) -> ScalarField:
    lap = laplacian(w)
    r = lap.values - 2 * np.sinh(2 * w.values)
    return field(w.grid, r, lap.mask)


def residual_sine_gordon(theta: ScalarField, sigma: int) -> ScalarField:
    if sigma not in (1, -1):
        raise ValueError("sigma must be +1 or -1")
    lap = laplacian(theta)
    r = lap.values - sigma * 2 * np.sin(2 * theta.values)
    return field(theta.grid, r, lap.mask)


def sign_probe(theta: ScalarField) -> int:
    """Return the sigma in {+1, -1} minimizing the residual, or 0 if ambiguous.

    Ambiguous means neither sup-norm is below a tenth of the other (as for
    constant theta = pi/2 where both residuals vanish).
    """
    sup_p, n_p = residual_sine_gordon(theta, +1).sup_norm()
    sup_m, n_m = residual_sine_gordon(theta, -1).sup_norm()
    if min(n_p, n_m) < 100:
        raise ValueError("too few valid interior points for a sign probe")
    if sup_p < 0.1 * sup_m:
        return 1
    if sup_m < 0.1 * sup_p:
        return -1
    return 0
