"""One-dimensional profile ODEs with quartic first integrals.

A profile p(t) obeys (p')^2 = q4*p^4 + q2*p^2 + q0.  We integrate the
second-order reduction p'' = 2*q4*p^3 + q2*p (regular at turning points where
p' = 0) with classical RK4 at one eighth of the grid spacing, then assemble
two-dimensional solutions of the separable ansatz forms:

    sinh w = tan(A(x) + B(y))        (tan family,  A' = a, B' = b)
    sin theta = tanh(C(x) + D(y))    (tanh family, C' = c, D' = d)
    theta = 2 arctan(F(x) G(y))      (product family)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid2D, ScalarField, field

BLOWUP_LIMIT = 1e6
ODE_REFINEMENT = 8  # RK4 substeps per axis cell

# tolerance for coefficient-constraint checks on externally supplied constants
_CONSTRAINT_TOL = 1e-9


@dataclass(frozen=True)
class QuarticProfile:
    """Profile defined by (p')^2 = q4*p^4 + q2*p^2 + q0 and data at t = 0."""

    q4: float
    q2: float
    q0: float
    p_init: float
    dp_init: float
    direction: str = "x"

    def __post_init__(self):
        if self.direction not in ("x", "y"):
            raise ValueError("direction must be 'x' or 'y'")
        lhs = self.dp_init**2
        rhs = self.quartic(self.p_init)
        scale = 1.0 + abs(lhs) + abs(rhs)
        if abs(lhs - rhs) > 1e-12 * scale:
            raise ValueError(
                f"inconsistent initial data: dp_init^2 = {lhs} but quartic(p_init) = {rhs}"
            )

    def quartic(self, p):
        return self.q4 * p**4 + self.q2 * p**2 + self.q0

    def acceleration(self, p):
        """Right-hand side of the second-order reduction p''."""
        return 2 * self.q4 * p**3 + self.q2 * p

    @staticmethod
    def from_json(d: dict) -> "QuarticProfile":
        return QuarticProfile(
            float(d["q4"]),
            float(d["q2"]),
            float(d["q0"]),
            float(d["p_init"]),
            float(d["dp_init"]),
            str(d.get("direction", "x")),
        )


@dataclass(frozen=True)
class SampledProfile:
    """Profile sampled on a uniform axis, with its trapezoidal antiderivative.

    P satisfies P(0) = P0 exactly when t = 0 is a sample; consecutive valid
    samples differ by the trapezoid rule applied to p on the axis.
    """

    t: np.ndarray
    p: np.ndarray
    dp: np.ndarray
    P: np.ndarray
    valid: np.ndarray

    def __post_init__(self):
        n = len(self.t)
        for a in (self.p, self.dp, self.P, self.valid):
            if len(a) != n:
                raise ValueError("sample arrays must share one length")

    def first_integral_drift(self, spec: QuarticProfile) -> float:
        """Max relative violation of (p')^2 = quartic(p) over valid samples."""
        p = self.p[self.valid]
        dp = self.dp[self.valid]
        num = np.abs(dp**2 - spec.quartic(p))
        den = 1.0 + abs(spec.q0) + abs(spec.q2) * p**2 + abs(spec.q4) * p**4
        return float(np.max(num / den)) if len(p) else 0.0


def _rk4_step(spec: QuarticProfile, p, dp, h):
    def f(state):
        return np.array([state[1], spec.acceleration(state[0])])

    s = np.array([p, dp])
    k1 = f(s)
    k2 = f(s + h / 2 * k1)
    k3 = f(s + h / 2 * k2)
    k4 = f(s + h * k3)
    return s + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def _march(spec: QuarticProfile, t_from, p, dp, t_to, nsub):
    """RK4 from t_from to t_to in nsub substeps.

    Returns (p, dp, integral of p over the leg by the substep trapezoid rule,
    blown_up flag).
    """
    h = (t_to - t_from) / nsub
    acc = 0.0
    for _ in range(nsub):
        p_old = p
        p, dp = _rk4_step(spec, p, dp, h)
        acc += (p_old + p) / 2 * h
        if not np.isfinite(p) or abs(p) > BLOWUP_LIMIT:
            return p, dp, acc, True
    return p, dp, acc, False


def integrate_profile(spec: QuarticProfile, axis: np.ndarray, P0: float = 0.0) -> SampledProfile:
    """Integrate the profile ODE onto a uniform sample axis.

    The march starts from the initial data at t = 0 regardless of where the
    axis sits, so profiles can be sampled on windows not containing the
    origin.  Samples beyond a blow-up (|p| > 1e6) are marked invalid.
    """
    t = np.asarray(axis, dtype=float)
    n = len(t)
    if n < 2:
        raise ValueError("axis needs at least two samples")
    h = t[1] - t[0]
    if not np.allclose(np.diff(t), h, rtol=0, atol=1e-9 * abs(h)):
        raise ValueError("axis must be uniform")

    p = np.zeros(n)
    dp = np.zeros(n)
    valid = np.zeros(n, dtype=bool)

    # anchor sample: the one nearest t = 0 (clipped into the axis range)
    k0 = int(np.clip(round(-t[0] / h), 0, n - 1))
    lead = abs(t[k0])  # distance from the ODE origin to the anchor sample
    nsub_lead = max(ODE_REFINEMENT, int(np.ceil(lead / h)) * ODE_REFINEMENT)
    p0, dp0, lead_area, blown = (
        _march(spec, 0.0, spec.p_init, spec.dp_init, t[k0], nsub_lead)
        if lead > 0
        else (spec.p_init, spec.dp_init, 0.0, False)
    )
    if blown:
        raise ValueError("profile blew up before reaching the sample axis")
    p[k0], dp[k0] = p0, dp0
    valid[k0] = True

    for step, stop in ((1, n), (-1, -1)):
        pc, dc = p0, dp0
        alive = True
        for k in range(k0 + step, stop, step):
            if alive:
                pc, dc, _, blown = _march(spec, t[k - step], pc, dc, t[k], ODE_REFINEMENT)
                alive = not blown
            if alive:
                p[k], dp[k] = pc, dc
                valid[k] = True

    # axis-level trapezoid antiderivative, anchored so that P(t=0) = P0
    seg = (p[1:] + p[:-1]) / 2 * h
    C = np.concatenate([[0.0], np.cumsum(seg)])
    P = P0 + lead_area + (C - C[k0])
    P[~valid] = 0.0
    p[~valid] = 0.0
    dp[~valid] = 0.0
    return SampledProfile(t, p, dp, P, valid)


def dump_profile_csv(sp: SampledProfile, path: str) -> None:
    with open(path, "w") as fh:
        fh.write("t,p,P,valid\n")
        for k in range(len(sp.t)):
            fh.write(f"{sp.t[k]:.17g},{sp.p[k]:.17g},{sp.P[k]:.17g},{int(sp.valid[k])}\n")


# ---------------------------------------------------------------------------
# coefficient-constraint constructors


def tan_family_profiles(c1, c2, c3, a_init=0.0, da_init=None, b_init=0.0, db_init=None):
    """Profile specs (a, b) for the tan family, enforcing 4*c1 = 16 + c3 - c2."""
    lhs, rhs = 4 * c1, 16 + c3 - c2
    if abs(lhs - rhs) > _CONSTRAINT_TOL * (1 + abs(lhs) + abs(rhs)):
        raise ValueError(f"coefficient constraint violated: 4*c1 = {lhs} != 16 + c3 - c2 = {rhs}")
    a_spec = QuarticProfile(-1.0, c1, c2, a_init, _slope(da_init, -1.0, c1, c2, a_init), "x")
    b_spec = QuarticProfile(-1.0, 8 - c1, c3, b_init, _slope(db_init, -1.0, 8 - c1, c3, b_init), "y")
    return a_spec, b_spec


def tanh_family_profiles(c4, c5, c6, c_init=0.0, dc_init=None, d_init=0.0, dd_init=None):
    """Profile specs (c, d) for the tanh family, enforcing 16 + 4*c4 = c6 - c5."""
    lhs, rhs = 16 + 4 * c4, c6 - c5
    if abs(lhs - rhs) > _CONSTRAINT_TOL * (1 + abs(lhs) + abs(rhs)):
        raise ValueError(f"coefficient constraint violated: 16 + 4*c4 = {lhs} != c6 - c5 = {rhs}")
    c_spec = QuarticProfile(1.0, c4, c5, c_init, _slope(dc_init, 1.0, c4, c5, c_init), "x")
    d_spec = QuarticProfile(1.0, -(8 + c4), c6, d_init, _slope(dd_init, 1.0, -(8 + c4), c6, d_init), "y")
    return c_spec, d_spec


def _slope(given, q4, q2, q0, p0):
    if given is not None:
        return float(given)
    val = q4 * p0**4 + q2 * p0**2 + q0
    if val < -1e-12:
        raise ValueError("quartic negative at p_init; no real slope exists")
    return float(np.sqrt(max(val, 0.0)))


# ---------------------------------------------------------------------------
# 2-D assembly


def _check_axes(sp_x: SampledProfile, sp_y: SampledProfile, grid: Grid2D):
    if not np.allclose(sp_x.t, grid.x(), rtol=0, atol=1e-9 * max(1.0, grid.hx)):
        raise ValueError("x-profile samples do not match the grid x-axis")
    if not np.allclose(sp_y.t, grid.y(), rtol=0, atol=1e-9 * max(1.0, grid.hy)):
        raise ValueError("y-profile samples do not match the grid y-axis")


def assemble_tan_family(Ax: SampledProfile, By: SampledProfile, grid: Grid2D) -> ScalarField:
    """w = arcsinh(tan(A(x) + B(y))); masked where cos(A+B) nearly vanishes."""
    _check_axes(Ax, By, grid)
    s = Ax.P[:, None] + By.P[None, :]
    ok = (np.abs(np.cos(s)) >= 1e-8) & Ax.valid[:, None] & By.valid[None, :]
    with np.errstate(over="ignore", invalid="ignore"):
        w = np.arcsinh(np.tan(s))
    return field(grid, np.where(ok, w, 0.0), ok)


def assemble_tanh_family(Cx: SampledProfile, Dy: SampledProfile, grid: Grid2D) -> ScalarField:
    """theta = arcsin(tanh(C(x) + D(y))), principal branch in (-pi/2, pi/2)."""
    _check_axes(Cx, Dy, grid)
    s = Cx.P[:, None] + Dy.P[None, :]
    ok = Cx.valid[:, None] & Dy.valid[None, :]
    theta = np.arcsin(np.tanh(s))
    return field(grid, theta, ok)


def assemble_product_family(Fx: SampledProfile, Gy: SampledProfile, grid: Grid2D) -> ScalarField:
    """theta = 2 arctan(F(x) G(y))."""
    _check_axes(Fx, Gy, grid)
    theta = 2 * np.arctan(Fx.p[:, None] * Gy.p[None, :])
    ok = Fx.valid[:, None] & Gy.valid[None, :]
    return field(grid, theta, ok)
