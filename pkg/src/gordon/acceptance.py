"""One-shot acceptance suite: every release gate as a named check.

The suite is organized into nine criteria (check names are prefixed c1..c9):

  1. sinh-Gordon residuals of the four closed-form w families, with h-halving
  2. sine-Gordon residuals with probed sign conventions
  3. profile ODE oracle against closed forms + first-integral drift
  4. transformation pairs: system residuals, quadrature reconstruction,
     round trip
  5. Hopf condition and w-correspondence for the four harmonic maps
  6. quadrature construction of the sqrt(2)-example map, including the
     printed-closed-form factor-2 discrepancy report
  7. Gaussian curvature -1 of target metrics, a Poincare control, and
     pullback metrics
  8. coefficient-constraint rejection and the first-integral coefficient
     resolution
  9. wall-clock budget for the whole suite

All grids, summation orders, and probe choices are fixed, so the emitted
report is bit-identical across runs with the same configuration.
"""

from __future__ import annotations

import os
import time

import numpy as np

from . import families, profiles
from .backlund import BacklundPair, backlund_residuals, theta_to_w, w_to_theta
from .families import (
    eval_family,
    get_family,
    hopf_weight,
    residual_sine_gordon,
    residual_sinh_gordon,
    sign_probe,
)
from .grid import Grid2D, field
from .harmonic import (
    correspondence_check,
    gaussian_curvature,
    hopf_residual,
    ppfd_construct,
    pullback_metric,
)
from .profiles import (
    QuarticProfile,
    assemble_tanh_family,
    integrate_profile,
    tan_family_profiles,
    tanh_family_profiles,
)
from .report import CheckResult, VerificationReport

DEFAULT_H = 1.0 / 400
RATIO_BAND = (3.5, 4.5)  # acceptable residual drop under h-halving
MARCH_RECT_SQRT2 = (0.0, 0.6, -0.35, 0.35)  # contains both axis lines
ROUNDTRIP_RECT = (-0.25, 0.25, -0.25, 0.25)
POINCARE_RECT = (0.0, 1.0, 8.0, 12.0)  # far from y = 0 so 1/y^2 is mild
SQRT2 = np.sqrt(2.0)


def base_tolerance() -> float:
    env = os.environ.get("GORDON_TOL")
    return float(env) if env else 1e-3


def _grid(rect, h) -> Grid2D:
    x0, x1, y0, y1 = rect
    nx = int(round((x1 - x0) / h)) + 1
    ny = int(round((y1 - y0) / h)) + 1
    return Grid2D(x0, x1, y0, y1, max(nx, 5), max(ny, 5))


def _ratio_ok(ratio):
    return RATIO_BAND[0] <= ratio <= RATIO_BAND[1]


def _pde_residual(fid, h):
    fam = get_family(fid)
    g = _grid(fam.rectangle, h)
    f = eval_family(fid, g)
    if fam.kind == "sinh_solution":
        return residual_sinh_gordon(f)
    return residual_sine_gordon(f, fam.sign)


def _residual_check(name, fid, h, tol, convergence):
    fam = get_family(fid)
    sup, n = _pde_residual(fid, h).sup_norm()
    ratio = None
    ok = sup < tol
    if convergence:
        sup2, _ = _pde_residual(fid, h / 2).sup_norm()
        ratio = sup / sup2 if sup2 > 0 else float("inf")
        ok = ok and _ratio_ok(ratio)
    return CheckResult(
        name=name,
        anchor=fam.formula,
        sup=sup,
        count=n,
        tol=tol,
        passed=ok,
        flags={"family": fid} | ({"sigma": fam.sign} if fam.kind == "sine_solution" else {}),
        grid=_grid(fam.rectangle, h).to_json(),
        ratio=ratio,
    )


# ---------------------------------------------------------------------------


def criterion_1(h, tol, convergence=True):
    return [
        _residual_check(f"c1.{fid}.sinh_residual", fid, h, tol, convergence)
        for fid in ("W_TAN_SPECIAL", "W_ONE_SOLITON", "W_EX2", "W_SQRT2")
    ]


def criterion_2(h, tol, convergence=True):
    checks = []
    for fid in ("THETA_EX2", "THETA_SQRT2"):
        fam = get_family(fid)
        g = _grid(fam.rectangle, h)
        probed = sign_probe(eval_family(fid, g))
        c = _residual_check(f"c2.{fid}.sine_residual", fid, h, tol, convergence)
        c.flags["probed_sigma"] = probed
        c.passed = c.passed and probed == fam.sign
        checks.append(c)

    # theta assembled from integrated profiles (the sqrt(2) coefficient set)
    cspec, dspec = tanh_family_profiles(-4.0, 4.0, 4.0, dc_init=2.0, dd_init=-2.0)

    def assembled_res(hh):
        g = _grid(get_family("THETA_SQRT2").rectangle, hh)
        th = assemble_tanh_family(
            integrate_profile(cspec, g.x()), integrate_profile(dspec, g.y()), g
        )
        return th, g

    th, g = assembled_res(h)
    probed = sign_probe(th)
    sup, n = residual_sine_gordon(th, -1).sup_norm()
    ratio = None
    ok = sup < tol and probed == -1
    if convergence:
        th2, _ = assembled_res(h / 2)
        sup2, _ = residual_sine_gordon(th2, -1).sup_norm()
        ratio = sup / sup2 if sup2 > 0 else float("inf")
        ok = ok and _ratio_ok(ratio)
    checks.append(CheckResult(
        name="c2.assembled_tanh_family.sine_residual",
        anchor="theta = arcsin(tanh(C + D)) from integrated quartic profiles",
        sup=sup,
        count=n,
        tol=tol,
        passed=ok,
        flags={"probed_sigma": probed, "coefficients": "c4=-4, c5=4, c6=4"},
        grid=g.to_json(),
        ratio=ratio,
    ))

    # constant theta = pi/2: sin(2 theta) vanishes, so both signs hold exactly
    g = _grid(get_family("THETA_CONST_HALFPI").rectangle, h)
    th = eval_family("THETA_CONST_HALFPI", g)
    sup_b = max(
        residual_sine_gordon(th, +1).sup_norm()[0],
        residual_sine_gordon(th, -1).sup_norm()[0],
    )
    checks.append(CheckResult(
        name="c2.THETA_CONST_HALFPI.both_signs",
        anchor="theta = pi/2: residual vanishes for both sign conventions",
        sup=sup_b,
        count=residual_sine_gordon(th, +1).sup_norm()[1],
        tol=1e-12,
        passed=sup_b < 1e-12,
        flags={"probed_sigma": sign_probe(th)},
        grid=g.to_json(),
    ))
    return checks


def criterion_3(h, ode_tol):
    axis = np.linspace(-1.0, 1.0, int(round(2.0 / h)) + 1)
    spec = QuarticProfile(-1.0, 4.0, 0.0, 2.0, 0.0)
    sp = integrate_profile(spec, axis)
    sup = float(np.max(np.abs(sp.p - 2.0 / np.cosh(2 * axis))))
    checks = [CheckResult(
        name="c3.sech_profile.closed_form",
        anchor="(p')^2 = -p^4 + 4p^2, p(0) = 2 integrates to 2*sech(2x)",
        sup=sup,
        count=int(np.count_nonzero(sp.valid)),
        tol=ode_tol,
        passed=sup < ode_tol,
    )]
    drift_tol = max(1e-9, ode_tol / 10)
    drifts = {"sech": sp.first_integral_drift(spec)}
    cspec, dspec = tanh_family_profiles(-4.0, 4.0, 4.0, dc_init=2.0, dd_init=-2.0)
    drifts["sqrt2_c"] = integrate_profile(cspec, axis).first_integral_drift(cspec)
    drifts["sqrt2_d"] = integrate_profile(dspec, axis).first_integral_drift(dspec)
    worst = max(drifts.values())
    checks.append(CheckResult(
        name="c3.first_integral_drift",
        anchor="|(p')^2 - quartic(p)| stays at the integrator floor on every profile",
        sup=worst,
        count=len(drifts),
        tol=drift_tol,
        passed=worst < drift_tol,
        flags={k: float(v) for k, v in drifts.items()},
    ))
    return checks


def _pair(fid_w, fid_theta, g):
    return BacklundPair(
        eval_family(fid_w, g), eval_family(fid_theta, g), provenance="closed forms"
    )


def criterion_4(h, tol, march_tol, convergence=True):
    checks = []
    for fid_w, fid_t in (("W_SQRT2", "THETA_SQRT2"), ("W_EX2", "THETA_EX2")):
        fam = get_family(fid_w)

        def sup_at(hh):
            r1, r2 = backlund_residuals(_pair(fid_w, fid_t, _grid(fam.rectangle, hh)))
            return max(r1.sup_norm()[0], r2.sup_norm()[0]), r1.sup_norm()[1]

        sup, n = sup_at(h)
        ratio = None
        ok = sup < tol
        if convergence:
            sup2, _ = sup_at(h / 2)
            ratio = sup / sup2 if sup2 > 0 else float("inf")
            ok = ok and _ratio_ok(ratio)
        checks.append(CheckResult(
            name=f"c4.pair.{fid_w}.system_residuals",
            anchor="w_x - theta_y + 2 sinh(w) sin(theta); w_y + theta_x + 2 cosh(w) cos(theta)",
            sup=sup,
            count=n,
            tol=tol,
            passed=ok,
            flags={"pair": f"({fid_w}, {fid_t})"},
            grid=_grid(fam.rectangle, h).to_json(),
            ratio=ratio,
        ))

    # quadrature reconstruction of w from theta, against the printed w
    for fid_t, fid_w, rect in (
        ("THETA_SQRT2", "W_SQRT2", MARCH_RECT_SQRT2),
        ("THETA_EX2", "W_EX2", get_family("W_EX2").rectangle),
    ):
        g = _grid(rect, h)
        th = eval_family(fid_t, g)
        wm = theta_to_w(th, 0.0, analytic=families.scalar_callable(fid_t))
        wp = eval_family(fid_w, g)
        ok_pts = wm.mask & wp.mask
        sup = float(np.max(np.abs(wm.values - wp.values)[ok_pts]))
        checks.append(CheckResult(
            name=f"c4.march.{fid_t}_to_{fid_w}",
            anchor="quadrature w from theta reproduces the printed w",
            sup=sup,
            count=int(np.count_nonzero(ok_pts)),
            tol=march_tol,
            passed=sup < march_tol,
            grid=g.to_json(),
        ))

    # round trip w -> theta -> w; the return march runs on the sampled theta
    g = _grid(ROUNDTRIP_RECT, h)
    w = eval_family("W_TAN_SPECIAL", g)
    th = w_to_theta(w, np.pi, analytic=families.scalar_callable("W_TAN_SPECIAL"))
    w2 = theta_to_w(th, 0.0)
    ok_pts = w.mask & w2.mask
    sup = float(np.max(np.abs(w2.values - w.values)[ok_pts]))
    checks.append(CheckResult(
        name="c4.roundtrip.W_TAN_SPECIAL",
        anchor="w -> theta -> w returns to the start within the march tolerance",
        sup=sup,
        count=int(np.count_nonzero(ok_pts)),
        tol=march_tol,
        passed=sup < march_tol,
        flags={"theta00": "pi"},
        grid=g.to_json(),
    ))
    return checks


def criterion_5(h, tol):
    checks = []
    for fid in ("U_EX_SECTION3", "U_EX1", "U_EX2", "U_SQRT2"):
        fam = get_family(fid)
        g = _grid(fam.rectangle, h)
        u = eval_family(fid, g)
        wgt = hopf_weight(fid, g)
        sup, n = hopf_residual(u, wgt).sup_norm()
        checks.append(CheckResult(
            name=f"c5.{fid}.hopf",
            anchor=fam.formula,
            sup=sup,
            count=n,
            tol=tol,
            passed=sup < tol,
            flags={"weight": "half-plane 1/S^2" if wgt is None else "target-metric weight"},
            grid=g.to_json(),
        ))
        wpart = eval_family(fam.partner, g, fam.partner_params)
        conv, res = correspondence_check(u, wpart)
        sup, n = res.sup_norm()
        checks.append(CheckResult(
            name=f"c5.{fid}.correspondence",
            anchor="dzbar_u / dz_u matches one of exp(-+2w) of the partner solution",
            sup=sup,
            count=n,
            tol=tol,
            passed=sup < tol and conv == fam.convention,
            flags={"partner": fam.partner, "convention": conv},
            grid=g.to_json(),
        ))
    return checks


def criterion_6(h, tol, quad_tol):
    g = _grid(MARCH_RECT_SQRT2, h)
    pair = _pair("W_SQRT2", "THETA_SQRT2", g)
    result = ppfd_construct(pair, R0=0.0, S0=0.5)
    j0 = g.index_of_y(0.0)
    x = g.x()

    printed_I1 = x - np.arctanh(np.tanh(SQRT2 * x) / SQRT2)
    sup = float(np.max(np.abs(result.I1.values[:, j0] - printed_I1)))
    checks = [CheckResult(
        name="c6.ppfd.I1_vs_printed",
        anchor="I1(x) = x - artanh(tanh(sqrt2 x)/sqrt2)",
        sup=sup,
        count=g.nx,
        tol=quad_tol,
        passed=sup < quad_tol,
        grid=g.to_json(),
    )]

    sup, n = hopf_residual(result.u).sup_norm()
    checks.append(CheckResult(
        name="c6.ppfd.hopf",
        anchor="constructed u = R + iS satisfies the half-plane Hopf condition",
        sup=sup,
        count=n,
        tol=tol,
        passed=sup < tol,
        grid=g.to_json(),
    ))

    conv, res = correspondence_check(result.u, pair.w)
    sup, n = res.sup_norm()
    checks.append(CheckResult(
        name="c6.ppfd.correspondence",
        anchor="dzbar_u / dz_u of the constructed map matches exp(-2w)",
        sup=sup,
        count=n,
        tol=tol,
        passed=sup < tol and conv == "exp(-2w)",
        flags={"convention": conv},
        grid=g.to_json(),
    ))

    # printed closed forms carry a global factor 2 relative to the quadrature
    # construction with S(0,0) = 1/2: S_printed(0,0) = 1.  After dividing the
    # printed fields by the measured origin ratio they agree to quadrature
    # accuracy; the factor itself is reported, not patched.
    up = eval_family("U_SQRT2", g)
    ok = up.mask & result.u.mask
    i0 = g.index_of_x(0.0)
    origin_ratio = float(up.im[i0, j0] / result.u.im[i0, j0])
    scale = max(float(np.max(np.abs(up.im[ok]))), 1.0)
    sup = float(np.max(np.hypot(
        up.re[ok] / origin_ratio - result.u.re[ok],
        up.im[ok] / origin_ratio - result.u.im[ok],
    ))) / scale
    checks.append(CheckResult(
        name="c6.ppfd.printed_closed_form",
        anchor="printed (R, S) equal the quadrature map times the origin S-ratio",
        sup=sup,
        count=int(np.count_nonzero(ok)),
        tol=tol,
        passed=sup < tol,
        flags={
            "printed_S_origin": float(up.im[i0, j0]),
            "stated_S0": 0.5,
            "origin_ratio": origin_ratio,
            "note": "printed closed form evaluates to twice the quadrature construction",
        },
        grid=g.to_json(),
    ))
    return checks


def criterion_7(h, tol, control_tol):
    checks = []
    for fid in ("METRIC_SECTION3", "METRIC_EX2"):
        fam = get_family(fid)
        g = _grid(fam.rectangle, h)
        K = gaussian_curvature(eval_family(fid, g))
        sup, n = field(g, K.values + 1.0, K.mask).sup_norm()
        checks.append(CheckResult(
            name=f"c7.{fid}.curvature",
            anchor=fam.formula,
            sup=sup,
            count=n,
            tol=tol,
            passed=sup < tol,
            grid=g.to_json(),
        ))

    g = _grid(POINCARE_RECT, h)
    _, Y = g.mesh()
    m = families.make_metric(g, 1 / Y**2, np.zeros_like(Y), 1 / Y**2)
    K = gaussian_curvature(m)
    sup, n = field(g, K.values + 1.0, K.mask).sup_norm()
    checks.append(CheckResult(
        name="c7.poincare_control.curvature",
        anchor="E = G = 1/y^2 has curvature exactly -1",
        sup=sup,
        count=n,
        tol=control_tol,
        passed=sup < control_tol,
        grid=g.to_json(),
    ))

    for fid in ("U_EX_SECTION3", "U_EX1", "U_EX2", "U_SQRT2"):
        fam = get_family(fid)
        g = _grid(fam.curvature_rect, h)
        u = eval_family(fid, g)
        K = gaussian_curvature(pullback_metric(u, hopf_weight(fid, g)))
        sup, n = field(g, K.values + 1.0, K.mask).sup_norm()
        checks.append(CheckResult(
            name=f"c7.pullback.{fid}.curvature",
            anchor="pullback first fundamental form has curvature -1 on immersive points",
            sup=sup,
            count=n,
            tol=tol,
            passed=sup < tol,
            grid=g.to_json(),
        ))
    return checks


def criterion_8(h, ode_tol):
    checks = []
    rejected = 0
    for ctor, args in (
        (tan_family_profiles, (1.0, 0.0, 0.0)),     # 4*c1 = 4 but 16 + c3 - c2 = 16
        (tanh_family_profiles, (0.0, 0.0, 0.0)),    # 16 + 4*c4 = 16 but c6 - c5 = 0
    ):
        try:
            ctor(*args)
        except ValueError:
            rejected += 1
    checks.append(CheckResult(
        name="c8.constraint_rejection",
        anchor="coefficient sets violating 4c1 = 16 + c3 - c2 or 16 + 4c4 = c6 - c5 are rejected",
        sup=float(2 - rejected),
        count=2,
        tol=0.5,
        passed=rejected == 2,
    ))

    # resolve the conflicting printed first-integral coefficient sets for the
    # sqrt(2) profile by direct integration: only (q2, q0) = (-4, 4) with
    # slope 2 reproduces sqrt(2)*tanh(sqrt(2) x)
    axis = np.linspace(-1.0, 1.0, int(round(2.0 / h)) + 1)
    target = SQRT2 * np.tanh(SQRT2 * axis)

    def mismatch(q2, q0, dp0):
        sp = integrate_profile(QuarticProfile(1.0, q2, q0, 0.0, dp0), axis)
        return float(np.max(np.abs(sp.p - target)))

    winner = mismatch(-4.0, 4.0, 2.0)
    loser_mid = mismatch(+4.0, 4.0, 2.0)   # middle coefficient with flipped sign
    loser_const = mismatch(-4.0, 16.0, 4.0)  # constant coefficient 16 instead of 4
    ok = winner < ode_tol and loser_mid > 1e-2 and loser_const > 1e-2
    checks.append(CheckResult(
        name="c8.coefficient_resolution",
        anchor="(p')^2 = p^4 - 4p^2 + 4 is the first integral of sqrt(2)*tanh(sqrt(2) x)",
        sup=winner,
        count=len(axis),
        tol=ode_tol,
        passed=ok,
        flags={
            "winner": "q2=-4, q0=4, p'(0)=2",
            "mismatch_flipped_middle": loser_mid,
            "mismatch_constant_16": loser_const,
        },
    ))
    return checks


def run_acceptance(h: float = DEFAULT_H, tol: float | None = None, quick: bool = False,
                   convergence: bool = True) -> VerificationReport:
    t_start = time.monotonic()
    if quick:
        # coarse grids sit before the asymptotic regime, so h-halving ratios
        # are not meaningful there
        h = 1.0 / 100
        convergence = False
    if tol is None:
        tol = base_tolerance()
    factor = (h / DEFAULT_H) ** 2  # second-order scaling of every FD floor
    tol_fd = tol * factor
    march_tol = 5e-4 * factor
    quad_tol = 1e-6 * factor
    control_tol = 1e-6 * factor
    ode_tol = 1e-8 * max(factor**2, 1.0)  # RK4 floor scales with h^4

    checks = []
    checks += criterion_1(h, tol_fd, convergence)
    checks += criterion_2(h, tol_fd, convergence)
    checks += criterion_3(h, ode_tol)
    checks += criterion_4(h, tol_fd, march_tol, convergence)
    checks += criterion_5(h, tol_fd)
    checks += criterion_6(h, tol_fd, quad_tol)
    checks += criterion_7(h, tol_fd, control_tol)
    checks += criterion_8(h, ode_tol)

    elapsed = time.monotonic() - t_start
    # wall-clock time is kept out of the serialized report so that identical
    # configurations produce bit-identical JSON
    checks.append(CheckResult(
        name="c9.runtime_budget",
        anchor="full suite finishes within five minutes",
        sup=0.0,
        count=len(checks),
        tol=300.0,
        passed=elapsed < 300.0,
    ))
    rep = VerificationReport(
        checks=checks,
        config={"h": h, "tolerance": tol, "quick": quick, "convergence": convergence},
    )
    rep.elapsed = elapsed
    return rep
