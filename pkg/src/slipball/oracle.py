"""Finite-difference ground truth, independent of every analytic formula.

Two derivative paths:

* spherical: central differences directly in (r, theta, phi), assembled with
  the same curl formula the analytic side uses;
* Cartesian: fields are sampled at Cartesian stencil points, components
  rotated to Cartesian, differentiated axis by axis, and the result rotated
  back - nothing of the spherical operator formulas is reused.

All operations consume point evaluators only, never analytic jets.  Central
differences are second order; one Richardson level (enabled by default)
combines D(step) and D(step/2) into (4 D(step/2) - D(step)) / 3.  At r = 1
radial derivatives switch to the one-sided inward stencil with nodes
(r, r-s, r-2s) and weights (3, -4, 1)/(2s); no evaluation outside the closed
ball is ever requested.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import StencilOutOfDomain
from .sphcalc import ScalarJet, SphPoint, SphVec

R_CEILING = 1.05  # interior radial stencils may probe slightly past the sphere
_BOUNDARY_EPS = 1e-12


@dataclass(frozen=True)
class FDConfig:
    step: float = 1e-4
    richardson: bool = True

    def __post_init__(self):
        if not 1e-8 <= self.step <= 1e-2:
            raise ValueError(f"step {self.step} outside [1e-8, 1e-2]")


def _richardson(d_at, step, enabled):
    if not enabled:
        return d_at(step)
    return (4.0 * d_at(step / 2.0) - d_at(step)) / 3.0


def fd_partial(f, p: SphPoint, coordinate: str, cfg: FDConfig = FDConfig()) -> float:
    """Partial derivative of a scalar field f(SphPoint) at p.

    Central second-order stencil, one-sided inward at the r = 1 boundary.
    """
    s = cfg.step
    if coordinate == "r":
        if abs(p.r - 1.0) <= _BOUNDARY_EPS:
            def d_at(h):
                return (3.0 * f(p)
                        - 4.0 * f(SphPoint(p.r - h, p.theta, p.phi))
                        + f(SphPoint(p.r - 2.0 * h, p.theta, p.phi))) / (2.0 * h)
            return _richardson(d_at, s, cfg.richardson)
        if not (p.r - 2.0 * s > 0.0 and p.r + 2.0 * s < R_CEILING):
            raise StencilOutOfDomain(f"radial stencil at r={p.r} with step {s}")

        def d_at(h):
            return (f(SphPoint(p.r + h, p.theta, p.phi))
                    - f(SphPoint(p.r - h, p.theta, p.phi))) / (2.0 * h)
        return _richardson(d_at, s, cfg.richardson)

    if coordinate == "theta":
        if not (p.theta - 2.0 * s > 0.0 and p.theta + 2.0 * s < math.pi):
            raise StencilOutOfDomain(f"polar stencil at theta={p.theta} with step {s}")

        def d_at(h):
            return (f(SphPoint(p.r, p.theta + h, p.phi))
                    - f(SphPoint(p.r, p.theta - h, p.phi))) / (2.0 * h)
        return _richardson(d_at, s, cfg.richardson)

    if coordinate == "phi":
        def d_at(h):
            return (f(SphPoint(p.r, p.theta, p.phi + h))
                    - f(SphPoint(p.r, p.theta, p.phi - h))) / (2.0 * h)
        return _richardson(d_at, s, cfg.richardson)

    raise ValueError(f"unknown coordinate {coordinate!r}")


def fd_scalar_jet(f, p: SphPoint, cfg: FDConfig = FDConfig()) -> ScalarJet:
    """First-order jet of f at p by finite differences (second-order slots stay 0)."""
    return ScalarJet(
        value=f(p),
        d_r=fd_partial(f, p, "r", cfg),
        d_theta=fd_partial(f, p, "theta", cfg),
        d_phi=fd_partial(f, p, "phi", cfg),
    )


def fd_curl_spherical(field, p: SphPoint, cfg: FDConfig = FDConfig()) -> SphVec:
    """Curl at p with every derivative replaced by a finite difference.

    field: SphPoint -> SphVec.
    """
    st = math.sin(p.theta)
    d_upsin_dt = fd_partial(lambda q: field(q).vphi * math.sin(q.theta), p, "theta", cfg)
    d_ut_dp = fd_partial(lambda q: field(q).vtheta, p, "phi", cfg)
    d_ur_dp = fd_partial(lambda q: field(q).vr, p, "phi", cfg)
    d_rup_dr = fd_partial(lambda q: q.r * field(q).vphi, p, "r", cfg)
    d_rut_dr = fd_partial(lambda q: q.r * field(q).vtheta, p, "r", cfg)
    d_ur_dt = fd_partial(lambda q: field(q).vr, p, "theta", cfg)
    return SphVec(
        (d_upsin_dt - d_ut_dp) / (p.r * st),
        (d_ur_dp / st - d_rup_dr) / p.r,
        (d_rut_dr - d_ur_dt) / p.r,
    )


def _check_cartesian_stencil(x, y, z, step):
    r = np.sqrt(x * x + y * y + z * z)
    if np.any(r + step > 1.0 + _BOUNDARY_EPS):
        raise StencilOutOfDomain("Cartesian stencil leaves the unit ball")
    if np.any(np.sqrt(x * x + y * y) < 2.0 * step):
        raise StencilOutOfDomain("Cartesian stencil too close to the polar axis")


def _cartesian_field(components_fn, x, y, z):
    r, theta, phi = kernels.cart_to_sph(x, y, z)
    vr, vt, vp = components_fn(r, theta, phi)
    return kernels.vec_sph_to_cart(theta, phi, vr, vt, vp)


def cartesian_jacobian_grid(components_fn, r, theta, phi, cfg: FDConfig = FDConfig()):
    """3x3 Jacobian dW_i/dx_j of the Cartesian field at each grid node.

    components_fn maps float64 arrays (r, theta, phi) to spherical component
    arrays; everything here is vectorized over the nodes.
    """
    r = np.ascontiguousarray(np.atleast_1d(np.asarray(r, dtype=np.float64)))
    theta = np.ascontiguousarray(np.atleast_1d(np.asarray(theta, dtype=np.float64)))
    phi = np.ascontiguousarray(np.atleast_1d(np.asarray(phi, dtype=np.float64)))
    x, y, z = kernels.sph_to_cart(r, theta, phi)
    _check_cartesian_stencil(x, y, z, cfg.step)
    base = [x, y, z]

    def column(j, h):
        plus = list(base)
        minus = list(base)
        plus[j] = base[j] + h
        minus[j] = base[j] - h
        wp = _cartesian_field(components_fn, *plus)
        wm = _cartesian_field(components_fn, *minus)
        return [(wp[i] - wm[i]) / (2.0 * h) for i in range(3)]

    jac = [[None] * 3 for _ in range(3)]
    for j in range(3):
        if cfg.richardson:
            c1 = column(j, cfg.step)
            c2 = column(j, cfg.step / 2.0)
            col = [(4.0 * c2[i] - c1[i]) / 3.0 for i in range(3)]
        else:
            col = column(j, cfg.step)
        for i in range(3):
            jac[i][j] = col[i]
    return jac


def cartesian_divergence_grid(components_fn, r, theta, phi, cfg: FDConfig = FDConfig()):
    jac = cartesian_jacobian_grid(components_fn, r, theta, phi, cfg)
    return jac[0][0] + jac[1][1] + jac[2][2]


def cartesian_curl_grid(components_fn, r, theta, phi, cfg: FDConfig = FDConfig()):
    """Curl in the local spherical basis via the fully Cartesian path."""
    r = np.ascontiguousarray(np.atleast_1d(np.asarray(r, dtype=np.float64)))
    theta = np.ascontiguousarray(np.atleast_1d(np.asarray(theta, dtype=np.float64)))
    phi = np.ascontiguousarray(np.atleast_1d(np.asarray(phi, dtype=np.float64)))
    jac = cartesian_jacobian_grid(components_fn, r, theta, phi, cfg)
    cx = jac[2][1] - jac[1][2]
    cy = jac[0][2] - jac[2][0]
    cz = jac[1][0] - jac[0][1]
    return kernels.vec_cart_to_sph(theta, phi, cx, cy, cz)


def _point_components(field):
    def fn(r, theta, phi):
        vr = np.empty_like(r)
        vt = np.empty_like(r)
        vp = np.empty_like(r)
        for i in range(r.size):
            v = field(SphPoint(r.flat[i], theta.flat[i], phi.flat[i]))
            vr.flat[i], vt.flat[i], vp.flat[i] = v.vr, v.vtheta, v.vphi
        return vr, vt, vp
    return fn


def cartesian_curl(field, p: SphPoint, cfg: FDConfig = FDConfig()) -> SphVec:
    """Point version of cartesian_curl_grid for a SphPoint -> SphVec field."""
    cr, ct, cp = cartesian_curl_grid(
        _point_components(field), np.array([p.r]), np.array([p.theta]), np.array([p.phi]), cfg)
    return SphVec(float(cr[0]), float(ct[0]), float(cp[0]))


def cartesian_divergence(field, p: SphPoint, cfg: FDConfig = FDConfig()) -> float:
    div = cartesian_divergence_grid(
        _point_components(field), np.array([p.r]), np.array([p.theta]), np.array([p.phi]), cfg)
    return float(div[0])


def fd_boundary_radial_derivative(f, theta: float, phi: float,
                                  cfg: FDConfig = FDConfig()) -> float:
    """(1/r) d_r(r f) evaluated at r = 1 by the one-sided inward stencil."""
    def rf(rr):
        return rr * f(SphPoint(rr, theta, phi))

    def d_at(h):
        return (3.0 * rf(1.0) - 4.0 * rf(1.0 - h) + rf(1.0 - 2.0 * h)) / (2.0 * h)

    return _richardson(d_at, cfg.step, cfg.richardson)
