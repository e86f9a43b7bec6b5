"""Spherical coordinates, the local orthonormal basis, and differential operators.

Points are (r, theta, phi) with theta the colatitude and phi the longitude,
reduced to [0, 2pi) at construction.  Vectors carry components in the local
positively oriented basis (e_r, e_theta, e_phi); on the unit sphere the
outward normal is e_r, i.e. SphVec(1, 0, 0).

Operators act on ScalarJet bundles of raw-coordinate partial derivatives
(not arc-length derivatives): every metric factor 1/r, 1/sin(theta) lives
in the operator formulas themselves,

    div u  = (1/r^2) d_r(r^2 u_r) + (1/(r sin)) d_t(u_t sin) + (1/(r sin)) d_p u_p
    curl u = (1/(r sin)) (d_t(u_p sin) - d_p u_t) e_r
           + (1/r) ((1/sin) d_p u_r - d_r(r u_p)) e_t
           + (1/r) (d_r(r u_t) - d_t u_r) e_p
    grad f = f_r e_r + (1/r) f_t e_t + (1/(r sin)) f_p e_p.

Evaluation refuses points with r or sin(theta) below 1e-9 rather than
silently zeroing the singular factors.
"""
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import CoordinateSingularity, PoleDegeneracy

TWO_PI = 2.0 * math.pi

POLE_EPS = 1e-9
SINGULARITY_EPS = 1e-9
_COORD_SLACK = 1e-12


class CartesianPoint(NamedTuple):
    x: float
    y: float
    z: float


@dataclass(frozen=True)
class SphPoint:
    """Point in spherical coordinates; phi normalized to [0, 2pi) once, here."""

    r: float
    theta: float
    phi: float

    def __post_init__(self):
        r, theta = float(self.r), float(self.theta)
        if r < -_COORD_SLACK:
            raise ValueError(f"negative radius r={r}")
        if theta < -_COORD_SLACK or theta > math.pi + _COORD_SLACK:
            raise ValueError(f"colatitude out of range theta={theta}")
        phi = float(self.phi) % TWO_PI
        if phi == TWO_PI:  # guard against rounding in the modulo itself
            phi = 0.0
        object.__setattr__(self, "r", max(r, 0.0))
        object.__setattr__(self, "theta", min(max(theta, 0.0), math.pi))
        object.__setattr__(self, "phi", phi)


@dataclass(frozen=True)
class SphVec:
    """Vector components in the local basis (e_r, e_theta, e_phi)."""

    vr: float
    vtheta: float
    vphi: float

    def norm(self) -> float:
        return math.sqrt(self.vr**2 + self.vtheta**2 + self.vphi**2)

    def as_array(self) -> np.ndarray:
        return np.array([self.vr, self.vtheta, self.vphi])


@dataclass(frozen=True)
class ScalarJet:
    """Value and raw-coordinate partials of a scalar at a point.

    Mixed partials are stored once per unordered pair, so symmetry holds by
    construction.  First-order operators read only the first partials; the
    second-order slots exist for callers that have them (they default to 0).
    """

    value: float
    d_r: float = 0.0
    d_theta: float = 0.0
    d_phi: float = 0.0
    d_rr: float = 0.0
    d_rtheta: float = 0.0
    d_rphi: float = 0.0
    d_thetatheta: float = 0.0
    d_thetaphi: float = 0.0
    d_phiphi: float = 0.0


def to_cartesian_point(p: SphPoint) -> CartesianPoint:
    st = math.sin(p.theta)
    return CartesianPoint(
        p.r * st * math.cos(p.phi),
        p.r * st * math.sin(p.phi),
        p.r * math.cos(p.theta),
    )


def from_cartesian_point(x, y, z) -> SphPoint:
    r = math.sqrt(x * x + y * y + z * z)
    if r == 0.0:
        return SphPoint(0.0, 0.0, 0.0)
    # atan2(hypot, z) stays well-conditioned at the poles, unlike acos(z/r)
    theta = math.atan2(math.hypot(x, y), z)
    return SphPoint(r, theta, math.atan2(y, x))


def _require_off_axis(p: SphPoint):
    if p.theta < POLE_EPS or p.theta > math.pi - POLE_EPS:
        raise PoleDegeneracy(f"basis degenerates at theta={p.theta}")


def basis_at(p: SphPoint):
    """Cartesian unit vectors (e_r, e_theta, e_phi) at p; requires theta off the poles."""
    _require_off_axis(p)
    st, ct = math.sin(p.theta), math.cos(p.theta)
    sp, cp = math.sin(p.phi), math.cos(p.phi)
    e_r = np.array([st * cp, st * sp, ct])
    e_t = np.array([ct * cp, ct * sp, -st])
    e_p = np.array([-sp, cp, 0.0])
    return e_r, e_t, e_p


def vec_to_cartesian(p: SphPoint, v: SphVec) -> np.ndarray:
    e_r, e_t, e_p = basis_at(p)
    return v.vr * e_r + v.vtheta * e_t + v.vphi * e_p


def vec_from_cartesian(p: SphPoint, w) -> SphVec:
    e_r, e_t, e_p = basis_at(p)
    w = np.asarray(w, dtype=float)
    return SphVec(float(w @ e_r), float(w @ e_t), float(w @ e_p))


def _require_regular(p: SphPoint):
    if p.r < SINGULARITY_EPS or math.sin(p.theta) < SINGULARITY_EPS:
        raise CoordinateSingularity(
            f"operator undefined at r={p.r}, theta={p.theta} (1/r or 1/sin too large)")


def divergence(p: SphPoint, jets) -> float:
    """Divergence from the jets of (u_r, u_theta, u_phi)."""
    _require_regular(p)
    jr, jt, jp = jets
    st, ct = math.sin(p.theta), math.cos(p.theta)
    return (jr.d_r + 2.0 * jr.value / p.r
            + (jt.d_theta + jt.value * ct / st) / p.r
            + jp.d_phi / (p.r * st))


def curl(p: SphPoint, jets) -> SphVec:
    """Curl from the jets of (u_r, u_theta, u_phi)."""
    _require_regular(p)
    jr, jt, jp = jets
    st, ct = math.sin(p.theta), math.cos(p.theta)
    cr = (jp.d_theta * st + jp.value * ct - jt.d_phi) / (p.r * st)
    ctheta = (jr.d_phi / st - jp.value - p.r * jp.d_r) / p.r
    cphi = (jt.value + p.r * jt.d_r - jr.d_theta) / p.r
    return SphVec(cr, ctheta, cphi)


def gradient(p: SphPoint, jet: ScalarJet) -> SphVec:
    _require_regular(p)
    st = math.sin(p.theta)
    return SphVec(jet.d_r, jet.d_theta / p.r, jet.d_phi / (p.r * st))


def cross(a: SphVec, b: SphVec) -> SphVec:
    """Right-handed cross product in the local basis (both vectors at one point)."""
    return SphVec(
        a.vtheta * b.vphi - a.vphi * b.vtheta,
        a.vphi * b.vr - a.vr * b.vphi,
        a.vr * b.vtheta - a.vtheta * b.vr,
    )


def dot(a: SphVec, b: SphVec) -> float:
    return a.vr * b.vr + a.vtheta * b.vtheta + a.vphi * b.vphi
