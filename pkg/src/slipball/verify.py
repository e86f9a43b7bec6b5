"""Numerical certification checks and report assembly.

Each check evaluates a residual or a non-vanishing quantity over a grid and
returns a CheckResult with sup and L2 norms, the binding tolerance, the pass
direction, and the witness node of the sup.  Tolerances come in three
regimes: 1e-12 for closed-form identities that are exact up to rounding,
1e-6 for finite-difference-contaminated residuals, and a 1e-1 threshold
that non-vanishing sups must exceed.

Everything is deterministic: grids are midpoint lattices, random sample
points come from a seeded generator echoed into the report, and sup/argmax
reductions resolve ties by lowest flat index.
"""
import json
import math
from dataclasses import dataclass, field as dataclass_field
from datetime import datetime, timezone
from typing import Optional

import numpy as np

from . import family as fam
from . import kernels, oracle
from .errors import DegenerateFit, NoWitness
from .sphcalc import SphPoint

TOL_CLOSED_FORM = 1e-10
TOL_EXACT_TRACE = 1e-12
TOL_FD = 1e-6
TOL_ORACLE_AGREEMENT = 1e-4
NONVANISH_THRESHOLD = 1e-1
PHI_GATE_REL_TOL = 1e-5
PHI_GATE_MAGNITUDE = 1e-2
DEFAULT_SEED = 1234


@dataclass(frozen=True)
class GridSpec:
    """Midpoint evaluation lattice.

    Interior grids exclude margin_r from both r = 0 and r = 1 and
    margin_theta from both poles (the radial margin keeps Cartesian FD
    stencils inside the ball).  Boundary grids ignore n_r and the margins:
    theta midpoints cover all of [0, pi] so that surface quadrature sees the
    whole sphere, and phi is uniform on [0, 2pi).
    """

    n_r: int = 32
    n_theta: int = 48
    n_phi: int = 96
    margin_r: float = 0.05
    margin_theta: float = 0.05
    boundary_only: bool = False

    def __post_init__(self):
        for name in ("n_r", "n_theta", "n_phi"):
            if getattr(self, name) < 8:
                raise ValueError(f"{name} must be at least 8")
        if not 0.0 < self.margin_r < 0.5:
            raise ValueError("margin_r must lie in (0, 0.5)")
        if not 0.0 < self.margin_theta < math.pi / 2:
            raise ValueError("margin_theta must lie in (0, pi/2)")

    def require_margins_for(self, cfg: oracle.FDConfig):
        if self.margin_r <= 2.0 * cfg.step or self.margin_theta <= 2.0 * cfg.step:
            raise ValueError("grid margins must exceed twice the oracle step")

    def interior_mesh(self):
        dr = (1.0 - 2.0 * self.margin_r) / self.n_r
        dth = (math.pi - 2.0 * self.margin_theta) / self.n_theta
        dph = 2.0 * math.pi / self.n_phi
        r_ax = self.margin_r + (np.arange(self.n_r) + 0.5) * dr
        th_ax = self.margin_theta + (np.arange(self.n_theta) + 0.5) * dth
        ph_ax = np.arange(self.n_phi) * dph
        r, th, ph = [np.ascontiguousarray(a.ravel())
                     for a in np.meshgrid(r_ax, th_ax, ph_ax, indexing="ij")]
        weights = r**2 * np.sin(th) * dr * dth * dph
        return {"r": r, "theta": th, "phi": ph, "weights": weights,
                "axes": (r_ax, th_ax, ph_ax), "shape": (self.n_r, self.n_theta, self.n_phi)}

    def boundary_mesh(self):
        dth = math.pi / self.n_theta
        dph = 2.0 * math.pi / self.n_phi
        th_ax = (np.arange(self.n_theta) + 0.5) * dth
        ph_ax = np.arange(self.n_phi) * dph
        th, ph = [np.ascontiguousarray(a.ravel())
                  for a in np.meshgrid(th_ax, ph_ax, indexing="ij")]
        weights = np.sin(th) * dth * dph
        return {"theta": th, "phi": ph, "weights": weights,
                "axes": (th_ax, ph_ax), "shape": (self.n_theta, self.n_phi)}

    def to_dict(self):
        return {"n_r": self.n_r, "n_theta": self.n_theta, "n_phi": self.n_phi,
                "margin_r": self.margin_r, "margin_theta": self.margin_theta,
                "boundary_only": self.boundary_only}


@dataclass
class CheckResult:
    """One named residual or non-vanishing check.

    direction "below": pass iff norm_sup <= tolerance (residual check);
    direction "above": pass iff norm_sup >= tolerance (non-vanishing check).
    """

    name: str
    norm_sup: float
    norm_l2: float
    tolerance: float
    direction: str
    passed: bool
    witness: Optional[SphPoint] = None
    details: dict = dataclass_field(default_factory=dict)

    def to_dict(self):
        w = None if self.witness is None else {
            "r": self.witness.r, "theta": self.witness.theta, "phi": self.witness.phi}
        return _jsonify({"name": self.name, "norm_sup": self.norm_sup,
                         "norm_l2": self.norm_l2, "tolerance": self.tolerance,
                         "direction": self.direction, "pass": bool(self.passed),
                         "witness": w, "details": self.details})


def _jsonify(obj):
    """Recursively convert numpy scalars so json.dumps accepts the report."""
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    return obj


def _residual_result(name, values, weights, tolerance, witness_fn, details=None):
    a = np.abs(values)
    i = int(np.argmax(a))
    sup = float(a[i])
    l2 = float(np.sqrt(np.sum(values * values * weights)))
    return CheckResult(name, sup, l2, tolerance, "below", sup <= tolerance,
                       witness_fn(i), details or {})


def _nonvanishing_result(name, values, weights, threshold, witness_fn, details=None):
    a = np.abs(values)
    i = int(np.argmax(a))
    sup = float(a[i])
    l2 = float(np.sqrt(np.sum(values * values * weights)))
    return CheckResult(name, sup, l2, threshold, "above", sup >= threshold,
                       witness_fn(i), details or {})


def quadrature_sanity(grid: GridSpec) -> float:
    """Surface L2 norm of the constant 1 (should be sqrt(4 pi))."""
    mesh = grid.boundary_mesh()
    return float(np.sqrt(np.sum(mesh["weights"])))


def _boundary_witness(mesh):
    def witness_fn(i):
        it, ip = divmod(i, mesh["shape"][1])
        return SphPoint(1.0, mesh["axes"][0][it], mesh["axes"][1][ip])
    return witness_fn


def _interior_witness(mesh):
    n_t, n_p = mesh["shape"][1], mesh["shape"][2]

    def witness_fn(i):
        ir, rem = divmod(i, n_t * n_p)
        it, ip = divmod(rem, n_p)
        return SphPoint(mesh["axes"][0][ir], mesh["axes"][1][it], mesh["axes"][2][ip])
    return witness_fn


def check_divergence_free(field: fam.CounterexampleField, grid: GridSpec,
                          cfg: oracle.FDConfig = oracle.FDConfig()) -> CheckResult:
    """sup |div u| over the interior grid, analytic jets and Cartesian FD.

    Reports the larger sup; passes only when the analytic path stays within
    the rounding tolerance and the FD path within the FD tolerance.
    """
    grid.require_margins_for(cfg)
    mesh = grid.interior_mesh()
    r, th, ph = mesh["r"], mesh["theta"], mesh["phi"]

    parts = field.u_raw_partials(r, th, ph)
    zeros = np.zeros_like(r)
    div_analytic = kernels.divergence_parts(
        r, np.sin(th), np.cos(th), zeros, zeros,
        parts["ut"], parts["dut_dtheta"], parts["dup_dphi"])
    div_fd = oracle.cartesian_divergence_grid(field.u_components, r, th, ph, cfg)

    sup_analytic = float(np.max(np.abs(div_analytic)))
    sup_fd = float(np.max(np.abs(div_fd)))
    use_fd = sup_fd >= sup_analytic
    values = div_fd if use_fd else div_analytic
    details = {"sup_analytic": sup_analytic, "tolerance_analytic": TOL_CLOSED_FORM,
               "sup_oracle": sup_fd, "tolerance_oracle": TOL_FD}
    res = _residual_result("divergence_free", values, mesh["weights"], TOL_FD,
                           _interior_witness(mesh), details)
    res.passed = sup_analytic <= TOL_CLOSED_FORM and sup_fd <= TOL_FD
    return res


def check_slip_conditions(field: fam.CounterexampleField, grid: GridSpec,
                          cfg: oracle.FDConfig = oracle.FDConfig(),
                          oracle_spots: int = 5):
    """(u . n, |omega x n|) residuals over the boundary grid, closed forms.

    A handful of FD-curl spot evaluations ride along in the details of the
    omega check so the closed-form trace has an oracle partner.
    """
    mesh = grid.boundary_mesh()
    th, ph, w = mesh["theta"], mesh["phi"], mesh["weights"]
    ones = np.ones_like(th)
    ur, _, _ = field.u_components(ones, th, ph)
    _, wt, wp = field.omega_components(ones, th, ph)
    tangential = np.hypot(wt, wp)
    wit = _boundary_witness(mesh)
    res_u = _residual_result("slip_u_dot_n", ur, w, TOL_EXACT_TRACE, wit)
    res_w = _residual_result("slip_omega_cross_n", tangential, w, TOL_EXACT_TRACE, wit)

    spot_sup = 0.0
    stride = max(1, th.size // max(oracle_spots, 1))
    for i in list(range(0, th.size, stride))[:oracle_spots]:
        p = SphPoint(1.0, th[i], ph[i])
        c = oracle.fd_curl_spherical(lambda q: fam.u_field(field, q), p, cfg)
        spot_sup = max(spot_sup, math.hypot(c.vtheta, c.vphi))
    res_w.details["oracle_spot_sup"] = spot_sup
    res_w.details["oracle_spot_points"] = min(oracle_spots, th.size)
    return res_u, res_w


def _gate_phi_closed_form(field, mesh, cfg, n_points):
    """Compare the candidate phi closed form with the radial-derivative
    oracle at up to n_points boundary nodes of magnitude >= 1e-2."""
    th, ph = mesh["theta"], mesh["phi"]
    closed = field.boundary_curl_phi(th, ph)
    idx = np.flatnonzero(np.abs(closed) >= PHI_GATE_MAGNITUDE)
    if idx.size == 0:
        return True, 0, 0.0
    stride = max(1, idx.size // n_points)
    take = idx[::stride][:n_points]

    def v_theta(q):
        return field.v_components(q.r, q.theta, q.phi)[1]

    worst = 0.0
    for i in take:
        oracle_val = oracle.fd_boundary_radial_derivative(v_theta, th[i], ph[i], cfg)
        worst = max(worst, float(abs(oracle_val - closed[i]) / abs(closed[i])))
    return worst <= PHI_GATE_REL_TOL, int(take.size), worst


def check_persistency_failure(field: fam.CounterexampleField, grid: GridSpec,
                              cfg: oracle.FDConfig = oracle.FDConfig(),
                              gate_points: int = 50):
    """Non-vanishing of the tangential components of curl(u x w) on the sphere.

    The pass direction is inverted: the sup must exceed the threshold for
    the boundary-condition persistency to be contradicted.  Each result
    carries the closed-form and oracle values at its witness and their
    relative discrepancy; the phi closed form is additionally gated against
    the oracle before being trusted.
    """
    if field.admissibility.witness_a1 is None and field.admissibility.witness_a2 is None:
        raise NoWitness(f"family {field.label!r} exhibits no witness point")
    mesh = grid.boundary_mesh()
    th, ph, w = mesh["theta"], mesh["phi"], mesh["weights"]
    wit = _boundary_witness(mesh)

    def v_phi(q):
        return field.v_components(q.r, q.theta, q.phi)[2]

    def v_theta(q):
        return field.v_components(q.r, q.theta, q.phi)[1]

    bt = field.boundary_curl_theta(th, ph)
    res_t = _nonvanishing_result("persistency_failure_theta", bt, w,
                                 NONVANISH_THRESHOLD, wit)
    p = res_t.witness
    analytic = field.boundary_curl_theta(p.theta, p.phi)
    oracle_val = -oracle.fd_boundary_radial_derivative(v_phi, p.theta, p.phi, cfg)
    res_t.details = {
        "analytic_at_witness": analytic,
        "oracle_at_witness": oracle_val,
        "rel_discrepancy": abs(analytic - oracle_val) / max(abs(analytic), 1e-300),
        "verdict": "persistency violated" if res_t.passed else "no contradiction exhibited",
    }

    ok, n_gate, worst = _gate_phi_closed_form(field, mesh, cfg, gate_points)
    if ok:
        bp = field.boundary_curl_phi(th, ph)
        res_p = _nonvanishing_result("persistency_failure_phi", bp, w,
                                     NONVANISH_THRESHOLD, wit)
        src = "closed_form"
    else:
        # closed form failed its gate: fall back to oracle values on a
        # subsampled grid and flag the formula
        sub_t = mesh["axes"][0][::4]
        sub_p = mesh["axes"][1][::4]
        vals = np.empty(sub_t.size * sub_p.size)
        k = 0
        for t0 in sub_t:
            for p0 in sub_p:
                vals[k] = oracle.fd_boundary_radial_derivative(v_theta, t0, p0, cfg)
                k += 1
        i = int(np.argmax(np.abs(vals)))
        it, ip = divmod(i, sub_p.size)
        sup = float(np.abs(vals[i]))
        res_p = CheckResult("persistency_failure_phi", sup, float("nan"),
                            NONVANISH_THRESHOLD, "above", sup >= NONVANISH_THRESHOLD,
                            SphPoint(1.0, sub_t[it], sub_p[ip]))
        src = "oracle_fallback"
    q = res_p.witness
    analytic_p = field.boundary_curl_phi(q.theta, q.phi)
    oracle_p = oracle.fd_boundary_radial_derivative(v_theta, q.theta, q.phi, cfg)
    res_p.details = {
        "closed_form_validated": ok,
        "gate_points": n_gate,
        "gate_max_rel_err": worst,
        "source": src,
        "analytic_at_witness": analytic_p,
        "oracle_at_witness": oracle_p,
        "rel_discrepancy": abs(analytic_p - oracle_p) / max(abs(analytic_p), 1e-300),
        "verdict": "persistency violated" if res_p.passed else "no contradiction exhibited",
    }
    return res_t, res_p


def neighborhood_radius(field: fam.CounterexampleField, component: str,
                        witness: SphPoint, floor_fraction: float,
                        n_directions: int = 16, n_rings: int = 4,
                        iterations: int = 40) -> float:
    """Largest geodesic radius around the witness on which the chosen
    curl(v) component keeps at least floor_fraction of its witness value.

    Bisection on [0, pi/2], sampling rings of the geodesic ball; the answer
    is resolution-limited by the sampling and iteration count.
    """
    fc = (field.boundary_curl_theta if component == "theta"
          else field.boundary_curl_phi)
    ref = abs(fc(witness.theta, witness.phi))
    if ref == 0.0:
        return 0.0
    floor = floor_fraction * ref

    st, ct = math.sin(witness.theta), math.cos(witness.theta)
    sp, cp = math.sin(witness.phi), math.cos(witness.phi)
    wvec = np.array([st * cp, st * sp, ct])
    t1 = np.cross([0.0, 0.0, 1.0], wvec)
    t1 /= np.linalg.norm(t1)
    t2 = np.cross(wvec, t1)
    alpha = np.arange(n_directions) * (2.0 * math.pi / n_directions)
    dirs = np.outer(np.cos(alpha), t1) + np.outer(np.sin(alpha), t2)

    def ball_min(rho):
        fracs = (np.arange(n_rings) + 1.0) / n_rings
        vals = []
        for f in fracs:
            pts = math.cos(f * rho) * wvec[None, :] + math.sin(f * rho) * dirs
            x, y, z = pts[:, 0].copy(), pts[:, 1].copy(), pts[:, 2].copy()
            _, th, ph = kernels.cart_to_sph(x, y, z)
            vals.append(np.abs(fc(th, ph)))
        return float(np.min(np.concatenate(vals)))

    def holds(rho):
        m = ball_min(rho)
        return m > 0.0 if floor_fraction == 0.0 else m >= floor

    lo, hi = 0.0, math.pi / 2
    if holds(hi):
        return hi
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if holds(mid):
            lo = mid
        else:
            hi = mid
    return lo


def check_navier_traction(field: fam.CounterexampleField, grid: GridSpec,
                          nu: float = 1.0, flat_boundary: bool = False) -> CheckResult:
    """sup of the tangential traction magnitude |t_tan| on the sphere.

    t . tau = (nu/2) (w x n) . tau - nu K u . tau with K = 1 on the unit
    sphere (center of curvature inside) and K = 0 under the flat-boundary
    override.  For slip-compatible families the first term vanishes, so a
    nonzero sup exhibits the gap between the vorticity-based slip condition
    and the traction-based wall law on the curved boundary.
    """
    mesh = grid.boundary_mesh()
    th, ph, w = mesh["theta"], mesh["phi"], mesh["weights"]
    ones = np.ones_like(th)
    _, ut, up = field.u_components(ones, th, ph)
    _, wt, wp = field.omega_components(ones, th, ph)
    curvature = 0.0 if flat_boundary else 1.0
    t_theta = 0.5 * nu * wp - nu * curvature * ut
    t_phi = -0.5 * nu * wt - nu * curvature * up
    magnitude = np.hypot(t_theta, t_phi)
    res = _nonvanishing_result("navier_traction", magnitude, w,
                               NONVANISH_THRESHOLD, _boundary_witness(mesh))
    res.details = {"nu": nu, "curvature": curvature}
    return res


def check_oracle_agreement(field: fam.CounterexampleField,
                           cfg: oracle.FDConfig = oracle.FDConfig(),
                           n_points: int = 50, seed: int = DEFAULT_SEED) -> CheckResult:
    """Analytic curl of u against the Cartesian FD path at random interior points."""
    rng = np.random.default_rng(seed)
    r = rng.uniform(0.1, 0.95, n_points)
    th = rng.uniform(0.15, math.pi - 0.15, n_points)
    ph = rng.uniform(0.0, 2.0 * math.pi, n_points)

    parts = field.u_raw_partials(r, th, ph)
    zeros = np.zeros_like(r)
    cr, ct, cp = kernels.curl_parts(
        r, np.sin(th), np.cos(th), zeros, zeros,
        parts["ut"], parts["dut_dr"], parts["dut_dphi"],
        parts["up"], parts["dup_dr"], parts["dup_dtheta"])
    fr, ft, fp = oracle.cartesian_curl_grid(field.u_components, r, th, ph, cfg)
    diff = np.max(np.vstack([np.abs(cr - fr), np.abs(ct - ft), np.abs(cp - fp)]), axis=0)

    wr, wt, wp = field.omega_components(r, th, ph)
    closed_dev = float(max(np.max(np.abs(cr - wr)), np.max(np.abs(ct - wt)),
                           np.max(np.abs(cp - wp))))

    i = int(np.argmax(diff))
    sup = float(diff[i])
    rms = float(np.sqrt(np.mean(diff**2)))
    return CheckResult(
        "oracle_agreement_curl", sup, rms, TOL_ORACLE_AGREEMENT, "below",
        sup <= TOL_ORACLE_AGREEMENT, SphPoint(r[i], th[i], ph[i]),
        {"n_points": n_points, "seed": seed, "l2_is_rms_over_samples": True,
         "max_jets_vs_closed_form": closed_dev})


@dataclass
class SweepResult:
    rows: list          # (eps, residual) for every requested eps
    included: list      # the rows used in the fit
    slope: float
    intercept: float

    def to_dict(self):
        return {"rows": [{"eps": e, "residual": r} for e, r in self.rows],
                "included": [{"eps": e, "residual": r} for e, r in self.included],
                "slope": self.slope, "intercept": self.intercept}


def scaling_sweep(base_field: fam.CounterexampleField, epsilons,
                  grid: Optional[GridSpec] = None) -> SweepResult:
    """sup |omega x n| as a function of the profile perturbation size.

    The perturbation multiplies the base profile by (1 + eps (r - 0.75)^2),
    which moves h(1) + h'(1) off zero by (eps/2) h(1); the log-log slope of
    the residual against eps should therefore be 1.  eps = 0 rows (and any
    underflowed residual) are excluded from the fit.
    """
    grid = grid if grid is not None else GridSpec(n_theta=128, n_phi=256, boundary_only=True)
    mesh = grid.boundary_mesh()
    th, ph = mesh["theta"], mesh["phi"]
    ones = np.ones_like(th)
    rows = []
    for eps in epsilons:
        f = fam.CounterexampleField(
            fam.perturbed_profile(float(eps), base_field.profile),
            base_field.angular, label=f"perturbed:{eps:g}")
        _, wt, wp = f.omega_components(ones, th, ph)
        rows.append((float(eps), float(np.max(np.hypot(wt, wp)))))
    included = [(e, r) for e, r in rows if e > 0.0 and r > 1e-300]
    if len(included) < 2:
        raise DegenerateFit("need at least two positive-eps rows with nonzero residual")
    log_e = np.log([e for e, _ in included])
    log_r = np.log([r for _, r in included])
    if np.ptp(log_e) == 0.0:
        raise DegenerateFit("all eps values identical")
    slope, intercept = np.polyfit(log_e, log_r, 1)
    return SweepResult(rows, included, float(slope), float(intercept))


@dataclass
class VerificationReport:
    family_label: str
    admissibility: fam.AdmissibilityReport
    checks: list
    overall_pass: bool
    grid_echo: dict
    oracle_echo: dict
    timestamp: str

    def to_dict(self, include_timestamp: bool = True) -> dict:
        d = {"family": self.family_label}
        if include_timestamp:
            d["timestamp"] = self.timestamp
        d["admissibility"] = self.admissibility.to_dict()
        d["checks"] = [c.to_dict() for c in self.checks]
        d["overall_pass"] = self.overall_pass
        d["grid"] = self.grid_echo
        d["oracle"] = self.oracle_echo
        return d

    def to_json(self, include_timestamp: bool = True) -> str:
        return json.dumps(self.to_dict(include_timestamp), indent=2) + "\n"


def _skipped_check(name, reason):
    return CheckResult(name, 0.0, 0.0, NONVANISH_THRESHOLD, "above", False,
                       None, {"skipped": True, "reason": reason})


def run_full_verification(field: fam.CounterexampleField,
                          interior_grid: Optional[GridSpec] = None,
                          boundary_grid: Optional[GridSpec] = None,
                          cfg: oracle.FDConfig = oracle.FDConfig(),
                          nu: float = 1.0, seed: int = DEFAULT_SEED) -> VerificationReport:
    """All checks in fixed order; an admissibility failure in the slip
    identity short-circuits the persistency checks (their closed forms
    assume it) without aborting the rest."""
    interior_grid = interior_grid if interior_grid is not None else GridSpec()
    boundary_grid = boundary_grid if boundary_grid is not None else GridSpec(
        n_theta=128, n_phi=256, boundary_only=True)
    adm = field.admissibility
    checks = [check_divergence_free(field, interior_grid, cfg)]
    checks.extend(check_slip_conditions(field, boundary_grid))

    if not adm.slip_ok:
        reason = (f"slip condition violated: |h(1)+h'(1)| = "
                  f"{adm.slip_condition_residual:.3e}")
        checks.append(_skipped_check("persistency_failure_theta", reason))
        checks.append(_skipped_check("persistency_failure_phi", reason))
    else:
        try:
            res_t, res_p = check_persistency_failure(field, boundary_grid, cfg)
            if res_t.passed:
                res_t.details["neighborhood_radius_half_floor"] = neighborhood_radius(
                    field, "theta", res_t.witness, 0.5)
            checks.extend([res_t, res_p])
        except NoWitness as exc:
            checks.append(_skipped_check("persistency_failure_theta", str(exc)))
            checks.append(_skipped_check("persistency_failure_phi", str(exc)))

    checks.append(check_oracle_agreement(field, cfg, seed=seed))
    checks.append(check_navier_traction(field, boundary_grid, nu=nu))

    by_name = {c.name: c for c in checks}
    overall = all(by_name[n].passed for n in (
        "divergence_free", "slip_u_dot_n", "slip_omega_cross_n",
        "persistency_failure_theta", "persistency_failure_phi",
        "oracle_agreement_curl"))
    return VerificationReport(
        family_label=field.label,
        admissibility=adm,
        checks=checks,
        overall_pass=overall,
        grid_echo={"interior": interior_grid.to_dict(), "boundary": boundary_grid.to_dict()},
        oracle_echo={"step": cfg.step, "richardson": cfg.richardson, "seed": seed},
        timestamp=datetime.now(timezone.utc).isoformat(),
    )
