"""Verification engine: check each a priori bound against a sampled field.

Each check is a pure function from (field, constants) to a report fragment;
fragments carry the observed numbers so every pass/fail flag is recomputable.
Verification failure is data, not an exception.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field as dc_field

import numpy as np

from .barriers import (BarrierParams, PhiBounds, build_barrier_params,
                       collar_barrier_slope, global_gradient_bound,
                       modulus_delta)
from .errors import CollarEmptyWarning, HypothesisViolated
from .fields import ScalarField
from .geometry import BoundaryData, GeometricQuantities, compute_quantities


@dataclass(frozen=True)
class LengthBoundReport:
    f_min: float
    barrier_radius: float
    observed_min: float
    observed_max: float
    passed: bool

    def to_dict(self) -> dict:
        return {"f_min": self.f_min, "barrier_radius": self.barrier_radius,
                "observed_min": self.observed_min, "observed_max": self.observed_max,
                "pass": self.passed}


def check_length_bounds(field: ScalarField, q: GeometricQuantities) -> LengthBoundReport:
    """Strict pinching f_min < g < barrier radius at every interior node."""
    obs_min = field.interior_min()
    obs_max = field.interior_max()
    margin = 1e-12 * max(1.0, q.f_min)
    passed = (obs_min > q.f_min + margin) and (obs_max < q.barrier_radius)
    return LengthBoundReport(f_min=q.f_min, barrier_radius=q.barrier_radius,
                             observed_min=obs_min, observed_max=obs_max,
                             passed=passed)


@dataclass(frozen=True)
class BarrierCheck:
    name: str
    region: str
    sign_expected: str
    sign_observed: str
    worst_value: float
    nodes: int
    passed: bool

    def to_dict(self) -> dict:
        return {"name": self.name, "region": self.region,
                "sign_expected": self.sign_expected,
                "sign_observed": self.sign_observed,
                "worst_value": self.worst_value, "nodes": self.nodes,
                "pass": self.passed}


@dataclass(frozen=True)
class BoundaryGradientReport:
    c_assembled: float          # psi'(0) (1 + max |D phi|), "assembled per proof"
    c_label: str
    observed_max_boundary_grad: float
    collar_width: float
    collar_shrunk: bool
    barrier_checks: tuple[BarrierCheck, ...]
    passed: bool

    def to_dict(self) -> dict:
        return {"c_assembled": self.c_assembled, "c_label": self.c_label,
                "observed_max_boundary_grad": self.observed_max_boundary_grad,
                "collar_width": self.collar_width,
                "collar_shrunk": self.collar_shrunk,
                "barrier_checks": [b.to_dict() for b in self.barrier_checks],
                "pass": self.passed}


def _modified_operator(g, wx, wt, wxx, wtt, wxt, eps):
    # same structure as the n = 2 equation, coefficients frozen at the field's g
    return (wxx * (g * g + wt * wt + eps) + wtt * (1.0 + wx * wx)
            - 2.0 * wx * wt * wxt + g * (1.0 + wx * wx))


def check_boundary_gradient(field: ScalarField, params: BarrierParams,
                            phi: ScalarField | None = None,
                            eps: float = 0.0) -> BoundaryGradientReport:
    """Boundary gradient check plus numeric certification of the collar barriers.

    Evaluates the modified (frozen-coefficient) operator at extension +/-
    collar barrier over the collar nodes and asserts the supersolution /
    subsolution signs.  The comparison constant is the assembled candidate
    psi'(0) (1 + max |D phi|), labelled as such.
    """
    domain = field.domain
    if phi is None:
        from .solver import euclidean_minimal_solve
        phi = euclidean_minimal_solve(domain, field.boundary).field

    width = params.collar_width
    shrunk = False
    if width >= domain.inradius:
        warnings.warn(
            f"collar width {width:.3g} exceeds the inradius {domain.inradius:.3g}; shrinking",
            CollarEmptyWarning, stacklevel=2)
        width = 0.9 * domain.inradius
        shrunk = True

    phi_gx, phi_gt = phi.gradient()
    phi_xx, phi_tt, phi_xt = phi.second_derivatives()
    grad_phi_max = phi.max_gradient()

    c_assembled = collar_barrier_slope(params, 0.0) * (1.0 + grad_phi_max)
    observed = field.max_boundary_gradient()

    # collar nodes: interior nodes with full second-derivative stencils
    ii, jj = np.nonzero(domain.interior_mask & ~np.isnan(phi_xx))
    xs = domain.xs[ii]
    ts = domain.ts[jj]
    upper_vals = []
    lower_vals = []
    for i, j, x, t in zip(ii, jj, xs, ts):
        d, (nx, nt) = domain.support_direction(float(x), float(t))
        if d >= width:
            continue
        slope = collar_barrier_slope(params, d)
        curv = -params.rate * slope * slope   # psi'' = -rate psi'^2
        vx, vt = slope * nx, slope * nt
        vxx, vtt, vxt = curv * nx * nx, curv * nt * nt, curv * nx * nt
        g = field.values[i, j]
        up = _modified_operator(g, phi_gx[i, j] + vx, phi_gt[i, j] + vt,
                                phi_xx[i, j] + vxx, phi_tt[i, j] + vtt,
                                phi_xt[i, j] + vxt, eps)
        lo = _modified_operator(g, phi_gx[i, j] - vx, phi_gt[i, j] - vt,
                                phi_xx[i, j] - vxx, phi_tt[i, j] - vtt,
                                phi_xt[i, j] - vxt, eps)
        upper_vals.append(up)
        lower_vals.append(lo)

    def _sign_label(vals, expected):
        if not vals:
            return "none", 0.0, True
        arr = np.asarray(vals)
        if expected == "negative":
            ok = bool(np.all(arr < 0.0))
            return ("negative" if ok else "mixed"), float(arr.max()), ok
        ok = bool(np.all(arr > 0.0))
        return ("positive" if ok else "mixed"), float(arr.min()), ok

    region = f"collar d < {width:.6g}"
    up_sign, up_worst, up_ok = _sign_label(upper_vals, "negative")
    lo_sign, lo_worst, lo_ok = _sign_label(lower_vals, "positive")
    checks = (
        BarrierCheck("upper_collar_barrier", region, "negative", up_sign,
                     up_worst, len(upper_vals), up_ok),
        BarrierCheck("lower_collar_barrier", region, "positive", lo_sign,
                     lo_worst, len(lower_vals), lo_ok),
    )
    passed = bool(observed <= c_assembled) and up_ok and lo_ok
    return BoundaryGradientReport(c_assembled=c_assembled,
                                  c_label="assembled per proof",
                                  observed_max_boundary_grad=observed,
                                  collar_width=width, collar_shrunk=shrunk,
                                  barrier_checks=checks, passed=passed)


@dataclass(frozen=True)
class ModulusReport:
    eps_target: float
    delta0: float
    delta: float           # radius from the barrier construction
    delta_used: float      # radius the counter actually used
    violations: int
    components: dict
    passed: bool

    def to_dict(self) -> dict:
        return {"eps_target": self.eps_target, "delta0": self.delta0,
                "delta": self.delta, "delta_used": self.delta_used,
                "violations": self.violations, "components": self.components,
                "pass": self.passed}


def boundary_modulus_delta0(domain, f: BoundaryData, eps_target: float) -> float:
    """Largest radius keeping the data's oscillation below eps/3.

    Computed from boundary node pairs: the smallest distance between nodes
    whose values differ by at least eps/3 (the domain diameter if none do).
    """
    nodes = sorted(f.values)
    coords = np.array([domain.node_xy(*n) for n in nodes])
    vals = np.array([f.values[n] for n in nodes])
    diam = math.hypot(domain.x_max - domain.x_min, domain.t_max - domain.t_min)
    dv = np.abs(vals[:, None] - vals[None, :])
    viol = dv >= eps_target / 3.0
    if not viol.any():
        return diam
    dist = np.hypot(coords[:, None, 0] - coords[None, :, 0],
                    coords[:, None, 1] - coords[None, :, 1])
    return float(np.min(dist[viol]))


def count_modulus_violations(field: ScalarField, f: BoundaryData,
                             delta: float, eps_target: float) -> int:
    """Pairs (q interior, p boundary) with |q-p| < delta and |g(q)-f(p)| >= eps."""
    if delta <= 0.0:
        return 0
    domain = field.domain
    ii, jj = np.nonzero(domain.interior_mask)
    near = domain.support_distance(domain.xs[ii], domain.ts[jj]) < delta
    ii, jj = ii[near], jj[near]
    if ii.size == 0:
        return 0
    qx, qt = domain.xs[ii], domain.ts[jj]
    gq = field.values[ii, jj]
    violations = 0
    for node, fp in f.values.items():
        px, pt = domain.node_xy(*node)
        close = np.hypot(qx - px, qt - pt) < delta
        violations += int(np.sum(np.abs(gq[close] - fp) >= eps_target))
    return violations


def check_modulus(field: ScalarField, f: BoundaryData, eps_target: float,
                  delta0: float | None = None,
                  delta: float | None = None) -> ModulusReport:
    """Modulus-of-continuity check with the constructed radius.

    The constructed radius is honest and therefore tiny (it inherits the
    exponential barrier constants); ``delta`` overrides it for sanity tests.
    """
    domain = field.domain
    q = compute_quantities(domain, f)
    radius = q.barrier_radius
    if delta0 is None:
        delta0 = boundary_modulus_delta0(domain, f, eps_target)
    log_den = math.log1p(delta0 ** 2)
    grad_sup = radius / log_den
    hess_sup = 2.0 * radius / log_den
    diam = math.hypot(domain.x_max - domain.x_min, domain.t_max - domain.t_min)
    lower_reach = q.f_min - eps_target / 3.0 - radius * math.log1p(diam ** 2) / log_den
    upper_params = build_barrier_params(
        q, PhiBounds(sup=0.0, grad_sup=grad_sup, hess_sup=hess_sup))
    lower_params = build_barrier_params(
        q, PhiBounds(sup=max(abs(lower_reach), q.f_max),
                     grad_sup=grad_sup, hess_sup=hess_sup))
    components = modulus_delta(eps_target, delta0, radius, upper_params, lower_params)
    constructed = components["delta"]
    used = constructed if delta is None else delta
    violations = count_modulus_violations(field, f, used, eps_target)
    return ModulusReport(eps_target=eps_target, delta0=delta0, delta=constructed,
                         delta_used=used, violations=violations,
                         components=components, passed=violations == 0)


@dataclass(frozen=True)
class GlobalGradientReport:
    g_min: float
    g_max: float
    boundary_grad: float
    hypothesis_ok: bool
    bounds_consistent: bool
    bound: float
    observed_max_grad: float
    detail: dict = dc_field(default_factory=dict)
    passed: bool = False

    def to_dict(self) -> dict:
        return {"g_min": self.g_min, "g_max": self.g_max,
                "boundary_grad": self.boundary_grad,
                "hypothesis_ok": self.hypothesis_ok,
                "bounds_consistent": self.bounds_consistent,
                "bound": self.bound, "observed_max_grad": self.observed_max_grad,
                "detail": self.detail, "pass": self.passed}


def check_global_gradient(field: ScalarField, g_min: float, g_max: float,
                          boundary_grad: float) -> GlobalGradientReport:
    """Global gradient check; skipped (reported) when the pinching fails."""
    slack = 1e-9 * max(1.0, g_max)
    consistent = (g_min <= field.interior_min() + slack
                  and g_max >= float(np.max(field.in_values)) - slack
                  and boundary_grad >= field.max_boundary_gradient() - slack)
    observed = field.max_gradient()
    try:
        ggb = global_gradient_bound(g_min, g_max, boundary_grad)
    except HypothesisViolated:
        return GlobalGradientReport(g_min=g_min, g_max=g_max,
                                    boundary_grad=boundary_grad,
                                    hypothesis_ok=False,
                                    bounds_consistent=consistent,
                                    bound=math.nan, observed_max_grad=observed,
                                    detail={}, passed=False)
    return GlobalGradientReport(g_min=g_min, g_max=g_max,
                                boundary_grad=boundary_grad, hypothesis_ok=True,
                                bounds_consistent=consistent, bound=ggb.bound,
                                observed_max_grad=observed, detail=ggb.to_dict(),
                                passed=bool(consistent and observed <= ggb.bound))


@dataclass(frozen=True)
class EstimateReport:
    length: LengthBoundReport
    boundary_gradient: BoundaryGradientReport
    modulus: ModulusReport
    global_gradient: GlobalGradientReport

    @property
    def passed(self) -> bool:
        checks = [self.length.passed, self.boundary_gradient.passed,
                  self.modulus.passed]
        if self.global_gradient.hypothesis_ok:
            checks.append(self.global_gradient.passed)
        return all(checks)

    def to_dict(self) -> dict:
        return {"length_bound": self.length.to_dict(),
                "boundary_gradient": self.boundary_gradient.to_dict(),
                "modulus": self.modulus.to_dict(),
                "global_gradient": self.global_gradient.to_dict(),
                "pass": self.passed}


def run_estimates(field: ScalarField, f: BoundaryData, eps: float = 0.0,
                  eps_target: float | None = None) -> EstimateReport:
    """Run every estimate check on a field with defaults assembled in place."""
    from .solver import euclidean_minimal_solve

    domain = field.domain
    q = compute_quantities(domain, f)
    if eps_target is None:
        eps_target = max(0.3 * q.f_osc, 0.1 * q.f_min)
    extension = euclidean_minimal_solve(domain, f)
    phi_bounds = PhiBounds(sup=q.f_max,  # maximum principle bound on the extension
                           grad_sup=extension.grad_sup,
                           hess_sup=extension.hess_sup)
    params = build_barrier_params(q, phi_bounds)
    length = check_length_bounds(field, q)
    boundary = check_boundary_gradient(field, params, phi=extension.field, eps=eps)
    modulus = check_modulus(field, f, eps_target)
    global_grad = check_global_gradient(field, q.f_min, q.barrier_radius,
                                        field.max_boundary_gradient())
    return EstimateReport(length=length, boundary_gradient=boundary,
                          modulus=modulus, global_gradient=global_grad)
