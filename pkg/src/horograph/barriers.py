"""Analytic barrier constructions backing every a priori estimate check.

Three families live here:

* the logarithmic collar barrier psi(d) pinned to a supporting line, with the
  constructive choice of its steepness and collar width;
* the logarithmic oscillation barriers used for the modulus of continuity;
* the Gaussian-ramp substitution behind the global gradient bound, with the
  explicit constant it yields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import HypothesisViolated, InvalidParams
from .geometry import SQRT_HALF_PI, GeometricQuantities


@dataclass(frozen=True)
class PhiBounds:
    """Sup norms of the boundary-data extension feeding the barrier constants."""

    sup: float        # max of the extension over the closed domain
    grad_sup: float   # max |D phi|
    hess_sup: float   # max |D^2 phi|

    def __post_init__(self):
        if self.grad_sup < 0 or self.hess_sup < 0:
            raise InvalidParams("derivative bounds cannot be negative")


@dataclass(frozen=True)
class BarrierParams:
    """Constants of the collar barrier psi(d) = ln(1 + k d / width) / rate.

    ``height`` is the value psi must climb to across the collar (the barrier
    radius plus the extension sup); k = exp(rate * height) - 1 so that
    psi(width) = height and psi' >= 1 on [0, width].
    """

    rate: float
    collar_width: float
    height: float
    hess_coeff: float      # multiplies the |D^2 phi| load in the rate
    reaction_coeff: float  # multiplies the zeroth-order load in the rate

    def __post_init__(self):
        if self.rate <= 0 or self.collar_width <= 0 or self.height <= 0:
            raise InvalidParams("barrier constants must be positive")

    @property
    def gain(self) -> float:
        """The slope factor k/width = rate * exp(rate * height)."""
        a = self.rate * self.height
        if a > 700.0:  # expm1 would overflow; the barrier is effectively a wall
            return math.inf
        return math.expm1(a) / self.collar_width

    def with_collar_width(self, width: float) -> "BarrierParams":
        """Shrink the collar; the slope condition only gets easier."""
        if not 0.0 < width <= self.collar_width:
            raise InvalidParams("can only shrink the collar width")
        return BarrierParams(self.rate, width, self.height,
                             self.hess_coeff, self.reaction_coeff)


def build_barrier_params(q: GeometricQuantities, phi: PhiBounds, n: int = 2,
                         boundary_min: float | None = None,
                         interior_max: float | None = None) -> BarrierParams:
    """Constructive barrier constants for a (domain, data, extension) triple.

    The rate is the smallest admissible value assembled from the ellipticity
    bounds; the collar width is the value making the slope condition an
    equality, which pins psi(collar_width) = height exactly.  ``interior_max``
    defaults to the barrier radius (the known interior bound on the length);
    ``boundary_min`` defaults to the data minimum.
    """
    if n < 2:
        raise InvalidParams("ambient dimension must be >= 2")
    g_min = q.f_min if boundary_min is None else boundary_min
    g_max = q.barrier_radius if interior_max is None else interior_max
    radius = q.barrier_radius
    if g_min <= 0 or g_max <= 0 or radius <= 0:
        raise InvalidParams("length bounds must be positive")
    r_sq = radius * radius
    hess_coeff = (2.0 + r_sq * (n - 1)
                  + 2.0 * (max(1.0, r_sq) * (n - 2) + 1.0) * (phi.grad_sup ** 2 + 1.0)
                  ) / min(1.0, g_min * g_min)
    reaction_coeff = (3.0 + 2.0 * phi.grad_sup ** 2) / min(1.0, g_min)
    zeroth_load = max((n - 1) * g_max, (n - 2) / g_min)
    rate = phi.hess_sup * hess_coeff + zeroth_load * reaction_coeff
    if rate <= 0.0:
        raise InvalidParams("assembled rate is not positive")
    height = radius + phi.sup
    if height <= 0.0:
        raise InvalidParams("barrier height must be positive")
    width = -math.expm1(-height * rate) / rate
    return BarrierParams(rate=rate, collar_width=width, height=height,
                         hess_coeff=hess_coeff, reaction_coeff=reaction_coeff)


def collar_barrier(params: BarrierParams, d) -> float:
    """psi(d): 0 at the wall, ``height`` at the collar's outer edge."""
    if d < 0:
        raise InvalidParams("distance must be nonnegative")
    if d == 0.0:
        return 0.0
    a = params.rate * params.height
    if a > 700.0:
        # ln(1 + (e^a - 1) d / width) evaluated in log space
        return (a + math.log(d / params.collar_width)) / params.rate
    return math.log1p(params.gain * d) / params.rate


def collar_barrier_slope(params: BarrierParams, d) -> float:
    """psi'(d) >= 1 on [0, collar_width] by construction."""
    if d < 0:
        raise InvalidParams("distance must be nonnegative")
    k = params.gain
    if math.isinf(k):
        return math.inf if d == 0.0 else 1.0 / (params.rate * d)
    return k / (params.rate * (1.0 + k * d))


def oscillation_barrier(f_at_p: float, eps_target: float, delta0: float,
                        radius: float, q_minus_p_sq: float, sign: int) -> float:
    """Logarithmic oscillation barrier pinned to a boundary point.

    Returns f(p) +/- eps/3 +/- radius * ln(1 + |q-p|^2) / ln(1 + delta0^2).
    """
    if eps_target <= 0 or delta0 <= 0 or radius <= 0:
        raise InvalidParams("eps_target, delta0 and radius must be positive")
    if q_minus_p_sq < 0:
        raise InvalidParams("squared distance cannot be negative")
    if sign not in (1, -1):
        raise InvalidParams("sign must be +1 or -1")
    bump = eps_target / 3.0 + radius * math.log1p(q_minus_p_sq) / math.log1p(delta0 ** 2)
    return f_at_p + sign * bump


def modulus_delta(eps_target: float, delta0: float, radius: float,
                  upper: BarrierParams, lower: BarrierParams) -> dict:
    """Radius within which the barrier construction controls |g(q) - f(p)|.

    Takes the minimum of: the data's own modulus radius, both collar widths,
    the radius keeping the oscillation bump below eps/3, and the radii keeping
    each collar barrier below eps/3.
    """
    if eps_target <= 0 or delta0 <= 0 or radius <= 0:
        raise InvalidParams("eps_target, delta0 and radius must be positive")
    osc_radius = math.sqrt(math.expm1(eps_target / (3.0 * radius)
                                      * math.log1p(delta0 ** 2)))

    def barrier_reach(params: BarrierParams) -> float:
        # largest d with psi(d) < eps/3; collapses to 0 for wall-like barriers
        if math.isinf(params.gain):
            return 0.0
        a = params.rate * eps_target / 3.0
        return math.inf if a > 700.0 else math.expm1(a) / params.gain

    components = {
        "data_modulus": delta0,
        "upper_collar": upper.collar_width,
        "lower_collar": lower.collar_width,
        "oscillation_bump": osc_radius,
        "upper_barrier": barrier_reach(upper),
        "lower_barrier": barrier_reach(lower),
    }
    components["delta"] = min(components.values())
    return components


# ---------------------------------------------------------------------------
# global gradient bound via the Gaussian ramp substitution
# ---------------------------------------------------------------------------

def gaussian_ramp(u: float, gamma: float, base: float) -> float:
    """base + integral_0^u exp(-gamma s^2) ds."""
    return base + math.sqrt(math.pi / (4.0 * gamma)) * math.erf(math.sqrt(gamma) * u)


def gaussian_ramp_slope(u: float, gamma: float) -> float:
    return math.exp(-gamma * u * u)


def gaussian_ramp_curvature(u: float, gamma: float) -> float:
    return -2.0 * gamma * u * math.exp(-gamma * u * u)


def gaussian_ramp_jerk(u: float, gamma: float) -> float:
    return (4.0 * gamma * gamma * u * u - 2.0 * gamma) * math.exp(-gamma * u * u)


@dataclass(frozen=True)
class GlobalGradientBound:
    """Explicit gradient bound from (g_min, g_max, boundary slope) alone."""

    gamma: float               # Gaussian decay rate of the ramp
    u_cap: float               # ramp argument covering [g_min, g_max], +10%
    interior_candidate: float
    boundary_candidate: float
    bound: float               # max of the two candidates; bounds max |Dg|
    rescaled: bool = False
    scale: float = 1.0         # homothety factor applied when g_min > 1

    def to_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "u_cap": self.u_cap,
            "interior_candidate": self.interior_candidate,
            "boundary_candidate": self.boundary_candidate,
            "bound": self.bound,
            "rescaled": self.rescaled,
            "scale": self.scale,
        }


def check_gradient_hypothesis(g_min: float, g_max: float) -> None:
    if not 0.0 < g_min <= g_max:
        raise InvalidParams("need 0 < g_min <= g_max")
    if not g_max < g_min * (1.0 + SQRT_HALF_PI):
        raise HypothesisViolated(
            f"g_max = {g_max} >= {g_min * (1.0 + SQRT_HALF_PI)} = g_min (1 + sqrt(pi/2))")


def _direct_bound(g_min: float, g_max: float, boundary_grad: float) -> GlobalGradientBound:
    # midpoint of the admissible interval for 1/sqrt(2 gamma): deterministic
    lo = math.sqrt(2.0 / math.pi) * (g_max - g_min)
    hi = g_min
    mid = 0.5 * (lo + hi)
    gamma = 1.0 / (2.0 * mid * mid)

    target = g_max - g_min
    if target <= 0.0:
        root = 0.0
    else:
        def ramp_gap(u):
            return gaussian_ramp(u, gamma, 0.0) - target

        hi_u = 1.0
        while ramp_gap(hi_u) <= 0.0:
            hi_u *= 2.0
        root = brentq(ramp_gap, 0.0, hi_u, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    u_cap = 1.1 * root  # strict-inequality margin for the ramp coverage

    growth = math.exp(2.0 * gamma * u_cap + 2.0 * gamma * u_cap * u_cap)
    load = 1.0 + ((gamma + 2.0 * gamma * u_cap) * g_max
                  + (2.0 * gamma + 4.0 * gamma * u_cap) * (3.0 * g_max + g_max ** 3)
                  ) * growth
    denom = 2.0 * gamma * min(g_min, 1.0) ** 2 - 1.0
    if denom <= 0.0:
        raise InvalidParams("ramp rate too shallow: interior bound degenerates")
    interior = math.sqrt(4.0 * load / denom)
    boundary = boundary_grad * math.exp(gamma * u_cap + gamma * u_cap * u_cap)
    return GlobalGradientBound(gamma=gamma, u_cap=u_cap,
                               interior_candidate=interior,
                               boundary_candidate=boundary,
                               bound=max(interior, boundary))


def global_gradient_bound(g_min: float, g_max: float,
                          boundary_grad: float) -> GlobalGradientBound:
    """Gradient bound for a positive solution pinched between g_min and g_max.

    Requires the strict pinching g_max < g_min (1 + sqrt(pi/2)); raises
    HypothesisViolated otherwise.  ``boundary_grad`` bounds |Dg| on the
    boundary.  When g_min > 1 the problem is rescaled by lam = 1/(2 g_min)
    (putting the rescaled minimum at 1/2) and the bound mapped back by 1/lam.
    """
    check_gradient_hypothesis(g_min, g_max)
    if boundary_grad < 0:
        raise InvalidParams("boundary gradient bound cannot be negative")
    if g_min <= 1.0:
        return _direct_bound(g_min, g_max, boundary_grad)
    lam = 1.0 / (2.0 * g_min)
    inner = _direct_bound(lam * g_min, lam * g_max, boundary_grad)
    return GlobalGradientBound(gamma=inner.gamma, u_cap=inner.u_cap,
                               interior_candidate=inner.interior_candidate / lam,
                               boundary_candidate=inner.boundary_candidate / lam,
                               bound=inner.bound / lam,
                               rescaled=True, scale=lam)
