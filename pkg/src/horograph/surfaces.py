"""Closed-form model surfaces: exact solutions, subsolutions, supersolutions.

Each oracle knows its value, exact derivatives, validity region, declared
classification as a function of eps, and its image under the x-homothety
isometry (hyperbolic rescaling).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import OutsideValidity
from .kernels import PointState, residual

CLI_NAMES = ("geodesic-plane", "horocylinder", "euclidean-plane", "x-sinh-t")


def _as_point(point) -> np.ndarray:
    pt = np.asarray(point, dtype=float)
    if pt.ndim != 1 or pt.size < 2:
        raise ValueError("point must be a flat (x_1, ..., x_{n-1}, t) tuple")
    return pt


@dataclass(frozen=True)
class OracleSurface:
    """Common protocol: value/derivatives, validity, classification, rescale."""

    def value(self, point) -> float:
        raise NotImplementedError

    def gradient(self, point) -> np.ndarray:
        raise NotImplementedError

    def hessian(self, point) -> np.ndarray:
        raise NotImplementedError

    def in_validity(self, point) -> bool:
        raise NotImplementedError

    def classification(self, eps: float) -> str:
        raise NotImplementedError

    def hyperbolic_rescale(self, lam: float) -> "OracleSurface":
        raise NotImplementedError

    def trace(self, x: float, t: float) -> float:
        """Boundary-trace convenience for n = 2 grids."""
        return self.value((x, t))


@dataclass(frozen=True)
class GeodesicPlane(OracleSurface):
    """g = sqrt(radius^2 - |x - center|^2): totally geodesic vertical plane.

    An exact solution at eps = 0 and a strict supersolution for eps > 0.
    """

    radius: float
    center: tuple[float, ...] = (0.0,)

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        c = self.center if isinstance(self.center, tuple) else (float(self.center),)
        object.__setattr__(self, "center", tuple(float(v) for v in np.atleast_1d(c)))

    def _offset(self, point) -> np.ndarray:
        pt = _as_point(point)
        if pt.size - 1 != len(self.center):
            raise ValueError("point dimension does not match the plane's center")
        return pt[:-1] - np.asarray(self.center)

    def in_validity(self, point) -> bool:
        d = self._offset(point)
        return float(d @ d) < self.radius ** 2

    def value(self, point) -> float:
        d = self._offset(point)
        rad_sq = self.radius ** 2 - float(d @ d)
        if rad_sq <= 0.0:
            raise OutsideValidity("point is outside the plane's disk of positivity")
        return math.sqrt(rad_sq)

    def gradient(self, point) -> np.ndarray:
        g = self.value(point)
        d = self._offset(point)
        out = np.zeros(d.size + 1)
        out[:-1] = -d / g
        return out

    def hessian(self, point) -> np.ndarray:
        g = self.value(point)
        d = self._offset(point)
        m = d.size + 1
        h = np.zeros((m, m))
        h[:-1, :-1] = -(np.eye(d.size) / g + np.outer(d, d) / g ** 3)
        return h

    def classification(self, eps: float) -> str:
        return "solution" if eps == 0.0 else "supersolution"

    def hyperbolic_rescale(self, lam: float) -> "GeodesicPlane":
        return GeodesicPlane(radius=lam * self.radius,
                             center=tuple(lam * c for c in self.center))


@dataclass(frozen=True)
class Horocylinder(OracleSurface):
    """g = height > 0: constant horizontal length, a strict subsolution."""

    height: float

    def __post_init__(self):
        if self.height <= 0:
            raise ValueError("height must be positive")

    def in_validity(self, point) -> bool:
        _as_point(point)
        return True

    def value(self, point) -> float:
        _as_point(point)
        return self.height

    def gradient(self, point) -> np.ndarray:
        return np.zeros(_as_point(point).size)

    def hessian(self, point) -> np.ndarray:
        m = _as_point(point).size
        return np.zeros((m, m))

    def classification(self, eps: float) -> str:
        return "subsolution"

    def hyperbolic_rescale(self, lam: float) -> "Horocylinder":
        return Horocylinder(height=lam * self.height)


@dataclass(frozen=True)
class EuclideanPlane(OracleSurface):
    """g = a . x + b t + c on its positivity region, a subsolution."""

    x_slopes: tuple[float, ...]
    t_slope: float
    offset: float

    def __post_init__(self):
        sl = self.x_slopes if isinstance(self.x_slopes, tuple) else (float(self.x_slopes),)
        object.__setattr__(self, "x_slopes", tuple(float(v) for v in np.atleast_1d(sl)))

    def value(self, point) -> float:
        pt = _as_point(point)
        if pt.size - 1 != len(self.x_slopes):
            raise ValueError("point dimension does not match the plane's slopes")
        g = float(np.asarray(self.x_slopes) @ pt[:-1] + self.t_slope * pt[-1] + self.offset)
        if g <= 0.0:
            raise OutsideValidity("plane is not positive at this point")
        return g

    def in_validity(self, point) -> bool:
        pt = _as_point(point)
        return float(np.asarray(self.x_slopes) @ pt[:-1]
                     + self.t_slope * pt[-1] + self.offset) > 0.0

    def gradient(self, point) -> np.ndarray:
        self.value(point)
        return np.append(np.asarray(self.x_slopes), self.t_slope)

    def hessian(self, point) -> np.ndarray:
        m = _as_point(point).size
        return np.zeros((m, m))

    def classification(self, eps: float) -> str:
        return "subsolution"

    def hyperbolic_rescale(self, lam: float) -> "EuclideanPlane":
        # lam * (a . x/lam + b t + c) = a . x + lam b t + lam c
        return EuclideanPlane(x_slopes=self.x_slopes,
                              t_slope=lam * self.t_slope,
                              offset=lam * self.offset)


@dataclass(frozen=True)
class XSinhT(OracleSurface):
    """g = x sinh t (n = 2): an exact solution for every eps (g_xx = 0)."""

    def in_validity(self, point) -> bool:
        pt = _as_point(point)
        if pt.size != 2:
            raise ValueError("x sinh t is a two-variable surface")
        return pt[0] * math.sinh(pt[1]) > 0.0

    def value(self, point) -> float:
        pt = _as_point(point)
        if pt.size != 2:
            raise ValueError("x sinh t is a two-variable surface")
        g = pt[0] * math.sinh(pt[1])
        if g <= 0.0:
            raise OutsideValidity("x sinh t is not positive at this point")
        return float(g)

    def gradient(self, point) -> np.ndarray:
        self.value(point)
        x, t = _as_point(point)
        return np.array([math.sinh(t), x * math.cosh(t)])

    def hessian(self, point) -> np.ndarray:
        self.value(point)
        x, t = _as_point(point)
        ch = math.cosh(t)
        return np.array([[0.0, ch], [ch, x * math.sinh(t)]])

    def classification(self, eps: float) -> str:
        return "solution"

    def hyperbolic_rescale(self, lam: float) -> "XSinhT":
        # lam * (x/lam) sinh t = x sinh t: a fixed point of the scaling
        return XSinhT()


def evaluate(oracle: OracleSurface, point, derivatives_up_to: int = 2,
             eps: float = 0.0) -> PointState:
    """Exact point state of an oracle; orders above the request are zeroed."""
    if derivatives_up_to not in (0, 1, 2):
        raise ValueError("derivatives_up_to must be 0, 1 or 2")
    pt = _as_point(point)
    n = pt.size
    g = oracle.value(point)
    grad = oracle.gradient(point) if derivatives_up_to >= 1 else np.zeros(n)
    hess = oracle.hessian(point) if derivatives_up_to == 2 else np.zeros((n, n))
    return PointState(n=n, g=g, grad=grad, hess=hess, eps=eps)


def classify_numerically(oracle: OracleSurface, sample_points, eps: float,
                         tol: float = 1e-10) -> str:
    """Classify by the residual sign over samples; must match the declaration."""
    res = np.array([residual(evaluate(oracle, pt, 2, eps)) for pt in sample_points])
    if res.size == 0:
        raise ValueError("need at least one sample point")
    if np.all(np.abs(res) <= tol):
        return "solution"
    if np.all(res >= -tol):
        return "subsolution"
    if np.all(res <= tol):
        return "supersolution"
    raise ValueError("samples show both strict signs; no single classification")


def hyperbolic_rescale(obj, lam: float):
    """Image under the x-homothety: g -> lam g(x/lam, t), eps -> eps lam^2.

    Works on oracles, point states and any object exposing its own
    ``hyperbolic_rescale``; zero residual is preserved exactly.
    """
    if lam <= 0.0:
        raise ValueError("rescaling factor must be positive")
    if isinstance(obj, PointState):
        n = obj.n
        grad = obj.grad.copy()
        grad[-1] *= lam
        hess = obj.hess.copy()
        hess[:-1, :-1] /= lam
        hess[-1, -1] *= lam
        # mixed x-t entries are unchanged
        return PointState(n=n, g=lam * obj.g, grad=grad, hess=hess,
                          eps=obj.eps * lam * lam)
    if hasattr(obj, "hyperbolic_rescale"):
        return obj.hyperbolic_rescale(lam)
    raise TypeError(f"cannot rescale object of type {type(obj).__name__}")


def oracle_from_name(name: str, params: dict | None = None) -> OracleSurface:
    """Build an oracle from its CLI name and numeric parameters."""
    params = dict(params or {})
    if name == "geodesic-plane":
        return GeodesicPlane(radius=float(params.get("radius", 2.0)),
                             center=tuple(np.atleast_1d(params.get("center", 0.0)).astype(float)))
    if name == "horocylinder":
        return Horocylinder(height=float(params.get("height", 1.0)))
    if name == "euclidean-plane":
        return EuclideanPlane(
            x_slopes=tuple(np.atleast_1d(params.get("x_slope", 0.0)).astype(float)),
            t_slope=float(params.get("t_slope", 0.0)),
            offset=float(params.get("offset", 1.0)))
    if name == "x-sinh-t":
        return XSinhT()
    raise ValueError(f"unknown oracle {name!r}; pick one of {CLI_NAMES}")
