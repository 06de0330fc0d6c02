"""Pointwise kernels of the eps-regularized horizontal minimal operator.

Everything here is a pure function of the point data (g, Dg, D^2g, eps): the
quasilinear residual, its coefficient matrix with ellipticity bounds, the
fundamental forms / unit normal / mean curvature of the graph, and the
closed-form partial derivatives the n = 2 Newton solver needs.  Array-valued
inputs broadcast, so the grid assembler can reuse the same kernels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveLength


def homotopy_weight(s: float) -> float:
    """Continuation weight on the zeroth-order block: 0 below 1/2, then 2s-1."""
    if not 0.0 <= s <= 1.0:
        raise ValueError("homotopy parameter s must lie in [0, 1]")
    return max(0.0, 2.0 * s - 1.0)


@dataclass(frozen=True)
class PointState:
    """Point data (g, Dg, D^2g, eps) for the ambient dimension n >= 2.

    ``grad`` is ordered (g_{x_1}, ..., g_{x_{n-1}}, g_t) and ``hess`` is the
    symmetric matrix of second derivatives in the same ordering.
    """

    n: int
    g: float
    grad: np.ndarray
    hess: np.ndarray
    eps: float = 0.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("ambient dimension must be >= 2")
        if not self.g > 0.0:
            raise NonPositiveLength(f"g = {self.g} is not > 0")
        if not 0.0 <= self.eps <= 1.0:
            raise ValueError("eps must lie in [0, 1]")
        grad = np.asarray(self.grad, dtype=float)
        hess = np.asarray(self.hess, dtype=float)
        if grad.shape != (self.n,):
            raise ValueError(f"grad must have shape ({self.n},)")
        if hess.shape != (self.n, self.n):
            raise ValueError(f"hess must have shape ({self.n}, {self.n})")
        if not np.allclose(hess, hess.T, atol=1e-12 * (1.0 + np.abs(hess).max())):
            raise ValueError("hess must be symmetric")
        object.__setattr__(self, "grad", grad)
        object.__setattr__(self, "hess", 0.5 * (hess + hess.T))

    @property
    def grad_x(self) -> np.ndarray:
        return self.grad[:-1]

    @property
    def grad_t(self) -> float:
        return float(self.grad[-1])


def area_factor(g, grad_x_sq, grad_t):
    """g^2 (1 + |D_x g|^2) + g_t^2, the squared area scaling of the graph."""
    return g * g * (1.0 + grad_x_sq) + grad_t * grad_t


# ---------------------------------------------------------------------------
# residual
# ---------------------------------------------------------------------------

def residual_terms_n2(g, gx, gt, gxx, gtt, gxt, eps, weight=1.0):
    """n = 2 residual, broadcastable: the solver-grade specialized form."""
    return (gxx * (g * g + gt * gt + eps)
            + gtt * (1.0 + gx * gx)
            - 2.0 * gx * gt * gxt
            + weight * g * (1.0 + gx * gx))


def _residual_general(p: PointState, weight: float) -> float:
    n, g, eps = p.n, p.g, p.eps
    gx = p.grad_x
    gt = p.grad_t
    hx = p.hess[:-1, :-1]
    sq = float(gx @ gx)
    acc = 0.0
    for k in range(n - 1):
        acc += (g * g * (1.0 + sq - gx[k] ** 2) + gt * gt + eps / (n - 1)) * hx[k, k]
    acc += (1.0 + sq) * p.hess[-1, -1]
    for k in range(n - 1):
        acc -= 2.0 * gx[k] * gt * p.hess[k, -1]
    for j in range(n - 1):
        for k in range(j + 1, n - 1):
            acc -= 2.0 * g * g * gx[j] * gx[k] * hx[j, k]
    acc += weight * ((n - 1) * g * (1.0 + sq) + (n - 2) * gt * gt / g)
    return acc


def residual(p: PointState) -> float:
    """Residual of the eps-horizontal minimal equation at a point state.

    Zero for solutions; positive for subsolutions, negative for
    supersolutions.  The n = 2 form is hard-coded; general n takes the
    summation route (the two are tied together by tests).
    """
    if p.n == 2:
        return float(residual_terms_n2(p.g, p.grad[0], p.grad[1],
                                       p.hess[0, 0], p.hess[1, 1], p.hess[0, 1],
                                       p.eps))
    return _residual_general(p, weight=1.0)


def residual_general(p: PointState) -> float:
    """General-n summation form of the residual (no n = 2 shortcut)."""
    return _residual_general(p, weight=1.0)


def homotopy_residual(p: PointState, s: float) -> float:
    """Residual of the continuation family: zeroth-order block times the weight."""
    w = homotopy_weight(s)
    if p.n == 2:
        return float(residual_terms_n2(p.g, p.grad[0], p.grad[1],
                                       p.hess[0, 0], p.hess[1, 1], p.hess[0, 1],
                                       p.eps, weight=w))
    return _residual_general(p, weight=w)


# ---------------------------------------------------------------------------
# coefficient matrix and ellipticity bounds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoefficientMatrix:
    """Symmetric coefficient matrix with its ellipticity sandwich bounds."""

    matrix: np.ndarray
    lower_bound: float   # min{1, g^2} <= smallest eigenvalue
    upper_bound: float   # largest eigenvalue <= trace-based bound


def coefficients(p: PointState) -> CoefficientMatrix:
    """Assemble the quadratic-form coefficients of the equation at ``p``.

    The off-diagonal x-x entries are -g^2 g_{x_j} g_{x_k}, the form consistent
    with expanding the quadratic form into squares.
    """
    n, g, eps = p.n, p.g, p.eps
    gx = p.grad_x
    gt = p.grad_t
    sq = float(gx @ gx)
    a = np.zeros((n, n))
    for k in range(n - 1):
        a[k, k] = g * g * (1.0 + sq - gx[k] ** 2) + gt * gt + eps / (n - 1)
    a[-1, -1] = 1.0 + sq
    for k in range(n - 1):
        a[k, -1] = a[-1, k] = -gx[k] * gt
    for j in range(n - 1):
        for k in range(n - 1):
            if j != k:
                a[j, k] = -g * g * gx[j] * gx[k]
    full_sq = float(p.grad @ p.grad)
    upper = 2.0 + g * g * (n - 1) + (max(1.0, g * g) * (n - 2) + 1.0) * full_sq
    return CoefficientMatrix(matrix=a, lower_bound=min(1.0, g * g), upper_bound=upper)


# ---------------------------------------------------------------------------
# surface geometry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SurfaceGeometry:
    """First/second fundamental forms, unit normal and area factor of the graph."""

    first_form: np.ndarray
    first_form_inverse: np.ndarray
    second_form: np.ndarray
    normal: np.ndarray
    area_factor: float


def surface_geometry(p: PointState) -> SurfaceGeometry:
    """Fundamental forms of the graph point; inverse taken from closed forms."""
    n, g = p.n, p.g
    gx = p.grad_x
    gt = p.grad_t
    sq = float(gx @ gx)
    W = area_factor(g, sq, gt)

    first = np.zeros((n, n))
    for k in range(n - 1):
        first[k, k] = (1.0 + gx[k] ** 2) / (g * g)
    for j in range(n - 1):
        for k in range(n - 1):
            if j != k:
                first[j, k] = gx[j] * gx[k] / (g * g)
    for k in range(n - 1):
        first[k, -1] = first[-1, k] = gx[k] * gt / (g * g)
    first[-1, -1] = (g * g + gt * gt) / (g * g)

    inv = np.zeros((n, n))
    for k in range(n - 1):
        inv[k, k] = (g * g * (1.0 + sq - gx[k] ** 2) + gt * gt) * g * g / W
    for j in range(n - 1):
        for k in range(n - 1):
            if j != k:
                inv[j, k] = -(g * g) * gx[j] * gx[k] * g * g / W
    for k in range(n - 1):
        inv[k, -1] = inv[-1, k] = -gt * gx[k] * g * g / W
    inv[-1, -1] = (1.0 + sq) * g * g / W

    rw = 1.0 / np.sqrt(W)
    second = np.zeros((n, n))
    for k in range(n - 1):
        second[k, k] = (1.0 / g + p.hess[k, k] + gx[k] ** 2 / g) * rw
    for j in range(n - 1):
        for k in range(n - 1):
            if j != k:
                second[j, k] = (p.hess[j, k] + gx[j] * gx[k] / g) * rw
    for k in range(n - 1):
        second[k, -1] = second[-1, k] = p.hess[k, -1] * rw
    second[-1, -1] = (p.hess[-1, -1] - gt * gt / g) * rw

    normal = np.empty(n + 1)
    normal[:n - 1] = -gx * g * g
    normal[n - 1] = g * g
    normal[n] = -gt
    normal *= rw
    return SurfaceGeometry(first_form=first, first_form_inverse=inv,
                           second_form=second, normal=normal, area_factor=W)


def mean_curvature(p: PointState) -> float:
    """Mean curvature of the graph w.r.t. the chosen normal (eps must be 0)."""
    if p.eps != 0.0:
        raise ValueError("mean curvature is defined for the eps = 0 state")
    sq = float(p.grad_x @ p.grad_x)
    W = area_factor(p.g, sq, p.grad_t)
    return p.g * p.g * residual(p) / (p.n * W ** 1.5)


# ---------------------------------------------------------------------------
# closed-form Jacobian row (n = 2)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JacobianRow:
    """Partial derivatives of the n = 2 residual w.r.t. its six arguments."""

    wrt_g: float
    wrt_gx: float
    wrt_gt: float
    wrt_gxx: float
    wrt_gtt: float
    wrt_gxt: float

    def as_tuple(self) -> tuple[float, float, float, float, float, float]:
        return (self.wrt_g, self.wrt_gx, self.wrt_gt,
                self.wrt_gxx, self.wrt_gtt, self.wrt_gxt)


def jacobian_terms_n2(g, gx, gt, gxx, gtt, gxt, eps, weight=1.0):
    """Broadcastable partials of the n = 2 residual, stencil-chaining ready."""
    d_g = 2.0 * g * gxx + weight * (1.0 + gx * gx)
    d_gx = 2.0 * gx * gtt - 2.0 * gt * gxt + 2.0 * weight * g * gx
    d_gt = 2.0 * gt * gxx - 2.0 * gx * gxt
    d_gxx = g * g + gt * gt + eps
    d_gtt = 1.0 + gx * gx
    d_gxt = -2.0 * gx * gt
    return d_g, d_gx, d_gt, d_gxx, d_gtt, d_gxt


def residual_jacobian(p: PointState, s: float = 1.0) -> JacobianRow:
    """Closed-form residual partials at an n = 2 state (Newton needs these)."""
    if p.n != 2:
        raise ValueError("closed-form Jacobian rows are implemented for n = 2 only")
    w = homotopy_weight(s)
    parts = jacobian_terms_n2(p.g, p.grad[0], p.grad[1],
                              p.hess[0, 0], p.hess[1, 1], p.hess[0, 1],
                              p.eps, weight=w)
    return JacobianRow(*(float(v) for v in parts))
