"""Damped-Newton finite-difference solver with s- and eps-continuation.

The Dirichlet problem is discretized with centered second-order stencils
(9-point, cross term included) on the uniform grid.  Newton steps solve the
sparse linearization directly and backtrack on the squared residual norm
while capping the step so the iterate stays above the positivity floor.
Continuation first marches the zeroth-order homotopy weight from the trivial
constant branch to the full equation at the most elliptic regularization,
then descends the regularization toward zero, warm-starting every solve.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csc_matrix
from scipy.sparse.linalg import splu

from . import kernels
from .errors import (DegenerateLimitWarning, LineSearchStalled, NewtonDiverged,
                     NonPositiveLength, SingularJacobian, SolverError)
from .fields import ScalarField
from .geometry import (BoundaryData, DomainSpec, check_existence_hypotheses,
                       compute_quantities)


@dataclass(frozen=True)
class SolverConfig:
    newton_tol: float = 1e-10        # max-norm residual threshold
    max_newton_iters: int = 50
    armijo_c: float = 1e-4
    armijo_shrink: float = 0.5
    min_step: float = 1e-12
    positivity_floor: float = 1e-8

    def __post_init__(self):
        if min(self.newton_tol, self.armijo_c, self.min_step,
               self.positivity_floor) <= 0 or self.max_newton_iters <= 0:
            raise ValueError("solver parameters must be positive")
        if not 0.0 < self.armijo_shrink < 1.0:
            raise ValueError("armijo_shrink must lie in (0, 1)")


def default_eps_sequence(eps_target: float = 0.0) -> tuple[float, ...]:
    """2^-k, k = 0..20, truncated at the target (0 is appended last)."""
    if not 0.0 <= eps_target <= 1.0:
        raise ValueError("eps_target must lie in [0, 1]")
    seq = []
    for k in range(21):
        v = 2.0 ** (-k)
        if v <= eps_target:
            break
        seq.append(v)
    if not seq or seq[-1] > eps_target:
        seq.append(eps_target)
    return tuple(seq)


@dataclass(frozen=True)
class ContinuationSchedule:
    s_steps: tuple[float, ...] = tuple(np.linspace(0.5, 1.0, 11))
    eps_sequence: tuple[float, ...] = field(default_factory=default_eps_sequence)

    def __post_init__(self):
        s = np.asarray(self.s_steps, dtype=float)
        if s.size == 0 or s.min() < 0.5 or s.max() > 1.0 or np.any(np.diff(s) < 0):
            raise ValueError("s_steps must be nondecreasing within [1/2, 1]")
        if s[-1] != 1.0:
            raise ValueError("s_steps must end at 1")
        e = np.asarray(self.eps_sequence, dtype=float)
        if e.size == 0 or e.min() < 0.0 or e.max() > 1.0 or np.any(np.diff(e) >= 0):
            raise ValueError("eps_sequence must strictly decrease within [0, 1]")

    @classmethod
    def uniform(cls, n_s: int = 11, eps_target: float = 0.0) -> "ContinuationSchedule":
        return cls(s_steps=tuple(np.linspace(0.5, 1.0, n_s)),
                   eps_sequence=default_eps_sequence(eps_target))


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------

def _horizontal_kernels(eps: float, s: float):
    w = kernels.homotopy_weight(s)

    def res(g, gx, gt, gxx, gtt, gxt):
        return kernels.residual_terms_n2(g, gx, gt, gxx, gtt, gxt, eps, weight=w)

    def jac(g, gx, gt, gxx, gtt, gxt):
        return kernels.jacobian_terms_n2(g, gx, gt, gxx, gtt, gxt, eps, weight=w)

    return res, jac


def _euclidean_kernels():
    def res(g, gx, gt, gxx, gtt, gxt):
        return gxx * (1.0 + gt * gt) + gtt * (1.0 + gx * gx) - 2.0 * gx * gt * gxt

    def jac(g, gx, gt, gxx, gtt, gxt):
        d_g = np.zeros_like(g)
        d_gx = 2.0 * gx * gtt - 2.0 * gt * gxt
        d_gt = 2.0 * gt * gxx - 2.0 * gx * gxt
        d_gxx = 1.0 + gt * gt
        d_gtt = 1.0 + gx * gx
        d_gxt = -2.0 * gx * gt
        return d_g, d_gx, d_gt, d_gxx, d_gtt, d_gxt

    return res, jac


@dataclass(frozen=True)
class AssembledSystem:
    """Residual vector and sparse Jacobian over all in-domain nodes.

    Rows follow ``node_ids``; boundary rows are identity with zero residual.
    """

    residual: np.ndarray
    jacobian: "csc_matrix | None"
    node_ids: np.ndarray   # (n_x+1, n_t+1) int array, -1 outside the mask

    @property
    def max_norm(self) -> float:
        return float(np.max(np.abs(self.residual))) if self.residual.size else 0.0


def _node_ids(domain: DomainSpec) -> np.ndarray:
    ids = -np.ones((domain.n_x + 1, domain.n_t + 1), dtype=np.int64)
    ii, jj = np.nonzero(domain.in_mask)
    ids[ii, jj] = np.arange(ii.size)
    return ids


def _stencil_values(values: np.ndarray, ii: np.ndarray, jj: np.ndarray,
                    hx: float, ht: float):
    c = values[ii, jj]
    e = values[ii + 1, jj]
    w = values[ii - 1, jj]
    n = values[ii, jj + 1]
    s = values[ii, jj - 1]
    ne = values[ii + 1, jj + 1]
    nw = values[ii - 1, jj + 1]
    se = values[ii + 1, jj - 1]
    sw = values[ii - 1, jj - 1]
    gx = (e - w) / (2 * hx)
    gt = (n - s) / (2 * ht)
    gxx = (e - 2 * c + w) / hx ** 2
    gtt = (n - 2 * c + s) / ht ** 2
    gxt = (ne - nw - se + sw) / (4 * hx * ht)
    return c, gx, gt, gxx, gtt, gxt


def _assemble(domain: DomainSpec, values: np.ndarray, res_kernel, jac_kernel,
              require_positive: bool, with_jacobian: bool) -> AssembledSystem:
    ids = _node_ids(domain)
    n_total = int(domain.in_mask.sum())
    if require_positive and np.min(values[domain.in_mask]) <= 0.0:
        raise NonPositiveLength("field has a node with g <= 0")

    ii, jj = np.nonzero(domain.interior_mask)
    hx, ht = domain.h_x, domain.h_t
    g, gx, gt, gxx, gtt, gxt = _stencil_values(values, ii, jj, hx, ht)

    res_vec = np.zeros(n_total)
    rows_int = ids[ii, jj]
    res_vec[rows_int] = res_kernel(g, gx, gt, gxx, gtt, gxt)

    if not with_jacobian:
        return AssembledSystem(residual=res_vec, jacobian=None, node_ids=ids)

    d_g, d_gx, d_gt, d_gxx, d_gtt, d_gxt = jac_kernel(g, gx, gt, gxx, gtt, gxt)
    d_g = np.broadcast_to(d_g, g.shape)

    # chain the six partials through the difference stencils (9-point)
    offsets = {
        (0, 0): d_g - 2 * d_gxx / hx ** 2 - 2 * d_gtt / ht ** 2,
        (1, 0): d_gx / (2 * hx) + d_gxx / hx ** 2,
        (-1, 0): -d_gx / (2 * hx) + d_gxx / hx ** 2,
        (0, 1): d_gt / (2 * ht) + d_gtt / ht ** 2,
        (0, -1): -d_gt / (2 * ht) + d_gtt / ht ** 2,
        (1, 1): d_gxt / (4 * hx * ht),
        (-1, -1): d_gxt / (4 * hx * ht),
        (1, -1): -d_gxt / (4 * hx * ht),
        (-1, 1): -d_gxt / (4 * hx * ht),
    }
    rows = [rows_int] * 9
    cols = [ids[ii + di, jj + dj] for (di, dj) in offsets]
    data = list(offsets.values())

    bi, bj = np.nonzero(domain.boundary_mask)
    rows.append(ids[bi, bj])
    cols.append(ids[bi, bj])
    data.append(np.ones(bi.size))

    jac = csc_matrix((np.concatenate(data),
                      (np.concatenate(rows), np.concatenate(cols))),
                     shape=(n_total, n_total))
    return AssembledSystem(residual=res_vec, jacobian=jac, node_ids=ids)


def assemble(field: ScalarField, eps: float, s: float = 1.0,
             with_jacobian: bool = True) -> AssembledSystem:
    """Residual vector and 9-point sparse Jacobian of the homotopy equation."""
    res_k, jac_k = _horizontal_kernels(eps, s)
    return _assemble(field.domain, field.values, res_k, jac_k,
                     require_positive=True, with_jacobian=with_jacobian)


# ---------------------------------------------------------------------------
# Newton iteration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NewtonResult:
    field: ScalarField
    iterations: int
    residual_norm: float


def _newton_loop(initial: ScalarField, res_kernel, jac_kernel,
                 cfg: SolverConfig, require_positive: bool) -> NewtonResult:
    domain = initial.domain
    values = initial.values.copy()
    mask = domain.in_mask

    def assemble_at(vals, with_jac):
        return _assemble(domain, vals, res_kernel, jac_kernel,
                         require_positive, with_jac)

    for iteration in range(cfg.max_newton_iters + 1):
        system = assemble_at(values, with_jac=True)
        rnorm = system.max_norm
        if rnorm <= cfg.newton_tol:
            return NewtonResult(field=initial.with_values(values),
                                iterations=iteration, residual_norm=rnorm)
        if iteration == cfg.max_newton_iters:
            raise NewtonDiverged(
                f"residual {rnorm:.3e} > {cfg.newton_tol:.1e} after {iteration} iterations")
        try:
            lu = splu(system.jacobian)
            step = lu.solve(-system.residual)
        except RuntimeError as exc:
            raise SingularJacobian(str(exc)) from exc
        if not np.all(np.isfinite(step)):
            raise SingularJacobian("linear solve produced non-finite entries")

        delta = np.zeros_like(values)
        ii, jj = np.nonzero(mask)
        delta[ii, jj] = step[system.node_ids[ii, jj]]

        tau = 1.0
        if require_positive:
            neg = delta < 0
            if np.any(neg & mask):
                room = (values[neg & mask] - cfg.positivity_floor) / (-delta[neg & mask])
                tau = min(1.0, 0.99 * float(np.min(room)))
                if tau <= 0.0:
                    raise LineSearchStalled("no positive step keeps the field above the floor")

        merit0 = 0.5 * float(system.residual @ system.residual)
        while True:
            trial = values + tau * delta
            trial_sys = assemble_at(trial, with_jac=False)
            merit = 0.5 * float(trial_sys.residual @ trial_sys.residual)
            if merit <= (1.0 - 2.0 * cfg.armijo_c * tau) * merit0:
                values = trial
                break
            tau *= cfg.armijo_shrink
            if tau < cfg.min_step:
                raise LineSearchStalled(
                    f"step fell below {cfg.min_step:.1e} with residual {rnorm:.3e}")
    raise AssertionError("unreachable")


def newton_solve(initial: ScalarField, eps: float, s: float = 1.0,
                 cfg: SolverConfig | None = None) -> NewtonResult:
    """Solve the homotopy equation at fixed (s, eps) from the given start."""
    cfg = cfg or SolverConfig()
    if not 0.0 <= eps <= 1.0:
        raise ValueError("eps must lie in [0, 1]")
    res_k, jac_k = _horizontal_kernels(eps, s)
    return _newton_loop(initial, res_k, jac_k, cfg, require_positive=True)


# ---------------------------------------------------------------------------
# continuation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StepRecord:
    s: float
    eps: float
    iterations: int
    residual_norm: float
    field_min: float
    field_max: float

    def to_dict(self) -> dict:
        return {"s": self.s, "eps": self.eps, "iterations": self.iterations,
                "residual_norm": self.residual_norm,
                "field_min": self.field_min, "field_max": self.field_max}


@dataclass(frozen=True)
class ContinuationResult:
    steps: tuple[StepRecord, ...]
    fields: tuple[ScalarField, ...]
    final: ScalarField
    final_eps: float
    degenerate_limit: bool

    def eps_leg(self) -> list[tuple[float, ScalarField]]:
        """(eps, field) pairs of the s = 1 descent, in solve order."""
        return [(rec.eps, fld) for rec, fld in zip(self.steps, self.fields)
                if rec.s == 1.0]

    def eps_gaps(self) -> list[tuple[float, float]]:
        """(eps_after, max-norm gap) between consecutive eps-leg solutions."""
        leg = self.eps_leg()
        return [(leg[k + 1][0], leg[k][1].max_diff(leg[k + 1][1]))
                for k in range(len(leg) - 1)]

    def to_dict(self) -> dict:
        return {
            "steps": [rec.to_dict() for rec in self.steps],
            "final_eps": self.final_eps,
            "degenerate_limit": self.degenerate_limit,
            "eps_gaps": [{"eps": e, "gap": g} for e, g in self.eps_gaps()],
        }


def _annotate(exc: SolverError, s: float, eps: float) -> SolverError:
    return type(exc)(f"{exc} [failing step s={s}, eps={eps}]")


def continuation_solve(domain: DomainSpec, f: BoundaryData,
                       schedule: ContinuationSchedule | None = None,
                       cfg: SolverConfig | None = None) -> ContinuationResult:
    """March s over [1/2, 1] at the largest eps, then descend eps at s = 1.

    Every solve is warm-started from the previous field; the first start is
    the constant-minimum branch, which solves the weightless family exactly.
    A failure at the terminal eps = 0 step degrades gracefully: the smallest
    successful eps is reported as final under a DegenerateLimitWarning.
    """
    schedule = schedule or ContinuationSchedule()
    cfg = cfg or SolverConfig()
    hyp = check_existence_hypotheses(compute_quantities(domain, f))
    if not hyp.existence_ok:
        warnings.warn(
            f"existence hypothesis fails: barrier radius {hyp.barrier_radius:.6g} "
            f"> {hyp.threshold:.6g}; continuing anyway", stacklevel=2)

    steps: list[StepRecord] = []
    fields: list[ScalarField] = []
    eps0 = schedule.eps_sequence[0]

    current = ScalarField.constant(domain, f.homotopy(schedule.s_steps[0]))
    for s in schedule.s_steps:
        boundary_s = f.homotopy(s)
        start = ScalarField(domain, current.values, boundary_s)
        try:
            result = newton_solve(start, eps0, s, cfg)
        except SolverError as exc:
            raise _annotate(exc, s, eps0) from exc
        current = result.field
        steps.append(StepRecord(s=s, eps=eps0, iterations=result.iterations,
                                residual_norm=result.residual_norm,
                                field_min=float(np.min(current.in_values)),
                                field_max=float(np.max(current.in_values))))
        fields.append(current)

    degenerate = False
    final_eps = eps0
    for eps in schedule.eps_sequence[1:]:
        try:
            result = newton_solve(current, eps, 1.0, cfg)
        except SolverError as exc:
            if eps == 0.0:
                warnings.warn(
                    f"eps = 0 limit solve failed ({exc}); reporting eps = {final_eps}",
                    DegenerateLimitWarning, stacklevel=2)
                degenerate = True
                break
            raise _annotate(exc, 1.0, eps) from exc
        current = result.field
        final_eps = eps
        steps.append(StepRecord(s=1.0, eps=eps, iterations=result.iterations,
                                residual_norm=result.residual_norm,
                                field_min=float(np.min(current.in_values)),
                                field_max=float(np.max(current.in_values))))
        fields.append(current)

    return ContinuationResult(steps=tuple(steps), fields=tuple(fields),
                              final=current, final_eps=final_eps,
                              degenerate_limit=degenerate)


# ---------------------------------------------------------------------------
# Euclidean minimal extension
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EuclideanResult:
    """Discrete minimal extension with the sup-norm proxies of its rigidity."""

    field: ScalarField
    iterations: int
    residual_norm: float
    grad_sup: float
    hess_sup: float

    @property
    def rigidity(self) -> float:
        """max |Du| + max |D^2 u|: the s-independent extension constant."""
        return self.grad_sup + self.hess_sup


def convergence_study(oracle, box: tuple[float, float, float, float],
                      node_counts: tuple[int, ...], eps: float = 0.0,
                      cfg: SolverConfig | None = None) -> list[dict]:
    """Grid-doubling study against an exact surface: (h, error, observed order).

    ``node_counts`` are per-axis node counts (cells + 1); the boundary data is
    the oracle trace and the error is the max-norm against the exact values.
    """
    cfg = cfg or SolverConfig()
    x_min, x_max, t_min, t_max = box
    rows: list[dict] = []
    prev = None
    for nodes in node_counts:
        domain = DomainSpec.rectangle(x_min, x_max, t_min, t_max, nodes - 1, nodes - 1)
        boundary = BoundaryData.from_callable(domain, oracle.trace,
                                              provenance="oracle")
        start = ScalarField.blend(domain, boundary)
        result = newton_solve(start, eps, 1.0, cfg)
        exact = ScalarField.from_oracle(domain, oracle)
        err = result.field.max_diff(exact)
        h = max(domain.h_x, domain.h_t)
        order = float("nan") if prev is None else float(
            np.log(prev[1] / err) / np.log(prev[0] / h))
        rows.append({"nodes": nodes, "h": h, "error": err,
                     "iterations": result.iterations, "order": order})
        prev = (h, err)
    return rows


def euclidean_minimal_solve(domain: DomainSpec, f: BoundaryData,
                            cfg: SolverConfig | None = None) -> EuclideanResult:
    """Solve the Euclidean minimal-graph equation with the same stencils.

    Boundary data need not be positive here.  Affine data is reproduced
    exactly (affine functions are discrete solutions), and the discrete
    maximum principle keeps the result between the data extremes.
    """
    cfg = cfg or SolverConfig()
    initial = ScalarField.blend(domain, f)
    res_k, jac_k = _euclidean_kernels()
    result = _newton_loop(initial, res_k, jac_k, cfg, require_positive=False)
    fld = result.field
    return EuclideanResult(field=fld, iterations=result.iterations,
                           residual_norm=result.residual_norm,
                           grad_sup=fld.max_gradient(),
                           hess_sup=fld.max_second_derivative())
