"""Grid-sampled scalar fields with mask-aware discrete calculus and CSV I/O."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import NonPositiveLength
from .geometry import BoundaryData, DomainSpec


def _stamp_boundary(domain: DomainSpec, values: np.ndarray,
                    boundary: BoundaryData) -> np.ndarray:
    out = np.array(values, dtype=float)
    for (i, j), v in boundary.values.items():
        out[i, j] = v
    out[~domain.in_mask] = np.nan
    return out


@dataclass(frozen=True)
class ScalarField:
    """A function sampled on the domain grid, exact on the boundary nodes.

    ``values[i, j]`` holds the sample at (x_i, t_j); nodes outside the mask
    are NaN.  Boundary nodes always carry the trace values verbatim.
    """

    domain: DomainSpec
    values: np.ndarray
    boundary: BoundaryData

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        shape = (self.domain.n_x + 1, self.domain.n_t + 1)
        if vals.shape != shape:
            raise ValueError(f"values must have shape {shape}")
        object.__setattr__(self, "values", _stamp_boundary(self.domain, vals, self.boundary))

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, domain: DomainSpec, boundary: BoundaryData,
                 fill: float | None = None) -> "ScalarField":
        level = boundary.min if fill is None else fill
        vals = np.full((domain.n_x + 1, domain.n_t + 1), float(level))
        return cls(domain, vals, boundary)

    @classmethod
    def from_callable(cls, domain: DomainSpec, fn, boundary: BoundaryData | None = None,
                      provenance: str = "oracle", positive: bool = True) -> "ScalarField":
        if boundary is None:
            boundary = BoundaryData.from_callable(domain, fn, provenance=provenance,
                                                  positive=positive)
        vals = np.empty((domain.n_x + 1, domain.n_t + 1))
        for i in range(domain.n_x + 1):
            for j in range(domain.n_t + 1):
                vals[i, j] = fn(*domain.node_xy(i, j))
        return cls(domain, vals, boundary)

    @classmethod
    def from_oracle(cls, domain: DomainSpec, oracle, positive: bool = True) -> "ScalarField":
        return cls.from_callable(domain, lambda x, t: oracle.value((x, t)),
                                 provenance=f"oracle:{type(oracle).__name__}",
                                 positive=positive)

    @classmethod
    def blend(cls, domain: DomainSpec, boundary: BoundaryData) -> "ScalarField":
        """Transfinite blend of the boundary values (Coons patch, rectangles).

        Exact for affine data; polygon domains fall back to the in-domain
        mean as a flat start.
        """
        nx, nt = domain.n_x, domain.n_t
        levels = set(boundary.values.values())
        if len(levels) == 1:  # constant data blends to the constant, exactly
            return cls.constant(domain, boundary, fill=levels.pop())
        vals = np.full((nx + 1, nt + 1), float(np.mean(list(boundary.values.values()))))
        if domain.kind == "rectangle":
            b = np.zeros((nx + 1, nt + 1))
            for (i, j), v in boundary.values.items():
                b[i, j] = v
            xi = np.linspace(0.0, 1.0, nx + 1)[:, None]
            eta = np.linspace(0.0, 1.0, nt + 1)[None, :]
            vals = ((1 - xi) * b[0, :][None, :] + xi * b[-1, :][None, :]
                    + (1 - eta) * b[:, 0][:, None] + eta * b[:, -1][:, None]
                    - (1 - xi) * (1 - eta) * b[0, 0] - xi * (1 - eta) * b[-1, 0]
                    - (1 - xi) * eta * b[0, -1] - xi * eta * b[-1, -1])
        return cls(domain, vals, boundary)

    # -- access ------------------------------------------------------------

    @property
    def interior_values(self) -> np.ndarray:
        return self.values[self.domain.interior_mask]

    @property
    def in_values(self) -> np.ndarray:
        return self.values[self.domain.in_mask]

    def interior_min(self) -> float:
        return float(np.min(self.interior_values))

    def interior_max(self) -> float:
        return float(np.max(self.interior_values))

    def require_positive(self) -> None:
        if np.nanmin(self.values[self.domain.in_mask]) <= 0.0:
            raise NonPositiveLength("field is not strictly positive on the mask")

    def max_diff(self, other: "ScalarField") -> float:
        mask = self.domain.in_mask
        return float(np.max(np.abs(self.values[mask] - other.values[mask])))

    def with_values(self, values: np.ndarray) -> "ScalarField":
        return ScalarField(self.domain, values, self.boundary)

    def with_boundary(self, boundary: BoundaryData) -> "ScalarField":
        return ScalarField(self.domain, self.values, boundary)

    # -- discrete calculus ---------------------------------------------------
    # Centered second-order differences wherever both neighbors are in the
    # mask; one-sided second-order stencils at the mask edge.

    def _diff_axis(self, axis: int) -> np.ndarray:
        v = self.values
        h = self.domain.h_x if axis == 0 else self.domain.h_t
        mask = self.domain.in_mask
        out = np.full_like(v, np.nan)

        def sh(arr, k):
            return np.roll(arr, -k, axis=axis)

        vp, vm = sh(v, 1), sh(v, -1)
        vpp, vmm = sh(v, 2), sh(v, -2)
        mp, mm = sh(mask, 1), sh(mask, -1)
        mpp, mmm = sh(mask, 2), sh(mask, -2)
        # roll wraps around; kill wrapped entries via index guards
        idx = np.arange(v.shape[axis])
        ok_p = (idx + 1 <= v.shape[axis] - 1)
        ok_pp = (idx + 2 <= v.shape[axis] - 1)
        ok_m = (idx - 1 >= 0)
        ok_mm = (idx - 2 >= 0)
        shape = [1, 1]
        shape[axis] = v.shape[axis]
        ok_p = ok_p.reshape(shape)
        ok_pp = ok_pp.reshape(shape)
        ok_m = ok_m.reshape(shape)
        ok_mm = ok_mm.reshape(shape)

        cen = mask & ok_p & ok_m & mp & mm
        fwd = mask & ~cen & ok_pp & mp & mpp
        bwd = mask & ~cen & ~fwd & ok_mm & mm & mmm
        fw1 = mask & ~cen & ~fwd & ~bwd & ok_p & mp
        bw1 = mask & ~cen & ~fwd & ~bwd & ~fw1 & ok_m & mm

        out[cen] = (vp[cen] - vm[cen]) / (2 * h)
        out[fwd] = (-3 * v[fwd] + 4 * vp[fwd] - vpp[fwd]) / (2 * h)
        out[bwd] = (3 * v[bwd] - 4 * vm[bwd] + vmm[bwd]) / (2 * h)
        out[fw1] = (vp[fw1] - v[fw1]) / h
        out[bw1] = (v[bw1] - vm[bw1]) / h
        leftover = mask & np.isnan(out)
        out[leftover] = 0.0
        return out

    def gradient(self) -> tuple[np.ndarray, np.ndarray]:
        """(g_x, g_t) over the mask; NaN outside."""
        return self._diff_axis(0), self._diff_axis(1)

    def gradient_norm(self) -> np.ndarray:
        gx, gt = self.gradient()
        return np.hypot(gx, gt)

    def max_gradient(self) -> float:
        return float(np.nanmax(self.gradient_norm()))

    def max_boundary_gradient(self) -> float:
        return float(np.nanmax(self.gradient_norm()[self.domain.boundary_mask]))

    def second_derivatives(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(g_xx, g_tt, g_xt) on interior nodes with full stencils; NaN elsewhere."""
        v = self.values
        d = self.domain
        out = [np.full_like(v, np.nan) for _ in range(3)]
        mask = d.in_mask
        core = d.interior_mask.copy()
        # need the full 9-point neighborhood inside the mask
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                shifted = np.zeros_like(mask)
                src = mask[max(0, di):mask.shape[0] + min(0, di),
                           max(0, dj):mask.shape[1] + min(0, dj)]
                shifted[max(0, -di):mask.shape[0] + min(0, -di),
                        max(0, -dj):mask.shape[1] + min(0, -dj)] = src
                core &= shifted
        ii, jj = np.nonzero(core)
        gxx = (v[ii + 1, jj] - 2 * v[ii, jj] + v[ii - 1, jj]) / d.h_x ** 2
        gtt = (v[ii, jj + 1] - 2 * v[ii, jj] + v[ii, jj - 1]) / d.h_t ** 2
        gxt = (v[ii + 1, jj + 1] - v[ii + 1, jj - 1] - v[ii - 1, jj + 1]
               + v[ii - 1, jj - 1]) / (4 * d.h_x * d.h_t)
        out[0][ii, jj] = gxx
        out[1][ii, jj] = gtt
        out[2][ii, jj] = gxt
        return out[0], out[1], out[2]

    def max_second_derivative(self) -> float:
        gxx, gtt, gxt = self.second_derivatives()
        stack = np.array([np.nanmax(np.abs(a)) for a in (gxx, gtt, gxt)])
        return float(np.max(stack))

    # -- isometries ----------------------------------------------------------

    def hyperbolic_rescale(self, lam: float) -> "ScalarField":
        """lam * g(x/lam, t) on the stretched domain; grids map node-to-node."""
        if lam <= 0:
            raise ValueError("rescaling factor must be positive")
        dom = self.domain.stretch_x(lam)
        bnd = BoundaryData({n: lam * v for n, v in self.boundary.values.items()},
                           provenance=self.boundary.provenance,
                           positive=self.boundary.positive)
        return ScalarField(dom, lam * self.values, bnd)

    # -- serialization -------------------------------------------------------

    def to_csv(self, path) -> None:
        """Write in-domain nodes as ``x,t,g`` rows (x-major), 17 significant digits."""
        d = self.domain
        lines = ["x,t,g"]
        for i in range(d.n_x + 1):
            for j in range(d.n_t + 1):
                if d.in_mask[i, j]:
                    x, t = d.node_xy(i, j)
                    lines.append(f"{x:.17g},{t:.17g},{self.values[i, j]:.17g}")
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path, domain: DomainSpec, positive: bool = True) -> "ScalarField":
        """Load a field written by :meth:`to_csv` back onto its domain grid."""
        rows = []
        with open(path) as fh:
            header = fh.readline().strip()
            if header.replace(" ", "") != "x,t,g":
                raise ValueError(f"unexpected CSV header {header!r}")
            for line in fh:
                line = line.strip()
                if line:
                    x, t, g = (float(tok) for tok in line.split(","))
                    rows.append((x, t, g))
        vals = np.full((domain.n_x + 1, domain.n_t + 1), np.nan)
        tol = 1e-9 * max(domain.h_x, domain.h_t)
        bvals: dict[tuple[int, int], float] = {}
        for x, t, g in rows:
            i = int(round((x - domain.x_min) / domain.h_x))
            j = int(round((t - domain.t_min) / domain.h_t))
            if not (0 <= i <= domain.n_x and 0 <= j <= domain.n_t):
                raise ValueError(f"row ({x},{t}) falls outside the grid")
            gx, gt = domain.node_xy(i, j)
            if abs(gx - x) > tol or abs(gt - t) > tol:
                raise ValueError(f"row ({x},{t}) is not on a grid node")
            vals[i, j] = g
            if domain.boundary_mask[i, j]:
                bvals[(i, j)] = g
        missing = int(np.sum(domain.in_mask & np.isnan(vals)))
        if missing:
            raise ValueError(f"CSV misses {missing} in-domain nodes")
        boundary = BoundaryData(bvals, provenance="tabulated", positive=positive)
        return cls(domain, vals, boundary)
