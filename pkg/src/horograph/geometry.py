"""Bounded convex domains of the (x, t) plane and their comparison quantities.

A domain lives on a uniform tensor grid covering its bounding box.  Boundary
data is attached to the grid nodes on the mask's edge, and the quantities that
parameterize every length/gradient estimate (horizontal width, enclosing
radius, the geodesic-barrier radius) are derived from the domain and the data.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Mapping

import numpy as np

from .errors import EmptyDomain, NonPositiveBoundaryData

SQRT_HALF_PI = math.sqrt(math.pi / 2.0)

# neighbor offsets used for mask closure (8-connectivity, matches the stencil)
_NEIGHBORS = [(di, dj) for di in (-1, 0, 1) for dj in (-1, 0, 1) if (di, dj) != (0, 0)]


def _validate_convex_ccw(vertices: np.ndarray) -> None:
    """Reject vertex loops that are not simple, convex and counterclockwise."""
    m = len(vertices)
    if m < 3:
        raise ValueError("polygon needs at least 3 vertices")
    scale = float(np.abs(vertices).max()) + 1.0
    crosses = []
    for k in range(m):
        a = vertices[k]
        b = vertices[(k + 1) % m]
        c = vertices[(k + 2) % m]
        if np.allclose(a, b, atol=1e-14 * scale):
            raise ValueError("polygon has a repeated vertex")
        e1 = b - a
        e2 = c - b
        crosses.append(float(e1[0] * e2[1] - e1[1] * e2[0]))
    tol = 1e-12 * scale * scale
    if any(c < -tol for c in crosses):
        raise ValueError("polygon vertices must turn counterclockwise and be convex")
    if not any(c > tol for c in crosses):
        raise ValueError("polygon is degenerate (all vertices collinear)")


@dataclass(frozen=True)
class DomainSpec:
    """Rectangle or convex polygon rasterized on an (n_x+1) x (n_t+1) grid.

    ``n_x`` and ``n_t`` count grid cells, so the spacings are
    ``h_x = (x_max - x_min)/n_x`` and ``h_t = (t_max - t_min)/n_t``.
    """

    kind: str
    x_min: float
    x_max: float
    t_min: float
    t_max: float
    n_x: int
    n_t: int
    vertices: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if self.kind not in ("rectangle", "polygon"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if not (self.x_max > self.x_min and self.t_max > self.t_min):
            raise EmptyDomain(
                f"degenerate extent x=[{self.x_min},{self.x_max}] t=[{self.t_min},{self.t_max}]"
            )
        if self.n_x < 2 or self.n_t < 2:
            raise EmptyDomain("resolution too coarse for any interior node")
        if self.kind == "polygon":
            if self.vertices is None:
                raise ValueError("polygon domain needs vertices")
            _validate_convex_ccw(np.asarray(self.vertices, dtype=float))
        # force the mask build so degenerate rasterizations fail loudly here
        if not self.interior_mask.any():
            raise EmptyDomain("grid mask has no interior node")

    # -- constructors ------------------------------------------------------

    @classmethod
    def rectangle(cls, x_min, x_max, t_min, t_max, n_x, n_t) -> "DomainSpec":
        return cls("rectangle", float(x_min), float(x_max), float(t_min),
                   float(t_max), int(n_x), int(n_t))

    @classmethod
    def polygon(cls, vertices: Iterable[tuple[float, float]], n_x, n_t) -> "DomainSpec":
        verts = tuple((float(x), float(t)) for x, t in vertices)
        arr = np.asarray(verts, dtype=float)
        return cls("polygon", float(arr[:, 0].min()), float(arr[:, 0].max()),
                   float(arr[:, 1].min()), float(arr[:, 1].max()),
                   int(n_x), int(n_t), vertices=verts)

    # -- grid --------------------------------------------------------------

    @property
    def h_x(self) -> float:
        return (self.x_max - self.x_min) / self.n_x

    @property
    def h_t(self) -> float:
        return (self.t_max - self.t_min) / self.n_t

    @cached_property
    def xs(self) -> np.ndarray:
        return self.x_min + self.h_x * np.arange(self.n_x + 1)

    @cached_property
    def ts(self) -> np.ndarray:
        return self.t_min + self.h_t * np.arange(self.n_t + 1)

    def node_xy(self, i: int, j: int) -> tuple[float, float]:
        return float(self.xs[i]), float(self.ts[j])

    @cached_property
    def node_x_grid(self) -> np.ndarray:
        return np.repeat(self.xs[:, None], self.n_t + 1, axis=1)

    @cached_property
    def node_t_grid(self) -> np.ndarray:
        return np.repeat(self.ts[None, :], self.n_x + 1, axis=0)

    # -- masks ---------------------------------------------------------------
    # Rectangles use every node: the perimeter is the boundary.  Polygons mark
    # a node in-domain iff it is strictly inside every edge half-plane; among
    # those, nodes within half a grid spacing of an edge (or next to an
    # out-of-domain node, which closes the 9-point stencil) are boundary.

    @cached_property
    def _masks(self) -> tuple[np.ndarray, np.ndarray]:
        shape = (self.n_x + 1, self.n_t + 1)
        if self.kind == "rectangle":
            inside = np.ones(shape, dtype=bool)
            boundary = np.zeros(shape, dtype=bool)
            boundary[0, :] = boundary[-1, :] = True
            boundary[:, 0] = boundary[:, -1] = True
            return inside & ~boundary, boundary

        verts = np.asarray(self.vertices, dtype=float)
        X = self.node_x_grid
        T = self.node_t_grid
        candidate = np.ones(shape, dtype=bool)
        dist = np.full(shape, np.inf)
        for k in range(len(verts)):
            a = verts[k]
            b = verts[(k + 1) % len(verts)]
            e = b - a
            norm = math.hypot(e[0], e[1])
            # signed inward distance to the edge line (ccw loop)
            s = (e[0] * (T - a[1]) - e[1] * (X - a[0])) / norm
            candidate &= s > 0.0
            dist = np.minimum(dist, np.abs(s))
        near_edge = dist <= 0.5 * max(self.h_x, self.h_t)
        ragged = np.zeros(shape, dtype=bool)
        for di, dj in _NEIGHBORS:
            shifted = np.ones(shape, dtype=bool)
            src = candidate[max(0, di):shape[0] + min(0, di), max(0, dj):shape[1] + min(0, dj)]
            shifted[max(0, -di):shape[0] + min(0, -di), max(0, -dj):shape[1] + min(0, -dj)] = src
            ragged |= candidate & ~shifted
        boundary = candidate & (near_edge | ragged)
        return candidate & ~boundary, boundary

    @property
    def interior_mask(self) -> np.ndarray:
        return self._masks[0]

    @property
    def boundary_mask(self) -> np.ndarray:
        return self._masks[1]

    @property
    def in_mask(self) -> np.ndarray:
        return self.interior_mask | self.boundary_mask

    def boundary_nodes(self) -> list[tuple[int, int]]:
        ii, jj = np.nonzero(self.boundary_mask)
        return list(zip(ii.tolist(), jj.tolist()))

    def interior_nodes(self) -> list[tuple[int, int]]:
        ii, jj = np.nonzero(self.interior_mask)
        return list(zip(ii.tolist(), jj.tolist()))

    # -- geometry helpers --------------------------------------------------

    def support_distance(self, x, t):
        """Distance to the supporting line at the nearest boundary point.

        For rectangles this is the distance to the nearest side; for convex
        polygons, the distance to the nearest edge line.
        """
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        if self.kind == "rectangle":
            return np.minimum.reduce([
                x - self.x_min, self.x_max - x, t - self.t_min, self.t_max - t,
            ])
        verts = np.asarray(self.vertices, dtype=float)
        dist = np.full(np.broadcast(x, t).shape, np.inf)
        for k in range(len(verts)):
            a = verts[k]
            b = verts[(k + 1) % len(verts)]
            e = b - a
            norm = math.hypot(e[0], e[1])
            s = (e[0] * (t - a[1]) - e[1] * (x - a[0])) / norm
            dist = np.minimum(dist, np.abs(s))
        return dist

    def support_direction(self, x: float, t: float) -> tuple[float, tuple[float, float]]:
        """Distance plus inward unit normal of the nearest supporting line."""
        if self.kind == "rectangle":
            cands = [
                (x - self.x_min, (1.0, 0.0)),
                (self.x_max - x, (-1.0, 0.0)),
                (t - self.t_min, (0.0, 1.0)),
                (self.t_max - t, (0.0, -1.0)),
            ]
            return min(cands, key=lambda c: c[0])
        verts = np.asarray(self.vertices, dtype=float)
        best = (math.inf, (0.0, 0.0))
        for k in range(len(verts)):
            a = verts[k]
            b = verts[(k + 1) % len(verts)]
            e = b - a
            norm = math.hypot(e[0], e[1])
            s = (e[0] * (t - a[1]) - e[1] * (x - a[0])) / norm
            if abs(s) < best[0]:
                best = (abs(s), (-e[1] / norm, e[0] / norm))
        return best

    @cached_property
    def inradius(self) -> float:
        if self.kind == "rectangle":
            return 0.5 * min(self.x_max - self.x_min, self.t_max - self.t_min)
        ii, jj = np.nonzero(self.interior_mask)
        d = self.support_distance(self.xs[ii], self.ts[jj])
        return float(np.max(d))

    def translate(self, dx: float, dt: float) -> "DomainSpec":
        if self.kind == "rectangle":
            return DomainSpec.rectangle(self.x_min + dx, self.x_max + dx,
                                        self.t_min + dt, self.t_max + dt,
                                        self.n_x, self.n_t)
        return DomainSpec.polygon([(x + dx, t + dt) for x, t in self.vertices],
                                  self.n_x, self.n_t)

    def stretch_x(self, lam: float) -> "DomainSpec":
        """Image of the domain under the x-homothety diag(lam, 1)."""
        if lam <= 0:
            raise ValueError("stretch factor must be positive")
        if self.kind == "rectangle":
            return DomainSpec.rectangle(self.x_min * lam, self.x_max * lam,
                                        self.t_min, self.t_max, self.n_x, self.n_t)
        return DomainSpec.polygon([(x * lam, t) for x, t in self.vertices],
                                  self.n_x, self.n_t)


@dataclass(frozen=True)
class BoundaryData:
    """Values attached to the boundary grid nodes.

    Horizontal-length data must be strictly positive; the Euclidean extension
    path may disable that check via ``positive=False``.
    """

    values: Mapping[tuple[int, int], float]
    provenance: str = "tabulated"
    positive: bool = True

    def __post_init__(self):
        if self.positive:
            for node, v in self.values.items():
                if not v > 0.0:
                    raise NonPositiveBoundaryData(f"f{node} = {v} is not > 0")

    @classmethod
    def constant(cls, domain: DomainSpec, value: float) -> "BoundaryData":
        vals = {node: float(value) for node in domain.boundary_nodes()}
        return cls(vals, provenance="constant")

    @classmethod
    def from_callable(cls, domain: DomainSpec, fn: Callable[[float, float], float],
                      provenance: str = "oracle", positive: bool = True) -> "BoundaryData":
        vals = {}
        for node in domain.boundary_nodes():
            x, t = domain.node_xy(*node)
            vals[node] = float(fn(x, t))
        return cls(vals, provenance=provenance, positive=positive)

    @classmethod
    def from_table(cls, domain: DomainSpec, rows: Iterable[tuple[float, float, float]],
                   positive: bool = True) -> "BoundaryData":
        """Snap (x, t, value) rows to their boundary nodes (within half a spacing)."""
        tol = 0.5 * max(domain.h_x, domain.h_t)
        nodes = domain.boundary_nodes()
        coords = np.array([domain.node_xy(*n) for n in nodes])
        vals: dict[tuple[int, int], float] = {}
        for x, t, v in rows:
            d = np.hypot(coords[:, 0] - x, coords[:, 1] - t)
            k = int(np.argmin(d))
            if d[k] > tol:
                raise ValueError(f"table point ({x},{t}) is not near a boundary node")
            vals[nodes[k]] = float(v)
        missing = [n for n in nodes if n not in vals]
        if missing:
            raise ValueError(f"table misses {len(missing)} boundary nodes, e.g. {missing[0]}")
        return cls(vals, provenance="tabulated", positive=positive)

    def as_array(self) -> np.ndarray:
        return np.array([self.values[n] for n in sorted(self.values)])

    @property
    def min(self) -> float:
        return float(min(self.values.values()))

    @property
    def max(self) -> float:
        return float(max(self.values.values()))

    @property
    def osc(self) -> float:
        return self.max - self.min

    def shifted(self, c: float) -> "BoundaryData":
        return BoundaryData({n: v + c for n, v in self.values.items()},
                            provenance=self.provenance, positive=self.positive)

    def homotopy(self, s: float) -> "BoundaryData":
        """Boundary data of the continuation family at parameter s.

        Returns (2s-1) f + 2(1-s) min f for s in [1/2, 1] and the constant
        2 s min f for s in [0, 1/2].
        """
        if not 0.0 <= s <= 1.0:
            raise ValueError("s must lie in [0, 1]")
        fmin = self.min
        if s <= 0.5:
            vals = {n: 2.0 * s * fmin for n in self.values}
        else:
            vals = {n: (2.0 * s - 1.0) * v + 2.0 * (1.0 - s) * fmin
                    for n, v in self.values.items()}
        return BoundaryData(vals, provenance=self.provenance,
                            positive=self.positive and s > 0.0)


@dataclass(frozen=True)
class GeometricQuantities:
    """Scalars controlling the comparison barriers for a (domain, data) pair."""

    horizontal_width: float     # spread of x over the boundary
    x_center: float             # midpoint of the boundary x-range
    enclosing_radius: float     # n>=3 slot; equals horizontal_width/2 when n=2
    barrier_radius: float       # sqrt(f_max^2 + (horizontal_width/2)^2)
    f_osc: float
    f_min: float
    f_max: float


def compute_quantities(domain: DomainSpec, f: BoundaryData) -> GeometricQuantities:
    """Derive the barrier quantities of a boundary-value pair (n = 2 grids)."""
    if not domain.interior_mask.any():
        raise EmptyDomain("no interior node")
    vals = list(f.values.values())
    if not vals:
        raise EmptyDomain("no boundary node carries data")
    if min(vals) <= 0.0:
        raise NonPositiveBoundaryData("boundary data must be strictly positive")
    if domain.kind == "rectangle":
        width = domain.x_max - domain.x_min
        x_center = 0.5 * (domain.x_min + domain.x_max)
    else:
        verts = np.asarray(domain.vertices, dtype=float)
        width = float(verts[:, 0].max() - verts[:, 0].min())
        x_center = 0.5 * float(verts[:, 0].max() + verts[:, 0].min())
    f_min = float(min(vals))
    f_max = float(max(vals))
    return GeometricQuantities(
        horizontal_width=width,
        x_center=x_center,
        enclosing_radius=0.5 * width,
        barrier_radius=math.hypot(f_max, 0.5 * width),
        f_osc=f_max - f_min,
        f_min=f_min,
        f_max=f_max,
    )


@dataclass(frozen=True)
class HypothesisReport:
    """Which existence/gradient hypotheses a (domain, data) pair satisfies."""

    barrier_radius: float
    f_min: float
    threshold: float            # f_min * (1 + sqrt(pi/2))
    existence_ok: bool          # barrier_radius <= threshold
    shift_constant: float       # smallest constant shift restoring existence
    gradient_hypothesis_ok: bool  # strict: barrier_radius < threshold

    def to_dict(self) -> dict:
        return {
            "barrier_radius": self.barrier_radius,
            "f_min": self.f_min,
            "threshold": self.threshold,
            "existence_ok": self.existence_ok,
            "shift_constant": self.shift_constant,
            "gradient_hypothesis_ok": self.gradient_hypothesis_ok,
        }


def check_existence_hypotheses(q: GeometricQuantities) -> HypothesisReport:
    """Report the solvability hypotheses implied by the quantities ``q``."""
    threshold = q.f_min * (1.0 + SQRT_HALF_PI)
    return HypothesisReport(
        barrier_radius=q.barrier_radius,
        f_min=q.f_min,
        threshold=threshold,
        existence_ok=q.barrier_radius <= threshold,
        shift_constant=q.f_osc + 0.5 * q.horizontal_width,
        gradient_hypothesis_ok=q.barrier_radius < threshold,
    )


def smallest_enclosing_disk(points: Iterable[tuple[float, float]]) -> tuple[np.ndarray, float]:
    """Smallest closed disk containing a planar point set.

    Exact brute force over the pairs and triples that can support the optimal
    disk; intended for the modest point counts of projected n >= 3 domains.
    """
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) == 0:
        raise ValueError("need a nonempty set of planar points")
    if len(pts) == 1:
        return pts[0].copy(), 0.0
    scale = float(np.abs(pts).max()) + 1.0
    slack = 1e-12 * scale

    def covers(center, radius):
        return bool(np.all(np.hypot(*(pts - center).T) <= radius + slack))

    best_c, best_r = None, math.inf
    for a, b in itertools.combinations(pts, 2):
        c = 0.5 * (a + b)
        r = 0.5 * math.hypot(*(a - b))
        if r < best_r and covers(c, r):
            best_c, best_r = c, r
    for a, b, d in itertools.combinations(pts, 3):
        den = 2.0 * (a[0] * (b[1] - d[1]) + b[0] * (d[1] - a[1]) + d[0] * (a[1] - b[1]))
        if abs(den) < 1e-14 * scale * scale:
            continue  # collinear: supported by a pair
        ux = ((a @ a) * (b[1] - d[1]) + (b @ b) * (d[1] - a[1]) + (d @ d) * (a[1] - b[1])) / den
        uy = ((a @ a) * (d[0] - b[0]) + (b @ b) * (a[0] - d[0]) + (d @ d) * (b[0] - a[0])) / den
        c = np.array([ux, uy])
        r = float(np.hypot(*(a - c)))
        if r < best_r and covers(c, r):
            best_c, best_r = c, r
    return best_c, float(best_r)


def enclosing_radius_from_projection(points: Iterable[tuple[float, float]]) -> float:
    """Radius of the smallest disk containing the projected domain sample."""
    _, r = smallest_enclosing_disk(points)
    return r
