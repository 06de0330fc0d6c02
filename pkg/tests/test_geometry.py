import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from horograph.errors import EmptyDomain, NonPositiveBoundaryData
from horograph.geometry import (BoundaryData, DomainSpec,
                                check_existence_hypotheses, compute_quantities,
                                smallest_enclosing_disk)

SQRT2 = 1.4142135623730951
THRESHOLD_UNIT = 2.2533141373155003  # 1 + sqrt(pi/2)


def rect(x0, x1, t0, t1, n=8):
    return DomainSpec.rectangle(x0, x1, t0, t1, n, n)


class TestQuantities:
    def test_constant_data_width_two(self):
        d = rect(0, 2, 0, 1)
        q = compute_quantities(d, BoundaryData.constant(d, 1.0))
        assert q.horizontal_width == 2.0
        assert q.x_center == 1.0
        assert q.enclosing_radius == 1.0
        assert q.barrier_radius == pytest.approx(SQRT2, abs=1e-15)
        assert q.f_min == q.f_max == 1.0 and q.f_osc == 0.0

    def test_degenerate_rectangle_raises(self):
        with pytest.raises(EmptyDomain):
            DomainSpec.rectangle(0, 0, 0, 1, 8, 8)

    def test_geodesic_trace_quantities(self):
        # f = sqrt(4 - (x-1)^2) sampled exactly on the boundary nodes
        d = DomainSpec.rectangle(0.5, 1.5, 0.0, 1.0, 10, 10)
        f = BoundaryData.from_callable(
            d, lambda x, t: math.sqrt(4.0 - (x - 1.0) ** 2), provenance="oracle")
        q = compute_quantities(d, f)
        assert q.f_min == pytest.approx(1.9364916731037084, abs=1e-15)
        assert q.f_max == pytest.approx(2.0, abs=1e-15)
        assert q.horizontal_width == pytest.approx(1.0, abs=1e-15)
        assert q.barrier_radius == pytest.approx(2.0615528128088303, abs=1e-15)

    def test_nonpositive_data_rejected(self):
        d = rect(0, 1, 0, 1)
        with pytest.raises(NonPositiveBoundaryData):
            BoundaryData.constant(d, 0.0)
        with pytest.raises(NonPositiveBoundaryData):
            BoundaryData.constant(d, -1.0)

    @given(dx=st.floats(-7, 7), dt=st.floats(-7, 7))
    @settings(max_examples=30, deadline=None)
    def test_translation_invariance(self, dx, dt):
        d = rect(0.25, 1.75, 0.0, 1.0)
        q0 = compute_quantities(d, BoundaryData.constant(d, 1.3))
        dT = d.translate(dx, dt)
        qT = compute_quantities(dT, BoundaryData.constant(dT, 1.3))
        assert qT.horizontal_width == pytest.approx(q0.horizontal_width, rel=1e-12)
        assert qT.barrier_radius == pytest.approx(q0.barrier_radius, rel=1e-12)
        assert qT.x_center == pytest.approx(q0.x_center + dx, abs=1e-9)

    @given(c=st.floats(0.1, 5.0))
    @settings(max_examples=30, deadline=None)
    def test_shift_property(self, c):
        d = rect(0, 1, 0, 1)
        base = BoundaryData.from_callable(d, lambda x, t: 1.0 + 0.5 * x)
        q0 = compute_quantities(d, base)
        q1 = compute_quantities(d, base.shifted(c))
        assert q1.f_min == pytest.approx(q0.f_min + c, rel=1e-12)
        assert q1.f_max == pytest.approx(q0.f_max + c, rel=1e-12)
        assert q1.horizontal_width == q0.horizontal_width
        assert q1.barrier_radius > q0.barrier_radius  # monotone in f_max

    def test_barrier_radius_monotone_in_width(self):
        radii = []
        for width in (0.5, 1.0, 2.0, 4.0):
            d = DomainSpec.rectangle(0, width, 0, 1, 8, 8)
            radii.append(compute_quantities(d, BoundaryData.constant(d, 1.0)).barrier_radius)
        assert all(r0 < r1 for r0, r1 in zip(radii, radii[1:]))


class TestHypotheses:
    def test_width_two_holds(self):
        d = rect(0, 2, 0, 1)
        h = check_existence_hypotheses(compute_quantities(d, BoundaryData.constant(d, 1.0)))
        assert h.barrier_radius == pytest.approx(SQRT2, abs=1e-15)
        assert h.threshold == pytest.approx(THRESHOLD_UNIT, abs=1e-14)
        assert h.existence_ok and h.gradient_hypothesis_ok

    def test_width_ten_fails(self):
        d = rect(0, 10, 0, 1)
        h = check_existence_hypotheses(compute_quantities(d, BoundaryData.constant(d, 1.0)))
        assert h.barrier_radius == pytest.approx(5.0990195135927845, abs=1e-14)
        assert not h.existence_ok and not h.gradient_hypothesis_ok

    def test_shift_constant(self):
        # osc 0.5 over a width-2 rectangle: smallest shift is 0.5 + 1
        d = rect(0, 2, 0, 1)
        f = BoundaryData.from_callable(d, lambda x, t: 1.0 + 0.25 * x)
        h = check_existence_hypotheses(compute_quantities(d, f))
        assert h.shift_constant == 1.5


class TestPolygon:
    def test_clockwise_rejected(self):
        with pytest.raises(ValueError):
            DomainSpec.polygon([(0, 0), (0, 1), (1, 0)], 16, 16)

    def test_nonconvex_rejected(self):
        with pytest.raises(ValueError):
            DomainSpec.polygon([(0, 0), (2, 0), (1, 0.2), (2, 2), (0, 2)], 16, 16)

    def test_triangle_mask_closure(self):
        d = DomainSpec.polygon([(0, 0), (2, 0), (1, 2)], 24, 24)
        inter = d.interior_mask
        mask = d.in_mask
        assert inter.any()
        ii, jj = np.nonzero(inter)
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                assert mask[ii + di, jj + dj].all()

    def test_polygon_quantities_from_vertices(self):
        d = DomainSpec.polygon([(0, 0), (2, 0), (1, 2)], 24, 24)
        q = compute_quantities(d, BoundaryData.constant(d, 1.0))
        assert q.horizontal_width == 2.0
        assert q.enclosing_radius == 1.0


class TestEnclosingDisk:
    def test_two_points(self):
        c, r = smallest_enclosing_disk([(0, 0), (2, 0)])
        assert r == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(c, [1, 0], atol=1e-12)

    def test_equilateral_triangle(self):
        pts = [(0, 0), (1, 0), (0.5, math.sqrt(3) / 2)]
        _, r = smallest_enclosing_disk(pts)
        assert r == pytest.approx(1 / math.sqrt(3), rel=1e-12)

    def test_radius_between_half_diam_and_diam(self, rng):
        for _ in range(25):
            pts = rng.uniform(-3, 3, size=(int(rng.integers(2, 15)), 2))
            _, r = smallest_enclosing_disk(pts)
            diam = max(np.hypot(*(p - q)) for p in pts for q in pts)
            assert diam / 2 - 1e-9 <= r < diam + 1e-9
            if len(pts) > 2:
                assert r < diam or diam == 0


class TestBoundaryData:
    def test_homotopy_lower_branch_constant(self):
        d = rect(0, 1, 0, 1)
        f = BoundaryData.from_callable(d, lambda x, t: 1.0 + x)
        h = f.homotopy(0.25)
        assert set(h.values.values()) == {0.5 * f.min}

    def test_homotopy_upper_branch(self):
        d = rect(0, 1, 0, 1)
        f = BoundaryData.from_callable(d, lambda x, t: 1.0 + x)
        h = f.homotopy(0.75)
        for node, v in f.values.items():
            assert h.values[node] == pytest.approx(0.5 * v + 0.5 * f.min, rel=1e-15)
        assert f.homotopy(1.0).values == f.values

    def test_homotopy_continuous_at_half(self):
        d = rect(0, 1, 0, 1)
        f = BoundaryData.from_callable(d, lambda x, t: 1.0 + x)
        lo = f.homotopy(0.5)
        assert set(lo.values.values()) == {f.min}

    def test_table_roundtrip(self):
        d = rect(0, 1, 0, 1, n=4)
        f = BoundaryData.from_callable(d, lambda x, t: 1.0 + x + t)
        rows = [(d.node_xy(*n)[0], d.node_xy(*n)[1], v) for n, v in f.values.items()]
        g = BoundaryData.from_table(d, rows)
        assert g.values == f.values
