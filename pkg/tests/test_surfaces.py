import math

import numpy as np
import pytest

from horograph.errors import OutsideValidity
from horograph.kernels import residual
from horograph.surfaces import (EuclideanPlane, GeodesicPlane, Horocylinder,
                                XSinhT, classify_numerically, evaluate,
                                hyperbolic_rescale, oracle_from_name)

from conftest import random_state


def sample_box(rng, oracle, box, count):
    (x0, x1), (t0, t1) = box
    pts = []
    while len(pts) < count:
        p = (float(rng.uniform(x0, x1)), float(rng.uniform(t0, t1)))
        if oracle.in_validity(p):
            pts.append(p)
    return pts


class TestEvaluate:
    def test_geodesic_second_order(self):
        o = GeodesicPlane(radius=2.0, center=(0.0,))
        p = evaluate(o, (1.0, 0.3), derivatives_up_to=2)
        assert p.g == pytest.approx(1.7320508075688772, abs=1e-15)
        assert p.grad[0] == pytest.approx(-0.5773502691896258, abs=1e-15)
        assert p.grad[1] == 0.0
        assert p.hess[0, 0] == pytest.approx(-0.7698003589195010, abs=1e-15)
        assert p.hess[1, 1] == 0.0 and p.hess[0, 1] == 0.0

    def test_horocylinder_everywhere(self):
        o = Horocylinder(height=0.7)
        p = evaluate(o, (-3.2, 11.0))
        assert p.g == 0.7
        assert np.all(p.grad == 0.0) and np.all(p.hess == 0.0)

    def test_x_sinh_t_boundary_of_positivity(self):
        with pytest.raises(OutsideValidity):
            evaluate(XSinhT(), (2.0, 0.0))

    def test_geodesic_outside_disk(self):
        with pytest.raises(OutsideValidity):
            evaluate(GeodesicPlane(radius=1.0), (1.5, 0.0))

    def test_truncated_orders(self):
        o = GeodesicPlane(radius=2.0)
        p1 = evaluate(o, (1.0, 0.0), derivatives_up_to=1)
        assert p1.grad[0] != 0.0 and np.all(p1.hess == 0.0)
        p0 = evaluate(o, (1.0, 0.0), derivatives_up_to=0)
        assert np.all(p0.grad == 0.0)

    def test_geodesic_n3(self):
        o = GeodesicPlane(radius=2.0, center=(0.0, 0.0))
        p = evaluate(o, (0.5, 0.5, 1.0))
        assert p.n == 3
        assert p.g == pytest.approx(math.sqrt(4 - 0.5), abs=1e-14)
        assert residual(p) == pytest.approx(0.0, abs=1e-12)

    def test_geodesic_n4_off_center(self):
        # offsets in every slot exercise all cross terms of the general form
        o = GeodesicPlane(radius=2.0, center=(0.1, -0.2, 0.3))
        p = evaluate(o, (0.5, 0.4, -0.3, 0.7))
        assert p.n == 4
        assert residual(p) == pytest.approx(0.0, abs=1e-12)


class TestClassification:
    def test_geodesic_solution_at_zero(self, rng):
        o = GeodesicPlane(radius=2.0, center=(1.0,))
        pts = sample_box(rng, o, ((-0.8, 2.8), (-1, 1)), 1000)
        assert classify_numerically(o, pts, eps=0.0) == "solution"

    def test_geodesic_supersolution_positive_eps(self, rng):
        o = GeodesicPlane(radius=2.0, center=(0.0,))
        pts = sample_box(rng, o, ((-1, 1), (-1, 1)), 200)
        assert classify_numerically(o, pts, eps=0.1) == "supersolution"

    def test_euclidean_plane_subsolution(self, rng):
        o = EuclideanPlane(x_slopes=(0.3,), t_slope=0.2, offset=1.0)
        pts = sample_box(rng, o, ((-1, 2), (-1, 2)), 1000)
        assert classify_numerically(o, pts, eps=0.5) == "subsolution"

    def test_horocylinder_subsolution(self, rng):
        o = Horocylinder(height=1.3)
        pts = sample_box(rng, o, ((-5, 5), (-5, 5)), 1000)
        assert classify_numerically(o, pts, eps=0.0) == "subsolution"

    def test_x_sinh_t_solution_any_eps(self, rng):
        o = XSinhT()
        pts = sample_box(rng, o, ((0.05, 2), (0.05, 2)), 1000)
        for eps in (0.0, 0.4, 1.0):
            assert classify_numerically(o, pts, eps=eps) == "solution"

    def test_numeric_matches_declared(self, rng):
        cases = [
            (GeodesicPlane(radius=1.5, center=(0.5,)), ((-0.8, 1.8), (0, 1)), 0.0),
            (GeodesicPlane(radius=1.5, center=(0.5,)), ((-0.8, 1.8), (0, 1)), 0.25),
            (Horocylinder(height=0.4), ((-2, 2), (-2, 2)), 0.7),
            (EuclideanPlane(x_slopes=(0.1,), t_slope=-0.2, offset=2.0),
             ((-2, 2), (-2, 2)), 0.0),
            (XSinhT(), ((0.1, 1.5), (0.1, 1.5)), 0.9),
        ]
        for oracle, box, eps in cases:
            pts = sample_box(rng, oracle, box, 200)
            assert classify_numerically(oracle, pts, eps) == oracle.classification(eps)


class TestRescale:
    def test_geodesic_maps_to_geodesic(self):
        o = hyperbolic_rescale(GeodesicPlane(radius=2.0, center=(0.0,)), 3.0)
        assert isinstance(o, GeodesicPlane)
        assert o.radius == 6.0 and o.center == (0.0,)

    def test_horocylinder_scales(self):
        assert hyperbolic_rescale(Horocylinder(height=0.5), 2.0).height == 1.0

    def test_x_sinh_t_fixed_point(self, rng):
        o = hyperbolic_rescale(XSinhT(), 5.0)
        assert isinstance(o, XSinhT)
        pts = sample_box(rng, o, ((0.1, 2), (0.1, 2)), 20)
        for p in pts:
            assert o.value(p) == XSinhT().value(p)

    def test_euclidean_plane_stays_planar(self):
        o = hyperbolic_rescale(EuclideanPlane(x_slopes=(0.3,), t_slope=0.2,
                                              offset=1.0), 2.0)
        assert o.x_slopes == (0.3,) and o.t_slope == 0.4 and o.offset == 2.0

    def test_rescaled_oracle_is_pointwise_rescaled_graph(self, rng):
        base = GeodesicPlane(radius=2.0, center=(1.0,))
        lam = 2.7
        scaled = hyperbolic_rescale(base, lam)
        for _ in range(50):
            x = float(rng.uniform(-0.9, 2.9))
            t = float(rng.uniform(-1, 1))
            assert scaled.value((lam * x, t)) == pytest.approx(
                lam * base.value((x, t)), rel=1e-13)

    def test_state_rescale_residual_factor(self, rng):
        for lam in (0.3, 1.0, 2.7):
            for _ in range(200):
                p = random_state(rng, n=2, eps=float(rng.uniform(0, 1 / 7.29)))
                q = hyperbolic_rescale(p, lam)
                assert q.eps == pytest.approx(p.eps * lam * lam, rel=1e-15)
                assert residual(q) == pytest.approx(lam * residual(p),
                                                    rel=1e-10, abs=1e-10)

    def test_invalid_factor(self):
        with pytest.raises(ValueError):
            hyperbolic_rescale(XSinhT(), 0.0)


class TestNames:
    def test_roundtrip(self):
        o = oracle_from_name("geodesic-plane", {"radius": 3.0, "center": 1.0})
        assert isinstance(o, GeodesicPlane) and o.radius == 3.0
        assert isinstance(oracle_from_name("horocylinder", {"height": 2.0}),
                          Horocylinder)
        assert isinstance(oracle_from_name("euclidean-plane", {}), EuclideanPlane)
        assert isinstance(oracle_from_name("x-sinh-t", None), XSinhT)

    def test_unknown_rejected(self):
        with pytest.raises(ValueError):
            oracle_from_name("catenoid", {})
