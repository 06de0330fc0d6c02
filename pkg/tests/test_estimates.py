import math
import warnings

import pytest

from horograph.barriers import PhiBounds, build_barrier_params
from horograph.errors import CollarEmptyWarning
from horograph.estimates import (boundary_modulus_delta0,
                                 check_boundary_gradient,
                                 check_global_gradient, check_length_bounds,
                                 check_modulus, count_modulus_violations,
                                 run_estimates)
from horograph.fields import ScalarField
from horograph.geometry import BoundaryData, DomainSpec, compute_quantities
from horograph.solver import continuation_solve
from horograph.surfaces import GeodesicPlane, XSinhT

GEODESIC = GeodesicPlane(radius=2.0, center=(1.0,))


@pytest.fixture(scope="module")
def geodesic_problem():
    d = DomainSpec.rectangle(0.5, 1.5, 0.0, 1.0, 24, 24)
    f = BoundaryData.from_callable(d, GEODESIC.trace, provenance="oracle")
    return d, f


@pytest.fixture(scope="module")
def width2_solution():
    d = DomainSpec.rectangle(0.0, 2.0, 0.0, 1.0, 24, 24)
    f = BoundaryData.constant(d, 1.0)
    field = continuation_solve(d, f).final
    return d, f, field


class TestLengthBounds:
    def test_geodesic_samples_pass(self, geodesic_problem):
        d, f = geodesic_problem
        q = compute_quantities(d, f)
        fld = ScalarField.from_oracle(d, GEODESIC)
        frag = check_length_bounds(fld, q)
        assert frag.passed
        assert frag.observed_max <= q.f_max < q.barrier_radius

    def test_constant_at_minimum_fails_strict_lower(self, geodesic_problem):
        d, f = geodesic_problem
        q = compute_quantities(d, f)
        flat = ScalarField.constant(d, f, fill=q.f_min)
        assert not check_length_bounds(flat, q).passed

    def test_converged_width2_field_passes(self, width2_solution):
        d, f, field = width2_solution
        q = compute_quantities(d, f)
        frag = check_length_bounds(field, q)
        assert frag.passed
        assert frag.observed_max < math.sqrt(2.0)


class TestBoundaryGradient:
    def test_constant_field_trivial_gradient(self):
        d = DomainSpec.rectangle(0, 1, 0, 1, 16, 16)
        f = BoundaryData.constant(d, 1.0)
        q = compute_quantities(d, f)
        params = build_barrier_params(q, PhiBounds(sup=1.0, grad_sup=0.0,
                                                   hess_sup=0.0))
        fld = ScalarField.constant(d, f)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", CollarEmptyWarning)
            frag = check_boundary_gradient(fld, params)
        assert frag.observed_max_boundary_grad == pytest.approx(0.0, abs=1e-12)
        assert frag.passed

    def test_geodesic_field_collar_signs(self, geodesic_problem):
        d, f = geodesic_problem
        q = compute_quantities(d, f)
        fld = ScalarField.from_oracle(d, GEODESIC)
        params = build_barrier_params(q, PhiBounds(sup=q.f_max, grad_sup=0.3,
                                                   hess_sup=0.7))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", CollarEmptyWarning)
            frag = check_boundary_gradient(fld, params)
        for check in frag.barrier_checks:
            assert check.passed, check
        assert frag.passed

    def test_converged_field_bounded_by_assembled_constant(self, width2_solution):
        d, f, field = width2_solution
        q = compute_quantities(d, f)
        params = build_barrier_params(q, PhiBounds(sup=q.f_max, grad_sup=0.0,
                                                   hess_sup=0.0))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", CollarEmptyWarning)
            frag = check_boundary_gradient(field, params)
        assert frag.observed_max_boundary_grad <= frag.c_assembled
        assert frag.passed

    def test_collar_shrunk_when_wider_than_inradius(self):
        d = DomainSpec.rectangle(0, 0.5, 0, 1, 16, 16)
        f = BoundaryData.constant(d, 1.0)
        q = compute_quantities(d, f)
        params = build_barrier_params(q, PhiBounds(sup=1.0, grad_sup=0.0,
                                                   hess_sup=0.0))
        assert params.collar_width > d.inradius
        fld = ScalarField.constant(d, f)
        with pytest.warns(CollarEmptyWarning):
            frag = check_boundary_gradient(fld, params)
        assert frag.collar_shrunk and frag.collar_width < d.inradius


class TestModulus:
    def test_constant_field_no_violations(self):
        d = DomainSpec.rectangle(0, 1, 0, 1, 16, 16)
        f = BoundaryData.constant(d, 1.0)
        fld = ScalarField.constant(d, f)
        frag = check_modulus(fld, f, eps_target=0.3)
        assert frag.violations == 0 and frag.passed
        assert frag.delta > 0.0

    def test_delta0_for_constant_data_is_diameter(self):
        d = DomainSpec.rectangle(0, 1, 0, 1, 8, 8)
        f = BoundaryData.constant(d, 1.0)
        assert boundary_modulus_delta0(d, f, 0.3) == pytest.approx(math.sqrt(2.0))

    def test_delta0_detects_oscillation_scale(self):
        d = DomainSpec.rectangle(0, 1, 0, 1, 8, 8)
        f = BoundaryData.from_callable(d, lambda x, t: 1.0 + x)
        # eps/3 oscillation over x-distance eps/3; adjacent nodes differ by 1/8
        delta0 = boundary_modulus_delta0(d, f, 3 * 0.25)
        assert delta0 == pytest.approx(0.25, abs=1e-12)

    def test_perturbed_field_detected(self):
        d = DomainSpec.rectangle(0, 1, 0, 1, 16, 16)
        f = BoundaryData.constant(d, 1.0)
        fld = ScalarField.constant(d, f)
        vals = fld.values.copy()
        vals[1, 8] += 0.3  # one cell away from the left boundary
        pert = fld.with_values(vals)
        assert count_modulus_violations(pert, f, delta=2.5 * d.h_x,
                                        eps_target=0.3) >= 1
        frag = check_modulus(pert, f, eps_target=0.3, delta=2.5 * d.h_x)
        assert frag.violations >= 1 and not frag.passed

    def test_converged_field_passes(self, width2_solution):
        d, f, field = width2_solution
        frag = check_modulus(field, f, eps_target=0.1)
        assert frag.violations == 0 and frag.passed


class TestGlobalGradient:
    def test_x_sinh_t_hypothesis_genuinely_restrictive(self):
        d = DomainSpec.rectangle(1, 2, 1, 2, 24, 24)
        fld = ScalarField.from_oracle(d, XSinhT())
        c1, c2 = math.sinh(1.0), 2.0 * math.sinh(2.0)
        assert c1 * (1.0 + math.sqrt(math.pi / 2.0)) < c2
        frag = check_global_gradient(fld, c1, c2, fld.max_boundary_gradient())
        assert not frag.hypothesis_ok and not frag.passed
        assert math.isnan(frag.bound)

    def test_width_half_case_passes(self):
        d = DomainSpec.rectangle(0.0, 0.5, 0.0, 1.0, 24, 24)
        f = BoundaryData.constant(d, 1.0)
        field = continuation_solve(d, f).final
        q = compute_quantities(d, f)
        frag = check_global_gradient(field, q.f_min, q.barrier_radius,
                                     field.max_boundary_gradient())
        assert frag.hypothesis_ok and frag.bounds_consistent and frag.passed
        assert frag.observed_max_grad <= frag.bound

    def test_constant_field_zero_gradient(self):
        d = DomainSpec.rectangle(0, 1, 0, 1, 12, 12)
        f = BoundaryData.constant(d, 1.0)
        fld = ScalarField.constant(d, f)
        frag = check_global_gradient(fld, 1.0, 1.2, 0.0)
        assert frag.passed and frag.observed_max_grad == pytest.approx(0.0, abs=1e-12)


class TestReport:
    def test_report_recomputable(self, width2_solution):
        d, f, field = width2_solution
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", CollarEmptyWarning)
            r1 = run_estimates(field, f)
            r2 = run_estimates(field, f)
        assert r1.to_dict() == r2.to_dict()
        assert r1.passed

    def test_report_shape(self, width2_solution):
        d, f, field = width2_solution
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", CollarEmptyWarning)
            doc = run_estimates(field, f).to_dict()
        assert set(doc) == {"length_bound", "boundary_gradient", "modulus",
                            "global_gradient", "pass"}
        assert doc["length_bound"]["pass"]
