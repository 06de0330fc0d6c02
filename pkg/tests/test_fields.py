import numpy as np
import pytest

from horograph.fields import ScalarField
from horograph.geometry import BoundaryData, DomainSpec


def rect(n=8, box=(0.0, 1.0, 0.0, 1.0)):
    return DomainSpec.rectangle(*box, n, n)


class TestConstruction:
    def test_boundary_values_stamped_exactly(self):
        d = rect()
        f = BoundaryData.from_callable(d, lambda x, t: 1.0 + x + 2 * t)
        fld = ScalarField.constant(d, f, fill=5.0)
        for node, v in f.values.items():
            assert fld.values[node] == v

    def test_blend_affine_exact(self):
        d = rect(12)
        f = BoundaryData.from_callable(d, lambda x, t: 1.0 + 0.5 * x - 0.25 * t)
        fld = ScalarField.blend(d, f)
        X, T = d.node_x_grid, d.node_t_grid
        exact = 1.0 + 0.5 * X - 0.25 * T
        assert np.allclose(fld.values[d.in_mask], exact[d.in_mask], atol=1e-14)

    def test_shape_validated(self):
        d = rect()
        f = BoundaryData.constant(d, 1.0)
        with pytest.raises(ValueError):
            ScalarField(d, np.zeros((3, 3)), f)


class TestCalculus:
    def test_gradient_exact_on_quadratics(self):
        d = rect(10, (0.0, 2.0, -1.0, 1.0))
        fld = ScalarField.from_callable(
            d, lambda x, t: 2.0 + x * x + 0.5 * x * t - t * t, positive=False)
        gx, gt = fld.gradient()
        X, T = d.node_x_grid, d.node_t_grid
        mask = d.in_mask
        assert np.allclose(gx[mask], (2 * X + 0.5 * T)[mask], atol=1e-11)
        assert np.allclose(gt[mask], (0.5 * X - 2 * T)[mask], atol=1e-11)

    def test_second_derivatives_exact_on_quadratics(self):
        d = rect(10)
        fld = ScalarField.from_callable(
            d, lambda x, t: 3.0 + x * x - x * t + 2 * t * t)
        gxx, gtt, gxt = fld.second_derivatives()
        inner = ~np.isnan(gxx)
        assert np.allclose(gxx[inner], 2.0, atol=1e-10)
        assert np.allclose(gtt[inner], 4.0, atol=1e-10)
        assert np.allclose(gxt[inner], -1.0, atol=1e-10)

    def test_max_gradient_includes_boundary(self):
        d = rect(8)
        fld = ScalarField.from_callable(d, lambda x, t: 1.0 + x)
        assert fld.max_gradient() == pytest.approx(1.0, abs=1e-12)
        assert fld.max_boundary_gradient() == pytest.approx(1.0, abs=1e-12)


class TestRescale:
    def test_values_and_domain_scale(self):
        d = rect(8, (0.5, 1.5, 0.0, 1.0))
        fld = ScalarField.from_callable(d, lambda x, t: 1.0 + 0.1 * x)
        lam = 2.0
        scaled = fld.hyperbolic_rescale(lam)
        assert scaled.domain.x_min == 1.0 and scaled.domain.x_max == 3.0
        assert scaled.domain.t_min == 0.0 and scaled.domain.t_max == 1.0
        assert np.allclose(scaled.values[scaled.domain.in_mask],
                           lam * fld.values[d.in_mask])


class TestCsv:
    def test_roundtrip_is_lossless(self, tmp_path, rng):
        d = rect(9, (0.25, 1.75, -0.5, 0.5))
        f = BoundaryData.from_callable(d, lambda x, t: 1.0 + 0.3 * x + 0.1 * t * t)
        noise = rng.uniform(1.0, 2.0, size=(d.n_x + 1, d.n_t + 1))
        fld = ScalarField(d, noise, f)
        path = tmp_path / "field.csv"
        fld.to_csv(path)
        back = ScalarField.from_csv(path, d)
        assert np.array_equal(fld.values[d.in_mask], back.values[d.in_mask])

    def test_bad_header_rejected(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ValueError):
            ScalarField.from_csv(p, rect())

    def test_missing_nodes_rejected(self, tmp_path):
        d = rect(4)
        f = BoundaryData.constant(d, 1.0)
        fld = ScalarField.constant(d, f)
        path = tmp_path / "field.csv"
        fld.to_csv(path)
        lines = path.read_text().strip().splitlines()
        path.write_text("\n".join(lines[:-3]) + "\n")
        with pytest.raises(ValueError):
            ScalarField.from_csv(path, d)
