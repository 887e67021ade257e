import numpy as np
import pytest

from intervalnet.stats import inverse_normal_cdf, normal_cdf, two_sided_z

from helpers import normal_quantile_quadrature


class TestInverseNormalCdf:
    def test_against_quadrature_oracle(self):
        # independent oracle: Simpson quadrature of the pdf + bisection
        for p in (0.001, 0.01, 0.1, 0.25, 0.5, 0.85, 0.9, 0.95, 0.975, 0.999):
            oracle = normal_quantile_quadrature(p)
            assert abs(inverse_normal_cdf(p) - oracle) < 1e-8

    def test_round_trip_with_cdf(self):
        for p in np.linspace(1e-6, 1 - 1e-6, 41):
            assert abs(normal_cdf(inverse_normal_cdf(float(p))) - p) < 1e-12

    def test_symmetry(self):
        for p in (0.01, 0.2, 0.4):
            assert inverse_normal_cdf(p) == pytest.approx(-inverse_normal_cdf(1 - p), abs=1e-12)

    def test_median_is_zero(self):
        assert abs(inverse_normal_cdf(0.5)) < 1e-15

    def test_domain_errors(self):
        for bad in (0.0, 1.0, -0.3, 2.0):
            with pytest.raises(ValueError):
                inverse_normal_cdf(bad)


class TestTwoSidedZ:
    def test_reference_multipliers(self):
        # oracle values computed with normal_quantile_quadrature((1+T)/2)
        assert two_sided_z(0.90) == pytest.approx(1.6449, abs=5e-5)
        assert two_sided_z(0.80) == pytest.approx(1.2816, abs=5e-5)
        assert two_sided_z(0.70) == pytest.approx(1.0364, abs=5e-5)

    def test_matches_quantile_definition(self):
        for t in (0.5, 0.7, 0.99):
            assert two_sided_z(t) == inverse_normal_cdf((1 + t) / 2)
