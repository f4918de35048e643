import mpmath
import numpy as np
import pytest

from core.exceptions import InvalidNodes
from models.polynomials import LocalPolynomial
from services.interpolation_service import (
    divided_difference,
    equidistant_nodes,
    integrate_from,
    interpolate,
    rebase,
)


def _random_distinct_nodes(rng, count, min_gap=0.1):
    while True:
        nodes = np.sort(rng.uniform(-1.0, 1.0, size=count))
        if count == 1 or np.min(np.diff(nodes)) >= min_gap:
            return nodes


def _vandermonde_leading_coefficient(nodes, values):
    """Leading coefficient of the interpolant via a 40-digit Vandermonde solve."""
    with mpmath.workdps(40):
        n = len(nodes)
        matrix = mpmath.matrix([[mpmath.mpf(float(t)) ** k for k in range(n)] for t in nodes])
        rhs = mpmath.matrix([mpmath.mpf(float(v)) for v in values])
        return float(mpmath.lu_solve(matrix, rhs)[n - 1])


class TestEquidistantNodes:
    def test_single_node_is_left_endpoint(self):
        np.testing.assert_array_equal(equidistant_nodes(0.0, 1.0, 1), [0.0])

    def test_equal_spacing(self):
        np.testing.assert_array_equal(equidistant_nodes(0.0, 1.0, 3), [0.0, 0.5, 1.0])
        np.testing.assert_array_equal(equidistant_nodes(2.0, 4.0, 2), [2.0, 4.0])

    def test_endpoints_are_exact(self):
        nodes = equidistant_nodes(0.1, 0.7, 7)
        assert nodes[0] == 0.1
        assert nodes[-1] == 0.7
        assert np.all(np.diff(nodes) > 0)

    @pytest.mark.parametrize("x0, x1, count", [(0.0, 1.0, 0), (1.0, 1.0, 2), (2.0, 1.0, 2), (0.0, 1.0, 12)])
    def test_invalid(self, x0, x1, count):
        with pytest.raises(InvalidNodes):
            equidistant_nodes(x0, x1, count)


class TestInterpolate:
    def test_one_point_is_constant(self):
        poly = interpolate([0.0], [[5.0]])
        np.testing.assert_array_equal(poly.coefficients, [[5.0]])

    def test_linear_through_origin(self):
        poly = interpolate([0.0, 1.0], [[0.0], [2.0]])
        np.testing.assert_allclose(poly.coefficients[:, 0], [0.0, 2.0], atol=1e-15)

    def test_reproduces_quadratic(self):
        nodes = [0.0, 0.5, 1.0]
        poly = interpolate(nodes, [[t**2] for t in nodes])
        np.testing.assert_allclose(poly.coefficients[:, 0], [0.0, 0.0, 1.0], atol=1e-14)

    def test_reproduces_values_at_nodes(self):
        rng = np.random.default_rng(3)
        nodes = _random_distinct_nodes(rng, 5)
        values = rng.normal(size=(5, 2))
        poly = interpolate(nodes, values)
        for t, value in zip(nodes, values):
            np.testing.assert_allclose(poly(t), value, rtol=1e-11, atol=1e-13)

    def test_polynomial_exactness_on_random_instances(self):
        """Rule: degree <= count-1 polynomials come back coefficient for coefficient."""
        rng = np.random.default_rng(11)
        for _ in range(200):
            count = int(rng.integers(1, 6))
            nodes = np.sort(rng.uniform(0.0, 1.0, size=count))
            if count > 1 and np.min(np.diff(nodes)) < 0.1:
                continue
            coefficients = rng.normal(size=count)
            values = [[np.polynomial.polynomial.polyval(t, coefficients)] for t in nodes]
            poly = interpolate(nodes, values, origin=0.0)
            np.testing.assert_allclose(poly.coefficients[:, 0], coefficients, rtol=1e-10, atol=1e-10)

    def test_coincident_nodes(self):
        with pytest.raises(InvalidNodes):
            interpolate([0.0, 0.0], [[1.0], [2.0]])

    def test_mismatched_lengths(self):
        with pytest.raises(InvalidNodes):
            interpolate([0.0, 1.0], [[1.0]])


class TestIntegrateFrom:
    def test_zero_derivative(self):
        poly = integrate_from(LocalPolynomial(origin=0.0, coefficients=[[0.0]]), 0.0, [3.0])
        assert poly(0.7).tolist() == [3.0]

    def test_constant_slope(self):
        poly = integrate_from(LocalPolynomial(origin=0.0, coefficients=[[2.5]]), 0.0, [0.0])
        np.testing.assert_array_equal(poly.coefficients[:, 0], [0.0, 2.5])

    def test_antiderivative_of_2t(self):
        poly = integrate_from(LocalPolynomial(origin=0.0, coefficients=[[0.0], [2.0]]), 0.0, [1.0])
        np.testing.assert_array_equal(poly.coefficients[:, 0], [1.0, 0.0, 1.0])

    def test_anchor_is_exact_after_rebase(self):
        """Rule: P(x_i) = y_i exactly even when poly is expanded elsewhere."""
        poly = LocalPolynomial(origin=0.0, coefficients=[[1.0], [-3.0], [0.5]])
        integrated = integrate_from(poly, 0.3, [0.123456789])
        assert integrated.origin == 0.3
        assert integrated(0.3).tolist() == [0.123456789]

    def test_rebase_preserves_values(self):
        poly = LocalPolynomial(origin=0.0, coefficients=[[1.0], [-3.0], [0.5], [2.0]])
        shifted = rebase(poly, 0.75)
        for t in (0.0, 0.4, 1.3):
            np.testing.assert_allclose(shifted(t), poly(t), rtol=1e-13, atol=1e-13)


class TestDividedDifference:
    def test_slope_of_identity(self):
        np.testing.assert_array_equal(divided_difference([0.0, 1.0], [[0.0], [1.0]]), [1.0])

    def test_leading_coefficient_of_square(self):
        np.testing.assert_array_equal(divided_difference([0.0, 1.0, 2.0], [[0.0], [1.0], [4.0]]), [1.0])

    def test_cube_on_three_nodes(self):
        nodes = [0.0, 0.5, 1.0]
        dd = divided_difference(nodes, [[t**3] for t in nodes])
        assert dd[0] == pytest.approx(1.5, rel=1e-14)
        assert dd[0] == pytest.approx(_vandermonde_leading_coefficient(nodes, [t**3 for t in nodes]), rel=1e-14)

    def test_matches_vandermonde_oracle(self):
        """Rule: the top divided difference is the interpolant's leading coefficient."""
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            count = int(rng.integers(1, 7))
            nodes = _random_distinct_nodes(rng, count)
            values = rng.uniform(-1.0, 1.0, size=count)
            dd = divided_difference(nodes, values.reshape(-1, 1))[0]
            oracle = _vandermonde_leading_coefficient(nodes, values)
            assert abs(dd - oracle) <= 1e-8 * max(abs(oracle), 1.0)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(5)
        nodes = _random_distinct_nodes(rng, 5)
        values = rng.normal(size=(5, 1))
        order = rng.permutation(5)
        np.testing.assert_allclose(
            divided_difference(nodes[order], values[order]),
            divided_difference(nodes, values),
            rtol=1e-10,
        )

    def test_componentwise(self):
        rng = np.random.default_rng(9)
        nodes = _random_distinct_nodes(rng, 4)
        values = rng.normal(size=(4, 3))
        stacked = divided_difference(nodes, values)
        for k in range(3):
            assert stacked[k] == divided_difference(nodes, values[:, k : k + 1])[0]

    def test_coincident_nodes(self):
        with pytest.raises(InvalidNodes):
            divided_difference([0.0, 1.0, 1.0], [[0.0], [1.0], [2.0]])
