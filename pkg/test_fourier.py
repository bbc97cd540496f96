"""
Tests for restriction to the torus, partial transforms and the quadrature oracle.
"""

import unittest
import sys
import os

import numpy as np
from numpy.testing import assert_allclose

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from errors import (
    DimensionMismatchError,
    DomainError,
    FactorizationMismatchError,
    InsufficientTruncationError,
)
from fourier import (
    SurfaceSamples,
    numeric_ft,
    partial_ft_array,
    partial_ft_factorized,
    restrict_ft_to_torus,
)
from functions import (
    AnnularBump,
    IndicatorBox,
    IsotropicGaussian,
    KnappTube,
    Scaled,
    TensorProduct,
    fourier_closed_form,
    tensor_power,
)
from geometry import TorusGrid


class TestRestriction(unittest.TestCase):
    """Test sampling of f̂ on the torus."""

    def test_gaussian_is_constant_on_torus(self):
        """Test that the Gaussian transform equals e^{-πn} at every torus node."""
        f = tensor_power(IsotropicGaussian(1.0, 2), 2)
        samples = restrict_ft_to_torus(f, TorusGrid(2, 16))
        self.assertTrue(samples.is_factorized)
        self.assertEqual(samples.count, 256)
        assert_allclose(samples.array(), np.exp(-2 * np.pi), rtol=1e-14)

    def test_factorized_matches_pointwise(self):
        """Test that factored and pointwise sampling agree node by node."""
        f = TensorProduct((KnappTube(0.25, 0.1), IndicatorBox((0.3, 0.7))))
        grid = TorusGrid(2, 24)
        factored = restrict_ft_to_torus(f, grid)
        direct = restrict_ft_to_torus(f, grid, factorized=False)
        self.assertFalse(direct.is_factorized)
        assert_allclose(factored.array(), direct.values, rtol=1e-12, atol=1e-14)

    def test_scaled_tensor_factorizes(self):
        """Test that a constant multiple of a tensor keeps the factored path."""
        base = tensor_power(IsotropicGaussian(0.8, 2), 2)
        grid = TorusGrid(2, 8)
        samples = restrict_ft_to_torus(Scaled(3.0, base), grid)
        self.assertTrue(samples.is_factorized)
        assert_allclose(samples.array(), 3.0 * restrict_ft_to_torus(base, grid).array(), rtol=1e-14)

    def test_single_circle(self):
        """Test restriction of a planar function to T^1."""
        samples = restrict_ft_to_torus(IsotropicGaussian(1.0, 2), TorusGrid(1, 8))
        self.assertEqual(samples.array().shape, (8,))

    def test_errors(self):
        """Test dimension mismatch and forced factorization of a non-tensor."""
        with self.assertRaises(DimensionMismatchError):
            restrict_ft_to_torus(IsotropicGaussian(1.0, 2), TorusGrid(2, 8))
        with self.assertRaises(DomainError):
            restrict_ft_to_torus(IsotropicGaussian(1.0, 4), TorusGrid(2, 8), factorized=True)

    def test_samples_validate_shapes(self):
        """Test that SurfaceSamples needs exactly one well-shaped representation."""
        grid = TorusGrid(2, 4)
        with self.assertRaises(DomainError):
            SurfaceSamples(grid)
        with self.assertRaises(DimensionMismatchError):
            SurfaceSamples(grid, values=np.ones((4, 5)))
        with self.assertRaises(DimensionMismatchError):
            SurfaceSamples(grid, factors=(np.ones(4),))


class TestPartialTransform(unittest.TestCase):
    """Test iterated partial transforms of g⊗h."""

    def test_iterated_equals_direct(self):
        """Test ĝ(ξ)ĥ(η) against the four-dimensional transform."""
        g = IsotropicGaussian(1.0, 2)
        h = KnappTube(0.125)
        f = TensorProduct((g, h))
        xi, eta = np.array([0.2, -0.1]), np.array([1.0, 0.05])
        value = partial_ft_factorized(f, xi, eta)
        self.assertAlmostEqual(value, fourier_closed_form(g, xi) * fourier_closed_form(h, eta))

    def test_mismatch_is_reported(self):
        """Test that a factor whose transform disagrees with its product raises."""

        class Drifting(IsotropicGaussian):
            calls = 0

            def fourier(self, xi):
                Drifting.calls += 1
                return super().fourier(xi) * (1.0 + 1e-6 * Drifting.calls)

        f = TensorProduct((Drifting(1.0, 2), IsotropicGaussian(1.0, 2)))
        with self.assertRaises(FactorizationMismatchError):
            partial_ft_factorized(f, np.zeros(2), np.zeros(2))

    def test_requires_two_planar_factors(self):
        """Test that non-tensor input is rejected."""
        with self.assertRaises(DomainError):
            partial_ft_factorized(IsotropicGaussian(1.0, 4), np.zeros(2), np.zeros(2))

    def test_partial_array_shape(self):
        """Test the (surface node, ambient node) layout of |F_y f(x, η)|."""
        f = TensorProduct((IsotropicGaussian(1.0, 2), IsotropicGaussian(0.5, 2)))
        x_nodes = np.array([[0.0, 0.0], [0.5, 0.0], [0.0, 1.0]])
        values = partial_ft_array(f, x_nodes, TorusGrid(1, 16))
        self.assertEqual(values.shape, (16, 3))
        assert_allclose(values[:, 0], 0.25 * np.exp(-np.pi * 0.25), rtol=1e-14)
        with self.assertRaises(DimensionMismatchError):
            partial_ft_array(f, x_nodes, TorusGrid(2, 16))


class TestQuadratureOracle(unittest.TestCase):
    """Test the Gauss–Legendre oracle against closed forms."""

    def assertOracleAgrees(self, f, frequencies, peak, nodes=128, rtol=1e-8):
        for xi in frequencies:
            exact = fourier_closed_form(f, xi)
            numeric = numeric_ft(f, xi, nodes=nodes)
            self.assertLessEqual(abs(numeric - exact), rtol * abs(exact) + 1e-9 * peak,
                                 f"{f.label} at {xi}")

    def test_gaussian(self):
        """Test the Gaussian oracle at random frequencies."""
        rng = np.random.default_rng(7)
        self.assertOracleAgrees(IsotropicGaussian(1.3, 2), rng.normal(size=(20, 2)) * 0.5, peak=1.69)

    def test_box(self):
        """Test the box oracle, which integrates a polynomial phase exactly enough."""
        rng = np.random.default_rng(8)
        self.assertOracleAgrees(IndicatorBox((0.5, 0.25)), rng.normal(size=(20, 2)) * 2, peak=0.5)

    def test_knapp(self):
        """Test the Knapp oracle near its cap."""
        rng = np.random.default_rng(9)
        tube = KnappTube(0.25, 0.2)
        frequencies = tube.frequency + rng.normal(size=(20, 2)) * 0.5
        self.assertOracleAgrees(tube, frequencies, peak=tube.area)

    def test_annular(self):
        """Test the annular oracle near the unit circle."""
        rng = np.random.default_rng(10)
        bump = AnnularBump(2.0)
        angles = rng.uniform(0, 2 * np.pi, size=20)
        radii = rng.uniform(0.5, 1.5, size=20)
        frequencies = np.stack([radii * np.cos(angles), radii * np.sin(angles)], axis=-1)
        peak = abs(fourier_closed_form(bump, [1.0, 0.0]))
        self.assertOracleAgrees(bump, frequencies, peak, nodes=200, rtol=1e-7)

    def test_tensor_and_scaled(self):
        """Test that tensors and constant multiples reuse factor oracles."""
        f = Scaled(2.0, TensorProduct((IsotropicGaussian(1.0, 2), IndicatorBox((0.5, 0.5)))))
        xi = np.array([0.1, 0.2, 0.3, -0.4])
        self.assertAlmostEqual(numeric_ft(f, xi, nodes=64), fourier_closed_form(f, xi), places=10)

    def test_insufficient_truncation(self):
        """Test that a box of radius 2 around a wide Gaussian is rejected."""
        with self.assertRaises(InsufficientTruncationError) as ctx:
            numeric_ft(IsotropicGaussian(2.0, 2), np.zeros(2), radius=2.0)
        self.assertGreater(ctx.exception.tail_bound, 1e-12)

    def test_frequency_dimension(self):
        """Test that a frequency of the wrong length is rejected."""
        with self.assertRaises(DimensionMismatchError):
            numeric_ft(IsotropicGaussian(1.0, 2), np.zeros(3))


if __name__ == '__main__':
    unittest.main(verbosity=2)
