"""
Tests for exponent arithmetic and the admissibility regions.
"""

import unittest
import sys
import os
from fractions import Fraction

from hypothesis import given, strategies as st

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from errors import InvalidExponentError
from exponents import (
    INFINITY,
    ExponentPair,
    boundary_distance,
    conjugate,
    dual_extension_region,
    parse_index,
    predicted_dilation_slope,
    predicted_knapp_slope,
    sphere_comparison,
    sphere_conjecture_region,
    torus_admissible,
)

indices = st.fractions(min_value=1, max_value=8, max_denominator=50)


class TestConjugate(unittest.TestCase):
    """Test conjugate exponents."""

    def test_examples(self):
        """Test conjugates of 1, 2, 4/3 and ∞."""
        self.assertEqual(conjugate(1), INFINITY)
        self.assertEqual(conjugate(2), 2)
        self.assertEqual(conjugate(Fraction(4, 3)), 4)
        self.assertEqual(conjugate(INFINITY), 1)
        self.assertAlmostEqual(conjugate(1.2), 6.0, places=12)

    def test_rejects_small_index(self):
        """Test that indices below 1 raise InvalidExponentError."""
        with self.assertRaises(InvalidExponentError):
            conjugate(0.5)
        with self.assertRaises(InvalidExponentError):
            ExponentPair(0.5, 1)

    @given(indices)
    def test_involution(self, p):
        """Test that conjugation is an involution on exact indices."""
        self.assertEqual(conjugate(conjugate(p)), p)


class TestParseIndex(unittest.TestCase):
    """Test parsing of Lebesgue indices."""

    def test_parses_fractions_and_infinity(self):
        """Test exact parsing of decimals, fractions and ∞."""
        self.assertEqual(parse_index("4/3"), Fraction(4, 3))
        self.assertEqual(parse_index("1.2"), Fraction(6, 5))
        self.assertEqual(parse_index("inf"), INFINITY)
        self.assertEqual(parse_index("∞"), INFINITY)

    def test_rejects_garbage(self):
        """Test that malformed and sub-1 indices are rejected."""
        for text in ("abc", "1/0", "0.5"):
            with self.assertRaises(InvalidExponentError):
                parse_index(text)


class TestTorusRegion(unittest.TestCase):
    """Test the torus restriction region and its relatives."""

    def test_examples(self):
        """Test membership on both sides of both boundaries."""
        self.assertTrue(torus_admissible(ExponentPair(1, 4)))
        self.assertTrue(torus_admissible(ExponentPair(Fraction(6, 5), 2)))
        self.assertFalse(torus_admissible(ExponentPair(Fraction(6, 5), Fraction(21, 10))))
        self.assertFalse(torus_admissible(ExponentPair(Fraction(4, 3), 1)))
        self.assertFalse(torus_admissible(ExponentPair(Fraction(3, 2), 1)))

    def test_float_boundary_is_inclusive(self):
        """Test that q = p'/3 counts as admissible for float inputs."""
        self.assertTrue(torus_admissible(ExponentPair(1.2, 2.0)))

    def test_sphere_examples(self):
        """Test the conjectured sphere region in R^4."""
        self.assertFalse(sphere_conjecture_region(4, ExponentPair(Fraction(3, 2), 2)))
        self.assertTrue(sphere_conjecture_region(4, ExponentPair(Fraction(3, 2), Fraction(9, 5))))
        with self.assertRaises(InvalidExponentError):
            sphere_conjecture_region(1, ExponentPair(1, 1))

    def test_sphere_in_plane_matches_torus_condition(self):
        """Test that the circle region in R^2 has the same p'/3 law."""
        for p in (Fraction(1), Fraction(11, 10), Fraction(6, 5), Fraction(13, 10), Fraction(4, 3), Fraction(3, 2)):
            for q in (Fraction(1), Fraction(3, 2), Fraction(2), Fraction(3), Fraction(4)):
                pair = ExponentPair(p, q)
                self.assertEqual(sphere_conjecture_region(2, pair), torus_admissible(pair))

    def test_dual_extension_examples(self):
        """Test the extension region at and away from p' = 4."""
        self.assertFalse(dual_extension_region(4, 10))
        self.assertFalse(dual_extension_region(6, 1.5))
        self.assertTrue(dual_extension_region(6, 2))
        self.assertTrue(dual_extension_region(INFINITY, 1))

    @given(indices, indices)
    def test_duality(self, p, q):
        """Test that (p, q) is admissible iff (p', q') lies in the extension region."""
        pair = ExponentPair(p, q)
        self.assertEqual(torus_admissible(pair), dual_extension_region(conjugate(p), conjugate(q)))

    @given(indices, indices, indices)
    def test_monotone_in_q(self, p, q1, q2):
        """Test that shrinking q keeps an admissible pair admissible."""
        low, high = sorted((q1, q2))
        if torus_admissible(ExponentPair(p, high)):
            self.assertTrue(torus_admissible(ExponentPair(p, low)))


class TestSlopesAndDistance(unittest.TestCase):
    """Test predicted slopes and boundary distance."""

    def test_knapp_slope(self):
        """Test n·(1/q - 3/p') at a few pairs."""
        self.assertAlmostEqual(predicted_knapp_slope(ExponentPair(1, 1), n=2), 2.0)
        self.assertAlmostEqual(predicted_knapp_slope(ExponentPair(Fraction(6, 5), 1), n=2), 1.0)
        self.assertAlmostEqual(predicted_knapp_slope(ExponentPair(Fraction(6, 5), 2), n=2), 0.0)

    def test_dilation_slope(self):
        """Test that the dilation slope changes sign at p = 4/3."""
        self.assertAlmostEqual(predicted_dilation_slope(Fraction(4, 3)), 0.0)
        self.assertAlmostEqual(predicted_dilation_slope(2, n=2), 1.0)
        self.assertLess(predicted_dilation_slope(1), 0)

    def test_boundary_distance(self):
        """Test distance to the line p = 4/3 and to the curve q = p'/3."""
        self.assertAlmostEqual(boundary_distance(ExponentPair(1, 1)), 1.0 / 3.0, places=9)
        self.assertLess(boundary_distance(ExponentPair(1.2, 2.0)), 2e-3)
        self.assertLess(boundary_distance(ExponentPair(Fraction(4, 3), 3)), 1e-12)

    def test_curve_stops_at_corner(self):
        """Test that q = p'/3 past p = 4/3 does not count as a boundary."""
        # (3/2, 1) lies on q = p'/3 but outside the region's corner
        self.assertAlmostEqual(boundary_distance(ExponentPair(Fraction(3, 2), 1)), 1.0 / 6.0, places=12)
        self.assertAlmostEqual(boundary_distance(ExponentPair(Fraction(29, 20), 1)), 7.0 / 60.0, places=12)
        self.assertAlmostEqual(boundary_distance(ExponentPair(Fraction(7, 5), Fraction(11, 10))), 1.0 / 15.0, places=12)

    def test_sphere_comparison_counts(self):
        """Test that the torus region on T^2 lies inside the sphere region in R^4."""
        p_values = [Fraction(k, 10) for k in range(10, 21)]
        q_values = [Fraction(k, 4) for k in range(4, 17)]
        counts = sphere_comparison(2, p_values, q_values)
        self.assertEqual(counts['total'], len(p_values) * len(q_values))
        self.assertEqual(counts['both'], counts['torus'])
        self.assertGreater(counts['sphere'], counts['torus'])


if __name__ == '__main__':
    unittest.main(verbosity=2)
