"""
Tests for restriction ratios, slope sweeps and region classification.
"""

import unittest
import sys
import os
from fractions import Fraction

import numpy as np
from numpy.testing import assert_allclose

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from errors import DomainError, UnderResolvedGridError, ZeroNormError
from exponents import ExponentPair
from experiments import (
    BOUNDARY,
    CONSISTENT,
    INADMISSIBLE,
    classify_cell,
    classify_region,
    dilation_p_probe,
    dimension_independence,
    fit_power_law,
    gaussian_sweep,
    knapp_sweep,
    minkowski_chain,
    random_planar_function,
    ratio,
    tensor_factorization_check,
    tensor_factorization_report,
)
from functions import IsotropicGaussian, KnappTube, TestFunction, tensor_power
from geometry import TorusGrid

SLOPE_TOL = 0.05

FULL_P = tuple(Fraction(20 + k, 20) for k in range(13))
FULL_Q = tuple(Fraction(20 + k, 20) for k in range(61))


class Vanishing(TestFunction):
    """Planar function with zero norm."""

    dim = 2

    def fourier(self, xi):
        return np.zeros(np.shape(xi)[:-1], dtype=complex)

    def lp_norm(self, p):
        return 0.0


class TestRatio(unittest.TestCase):
    """Test the empirical restriction constant."""

    def test_gaussian_ratio(self):
        """Test ratio of the standard Gaussian on T^1: e^{-π} / p^{-1/p}."""
        pair = ExponentPair(Fraction(6, 5), 2)
        value = ratio(IsotropicGaussian(1.0, 2), pair, TorusGrid(1, 16))
        self.assertAlmostEqual(value, np.exp(-np.pi) / 1.2 ** (-1 / 1.2), places=12)

    def test_tensor_ratio_is_product(self):
        """Test that the ratio of g⊗g on T^2 is the square of the circle ratio."""
        pair = ExponentPair(1, 2)
        g = KnappTube(0.125)
        one = ratio(g, pair, TorusGrid(1, 512))
        two = ratio(tensor_power(g, 2), pair, TorusGrid(2, 512))
        self.assertAlmostEqual(two / one ** 2, 1.0, places=12)

    def test_zero_norm(self):
        """Test that a zero-norm function raises ZeroNormError."""
        with self.assertRaises(ZeroNormError):
            ratio(Vanishing(), ExponentPair(1, 1), TorusGrid(1, 8))


class TestFitPowerLaw(unittest.TestCase):
    """Test log-log least squares."""

    def test_exact_power_law(self):
        """Test that y = 3x^{-1.5} is recovered exactly."""
        x = np.array([1.0, 2.0, 4.0, 8.0])
        slope, intercept, residual = fit_power_law(x, 3.0 * x ** -1.5)
        self.assertAlmostEqual(slope, -1.5, places=12)
        self.assertAlmostEqual(intercept, np.log(3.0), places=12)
        self.assertLess(residual, 1e-12)

    def test_rejects_degenerate_input(self):
        """Test too few points and nonpositive ratios."""
        with self.assertRaises(DomainError):
            fit_power_law([1.0, 2.0, 4.0], [1.0, 2.0, 3.0])
        with self.assertRaises(DomainError):
            fit_power_law([1.0, 2.0, 4.0, 8.0], [1.0, 0.0, 3.0, 4.0])


class TestKnappSweep(unittest.TestCase):
    """Test the Knapp δ-sweep against n·(1/q - 3/p')."""

    def test_slopes(self):
        """Test the fitted slope at three pairs on T^2."""
        cases = {(1, 1): 2.0, (Fraction(6, 5), 1): 1.0, (Fraction(6, 5), 2): 0.0}
        for (p, q), expected in cases.items():
            sweep = knapp_sweep(ExponentPair(p, q))
            self.assertAlmostEqual(sweep.expected_slope, expected, places=12)
            self.assertLessEqual(abs(sweep.slope - expected), SLOPE_TOL, str(sweep.pair))

    def test_blowup_law(self):
        """Test that blow-up slopes follow the prediction across six pairs."""
        pairs = [
            (1, 4), (Fraction(11, 10), 3), (Fraction(6, 5), 3),
            (Fraction(13, 10), 4), (Fraction(3, 2), 2), (2, 1),
        ]
        for p, q in pairs:
            sweep = knapp_sweep(ExponentPair(p, q), n=1)
            self.assertLessEqual(abs(sweep.blowup_slope - sweep.expected_blowup), SLOPE_TOL, str(sweep.pair))

    def test_sign_flips_across_curve(self):
        """Test that the fitted slope changes sign as q crosses p'/3."""
        for p in (Fraction(6, 5), Fraction(5, 4)):
            crossing = ExponentPair(p, 1).p_conj / 3
            below = knapp_sweep(ExponentPair(p, crossing - Fraction(1, 5)))
            above = knapp_sweep(ExponentPair(p, crossing + Fraction(1, 5)))
            self.assertGreater(below.slope, 0, str(below.pair))
            self.assertLess(above.slope, 0, str(above.pair))
            for sweep in (below, above):
                self.assertLessEqual(abs(sweep.slope - sweep.expected_slope), SLOPE_TOL, str(sweep.pair))

    def test_blowup_above_curve(self):
        """Test the blow-up slope 2(3/p' - 1/q) = 0.2 at (6/5, 5/2)."""
        sweep = knapp_sweep(ExponentPair(Fraction(6, 5), Fraction(5, 2)))
        self.assertAlmostEqual(sweep.expected_blowup, 0.2, places=12)
        self.assertLessEqual(abs(sweep.blowup_slope - 0.2), SLOPE_TOL)

    def test_sign_convention(self):
        """Test that the δ → 0 limit flips the fitted slope."""
        sweep = knapp_sweep(ExponentPair(Fraction(3, 2), 2), n=1)
        self.assertEqual(sweep.limit, 'zero')
        self.assertAlmostEqual(sweep.blowup_slope, -sweep.slope)
        self.assertGreater(sweep.blowup_slope, 0)

    def test_constant_multiple_leaves_ratio(self):
        """Test that c·f has the same ratio as f."""
        pair = ExponentPair(Fraction(6, 5), 1)
        plain = knapp_sweep(pair, n=1)
        scaled = knapp_sweep(pair, n=1, factor=3.0)
        assert_allclose([r for _, r in scaled.rows], [r for _, r in plain.rows], rtol=1e-12)

    def test_rotated_cap(self):
        """Test that moving the cap center does not change the slope."""
        pair = ExponentPair(1, 2)
        base = knapp_sweep(pair, n=1)
        moved = knapp_sweep(pair, n=1, center=0.3)
        self.assertAlmostEqual(moved.slope, base.slope, delta=0.01)

    def test_errors(self):
        """Test under-resolved grids and invalid widths."""
        with self.assertRaises(UnderResolvedGridError):
            knapp_sweep(ExponentPair(1, 1), n=1, nodes=256)
        with self.assertRaises(DomainError):
            knapp_sweep(ExponentPair(1, 1), deltas=(0.5, 0.25, 0.125, 0.0625), n=1)
        with self.assertRaises(DomainError):
            knapp_sweep(ExponentPair(1, 1), deltas=(0.25, 0.125, 0.125), n=1)

    def test_csv_rows(self):
        """Test that CSV rows carry (p, q, δ, ratio)."""
        sweep = knapp_sweep(ExponentPair(1, 1), n=1)
        rows = sweep.csv_rows()
        self.assertEqual(len(rows), 6)
        self.assertEqual(rows[0][:2], (1.0, 1.0))
        self.assertEqual(rows[0][2], 2.0 ** -9)


class TestDilationProbe(unittest.TestCase):
    """Test the annular λ-sweep against n·(3/2 - 2/p)."""

    def test_slopes(self):
        """Test that the slope turns positive only beyond p = 4/3."""
        for p in (1, Fraction(6, 5), Fraction(3, 2), 2):
            sweep = dilation_p_probe(ExponentPair(p, 2))
            self.assertEqual(sweep.limit, 'infinity')
            self.assertLessEqual(abs(sweep.slope - sweep.expected_slope), SLOPE_TOL, str(sweep.pair))
        self.assertGreater(dilation_p_probe(ExponentPair(2, 1)).blowup_slope, 0.5)

    def test_flat_at_four_thirds(self):
        """Test that p = 4/3 gives a slope within 0.1 of zero."""
        sweep = dilation_p_probe(ExponentPair(Fraction(4, 3), 1))
        self.assertAlmostEqual(sweep.expected_slope, 0.0, places=12)
        self.assertLessEqual(abs(sweep.slope), 0.1)

    def test_independent_of_q(self):
        """Test that q does not enter since f̂ is constant along the torus."""
        low = dilation_p_probe(ExponentPair(Fraction(3, 2), 1), n=1)
        high = dilation_p_probe(ExponentPair(Fraction(3, 2), 4), n=1)
        assert_allclose([r for _, r in low.rows], [r for _, r in high.rows], rtol=1e-10)

    def test_gaussian_never_blows_up(self):
        """Test that unmodulated Gaussians decay on every pair."""
        for pair in (ExponentPair(1, 1), ExponentPair(2, 4)):
            self.assertLess(gaussian_sweep(pair, n=1).blowup_slope, 0)


class TestRegion(unittest.TestCase):
    """Test region classification."""

    P_VALUES = (Fraction(1), Fraction(3, 2))
    Q_VALUES = (Fraction(2), Fraction(3))

    def test_small_grid(self):
        """Test a 2×2 grid with one admissible and one inadmissible column."""
        table = classify_region(self.P_VALUES, self.Q_VALUES, n=1)
        self.assertEqual(table.status_map(), {
            (1.0, 2.0): CONSISTENT,
            (1.0, 3.0): CONSISTENT,
            (1.5, 2.0): INADMISSIBLE,
            (1.5, 3.0): INADMISSIBLE,
        })
        self.assertEqual(table.agreement, 1.0)
        self.assertEqual(table.disagreements, [])
        self.assertEqual(table.counts()[BOUNDARY], 0)

    def test_inadmissible_past_corner(self):
        """Test that (3/2, 1) is flagged by the dilation family, not deferred."""
        cell = classify_cell(ExponentPair(Fraction(3, 2), 1))
        self.assertEqual(cell.status, INADMISSIBLE)
        self.assertTrue(cell.agrees)
        self.assertGreater(cell.slopes['dilation'], 0.05)

    def test_flagged_above_curve(self):
        """Test that (6/5, 5/2) is flagged by the Knapp family."""
        # the cell sits about 0.046 from the curve
        cell = classify_cell(ExponentPair(Fraction(6, 5), Fraction(5, 2)), boundary_margin=0.04)
        self.assertEqual(cell.status, INADMISSIBLE)
        self.assertTrue(cell.agrees)
        self.assertAlmostEqual(cell.slopes['knapp'], 0.2, delta=SLOPE_TOL)

    def test_full_grid(self):
        """Test full agreement on p in [1, 1.6], q in [1, 4] with step 1/20."""
        table = classify_region(FULL_P, FULL_Q)
        self.assertEqual(len(table.cells), 13 * 61)
        self.assertEqual(table.disagreements, [])
        self.assertEqual(table.agreement, 1.0)
        self.assertGreater(table.counts()[INADMISSIBLE], 0)
        self.assertGreater(table.counts()[CONSISTENT], 0)

    def test_workers_give_same_table(self):
        """Test that parallel classification gives the same cells in the same order."""
        serial = classify_region(self.P_VALUES, self.Q_VALUES, n=1)
        parallel = classify_region(self.P_VALUES, self.Q_VALUES, n=1, workers=2)
        self.assertEqual([c.csv_row() for c in serial.cells], [c.csv_row() for c in parallel.cells])

    def test_boundary_cell_is_deferred(self):
        """Test that a pair on q = p'/3 is deferred."""
        cell = classify_cell(ExponentPair(Fraction(6, 5), 2), n=1)
        self.assertEqual(cell.status, BOUNDARY)
        self.assertIsNone(cell.agrees)
        self.assertEqual(cell.csv_row()[-1], '')

    def test_rejects_out_of_range(self):
        """Test that cells outside [1, 2] × [1, 4] and unknown families are rejected."""
        with self.assertRaises(DomainError):
            classify_region([Fraction(5, 2)], [Fraction(2)], n=1)
        with self.assertRaises(DomainError):
            classify_region([Fraction(1)], [Fraction(2)], families=('airy',), n=1)

    def test_dimension_independence_full_grid(self):
        """Test identical classification for n = 1, 2, 3 on the full grid."""
        report = dimension_independence((1, 2, 3), FULL_P, FULL_Q)
        self.assertTrue(report.identical)
        for table in report.tables.values():
            self.assertEqual(table.disagreements, [])

    def test_dimension_independence(self):
        """Test identical classification for n = 1, 2, 3."""
        report = dimension_independence((1, 2, 3), self.P_VALUES, self.Q_VALUES)
        self.assertTrue(report.identical)
        self.assertEqual(report.mismatches, [])
        self.assertEqual(sorted(report.tables), [1, 2, 3])


class TestTensorAndMinkowski(unittest.TestCase):
    """Test tensor factorization and the partial-transform Minkowski chain."""

    def test_factorization(self):
        """Test ratio(g⊗h) = ratio(g)·ratio(h) from pointwise four-dimensional samples."""
        pair = ExponentPair(Fraction(6, 5), 2)
        error = tensor_factorization_check(KnappTube(0.25), IsotropicGaussian(1.0, 2), pair, nodes=128)
        self.assertLess(error, 1e-10)

    def test_random_factors(self):
        """Test factorization on random planar pairs."""
        rng = np.random.default_rng(4)
        pair = ExponentPair(1, 3)
        for _ in range(20):
            g, h = random_planar_function(rng), random_planar_function(rng)
            report = tensor_factorization_report(g, h, pair, nodes=96)
            self.assertLess(report['relative_error'], 1e-10, f"{report['g']} ⊗ {report['h']}")

    def test_minkowski_chain(self):
        """Test the interchange on |F_y(g⊗h)| for q ≥ p."""
        record = minkowski_chain(KnappTube(0.25), IsotropicGaussian(1.0, 2), ExponentPair(Fraction(6, 5), 2))
        self.assertTrue(record['guaranteed'])
        self.assertTrue(record['holds'])
        self.assertGreater(record['lhs'], 0)


if __name__ == '__main__':
    unittest.main(verbosity=2)
