#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
grkex - Unit Tests for the Statistical Experiments

This file contains unit tests for the frequency tables, the decision
Diffie-Hellman experiments, Q-Q pairing, the chi-square test and the
support-size probabilities in analysis.py.
"""

import io
import os
import sys
import unittest
from unittest.mock import patch

import numpy as np
from scipy import stats

# Add the parent directory to the path to allow imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from grkex.errors import ContextMismatchError, ParameterError
from grkex.algebra.group_ring import get_context
from grkex.algebra.matrix_semigroup import MatrixGR, mat_random
from grkex.kex_protocol import KexParams
from grkex.analysis import (
    ChiSquareResult,
    FrequencyTable,
    TripleTable,
    binom_support_prob,
    chi_square_uniform,
    exp_ddh_product,
    exp_triples,
    exp_triples_batches,
    exp_uniformity,
    qq_max_deviation,
    qq_pairs,
    support_monte_carlo,
    write_chi_square_csv,
    write_frequency_csv,
    write_qq_csv,
)


class TestChiSquare(unittest.TestCase):
    """Test cases for chi_square_uniform."""

    def test_two_cells(self):
        """Test [90, 110] against a fair split."""
        result = chi_square_uniform([90, 110])
        self.assertIsInstance(result, ChiSquareResult)
        self.assertAlmostEqual(result.statistic, 2.0)
        self.assertEqual(result.dof, 1)
        self.assertAlmostEqual(result.p_value, stats.chi2.sf(2.0, 1))

    def test_perfectly_uniform(self):
        """Test that equal counts give statistic 0 and p-value 1."""
        result = chi_square_uniform([10, 10, 10, 10])
        self.assertEqual(result.statistic, 0.0)
        self.assertEqual(result.dof, 3)
        self.assertAlmostEqual(result.p_value, 1.0)

    def test_rows_pooled(self):
        """Test that leading axes are separate rows with summed dof."""
        result = chi_square_uniform([[90, 110], [110, 90]])
        self.assertAlmostEqual(result.statistic, 4.0)
        self.assertEqual(result.dof, 2)
        self.assertAlmostEqual(result.p_value, stats.chi2.sf(4.0, 2))

    def test_matches_scipy(self):
        """Test a single row against scipy.stats.chisquare."""
        counts = [12, 7, 9, 15, 11, 6]
        expected = stats.chisquare(counts)
        result = chi_square_uniform(counts)
        self.assertAlmostEqual(result.statistic, float(expected.statistic))
        self.assertAlmostEqual(result.p_value, float(expected.pvalue))

    def test_small_expected_counts(self):
        """Test that fewer than 5 expected counts per cell is refused."""
        with self.assertRaises(ParameterError):
            chi_square_uniform([1, 2])
        with self.assertRaises(ParameterError):
            chi_square_uniform([5])


class TestSupportProbability(unittest.TestCase):
    """Test cases for support-size probabilities."""

    def test_default_window(self):
        """Test P(50 <= X <= 70) for Z_2[S_5]."""
        p = binom_support_prob(5, 2, 50, 70)
        self.assertTrue(0.90 < p < 0.96)
        expected = stats.binom.cdf(70, 120, 0.5) - stats.binom.cdf(49, 120, 0.5)
        self.assertAlmostEqual(p, expected, places=9)

    def test_larger_modulus(self):
        """Test the success probability 1 - 1/n."""
        p = binom_support_prob(4, 7, 18, 24)
        expected = stats.binom.cdf(24, 24, 6 / 7) - stats.binom.cdf(17, 24, 6 / 7)
        self.assertAlmostEqual(p, expected, places=9)

    def test_full_range(self):
        """Test that the full range has probability 1."""
        self.assertEqual(binom_support_prob(5, 2, 0, 120), 1.0)
        self.assertEqual(binom_support_prob(3, 5, 0, 6), 1.0)

    def test_invalid(self):
        """Test invalid windows."""
        with self.assertRaises(ParameterError):
            binom_support_prob(5, 2, 70, 50)
        with self.assertRaises(ParameterError):
            binom_support_prob(5, 2, 0, 121)
        with self.assertRaises(ParameterError):
            binom_support_prob(5, 1, 0, 10)

    def test_monte_carlo(self):
        """Test that sampling agrees with the exact value."""
        ctx = get_context(2, 5)
        estimate = support_monte_carlo(ctx, 20000, np.random.default_rng(9), 50, 70, batch=3000)
        self.assertAlmostEqual(estimate, binom_support_prob(5, 2, 50, 70), delta=0.01)


class TestFrequencyTables(unittest.TestCase):
    """Test cases for FrequencyTable and TripleTable."""

    def test_add(self):
        """Test that each matrix adds one count per cell."""
        ctx = get_context(3, 3)
        table = FrequencyTable.empty(ctx, 2)
        self.assertEqual(table.dims, (4, 6, 3))
        rng = np.random.default_rng(1)
        for _ in range(10):
            table.add(mat_random(ctx, 2, rng))
        self.assertEqual(table.trials, 10)
        np.testing.assert_array_equal(table.counts.sum(axis=2), np.full((4, 6), 10))
        self.assertEqual(int(table.residue_marginals().sum()), 10 * 4 * 6)

    def test_add_specific_values(self):
        """Test the cell that a coefficient lands in."""
        ctx = get_context(5, 2)
        table = FrequencyTable.empty(ctx, 1)
        table.add(MatrixGR(ctx, [[[4, 1]]]))
        self.assertEqual(table.counts[0, 0, 4], 1)
        self.assertEqual(table.counts[0, 1, 1], 1)
        self.assertEqual(int(table.counts.sum()), 2)

    def test_triple_index(self):
        """Test that (x, y, z) lands in column x·n² + y·n + z."""
        ctx = get_context(3, 1)
        table = TripleTable.empty(ctx, 1)
        self.assertEqual(table.dims, (1, 1, 27))
        table.add(MatrixGR(ctx, [[[2]]]), MatrixGR(ctx, [[[1]]]), MatrixGR(ctx, [[[0]]]))
        self.assertEqual(table.counts[0, 0, 2 * 9 + 1 * 3 + 0], 1)


class TestExperiments(unittest.TestCase):
    """Test cases for the decision Diffie-Hellman experiments."""

    def setUp(self):
        """Set up test fixtures."""
        self.params = KexParams(n=2, m=3, k=2, exp_lo=10, exp_hi=1000)
        self.c_range = (100, 10 ** 6)

    def test_single_trial(self):
        """Test that one trial adds exactly one count per cell."""
        product, random_table = exp_ddh_product(self.params, 1, seed=5, c_range=self.c_range)
        for table in (product, random_table):
            self.assertEqual(table.trials, 1)
            np.testing.assert_array_equal(table.counts.sum(axis=2), np.ones((4, 6)))

    def test_conservation(self):
        """Test that every cell sums to the number of trials."""
        power, other = exp_uniformity(self.params, 20, seed=6, a_range=self.c_range)
        for table in (power, other):
            np.testing.assert_array_equal(table.counts.sum(axis=2), np.full((4, 6), 20))

    def test_reproducible(self):
        """Test that the same seed gives identical tables."""
        first = exp_ddh_product(self.params, 15, seed=42, c_range=self.c_range)
        second = exp_ddh_product(self.params, 15, seed=42, c_range=self.c_range)
        for a, b in zip(first, second):
            np.testing.assert_array_equal(a.counts, b.counts)
        third = exp_ddh_product(self.params, 15, seed=43, c_range=self.c_range)
        self.assertFalse(np.array_equal(first[1].counts, third[1].counts))

    def test_random_side_is_uniform(self):
        """Test that the N table of the uniformity experiment passes chi-square."""
        params = KexParams(n=3, m=3, k=1, exp_lo=10, exp_hi=1000)
        _, other = exp_uniformity(params, 300, seed=8, a_range=(10, 1000))
        result = chi_square_uniform(other.counts)
        self.assertGreater(result.p_value, 0.001)

    def test_identical_generators(self):
        """Test that identical generators give identical tables and zero Q-Q deviation."""
        ctx = self.params.context()
        fixed = mat_random(ctx, 2, np.random.default_rng(3))
        with patch('grkex.analysis.mat_random', return_value=fixed), \
                patch('grkex.analysis.mat_pow', side_effect=lambda base, e: base):
            power, other = exp_uniformity(self.params, 10, seed=1, a_range=self.c_range)
        np.testing.assert_array_equal(power.counts, other.counts)
        self.assertEqual(qq_max_deviation(qq_pairs(power, other)), 0.0)

    def test_invalid_trials(self):
        """Test that at least one trial is required."""
        with self.assertRaises(ParameterError):
            exp_ddh_product(self.params, 0, seed=1, c_range=self.c_range)
        with self.assertRaises(ParameterError):
            exp_triples_batches(self.params, 5, seed=1, batches=0)

    def test_workers_match_serial(self):
        """Test that worker processes reproduce the serial tables."""
        serial = exp_ddh_product(self.params, 6, seed=21, c_range=self.c_range, workers=1)
        pooled = exp_ddh_product(self.params, 6, seed=21, c_range=self.c_range, workers=2)
        for left, right in zip(serial, pooled):
            np.testing.assert_array_equal(left.counts, right.counts)
            self.assertEqual(left.trials, right.trials)

    def test_invalid_workers(self):
        """Test that at least one worker is required."""
        with self.assertRaises(ParameterError):
            exp_uniformity(self.params, 5, seed=1, a_range=self.c_range, workers=0)
        with self.assertRaises(ParameterError):
            exp_triples_batches(self.params, 5, seed=1, workers=-1)

    def test_base_requires_fixed_base(self):
        """Test that a given base cannot be combined with per-batch bases."""
        params = KexParams(n=2, m=3, k=1, exp_lo=10, exp_hi=1000)
        base = mat_random(params.context(), 1, np.random.default_rng(0))
        with self.assertRaises(ParameterError):
            exp_triples_batches(params, 4, seed=1, batches=2, fixed_base=False, base=base)
        tables = exp_triples_batches(params, 4, seed=1, batches=2, fixed_base=True, base=base)
        self.assertEqual(len(tables), 2)

    def test_triples_counts(self):
        """Test that each triple row averages one count per column for n³ trials."""
        params = KexParams(n=7, m=3, k=1, exp_lo=10, exp_hi=1000)
        table = exp_triples(params, 343, seed=12)
        self.assertEqual(table.dims, (1, 6, 343))
        np.testing.assert_array_equal(table.counts.sum(axis=2), np.full((1, 6), 343))
        self.assertAlmostEqual(float(table.counts.mean(axis=2)[0, 0]), 1.0)

    def test_triple_batches(self):
        """Test fixed and refreshed bases across batches."""
        params = KexParams(n=2, m=3, k=1, exp_lo=10, exp_hi=1000)
        fixed = exp_triples_batches(params, 8, seed=3, batches=2, fixed_base=True)
        refreshed = exp_triples_batches(params, 8, seed=3, batches=2, fixed_base=False)
        self.assertEqual(len(fixed), 2)
        self.assertEqual(len(refreshed), 2)
        for table in fixed + refreshed:
            self.assertEqual(table.trials, 8)
        # batch 0 draws the same base either way
        np.testing.assert_array_equal(fixed[0].counts, refreshed[0].counts)

    def test_explicit_base(self):
        """Test that an explicit base of the wrong shape is refused."""
        params = KexParams(n=2, m=3, k=1, exp_lo=10, exp_hi=1000)
        wrong = mat_random(params.context(), 2, np.random.default_rng(0))
        with self.assertRaises(ContextMismatchError):
            exp_triples(params, 4, seed=1, base=wrong)


class TestProtocolTables(unittest.TestCase):
    """Test that protocol-side tables look uniform at reduced scale."""

    def setUp(self):
        """Set up test fixtures."""
        # n does not divide 4! in either ring used here
        self.params = KexParams(n=7, m=4, k=2, exp_lo=10 ** 2, exp_hi=10 ** 3)
        self.wide = (10 ** 4, 10 ** 6)

    def test_product_tables(self):
        """Test the M^ab and M^c tables and their Q-Q deviation."""
        product, power = exp_ddh_product(self.params, 500, seed=101, c_range=self.wide)
        for table in (product, power):
            self.assertGreater(chi_square_uniform(table.counts).p_value, 0.001)
        self.assertLessEqual(qq_max_deviation(qq_pairs(product, power)), 0.25)

    def test_power_tables(self):
        """Test the M^a and N tables and their Q-Q deviation."""
        power, other = exp_uniformity(self.params, 500, seed=102, a_range=self.wide)
        for table in (power, other):
            self.assertGreater(chi_square_uniform(table.counts).p_value, 0.001)
        self.assertLessEqual(qq_max_deviation(qq_pairs(power, other)), 0.25)

    def test_triple_table(self):
        """Test the residue triples of one fixed base."""
        params = KexParams(n=5, m=4, k=2, exp_lo=10 ** 4, exp_hi=10 ** 6)
        table = exp_triples(params, 700, seed=103)
        self.assertEqual(table.dims, (4, 24, 125))
        self.assertGreater(chi_square_uniform(table.counts).p_value, 0.001)


class TestQuantilePairs(unittest.TestCase):
    """Test cases for qq_pairs and qq_max_deviation."""

    def make_table(self, counts):
        counts = np.asarray(counts, dtype=np.int64)
        return FrequencyTable(n=counts.shape[2], m=2, k=1, counts=counts,
                              trials=int(counts[0, 0].sum()))

    def test_identical_tables(self):
        """Test that a table paired with itself lies on y = x."""
        table = self.make_table([[[3, 7, 5, 5], [9, 1, 4, 6]]])
        pairs = qq_pairs(table, table)
        self.assertEqual(len(pairs), 8)
        self.assertTrue(all(x == y for x, y in pairs))
        self.assertEqual(pairs, sorted(pairs))

    def test_scaled_tables(self):
        """Test that scaled counts have zero deviation after normalisation."""
        table = self.make_table([[[3, 7, 5, 5], [9, 1, 4, 6]]])
        scaled = self.make_table(table.counts * 3)
        self.assertAlmostEqual(qq_max_deviation(qq_pairs(table, scaled)), 0.0)

    def test_skewed_tables(self):
        """Test that a skewed table deviates beyond the default threshold."""
        uniform = self.make_table(np.full((1, 4, 4), 10))
        skewed = self.make_table([[[25, 5, 5, 5]] * 4])
        self.assertAlmostEqual(qq_max_deviation(qq_pairs(uniform, skewed)), 1.5)

    def test_shape_mismatch(self):
        """Test that tables of different shape cannot be paired."""
        with self.assertRaises(ContextMismatchError):
            qq_pairs(self.make_table(np.ones((1, 2, 2))), self.make_table(np.ones((1, 2, 3))))

    def test_empty(self):
        """Test the empty and all-zero cases."""
        self.assertEqual(qq_max_deviation([]), 0.0)
        self.assertEqual(qq_max_deviation([(0, 0), (0, 0)]), 0.0)


class TestCsvWriters(unittest.TestCase):
    """Test cases for the CSV artifact writers."""

    def test_frequency_csv(self):
        """Test the header line and row count of a frequency table."""
        ctx = get_context(2, 2)
        table = FrequencyTable.empty(ctx, 1)
        table.add(MatrixGR(ctx, [[[1, 0]]]))
        handle = io.StringIO()
        write_frequency_csv(handle, {"Mab": table}, seed=7, header={"n": 2})
        lines = handle.getvalue().splitlines()
        self.assertTrue(lines[0].startswith("# grkex"))
        self.assertIn("seed=7", lines[0])
        self.assertEqual(lines[1], "table,entry,element,r0,r1")
        self.assertEqual(lines[2:], ["Mab,0,0,0,1", "Mab,0,1,1,0"])

    def test_chi_square_csv(self):
        """Test that floats are written with full precision."""
        handle = io.StringIO()
        write_chi_square_csv(handle, {"Mab": ChiSquareResult(0.1, 0.5, 3)}, seed=1, header={})
        lines = handle.getvalue().splitlines()
        self.assertEqual(lines[1], "table,statistic,dof,p_value")
        self.assertEqual(lines[2], "Mab,0.10000000000000001,3,0.5")

    def test_qq_csv(self):
        """Test the Q-Q pair rows."""
        handle = io.StringIO()
        write_qq_csv(handle, [(1, 2), (3, 4)], seed=1, header={})
        self.assertEqual(handle.getvalue().splitlines()[1:], ["x,y", "1,2", "3,4"])


if __name__ == '__main__':
    unittest.main()
