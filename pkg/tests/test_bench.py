#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
grkex - Unit Tests for the Exponentiation Benchmarks

This file contains unit tests for bench.py.
"""

import os
import sys
import math
import unittest

# Add the parent directory to the path to allow imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from grkex.errors import ParameterError
from grkex.bench import bench_grid, bench_pow, key_space_log10


class TestBench(unittest.TestCase):
    """Test cases for bench_pow and bench_grid."""

    def test_key_space(self):
        """Test the key space of 2×2 matrices over Z_7[S_5]."""
        self.assertAlmostEqual(key_space_log10(7, 5, 2), 480 * math.log10(7))
        self.assertAlmostEqual(key_space_log10(2, 5, 3), 1080 * math.log10(2))

    def test_bench_pow(self):
        """Test one small benchmark."""
        result = bench_pow(2, 3, 2, exp_digits=5, reps=3, seed=1)
        self.assertEqual(result.reps, 3)
        self.assertEqual(result.payload_bits, 24)
        self.assertGreaterEqual(result.mean_s, 0.0)
        self.assertGreaterEqual(result.stdev_s, 0.0)
        record = result.to_record()
        self.assertEqual(record['exp_digits'], 5)

    def test_single_rep(self):
        """Test that one repetition reports zero spread."""
        self.assertEqual(bench_pow(2, 3, 1, exp_digits=3, reps=1, seed=1).stdev_s, 0.0)

    def test_grid(self):
        """Test that the grid covers every combination in order."""
        results = bench_grid((1, 2), (2, 3), (3,), m=3, reps=1, seed=2)
        self.assertEqual([(r.k, r.n) for r in results], [(1, 2), (1, 3), (2, 2), (2, 3)])

    def test_invalid(self):
        """Test argument validation."""
        with self.assertRaises(ParameterError):
            bench_pow(2, 3, 2, exp_digits=5, reps=0, seed=1)
        with self.assertRaises(ParameterError):
            bench_pow(2, 3, 2, exp_digits=0, reps=1, seed=1)


if __name__ == '__main__':
    unittest.main()
