#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
grkex - Unit Tests for the Key Exchange

This file contains unit tests for parameters, exponent sampling, sessions
and the key file format in kex_protocol.py.
"""

import os
import sys
import unittest

import numpy as np

# Add the parent directory to the path to allow imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from grkex.errors import ContextMismatchError, EncodingError, ParameterError
from grkex.algebra.group_ring import get_context
from grkex.algebra.matrix_semigroup import (
    mat_mul,
    mat_pow,
    mat_random,
    mat_scalar,
    mat_zero,
    zero_divisor_witness,
)
from grkex.kex_protocol import (
    KEY_MAGIC,
    KexParams,
    KexSession,
    base_random,
    base_structured,
    kex_public,
    kex_sample_exponent,
    kex_shared,
    key_decode,
    key_encode,
    key_fingerprint,
    key_from_hex,
    key_to_hex,
    sample_range,
)


class TestKexParams(unittest.TestCase):
    """Test cases for KexParams."""

    def test_defaults(self):
        """Test the default parameter set."""
        params = KexParams()
        self.assertEqual((params.n, params.m, params.k), (7, 5, 3))
        self.assertEqual(params.exp_lo, 10 ** 22)
        self.assertEqual(params.exp_hi, 10 ** 28)
        self.assertEqual(KexParams.from_powers(7, 5, 3, 22, 28), params)

    def test_validation(self):
        """Test that invalid parameters are rejected."""
        for kwargs in ({"n": 1}, {"m": 0}, {"m": 9}, {"k": 0}, {"exp_lo": 0},
                       {"exp_lo": 10, "exp_hi": 9}):
            with self.assertRaises(ParameterError, msg=str(kwargs)):
                KexParams(**kwargs)

    def test_check_matrix(self):
        """Test that foreign matrices are rejected."""
        params = KexParams(n=7, m=4, k=2)
        params.check_matrix(mat_zero(get_context(7, 4), 2))
        with self.assertRaises(ContextMismatchError):
            params.check_matrix(mat_zero(get_context(7, 4), 3))
        with self.assertRaises(ContextMismatchError):
            params.check_matrix(mat_zero(get_context(5, 4), 2))


class TestExponentSampling(unittest.TestCase):
    """Test cases for sample_range and kex_sample_exponent."""

    def setUp(self):
        """Set up test fixtures."""
        self.rng = np.random.default_rng(17)

    def test_degenerate_range(self):
        """Test that lo = hi always returns lo."""
        for _ in range(5):
            self.assertEqual(sample_range(5, 5, self.rng), 5)
        with self.assertRaises(ParameterError):
            sample_range(6, 5, self.rng)

    def test_default_range_digits(self):
        """Test that default exponents have 23 to 29 decimal digits."""
        params = KexParams()
        for _ in range(200):
            a = kex_sample_exponent(params, self.rng)
            self.assertTrue(params.exp_lo <= a <= params.exp_hi)
            self.assertTrue(23 <= len(str(a)) <= 29)

    def test_mean(self):
        """Test that the sample mean of [1000, 2000] is within 1% of 1500."""
        values = [sample_range(1000, 2000, self.rng) for _ in range(10000)]
        self.assertEqual(min(values) >= 1000 and max(values) <= 2000, True)
        self.assertAlmostEqual(float(np.mean(values)), 1500, delta=15)

    def test_endpoints_reachable(self):
        """Test that both endpoints of a small range occur."""
        values = {sample_range(3, 6, self.rng) for _ in range(500)}
        self.assertEqual(values, {3, 4, 5, 6})


class TestExchange(unittest.TestCase):
    """Test cases for public keys, shared secrets and sessions."""

    def test_sessions_agree(self):
        """Test K_A = K_B over several rings and dimensions."""
        for n, m, k in ((2, 4, 2), (7, 4, 2), (2, 5, 3), (7, 5, 3)):
            params = KexParams(n=n, m=m, k=k)
            for seed in range(3):
                rng = np.random.default_rng([n, m, k, seed])
                base = base_random(params, rng)
                alice = KexSession.start(params, base, rng)
                bob = KexSession.start(params, base, rng)
                shared_a = alice.complete(bob.my_public)
                shared_b = bob.complete(alice.my_public)
                self.assertEqual(shared_a, shared_b)
                self.assertEqual(shared_a, mat_pow(base, alice.my_exponent * bob.my_exponent))

    def test_many_sessions_agree(self):
        """Test K_A = K_B for a hundred sessions per dimension over Z_7[S_5]."""
        for k in (2, 3):
            params = KexParams(n=7, m=5, k=k, exp_lo=10 ** 4, exp_hi=10 ** 6)
            for seed in range(100):
                rng = np.random.default_rng([k, seed])
                base = base_random(params, rng)
                alice = KexSession.start(params, base, rng)
                bob = KexSession.start(params, base, rng)
                self.assertEqual(alice.complete(bob.my_public), bob.complete(alice.my_public),
                                 f"k={k} seed={seed}")

    @unittest.skipUnless(os.environ.get('GRKEX_SLOW_TESTS'), 'set GRKEX_SLOW_TESTS=1 to run')
    def test_many_sessions_agree_full_range(self):
        """Test K_A = K_B for a hundred sessions per dimension with exponents in [10^22, 10^28]."""
        for k in (2, 3):
            params = KexParams(n=7, m=5, k=k)
            for seed in range(100):
                rng = np.random.default_rng([k, seed, 28])
                base = base_random(params, rng)
                alice = KexSession.start(params, base, rng)
                bob = KexSession.start(params, base, rng)
                self.assertEqual(alice.complete(bob.my_public), bob.complete(alice.my_public),
                                 f"k={k} seed={seed}")

    def test_public_keys_distinct(self):
        """Test that ten thousand independently seeded sessions give distinct public keys."""
        params = KexParams(n=7, m=4, k=2, exp_lo=10, exp_hi=100)
        publics = set()
        for seed in range(10 ** 4):
            rng = np.random.default_rng(seed)
            session = KexSession.start(params, base_random(params, rng), rng)
            publics.add(key_encode(session.my_public, params))
        self.assertEqual(len(publics), 10 ** 4)

    def test_session_repr_hides_exponent(self):
        """Test that the private exponent does not appear in the repr."""
        params = KexParams(n=2, m=3, k=1, exp_lo=10 ** 6, exp_hi=10 ** 7)
        rng = np.random.default_rng(1)
        session = KexSession.start(params, base_random(params, rng), rng)
        self.assertNotIn(str(session.my_exponent), repr(session))

    def test_public_and_shared(self):
        """Test kex_public and kex_shared directly."""
        ctx = get_context(7, 4)
        base = mat_random(ctx, 2, np.random.default_rng(2))
        a, b = 123456789, 987654321
        self.assertEqual(kex_shared(kex_public(base, b), a), kex_shared(kex_public(base, a), b))
        with self.assertRaises(ParameterError):
            kex_public(base, 0)
        with self.assertRaises(ContextMismatchError):
            kex_shared(kex_public(base, a), b, KexParams(n=7, m=4, k=3))

    def test_structured_base(self):
        """Test that M1·S is annihilated by t·I."""
        params = KexParams(n=7, m=5, k=2)
        ctx = params.context()
        base = base_structured(params, np.random.default_rng(4), factors=4)
        witness = mat_scalar(ctx, 2, zero_divisor_witness(ctx))
        self.assertEqual(mat_mul(base, witness), mat_zero(ctx, 2))
        with self.assertRaises(ParameterError):
            base_structured(KexParams(n=2, m=5, k=2), np.random.default_rng(4))


class TestKeyFiles(unittest.TestCase):
    """Test cases for the key file format."""

    def setUp(self):
        """Set up test fixtures."""
        self.params = KexParams(n=7, m=5, k=2)
        self.matrix = base_random(self.params, np.random.default_rng(21))

    def test_size_and_header(self):
        """Test that a 2×2 key over Z_7[S_5] is 190 bytes."""
        data = key_encode(self.matrix, self.params)
        self.assertEqual(len(data), 190)
        self.assertEqual(data[:4], KEY_MAGIC)
        self.assertEqual(data[4:10], bytes([0, 7, 0, 5, 0, 2]))

    def test_roundtrip(self):
        """Test decode(encode(M)) = M with its parameters."""
        matrix, params = key_decode(key_encode(self.matrix, self.params))
        self.assertEqual(matrix, self.matrix)
        self.assertEqual((params.n, params.m, params.k), (7, 5, 2))

    def test_bad_magic(self):
        """Test that a flipped magic byte is rejected."""
        data = bytearray(key_encode(self.matrix, self.params))
        data[0] ^= 0x01
        with self.assertRaises(EncodingError):
            key_decode(bytes(data))

    def test_truncated(self):
        """Test short header and short payload."""
        data = key_encode(self.matrix, self.params)
        with self.assertRaises(EncodingError):
            key_decode(data[:6])
        with self.assertRaises(EncodingError):
            key_decode(data[:-1])

    def test_unsupported_parameters(self):
        """Test that a header with m = 0 is rejected."""
        data = bytearray(key_encode(self.matrix, self.params))
        data[6:8] = bytes([0, 0])
        with self.assertRaises(EncodingError):
            key_decode(bytes(data))

    def test_hex_armor(self):
        """Test hex armor and fingerprints."""
        data = key_encode(self.matrix, self.params)
        text = key_to_hex(data)
        self.assertEqual(text, text.lower())
        self.assertEqual(key_from_hex(text + "\n"), data)
        with self.assertRaises(EncodingError):
            key_from_hex("zz")
        fingerprint = key_fingerprint(self.matrix)
        self.assertEqual(len(fingerprint), 32)
        self.assertEqual(fingerprint, key_fingerprint(key_decode(data)[0]))

    def test_modulus_too_large(self):
        """Test that moduli beyond 16 bits cannot be written."""
        params = KexParams(n=2 ** 17, m=2, k=1)
        matrix = base_random(params, np.random.default_rng(0))
        with self.assertRaises(EncodingError):
            key_encode(matrix, params)


if __name__ == '__main__':
    unittest.main()
