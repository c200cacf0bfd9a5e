#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Key exchange over the matrix semigroup for grkex.

Alice and Bob agree on a public base matrix M. Alice publishes M^a, Bob
publishes M^b and both derive K = (M^b)^a = (M^a)^b. This module holds the
parameter sets, exponent sampling, public key and shared secret computation
and the self-describing key file format.
"""

import struct
import hashlib
import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .errors import ContextMismatchError, EncodingError, ParameterError
from .algebra.group_ring import MAX_DEGREE, RingContext, get_context
from .algebra.matrix_semigroup import (
    DEFAULT_FACTORS,
    MatrixGR,
    exponent_value,
    mat_decode,
    mat_encode,
    mat_mul,
    mat_pow,
    mat_random,
    mat_random_invertible,
    mat_scalar_S,
)

logger = logging.getLogger("grkex.kex_protocol")

KEY_MAGIC = b"GRK1"
_HEADER = struct.Struct(">4sHHH")


@dataclass(frozen=True)
class KexParams:
    """
    Public parameters of one key exchange.

    Matrices are k×k over Z_n[S_m]; private exponents are drawn uniformly
    from [exp_lo, exp_hi].
    """

    n: int = 7
    m: int = 5
    k: int = 3
    exp_lo: int = 10 ** 22
    exp_hi: int = 10 ** 28

    def __post_init__(self):
        if self.n < 2:
            raise ParameterError(f"modulus n must be at least 2, got {self.n}")
        if not 1 <= self.m <= MAX_DEGREE:
            raise ParameterError(f"degree m must be in 1..{MAX_DEGREE}, got {self.m}")
        if self.k < 1:
            raise ParameterError(f"matrix dimension k must be at least 1, got {self.k}")
        if self.exp_lo < 1:
            raise ParameterError("private exponents must be at least 1")
        if self.exp_lo > self.exp_hi:
            raise ParameterError(f"empty exponent range [{self.exp_lo}, {self.exp_hi}]")

    @classmethod
    def from_powers(cls, n: int, m: int, k: int, lo_power: int, hi_power: int) -> "KexParams":
        """Parameters with exponent range [10^lo_power, 10^hi_power]."""
        return cls(n=n, m=m, k=k, exp_lo=10 ** lo_power, exp_hi=10 ** hi_power)

    def context(self) -> RingContext:
        return get_context(self.n, self.m)

    def with_range(self, exp_lo: int, exp_hi: int) -> "KexParams":
        return KexParams(self.n, self.m, self.k, exp_lo, exp_hi)

    def check_matrix(self, matrix: MatrixGR) -> None:
        """Raise ContextMismatchError unless matrix belongs to these parameters."""
        if (matrix.ctx.n, matrix.ctx.m, matrix.k) != (self.n, self.m, self.k):
            raise ContextMismatchError(
                f"matrix is {matrix.k}x{matrix.k} over Z_{matrix.ctx.n}[S_{matrix.ctx.m}], "
                f"parameters expect {self.k}x{self.k} over Z_{self.n}[S_{self.m}]")


def sample_range(lo: int, hi: int, rng: np.random.Generator) -> int:
    """
    Uniform integer in [lo, hi] of any size.

    Draws bit_length(hi - lo) random bits and rejects values past the span,
    so the result carries no modulo bias.
    """
    if lo > hi:
        raise ParameterError(f"empty range [{lo}, {hi}]")
    span = hi - lo
    if span == 0:
        return lo
    nbits = span.bit_length()
    nbytes = (nbits + 7) // 8
    mask = (1 << nbits) - 1
    while True:
        value = int.from_bytes(rng.bytes(nbytes), "little") & mask
        if value <= span:
            return lo + value


def kex_sample_exponent(params: KexParams, rng: np.random.Generator) -> int:
    return sample_range(params.exp_lo, params.exp_hi, rng)


def kex_public(base: MatrixGR, a: int) -> MatrixGR:
    """
    Public key M^a.

    Raises:
        ParameterError: If a is below 1
    """
    a = exponent_value(a)
    if a < 1:
        raise ParameterError("private exponent must be at least 1")
    return mat_pow(base, a)


def kex_shared(peer_public: MatrixGR, a: int, params: Optional[KexParams] = None) -> MatrixGR:
    """
    Shared secret (M^b)^a from the peer's public key and our exponent.

    Raises:
        ParameterError: If a is below 1
        ContextMismatchError: If peer_public does not match params
    """
    if params is not None:
        params.check_matrix(peer_public)
    return kex_public(peer_public, a)


@dataclass
class KexSession:
    """One party's view of an exchange; the exponent never leaves the session."""

    params: KexParams
    base: MatrixGR
    my_exponent: int = field(repr=False)
    my_public: MatrixGR = field(repr=False)
    shared: Optional[MatrixGR] = field(default=None, repr=False)

    @classmethod
    def start(cls, params: KexParams, base: MatrixGR, rng: np.random.Generator) -> "KexSession":
        params.check_matrix(base)
        exponent = kex_sample_exponent(params, rng)
        return cls(params=params, base=base, my_exponent=exponent,
                   my_public=kex_public(base, exponent))

    def complete(self, peer_public: MatrixGR) -> MatrixGR:
        self.shared = kex_shared(peer_public, self.my_exponent, self.params)
        return self.shared


def base_random(params: KexParams, rng: np.random.Generator) -> MatrixGR:
    """Uniformly random base matrix M."""
    return mat_random(params.context(), params.k, rng)


def base_structured(params: KexParams, rng: np.random.Generator,
                    factors: int = DEFAULT_FACTORS) -> MatrixGR:
    """
    Base M = M1·S with M1 a random invertible matrix and S the scalar
    zero-divisor matrix; only defined over Z_7[S_5].
    """
    ctx = params.context()
    invertible, _ = mat_random_invertible(ctx, params.k, rng, factors)
    return mat_mul(invertible, mat_scalar_S(ctx, params.k))


def key_encode(matrix: MatrixGR, params: KexParams) -> bytes:
    """
    Key file bytes: magic "GRK1", n, m and k as big-endian uint16, then the
    canonical matrix payload. Exponents are never written.
    """
    params.check_matrix(matrix)
    if params.n > 0xFFFF:
        raise EncodingError(f"modulus {params.n} does not fit the key header")
    return _HEADER.pack(KEY_MAGIC, params.n, params.m, params.k) + mat_encode(matrix)


def key_decode(data: bytes) -> Tuple[MatrixGR, KexParams]:
    """
    Parse a key file.

    Returns:
        Tuple[MatrixGR, KexParams]: The matrix and its (n, m, k), with the
            default exponent range

    Raises:
        EncodingError: On bad magic, unsupported parameters or a payload of
            the wrong size
    """
    if len(data) < _HEADER.size:
        raise EncodingError(f"key file truncated: {len(data)} bytes")
    magic, n, m, k = _HEADER.unpack_from(data)
    if magic != KEY_MAGIC:
        raise EncodingError(f"bad key file magic {magic!r}")
    try:
        params = KexParams(n=n, m=m, k=k)
    except ParameterError as e:
        raise EncodingError(f"unsupported key parameters (n={n}, m={m}, k={k}): {e}")
    matrix = mat_decode(data[_HEADER.size:], params.context(), k)
    return matrix, params


def key_to_hex(data: bytes) -> str:
    return data.hex()


def key_from_hex(text: str) -> bytes:
    try:
        return bytes.fromhex(text.strip())
    except ValueError as e:
        raise EncodingError(f"invalid hex key armor: {e}")


def key_fingerprint(matrix: MatrixGR) -> str:
    """Short SHA-256 digest of the canonical encoding, for display only."""
    return hashlib.sha256(mat_encode(matrix)).hexdigest()[:32]
