#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Matrices over the group ring Z_n[S_m] for grkex.

A k×k matrix is stored as one read-only int64 array of shape (k, k, m!), so
entry (i, j) is the coefficient vector of a group ring element. This module
provides products, square-and-multiply powers, random and invertible
sampling, the scalar zero-divisor matrix S and the canonical bit-packed
encoding used for hashing, equality and key files.
"""

import logging
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import ContextMismatchError, EncodingError, ParameterError
from .group_ring import (
    GroupRingElement,
    RingContext,
    exact_matmul,
    gr_add,
    gr_from_permutation,
    gr_mul,
    gr_one,
    gr_parse,
    gr_pow,
    gr_random_permutation,
    gr_scalar_mul,
    gr_sub,
    gr_zero,
)
from .symmetric_group import cycles_parse, perm_inverse, perm_order

logger = logging.getLogger("grkex.matrix_semigroup")

DEFAULT_FACTORS = 20


class MatrixGR:
    """
    A k×k matrix over Z_n[S_m].

    Two matrices are equal exactly when their canonical encodings are equal,
    so instances can be used as dictionary keys.
    """

    __slots__ = ("ctx", "k", "data", "_key")

    def __init__(self, ctx: RingContext, data):
        array = np.array(data, dtype=np.int64)
        if array.ndim != 3 or array.shape[0] != array.shape[1] or array.shape[2] != ctx.order:
            raise ParameterError(f"matrix data must have shape (k, k, {ctx.order}), got {array.shape}")
        if array.shape[0] < 1:
            raise ParameterError("matrix dimension k must be at least 1")
        if array.size and (array.min() < 0 or array.max() >= ctx.n):
            raise ParameterError(f"coefficients must lie in 0..{ctx.n - 1}")
        self._init(ctx, array)

    def _init(self, ctx: RingContext, array: np.ndarray) -> None:
        array.setflags(write=False)
        self.ctx = ctx
        self.k = array.shape[0]
        self.data = array
        self._key = None

    @classmethod
    def _trusted(cls, ctx: RingContext, array: np.ndarray) -> "MatrixGR":
        matrix = cls.__new__(cls)
        matrix._init(ctx, array)
        return matrix

    def entry(self, i: int, j: int) -> GroupRingElement:
        """Entry (i, j), 0-based."""
        return GroupRingElement._trusted(self.ctx, self.data[i, j].copy())

    def rows(self) -> List[List[GroupRingElement]]:
        return [[self.entry(i, j) for j in range(self.k)] for i in range(self.k)]

    def encoded(self) -> bytes:
        if self._key is None:
            self._key = mat_encode(self)
        return self._key

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatrixGR):
            return NotImplemented
        return self.ctx == other.ctx and self.k == other.k and np.array_equal(self.data, other.data)

    def __hash__(self) -> int:
        return hash((self.ctx, self.k, self.encoded()))

    def __mul__(self, other: "MatrixGR") -> "MatrixGR":
        return mat_mul(self, other)

    def __pow__(self, e: int) -> "MatrixGR":
        return mat_pow(self, e)

    def __add__(self, other: "MatrixGR") -> "MatrixGR":
        return mat_add(self, other)

    def __sub__(self, other: "MatrixGR") -> "MatrixGR":
        return mat_sub(self, other)

    def __repr__(self) -> str:
        return f"MatrixGR(k={self.k}, Z_{self.ctx.n}[S_{self.ctx.m}])"


def _check_compatible(a: MatrixGR, b: MatrixGR) -> None:
    if a.ctx != b.ctx:
        raise ContextMismatchError(f"ring mismatch: {a.ctx!r} vs {b.ctx!r}")
    if a.k != b.k:
        raise ContextMismatchError(f"shape mismatch: {a.k}x{a.k} vs {b.k}x{b.k}")


def mat_from_entries(ctx: RingContext, rows: Sequence[Sequence[GroupRingElement]]) -> MatrixGR:
    """Assemble a matrix from a square list of group ring elements."""
    k = len(rows)
    if k < 1 or any(len(row) != k for row in rows):
        raise ParameterError("entries must form a non-empty square array")
    for row in rows:
        for element in row:
            if element.ctx != ctx:
                raise ContextMismatchError(f"entry from {element.ctx!r} in a {ctx!r} matrix")
    data = np.stack([np.stack([element.coeffs for element in row]) for row in rows])
    return MatrixGR._trusted(ctx, data)


def mat_parse(ctx: RingContext, rows: Sequence[Sequence[str]]) -> MatrixGR:
    """Assemble a matrix from term-sum strings."""
    return mat_from_entries(ctx, [[gr_parse(text, ctx) for text in row] for row in rows])


def mat_zero(ctx: RingContext, k: int) -> MatrixGR:
    if k < 1:
        raise ParameterError(f"matrix dimension k must be at least 1, got {k}")
    return MatrixGR._trusted(ctx, np.zeros((k, k, ctx.order), dtype=np.int64))


def mat_identity(ctx: RingContext, k: int) -> MatrixGR:
    if k < 1:
        raise ParameterError(f"matrix dimension k must be at least 1, got {k}")
    data = np.zeros((k, k, ctx.order), dtype=np.int64)
    data[np.arange(k), np.arange(k), 0] = 1
    return MatrixGR._trusted(ctx, data)


def mat_scalar(ctx: RingContext, k: int, s: GroupRingElement) -> MatrixGR:
    """Scalar matrix with s on the diagonal and zeros elsewhere."""
    if k < 1:
        raise ParameterError(f"matrix dimension k must be at least 1, got {k}")
    if s.ctx != ctx:
        raise ContextMismatchError(f"scalar from {s.ctx!r} in a {ctx!r} matrix")
    data = np.zeros((k, k, ctx.order), dtype=np.int64)
    data[np.arange(k), np.arange(k)] = s.coeffs
    return MatrixGR._trusted(ctx, data)


def mat_add(a: MatrixGR, b: MatrixGR) -> MatrixGR:
    _check_compatible(a, b)
    return MatrixGR._trusted(a.ctx, (a.data + b.data) % a.ctx.n)


def mat_sub(a: MatrixGR, b: MatrixGR) -> MatrixGR:
    _check_compatible(a, b)
    return MatrixGR._trusted(a.ctx, (a.data - b.data) % a.ctx.n)


def _mul_entrywise(a: MatrixGR, b: MatrixGR) -> np.ndarray:
    ctx, k = a.ctx, a.k
    left, right = a.rows(), b.rows()
    data = np.zeros((k, k, ctx.order), dtype=np.int64)
    for i in range(k):
        for j in range(k):
            acc = gr_zero(ctx)
            for l in range(k):
                acc = gr_add(acc, gr_mul(left[i][l], right[l][j]))
            data[i, j] = acc.coeffs
    return data


def mat_mul(a: MatrixGR, b: MatrixGR) -> MatrixGR:
    """
    Row-by-column product over the group ring.

    With a multiplication table the whole product is a single integer matrix
    product: every entry of a is expanded into its left regular matrix, giving
    a (k·m!)×(k·m!) block matrix that multiplies the stacked columns of b.

    Args:
        a (MatrixGR): Left factor
        b (MatrixGR): Right factor

    Returns:
        MatrixGR: a·b

    Raises:
        ContextMismatchError: If the rings or dimensions differ
    """
    _check_compatible(a, b)
    ctx, k, order = a.ctx, a.k, a.ctx.order
    if ctx.left_index is None:
        return MatrixGR._trusted(ctx, _mul_entrywise(a, b))

    # blocks[i, l, x, y] = a[i, l][rank(g_x g_y^-1)]
    blocks = a.data[:, :, ctx.left_index]
    left = blocks.transpose(0, 2, 1, 3).reshape(k * order, k * order)
    right = b.data.transpose(0, 2, 1).reshape(k * order, k)
    product = exact_matmul(left, right, ctx.n)
    return MatrixGR._trusted(ctx, np.ascontiguousarray(product.reshape(k, order, k).transpose(0, 2, 1)))


def mat_pow(a: MatrixGR, e: int, on_multiply: Optional[Callable[[], None]] = None) -> MatrixGR:
    """
    Raise a to the power e by left-to-right square and multiply.

    Args:
        a (MatrixGR): Base matrix
        e (int): Exponent, e >= 0; a^0 is the identity matrix
        on_multiply (Callable, optional): Called once per matrix product

    Returns:
        MatrixGR: a^e, using at most 2·bitlen(e) products
    """
    e = exponent_value(e)
    if e == 0:
        return mat_identity(a.ctx, a.k)

    def multiply(x: MatrixGR, y: MatrixGR) -> MatrixGR:
        if on_multiply is not None:
            on_multiply()
        return mat_mul(x, y)

    result = a
    for bit in bin(e)[3:]:
        result = multiply(result, result)
        if bit == "1":
            result = multiply(result, a)
    return result


def exponent_value(e) -> int:
    """
    Normalize an exponent given as int or decimal string.

    Raises:
        ParameterError: If e is negative or not a decimal integer
    """
    if isinstance(e, str):
        text = e.strip()
        if not text.isdigit():
            raise ParameterError(f"exponent must be a nonnegative decimal integer, got '{text[:40]}'")
        e = int(text)
    if isinstance(e, bool) or not isinstance(e, (int, np.integer)):
        raise ParameterError(f"exponent must be an integer, got {type(e).__name__}")
    e = int(e)
    if e < 0:
        raise ParameterError("exponent must be nonnegative")
    return e


def mat_random(ctx: RingContext, k: int, rng: np.random.Generator) -> MatrixGR:
    """k² independent uniformly random group ring entries."""
    if k < 1:
        raise ParameterError(f"matrix dimension k must be at least 1, got {k}")
    return MatrixGR._trusted(ctx, rng.integers(0, ctx.n, size=(k, k, ctx.order), dtype=np.int64))


def mat_is_diagonal(a: MatrixGR) -> bool:
    off_diagonal = ~np.eye(a.k, dtype=bool)
    return not np.any(a.data[off_diagonal])


def mat_support_sizes(a: MatrixGR) -> np.ndarray:
    """Number of nonzero terms in each entry, as a k×k array."""
    return np.count_nonzero(a.data, axis=2)


def _unit_inverse(x: GroupRingElement) -> GroupRingElement:
    """Inverse of a unit c·g (g in S_m, c a unit mod n)."""
    nonzero = np.flatnonzero(x.coeffs)
    if len(nonzero) != 1:
        raise ParameterError("diagonal entries of a triangular factor must be single group elements")
    rank = int(nonzero[0])
    try:
        coeff = pow(int(x.coeffs[rank]), -1, x.ctx.n)
    except ValueError:
        raise ParameterError(f"coefficient {int(x.coeffs[rank])} is not a unit mod {x.ctx.n}")
    return gr_from_permutation(x.ctx, perm_inverse(x.ctx.element(rank)), coeff)


def mat_triangular_inverse(a: MatrixGR) -> MatrixGR:
    """
    Inverse of an upper or lower triangular matrix with unit diagonal.

    Each diagonal entry must be c·g for a group element g and a unit c, as in
    the factors drawn by mat_random_invertible. Back substitution for upper
    triangular input, forward substitution for lower triangular input.

    Raises:
        ParameterError: If a is not triangular or a diagonal entry is not a unit
    """
    k, ctx = a.k, a.ctx
    upper = not np.any(a.data[np.tril_indices(k, -1)])
    if not upper and np.any(a.data[np.triu_indices(k, 1)]):
        raise ParameterError("matrix is neither upper nor lower triangular")

    entries = a.rows()
    diagonal_inverse = [_unit_inverse(entries[i][i]) for i in range(k)]
    inverse: List[List[Optional[GroupRingElement]]] = [[None] * k for _ in range(k)]
    order = range(k - 1, -1, -1) if upper else range(k)
    for i in order:
        inner = range(i + 1, k) if upper else range(i)
        for j in range(k):
            acc = gr_one(ctx) if i == j else gr_zero(ctx)
            for l in inner:
                acc = gr_sub(acc, gr_mul(entries[i][l], inverse[l][j]))
            inverse[i][j] = gr_mul(diagonal_inverse[i], acc)
    return mat_from_entries(ctx, inverse)


def random_triangular(ctx: RingContext, k: int, rng: np.random.Generator, upper: bool) -> MatrixGR:
    """Triangular matrix with random group elements on the diagonal and random entries beyond it."""
    data = np.zeros((k, k, ctx.order), dtype=np.int64)
    for i in range(k):
        data[i, i, ctx.rank_of(gr_random_permutation(ctx, rng))] = 1
        span = range(i + 1, k) if upper else range(i)
        for j in span:
            data[i, j] = rng.integers(0, ctx.n, size=ctx.order, dtype=np.int64)
    return MatrixGR._trusted(ctx, data)


def mat_random_invertible(ctx: RingContext, k: int, rng: np.random.Generator,
                          factors: int = DEFAULT_FACTORS) -> Tuple[MatrixGR, MatrixGR]:
    """
    Random invertible matrix together with its inverse.

    The matrix is a product of triangular factors alternating upper and
    lower; the inverse multiplies the factor inverses in reverse order.

    Args:
        ctx (RingContext): Ring
        k (int): Dimension
        rng (np.random.Generator): Random source
        factors (int): Number of triangular factors, at least 1

    Returns:
        Tuple[MatrixGR, MatrixGR]: (M1, M1_inv) with M1·M1_inv = M1_inv·M1 = I
    """
    if factors < 1:
        raise ParameterError(f"need at least one triangular factor, got {factors}")
    product = mat_identity(ctx, k)
    inverse = mat_identity(ctx, k)
    for index in range(factors):
        factor = random_triangular(ctx, k, rng, upper=(index % 2 == 0))
        product = mat_mul(product, factor)
        inverse = mat_mul(mat_triangular_inverse(factor), inverse)
    logger.debug(f"Sampled invertible {k}x{k} matrix from {factors} triangular factors")
    return product, inverse


def _require_z7_s5(ctx: RingContext) -> None:
    if (ctx.n, ctx.m) != (7, 5):
        raise ParameterError(f"the scalar matrix S is defined over Z_7[S_5], not Z_{ctx.n}[S_{ctx.m}]")


def order5_generators(ctx: RingContext):
    """
    One 5-cycle per subgroup of order 5 in S_5.

    Each subgroup is represented by its smallest-rank generator; the result
    is sorted by rank.
    """
    generators = []
    covered = set()
    for rank in range(ctx.order):
        p = ctx.element(rank)
        if perm_order(p) != 5 or rank in covered:
            continue
        generators.append(p)
        power = p
        for _ in range(4):
            covered.add(ctx.rank_of(power))
            power = power * p
    return generators


def scalar_h(ctx: RingContext):
    """h = (1 2)(3 4 5), a product of a 2-cycle and a 3-cycle."""
    return cycles_parse("(1 2)(3 4 5)", ctx.m)


def scalar_s(ctx: RingContext) -> GroupRingElement:
    """s = (3+g_1)(3+g_2)...(3+g_6)(5+h) in Z_7[S_5]."""
    _require_z7_s5(ctx)
    three = gr_scalar_mul(3, gr_one(ctx))
    s = gr_one(ctx)
    for g in order5_generators(ctx):
        s = gr_mul(s, gr_add(three, gr_from_permutation(ctx, g)))
    five_plus_h = gr_add(gr_scalar_mul(5, gr_one(ctx)), gr_from_permutation(ctx, scalar_h(ctx)))
    return gr_mul(s, five_plus_h)


def zero_divisor_witness(ctx: RingContext) -> GroupRingElement:
    """
    t = Σ_{i+j=5} h^i·2^j, a nonzero element with s·t = 0.

    (5+h) = (h-2) and (h-2)·t = h^6 - 2^6 = 0 because h has order 6 and
    2^6 = 1 in Z_7.
    """
    _require_z7_s5(ctx)
    h = gr_from_permutation(ctx, scalar_h(ctx))
    t = gr_zero(ctx)
    for i in range(6):
        t = gr_add(t, gr_scalar_mul(pow(2, 5 - i, ctx.n), gr_pow(h, i)))
    return t


def mat_scalar_S(ctx: RingContext, k: int) -> MatrixGR:
    """The scalar matrix S = s·I over Z_7[S_5]; it is never invertible."""
    return mat_scalar(ctx, k, scalar_s(ctx))


def payload_bits(ctx: RingContext, k: int) -> int:
    return k * k * ctx.order * ctx.coeff_bits


def payload_size(ctx: RingContext, k: int) -> int:
    return (payload_bits(ctx, k) + 7) // 8


def mat_encode(a: MatrixGR) -> bytes:
    """
    Canonical bit-packed encoding.

    ceil(log2 n) bits per coefficient, least significant bit first; entries
    row-major and coefficients by rank within an entry; zero padded to a
    whole byte.
    """
    width = a.ctx.coeff_bits
    flat = a.data.reshape(-1)
    bits = ((flat[:, None] >> np.arange(width, dtype=np.int64)) & 1).astype(np.uint8)
    return np.packbits(bits.reshape(-1), bitorder="little").tobytes()


def mat_decode(payload: bytes, ctx: RingContext, k: int) -> MatrixGR:
    """
    Inverse of mat_encode.

    Raises:
        EncodingError: On a wrong payload length, nonzero padding or a
            coefficient field that is not below n
    """
    expected = payload_size(ctx, k)
    if len(payload) != expected:
        raise EncodingError(f"payload is {len(payload)} bytes, expected {expected} for k={k} "
                            f"over Z_{ctx.n}[S_{ctx.m}]")
    width = ctx.coeff_bits
    count = k * k * ctx.order
    bits = np.unpackbits(np.frombuffer(payload, dtype=np.uint8), bitorder="little")
    if np.any(bits[count * width:]):
        raise EncodingError("nonzero padding bits after the matrix payload")
    fields = bits[:count * width].reshape(count, width).astype(np.int64)
    values = fields @ (np.int64(1) << np.arange(width, dtype=np.int64))
    if np.any(values >= ctx.n):
        raise EncodingError(f"coefficient field not below n = {ctx.n}")
    return MatrixGR._trusted(ctx, values.reshape(k, k, ctx.order))
