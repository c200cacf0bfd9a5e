#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Group ring Z_n[S_m] for grkex.

Elements are dense coefficient vectors of length m!, indexed by permutation
rank. Products use the precomputed S_m table through the left regular
representation: (x·y)[k] = Σ_j x[rank(g_k g_j^-1)] · y[j], which turns every
product into one gather and one matrix-vector product.
"""

import logging
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..errors import ContextMismatchError, ParameterError, ParseError
from .symmetric_group import (
    IDENTITY_SYMBOLS,
    TABLE_DEGREE_CAP,
    Permutation,
    all_permutations,
    cycles_format,
    cycles_parse,
    mult_table_build,
    perm_compose,
    perm_inverse,
    perm_rank,
    perm_sign,
)

logger = logging.getLogger("grkex.group_ring")

MAX_DEGREE = 8
MAX_MODULUS = 2 ** 31


def exact_matmul(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """
    Integer matrix product reduced mod n, without overflow.

    Float BLAS is used whenever every partial sum stays below 2^53, which
    covers all the moduli used in practice.
    """
    bound = (n - 1) ** 2 * a.shape[-1]
    if bound < 2 ** 53:
        product = a.astype(np.float64) @ b.astype(np.float64)
        return np.rint(product).astype(np.int64) % n
    if bound < 2 ** 63:
        return (a @ b) % n
    return ((a.astype(object) @ b.astype(object)) % n).astype(np.int64)


class RingContext:
    """
    The ring Z_n[S_m] together with its S_m bookkeeping.

    With a multiplication table (m <= TABLE_DEGREE_CAP by default) products
    are table driven; otherwise group elements are composed on the fly.
    Instances are immutable once built and safe to share.
    """

    def __init__(self, n: int, m: int, use_table: Optional[bool] = None):
        """
        Initialize the ring context.

        Args:
            n (int): Coefficient modulus, at least 2
            m (int): Degree of the symmetric group
            use_table (bool, optional): Force table-driven (True) or on-the-fly
                (False) products; default picks the table when m allows it
        """
        if not 2 <= n <= MAX_MODULUS:
            raise ParameterError(f"modulus n must be in 2..{MAX_MODULUS}, got {n}")
        if not 1 <= m <= MAX_DEGREE:
            raise ParameterError(f"degree m must be in 1..{MAX_DEGREE}, got {m}")
        if use_table is None:
            use_table = m <= TABLE_DEGREE_CAP

        self._n = n
        self._m = m
        self._elements = tuple(all_permutations(m))
        self._order = len(self._elements)
        self._table = mult_table_build(m) if use_table else None

        if self._table is not None:
            self._sign = self._table.sign
            self._inverse = self._table.inverse
            # left_index[k, j] = rank(g_k ∘ g_j^-1)
            self._left_index = self._table.table[:, self._table.inverse]
            self._left_index.setflags(write=False)
        else:
            self._sign = np.array([perm_sign(p) for p in self._elements], dtype=np.int8)
            self._inverse = np.array(
                [perm_rank(perm_inverse(p)) for p in self._elements], dtype=np.int64)
            self._left_index = None
            self._sign.setflags(write=False)
            self._inverse.setflags(write=False)

    @property
    def n(self) -> int:
        return self._n

    @property
    def m(self) -> int:
        return self._m

    @property
    def order(self) -> int:
        return self._order

    @property
    def table(self):
        return self._table

    @property
    def sign(self) -> np.ndarray:
        return self._sign

    @property
    def inverse(self) -> np.ndarray:
        return self._inverse

    @property
    def left_index(self) -> Optional[np.ndarray]:
        return self._left_index

    @property
    def coeff_bits(self) -> int:
        """Bits per packed coefficient, ceil(log2 n)."""
        return (self._n - 1).bit_length()

    def element(self, rank: int) -> Permutation:
        return self._elements[rank]

    def rank_of(self, p: Permutation) -> int:
        if p.degree != self._m:
            raise ContextMismatchError(f"permutation of degree {p.degree} in Z_{self._n}[S_{self._m}]")
        return perm_rank(p)

    def compose_ranks(self, i: int, j: int) -> int:
        if self._table is not None:
            return int(self._table.table[i, j])
        return perm_rank(perm_compose(self._elements[i], self._elements[j]))

    def __eq__(self, other) -> bool:
        return isinstance(other, RingContext) and (self._n, self._m) == (other._n, other._m)

    def __hash__(self) -> int:
        return hash((self._n, self._m))

    def __reduce__(self):
        # rebuild from (n, m) in worker processes instead of shipping the tables
        return (_restore_context, (self._n, self._m, self._table is not None))

    def __repr__(self) -> str:
        mode = "table" if self._table is not None else "on-the-fly"
        return f"RingContext(n={self._n}, m={self._m}, {mode})"


def _restore_context(n: int, m: int, use_table: bool) -> "RingContext":
    if use_table == (m <= TABLE_DEGREE_CAP):
        return get_context(n, m)
    return RingContext(n, m, use_table)


@lru_cache(maxsize=None)
def get_context(n: int, m: int) -> RingContext:
    """Shared table-backed context for Z_n[S_m]."""
    return RingContext(n, m)


class GroupRingElement:
    """
    An element Σ r_i g_i of Z_n[S_m].

    coeffs[i] is the coefficient of the permutation of rank i, always reduced
    into 0..n-1. The array is read-only.
    """

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: RingContext, coeffs):
        array = np.array(coeffs, dtype=np.int64)
        if array.shape != (ctx.order,):
            raise ParameterError(f"expected {ctx.order} coefficients, got shape {array.shape}")
        if array.size and (array.min() < 0 or array.max() >= ctx.n):
            raise ParameterError(f"coefficients must lie in 0..{ctx.n - 1}")
        array.setflags(write=False)
        self.ctx = ctx
        self.coeffs = array

    @classmethod
    def _trusted(cls, ctx: RingContext, array: np.ndarray) -> "GroupRingElement":
        element = cls.__new__(cls)
        array.setflags(write=False)
        element.ctx = ctx
        element.coeffs = array
        return element

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        return self.ctx == other.ctx and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self) -> int:
        return hash((self.ctx, self.coeffs.tobytes()))

    def __add__(self, other: "GroupRingElement") -> "GroupRingElement":
        return gr_add(self, other)

    def __sub__(self, other: "GroupRingElement") -> "GroupRingElement":
        return gr_sub(self, other)

    def __neg__(self) -> "GroupRingElement":
        return gr_neg(self)

    def __mul__(self, other) -> "GroupRingElement":
        if isinstance(other, GroupRingElement):
            return gr_mul(self, other)
        return gr_scalar_mul(int(other) % self.ctx.n, self)

    def __rmul__(self, other) -> "GroupRingElement":
        return gr_scalar_mul(int(other) % self.ctx.n, self)

    def __str__(self) -> str:
        return gr_format(self)

    def __repr__(self) -> str:
        return f"GroupRingElement(Z_{self.ctx.n}[S_{self.ctx.m}], {gr_format(self)})"


def _check_same(x: GroupRingElement, y: GroupRingElement) -> None:
    if x.ctx != y.ctx:
        raise ContextMismatchError(f"ring mismatch: {x.ctx!r} vs {y.ctx!r}")


def gr_zero(ctx: RingContext) -> GroupRingElement:
    return GroupRingElement._trusted(ctx, np.zeros(ctx.order, dtype=np.int64))


def gr_one(ctx: RingContext) -> GroupRingElement:
    coeffs = np.zeros(ctx.order, dtype=np.int64)
    coeffs[0] = 1 % ctx.n
    return GroupRingElement._trusted(ctx, coeffs)


def gr_from_permutation(ctx: RingContext, p: Permutation, coeff: int = 1) -> GroupRingElement:
    """Embed coeff·p into the group ring."""
    coeffs = np.zeros(ctx.order, dtype=np.int64)
    coeffs[ctx.rank_of(p)] = coeff % ctx.n
    return GroupRingElement._trusted(ctx, coeffs)


def gr_from_terms(ctx: RingContext, terms: Sequence[Tuple[int, Permutation]]) -> GroupRingElement:
    """Build Σ c·p from (c, p) pairs; repeated permutations accumulate."""
    coeffs = np.zeros(ctx.order, dtype=np.int64)
    for coeff, p in terms:
        index = ctx.rank_of(p)
        coeffs[index] = (coeffs[index] + coeff) % ctx.n
    return GroupRingElement._trusted(ctx, coeffs)


def gr_add(x: GroupRingElement, y: GroupRingElement) -> GroupRingElement:
    _check_same(x, y)
    return GroupRingElement._trusted(x.ctx, (x.coeffs + y.coeffs) % x.ctx.n)


def gr_neg(x: GroupRingElement) -> GroupRingElement:
    return GroupRingElement._trusted(x.ctx, (-x.coeffs) % x.ctx.n)


def gr_sub(x: GroupRingElement, y: GroupRingElement) -> GroupRingElement:
    _check_same(x, y)
    return GroupRingElement._trusted(x.ctx, (x.coeffs - y.coeffs) % x.ctx.n)


def gr_scalar_mul(c: int, x: GroupRingElement) -> GroupRingElement:
    """Multiply every coefficient of x by the residue c."""
    if not 0 <= c < x.ctx.n:
        raise ParameterError(f"scalar {c} is not a residue mod {x.ctx.n}")
    return GroupRingElement._trusted(x.ctx, (x.coeffs * c) % x.ctx.n)


def left_regular(x: GroupRingElement) -> np.ndarray:
    """Matrix L(x) with L(x) @ y.coeffs = (x·y).coeffs (table contexts only)."""
    return x.coeffs[x.ctx.left_index]


def _mul_on_the_fly(x: GroupRingElement, y: GroupRingElement) -> np.ndarray:
    ctx = x.ctx
    result = np.zeros(ctx.order, dtype=np.int64)
    right = [(int(j), int(y.coeffs[j])) for j in np.flatnonzero(y.coeffs)]
    for i in np.flatnonzero(x.coeffs):
        a = int(x.coeffs[i])
        for j, b in right:
            k = ctx.compose_ranks(int(i), j)
            result[k] = (result[k] + a * b) % ctx.n
    return result


def gr_mul(x: GroupRingElement, y: GroupRingElement) -> GroupRingElement:
    """
    Convolution product x·y.

    Args:
        x (GroupRingElement): Left factor
        y (GroupRingElement): Right factor

    Returns:
        GroupRingElement: Σ_k (Σ_{g_i g_j = g_k} x_i y_j) g_k, reduced mod n

    Raises:
        ContextMismatchError: If x and y live in different rings
    """
    _check_same(x, y)
    ctx = x.ctx
    if ctx.left_index is None:
        return GroupRingElement._trusted(ctx, _mul_on_the_fly(x, y))
    return GroupRingElement._trusted(ctx, exact_matmul(left_regular(x), y.coeffs, ctx.n))


def gr_pow(x: GroupRingElement, e: int) -> GroupRingElement:
    """x^e by square and multiply, with x^0 = 1."""
    if e < 0:
        raise ParameterError("group ring powers need e >= 0")
    result = gr_one(x.ctx)
    base = x
    while e:
        if e & 1:
            result = gr_mul(result, base)
        e >>= 1
        if e:
            base = gr_mul(base, base)
    return result


def gr_random(ctx: RingContext, rng: np.random.Generator) -> GroupRingElement:
    """
    Uniformly random element: every coefficient independent on 0..n-1.

    Generator.integers samples bounded ranges by rejection, so there is no
    modulo bias.
    """
    return GroupRingElement._trusted(ctx, rng.integers(0, ctx.n, size=ctx.order, dtype=np.int64))


def gr_random_permutation(ctx: RingContext, rng: np.random.Generator) -> Permutation:
    return ctx.element(int(rng.integers(0, ctx.order)))


def gr_support_size(x: GroupRingElement) -> int:
    return int(np.count_nonzero(x.coeffs))


def gr_sign_image(x: GroupRingElement) -> Tuple[int, int]:
    """
    Image of x under the sign map S_m -> {±1}, as an element of Z_n[Z_2].

    Returns:
        Tuple[int, int]: (sum over even permutations, sum over odd ones) mod n
    """
    even = int(x.coeffs[x.ctx.sign == 1].sum() % x.ctx.n)
    odd = int(x.coeffs[x.ctx.sign == -1].sum() % x.ctx.n)
    return even, odd


def sign_image_mul(u: Tuple[int, int], v: Tuple[int, int], n: int) -> Tuple[int, int]:
    """Product in Z_n[Z_2] of two (even, odd) pairs."""
    return ((u[0] * v[0] + u[1] * v[1]) % n, (u[0] * v[1] + u[1] * v[0]) % n)


def _parse_term(term: str, ctx: RingContext) -> Tuple[int, Permutation]:
    digits = 0
    while digits < len(term) and term[digits].isdigit():
        digits += 1
    coeff = int(term[:digits]) if digits else 1
    body = term[digits:].strip()
    if not body:
        raise ParseError(f"term '{term}' has no permutation")
    if coeff >= ctx.n:
        raise ParseError(f"coefficient {coeff} is not below n = {ctx.n}")
    if body not in IDENTITY_SYMBOLS and not body.startswith("("):
        raise ParseError(f"malformed term '{term}'")
    return coeff, cycles_parse(body, ctx.m)


def gr_parse(text: str, ctx: RingContext) -> GroupRingElement:
    """
    Parse a term sum such as "5(123)+2(15)(24)+(153)".

    Raises:
        ParseError: On malformed terms or coefficients that are not below n
    """
    text = text.strip()
    if text == "0":
        return gr_zero(ctx)
    terms: List[Tuple[int, Permutation]] = []
    for term in text.split("+"):
        term = term.strip()
        if not term:
            raise ParseError(f"empty term in '{text}'")
        terms.append(_parse_term(term, ctx))
    return gr_from_terms(ctx, terms)


def gr_format(x: GroupRingElement, identity: str = "e") -> str:
    """Canonical text: terms by rank, coefficient 1 omitted, zero prints "0"."""
    if identity not in IDENTITY_SYMBOLS:
        raise ParameterError(f"unknown identity symbol '{identity}'")
    terms = []
    for i in np.flatnonzero(x.coeffs):
        coeff = int(x.coeffs[i])
        cycles = cycles_format(x.ctx.element(int(i))) if i else identity
        terms.append(cycles if coeff == 1 else f"{coeff}{cycles}")
    return "+".join(terms) if terms else "0"
