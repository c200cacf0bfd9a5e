#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Symmetric group S_m for grkex.

This module provides permutations of the points 1..m together with their
composition, inverse, sign, lexicographic rank and cycle notation, plus the
precomputed multiplication table used by the group ring.

Composition follows the "right factor acts first" rule: (p * q)(x) = p(q(x)).
"""

import re
import math
import logging
import itertools
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from ..errors import ContextMismatchError, ParameterError, ParseError

logger = logging.getLogger("grkex.symmetric_group")

# (m!)^2 entries; 720^2 for m = 6
TABLE_DEGREE_CAP = 6

IDENTITY_SYMBOLS = ("e", "ε", "\\epsilon")

_ELEMENT_RE = re.compile(r"\s*(\([^()]*\)\s*)+")
_CYCLE_RE = re.compile(r"\(([^()]*)\)")


@dataclass(frozen=True)
class Permutation:
    """
    A permutation in one-line notation.

    mapping[i] is the image of point i + 1; points and images are 1-based.
    """

    mapping: Tuple[int, ...]

    def __post_init__(self):
        mapping = tuple(int(v) for v in self.mapping)
        if not mapping:
            raise ParameterError("a permutation needs degree m >= 1")
        if sorted(mapping) != list(range(1, len(mapping) + 1)):
            raise ParameterError(f"not a bijection on 1..{len(mapping)}: {mapping}")
        object.__setattr__(self, "mapping", mapping)

    @property
    def degree(self) -> int:
        return len(self.mapping)

    def __call__(self, point: int) -> int:
        return self.mapping[point - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        return perm_compose(self, other)

    def __str__(self) -> str:
        return cycles_format(self)


def perm_identity(m: int) -> Permutation:
    """Return the identity permutation of degree m."""
    if m < 1:
        raise ParameterError(f"degree must be at least 1, got {m}")
    return Permutation(tuple(range(1, m + 1)))


def perm_compose(p: Permutation, q: Permutation) -> Permutation:
    """
    Compose two permutations, applying q first and then p.

    Args:
        p (Permutation): Left factor
        q (Permutation): Right factor, acts first

    Returns:
        Permutation: p∘q

    Raises:
        ContextMismatchError: If the degrees differ
    """
    if p.degree != q.degree:
        raise ContextMismatchError(f"degree mismatch: {p.degree} vs {q.degree}")
    return Permutation(tuple(p.mapping[x - 1] for x in q.mapping))


def perm_inverse(p: Permutation) -> Permutation:
    inverse = [0] * p.degree
    for point, image in enumerate(p.mapping, start=1):
        inverse[image - 1] = point
    return Permutation(tuple(inverse))


def perm_cycles(p: Permutation) -> List[Tuple[int, ...]]:
    """
    Disjoint cycles of p, fixed points included.

    Each cycle starts with its smallest point and cycles are ordered by that
    point, which is exactly the canonical text order.
    """
    seen = set()
    cycles = []
    for start in range(1, p.degree + 1):
        if start in seen:
            continue
        cycle = [start]
        seen.add(start)
        point = p(start)
        while point != start:
            cycle.append(point)
            seen.add(point)
            point = p(point)
        cycles.append(tuple(cycle))
    return cycles


def perm_sign(p: Permutation) -> int:
    """Return +1 for even permutations and -1 for odd ones."""
    transpositions = p.degree - len(perm_cycles(p))
    return -1 if transpositions % 2 else 1


def perm_order(p: Permutation) -> int:
    """Order of p in S_m (lcm of its cycle lengths)."""
    order = 1
    for cycle in perm_cycles(p):
        order = order * len(cycle) // math.gcd(order, len(cycle))
    return order


def perm_rank(p: Permutation) -> int:
    """
    Lexicographic rank of p via its Lehmer code.

    The identity has rank 0 and the reversal [m, ..., 1] has rank m! - 1.
    """
    m = p.degree
    rank = 0
    for i, value in enumerate(p.mapping):
        smaller_after = sum(1 for later in p.mapping[i + 1:] if later < value)
        rank += smaller_after * math.factorial(m - 1 - i)
    return rank


def perm_unrank(m: int, index: int) -> Permutation:
    """
    Inverse of perm_rank.

    Args:
        m (int): Degree
        index (int): Rank in 0..m!-1

    Returns:
        Permutation: The permutation with the given lexicographic rank

    Raises:
        ParameterError: If index is out of range
    """
    if m < 1:
        raise ParameterError(f"degree must be at least 1, got {m}")
    if not 0 <= index < math.factorial(m):
        raise ParameterError(f"rank {index} out of range for S_{m}")
    remaining = list(range(1, m + 1))
    mapping = []
    for i in range(m - 1, -1, -1):
        digit, index = divmod(index, math.factorial(i))
        mapping.append(remaining.pop(digit))
    return Permutation(tuple(mapping))


def all_permutations(m: int) -> List[Permutation]:
    """All of S_m listed in rank order."""
    # itertools yields lexicographic order for sorted input, i.e. rank order
    return [Permutation(t) for t in itertools.permutations(range(1, m + 1))]


@dataclass(frozen=True)
class MultTable:
    """
    Precomputed multiplication table of S_m on ranks.

    table[i][j] = rank(unrank(i) ∘ unrank(j)); sign[i] = sign(unrank(i));
    inverse[i] = rank(unrank(i)^-1). All arrays are read-only.
    """

    m: int
    order: int
    table: np.ndarray
    sign: np.ndarray
    inverse: np.ndarray


def _rank_lookup(m: int, one_line: np.ndarray) -> np.ndarray:
    """Ranks for an array of 0-based one-line rows, listed in rank order."""
    weights = m ** np.arange(m - 1, -1, -1, dtype=np.int64)
    lookup = np.full(m ** m, -1, dtype=np.int64)
    lookup[one_line @ weights] = np.arange(len(one_line), dtype=np.int64)
    return lookup


def mult_table_build(m: int) -> MultTable:
    """
    Build the multiplication table of S_m.

    Args:
        m (int): Degree, at most TABLE_DEGREE_CAP

    Returns:
        MultTable: Read-only table, sign and inverse arrays

    Raises:
        ParameterError: If m exceeds the table cap
    """
    if m < 1 or m > TABLE_DEGREE_CAP:
        raise ParameterError(
            f"multiplication table supports 1 <= m <= {TABLE_DEGREE_CAP}, got {m}")

    elements = all_permutations(m)
    order = len(elements)
    one_line = np.array([p.mapping for p in elements], dtype=np.int64) - 1

    # composed[i, j, x] = elements[i](elements[j](x))
    composed = one_line[np.arange(order)[:, None, None], one_line[None, :, :]]
    weights = m ** np.arange(m - 1, -1, -1, dtype=np.int64)
    lookup = _rank_lookup(m, one_line)
    table = lookup[composed @ weights]

    sign = np.array([perm_sign(p) for p in elements], dtype=np.int8)
    inverse = np.argmax(table == 0, axis=1).astype(np.int64)

    for array in (table, sign, inverse):
        array.setflags(write=False)

    logger.debug(f"Built multiplication table for S_{m} ({order}x{order})")
    return MultTable(m=m, order=order, table=table, sign=sign, inverse=inverse)


def _parse_points(body: str, m: int) -> List[int]:
    body = body.strip()
    if not body:
        raise ParseError("empty cycle '()'")
    if any(ch.isspace() for ch in body):
        tokens = body.split()
    elif len(body) == 1 or m <= 9:
        tokens = list(body)
    else:
        raise ParseError(f"unspaced cycle '({body})' is ambiguous for m = {m}")

    points = []
    for token in tokens:
        if not token.isdigit():
            raise ParseError(f"bad point '{token}' in cycle '({body})'")
        point = int(token)
        if not 1 <= point <= m:
            raise ParseError(f"point {point} out of range 1..{m}")
        if point in points:
            raise ParseError(f"point {point} repeated inside cycle '({body})'")
        points.append(point)
    return points


def cycles_parse(text: str, m: int) -> Permutation:
    """
    Parse cycle notation such as "(1 5 4 3 2)", "(15)(24)" or "ε".

    A product of cycles is evaluated right to left, so overlapping cycles are
    composed rather than rejected.

    Raises:
        ParseError: On malformed text or points outside 1..m
    """
    text = text.strip()
    if text in IDENTITY_SYMBOLS:
        return perm_identity(m)
    if not _ELEMENT_RE.fullmatch(text):
        raise ParseError(f"malformed cycle notation: '{text}'")

    result = perm_identity(m)
    for body in _CYCLE_RE.findall(text):
        points = _parse_points(body, m)
        mapping = list(range(1, m + 1))
        for here, there in zip(points, points[1:] + points[:1]):
            mapping[here - 1] = there
        result = perm_compose(result, Permutation(tuple(mapping)))
    return result


def cycles_format(p: Permutation) -> str:
    """Canonical disjoint-cycle text; the identity prints as "e"."""
    cycles = [c for c in perm_cycles(p) if len(c) > 1]
    if not cycles:
        return "e"
    return "".join("(" + " ".join(str(x) for x in c) + ")" for c in cycles)
