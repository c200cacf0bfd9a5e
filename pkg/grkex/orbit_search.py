#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Orbit and discrete logarithm searches for grkex.

The power sequence A, A², A³, ... of any matrix is eventually periodic.
This module measures it (Floyd cycle detection, order of invertible
matrices) and solves toy discrete logarithms by brute force and by
baby-step giant-step. Every search is budgeted in matrix products and can
also be capped by wall-clock time.
"""

import math
import time
import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional

from .errors import BudgetExceededError, ContextMismatchError, ParameterError
from .algebra.matrix_semigroup import MatrixGR, mat_identity, mat_is_diagonal, mat_mul, mat_pow

logger = logging.getLogger("grkex.orbit_search")

DEFAULT_BSGS_ENTRY_CAP = 2 ** 20


class _Budget:
    """Counts matrix products against a product budget and a deadline."""

    def __init__(self, budget: Optional[int], wall_seconds: Optional[float]):
        self.budget = budget
        self.used = 0
        self.started = time.monotonic()
        self.deadline = None if wall_seconds is None else self.started + wall_seconds
        self.timed_out = False

    def spend(self) -> bool:
        """Account for one product; False once the budget or deadline is gone."""
        if self.budget is not None and self.used >= self.budget:
            return False
        if self.deadline is not None and time.monotonic() > self.deadline:
            self.timed_out = True
            return False
        self.used += 1
        return True

    def count(self) -> None:
        self.used += 1

    @property
    def wall_ms(self) -> float:
        return (time.monotonic() - self.started) * 1000.0


@dataclass
class OrbitResult:
    """
    Outcome of a power-sequence search.

    When found, A^tail = A^(tail + period) with both values minimal.
    """

    found: bool
    tail: Optional[int] = None
    period: Optional[int] = None
    budget_exhausted: bool = False
    timed_out: bool = False
    multiplications_used: int = 0
    wall_ms: float = 0.0

    def to_record(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class OrderResult:
    found: bool
    order: Optional[int] = None
    first_diagonal: Optional[int] = None
    budget_exhausted: bool = False
    timed_out: bool = False
    multiplications_used: int = 0
    wall_ms: float = 0.0

    def to_record(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class DlogResult:
    found: bool
    exponent: Optional[int] = None
    entries_stored: int = 0
    multiplications_used: int = 0
    wall_ms: float = 0.0

    def to_record(self) -> Dict[str, Any]:
        return asdict(self)


def _check_same_shape(m: MatrixGR, a: MatrixGR) -> None:
    if m.ctx != a.ctx or m.k != a.k:
        raise ContextMismatchError("base and target must be matrices of the same ring and size")


def order_scan(a: MatrixGR, cap: int, wall_seconds: Optional[float] = None) -> OrderResult:
    """
    Walk A, A², ... up to A^cap looking for the identity.

    Only the current power is kept. The first power that is diagonal is
    reported too; the identity itself counts as diagonal.

    Args:
        a (MatrixGR): Matrix, assumed invertible
        cap (int): Largest exponent to try
        wall_seconds (float, optional): Wall-clock limit

    Returns:
        OrderResult: order, first diagonal power and telemetry
    """
    if cap < 1:
        raise ParameterError(f"cap must be at least 1, got {cap}")
    identity = mat_identity(a.ctx, a.k)
    budget = _Budget(cap - 1, wall_seconds)
    result = OrderResult(found=False)
    power = a
    exponent = 1
    while True:
        if result.first_diagonal is None and mat_is_diagonal(power):
            result.first_diagonal = exponent
        if power == identity:
            result.found = True
            result.order = exponent
            break
        if not budget.spend():
            result.budget_exhausted = True
            result.timed_out = budget.timed_out
            break
        power = mat_mul(power, a)
        exponent += 1
    result.multiplications_used = budget.used
    result.wall_ms = budget.wall_ms
    logger.debug(f"Order scan stopped at exponent {exponent} (found={result.found})")
    return result


def order_of_invertible(a: MatrixGR, cap: int) -> Optional[int]:
    """Smallest t <= cap with A^t = I, or None."""
    return order_scan(a, cap).order


def orbit_detect(a: MatrixGR, budget: int, wall_seconds: Optional[float] = None) -> OrbitResult:
    """
    Floyd cycle detection on the sequence A, A², A³, ...

    Uses constant memory. The three classical phases find a collision, then
    the minimal tail and finally the minimal period.

    Args:
        a (MatrixGR): Matrix
        budget (int): Maximum number of matrix products
        wall_seconds (float, optional): Wall-clock limit

    Returns:
        OrbitResult: (tail, period) if found within budget; exhaustion is
            reported in the result rather than raised
    """
    if budget < 1:
        raise ParameterError(f"budget must be at least 1, got {budget}")
    meter = _Budget(budget, wall_seconds)

    def step(x: MatrixGR) -> Optional[MatrixGR]:
        if not meter.spend():
            return None
        return mat_mul(x, a)

    def exhausted() -> OrbitResult:
        logger.debug(f"Orbit search gave up after {meter.used} products")
        return OrbitResult(found=False, budget_exhausted=True, timed_out=meter.timed_out,
                           multiplications_used=meter.used, wall_ms=meter.wall_ms)

    # phase 1: tortoise at x_i, hare at x_2i
    tortoise = step(a)
    hare = step(tortoise) if tortoise is not None else None
    while True:
        if tortoise is None or hare is None:
            return exhausted()
        if tortoise == hare:
            break
        tortoise = step(tortoise)
        hare = step(hare)
        hare = step(hare) if hare is not None else None

    # phase 2: minimal tail
    mu = 0
    tortoise = a
    while tortoise != hare:
        tortoise = step(tortoise)
        hare = step(hare)
        if tortoise is None or hare is None:
            return exhausted()
        mu += 1

    # phase 3: minimal period
    period = 1
    hare = step(tortoise)
    while hare is not None and hare != tortoise:
        hare = step(hare)
        period += 1
    if hare is None:
        return exhausted()

    logger.debug(f"Orbit found: tail {mu + 1}, period {period}, {meter.used} products")
    return OrbitResult(found=True, tail=mu + 1, period=period,
                       multiplications_used=meter.used, wall_ms=meter.wall_ms)


def brute_dlog(m: MatrixGR, a: MatrixGR, bound: int) -> Optional[int]:
    """
    Smallest x in 0..bound with M^x = A, trying every exponent in turn.

    M^0 is the identity, matching bsgs_solve.
    """
    if bound < 1:
        raise ParameterError(f"bound must be at least 1, got {bound}")
    _check_same_shape(m, a)
    power = mat_identity(m.ctx, m.k)
    for x in range(bound + 1):
        if power == a:
            return x
        if x < bound:
            power = mat_mul(power, m)
    return None


def bsgs_search(m: MatrixGR, a: MatrixGR, bound: int,
                entry_cap: int = DEFAULT_BSGS_ENTRY_CAP) -> DlogResult:
    """
    Baby-step giant-step for M^x = A with 0 <= x <= bound.

    With s = ceil(sqrt(bound)), the baby steps store A·M^i for i = 0..s
    keyed by canonical encoding; the giant steps walk M^(js) for
    j = 0..ceil(bound/s) and turn each hit into a candidate x = js - i.
    M need not be invertible, so every candidate is checked by direct
    powering before it is accepted.

    Args:
        m (MatrixGR): Base
        a (MatrixGR): Target
        bound (int): Largest exponent considered
        entry_cap (int): Largest baby-step table allowed

    Returns:
        DlogResult: The smallest solution (if any) and telemetry

    Raises:
        BudgetExceededError: If the baby-step table would exceed entry_cap
    """
    if bound < 1:
        raise ParameterError(f"bound must be at least 1, got {bound}")
    _check_same_shape(m, a)
    s = math.isqrt(bound - 1) + 1
    if s + 1 > entry_cap:
        raise BudgetExceededError(
            f"baby-step table needs {s + 1} entries, cap is {entry_cap}")

    meter = _Budget(None, None)
    started = time.monotonic()

    baby: Dict[bytes, List[int]] = {}
    step = a
    for i in range(s + 1):
        baby.setdefault(step.encoded(), []).append(i)
        if i < s:
            step = mat_mul(step, m)
            meter.count()

    giant_step = mat_pow(m, s, on_multiply=meter.count)
    giant = mat_identity(m.ctx, m.k)
    giants = (bound + s - 1) // s
    result = DlogResult(found=False, entries_stored=s + 1)
    for j in range(giants + 1):
        hits = baby.get(giant.encoded(), [])
        candidates = sorted(j * s - i for i in hits if 0 <= j * s - i <= bound)
        for x in candidates:
            if mat_pow(m, x, on_multiply=meter.count) == a:
                result.found = True
                result.exponent = x
                break
        if result.found:
            break
        if j < giants:
            giant = mat_mul(giant, giant_step)
            meter.count()

    result.multiplications_used = meter.used
    result.wall_ms = (time.monotonic() - started) * 1000.0
    logger.debug(f"BSGS stored {result.entries_stored} entries, used {meter.used} products")
    return result


def bsgs_solve(m: MatrixGR, a: MatrixGR, bound: int,
               entry_cap: int = DEFAULT_BSGS_ENTRY_CAP) -> Optional[int]:
    """Smallest x <= bound with M^x = A via baby-step giant-step, or None."""
    return bsgs_search(m, a, bound, entry_cap).exponent
