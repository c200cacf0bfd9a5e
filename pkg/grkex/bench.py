#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Exponentiation benchmarks for grkex.

Times mat_pow on random k×k matrices over Z_n[S_m] with random exponents of a
fixed number of decimal digits, and reports the key size of each parameter
set alongside the timings.
"""

import math
import time
import logging
import statistics
from dataclasses import asdict, dataclass
from typing import Any, Dict, Iterable, List

from .errors import ParameterError
from .utils import make_rng
from .algebra.group_ring import get_context
from .algebra.matrix_semigroup import mat_pow, mat_random, payload_bits
from .kex_protocol import sample_range

logger = logging.getLogger("grkex.bench")

STREAM_BENCH = 7


@dataclass
class BenchResult:
    n: int
    m: int
    k: int
    exp_digits: int
    reps: int
    mean_s: float
    stdev_s: float
    payload_bits: int
    key_space_log10: float

    def to_record(self) -> Dict[str, Any]:
        return asdict(self)


def key_space_log10(n: int, m: int, k: int) -> float:
    """log10 of the number of k×k matrices over Z_n[S_m], n^(k²·m!)."""
    return k * k * math.factorial(m) * math.log10(n)


def bench_pow(n: int, m: int, k: int, exp_digits: int, reps: int, seed: int) -> BenchResult:
    """
    Mean and standard deviation of one exponentiation.

    Each repetition draws a fresh matrix and an exponent with exactly
    exp_digits digits; only the mat_pow call is timed.
    """
    if reps < 1:
        raise ParameterError(f"reps must be at least 1, got {reps}")
    if exp_digits < 1:
        raise ParameterError(f"exp_digits must be at least 1, got {exp_digits}")
    ctx = get_context(n, m)
    timings = []
    for rep in range(reps):
        rng = make_rng(seed, STREAM_BENCH, k, n, exp_digits, rep)
        base = mat_random(ctx, k, rng)
        exponent = sample_range(10 ** (exp_digits - 1), 10 ** exp_digits - 1, rng)
        start = time.perf_counter()
        mat_pow(base, exponent)
        timings.append(time.perf_counter() - start)
    mean = statistics.mean(timings)
    stdev = statistics.stdev(timings) if reps > 1 else 0.0
    logger.debug(f"bench k={k} n={n} digits={exp_digits}: {mean:.4f}s over {reps} reps")
    return BenchResult(n=n, m=m, k=k, exp_digits=exp_digits, reps=reps, mean_s=mean,
                       stdev_s=stdev, payload_bits=payload_bits(ctx, k),
                       key_space_log10=key_space_log10(n, m, k))


def bench_grid(ks: Iterable[int], ns: Iterable[int], digits: Iterable[int], m: int, reps: int,
               seed: int) -> List[BenchResult]:
    """bench_pow over every (k, n, exp_digits) combination."""
    return [bench_pow(n, m, k, d, reps, seed) for k in ks for n in ns for d in digits]
