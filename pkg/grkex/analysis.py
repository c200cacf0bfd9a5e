#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Statistical experiments for grkex.

This module provides the decision Diffie-Hellman experiments (M^{ab} versus
M^c, M^a versus a random matrix, and joint residue triples of M^a, M^b and
M^{ab}), support-size statistics, Q-Q pairing and a chi-square uniformity
test, plus CSV writers for all of them.

Every trial draws from its own random stream keyed by (seed, experiment,
trial), so a run is reproducible bit for bit whether it is executed serially
or spread over worker processes.
"""

import csv
import math
import logging
from fractions import Fraction
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterable, List, NamedTuple, Optional, Sequence, TextIO, Tuple

import numpy as np
from scipy import stats

from .errors import ContextMismatchError, ParameterError
from .utils import artifact_header, format_float, make_rng
from .algebra.group_ring import RingContext
from .algebra.matrix_semigroup import MatrixGR, mat_pow, mat_random
from .kex_protocol import KexParams, kex_sample_exponent, sample_range

logger = logging.getLogger("grkex.analysis")

STREAM_PRODUCT = 1
STREAM_UNIFORMITY = 2
STREAM_TRIPLES = 3

MIN_EXPECTED_COUNT = 5


@dataclass
class FrequencyTable:
    """
    Residue counts per (matrix entry, group element) cell.

    counts[e, g, r] is how often the coefficient of group element g (by rank)
    in entry e (row-major) took residue r.
    """

    n: int
    m: int
    k: int
    counts: np.ndarray
    trials: int = 0

    @classmethod
    def empty(cls, ctx: RingContext, k: int) -> "FrequencyTable":
        return cls(ctx.n, ctx.m, k, np.zeros((k * k, ctx.order, ctx.n), dtype=np.int64))

    @property
    def dims(self) -> Tuple[int, int, int]:
        return self.counts.shape

    def add(self, matrix: MatrixGR) -> None:
        """Tally every coefficient of one sampled matrix."""
        entries, elements, _ = self.counts.shape
        values = matrix.data.reshape(entries, elements)
        self.counts[np.arange(entries)[:, None], np.arange(elements)[None, :], values] += 1
        self.trials += 1

    def residue_marginals(self) -> np.ndarray:
        """Total count of each residue over all cells."""
        return self.counts.sum(axis=(0, 1))


@dataclass
class TripleTable:
    """
    Counts of concatenated residue triples per (entry, group element) cell.

    The triple (x, y, z) of coefficients taken from M^a, M^b and M^{ab}
    lands in column x·n² + y·n + z, so there are n³ columns.
    """

    n: int
    m: int
    k: int
    counts: np.ndarray
    trials: int = 0

    @classmethod
    def empty(cls, ctx: RingContext, k: int) -> "TripleTable":
        return cls(ctx.n, ctx.m, k, np.zeros((k * k, ctx.order, ctx.n ** 3), dtype=np.int64))

    @property
    def dims(self) -> Tuple[int, int, int]:
        return self.counts.shape

    def add(self, ma: MatrixGR, mb: MatrixGR, mab: MatrixGR) -> None:
        entries, elements, _ = self.counts.shape
        n = self.n
        index = (ma.data * n * n + mb.data * n + mab.data).reshape(entries, elements)
        self.counts[np.arange(entries)[:, None], np.arange(elements)[None, :], index] += 1
        self.trials += 1


class ChiSquareResult(NamedTuple):
    statistic: float
    p_value: float
    dof: int


def _run_trials(worker: Callable, jobs: Sequence[Tuple], workers: int) -> Iterable:
    """Yield worker(*job) for every job, in job order."""
    if workers <= 1 or len(jobs) <= 1:
        for job in jobs:
            yield worker(*job)
        return
    chunk = max(1, len(jobs) // (workers * 8))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(worker, *zip(*jobs), chunksize=chunk)


def _check_trials(trials: int, workers: int = 1) -> None:
    if trials < 1:
        raise ParameterError(f"trials must be at least 1, got {trials}")
    if workers < 1:
        raise ParameterError(f"workers must be at least 1, got {workers}")


def _product_trial(params: KexParams, c_range: Tuple[int, int], seed: int,
                   trial: int) -> Tuple[MatrixGR, MatrixGR]:
    rng = make_rng(seed, STREAM_PRODUCT, trial)
    base = mat_random(params.context(), params.k, rng)
    a = kex_sample_exponent(params, rng)
    b = kex_sample_exponent(params, rng)
    c = sample_range(c_range[0], c_range[1], rng)
    return mat_pow(base, a * b), mat_pow(base, c)


def exp_ddh_product(params: KexParams, trials: int, seed: int, c_range: Tuple[int, int],
                    workers: int = 1) -> Tuple[FrequencyTable, FrequencyTable]:
    """
    Compare the coefficient distributions of M^{ab} and M^c.

    Each trial draws a fresh random M, a and b from the private range of
    params and c from c_range.

    Args:
        params (KexParams): Ring, dimension and the range for a and b
        trials (int): Number of trials
        seed (int): Run seed
        c_range (Tuple[int, int]): Inclusive range for c
        workers (int): Worker processes, 1 runs in-process

    Returns:
        Tuple[FrequencyTable, FrequencyTable]: Tables for M^{ab} and M^c
    """
    _check_trials(trials, workers)
    ctx = params.context()
    product_table = FrequencyTable.empty(ctx, params.k)
    random_table = FrequencyTable.empty(ctx, params.k)
    jobs = [(params, c_range, seed, trial) for trial in range(trials)]
    for mab, mc in _run_trials(_product_trial, jobs, workers):
        product_table.add(mab)
        random_table.add(mc)
    logger.debug(f"M^ab vs M^c experiment finished after {trials} trials")
    return product_table, random_table


def _uniformity_trial(params: KexParams, a_range: Tuple[int, int], seed: int,
                      trial: int) -> Tuple[MatrixGR, MatrixGR]:
    rng = make_rng(seed, STREAM_UNIFORMITY, trial, 0)
    ctx = params.context()
    base = mat_random(ctx, params.k, rng)
    a = sample_range(a_range[0], a_range[1], rng)
    power = mat_pow(base, a)
    other = mat_random(ctx, params.k, make_rng(seed, STREAM_UNIFORMITY, trial, 1))
    return power, other


def exp_uniformity(params: KexParams, trials: int, seed: int, a_range: Tuple[int, int],
                   workers: int = 1) -> Tuple[FrequencyTable, FrequencyTable]:
    """
    Compare the coefficient distribution of M^a with that of a random N.

    M and N come from two sibling streams of the same trial, so each trial
    sees a fresh pair of independent random matrices.

    Returns:
        Tuple[FrequencyTable, FrequencyTable]: Tables for M^a and N
    """
    _check_trials(trials, workers)
    ctx = params.context()
    power_table = FrequencyTable.empty(ctx, params.k)
    random_table = FrequencyTable.empty(ctx, params.k)
    jobs = [(params, a_range, seed, trial) for trial in range(trials)]
    for power, other in _run_trials(_uniformity_trial, jobs, workers):
        power_table.add(power)
        random_table.add(other)
    logger.debug(f"M^a vs N experiment finished after {trials} trials")
    return power_table, random_table


def _triple_trial(params: KexParams, base: MatrixGR, seed: int, batch: int,
                  trial: int) -> Tuple[MatrixGR, MatrixGR, MatrixGR]:
    rng = make_rng(seed, STREAM_TRIPLES, batch, trial + 1)
    a = kex_sample_exponent(params, rng)
    b = kex_sample_exponent(params, rng)
    ma = mat_pow(base, a)
    return ma, mat_pow(base, b), mat_pow(ma, b)


def _triples_batch(params: KexParams, trials: int, seed: int, batch: int, base: MatrixGR,
                   workers: int) -> TripleTable:
    table = TripleTable.empty(params.context(), params.k)
    jobs = [(params, base, seed, batch, trial) for trial in range(trials)]
    for ma, mb, mab in _run_trials(_triple_trial, jobs, workers):
        table.add(ma, mb, mab)
    return table


def exp_triples(params: KexParams, trials: int, seed: int, base: Optional[MatrixGR] = None,
                workers: int = 1) -> TripleTable:
    """
    Joint residue triples of (M^a, M^b, M^{ab}) for one fixed base M.

    Args:
        params (KexParams): Ring, dimension and the range for a and b
        trials (int): Number of (a, b) draws
        seed (int): Run seed
        base (MatrixGR, optional): The fixed M; drawn from the seed if absent
        workers (int): Worker processes

    Returns:
        TripleTable: n³ columns per (entry, group element) cell
    """
    return exp_triples_batches(params, trials, seed, batches=1, fixed_base=True,
                               base=base, workers=workers)[0]


def exp_triples_batches(params: KexParams, trials: int, seed: int, batches: int = 1,
                        fixed_base: bool = True, base: Optional[MatrixGR] = None,
                        workers: int = 1) -> List[TripleTable]:
    """
    Repeat the triple experiment in several batches.

    With fixed_base every batch reuses the same M; otherwise each batch draws
    its own.

    Raises:
        ParameterError: If trials, batches or workers is below 1, or a base
            is given while fixed_base is off
    """
    _check_trials(trials, workers)
    if batches < 1:
        raise ParameterError(f"batches must be at least 1, got {batches}")
    if base is not None and not fixed_base:
        raise ParameterError("a given base is only used with fixed_base")
    ctx = params.context()
    if base is not None:
        params.check_matrix(base)
    tables = []
    for batch in range(batches):
        if base is None or not fixed_base:
            base_stream = 0 if fixed_base else batch
            base = mat_random(ctx, params.k, make_rng(seed, STREAM_TRIPLES, base_stream, 0))
        tables.append(_triples_batch(params, trials, seed, batch, base, workers))
        logger.debug(f"Triple batch {batch + 1}/{batches} finished after {trials} trials")
    return tables


def qq_pairs(table_a, table_b) -> List[Tuple[int, int]]:
    """
    Empirical quantile pairs of two tables of equal shape.

    For each matrix entry the counts of both tables are flattened, sorted
    ascending and paired by index; entries are concatenated in order.

    Raises:
        ContextMismatchError: If the table shapes differ
    """
    if table_a.counts.shape != table_b.counts.shape:
        raise ContextMismatchError(
            f"table shapes differ: {table_a.counts.shape} vs {table_b.counts.shape}")
    entries = table_a.counts.shape[0]
    left = np.sort(table_a.counts.reshape(entries, -1), axis=1)
    right = np.sort(table_b.counts.reshape(entries, -1), axis=1)
    return [(int(x), int(y)) for x, y in zip(left.reshape(-1), right.reshape(-1))]


def qq_max_deviation(pairs: Sequence[Tuple[int, int]]) -> float:
    """
    Largest distance from y = x after scaling each side to mean 1.

    Tables of the same shape but different trial counts score 0.
    """
    if not pairs:
        return 0.0
    values = np.asarray(pairs, dtype=np.float64)
    means = values.mean(axis=0)
    if np.any(means == 0):
        return 0.0 if np.all(means == 0) else math.inf
    scaled = values / means
    return float(np.max(np.abs(scaled[:, 0] - scaled[:, 1])))


def chi_square_uniform(counts) -> ChiSquareResult:
    """
    Pearson chi-square test of counts against the uniform distribution.

    The last axis holds the cells of one distribution; any leading axes index
    independent rows, each tested against its own total. Statistics and
    degrees of freedom are summed over rows.

    Args:
        counts: Count array, at least one dimension

    Returns:
        ChiSquareResult: statistic, p-value and degrees of freedom

    Raises:
        ParameterError: If some row expects fewer than 5 counts per cell
    """
    observed = np.asarray(counts, dtype=np.float64)
    if observed.ndim == 0 or observed.shape[-1] < 2:
        raise ParameterError("need at least two cells")
    cells = observed.shape[-1]
    rows = observed.reshape(-1, cells)
    expected = rows.sum(axis=1, keepdims=True) / cells
    if np.any(expected < MIN_EXPECTED_COUNT):
        raise ParameterError(
            f"expected count per cell {float(expected.min()):.3g} is below {MIN_EXPECTED_COUNT}")
    statistic = float(((rows - expected) ** 2 / expected).sum())
    dof = rows.shape[0] * (cells - 1)
    return ChiSquareResult(statistic, float(stats.chi2.sf(statistic, dof)), dof)


def binom_support_prob(m: int, n: int, lo: int, hi: int) -> float:
    """
    Exact P(lo <= X <= hi) for X ~ Binomial(m!, 1 - 1/n).

    X is the support size of a uniformly random element of Z_n[S_m]. The sum
    is done in exact rational arithmetic and rounded once.
    """
    size = math.factorial(m)
    if n < 2:
        raise ParameterError(f"modulus n must be at least 2, got {n}")
    if not 0 <= lo <= hi <= size:
        raise ParameterError(f"need 0 <= lo <= hi <= {size}, got lo={lo}, hi={hi}")
    total = sum(math.comb(size, x) * (n - 1) ** x for x in range(lo, hi + 1))
    return float(Fraction(total, n ** size))


def support_monte_carlo(ctx: RingContext, samples: int, rng: np.random.Generator,
                        lo: int, hi: int, batch: int = 10000) -> float:
    """Fraction of random elements whose support size lies in [lo, hi]."""
    if samples < 1:
        raise ParameterError(f"samples must be at least 1, got {samples}")
    hits = 0
    remaining = samples
    while remaining:
        size = min(batch, remaining)
        draws = rng.integers(0, ctx.n, size=(size, ctx.order), dtype=np.int64)
        support = np.count_nonzero(draws, axis=1)
        hits += int(np.count_nonzero((support >= lo) & (support <= hi)))
        remaining -= size
    return hits / samples


def write_frequency_csv(handle: TextIO, tables: Dict[str, FrequencyTable], seed: int,
                        header: Dict[str, Any]) -> None:
    """One row per (table, entry, group element) with one column per residue."""
    handle.write(artifact_header(seed, header) + "\n")
    writer = csv.writer(handle, lineterminator="\n")
    residues = next(iter(tables.values())).n if tables else 0
    writer.writerow(["table", "entry", "element"] + [f"r{r}" for r in range(residues)])
    for name, table in tables.items():
        entries, elements, _ = table.counts.shape
        for e in range(entries):
            for g in range(elements):
                writer.writerow([name, e, g] + table.counts[e, g].tolist())


def write_triples_csv(handle: TextIO, tables: Sequence[TripleTable], seed: int,
                      header: Dict[str, Any]) -> None:
    """One row per (batch, entry, group element) with one column per residue triple."""
    handle.write(artifact_header(seed, header) + "\n")
    writer = csv.writer(handle, lineterminator="\n")
    columns = tables[0].counts.shape[2] if tables else 0
    writer.writerow(["batch", "entry", "element"] + [f"t{c}" for c in range(columns)])
    for batch, table in enumerate(tables):
        entries, elements, _ = table.counts.shape
        for e in range(entries):
            for g in range(elements):
                writer.writerow([batch, e, g] + table.counts[e, g].tolist())


def write_qq_csv(handle: TextIO, pairs: Sequence[Tuple[int, int]], seed: int,
                 header: Dict[str, Any]) -> None:
    handle.write(artifact_header(seed, header) + "\n")
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(["x", "y"])
    writer.writerows(pairs)


def write_chi_square_csv(handle: TextIO, results: Dict[str, ChiSquareResult], seed: int,
                         header: Dict[str, Any]) -> None:
    handle.write(artifact_header(seed, header) + "\n")
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(["table", "statistic", "dof", "p_value"])
    for name, result in results.items():
        writer.writerow([name, format_float(result.statistic), result.dof,
                         format_float(result.p_value)])
