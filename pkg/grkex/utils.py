#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Utility functions for grkex: seeds, per-trial random streams, output files
and number formatting.
"""

import os
import sys
import secrets
import logging
import contextlib
from typing import Any, Dict, Iterator, Optional, TextIO

import numpy as np
from dotenv import load_dotenv

from .errors import ParameterError

logger = logging.getLogger("grkex.utils")

SEED_ENV_VAR = "GRKEX_SEED"


def resolve_seed(flag_seed: Optional[int] = None) -> int:
    """
    Pick the run seed.

    The --seed flag wins, then GRKEX_SEED (a .env file in the working
    directory is honoured), then fresh entropy.

    Returns:
        int: A nonnegative seed below 2^64
    """
    if flag_seed is not None:
        seed = flag_seed
    else:
        load_dotenv()
        env_seed = os.environ.get(SEED_ENV_VAR)
        if env_seed:
            try:
                seed = int(env_seed, 0)
            except ValueError:
                raise ParameterError(f"{SEED_ENV_VAR} must be an integer, got '{env_seed}'")
            logger.debug(f"Seed taken from {SEED_ENV_VAR}")
        else:
            seed = secrets.randbits(64)
            logger.debug("Seed drawn from system entropy")
    if not 0 <= seed < 2 ** 64:
        raise ParameterError(f"seed must be in 0..2^64-1, got {seed}")
    return seed


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """
    Independent generator for one (seed, stream...) key.

    Trials keyed by (experiment, trial index) draw from their own stream, so
    serial and parallel runs see identical randomness.
    """
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=tuple(stream)))


def format_float(value: float) -> str:
    """17 significant digits, enough to round-trip any double."""
    return f"{value:.17g}"


def artifact_header(seed: int, params: Dict[str, Any]) -> str:
    """Comment line that makes an output file self-describing."""
    fields = " ".join(f"{key}={value}" for key, value in params.items())
    return f"# grkex seed={seed} {fields}".rstrip()


@contextlib.contextmanager
def open_output(path: Optional[str], binary: bool = False) -> Iterator[TextIO]:
    """Yield a writable file for path, or stdout when path is None or "-"."""
    if path is None or path == "-":
        yield sys.stdout.buffer if binary else sys.stdout
        return
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    mode = "wb" if binary else "w"
    kwargs = {} if binary else {"encoding": "utf-8", "newline": ""}
    with open(path, mode, **kwargs) as handle:
        yield handle
    logger.info(f"Wrote {path}")


def read_bytes(path: str) -> bytes:
    try:
        with open(path, "rb") as f:
            return f.read()
    except OSError as e:
        logger.error(f"Error reading {path}: {e}")
        raise
